//! Radius queries on a uniform grid, checked against a linear scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabeling::spatial::GridIndex;
use slabeling::PointSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pts = PointSet::new(3);
    for _ in 0..20_000 {
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        pts.push(&p)?;
    }
    let r = 0.1;
    let index = GridIndex::build(&pts, r)?;
    println!("{} points in {} cells (cell size {})", index.len(), index.num_cells(), index.cell_size());

    let q = [0.2, -0.1, 0.5];
    let hits = index.neighbors_within(&q, r);
    let scan = pts
        .iter()
        .filter(|p| p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r)
        .count();
    println!("{} neighbours within {r} of {q:?}; linear scan finds {scan}", hits.len());

    // Visiting stops early when the closure returns false.
    let mut first = None;
    index.visit_within(&q, r, |i, _| {
        first = Some(i);
        false
    });
    println!("first visited: {first:?}");
    Ok(())
}
