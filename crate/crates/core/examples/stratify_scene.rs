//! Stratify a circle-plus-sphere sample and summarize what was found.

use slabeling::metrics::extract_structure;
use slabeling::params::practical_schedule;
use slabeling::samplers::{preset, sample_mixture};
use slabeling::stratify::run_with_options;
use slabeling::{RunOptions, ScheduleOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(2000), |s| s.parse())?;
    let scene = preset("circle_sphere")?;
    let cloud = sample_mixture(&scene.specs, &scene.weights, n, 0)?;
    let sched = practical_schedule(n, scene.ambient(), &ScheduleOverrides::default())?;
    let res = run_with_options(&cloud.points, &sched, &RunOptions::default())?;

    let (k_hat, dims) = extract_structure(&res);
    println!("n={n}: {k_hat} layer(s) of dimension {dims:?} in {:.0} ms", res.run_info.wall_ms);
    let truth = cloud.labels.as_ref().expect("labeled");
    for l in &res.layers {
        let on_sphere = l.labeled.iter().filter(|&&i| truth[i] == 2).count();
        println!(
            "  d={}: {} tuples, {} points ({} by pruning), {} of them on the sphere",
            l.dim,
            l.tuples.len(),
            l.labeled.len(),
            l.pruned.len(),
            on_sphere
        );
    }
    println!("  unlabeled: {}", res.residual.len());
    Ok(())
}
