//! Monte-Carlo slab sections against the principal-angle bound.

use slabeling::geometry::{orthonormalize, principal_angles};
use slabeling::oracle::{mc_section_volume, section_volume_bound};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (h_par, h_perp) = (1.0, 0.1);
    let x = orthonormalize(&[&[1.0, 0.0][..]])?;
    for deg in [0.0, 5.0, 15.0, 45.0, 90.0] {
        let a: f64 = f64::to_radians(deg);
        let line = orthonormalize(&[&[a.cos(), a.sin()][..]])?;
        let est = mc_section_volume(&x, &line, h_par, h_perp, 50_000, 3);
        let exact = if a == 0.0 { 2.0 * h_par } else { 2.0 * (h_par / a.cos()).min(h_perp / a.sin()) };
        println!(
            "{deg:>4} deg: estimate {:.4} +- {:.4}, exact {exact:.4}, bound {:.4}",
            est.value,
            est.std_error,
            section_volume_bound(&x, &line, h_par, h_perp)
        );
    }

    // A plane against a tilted plane in R^4.
    let p = orthonormalize(&[&[1.0, 0.0, 0.0, 0.0][..], &[0.0, 1.0, 0.0, 0.0][..]])?;
    let q = orthonormalize(&[&[1.0, 0.0, 0.3, 0.0][..], &[0.0, 1.0, 0.0, 0.8][..]])?;
    let est = mc_section_volume(&p, &q, h_par, h_perp, 50_000, 4);
    println!(
        "planes at {:.3?} rad: estimate {:.4} +- {:.4}, bound {:.4}",
        principal_angles(&p, &q),
        est.value,
        est.std_error,
        section_volume_bound(&p, &q, h_par, h_perp)
    );
    Ok(())
}
