//! Losses of one run against ground truth: clustering, Hausdorff, tangents.
//!
//! The circle is the easy case. The figure-eight shows what a self-crossing
//! does at moderate `n`: a few chords bridge the two branches near the
//! crossing, and the tangent error — a supremum — reports them.

use slabeling::metrics::{evaluate, reconstruct_layer, tangent_error, EvalConfig};
use slabeling::params::practical_schedule;
use slabeling::samplers::{preset, sample_mixture};
use slabeling::stratify::run_with_options;
use slabeling::{RunOptions, ScheduleOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = preset("circle")?;
    let n = 4000;
    let cloud = sample_mixture(&scene.specs, &scene.weights, n, 7)?;
    let sched = practical_schedule(n, scene.ambient(), &ScheduleOverrides::default())?;
    let res = run_with_options(&cloud.points, &sched, &RunOptions::default())?;
    let rep = evaluate(&res, &cloud, &EvalConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&rep)?);

    // The lemniscate scaled to unit curvature is long (about 29), so its
    // density sits below what the default bandwidth assumes; widen it.
    let scene = preset("figure_eight")?;
    let n = 3000;
    let cloud = sample_mixture(&scene.specs, &scene.weights, n, 7)?;
    let o = ScheduleOverrides {
        h_scale: Some(1.5),
        ..Default::default()
    };
    let sched = practical_schedule(n, scene.ambient(), &o)?;
    let res = run_with_options(&cloud.points, &sched, &RunOptions::default())?;
    let rep = evaluate(&res, &cloud, &EvalConfig::default())?;
    let l = &rep.layers[0];
    println!(
        "figure-eight n={n}: K_hat={} label check {:.3}, clustering {:.4}, Hausdorff {:.4}",
        rep.k_hat,
        rep.label_check,
        l.clustering_error,
        l.hausdorff_error.unwrap_or(f64::NAN)
    );
    let complex = reconstruct_layer(&res.layers[0], &cloud.points)?;
    let t = tangent_error(&scene.specs[0], &complex, l.delta_used);
    println!(
        "  tangent: curve->complex {:.3}, complex->curve {:.3} (bridging chords at the crossing)",
        t.manifold_to_complex, t.complex_to_manifold
    );
    Ok(())
}
