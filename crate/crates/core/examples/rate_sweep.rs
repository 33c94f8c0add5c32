//! A small sweep on the circle and the fitted convergence slopes.

use slabeling::experiment::{fit_rates, sweep, ExperimentConfig, SceneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::new(SceneConfig::Preset("circle".into()), vec![500, 1000, 2000, 4000], (0..3).collect());
    let rows = sweep(&cfg, |t, n, seed| {
        let l = &t.report.layers[0];
        println!("n={n:>5} seed={seed}: Hausdorff {:?} tangent {:?}", l.hausdorff_error, l.tangent_error);
    })?;
    for fit in fit_rates(&rows)? {
        let medians: Vec<String> = fit.medians.iter().map(|(n, m, _)| format!("{n}:{m:.3e}")).collect();
        println!(
            "layer {} {:>10}: slope {:?} +- {:?} [{}]",
            fit.layer,
            fit.loss.name(),
            fit.slope,
            fit.std_error,
            medians.join(" ")
        );
    }
    Ok(())
}
