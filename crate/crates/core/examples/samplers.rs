//! Synthetic scenes: presets, custom placements, CSV plus sidecar output.

use slabeling::io::{read_truth, write_cloud};
use slabeling::samplers::{preset, sample_mixture, PRESET_NAMES};
use slabeling::{ManifoldKind, ManifoldSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in PRESET_NAMES {
        let scene = preset(name)?;
        let dims: Vec<usize> = scene.specs.iter().map(ManifoldSpec::dim).collect();
        println!("{name:>16}: R^{} dims {dims:?} max curvature {:.3}", scene.ambient(), scene.max_curvature());
    }

    // A small torus next to a tilted circle.
    let c = 1.0 / 2f64.sqrt();
    let specs = vec![
        ManifoldSpec::new(ManifoldKind::Torus { major: 1.0, minor: 0.25 }, 3),
        ManifoldSpec::new(ManifoldKind::Circle, 3)
            .rotated(vec![1.0, 0.0, 0.0, 0.0, c, -c, 0.0, c, c])
            .translated(&[0.0, 0.0, 2.0]),
    ];
    let cloud = sample_mixture(&specs, &[0.7, 0.3], 2000, 42)?;
    let labels = cloud.labels.as_ref().expect("sampled clouds are labeled");
    println!("torus points: {}", labels.iter().filter(|&&l| l == 1).count());
    println!("distance of the first point to its layer: {:.2e}", specs[labels[0] - 1].dist(cloud.points.point(0)));

    let dir = std::env::temp_dir().join("slabeling_samplers_example");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("cloud.csv");
    write_cloud(&csv, &cloud)?;
    let back = read_truth(&csv)?;
    println!("wrote {} and read back {} labeled points", csv.display(), back.len());
    Ok(())
}
