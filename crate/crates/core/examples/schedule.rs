//! Parameter schedules: desk-scale defaults, overrides, JSON round trip.

use slabeling::params::{practical_schedule, DimOverride};
use slabeling::{ModelConstants, ParamSchedule, ScheduleOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [1_000, 10_000, 100_000] {
        let s = practical_schedule(n, 3, &ScheduleOverrides::default())?;
        for d in &s.dims {
            println!(
                "n={n:>6} d={} h_par={:.4} h_perp={:.5} r={:.4} n_min={} delta={:.5}",
                d.d, d.h_par, d.h_perp, d.r, d.n_min, d.delta
            );
        }
    }

    // Halve every bandwidth and demand more points per slab for curves.
    let o = ScheduleOverrides {
        h_scale: Some(0.5),
        dims: vec![DimOverride {
            d: 1,
            n_min: Some(40),
            ..Default::default()
        }],
        ..Default::default()
    };
    let s = practical_schedule(5000, 3, &o)?;
    let json = s.to_json();
    println!("{json}");
    assert_eq!(ParamSchedule::from_json(&json)?, s);

    // The constants the asymptotic theory asks for, for comparison.
    let theory = ModelConstants::theory(3, 0.5, 1.0);
    println!("theory gamma for D=3, alpha_min=0.5: {:.3e}", theory.gamma);
    Ok(())
}
