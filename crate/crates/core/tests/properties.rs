//! Randomized invariants of geometry, spatial index, schedules and samplers.

mod common;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn run(c: Check) -> Result<(), TestCaseError> {
    c.map(|_| ()).map_err(TestCaseError::fail)
}

/// Ambient dimension plus a flat buffer big enough for `per_dim(amb)` numbers.
fn buffer(amb: std::ops::RangeInclusive<usize>, len: fn(usize) -> usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    amb.prop_flat_map(move |a| (Just(a), prop::collection::vec(-1.0..1.0f64, len(a))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn principal_angles_symmetric_sorted_bounded(
        (amb, raw) in buffer(2..=6, |a| 2 * a * a),
        k1 in 1usize..=6,
        k2 in 1usize..=6,
    ) {
        let (k1, k2) = (1 + (k1 - 1) % amb, 1 + (k2 - 1) % amb);
        run(principal_angles_well_formed(&raw, amb, k1, k2))?;
    }

    #[test]
    fn equal_dim_angle_is_sine(
        (amb, raw) in buffer(2..=6, |a| 2 * a * a),
        k in 1usize..=6,
    ) {
        run(angle_is_sine_of_largest(&raw, amb, 1 + (k - 1) % amb))?;
    }

    #[test]
    fn subspace_angle_triangle(
        (amb, raw) in buffer(2..=6, |a| 3 * a * a),
        k in 1usize..=6,
    ) {
        run(angle_triangle_inequality(&raw, amb, 1 + (k - 1) % amb))?;
    }

    #[test]
    fn slab_membership_rotation_invariant(
        (amb, raw) in buffer(2..=5, |a| a * a + a * a + 2 * a),
        k in 1usize..=4,
        h_par in 0.05..1.0f64,
        thin in 0.01..1.0f64,
    ) {
        let k = 1 + (k - 1) % (amb - 1);
        run(slab_rotation_invariant(&raw, amb, k, h_par, h_par * thin))?;
    }

    #[test]
    fn enclosing_ball_equals_searched_minimum(
        m in 1usize..=4,
        raw in prop::collection::vec(-0.9..0.9f64, 12),
    ) {
        run(enclosing_ball_matches_search(&raw, m))?;
    }

    #[test]
    fn simplex_distance_zero_iff_convex_combination(
        (amb, raw) in buffer(2..=4, |a| (a + 1) * a + (a + 1) + a),
        m in 2usize..=5,
        combine in any::<bool>(),
    ) {
        let m = 2 + (m - 2) % amb;
        run(simplex_distance_zero_iff_inside(&raw, amb, m, combine))?;
    }

    #[test]
    fn hausdorff_metric_axioms(
        (amb, raw) in buffer(1..=4, |a| 24 * a),
        sizes in [1usize..=8, 1usize..=8, 1usize..=8],
    ) {
        run(hausdorff_is_metric(&raw, amb, sizes))?;
    }

    #[test]
    fn grid_query_equals_scan(
        (amb, raw) in buffer(1..=4, |a| 60 * a),
        q in prop::collection::vec(-1.2..1.2f64, 4),
        r in 0.0..1.0f64,
        cells in [0.01..2.0f64, 0.01..2.0f64],
    ) {
        run(grid_matches_scan(&raw, amb, &q[..amb], r, cells))?;
    }

    #[test]
    fn bandwidths_follow_rate(n in 3usize..2_000_000, ambient in 2usize..=6) {
        run(bandwidth_rate(n, ambient))?;
    }

    #[test]
    fn schedule_json_round_trip(
        n in 3usize..10_000_000,
        ambient in 2usize..=6,
        h_scale in 1e-3..1e3f64,
        asymptotic in any::<bool>(),
    ) {
        run(schedule_roundtrip(n, ambient, h_scale, asymptotic))?;
    }

    #[test]
    fn figure_eight_curvature_inequality(t in -10.0..10.0f64, step in -0.02..0.02f64) {
        run(figure_eight_second_order(t, step))?;
    }

    #[test]
    fn sampler_seeded_and_second_order(
        which in 0usize..4,
        scale in 0.2..3.0f64,
        rot in prop::collection::vec(-1.0..1.0f64, 16),
        shift in prop::collection::vec(-5.0..5.0f64, 4),
        seed in any::<u64>(),
    ) {
        if let Some(spec) = placed_spec(which, scale, &rot, &shift) {
            run(sampler_deterministic(&spec, 64, seed))?;
            run(tangent_second_order(&spec, 400, seed))?;
        }
    }

    #[test]
    fn section_volume_under_bound(
        (amb, raw) in buffer(2..=5, |a| 2 * a * a),
        k in 1usize..=5,
        k2 in 1usize..=5,
        h_par in 0.01..1.0f64,
        thin in 0.01..1.0f64,
        seed in any::<u64>(),
    ) {
        let k = 1 + (k - 1) % amb;
        let k2 = 1 + (k2 - 1) % k;
        run(section_volume_below_bound(&raw, amb, k, k2, h_par, h_par * thin, seed))?;
    }
}

#[test]
fn circle_angles_pass_ks() {
    use slabeling::samplers::{preset, sample_mixture};
    let scene = preset("circle").unwrap();
    let cloud = sample_mixture(&scene.specs, &scene.weights, 10_000, 11).unwrap();
    let mut u: Vec<f64> = cloud
        .points
        .iter()
        .map(|p| (p[1].atan2(p[0]) + std::f64::consts::PI) / (2.0 * std::f64::consts::PI))
        .collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max);
    // Critical value at level 0.001: 1.949 / sqrt(n).
    assert!(d < 1.949 / n.sqrt(), "KS statistic {d}");
}
