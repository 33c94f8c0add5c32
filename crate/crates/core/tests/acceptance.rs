//! End-to-end acceptance checks. One PASS/FAIL line per criterion; exits
//! nonzero if any fails.
//!
//! Run alone with `cargo test --release --test acceptance`.

mod common;

use std::hash::Hasher;
use std::io::Write;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rustc_hash::FxHasher;

use common::*;
use slabeling::experiment::{find_fit, fit_rates, median, run_trial, sweep, ExperimentConfig, Loss, SceneConfig};
use slabeling::geometry::orthonormalize;
use slabeling::metrics::EvalConfig;
use slabeling::oracle::{brute_force_run, mc_section_volume, section_volume_bound};
use slabeling::params::{practical_schedule, unit_ball_volume};
use slabeling::samplers::{preset, sample_mixture};
use slabeling::stratify::{run_with_options, RunInfo, RunOptions};
use slabeling::{ScheduleOverrides, StratificationResult};

const ORACLE_BUDGET: Duration = Duration::from_secs(300);
const STRUCTURE_BUDGET_PER_SEED: Duration = Duration::from_secs(120);
const RATE_BUDGET: Duration = Duration::from_secs(600);
const CLUSTER_BUDGET: Duration = Duration::from_secs(600);
const LARGE_RUN_BUDGET: Duration = Duration::from_secs(60);

const HAUSDORFF_SLOPE: (f64, f64) = (-2.6, -1.4);
const TANGENT_SLOPE: (f64, f64) = (-1.5, -0.5);
const CLUSTER_MEDIAN_MAX: f64 = 0.05;
const MIN_GOOD_SEEDS: usize = 9;
const SIGMAS: f64 = 3.0;
const PROPERTY_CASES: usize = 1000;

type Verdict = Result<String, String>;

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn quiet() -> EvalConfig {
    EvalConfig {
        skip_hausdorff: true,
        skip_tangent: true,
        ..Default::default()
    }
}

// ---------------------------------------------------------------- 1

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let cases = oracle_cases();
    for case in &cases {
        let fast = run_with_options(&case.points, &case.schedule, &RunOptions::uncapped()).map_err(|e| e.to_string())?;
        let slow = brute_force_run(&case.points, &case.schedule).map_err(|e| e.to_string())?;
        if fast != slow {
            return Err(format!("{}: indexed and brute-force runs differ", case.name));
        }
    }
    let t = start.elapsed();
    if t > ORACLE_BUDGET {
        return Err(format!("{} cases equal but took {}", cases.len(), secs(t)));
    }
    Ok(format!("{} clouds identical, {}", cases.len(), secs(t)))
}

// ---------------------------------------------------------------- 2 & 6

struct StructureRuns {
    identified: usize,
    labels_exact: usize,
    seeds: usize,
    slowest: Duration,
}

fn structure_runs() -> Result<StructureRuns, String> {
    let n = 5000;
    let scene = preset("circle_sphere").map_err(|e| e.to_string())?;
    let sched = practical_schedule(n, scene.ambient(), &ScheduleOverrides::default()).map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig::new(SceneConfig::Preset("circle_sphere".into()), vec![n], (0..10).collect());
    cfg.eval = EvalConfig {
        tau: Some(vec![10.0 * sched.dims[0].h_par.powi(2), 10.0 * sched.dims[1].h_par.powi(2)]),
        ..quiet()
    };
    let mut out = StructureRuns {
        identified: 0,
        labels_exact: 0,
        seeds: 0,
        slowest: Duration::ZERO,
    };
    for &seed in &cfg.seeds {
        let start = Instant::now();
        let trial = run_trial(&cfg, &scene, n, seed).map_err(|e| e.to_string())?;
        out.slowest = out.slowest.max(start.elapsed());
        out.seeds += 1;
        if trial.report.k_hat == 2 && trial.report.dims == [1, 2] {
            out.identified += 1;
        }
        if trial.report.label_check == 1.0 {
            out.labels_exact += 1;
        }
    }
    Ok(out)
}

fn structure_verdict(r: &Result<StructureRuns, String>) -> Verdict {
    let r = r.as_ref().map_err(Clone::clone)?;
    let msg = format!("K_hat=2, dims=[1,2] in {}/{} seeds, slowest {}", r.identified, r.seeds, secs(r.slowest));
    if r.identified >= MIN_GOOD_SEEDS && r.slowest <= STRUCTURE_BUDGET_PER_SEED {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn label_verdict(r: &Result<StructureRuns, String>) -> Verdict {
    let r = r.as_ref().map_err(Clone::clone)?;
    let msg = format!("label check = 1.0 in {}/{} seeds", r.labels_exact, r.seeds);
    if r.labels_exact >= MIN_GOOD_SEEDS {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- 3 & 4

struct RateSweep {
    hausdorff: Option<f64>,
    tangent: Option<f64>,
    delta_mismatch: Option<String>,
    elapsed: Duration,
}

fn rate_sweep() -> Result<RateSweep, String> {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(
        SceneConfig::Preset("circle".into()),
        vec![1000, 2000, 4000, 8000, 16000],
        (0..5).collect(),
    );
    let mut delta_mismatch = None;
    let rows = sweep(&cfg, |trial, n, seed| {
        let Ok(s) = practical_schedule(n, 2, &cfg.schedule) else {
            delta_mismatch = Some(format!("no schedule at n={n}"));
            return;
        };
        let d = &s.dims[0];
        let want = 3.0 * d.kappa * d.h_par * d.h_par;
        for l in &trial.report.layers {
            if (l.delta_used - want).abs() > 1e-12 * want {
                delta_mismatch = Some(format!("n={n} seed={seed}: delta {} vs {want}", l.delta_used));
            }
        }
    })
    .map_err(|e| e.to_string())?;
    let fits = fit_rates(&rows).map_err(|e| e.to_string())?;
    Ok(RateSweep {
        hausdorff: find_fit(&fits, 1, Loss::Hausdorff).and_then(|f| f.slope),
        tangent: find_fit(&fits, 1, Loss::Tangent).and_then(|f| f.slope),
        delta_mismatch,
        elapsed: start.elapsed(),
    })
}

fn slope_verdict(slope: Option<f64>, range: (f64, f64)) -> Verdict {
    let s = slope.ok_or("no slope fitted")?;
    let msg = format!("slope {s:.3} (allowed [{}, {}])", range.0, range.1);
    if (range.0..=range.1).contains(&s) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hausdorff_verdict(r: &Result<RateSweep, String>) -> Verdict {
    let r = r.as_ref().map_err(Clone::clone)?;
    let v = slope_verdict(r.hausdorff, HAUSDORFF_SLOPE);
    let t = secs(r.elapsed);
    if r.elapsed > RATE_BUDGET {
        return Err(format!("{}, sweep took {t}", v.unwrap_or_else(|e| e)));
    }
    v.map(|m| format!("{m}, sweep {t}")).map_err(|m| format!("{m}, sweep {t}"))
}

fn tangent_verdict(r: &Result<RateSweep, String>) -> Verdict {
    let r = r.as_ref().map_err(Clone::clone)?;
    if let Some(m) = &r.delta_mismatch {
        return Err(m.clone());
    }
    slope_verdict(r.tangent, TANGENT_SLOPE).map(|m| format!("{m}, delta = 3 kappa h_1^2"))
}

// ---------------------------------------------------------------- 5 & 9

struct ClusterSweep {
    /// Per layer: medians in increasing n.
    medians: Vec<Vec<(usize, f64)>>,
    largest_run: Duration,
    elapsed: Duration,
}

fn cluster_sweep() -> Result<ClusterSweep, String> {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(
        SceneConfig::Preset("circle_sphere".into()),
        vec![2500, 5000, 10000],
        (0..5).collect(),
    );
    cfg.eval = quiet();
    let mut largest = Duration::ZERO;
    let rows = sweep(&cfg, |trial, n, _| {
        if n == 10000 {
            largest = largest.max(Duration::from_secs_f64(trial.result.run_info.wall_ms / 1000.0));
        }
    })
    .map_err(|e| e.to_string())?;
    let mut medians = Vec::new();
    for layer in 1..=2 {
        let mut per_n = Vec::new();
        for &n in &cfg.n_grid {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.n == n && r.layer == layer).map(|r| r.clustering).collect();
            if v.is_empty() {
                return Err(format!("no rows for layer {layer} at n={n}"));
            }
            per_n.push((n, median(&mut v)));
        }
        medians.push(per_n);
    }
    Ok(ClusterSweep {
        medians,
        largest_run: largest,
        elapsed: start.elapsed(),
    })
}

fn cluster_verdict(r: &Result<ClusterSweep, String>) -> Verdict {
    let r = r.as_ref().map_err(Clone::clone)?;
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (k, per_n) in r.medians.iter().enumerate() {
        let last = per_n.last().expect("nonempty").1;
        summary.push(format!(
            "layer {}: {}",
            k + 1,
            per_n.iter().map(|(_, m)| format!("{m:.4}")).collect::<Vec<_>>().join(" -> ")
        ));
        if last > CLUSTER_MEDIAN_MAX {
            problems.push(format!("layer {} median {last} at n=10000", k + 1));
        }
        if per_n.windows(2).any(|w| w[1].1 > w[0].1) {
            problems.push(format!("layer {} medians increase", k + 1));
        }
    }
    if r.elapsed > CLUSTER_BUDGET {
        problems.push(format!("took {}", secs(r.elapsed)));
    }
    let msg = format!("{}; {}", summary.join("; "), secs(r.elapsed));
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{} ({msg})", problems.join(", ")))
    }
}

/// Feeds serialized bytes into a hasher without building the string.
struct HashWriter(FxHasher);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.write(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn result_digest(mut res: StratificationResult) -> Result<(u64, usize), String> {
    res.run_info = RunInfo::default();
    let mut w = HashWriter(FxHasher::default());
    serde_json::to_writer(&mut w, &res).map_err(|e| e.to_string())?;
    let tuples = res.layers.iter().map(|l| l.tuples.len()).sum();
    Ok((w.0.finish(), tuples))
}

fn determinism(cluster: &Result<ClusterSweep, String>) -> Verdict {
    let n = 5000;
    let scene = preset("circle_sphere").map_err(|e| e.to_string())?;
    let cloud = sample_mixture(&scene.specs, &scene.weights, n, 0).map_err(|e| e.to_string())?;
    let sched = practical_schedule(n, scene.ambient(), &ScheduleOverrides::default()).map_err(|e| e.to_string())?;
    let mut digests = Vec::new();
    for t in [1, 2, 8] {
        let res = run_with_options(&cloud.points, &sched, &RunOptions::default().with_threads(t)).map_err(|e| e.to_string())?;
        digests.push(result_digest(res)?);
    }
    if digests.windows(2).any(|w| w[0] != w[1]) {
        return Err(format!("result JSON differs across threads 1/2/8: {digests:?}"));
    }
    let largest = cluster.as_ref().map_err(|e| format!("no timing: {e}"))?.largest_run;
    let msg = format!(
        "threads 1/2/8 identical ({} tuples); slowest n=10000 run {} on {} core(s)",
        digests[0].1,
        secs(largest),
        std::thread::available_parallelism().map_or(1, |p| p.get())
    );
    if largest > LARGE_RUN_BUDGET {
        Err(msg)
    } else {
        Ok(msg)
    }
}

// ---------------------------------------------------------------- 7

fn volume_bound() -> Verdict {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut below = 0;
    let mut pairs = 0;
    while pairs < 100 {
        let amb = rng.random_range(2..=5);
        let k = rng.random_range(1..=amb);
        let k2 = rng.random_range(1..=k);
        let raw = uniform_vec(&mut rng, (k + k2) * amb, -1.0, 1.0);
        let h_par = rng.random_range(0.05..1.0);
        let h_perp = h_par * rng.random_range(0.01..1.0);
        let (Some(t), Some(t2)) = (flat(&raw, k, amb), flat(&raw[k * amb..], k2, amb)) else {
            continue;
        };
        pairs += 1;
        let est = mc_section_volume(&t, &t2, h_par, h_perp, 4000, rng.random());
        if est.value <= section_volume_bound(&t, &t2, h_par, h_perp) + SIGMAS * est.std_error {
            below += 1;
        }
    }

    let line = |a: f64| orthonormalize(&[&[a.cos(), a.sin()][..]]).expect("line");
    let mut closed = Vec::new();
    // Identical planes in R^4: the section is the h_par-ball of the plane.
    let plane = orthonormalize(&[&[1.0, 0.0, 1.0, 0.0][..], &[0.0, 1.0, 0.0, -1.0][..]]).expect("plane");
    let (h_par, h_perp) = (0.7, 0.3);
    closed.push((
        "identical flats",
        mc_section_volume(&plane, &plane, h_par, h_perp, 20_000, 1),
        unit_ball_volume(2) * h_par * h_par,
    ));
    // Perpendicular lines in R^2: an interval of half-length h_perp.
    closed.push((
        "orthogonal lines",
        mc_section_volume(&line(0.0), &line(std::f64::consts::FRAC_PI_2), h_par, h_perp, 20_000, 2),
        2.0 * h_perp,
    ));
    // Lines at angle theta: whichever of the two constraints binds first.
    let theta: f64 = 0.3;
    closed.push((
        "lines at 0.3 rad",
        mc_section_volume(&line(0.0), &line(theta), 1.0, 0.2, 20_000, 3),
        2.0 * (1.0 / theta.cos()).min(0.2 / theta.sin()),
    ));
    let misses: Vec<String> = closed
        .iter()
        .filter(|(_, est, want)| !est.matches(*want, SIGMAS))
        .map(|(name, est, want)| format!("{name}: {} +- {} vs {want}", est.value, est.std_error))
        .collect();
    let msg = format!("bound held in {below}/100 pairs; {}/3 closed forms matched", 3 - misses.len());
    if below == 100 && misses.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg} {misses:?}"))
    }
}

// ---------------------------------------------------------------- 8

fn invariant_suite() -> Verdict {
    use rand_chacha::ChaCha8Rng;
    type Case = Box<dyn FnMut(&mut ChaCha8Rng) -> Check>;
    let checks: Vec<(&str, Case)> = vec![
        (
            "principal angles",
            Box::new(|r| {
                let amb = r.random_range(2..=6);
                let raw = uniform_vec(r, 2 * amb * amb, -1.0, 1.0);
                principal_angles_well_formed(&raw, amb, r.random_range(1..=amb), r.random_range(1..=amb))
            }),
        ),
        (
            "angle is sine",
            Box::new(|r| {
                let amb = r.random_range(2..=6);
                let raw = uniform_vec(r, 2 * amb * amb, -1.0, 1.0);
                angle_is_sine_of_largest(&raw, amb, r.random_range(1..=amb))
            }),
        ),
        (
            "angle triangle inequality",
            Box::new(|r| {
                let amb = r.random_range(2..=6);
                let raw = uniform_vec(r, 3 * amb * amb, -1.0, 1.0);
                angle_triangle_inequality(&raw, amb, r.random_range(1..=amb))
            }),
        ),
        (
            "slab rotation invariance",
            Box::new(|r| {
                let amb = r.random_range(2..=5);
                let raw = uniform_vec(r, 2 * amb * amb + 2 * amb, -1.0, 1.0);
                let h_par = r.random_range(0.05..1.0);
                let thin = r.random_range(0.01..1.0);
                slab_rotation_invariant(&raw, amb, r.random_range(1..amb), h_par, h_par * thin)
            }),
        ),
        (
            "enclosing ball",
            Box::new(|r| {
                let raw = uniform_vec(r, 12, -0.9, 0.9);
                enclosing_ball_matches_search(&raw, r.random_range(1..=4))
            }),
        ),
        (
            "simplex distance",
            Box::new(|r| {
                let amb = r.random_range(2..=4);
                let raw = uniform_vec(r, (amb + 1) * amb + (amb + 1) + amb, -1.0, 1.0);
                simplex_distance_zero_iff_inside(&raw, amb, r.random_range(2..=amb + 1), r.random())
            }),
        ),
        (
            "hausdorff metric",
            Box::new(|r| {
                let amb = r.random_range(1..=4);
                let raw = uniform_vec(r, 24 * amb, -1.0, 1.0);
                let sizes = [r.random_range(1..=8), r.random_range(1..=8), r.random_range(1..=8)];
                hausdorff_is_metric(&raw, amb, sizes)
            }),
        ),
        (
            "grid query",
            Box::new(|r| {
                let amb = r.random_range(1..=4);
                let raw = uniform_vec(r, 60 * amb, -1.0, 1.0);
                let q = uniform_vec(r, amb, -1.2, 1.2);
                let cells = [r.random_range(0.01..2.0), r.random_range(0.01..2.0)];
                grid_matches_scan(&raw, amb, &q, r.random_range(0.0..1.0), cells)
            }),
        ),
        (
            "bandwidth rate",
            Box::new(|r| bandwidth_rate(r.random_range(3..2_000_000), r.random_range(2..=6))),
        ),
        (
            "schedule round trip",
            Box::new(|r| {
                let h_scale = 10f64.powf(r.random_range(-3.0..3.0));
                schedule_roundtrip(r.random_range(3..10_000_000), r.random_range(2..=6), h_scale, r.random())
            }),
        ),
        (
            "figure-eight curvature",
            Box::new(|r| figure_eight_second_order(r.random_range(-10.0..10.0), r.random_range(-0.02..0.02))),
        ),
        (
            "sampler determinism and second order",
            Box::new(|r| {
                let which = r.random_range(0..4);
                let scale = r.random_range(0.2..3.0);
                let rot = uniform_vec(r, 16, -1.0, 1.0);
                let shift = uniform_vec(r, 4, -5.0, 5.0);
                let seed: u64 = r.random();
                match placed_spec(which, scale, &rot, &shift) {
                    Some(spec) => Ok(sampler_deterministic(&spec, 64, seed)? && tangent_second_order(&spec, 400, seed)?),
                    None => Ok(false),
                }
            }),
        ),
        (
            "section volume bound",
            Box::new(|r| {
                let amb = r.random_range(2..=5);
                let k = r.random_range(1..=amb);
                let k2 = r.random_range(1..=k);
                let raw = uniform_vec(r, 2 * amb * amb, -1.0, 1.0);
                let h_par = r.random_range(0.01..1.0);
                let thin = r.random_range(0.01..1.0);
                section_volume_below_bound(&raw, amb, k, k2, h_par, h_par * thin, r.random())
            }),
        ),
    ];
    let total = checks.len();
    let mut skipped = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let (_, s) = seeded_cases(name, PROPERTY_CASES, 9000 + i as u64, check)?;
        skipped += s;
    }
    Ok(format!("{total} properties x {PROPERTY_CASES} cases ({skipped} degenerate draws skipped)"))
}

// ---------------------------------------------------------------- main

fn report(failed: &mut usize, id: usize, title: &str, v: Verdict) {
    let (tag, msg) = match v {
        Ok(m) => ("PASS", m),
        Err(m) => {
            *failed += 1;
            ("FAIL", m)
        }
    };
    println!("[{tag}] {id}. {title}: {msg}");
    let _ = std::io::stdout().flush();
}

fn main() -> ExitCode {
    // Under `cargo test` the harness passes filter arguments; honor a
    // plain `--list` so tooling does not run the whole suite.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    report(&mut failed, 1, "oracle equivalence", oracle_equivalence());

    let structure = structure_runs();
    report(&mut failed, 2, "structure identification", structure_verdict(&structure));

    let rates = rate_sweep();
    report(&mut failed, 3, "Hausdorff rate", hausdorff_verdict(&rates));
    report(&mut failed, 4, "tangent rate", tangent_verdict(&rates));
    drop(rates);

    let cluster = cluster_sweep();
    report(&mut failed, 5, "clustering error", cluster_verdict(&cluster));
    report(&mut failed, 6, "dimension labels", label_verdict(&structure));
    report(&mut failed, 7, "section volume bound", volume_bound());
    report(&mut failed, 8, "invariant suite", invariant_suite());
    report(&mut failed, 9, "determinism and speed", determinism(&cluster));

    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
