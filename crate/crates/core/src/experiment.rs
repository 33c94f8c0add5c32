//! Sweeps over `(n, seed)` and empirical rate fits.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::EvalRow;
use crate::metrics::{evaluate, EvalConfig, EvaluationReport};
use crate::params::{practical_schedule, ScheduleOverrides};
use crate::samplers::{preset, sample_mixture, ManifoldSpec, PointCloud, Scene};
use crate::stratify::{run_with_options, RunOptions, StratificationResult, DEFAULT_MAX_TUPLES_PER_ANCHOR};

/// Either a preset name or an inline mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneConfig {
    Preset(String),
    Inline {
        specs: Vec<ManifoldSpec>,
        weights: Vec<f64>,
    },
}

impl SceneConfig {
    pub fn resolve(&self) -> Result<Scene> {
        match self {
            SceneConfig::Preset(name) => preset(name),
            SceneConfig::Inline { specs, weights } => {
                if specs.is_empty() {
                    return Err(Error::MissingSpecs);
                }
                for s in specs {
                    s.validate()?;
                }
                Ok(Scene {
                    specs: specs.clone(),
                    weights: weights.clone(),
                })
            }
        }
    }
}

fn default_cap() -> Option<usize> {
    Some(DEFAULT_MAX_TUPLES_PER_ANCHOR)
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scene: SceneConfig,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    /// `null` runs uncapped.
    #[serde(default = "default_cap")]
    pub max_tuples_per_anchor: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(scene: SceneConfig, n_grid: Vec<usize>, seeds: Vec<u64>) -> Self {
        Self {
            scene,
            n_grid,
            seeds,
            schedule: ScheduleOverrides::default(),
            eval: EvalConfig::default(),
            output_dir: default_output(),
            threads: None,
            max_tuples_per_anchor: default_cap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("n_grid must be nonempty and strictly ascending".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("seeds must be nonempty".into()));
        }
        self.scene.resolve().map(|_| ())
    }

    pub fn run_options(&self, seed: u64) -> RunOptions {
        RunOptions {
            threads: self.threads,
            max_tuples_per_anchor: self.max_tuples_per_anchor,
            seed: Some(seed),
        }
    }
}

/// Everything produced for one `(n, seed)`.
#[derive(Clone, Debug)]
pub struct Trial {
    pub cloud: PointCloud,
    pub result: StratificationResult,
    pub report: EvaluationReport,
    pub rows: Vec<EvalRow>,
}

/// Sample, run under the practical schedule, evaluate.
pub fn run_trial(cfg: &ExperimentConfig, scene: &Scene, n: usize, seed: u64) -> Result<Trial> {
    let cloud = sample_mixture(&scene.specs, &scene.weights, n, seed)?;
    let sched = practical_schedule(n, scene.ambient(), &cfg.schedule)?;
    let result = run_with_options(&cloud.points, &sched, &cfg.run_options(seed))?;
    let report = evaluate(&result, &cloud, &cfg.eval)?;
    let rows = eval_rows(&report, result.run_info.wall_ms);
    Ok(Trial {
        cloud,
        result,
        report,
        rows,
    })
}

/// One CSV row per true layer.
pub fn eval_rows(report: &EvaluationReport, wall_ms: f64) -> Vec<EvalRow> {
    report
        .layers
        .iter()
        .map(|l| EvalRow {
            n: report.n,
            seed: report.seed,
            layer: l.k,
            dim: l.dim,
            hausdorff: l.hausdorff_error,
            clustering: l.clustering_error,
            tangent: l.tangent_error,
            delta: l.delta_used,
            resolution: l.resolution,
            wall_ms,
        })
        .collect()
}

/// All trials of the grid, rows in `(n, seed, layer)` order. `progress` is
/// called after each trial.
pub fn sweep(cfg: &ExperimentConfig, mut progress: impl FnMut(&Trial, usize, u64)) -> Result<Vec<EvalRow>> {
    cfg.validate()?;
    let scene = cfg.scene.resolve()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        for &seed in &cfg.seeds {
            let trial = run_trial(cfg, &scene, n, seed)?;
            progress(&trial, n, seed);
            rows.extend(trial.rows);
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Hausdorff,
    Clustering,
    Tangent,
}

impl Loss {
    pub const ALL: [Loss; 3] = [Loss::Hausdorff, Loss::Clustering, Loss::Tangent];

    pub fn name(self) -> &'static str {
        match self {
            Loss::Hausdorff => "hausdorff",
            Loss::Clustering => "clustering",
            Loss::Tangent => "tangent",
        }
    }

    fn of(self, row: &EvalRow) -> Option<f64> {
        match self {
            Loss::Hausdorff => row.hausdorff,
            Loss::Clustering => Some(row.clustering),
            Loss::Tangent => row.tangent,
        }
        .filter(|v| v.is_finite())
    }
}

/// Least-squares fit of `log(median loss)` against `log(n / log n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub layer: usize,
    pub dim: usize,
    pub loss: Loss,
    /// `None` when fewer than two usable points remain or a median is zero.
    pub slope: Option<f64>,
    pub std_error: Option<f64>,
    pub intercept: Option<f64>,
    /// `(n, median, seeds)` per grid value.
    pub medians: Vec<(usize, f64, usize)>,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Slope, its standard error and the intercept of ordinary least squares.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let m = x.len();
    if m < 2 || m != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / m as f64;
    let my = y.iter().sum::<f64>() / m as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if m > 2 {
        let ssr: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (ssr / (m - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some((slope, se, intercept))
}

/// Fewest grid values and seeds per value a fit needs.
pub const MIN_GRID: usize = 4;
pub const MIN_SEEDS: usize = 3;

/// Rate fits per `(layer, dim, loss)`.
///
/// A layer qualifies when at least [`MIN_GRID`] distinct `n` carry
/// [`MIN_SEEDS`] rows each; grid values with fewer seeds are dropped.
pub fn fit_rates(rows: &[EvalRow]) -> Result<Vec<RateFit>> {
    let mut keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.layer, r.dim)).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut out = Vec::new();
    for (layer, dim) in keys {
        let mine: Vec<&EvalRow> = rows.iter().filter(|r| r.layer == layer && r.dim == dim).collect();
        let mut ns: Vec<usize> = mine.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let seeds_at = |n: usize| {
            let mut s: Vec<Option<u64>> = mine.iter().filter(|r| r.n == n).map(|r| r.seed).collect();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        ns.retain(|&n| seeds_at(n) >= MIN_SEEDS && n >= 3);
        if ns.len() < MIN_GRID {
            continue;
        }
        for loss in Loss::ALL {
            let mut medians = Vec::new();
            for &n in &ns {
                let mut v: Vec<f64> = mine.iter().filter(|r| r.n == n).filter_map(|r| loss.of(r)).collect();
                if v.len() >= MIN_SEEDS {
                    let k = v.len();
                    medians.push((n, median(&mut v), k));
                }
            }
            if medians.is_empty() {
                continue;
            }
            let usable = medians.len() >= MIN_GRID && medians.iter().all(|m| m.1 > 0.0);
            let fit = usable
                .then(|| {
                    let x: Vec<f64> = medians.iter().map(|m| (m.0 as f64 / (m.0 as f64).ln()).ln()).collect();
                    let y: Vec<f64> = medians.iter().map(|m| m.1.ln()).collect();
                    least_squares(&x, &y)
                })
                .flatten();
            out.push(RateFit {
                layer,
                dim,
                loss,
                slope: fit.map(|f| f.0),
                std_error: fit.map(|f| f.1),
                intercept: fit.map(|f| f.2),
                medians,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_GRID} distinct n with {MIN_SEEDS} seeds each for some layer"
        )));
    }
    Ok(out)
}

/// Fit for one layer and loss, if present.
pub fn find_fit(fits: &[RateFit], layer: usize, loss: Loss) -> Option<&RateFit> {
    fits.iter().find(|f| f.layer == layer && f.loss == loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, seed: u64, h: f64, c: f64) -> EvalRow {
        EvalRow {
            n,
            seed: Some(seed),
            layer: 1,
            dim: 1,
            hausdorff: Some(h),
            clustering: c,
            tangent: None,
            delta: 0.0,
            resolution: 0.0,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn exact_power_law() {
        let mut rows = vec![];
        for n in [1000, 2000, 4000, 8000, 16000] {
            let l = (n as f64).ln() / n as f64;
            for s in 0..3 {
                rows.push(row(n, s, 0.7 * l * l, 0.25));
            }
        }
        let fits = fit_rates(&rows).unwrap();
        let h = find_fit(&fits, 1, Loss::Hausdorff).unwrap();
        assert!((h.slope.unwrap() + 2.0).abs() < 1e-6);
        assert!(h.std_error.unwrap() < 1e-6);
        let c = find_fit(&fits, 1, Loss::Clustering).unwrap();
        assert!(c.slope.unwrap().abs() < 1e-12);
        assert!(find_fit(&fits, 1, Loss::Tangent).is_none());
    }

    #[test]
    fn too_few_seeds_or_values() {
        let rows: Vec<EvalRow> = [1000, 2000, 4000, 8000]
            .iter()
            .flat_map(|&n| (0..2).map(move |s| row(n, s, 0.1, 0.0)))
            .collect();
        assert!(matches!(fit_rates(&rows), Err(Error::InsufficientData(_))));
        let rows: Vec<EvalRow> = [1000, 2000, 4000]
            .iter()
            .flat_map(|&n| (0..5).map(move |s| row(n, s, 0.1, 0.0)))
            .collect();
        assert!(matches!(fit_rates(&rows), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_median_gives_no_slope() {
        let rows: Vec<EvalRow> = [1000, 2000, 4000, 8000]
            .iter()
            .flat_map(|&n| (0..3).map(move |s| row(n, s, 0.1, 0.0)))
            .collect();
        let fits = fit_rates(&rows).unwrap();
        assert_eq!(find_fit(&fits, 1, Loss::Clustering).unwrap().slope, None);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn config_checks() {
        let mut c = ExperimentConfig::new(SceneConfig::Preset("circle".into()), vec![100, 200], vec![1]);
        c.validate().unwrap();
        c.n_grid = vec![200, 100];
        assert!(c.validate().is_err());
        c.n_grid = vec![100];
        c.seeds.clear();
        assert!(c.validate().is_err());
        let json = r#"{"scene":"circle_sphere","n_grid":[1000],"seeds":[1,2]}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.max_tuples_per_anchor, Some(DEFAULT_MAX_TUPLES_PER_ANCHOR));
        assert_eq!(c.scene, SceneConfig::Preset("circle_sphere".into()));
    }
}
