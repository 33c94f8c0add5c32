//! Per-dimension parameter schedules.
//!
//! Two rules produce the bandwidth `h_d`:
//!
//! - [`default_schedule`] evaluates the asymptotic formula
//!   `h_d = (48 d / kappa)(1 + 1/d)(Upsilon gamma ln n / (a_min n))^{1/d}`.
//!   Its constants are far too conservative to be usable on a few thousand
//!   points (`h_2` is about 12 at `n = 1000`), so it is kept for reference.
//! - [`practical_schedule`] uses a coverage rule calibrated so that a slab
//!   around a unit-scale `d`-manifold carrying a fraction `alpha_ref` of the
//!   sample expects `margin` times `n_d` points:
//!   `h_d = (margin sigma gamma |S^d| ln n / (alpha_ref omega_d n))^{1/d}`.
//!   It has the same `(ln n / n)^{1/d}` order as the asymptotic formula.
//!
//! In both, `r_d = h_d`, `h_perp = kappa h_d^2`, `delta_d = zeta_d kappa h_d^2`
//! and `n_d = max(2, ceil(sigma gamma ln n))`; logarithms are natural.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Desk-scale model constants used by the practical rule.
pub const DESK_SIGMA_GAMMA: f64 = 3.0;
/// Safety factor of the coverage rule.
pub const COVERAGE_MARGIN: f64 = 2.0;
/// Smallest mixture weight the coverage rule is calibrated for.
pub const COVERAGE_ALPHA: f64 = 0.5;

/// Relative tolerance of the `h_perp = kappa h_par^2` invariant.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Constants of the statistical model and of the asymptotic schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub kappa_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub nu_max: f64,
    pub alpha_min: f64,
    pub gamma: f64,
    pub upsilon: f64,
    pub sigma: f64,
    /// `zeta_d` for `d = 1, 2, ...`; the last entry is reused beyond the end.
    pub zeta: Vec<f64>,
    pub q: f64,
}

impl ModelConstants {
    /// Unit curvature, unit density, `Upsilon gamma / a_min = 1`,
    /// `sigma gamma = 3`, `zeta_d = 1`.
    pub fn desk() -> Self {
        Self {
            kappa_max: 1.0,
            a_min: 1.0,
            a_max: 1.0,
            nu_max: 16.0 * PI.powi(3) / 15.0,
            alpha_min: COVERAGE_ALPHA,
            gamma: 1.0,
            upsilon: 1.0,
            sigma: DESK_SIGMA_GAMMA,
            zeta: vec![1.0],
            q: 1.0,
        }
    }

    /// Constants satisfying the sufficient conditions of the consistency
    /// analysis, for documentation: `gamma = max(600 D^2 ln D, 56 q / 3) /
    /// alpha_min`, `sigma = 4 D`, `zeta_d = 1 / (256 d^2 (1 + 1/(8d))^2)`,
    /// `Upsilon = nu_max` (the unknown universal factor set to one).
    pub fn theory(ambient: usize, alpha_min: f64, q: f64) -> Self {
        let big_d = ambient as f64;
        let gamma = (600.0 * big_d * big_d * big_d.ln() / alpha_min).max(56.0 * q / (3.0 * alpha_min));
        let nu_max = 16.0 * PI.powi(3) / 15.0;
        let zeta = (1..ambient)
            .map(|d| {
                let d = d as f64;
                let f = 1.0 + 1.0 / (8.0 * d);
                1.0 / (256.0 * d * d * f * f)
            })
            .collect();
        Self {
            kappa_max: 1.0,
            a_min: 1.0,
            a_max: 1.0,
            nu_max,
            alpha_min,
            gamma,
            upsilon: nu_max,
            sigma: 4.0 * big_d,
            zeta,
            q,
        }
    }

    pub fn zeta_for(&self, d: usize) -> f64 {
        let i = d.saturating_sub(1).min(self.zeta.len().saturating_sub(1));
        self.zeta.get(i).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("kappa_max", self.kappa_max),
            ("a_min", self.a_min),
            ("a_max", self.a_max),
            ("nu_max", self.nu_max),
            ("alpha_min", self.alpha_min),
            ("gamma", self.gamma),
            ("upsilon", self.upsilon),
            ("sigma", self.sigma),
            ("q", self.q),
        ];
        for (name, v) in named {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.a_min > self.a_max {
            return Err(Error::InvalidParameter("a_min exceeds a_max".into()));
        }
        if self.alpha_min > 1.0 {
            return Err(Error::InvalidParameter("alpha_min exceeds 1".into()));
        }
        if self.zeta.is_empty() || self.zeta.iter().any(|z| !(*z > 0.0) || !z.is_finite()) {
            return Err(Error::InvalidParameter("zeta must be nonempty and positive".into()));
        }
        Ok(())
    }
}

impl Default for ModelConstants {
    fn default() -> Self {
        Self::desk()
    }
}

/// Parameters of one dimension step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimParams {
    pub d: usize,
    pub h_par: f64,
    pub h_perp: f64,
    pub r: f64,
    pub n_min: usize,
    pub delta: f64,
    pub kappa: f64,
}

/// Parameters for dimensions `1..=d_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSchedule {
    pub d_max: usize,
    pub dims: Vec<DimParams>,
}

impl ParamSchedule {
    /// Parameters of step `d` (1-based).
    pub fn get(&self, d: usize) -> &DimParams {
        &self.dims[d - 1]
    }

    /// Checks the schedule against an ambient dimension.
    pub fn validate(&self, ambient: usize) -> Result<()> {
        if self.d_max < 1 || self.d_max + 1 > ambient {
            return Err(Error::InvalidDims {
                d_max: self.d_max,
                ambient,
            });
        }
        if self.dims.len() != self.d_max {
            return Err(Error::InvalidParameter(format!(
                "schedule lists {} dimensions, d_max is {}",
                self.dims.len(),
                self.d_max
            )));
        }
        for (i, p) in self.dims.iter().enumerate() {
            let d = i + 1;
            if p.d != d {
                return Err(Error::InvalidParameter(format!(
                    "entry {i} has d = {}, expected {d}",
                    p.d
                )));
            }
            for (name, v) in [
                ("h_par", p.h_par),
                ("h_perp", p.h_perp),
                ("r", p.r),
                ("delta", p.delta),
                ("kappa", p.kappa),
            ] {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "{name} for d = {d} must be positive and finite, got {v}"
                    )));
                }
            }
            if p.n_min < 2 {
                return Err(Error::InvalidParameter(format!(
                    "n_min for d = {d} must be at least 2, got {}",
                    p.n_min
                )));
            }
            let expect = p.kappa * p.h_par * p.h_par;
            if (p.h_perp - expect).abs() > CONSISTENCY_TOL * expect {
                return Err(Error::InconsistentOverride {
                    d,
                    reason: format!("h_perp = {} but kappa * h_par^2 = {expect}", p.h_perp),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Bandwidth rule used by [`practical_schedule`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// Coverage-calibrated bandwidth (module docs).
    #[default]
    Coverage,
    /// The asymptotic formula with desk constants.
    Asymptotic,
}

/// Partial per-dimension overrides; `None` means "use the rule".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimOverride {
    pub d: usize,
    pub h_par: Option<f64>,
    pub h_perp: Option<f64>,
    pub kappa: Option<f64>,
    pub r: Option<f64>,
    pub n_min: Option<usize>,
    pub delta: Option<f64>,
}

/// User adjustments applied on top of a rule-generated schedule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleOverrides {
    pub d_max: Option<usize>,
    pub rule: BandwidthRule,
    /// Scalar multiplier on the rule's `h_d` (before per-dimension overrides).
    pub h_scale: Option<f64>,
    pub dims: Vec<DimOverride>,
}

fn check_common(n: usize, ambient: usize, d_max: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    if d_max < 1 || d_max + 1 > ambient {
        return Err(Error::InvalidDims { d_max, ambient });
    }
    Ok(())
}

/// Volume of the unit ball of `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// Area of the unit `d`-sphere in `R^{d+1}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    (d + 1) as f64 * unit_ball_volume(d + 1)
}

fn count_threshold(n: usize, sigma_gamma: f64) -> usize {
    ((sigma_gamma * (n as f64).ln()).ceil() as usize).max(2)
}

/// The asymptotic schedule evaluated with the given constants.
pub fn default_schedule(
    n: usize,
    ambient: usize,
    c: &ModelConstants,
    d_max: usize,
) -> Result<ParamSchedule> {
    check_common(n, ambient, d_max)?;
    c.validate()?;
    let log_ratio = c.upsilon * c.gamma * (n as f64).ln() / (c.a_min * n as f64);
    let n_min = count_threshold(n, c.sigma * c.gamma);
    let dims = (1..=d_max)
        .map(|d| {
            let df = d as f64;
            let h = 48.0 * df / c.kappa_max * (1.0 + 1.0 / df) * log_ratio.powf(1.0 / df);
            DimParams {
                d,
                h_par: h,
                h_perp: c.kappa_max * h * h,
                r: h,
                n_min,
                delta: c.zeta_for(d) * c.kappa_max * h * h,
                kappa: c.kappa_max,
            }
        })
        .collect();
    Ok(ParamSchedule { d_max, dims })
}

/// Coverage-rule bandwidth for dimension `d` (unit curvature).
pub fn coverage_bandwidth(n: usize, d: usize) -> f64 {
    let ln_ratio = (n as f64).ln() / n as f64;
    let c = COVERAGE_MARGIN * DESK_SIGMA_GAMMA * unit_sphere_area(d)
        / (COVERAGE_ALPHA * unit_ball_volume(d));
    (c * ln_ratio).powf(1.0 / d as f64)
}

/// Desk-scale schedule, then `overrides` applied verbatim.
///
/// Within one dimension: `h_perp` defaults to `kappa h_par^2`; if `h_perp` is
/// given without `kappa`, `kappa` is solved for; giving all three
/// inconsistently is an error. `r` and `delta` default from the final
/// `h_par` and `kappa`.
pub fn practical_schedule(
    n: usize,
    ambient: usize,
    overrides: &ScheduleOverrides,
) -> Result<ParamSchedule> {
    let d_max = overrides.d_max.unwrap_or(ambient.saturating_sub(1));
    check_common(n, ambient, d_max)?;
    let desk = ModelConstants::desk();
    let base = default_schedule(n, ambient, &desk, d_max)?;
    let scale = overrides.h_scale.unwrap_or(1.0);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("h_scale must be positive, got {scale}")));
    }

    for o in &overrides.dims {
        if o.d < 1 || o.d > d_max {
            return Err(Error::InvalidParameter(format!(
                "override for d = {} outside 1..={d_max}",
                o.d
            )));
        }
    }

    let mut dims = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let rule_h = match overrides.rule {
            BandwidthRule::Coverage => coverage_bandwidth(n, d),
            BandwidthRule::Asymptotic => base.get(d).h_par,
        } * scale;
        let none = DimOverride::default();
        let o = overrides.dims.iter().find(|o| o.d == d).unwrap_or(&none);

        let h = o.h_par.unwrap_or(rule_h);
        let (kappa, h_perp) = match (o.kappa, o.h_perp) {
            (Some(k), Some(hp)) => {
                let expect = k * h * h;
                if (hp - expect).abs() > CONSISTENCY_TOL * expect.abs().max(hp.abs()) {
                    return Err(Error::InconsistentOverride {
                        d,
                        reason: format!("h_perp = {hp} but kappa * h_par^2 = {expect}"),
                    });
                }
                (k, hp)
            }
            (Some(k), None) => (k, k * h * h),
            (None, Some(hp)) => (hp / (h * h), hp),
            (None, None) => (desk.kappa_max, desk.kappa_max * h * h),
        };
        let n_min = o.n_min.unwrap_or(base.get(d).n_min);
        if n_min < 2 {
            return Err(Error::InconsistentOverride {
                d,
                reason: format!("n_min = {n_min}, co-detection needs at least 2"),
            });
        }
        dims.push(DimParams {
            d,
            h_par: h,
            h_perp,
            r: o.r.unwrap_or(h),
            n_min,
            delta: o.delta.unwrap_or(desk.zeta_for(d) * kappa * h * h),
            kappa,
        });
    }
    let sched = ParamSchedule { d_max, dims };
    sched.validate(ambient)?;
    Ok(sched)
}
