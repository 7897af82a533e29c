//! Sampling `u(t, θ(t))` along speed profiles and deciding whether it grows
//! or dies out, next to the analytic thresholds that predict the answer.
//!
//! Every evaluation is radial: `θ(t)` is used as the radius `‖x‖`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fourier1d::log_solution;
use crate::kernels::{classical_kernel, FracParams, KernelValue};
use crate::specfun::{gamma_alpha, m_alpha, LogValue};
use crate::subordination::{subordinate, subordinate_envelope, QuadratureSpec};

pub const DEFAULT_T_START: f64 = 5.0;
pub const DEFAULT_T_END: f64 = 60.0;
pub const DEFAULT_SAMPLES: usize = 24;
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
pub const DEFAULT_SLOPE_TOL: f64 = 0.02;
const MIN_WINDOW_SAMPLES: usize = 4;
const FOURIER_TOL: f64 = 1e-8;
/// Relative error above which a Fourier sample is flagged rather than used.
const FOURIER_MAX_REL_ERR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Power,
    Exponential,
}

/// `θ(t) = m t^β` (power) or `θ(t) = e^{m t^β} − 1` (exponential).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedProfile {
    pub kind: ProfileKind,
    pub m: f64,
    pub beta: f64,
}

impl SpeedProfile {
    pub fn power(m: f64, beta: f64) -> Self {
        SpeedProfile { kind: ProfileKind::Power, m, beta }
    }

    pub fn exponential(m: f64, beta: f64) -> Self {
        SpeedProfile { kind: ProfileKind::Exponential, m, beta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) || !(self.beta > 0.0 && self.beta.is_finite()) {
            return domain(format!("speed profile needs m > 0 and beta > 0 (m = {}, beta = {})", self.m, self.beta));
        }
        Ok(())
    }
}

/// Radius of the profile at time `t ≥ 0`.
pub fn theta(profile: &SpeedProfile, t: f64) -> f64 {
    let p = profile.m * t.powf(profile.beta);
    match profile.kind {
        ProfileKind::Power => p,
        ProfileKind::Exponential => p.exp_m1(),
    }
}

/// How `u` is evaluated along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Subordination,
    #[serde(rename = "fourier1d")]
    Fourier1D,
    EnvelopeLower,
    EnvelopeUpper,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Subordination => "subordination",
            Method::Fourier1D => "fourier1d",
            Method::EnvelopeLower => "envelope_lower",
            Method::EnvelopeUpper => "envelope_upper",
        }
    }

    /// Fails with `Unsupported` when the route cannot evaluate `params`.
    pub fn check(self, params: &FracParams) -> Result<()> {
        params.validate()?;
        match self {
            Method::Fourier1D if params.dim != 1 || params.rho < 1.0 => Err(Error::Unsupported(format!(
                "fourier1d needs d = 1 and rho >= 1 (d = {}, rho = {})",
                params.dim, params.rho
            ))),
            Method::EnvelopeLower | Method::EnvelopeUpper if !(params.rho < 1.0) => {
                Err(Error::Unsupported(format!("envelope route needs 0 < rho < 1, got {}", params.rho)))
            }
            Method::Subordination => match classical_kernel(params.rho, params.dim, 1.0, 1.0)? {
                KernelValue::Exact(_) => Ok(()),
                KernelValue::Envelope(_) => Err(Error::Unsupported(format!(
                    "no exact kernel for rho = {} in d = {}; use the envelope route",
                    params.rho, params.dim
                ))),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub theta: f64,
    /// `NaN` in log form when the point failed; see `error`.
    pub log_u: LogValue,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrajectorySample {
    /// Usable for classification: evaluated, finite and positive.
    pub fn is_usable(&self) -> bool {
        self.error.is_none() && self.log_u.is_finite() && self.log_u.signum() > 0.0
    }
}

/// `n ≥ 2` geometrically spaced points from `t_start` to `t_end`.
pub fn geometric_grid(t_start: f64, t_end: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_start > 0.0 && t_end > t_start && t_end.is_finite()) || n < 2 {
        return domain(format!("grid needs 0 < t_start < t_end and n >= 2 (got {t_start}, {t_end}, {n})"));
    }
    let ratio = (t_end / t_start).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| t_start * (ratio * i as f64).exp()).collect();
    g[n - 1] = t_end;
    Ok(g)
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return domain("time grid must be positive and finite");
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("time grid must be strictly increasing");
    }
    Ok(())
}

fn fourier_point(params: &FracParams, t: f64, r: f64) -> Result<LogValue> {
    let (mut v, mut e, _, _) = log_solution(params.alpha, params.rho, t, r, FOURIER_TOL)?;
    if e.log_abs() - v.log_abs() > FOURIER_MAX_REL_ERR.ln() && v.is_finite() {
        // the stopping rule is absolute in u; tighten it to the value found
        let tol = FOURIER_TOL * (v.log_abs().exp()).max(f64::MIN_POSITIVE);
        (v, e, _, _) = log_solution(params.alpha, params.rho, t, r, tol)?;
    }
    if v.is_zero() || e.log_abs() - v.log_abs() > FOURIER_MAX_REL_ERR.ln() {
        return Err(Error::NonConvergence { what: "Fourier sample (value below its error bound)", terms: 0 });
    }
    Ok(v)
}

fn evaluate(params: &FracParams, method: Method, t: f64, r: f64, spec: &QuadratureSpec) -> Result<LogValue> {
    match method {
        Method::Subordination => subordinate(params, t, r, spec),
        Method::Fourier1D => fourier_point(params, t, r),
        Method::EnvelopeLower => Ok(subordinate_envelope(params.alpha, params.rho, params.dim, t, r, spec)?.lower),
        Method::EnvelopeUpper => Ok(subordinate_envelope(params.alpha, params.rho, params.dim, t, r, spec)?.upper),
    }
}

/// One sample of `u(t, θ(t))` per grid point. Method and parameter
/// mismatches fail up front; failures at individual points are recorded in
/// the sample.
pub fn trajectory(
    params: &FracParams,
    profile: &SpeedProfile,
    t_grid: &[f64],
    method: Method,
    spec: &QuadratureSpec,
) -> Result<Vec<TrajectorySample>> {
    method.check(params)?;
    profile.validate()?;
    spec.validate()?;
    check_grid(t_grid)?;
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let th = theta(profile, t);
            let (log_u, error) = if th.is_finite() {
                match evaluate(params, method, t, th, spec) {
                    Ok(v) => (v, None),
                    Err(e) => (LogValue::from_log(f64::NAN), Some(e.to_string())),
                }
            } else {
                (LogValue::from_log(f64::NAN), Some(format!("radius overflows at t = {t}")))
            };
            TrajectorySample { t, theta: th, log_u, method, error }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Diverging,
    Vanishing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Least-squares slope of `ln u` against `t`.
    pub slope: f64,
    pub window: (f64, f64),
}

/// Fits `ln u ≈ a + slope·t` over the trailing `window_fraction` of the
/// samples and reads the verdict off the sign of the slope.
pub fn classify(samples: &[TrajectorySample], window_fraction: f64, slope_tol: f64) -> Result<Classification> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) || !(slope_tol > 0.0) {
        return domain(format!(
            "classify needs window_fraction in (0, 1] and slope_tol > 0 (got {window_fraction}, {slope_tol})"
        ));
    }
    let take = ((samples.len() as f64 * window_fraction).ceil() as usize).min(samples.len());
    let pts: Vec<(f64, f64)> = samples[samples.len() - take..]
        .iter()
        .filter(|s| s.is_usable())
        .map(|s| (s.t, s.log_u.log_abs()))
        .collect();
    if pts.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_WINDOW_SAMPLES, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let slope = sxy / sxx;
    let verdict = if slope > slope_tol {
        Verdict::Diverging
    } else if slope < -slope_tol {
        Verdict::Vanishing
    } else {
        Verdict::Inconclusive
    };
    Ok(Classification { verdict, slope, window: (pts[0].0, pts[pts.len() - 1].0) })
}

/// The four threshold constants for `β = 1` speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub gamma_alpha: f64,
    pub m_alpha: u64,
    /// Power speeds `m t` with `m` below this diverge (`ϱ = 1`).
    pub power_lower: f64,
    /// Power speeds `m t` with `m` above this vanish (`ϱ = 1`).
    pub power_upper: f64,
    /// Exponential speeds `e^{mt} − 1` with `m` up to this diverge (`ϱ < 1`).
    pub exp_lower: f64,
    /// Exponential speeds `e^{mt} − 1` with `m` above this vanish (`ϱ < 1`).
    pub exp_upper: f64,
}

pub fn thresholds(alpha: f64, rho: f64, d: u32) -> Result<ThresholdReport> {
    if !(rho > 0.0 && rho.is_finite()) || d == 0 {
        return domain(format!("thresholds need rho > 0 and d >= 1 (rho = {rho}, d = {d})"));
    }
    let m = m_alpha(alpha)?;
    let g = gamma_alpha(alpha);
    let mf = m as f64;
    let width = d as f64 + 2.0 * rho;
    Ok(ThresholdReport {
        gamma_alpha: g,
        m_alpha: m,
        power_lower: 2.0 * (1.0 - g).sqrt(),
        power_upper: 2.0 * mf * (1.0 - g / mf).sqrt(),
        exp_lower: (1.0 - g) / width,
        exp_upper: 1.0 / width,
    })
}

/// Where a cell sits relative to the analytic thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSide {
    /// Growth is predicted.
    BelowLower,
    /// No prediction: between the thresholds, on a boundary, or outside the
    /// cases the theory covers.
    Gap,
    /// Decay is predicted.
    AboveUpper,
}

impl ThresholdSide {
    pub fn predicted(self) -> Option<Verdict> {
        match self {
            ThresholdSide::BelowLower => Some(Verdict::Diverging),
            ThresholdSide::AboveUpper => Some(Verdict::Vanishing),
            ThresholdSide::Gap => None,
        }
    }
}

fn beta_side(beta: f64, at_one: impl FnOnce() -> ThresholdSide) -> ThresholdSide {
    match beta.partial_cmp(&1.0) {
        Some(Ordering::Less) => ThresholdSide::BelowLower,
        Some(Ordering::Greater) => ThresholdSide::AboveUpper,
        _ => at_one(),
    }
}

fn m_side(m: f64, lower: f64, upper: f64) -> ThresholdSide {
    if m < lower {
        ThresholdSide::BelowLower
    } else if m > upper {
        ThresholdSide::AboveUpper
    } else {
        ThresholdSide::Gap
    }
}

/// The predicted side for a cell; boundary values of `m` count as gap.
/// Only `0 < α < 1` is covered.
pub fn threshold_side(params: &FracParams, profile: &SpeedProfile) -> Result<(Option<ThresholdReport>, ThresholdSide)> {
    params.validate()?;
    profile.validate()?;
    if params.alpha >= 1.0 {
        return Ok((None, ThresholdSide::Gap));
    }
    let th = thresholds(params.alpha, params.rho, params.dim)?;
    let (rho, beta, m) = (params.rho, profile.beta, profile.m);
    let side = match profile.kind {
        ProfileKind::Power if rho == 1.0 => beta_side(beta, || m_side(m, th.power_lower, th.power_upper)),
        ProfileKind::Power if rho < 1.0 => ThresholdSide::BelowLower,
        ProfileKind::Power => {
            if beta > 1.0 {
                ThresholdSide::AboveUpper
            } else if params.dim == 1 && beta < 0.5 / rho {
                ThresholdSide::BelowLower
            } else {
                ThresholdSide::Gap
            }
        }
        ProfileKind::Exponential if rho < 1.0 => beta_side(beta, || m_side(m, th.exp_lower, th.exp_upper)),
        ProfileKind::Exponential => ThresholdSide::Gap,
    };
    Ok((Some(th), side))
}

/// Evaluation route requested for an experiment. `Envelope` samples both
/// sides of the stable bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Subordination,
    Fourier1d,
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[serde(alias = "CSV")]
    Csv,
    #[serde(alias = "JSON")]
    Json,
}

/// One experiment cell. The time grid is geometric on `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: FracParams,
    pub profile: SpeedProfile,
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
    pub method: Route,
    pub output_path: String,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.profile.validate()?;
        if !(self.t_start > 0.0 && self.t_end > self.t_start && self.t_end.is_finite()) {
            return domain(format!("need 0 < t_start < t_end (got {}, {})", self.t_start, self.t_end));
        }
        if self.n_samples < MIN_WINDOW_SAMPLES {
            return domain(format!("need n_samples >= {MIN_WINDOW_SAMPLES}, got {}", self.n_samples));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub params: FracParams,
    pub profile: SpeedProfile,
    pub method: Route,
    pub thresholds: Option<ThresholdReport>,
    pub side: ThresholdSide,
    pub predicted: Option<Verdict>,
    pub classification: Option<Classification>,
    /// `Some(agree)` when a prediction exists and a verdict was measured.
    pub agreement: Option<bool>,
    /// False only when a prediction exists and the measurement contradicts
    /// it or could not be made.
    pub passed: bool,
    pub error: Option<String>,
    /// The trajectory the verdict was read from.
    pub samples: Vec<TrajectorySample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub window_fraction: f64,
    pub slope_tol: f64,
    pub cells: Vec<CellReport>,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }
}

/// Runs one cell; errors end up in the report.
pub fn run_cell(config: &ExperimentConfig, window_fraction: f64, slope_tol: f64, spec: &QuadratureSpec) -> CellReport {
    let mut report = CellReport {
        params: config.params,
        profile: config.profile,
        method: config.method,
        thresholds: None,
        side: ThresholdSide::Gap,
        predicted: None,
        classification: None,
        agreement: None,
        passed: true,
        error: None,
        samples: Vec::new(),
    };
    match threshold_side(&config.params, &config.profile) {
        Ok((th, side)) => {
            report.thresholds = th;
            report.side = side;
            report.predicted = side.predicted();
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    if report.error.is_none() {
        if let Err(e) = measure(config, window_fraction, slope_tol, spec, &mut report) {
            report.error = Some(e.to_string());
        }
    }
    report.agreement = match (report.predicted, report.classification) {
        (Some(p), Some(c)) => Some(p == c.verdict),
        _ => None,
    };
    report.passed = report.predicted.is_none() || report.agreement == Some(true);
    report
}

fn measure(
    config: &ExperimentConfig,
    window_fraction: f64,
    slope_tol: f64,
    spec: &QuadratureSpec,
    report: &mut CellReport,
) -> Result<()> {
    config.validate()?;
    let grid = geometric_grid(config.t_start, config.t_end, config.n_samples)?;
    let run = |m| trajectory(&config.params, &config.profile, &grid, m, spec);
    match config.method {
        Route::Subordination | Route::Fourier1d => {
            let m = if config.method == Route::Subordination { Method::Subordination } else { Method::Fourier1D };
            report.samples = run(m)?;
            report.classification = Some(classify(&report.samples, window_fraction, slope_tol)?);
        }
        Route::Envelope => {
            // growth is read from the lower bound, decay from the upper one
            let lower = run(Method::EnvelopeLower)?;
            let lo = classify(&lower, window_fraction, slope_tol)?;
            if lo.verdict == Verdict::Diverging {
                report.samples = lower;
                report.classification = Some(lo);
                return Ok(());
            }
            let upper = run(Method::EnvelopeUpper)?;
            let up = classify(&upper, window_fraction, slope_tol)?;
            report.samples = upper;
            report.classification = Some(if up.verdict == Verdict::Vanishing {
                up
            } else {
                Classification { verdict: Verdict::Inconclusive, ..up }
            });
        }
    }
    Ok(())
}

fn cell_key(c: &ExperimentConfig) -> (u32, f64, f64, u8, f64, f64, u8) {
    let kind = match c.profile.kind {
        ProfileKind::Power => 0,
        ProfileKind::Exponential => 1,
    };
    let route = match c.method {
        Route::Subordination => 0,
        Route::Fourier1d => 1,
        Route::Envelope => 2,
    };
    (c.params.dim, c.params.alpha, c.params.rho, kind, c.profile.beta, c.profile.m, route)
}

/// Runs a batch of cells concurrently; the report is sorted by
/// `(d, α, ϱ, profile kind, β, m, route)`.
pub fn run_cells(configs: &[ExperimentConfig], window_fraction: f64, slope_tol: f64, spec: &QuadratureSpec) -> ExperimentReport {
    let mut order: Vec<&ExperimentConfig> = configs.iter().collect();
    order.sort_by(|a, b| {
        let (ka, kb) = (cell_key(a), cell_key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.cmp(&kb.3))
            .then(ka.4.total_cmp(&kb.4))
            .then(ka.5.total_cmp(&kb.5))
            .then(ka.6.cmp(&kb.6))
    });
    let cells = order.par_iter().map(|c| run_cell(c, window_fraction, slope_tol, spec)).collect();
    ExperimentReport { window_fraction, slope_tol, cells }
}

/// A single configured experiment with the default window and slope
/// tolerance.
pub fn run_experiment(config: &ExperimentConfig) -> ExperimentReport {
    run_cells(std::slice::from_ref(config), DEFAULT_WINDOW_FRACTION, DEFAULT_SLOPE_TOL, &QuadratureSpec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<TrajectorySample> {
        (0..20)
            .map(|i| {
                let t = 5.0 + 3.0 * i as f64;
                TrajectorySample { t, theta: t, log_u: LogValue::from_log(f(t)), method: Method::Subordination, error: None }
            })
            .collect()
    }

    #[test]
    fn theta_profiles() {
        assert_eq!(theta(&SpeedProfile::power(2.0, 0.5), 4.0), 4.0);
        assert_eq!(theta(&SpeedProfile::exponential(1.0, 1.0), 0.0), 0.0);
        assert!((theta(&SpeedProfile::exponential(0.5, 1.0), 2.0) - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn classify_linear_data() {
        let c = classify(&synthetic(|t| 0.5 * t), 0.5, 0.02).unwrap();
        assert_eq!(c.verdict, Verdict::Diverging);
        assert!((c.slope - 0.5).abs() < 1e-12);
        assert_eq!(classify(&synthetic(|t| -0.2 * t), 0.5, 0.02).unwrap().verdict, Verdict::Vanishing);
        assert_eq!(classify(&synthetic(|_| 3.0), 0.5, 0.01).unwrap().verdict, Verdict::Inconclusive);
        let c = classify(&synthetic(|t| t), 0.25, 0.02).unwrap();
        assert_eq!(c.window, (50.0, 62.0));
    }

    #[test]
    fn classify_needs_four_points() {
        let mut s = synthetic(|t| t);
        for x in s.iter_mut().skip(12) {
            x.error = Some("quadrature failure".into());
        }
        assert!(matches!(classify(&s, 0.5, 0.02), Err(Error::InsufficientData { needed: 4, got: 2 })));
    }

    proptest! {
        #[test]
        fn verdict_ignores_constant_factors(a in -0.3f64..0.3, shift in -500.0f64..500.0) {
            let base = classify(&synthetic(|t| a * t), 0.5, 0.02).unwrap();
            let moved = classify(&synthetic(|t| a * t + shift), 0.5, 0.02).unwrap();
            prop_assert_eq!(base.verdict, moved.verdict);
            prop_assert!((base.slope - moved.slope).abs() < 1e-9);
        }
    }

    #[test]
    fn threshold_values() {
        let th = thresholds(0.5, 1.0, 1).unwrap();
        assert_eq!(th.m_alpha, 9);
        assert!((th.power_lower - 0.75f64.sqrt() * 2.0).abs() < 1e-14);
        assert!((th.power_upper - 18.0 * (1.0 - 0.25f64 / 9.0).sqrt()).abs() < 1e-12);
        assert!((th.power_upper - 17.749).abs() < 1e-3);
        let th = thresholds(0.5, 0.5, 1).unwrap();
        assert!((th.exp_lower - 0.375).abs() < 1e-15 && (th.exp_upper - 0.5).abs() < 1e-15);
        let th = thresholds(0.75, 1.0, 1).unwrap();
        assert_eq!(th.m_alpha, 3);
        assert!((th.power_upper - 6.0 * (1.0 - 0.105_468_75f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(thresholds(1.0, 1.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn thresholds_ordered(alpha in 0.05f64..0.95, rho in 0.1f64..3.0, d in 1u32..5) {
            let th = thresholds(alpha, rho, d).unwrap();
            prop_assert!(th.power_lower > 0.0 && th.power_lower <= th.power_upper);
            prop_assert!(th.exp_lower > 0.0 && th.exp_lower < th.exp_upper);
        }
    }

    #[test]
    fn sides() {
        let p = FracParams::new(0.5, 1.0, 1).unwrap();
        let side = |pr| threshold_side(&p, &pr).unwrap().1;
        assert_eq!(side(SpeedProfile::power(1.0, 1.0)), ThresholdSide::BelowLower);
        assert_eq!(side(SpeedProfile::power(20.0, 1.0)), ThresholdSide::AboveUpper);
        assert_eq!(side(SpeedProfile::power(5.0, 1.0)), ThresholdSide::Gap);
        assert_eq!(side(SpeedProfile::power(5.0, 0.5)), ThresholdSide::BelowLower);
        let q = FracParams::new(0.5, 0.5, 1).unwrap();
        let at_edge = SpeedProfile::exponential(0.375, 1.0);
        assert_eq!(threshold_side(&q, &at_edge).unwrap().1, ThresholdSide::Gap);
        assert_eq!(threshold_side(&q, &SpeedProfile::exponential(0.6, 1.0)).unwrap().1, ThresholdSide::AboveUpper);
    }

    #[test]
    fn gaussian_trajectory_slope() {
        // α = 1: ln u = t − m²t/4 − ½ ln(4πt), slope → 1 − m²/4
        let p = FracParams::new(1.0, 1.0, 1).unwrap();
        let grid: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = trajectory(&p, &SpeedProfile::power(1.0, 1.0), &grid, Method::Subordination, &QuadratureSpec::default()).unwrap();
        for x in &s {
            let want = 0.75 * x.t - 0.5 * (4.0 * PI * x.t).ln();
            assert!((x.log_u.log_abs() - want).abs() < 1e-12);
        }
        for (m, v) in [(1.0, Verdict::Diverging), (3.0, Verdict::Vanishing)] {
            let s = trajectory(&p, &SpeedProfile::power(m, 1.0), &grid, Method::Subordination, &QuadratureSpec::default()).unwrap();
            assert_eq!(classify(&s, 0.5, 0.02).unwrap().verdict, v);
        }
    }

    #[test]
    fn subdiffusive_growth_along_sqrt() {
        let p = FracParams::new(0.5, 1.0, 1).unwrap();
        let grid = geometric_grid(5.0, 30.0, 8).unwrap();
        let s = trajectory(&p, &SpeedProfile::power(1.0, 0.5), &grid, Method::Subordination, &QuadratureSpec::default()).unwrap();
        assert!(s.windows(2).all(|w| w[1].log_u.log_abs() > w[0].log_u.log_abs()));
    }

    #[test]
    fn method_mismatch() {
        let p = FracParams::new(0.5, 1.0, 2).unwrap();
        let r = trajectory(&p, &SpeedProfile::power(1.0, 1.0), &[1.0, 2.0], Method::Fourier1D, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::Unsupported(_))));
        let q = FracParams::new(0.5, 0.7, 1).unwrap();
        assert!(matches!(Method::Subordination.check(&q), Err(Error::Unsupported(_))));
        assert!(matches!(Method::EnvelopeLower.check(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn experiment_cells() {
        let cfg = |m: f64| ExperimentConfig {
            params: FracParams::new(0.5, 1.0, 1).unwrap(),
            profile: SpeedProfile::power(m, 1.0),
            t_start: DEFAULT_T_START,
            t_end: DEFAULT_T_END,
            n_samples: DEFAULT_SAMPLES,
            method: Route::Subordination,
            output_path: String::new(),
            format: OutputFormat::Json,
        };
        let rep = run_cells(&[cfg(20.0), cfg(5.0), cfg(1.0)], DEFAULT_WINDOW_FRACTION, DEFAULT_SLOPE_TOL, &QuadratureSpec::default());
        let ms: Vec<f64> = rep.cells.iter().map(|c| c.profile.m).collect();
        assert_eq!(ms, vec![1.0, 5.0, 20.0]);
        assert_eq!(rep.cells[0].classification.unwrap().verdict, Verdict::Diverging);
        assert_eq!(rep.cells[2].classification.unwrap().verdict, Verdict::Vanishing);
        assert_eq!(rep.cells[1].side, ThresholdSide::Gap);
        assert!(rep.cells[1].passed && rep.cells[1].agreement.is_none());
        assert!(rep.all_passed());
        let text = serde_json::to_string(&rep).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let text = r#"{"params":{"alpha":0.5,"rho":1,"dim":1},"profile":{"kind":"Power","m":1,"beta":1},
            "t_start":5,"t_end":60,"n_samples":24,"method":"subordination","output_path":"x.csv","format":"csv","extra":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
        let ok = text.replace(r#","extra":1"#, "");
        let cfg: ExperimentConfig = serde_json::from_str(&ok).unwrap();
        assert_eq!(cfg.format, OutputFormat::Csv);
    }
}
