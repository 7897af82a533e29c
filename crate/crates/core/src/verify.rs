//! Executable identity and inequality suites.
//!
//! Each suite runs a fixed grid of cases and reports how many passed and the
//! worst relative error seen. Failures are data: [`run_suite`] never errors.
//! Limit statements are checked as trends at two scales.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier1d::{a0_lower_bound, a1_upper_bound, a_coefficient, c0, c1, series_state, solution_series};
use crate::kernels::{gaussian_density, higher_order_kernel_1d, FracParams};
use crate::oracle::erfc;
use crate::quad::adaptive;
use crate::specfun::{
    dottie, estimate_compare, gamma, gamma_upper_incomplete, log_mittag_leffler, log_wright_neg, log_wright_tail,
    mittag_leffler, mittag_leffler_deriv, reciprocal_gamma, wright_neg, EstimateKind, EvalPolicy, LogValue, Verdict,
};
use crate::subordination::{subordinate, total_mass, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SuiteName {
    MLIdentities,
    WrightIdentities,
    EstimateLemmas,
    LeibnizProperties,
    Subordination,
    Representations,
    Asymptotics,
    All,
}

impl SuiteName {
    pub const INDIVIDUAL: [SuiteName; 7] = [
        SuiteName::MLIdentities,
        SuiteName::WrightIdentities,
        SuiteName::EstimateLemmas,
        SuiteName::LeibnizProperties,
        SuiteName::Subordination,
        SuiteName::Representations,
        SuiteName::Asymptotics,
    ];
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are ignored (`ml-identities`, `all`).
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_lowercase();
        SuiteName::INDIVIDUAL
            .iter()
            .chain(std::iter::once(&SuiteName::All))
            .find(|n| n.to_string().to_lowercase() == key)
            .copied()
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

/// Tolerance overrides keyed by check name; see [`default_tolerances`].
pub type TolOverrides = BTreeMap<String, f64>;

/// Default per-check tolerances (relative unless noted).
pub fn default_tolerances() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("ml_erfc", 1e-8),
        ("ml_exp", 1e-10),
        ("ml_origin", 1e-14),
        ("ml_derivative", 1e-6),
        ("wright_closed_form", 1e-10),
        ("laplace_wright", 1e-6),
        ("wright_moments", 1e-7),
        ("wright_derivative", 1e-6),
        ("wright_tail", 0.05),
        ("incomplete_gamma", 0.02),
        ("mass_log", 1e-5),
        ("tail_truncation", 1e-6),
        ("representation", 1e-3),
        ("gaussian_fourier", 1e-8),
        ("kernel_rho1", 1e-8),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub cases_run: usize,
    pub cases_passed: usize,
    /// Largest relative error among cases that produced a number.
    pub worst_rel_error: f64,
    pub worst_case_inputs: String,
    /// Inputs and reason for each failed case.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    /// Per-suite reports when this one aggregates several.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases_passed == self.cases_run
    }
}

struct Outcome {
    inputs: String,
    rel_error: Option<f64>,
    passed: bool,
    reason: String,
}

struct Tally<'a> {
    tol: &'a BTreeMap<String, f64>,
    outcomes: Vec<Outcome>,
}

impl<'a> Tally<'a> {
    fn tol(&self, key: &str) -> f64 {
        self.tol[key]
    }

    fn push(&mut self, o: Outcome) {
        self.outcomes.push(o);
    }

    /// `|got − want| ≤ tol·|want|`.
    fn close(&mut self, key: &str, inputs: String, got: Result<f64>, want: f64) {
        let tol = self.tol(key);
        self.push(match got {
            Ok(g) => {
                let e = rel_err(g, want);
                // a few ulps of slack so a bound met exactly is not lost to rounding
                let passed = e <= tol + 16.0 * f64::EPSILON * (g / want).abs().max(1.0);
                Outcome { inputs, rel_error: Some(e), passed, reason: format!("{key}: got {g:e}, want {want:e}") }
            }
            Err(e) => failed(inputs, format!("{key}: {e}")),
        });
    }

    fn check(&mut self, what: &str, inputs: String, ok: Result<bool>) {
        self.push(match ok {
            Ok(true) => Outcome { inputs, rel_error: None, passed: true, reason: String::new() },
            Ok(false) => failed(inputs, what.to_string()),
            Err(e) => failed(inputs, format!("{what}: {e}")),
        });
    }

    fn report(self, name: SuiteName) -> SuiteReport {
        let mut worst = 0.0;
        let mut worst_inputs = String::new();
        for o in &self.outcomes {
            if let Some(e) = o.rel_error {
                if e > worst {
                    worst = e;
                    worst_inputs = o.inputs.clone();
                }
            }
        }
        let failures: Vec<String> =
            self.outcomes.iter().filter(|o| !o.passed).map(|o| format!("{} [{}]", o.inputs, o.reason)).collect();
        SuiteReport {
            suite_name: name.to_string(),
            cases_run: self.outcomes.len(),
            cases_passed: self.outcomes.len() - failures.len(),
            worst_rel_error: worst,
            worst_case_inputs: worst_inputs,
            failures,
            suites: Vec::new(),
        }
    }
}

fn failed(inputs: String, reason: String) -> Outcome {
    Outcome { inputs, rel_error: None, passed: false, reason }
}

fn rel_err(got: f64, want: f64) -> f64 {
    let d = (got - want).abs();
    if want == 0.0 {
        d
    } else {
        d / want.abs()
    }
}

/// Runs one suite, or every suite for [`SuiteName::All`]. Unknown override
/// keys are ignored.
pub fn run_suite(name: SuiteName, tol_overrides: Option<&TolOverrides>) -> SuiteReport {
    let mut tol: BTreeMap<String, f64> = default_tolerances().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    if let Some(o) = tol_overrides {
        for (k, v) in o {
            if let Some(slot) = tol.get_mut(k) {
                *slot = *v;
            }
        }
    }
    if name == SuiteName::All {
        let suites: Vec<SuiteReport> = SuiteName::INDIVIDUAL.par_iter().map(|&n| run_one(n, &tol)).collect();
        let mut all = SuiteReport {
            suite_name: name.to_string(),
            cases_run: suites.iter().map(|s| s.cases_run).sum(),
            cases_passed: suites.iter().map(|s| s.cases_passed).sum(),
            worst_rel_error: 0.0,
            worst_case_inputs: String::new(),
            failures: suites.iter().flat_map(|s| s.failures.iter().map(move |f| format!("{}: {f}", s.suite_name))).collect(),
            suites: Vec::new(),
        };
        for s in &suites {
            if s.worst_rel_error > all.worst_rel_error {
                all.worst_rel_error = s.worst_rel_error;
                all.worst_case_inputs = format!("{}: {}", s.suite_name, s.worst_case_inputs);
            }
        }
        all.suites = suites;
        return all;
    }
    run_one(name, &tol)
}

fn run_one(name: SuiteName, tol: &BTreeMap<String, f64>) -> SuiteReport {
    let mut t = Tally { tol, outcomes: Vec::new() };
    match name {
        SuiteName::MLIdentities => ml_identities(&mut t),
        SuiteName::WrightIdentities => wright_identities(&mut t),
        SuiteName::EstimateLemmas => estimate_lemmas(&mut t),
        SuiteName::LeibnizProperties => leibniz_properties(&mut t),
        SuiteName::Subordination => subordination_suite(&mut t),
        SuiteName::Representations => representations(&mut t),
        SuiteName::Asymptotics => asymptotics(&mut t),
        SuiteName::All => unreachable!("handled by run_suite"),
    }
    t.report(name)
}

fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    Ok(mittag_leffler(alpha, beta, z, &EvalPolicy::default())?.value)
}

fn wright(nu: f64, mu: f64, z: f64) -> Result<f64> {
    Ok(wright_neg(nu, mu, z, &EvalPolicy::default())?.value)
}

/// Central difference with step `h`.
fn central<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn ml_identities(t: &mut Tally) {
    for i in 0..41 {
        let z = -5.0 + 0.2 * i as f64;
        let want = (z * z).exp() * erfc(-z);
        t.close("ml_erfc", format!("E_0.5(z), z={z:.1}"), ml(0.5, 1.0, z), want);
    }
    for z in [-5.0, -1.0, 0.0, 1.0, 5.0] {
        t.close("ml_exp", format!("E_1(z), z={z}"), ml(1.0, 1.0, z), z.exp());
    }
    for alpha in [0.3, 0.5, 0.9] {
        for beta in [0.5, 1.0, 2.0] {
            t.close("ml_origin", format!("E_{alpha},{beta}(0)"), ml(alpha, beta, 0.0), reciprocal_gamma(beta));
        }
    }
    for alpha in [0.3, 0.5, 0.7, 0.9] {
        let zs: Vec<f64> = (0..=70).map(|i| -30.0 + 0.5 * i as f64).collect();
        let vals: Vec<Result<f64>> = zs.par_iter().map(|&z| ml(alpha, 1.0, z)).collect();
        let mut prev: Option<f64> = None;
        for (z, v) in zs.iter().zip(vals) {
            let ok = v.map(|v| {
                let good = v > 0.0 && prev.is_none_or(|p| v > p);
                prev = Some(v);
                good
            });
            t.check("positive and increasing", format!("E_{alpha}(z), z={z}"), ok);
        }
    }
    for alpha in [0.3, 0.5, 0.7, 0.9] {
        for z in [-0.5, -1.0, -2.0, 1.0] {
            let fd = central(|x| ml(alpha, 1.0, x), z, 1e-4);
            let want = mittag_leffler_deriv(alpha, z, &EvalPolicy::default()).map(|r| r.value);
            match want {
                Ok(w) => t.close("ml_derivative", format!("E'_{alpha}({z})"), fd, w),
                Err(e) => t.check("derivative", format!("E'_{alpha}({z})"), Err(e)),
            }
        }
    }
}

/// `∫_0^∞ g(s) ds` for a positive log-integrand with super-exponential
/// decay, cut where it falls 60 e-folds below its running maximum.
fn integrate_decaying<G: Fn(f64) -> Result<f64> + Sync>(log_g: G) -> Result<f64> {
    let mut hi = 1.0;
    let mut peak = f64::NEG_INFINITY;
    loop {
        let v = log_g(hi)?;
        peak = peak.max(v);
        if v < peak - 60.0 && hi > 1.0 {
            break;
        }
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::QuadratureFailure("integrand does not decay".into()));
        }
    }
    let failure = RefCell::new(None);
    let f = |s: f64| match log_g(s) {
        Ok(v) => v.exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let pts: Vec<f64> = [0.0, 1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0, 0.125, 0.25, 0.5, 0.75, 1.0].iter().map(|p| p * hi).collect();
    let r = adaptive(f, &pts, 0.0, 1e-12, 4000);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.value)
}

/// `∫_0^∞ e^{zs} W_{−α,β−α}(−s) ds`, which equals `E_{α,β}(z)`.
pub fn laplace_wright(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    integrate_decaying(|s| {
        if s == 0.0 {
            return Ok(reciprocal_gamma(beta - alpha).abs().ln());
        }
        let w = log_wright_neg(alpha, beta - alpha, -s)?;
        if w.signum() < 0.0 {
            return Err(Error::Domain(format!("negative Wright weight at s = {s}")));
        }
        Ok(z * s + w.log_abs())
    })
}

/// `∫_0^∞ W_{−α,1−α}(−r) r^ν dr`, which equals `Γ(ν+1)/Γ(να+1)`.
pub fn wright_moment(alpha: f64, nu: f64) -> Result<f64> {
    integrate_decaying(|r| {
        if r == 0.0 {
            return Ok(if nu == 0.0 { reciprocal_gamma(1.0 - alpha).ln() } else { f64::NEG_INFINITY });
        }
        Ok(log_wright_neg(alpha, 1.0 - alpha, -r)?.log_abs() + nu * r.ln())
    })
}

fn wright_identities(t: &mut Tally) {
    for x in [0.5f64, 1.0, 2.0, 5.0] {
        let want = (-x * x / 4.0).exp() / PI.sqrt();
        t.close("wright_closed_form", format!("W_-0.5,0.5(-{x})"), wright(0.5, 0.5, -x), want);
        t.close("wright_closed_form", format!("W_-0.5,1(-{x})"), wright(0.5, 1.0, -x), erfc(x / 2.0));
    }
    let mut cells = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for beta in [1.0, alpha] {
            for z in [-3.0, -1.0, 0.0, 0.5, 1.0] {
                cells.push((alpha, beta, z));
            }
        }
    }
    let got: Vec<_> = cells.par_iter().map(|&(a, b, z)| (laplace_wright(a, b, z), ml(a, b, z))).collect();
    for (&(a, b, z), (lw, direct)) in cells.iter().zip(got) {
        let inputs = format!("Laplace-Wright alpha={a} beta={b} z={z}");
        match direct {
            Ok(d) => t.close("laplace_wright", inputs, lw, d),
            Err(e) => t.check("direct evaluation", inputs, Err(e)),
        }
    }
    let mut cells = Vec::new();
    for alpha in [0.3, 0.5, 0.8] {
        for nu in [0.0, 0.5, 1.0, 2.0, 3.5] {
            cells.push((alpha, nu));
        }
    }
    let got: Vec<_> = cells.par_iter().map(|&(a, nu)| wright_moment(a, nu)).collect();
    for (&(a, nu), m) in cells.iter().zip(got) {
        let want = gamma(nu + 1.0) / gamma(nu * a + 1.0);
        t.close("wright_moments", format!("moment alpha={a} nu={nu}"), m, want);
    }
    for alpha in [0.3, 0.5, 0.7] {
        for z in [-0.5, -1.0, -2.0] {
            let fd = central(|x| wright(alpha, 1.0, x), z, 1e-4);
            match wright(alpha, 1.0 - alpha, z) {
                Ok(w) => t.close("wright_derivative", format!("d/dz W_-{alpha},1 at {z}"), fd, w),
                Err(e) => t.check("derivative", format!("W_-{alpha},{} at {z}", 1.0 - alpha), Err(e)),
            }
        }
    }
    for alpha in [0.3, 0.5, 0.7] {
        wright_decay(t, alpha);
    }
}

/// Positivity, eventual decrease, and a bound `κ e^{−σ r^{1/(1−α)}}` fitted
/// on `[5, 15]` that must hold on `(15, 25]`.
fn wright_decay(t: &mut Tally, alpha: f64) {
    let p = 1.0 / (1.0 - alpha);
    let rs: Vec<f64> = (1..=50).map(|i| 0.5 * i as f64).collect();
    let logs: Vec<Result<LogValue>> = rs.par_iter().map(|&r| log_wright_neg(alpha, 1.0 - alpha, -r)).collect();
    let mut vals = Vec::new();
    for (&r, v) in rs.iter().zip(logs) {
        let inputs = format!("W_-{alpha},{}(-{r})", 1.0 - alpha);
        match v {
            Ok(v) => {
                t.check("positive", inputs.clone(), Ok(v.signum() > 0.0 && v.log_abs().is_finite()));
                vals.push((r, v.log_abs()));
            }
            Err(e) => t.check("positive", inputs, Err(e)),
        }
    }
    let tail: Vec<&(f64, f64)> = vals.iter().filter(|v| v.0 >= 5.0).collect();
    t.check(
        "decreasing beyond r = 5",
        format!("W_-{alpha},{} on [5, 25]", 1.0 - alpha),
        Ok(tail.windows(2).all(|w| w[1].1 < w[0].1)),
    );
    let fit: Vec<(f64, f64)> = vals.iter().filter(|v| (5.0..=15.0).contains(&v.0)).map(|&(r, l)| (r.powf(p), l)).collect();
    if fit.len() < 2 {
        t.check("bound fit", format!("alpha={alpha}"), Ok(false));
        return;
    }
    let n = fit.len() as f64;
    let mx = fit.iter().map(|v| v.0).sum::<f64>() / n;
    let my = fit.iter().map(|v| v.1).sum::<f64>() / n;
    let slope = fit.iter().map(|v| (v.0 - mx) * (v.1 - my)).sum::<f64>() / fit.iter().map(|v| (v.0 - mx).powi(2)).sum::<f64>();
    // the algebraic prefactor bends the fit, so keep half the fitted rate
    let sigma = -0.5 * slope;
    let ln_kappa = fit.iter().map(|v| v.1 + sigma * v.0).fold(f64::NEG_INFINITY, f64::max);
    let holds = sigma > 0.0
        && vals.iter().filter(|v| v.0 > 15.0).all(|&(r, l)| l <= ln_kappa - sigma * r.powf(p));
    t.check("fitted exponential bound", format!("alpha={alpha} sigma={sigma:.4e}"), Ok(holds));
}

fn estimate_grid() -> Vec<f64> {
    (0..40).map(|i| 0.05 * 1000f64.powf(i as f64 / 39.0)).collect()
}

/// Both lemmas as stated (non-strict); a case fails only on a certified
/// violation.
fn estimate_lemmas(t: &mut Tally) {
    let mut cells = Vec::new();
    for (n, alpha) in [(2u32, 0.5), (2, 0.75), (3, 0.4), (4, 0.3)] {
        for r in estimate_grid() {
            for kind in [EstimateKind::Upper, EstimateKind::Lower] {
                cells.push((kind, n, alpha, r));
            }
        }
    }
    let got: Vec<_> = cells.par_iter().map(|&(k, n, a, r)| estimate_compare(k, n, a, r)).collect();
    for (&(k, n, a, r), c) in cells.iter().zip(got) {
        let inputs = format!("{k:?} n={n} alpha={a} r={r:.6}");
        match c {
            Ok(c) => {
                let passed = c.verdict != Verdict::Violated;
                let violation = if c.margin.signum() < 0.0 { (c.margin.log_abs() - c.lhs.log_abs()).exp() } else { 0.0 };
                t.push(Outcome {
                    inputs,
                    rel_error: Some(violation),
                    passed,
                    reason: format!("violated by {violation:e} relative"),
                });
            }
            Err(e) => t.check("estimate", inputs, Err(e)),
        }
    }
}

fn leibniz_properties(t: &mut Tally) {
    const K: usize = 12;
    let mut cells = Vec::new();
    for alpha in [0.4, 0.6] {
        for rho in [1.0, 1.5, 2.0] {
            for tt in [1.0, 5.0] {
                for x in [2.0, 5.0, 10.0] {
                    cells.push((alpha, rho, tt, x));
                }
            }
        }
    }
    let coeffs: Vec<Result<Vec<f64>>> = cells
        .par_iter()
        .map(|&(a, r, tt, x)| (0..K).map(|k| a_coefficient(k, a, r, tt, x)).collect())
        .collect();
    for (&(a, r, tt, x), c) in cells.iter().zip(coeffs) {
        let cell = format!("alpha={a} rho={r} t={tt} x={x}");
        match c {
            Ok(c) => {
                for (k, ak) in c.iter().enumerate() {
                    t.check("a_k > 0", format!("{cell} k={k}"), Ok(*ak > 0.0));
                }
                for k in 1..K - 1 {
                    t.check("a_{k+1} < a_k", format!("{cell} k={k}"), Ok(c[k + 1] < c[k]));
                }
                t.check("2 a_0 > a_1", cell, Ok(2.0 * c[0] > c[1]));
            }
            Err(e) => t.check("coefficients", cell, Err(e)),
        }
    }
    let brackets: Vec<Result<bool>> = cells
        .par_iter()
        .map(|&(a, r, tt, x)| {
            let st = series_state(a, r, tt, x, 1e-6)?;
            let fine = series_state(a, r, tt, x, 1e-9)?;
            let v = fine.partial_sum * (fine.ln_scale - st.ln_scale).exp();
            let (lo, hi) = (st.partial_sum.min(st.next_sum), st.partial_sum.max(st.next_sum));
            let slack = fine.remainder_bound * (fine.ln_scale - st.ln_scale).exp() + 1e-12 * v.abs();
            Ok(lo - slack <= v && v <= hi + slack)
        })
        .collect();
    for (&(a, r, tt, x), ok) in cells.iter().zip(brackets) {
        t.check("limit between consecutive partial sums", format!("bracket alpha={a} rho={r} t={tt} x={x}"), ok);
    }
    let ell = dottie();
    for (n, a, r, tt, x) in [(2u32, 0.5, 1.0, 5.0, 10.0), (3, 0.4, 1.5, 8.0, 20.0)] {
        let ok = a_coefficient(0, a, r, tt, x).and_then(|a0| Ok(a0 > a0_lower_bound(n, a, r, tt, x, ell)?));
        t.check("a_0 above its lower bound", format!("a0 n={n} alpha={a} rho={r} t={tt} x={x}"), ok);
    }
    for (n, a, r, tt, x) in [(2u32, 0.5, 1.0, 5.0, 10.0), (2, 0.75, 2.0, 6.0, 12.0)] {
        let ok = a_coefficient(1, a, r, tt, x).and_then(|a1| Ok(a1 < a1_upper_bound(n, a, r, tt, x)?));
        t.check("a_1 below its upper bound", format!("a1 n={n} alpha={a} rho={r} t={tt} x={x}"), ok);
    }
}

fn subordination_suite(t: &mut Tally) {
    let spec = QuadratureSpec::default();
    let mut cells = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for tt in [0.5, 1.0, 2.0, 5.0] {
            cells.push((alpha, tt));
        }
    }
    let got: Vec<_> = cells
        .par_iter()
        .map(|&(a, tt)| Ok::<_, Error>((total_mass(a, tt, &spec)?, log_mittag_leffler(a, tt.powf(a))?)))
        .collect();
    let tol = t.tol("mass_log");
    for (&(a, tt), g) in cells.iter().zip(got) {
        let inputs = format!("mass alpha={a} t={tt}");
        t.push(match g {
            Ok((m, e)) => {
                let err = (m.log_abs() - e.log_abs()).abs() / e.log_abs().abs().max(1.0);
                Outcome { inputs, rel_error: Some(err), passed: err <= tol, reason: format!("log mass off by {err:e}") }
            }
            Err(e) => failed(inputs, e.to_string()),
        });
    }
    let mut cells = Vec::new();
    for rho in [0.5, 1.0] {
        for d in [1u32, 2, 3] {
            for tt in [0.5, 2.0, 10.0] {
                for r in [0.5, 2.0, 10.0] {
                    cells.push((rho, d, tt, r));
                }
            }
        }
    }
    let got: Vec<_> = cells
        .par_iter()
        .map(|&(rho, d, tt, r)| subordinate(&FracParams::new(0.5, rho, d)?, tt, r, &spec))
        .collect();
    for (&(rho, d, tt, r), v) in cells.iter().zip(got) {
        t.check("positive", format!("u alpha=0.5 rho={rho} d={d} t={tt} r={r}"), v.map(|v| v.is_finite() && v.signum() > 0.0));
    }
    let wide = QuadratureSpec { tail_cut_log: 2.0 * spec.tail_cut_log, ..spec };
    let tol = t.tol("tail_truncation");
    for (a, tt, r) in [(0.5, 1.0, 1.0), (0.5, 5.0, 3.0), (0.3, 20.0, 10.0), (0.8, 2.0, 0.5)] {
        let inputs = format!("tail cut alpha={a} t={tt} r={r}");
        let pair = FracParams::new(a, 1.0, 1)
            .and_then(|p| Ok((subordinate(&p, tt, r, &spec)?, subordinate(&p, tt, r, &wide)?)));
        t.push(match pair {
            Ok((x, y)) => {
                let e = (x.log_abs() - y.log_abs()).abs();
                Outcome { inputs, rel_error: Some(e), passed: e <= tol, reason: format!("changed by {e:e}") }
            }
            Err(e) => failed(inputs, e.to_string()),
        });
    }
}

fn representations(t: &mut Tally) {
    let spec = QuadratureSpec::default();
    let mut cells = Vec::new();
    for alpha in [0.4, 0.5, 0.8] {
        for tt in [1.0, 2.0, 5.0] {
            for x in [0.0, 1.0, 3.0] {
                cells.push((alpha, tt, x));
            }
        }
    }
    let got: Vec<_> = cells
        .par_iter()
        .map(|&(a, tt, x)| {
            let s = subordinate(&FracParams::new(a, 1.0, 1)?, tt, x, &spec)?;
            let f = solution_series(a, 1.0, tt, x, 1e-9)?;
            Ok::<_, Error>((s.to_f64(), f.value))
        })
        .collect();
    for (&(a, tt, x), g) in cells.iter().zip(got) {
        let inputs = format!("subordination vs Fourier alpha={a} t={tt} x={x}");
        match g {
            Ok((s, f)) => t.close("representation", inputs, Ok(s), f),
            Err(e) => t.check("both routes", inputs, Err(e)),
        }
    }
    for tt in [0.5f64, 1.0, 2.0] {
        for x in [0.5f64, 1.0, 2.0] {
            let want = (tt - x * x / (4.0 * tt)).exp() / (4.0 * PI * tt).sqrt();
            let got = solution_series(1.0, 1.0, tt, x, 1e-12).map(|r| r.value);
            t.close("gaussian_fourier", format!("Fourier alpha=1 t={tt} x={x}"), got, want);
        }
    }
    for tt in [0.5, 1.0, 2.0] {
        for x in [0.0, 0.5, 1.0, 2.0] {
            let want = gaussian_density(tt, x, 1).to_f64();
            let got = higher_order_kernel_1d(1.0, tt, x).map(|v| v.to_f64());
            t.close("kernel_rho1", format!("rho=1 kernel t={tt} x={x}"), got, want);
        }
    }
}

/// `|err(large)| < |err(small)|`, the two errors given as `|ratio − 1|`; a
/// ratio already at 1 to rounding also passes.
fn trend(t: &mut Tally, inputs: String, small: Result<f64>, large: Result<f64>) {
    const AT_LIMIT: f64 = 1e-12;
    let ok = small.and_then(|s| Ok(((large? - 1.0).abs(), (s - 1.0).abs()))).map(|(l, s)| l < s || l <= AT_LIMIT);
    t.check("closer to the limit at the larger scale", inputs, ok);
}

fn asymptotics(t: &mut Tally) {
    for alpha in [0.5, 0.7, 0.9] {
        let ratio = |z: f64| Ok(alpha * ml(alpha, 1.0, z)? * (-z.powf(1.0 / alpha)).exp());
        trend(t, format!("alpha E_alpha(z) e^(-z^(1/alpha)), alpha={alpha}, z=2 vs 4"), ratio(2.0), ratio(4.0));
    }
    for alpha in [0.3, 0.5, 0.7] {
        let ratio = |x: f64| Ok(x * gamma(1.0 - alpha) * ml(alpha, 1.0, -x)?);
        trend(t, format!("x Gamma(1-alpha) E_alpha(-x), alpha={alpha}, x=5 vs 20"), ratio(5.0), ratio(20.0));
    }
    let tail_ratio = |nu: f64, mu: f64, z: f64| -> Result<f64> {
        let w = log_wright_neg(nu, mu, z)?;
        let a = log_wright_tail(nu, mu, z)?;
        Ok((w.log_abs() - a.log_abs()).exp())
    };
    for (nu, mu) in [(0.5, 0.5), (0.5, 1.0), (0.3, 0.7), (0.7, 0.3)] {
        trend(t, format!("Wright tail ratio nu={nu} mu={mu}, z=-5 vs -15"), tail_ratio(nu, mu, -5.0), tail_ratio(nu, mu, -15.0));
    }
    for (nu, mu) in [(0.5, 0.5), (0.5, 1.0)] {
        t.close("wright_tail", format!("Wright tail nu={nu} mu={mu} z=-10"), tail_ratio(nu, mu, -10.0), 1.0);
    }
    for s in [-0.5, 0.5, 2.0] {
        let ratio = |x: f64| Ok(gamma_upper_incomplete(s, x)? / (x.powf(s - 1.0) * (-x).exp()));
        t.close("incomplete_gamma", format!("Gamma({s}, 50) / (50^(s-1) e^-50)"), ratio(50.0), 1.0);
        trend(t, format!("incomplete gamma ratio s={s}, x=10 vs 50"), ratio(10.0), ratio(50.0));
    }
    // remainders of the coefficient bounds against the growth E_α(t^α), along x = m t^β
    let (n, alpha, rho, m, beta) = (2u32, 0.5, 1.0, 5.0, 0.25);
    let fade = |tt: f64, which: u8| -> Result<f64> {
        let x = m * tt.powf(beta);
        let e = ml(alpha, 1.0, tt.powf(alpha))?;
        let c = if which == 0 { c0(n, alpha, rho, tt, x, dottie())? } else { tt.powf(alpha * (n as f64 - 1.0)) * c1(n, alpha, rho, tt, x)? };
        Ok(1.0 + (c / e).abs())
    };
    trend(t, "c0 / E_alpha(t^alpha), t=20 vs 40".into(), fade(20.0, 0), fade(40.0, 0));
    trend(t, "t^(alpha(n-1)) c1 / E_alpha(t^alpha), t=20 vs 40".into(), fade(20.0, 1), fade(40.0, 1));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!("all".parse::<SuiteName>().unwrap(), SuiteName::All);
        assert_eq!("ml-identities".parse::<SuiteName>().unwrap(), SuiteName::MLIdentities);
        assert_eq!("LeibnizProperties".parse::<SuiteName>().unwrap(), SuiteName::LeibnizProperties);
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn laplace_wright_matches_exp() {
        // E_{1/2}(z) against its erfc form
        let z: f64 = 0.7;
        let want = (z * z).exp() * erfc(-z);
        assert!(rel_err(laplace_wright(0.5, 1.0, z).unwrap(), want) < 1e-9);
    }

    #[test]
    fn overrides_apply() {
        let strict = TolOverrides::from([("ml_erfc".to_string(), 0.0)]);
        let r = run_suite(SuiteName::MLIdentities, Some(&strict));
        assert!(r.cases_passed < r.cases_run);
    }

    #[test]
    fn suites_pass_apart_from_the_incomplete_gamma_bound() {
        for name in SuiteName::INDIVIDUAL {
            let r = run_suite(name, None);
            assert!(r.worst_rel_error >= 0.0 && r.cases_passed <= r.cases_run);
            if name == SuiteName::Asymptotics {
                // Γ(s, x)/(x^{s−1}e^{−x}) = 1 + (s−1)/x + O(x⁻²) sits 2.85% below 1 at s = −0.5, x = 50
                assert_eq!(r.failures.len(), 1, "{r:#?}");
                assert!(r.failures[0].starts_with("Gamma(-0.5, 50)"), "{r:#?}");
            } else {
                assert!(r.passed(), "{r:#?}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = run_suite(SuiteName::Asymptotics, None);
        let b = run_suite(SuiteName::Asymptotics, None);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
