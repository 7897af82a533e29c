//! Two-parameter Mittag-Leffler function `E_{α,β}(z)` on the real line,
//! `0 < α ≤ 1`, `β > 0`.
//!
//! Routes:
//! * Taylor series, term by term through `1/Γ`, with compensated summation.
//! * Exponential asymptotics on the positive axis.
//! * Algebraic asymptotics (six terms) far out on the negative axis.
//! * The branch-cut integral on the negative axis wherever the series
//!   loses too many digits to cancellation.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, reciprocal_gamma, sinpi};
use super::{EvalPolicy, EvalResult, LogValue, Regime};
use crate::error::{domain, Error, Result};
use crate::quad::{adaptive, KahanSum};

const EPS: f64 = f64::EPSILON;
const NEG_ASYM_MAX_TERMS: usize = 80;
const NEG_ASYM_TERMS: usize = 6;
/// Above this value of `z^{1/α}` the exponential asymptotic is used on the
/// positive axis; the neglected algebraic part is then below `e^{−40}`
/// relative to the result.
const POS_EXP_SWITCH: f64 = 40.0;
/// Negative-axis series are skipped when the largest term exceeds the result
/// by roughly `e^{35}`; no digits would survive.
const NEG_SERIES_MAX_LOG: f64 = 35.0;
const QUAD_REL_TOL: f64 = 1e-12;

/// Internal evaluation result in signed log form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MlEval {
    pub value: LogValue,
    pub abs_err: LogValue,
    pub terms: usize,
    pub regime: Regime,
}

impl MlEval {
    fn from_f64(value: f64, err: f64, terms: usize, regime: Regime) -> Self {
        MlEval { value: LogValue::from_f64(value), abs_err: LogValue::from_f64(err.abs()), terms, regime }
    }

    /// Relative error bound, `+∞` when the value is zero.
    pub fn rel_err(&self) -> f64 {
        if self.value.is_zero() {
            return f64::INFINITY;
        }
        (self.abs_err.log_abs() - self.value.log_abs()).exp()
    }

    fn into_result(self) -> Result<EvalResult> {
        let value = self.value.to_f64();
        let err = self.abs_err.to_f64();
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::Overflow(format!(
                "Mittag-Leffler value exp({}) exceeds f64; use the log-domain API",
                self.value.log_abs()
            )));
        }
        Ok(EvalResult { value, abs_error_bound: err, terms_used: self.terms, regime: self.regime })
    }
}

fn check_params(alpha: f64, beta: f64, z: f64, policy: &EvalPolicy) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("Mittag-Leffler needs 0 < alpha <= 1, got {alpha}"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return domain(format!("Mittag-Leffler needs beta > 0, got {beta}"));
    }
    if !z.is_finite() {
        return domain(format!("Mittag-Leffler needs a finite argument, got {z}"));
    }
    policy.validate()
}

/// `E_{α,β}(z)` with an error bound and the regime used.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64, policy: &EvalPolicy) -> Result<EvalResult> {
    ml_eval(alpha, beta, z, policy)?.into_result()
}

/// `d/dz E_α(z) = E_{α,α}(z) / α`.
pub fn mittag_leffler_deriv(alpha: f64, z: f64, policy: &EvalPolicy) -> Result<EvalResult> {
    let mut r = ml_eval(alpha, alpha, z, policy)?;
    r.value = r.value.scale_log(-alpha.ln());
    r.abs_err = r.abs_err.scale_log(-alpha.ln());
    r.into_result()
}

/// `ln E_α(z)` (β = 1) with the default policy. Never overflows; for large
/// positive `z` this is `z^{1/α} − ln α` plus exponentially small corrections.
pub fn log_mittag_leffler(alpha: f64, z: f64) -> Result<LogValue> {
    log_mittag_leffler_general(alpha, 1.0, z)
}

/// Signed-log `E_{α,β}(z)` with the default policy.
pub fn log_mittag_leffler_general(alpha: f64, beta: f64, z: f64) -> Result<LogValue> {
    Ok(ml_eval(alpha, beta, z, &EvalPolicy::default())?.value)
}

pub(crate) fn ml_eval(alpha: f64, beta: f64, z: f64, policy: &EvalPolicy) -> Result<MlEval> {
    check_params(alpha, beta, z, policy)?;
    if z == 0.0 {
        let v = reciprocal_gamma(beta);
        return Ok(MlEval::from_f64(v, 2.0 * EPS * v.abs(), 1, Regime::TaylorSeries));
    }
    if alpha == 1.0 && beta == 1.0 {
        return Ok(MlEval {
            value: LogValue::from_log(z),
            abs_err: LogValue::from_log(z + (EPS * (1.0 + z.abs())).ln()),
            terms: 1,
            regime: Regime::TaylorSeries,
        });
    }
    if z > 0.0 {
        if z >= policy.asym_cutoff || z.powf(1.0 / alpha) >= POS_EXP_SWITCH {
            return Ok(positive_asymptotic(alpha, beta, z));
        }
        return positive_series(alpha, beta, z, policy);
    }
    let x = -z;
    if alpha == 1.0 {
        return unit_alpha_negative(beta, x, policy);
    }
    if x >= policy.asym_cutoff {
        return Ok(negative_asymptotic(alpha, beta, z));
    }
    if x <= policy.series_cutoff && x.powf(1.0 / alpha) <= NEG_SERIES_MAX_LOG {
        let s = negative_series(alpha, beta, z, policy)?;
        if s.rel_err() <= policy.target_tol {
            return Ok(s);
        }
        let q = branch_cut(alpha, beta, x)?;
        return Ok(if q.abs_err.log_abs() < s.abs_err.log_abs() { q } else { s });
    }
    branch_cut(alpha, beta, x)
}

/// Magnitude of the `n`-th series term and a bound on its relative rounding
/// error. Uses `|z|^n / Γ(αn+β)` directly while everything is in range.
fn term(alpha: f64, beta: f64, zabs: f64, ln_zabs: f64, n: usize) -> (f64, f64, f64) {
    let arg = alpha * n as f64 + beta;
    let log_pow = n as f64 * ln_zabs;
    let lg = ln_gamma(arg);
    let log_term = log_pow - lg;
    if arg < 170.0 && log_pow.abs() < 700.0 {
        let t = zabs.powf(n as f64) * reciprocal_gamma(arg);
        (t, log_term, 8.0 * EPS)
    } else {
        (log_term.exp(), log_term, 2.0 * EPS * (4.0 + log_pow.abs() + lg.abs()))
    }
}

/// Taylor series for `z > 0`. Only used while `z^{1/α} < 40`, so every term
/// and the sum stay well inside `f64` range.
fn positive_series(alpha: f64, beta: f64, z: f64, policy: &EvalPolicy) -> Result<MlEval> {
    let ln_z = z.ln();
    let mut acc = KahanSum::new();
    let mut err_acc = 0.0;
    let mut prev_log = f64::NEG_INFINITY;
    for n in 0..policy.max_terms {
        let (t, log_t, rel) = term(alpha, beta, z, ln_z, n);
        acc.add(t);
        err_acc += rel * t;
        let ratio_log = log_t - prev_log;
        prev_log = log_t;
        if n > 0 && ratio_log < 0.0 {
            let q = ratio_log.exp();
            let tail = t * q / (1.0 - q);
            let sum = acc.value();
            if tail <= 0.01 * policy.target_tol * sum {
                let err = tail + err_acc + 4.0 * EPS * sum;
                return Ok(MlEval::from_f64(sum, err, n + 1, Regime::TaylorSeries));
            }
        }
    }
    Err(Error::NonConvergence { what: "Mittag-Leffler series", terms: policy.max_terms })
}

/// Taylor series for `z < 0`; accuracy limited by cancellation, which the
/// returned error bound reflects.
fn negative_series(alpha: f64, beta: f64, z: f64, policy: &EvalPolicy) -> Result<MlEval> {
    let zabs = -z;
    let ln_z = zabs.ln();
    let mut acc = KahanSum::new();
    let mut err_acc = 0.0;
    let mut prev_log = f64::NEG_INFINITY;
    for n in 0..policy.max_terms {
        let (t, log_t, rel) = term(alpha, beta, zabs, ln_z, n);
        let signed = if n % 2 == 0 { t } else { -t };
        acc.add(signed);
        err_acc += rel * t;
        let ratio_log = log_t - prev_log;
        prev_log = log_t;
        if n > 0 && ratio_log < 0.0 {
            let q = ratio_log.exp();
            let tail = t * q / (1.0 - q);
            let sum = acc.value();
            if tail <= 0.01 * policy.target_tol * sum.abs() || tail < 1e-300 {
                let err = tail + err_acc + 4.0 * EPS * acc.abs_sum();
                return Ok(MlEval::from_f64(sum, err, n + 1, Regime::TaylorSeries));
            }
        }
    }
    Err(Error::NonConvergence { what: "Mittag-Leffler series", terms: policy.max_terms })
}

/// `E_{α,β}(z) ≈ (1/α) z^{(1−β)/α} e^{z^{1/α}} − Σ_{k=1}^{6} z^{−k}/Γ(β−αk)`.
fn positive_asymptotic(alpha: f64, beta: f64, z: f64) -> MlEval {
    let ln_z = z.ln();
    let root = z.powf(1.0 / alpha);
    let lead_log = -alpha.ln() + (1.0 - beta) / alpha * ln_z + root;
    let mut corr = KahanSum::new();
    for k in 1..=NEG_ASYM_TERMS {
        corr.add(-(-(k as f64) * ln_z).exp() * reciprocal_gamma(beta - alpha * k as f64));
    }
    let omitted = (-((NEG_ASYM_TERMS + 1) as f64) * ln_z).exp()
        * reciprocal_gamma(beta - alpha * (NEG_ASYM_TERMS + 1) as f64).abs();
    let value = LogValue::from_log(lead_log).add(LogValue::from_f64(corr.value()));
    let lead_rel = EPS * (4.0 + 2.0 * root + ((1.0 - beta) / alpha * ln_z).abs());
    let abs_err = LogValue::from_log(lead_log + lead_rel.ln())
        .add(LogValue::from_f64(omitted + 4.0 * EPS * corr.abs_sum()));
    MlEval { value, abs_err, terms: NEG_ASYM_TERMS, regime: Regime::AsymptoticPos }
}

/// `E_{α,β}(z) ≈ −Σ_{k=1}^{6} z^{−k}/Γ(β−αk)` for large negative `z`; the
/// bound is the magnitude of the first omitted term.
fn negative_asymptotic(alpha: f64, beta: f64, z: f64) -> MlEval {
    // Terms shrink until k is of order |z|^{1/α}. Single terms can vanish or
    // nearly vanish at poles of Γ, so the stopping rule looks at pairs: stop
    // once the next two are negligible or larger than the last two.
    let mut terms = Vec::with_capacity(NEG_ASYM_MAX_TERMS + 2);
    let mut zpow = 1.0;
    for k in 1..=NEG_ASYM_MAX_TERMS + 2 {
        zpow /= z;
        terms.push(-zpow * reciprocal_gamma(beta - alpha * k as f64));
    }
    let mut sum = KahanSum::new();
    let mut used = NEG_ASYM_MAX_TERMS;
    for i in 0..NEG_ASYM_MAX_TERMS {
        if i >= NEG_ASYM_TERMS {
            let next = terms[i].abs() + terms[i + 1].abs();
            let last = terms[i - 1].abs() + terms[i - 2].abs();
            if next <= 0.25 * EPS * sum.value().abs() || next > last {
                used = i;
                break;
            }
        }
        sum.add(terms[i]);
    }
    let omitted = terms[used].abs() + terms[used + 1].abs();
    MlEval::from_f64(sum.value(), omitted + 4.0 * EPS * sum.abs_sum(), used, Regime::AsymptoticNeg)
}

/// Branch-cut representation on the negative axis, valid for `0 < α < 1` and
/// `β < 1 + α`:
///
/// `E_{α,β}(−x) = (1/πα) ∫_0^∞ e^{−v^{1/α}} v^{(1−β)/α}
///     (v sin πβ + x sin π(β−α)) / (v² + 2xv cos πα + x²) dv`.
///
/// Larger `β` is reduced with `E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z`.
fn branch_cut(alpha: f64, beta: f64, x: f64) -> Result<MlEval> {
    if beta >= 1.0 + alpha {
        let lower = branch_cut(alpha, beta - alpha, x)?;
        let r = reciprocal_gamma(beta - alpha);
        let v = (lower.value.to_f64() - r) / -x;
        let err = (lower.abs_err.to_f64() + EPS * r.abs()) / x + EPS * v.abs();
        return Ok(MlEval::from_f64(v, err, lower.terms, Regime::Quadrature));
    }
    let inv_alpha = 1.0 / alpha;
    let p = (1.0 - beta) * inv_alpha;
    let s_beta = sinpi(beta);
    let s_beta_alpha = sinpi(beta - alpha);
    let c_alpha = (PI * alpha).cos();
    let norm = 1.0 / (PI * alpha);
    // For β > 1 the factor v^p is singular at 0; with w = v^{1+p} it is
    // absorbed into dw.
    let power = if p < 0.0 { 1.0 + p } else { 1.0 };
    let f = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        // v may underflow to 0 when power is small; the integrand then
        // takes its finite limit
        let v = w.powf(1.0 / power);
        let log_weight = p + 1.0 - power;
        let e = -v.powf(inv_alpha) + if log_weight == 0.0 { 0.0 } else { log_weight * v.ln() };
        if e < -745.0 {
            return 0.0;
        }
        let num = v * s_beta + x * s_beta_alpha;
        let den = v * v + 2.0 * x * v * c_alpha + x * x;
        norm * e.exp() * num / den / power
    };
    let upper = 745f64.powf(alpha);
    let mut pts = vec![0.0];
    for cand in [x / 4.0, x, 4.0 * x, 1.0] {
        if cand > 0.0 && cand < upper {
            pts.push(cand.powf(power));
        }
    }
    pts.push(upper.powf(power));
    pts.sort_by(f64::total_cmp);
    // The integrand carries non-analytic powers of w at 0 that fool the
    // Kronrod error estimate; geometric breakpoints isolate them.
    let first = pts[1];
    pts.extend((1..=12).map(|k| first * 4f64.powi(-k)));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = adaptive(f, &pts, 0.0, QUAD_REL_TOL, 2000);
    if !r.converged && r.abs_error > 1e-8 * r.value.abs() {
        return Err(Error::QuadratureFailure(format!(
            "branch-cut integral for E_{{{alpha},{beta}}}(-{x}) stalled at error {:e}",
            r.abs_error
        )));
    }
    Ok(MlEval::from_f64(r.value, r.abs_error, r.evaluations, Regime::Quadrature))
}

/// `α = 1`, `β ≠ 1`, negative argument. For `β > 1`,
/// `E_{1,β}(z) = (1/Γ(β)) ∫_0^1 exp(z(1 − w^{1/(β−1)})) dw`; smaller `β` is
/// lifted with `E_{1,β}(z) = 1/Γ(β) + z E_{1,β+1}(z)`.
fn unit_alpha_negative(beta: f64, x: f64, policy: &EvalPolicy) -> Result<MlEval> {
    if x <= policy.series_cutoff && x <= NEG_SERIES_MAX_LOG {
        let s = negative_series(1.0, beta, -x, policy)?;
        if s.rel_err() <= policy.target_tol {
            return Ok(s);
        }
    }
    if beta < 1.0 {
        let upper = unit_alpha_negative(beta + 1.0, x, policy)?;
        let r = reciprocal_gamma(beta);
        let v = r - x * upper.value.to_f64();
        let err = x * upper.abs_err.to_f64() + EPS * (r.abs() + v.abs());
        return Ok(MlEval::from_f64(v, err, upper.terms, Regime::Quadrature));
    }
    let q = 1.0 / (beta - 1.0);
    let f = |w: f64| (-x * (1.0 - w.powf(q))).exp();
    let r = adaptive(f, &[0.0, 0.5, 1.0], 0.0, QUAD_REL_TOL, 2000);
    if !r.converged && r.abs_error > 1e-8 * r.value.abs() {
        return Err(Error::QuadratureFailure(format!("E_{{1,{beta}}}(-{x}) integral stalled")));
    }
    let g = reciprocal_gamma(beta);
    Ok(MlEval::from_f64(g * r.value, g * r.abs_error, r.evaluations, Regime::Quadrature))
}
