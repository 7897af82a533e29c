//! Polynomial corrections that bound `E_α(r)` from above and below by
//! `E'_α(r)`, for `n ≥ 2` and `α ∈ [1/n, 1)`:
//!
//! * upper: `E_α(r) ≤ α E'_α(r) + Σ_{k=0}^{⌊(3n−2)/2⌋−1} γ_k r^k`,
//!   `γ_k = 1/Γ(1+αk) − 1/Γ(α+αk)`;
//! * lower: `E_α(r) ≥ r^{1−n} [α E'_α(r) − Σ_{k=0}^{K} λ_k r^k + Σ_{k=n−1}^{K} β_k r^k]`,
//!   `K = ⌊n−1+1/(2α)⌋`, `λ_k = 1/Γ(α+kα)`, `β_k = 1/Γ(1+kα−α(n−1))`.
//!
//! At `α = 1/n` the lower bound is an identity (`β_k = λ_{k+1−n}` term by
//! term), so there the two sides agree to rounding.

use serde::{Deserialize, Serialize};

use super::gamma::reciprocal_gamma;
use super::mittag_leffler::ml_eval;
use super::{EvalPolicy, LogValue};
use crate::error::{domain, Error, Result};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimateKind {
    Upper,
    Lower,
}

/// Outcome of a certified comparison: `Strict` and `Violated` are decided
/// beyond the combined error bounds, `Undecided` is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Strict,
    Undecided,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateComparison {
    pub kind: EstimateKind,
    pub n: u32,
    pub alpha: f64,
    pub r: f64,
    /// `E_α(r)`.
    pub lhs: LogValue,
    pub rhs: LogValue,
    /// Signed slack in the direction of the inequality (positive when it holds).
    pub margin: LogValue,
    /// Combined absolute error bound on both sides.
    pub uncertainty: LogValue,
    pub verdict: Verdict,
}

pub(crate) fn upper_terms(n: u32) -> u32 {
    (3 * n - 2) / 2
}

pub(crate) fn lower_top(n: u32, alpha: f64) -> u32 {
    // guard the floor against 1/(2α) landing a hair below an integer
    (n as f64 - 1.0 + 0.5 / alpha + 1e-9).floor() as u32
}

fn check(n: u32, alpha: f64, r: f64) -> Result<()> {
    if n < 2 {
        return domain(format!("estimate lemmas need n >= 2, got {n}"));
    }
    if !(alpha < 1.0) || alpha < 1.0 / n as f64 - 1e-12 {
        return domain(format!("estimate lemmas need alpha in [1/{n}, 1), got {alpha}"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("estimate lemmas need r > 0, got {r}"));
    }
    Ok(())
}

/// Right-hand side and its absolute error bound, in signed log form.
fn rhs_log(kind: EstimateKind, n: u32, alpha: f64, r: f64) -> Result<(LogValue, LogValue)> {
    let policy = EvalPolicy::default();
    let e = ml_eval(alpha, alpha, r, &policy)?;
    let mut poly = 0.0;
    let mut poly_abs = 0.0;
    let mut add = |c: f64, k: u32| {
        let t = c * r.powi(k as i32);
        poly += t;
        poly_abs += t.abs();
    };
    match kind {
        EstimateKind::Upper => {
            for k in 0..upper_terms(n) {
                let kf = k as f64;
                add(reciprocal_gamma(1.0 + alpha * kf) - reciprocal_gamma(alpha + alpha * kf), k);
            }
            let value = e.value.add(LogValue::from_f64(poly));
            let err = e.abs_err.add(LogValue::from_f64(8.0 * EPS * poly_abs));
            Ok((value, err))
        }
        EstimateKind::Lower => {
            let top = lower_top(n, alpha);
            for k in 0..=top {
                add(-reciprocal_gamma(alpha + k as f64 * alpha), k);
            }
            for k in (n - 1)..=top {
                add(reciprocal_gamma(1.0 + k as f64 * alpha - alpha * (n as f64 - 1.0)), k);
            }
            let shift = (1.0 - n as f64) * r.ln();
            let value = e.value.add(LogValue::from_f64(poly)).scale_log(shift);
            let err = e
                .abs_err
                .add(LogValue::from_f64(8.0 * EPS * poly_abs))
                .add(e.value.scale_log((4.0 * EPS).ln()))
                .scale_log(shift);
            Ok((value, err))
        }
    }
}

/// Right-hand side of the upper or lower estimate at `r`.
pub fn ml_estimate_rhs(kind: EstimateKind, n: u32, alpha: f64, r: f64) -> Result<f64> {
    check(n, alpha, r)?;
    let (v, _) = rhs_log(kind, n, alpha, r)?;
    let x = v.to_f64();
    if !x.is_finite() {
        return Err(Error::Overflow(format!("estimate right-hand side exp({}) exceeds f64", v.log_abs())));
    }
    Ok(x)
}

/// Compares `E_α(r)` against the chosen estimate with both sides carried in
/// log form and certified by their error bounds.
pub fn estimate_compare(kind: EstimateKind, n: u32, alpha: f64, r: f64) -> Result<EstimateComparison> {
    check(n, alpha, r)?;
    let lhs = ml_eval(alpha, 1.0, r, &EvalPolicy::default())?;
    let (rhs, rhs_err) = rhs_log(kind, n, alpha, r)?;
    let margin = match kind {
        EstimateKind::Upper => rhs.sub(lhs.value),
        EstimateKind::Lower => lhs.value.sub(rhs),
    };
    // rounding in the subtraction itself
    let cancel = LogValue::from_log(lhs.value.log_abs().max(rhs.log_abs()) + (4.0 * EPS).ln());
    let uncertainty = rhs_err.add(lhs.abs_err).add(cancel);
    let decided = margin.log_abs() > uncertainty.log_abs();
    let verdict = match (margin.signum() > 0.0, decided) {
        (true, true) => Verdict::Strict,
        (false, true) if !margin.is_zero() => Verdict::Violated,
        _ => Verdict::Undecided,
    };
    Ok(EstimateComparison { kind, n, alpha, r, lhs: lhs.value, rhs, margin, uncertainty, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, mittag_leffler};

    fn log_grid() -> Vec<f64> {
        (0..40).map(|i| 0.05 * 1000f64.powf(i as f64 / 39.0)).collect()
    }

    #[test]
    fn upper_reduces_to_two_term_form_for_n2() {
        let p = EvalPolicy::default();
        for &alpha in &[0.5, 0.6, 0.9] {
            for &r in &[0.3, 1.0, 4.0] {
                let deriv = crate::specfun::mittag_leffler_deriv(alpha, r, &p).unwrap().value;
                let want = alpha * deriv + (1.0 - 1.0 / gamma(alpha))
                    + (1.0 / gamma(1.0 + alpha) - 1.0 / gamma(2.0 * alpha)) * r;
                let got = ml_estimate_rhs(EstimateKind::Upper, 2, alpha, r).unwrap();
                assert!(((got - want) / want).abs() < 1e-13, "alpha={alpha} r={r}");
            }
        }
    }

    #[test]
    fn examples_at_half() {
        let e = mittag_leffler(0.5, 1.0, 1.0, &EvalPolicy::default()).unwrap().value;
        assert!(ml_estimate_rhs(EstimateKind::Upper, 2, 0.5, 1.0).unwrap() >= e);
        assert!(ml_estimate_rhs(EstimateKind::Lower, 2, 0.5, 1.0).unwrap() <= e * (1.0 + 1e-13));
    }

    #[test]
    fn lower_is_identity_at_reciprocal_n() {
        for &(n, alpha) in &[(2u32, 0.5), (4, 0.25)] {
            for r in log_grid() {
                let c = estimate_compare(EstimateKind::Lower, n, alpha, r).unwrap();
                assert_eq!(c.verdict, Verdict::Undecided, "n={n} r={r}");
                assert!(c.margin.log_abs() <= c.uncertainty.log_abs(), "n={n} r={r}");
                // relative rounding in exp(x) grows with x
                let cond = 1e-9 + 1e-14 * c.lhs.log_abs().abs();
                assert!(c.uncertainty.log_abs() - c.lhs.log_abs() < cond.ln(), "n={n} r={r}: {c:?}");
            }
        }
    }

    #[test]
    fn strict_away_from_the_identity() {
        for &(n, alpha) in &[(2u32, 0.5), (2, 0.75), (3, 0.4), (4, 0.3)] {
            for r in log_grid() {
                let up = estimate_compare(EstimateKind::Upper, n, alpha, r).unwrap();
                assert_eq!(up.verdict, Verdict::Strict, "upper n={n} alpha={alpha} r={r}: {up:?}");
                let lo = estimate_compare(EstimateKind::Lower, n, alpha, r).unwrap();
                if n == 2 && alpha == 0.5 {
                    assert_ne!(lo.verdict, Verdict::Violated);
                } else {
                    assert_eq!(lo.verdict, Verdict::Strict, "lower n={n} alpha={alpha} r={r}: {lo:?}");
                }
            }
        }
    }

    #[test]
    fn domain_checks() {
        assert!(ml_estimate_rhs(EstimateKind::Upper, 2, 0.4, 1.0).is_err());
        assert!(ml_estimate_rhs(EstimateKind::Upper, 1, 0.9, 1.0).is_err());
        assert!(ml_estimate_rhs(EstimateKind::Lower, 3, 0.5, 0.0).is_err());
        assert!(ml_estimate_rhs(EstimateKind::Lower, 3, 1.0 / 3.0, 1.0).is_ok());
    }

    #[test]
    fn large_r_overflow_is_reported_not_silent() {
        assert!(matches!(ml_estimate_rhs(EstimateKind::Upper, 4, 0.3, 50.0), Err(Error::Overflow(_))));
        assert!(estimate_compare(EstimateKind::Upper, 4, 0.3, 50.0).is_ok());
    }
}
