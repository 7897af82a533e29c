//! Wright function with negative first parameter, `W_{−ν,μ}(−x)` for
//! `0 < ν < 1`, `x ≥ 0`.
//!
//! Small `x` uses the defining series. Larger `x` uses the Hankel
//! representation of `1/Γ` deformed onto the steepest-descent path
//! `s = X ρ(θ) e^{iθ}`, `X = x^{1/(1−ν)}`, `ρ(θ) = (sin νθ / sin θ)^{1/(1−ν)}`,
//! on which the phase is constant:
//!
//! `W = (X^{1−μ}/π) ∫_0^π e^{X φ(θ)} ρ^{−μ} [ρ cos((1−μ)θ) + ρ' sin((1−μ)θ)] dθ`,
//! `φ = ρ cos θ − ρ^ν cos νθ`.
//!
//! The integrand is positive near its peak at `θ = 0` and the factor
//! `e^{Xφ(0)} = e^{−Y}` is pulled out, so the result is available in log form
//! far past `f64` underflow.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, reciprocal_gamma};
use super::{EvalPolicy, EvalResult, LogValue, Regime};
use crate::error::{domain, Error, Result};
use crate::quad::{adaptive, KahanSum};

const EPS: f64 = f64::EPSILON;
const SERIES_MAX_X: f64 = 1.0;
const CONTOUR_REL_TOL: f64 = 1e-12;

fn check(nu: f64, mu: f64, z: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return domain(format!("Wright function needs 0 < nu < 1, got {nu}"));
    }
    if !mu.is_finite() {
        return domain(format!("Wright function needs finite mu, got {mu}"));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return domain(format!("Wright function is implemented for finite z <= 0, got {z}"));
    }
    Ok(())
}

/// `W_{−ν,μ}(z)` for `z ≤ 0`.
///
/// When the value lies below the `f64` underflow threshold the leading-order
/// tail from [`log_wright_tail`] is returned, flagged `AsymptoticNeg`.
pub fn wright_neg(nu: f64, mu: f64, z: f64, policy: &EvalPolicy) -> Result<EvalResult> {
    check(nu, mu, z)?;
    policy.validate()?;
    let (value, err, terms, regime) = eval(nu, mu, -z, policy)?;
    if value.log_abs() < -700.0 && y_of(nu, -z) > 1.0 {
        let tail = log_wright_tail(nu, mu, z)?;
        let y = y_of(nu, -z);
        let v = tail.to_f64();
        return Ok(EvalResult {
            value: v,
            abs_error_bound: v.abs() * 4.0 / y + f64::MIN_POSITIVE,
            terms_used: 1,
            regime: Regime::AsymptoticNeg,
        });
    }
    Ok(EvalResult { value: value.to_f64(), abs_error_bound: err.to_f64(), terms_used: terms, regime })
}

/// Signed-log `W_{−ν,μ}(z)` for `z ≤ 0`; accurate well past underflow.
pub fn log_wright_neg(nu: f64, mu: f64, z: f64) -> Result<LogValue> {
    check(nu, mu, z)?;
    Ok(eval(nu, mu, -z, &EvalPolicy::default())?.0)
}

fn y_of(nu: f64, x: f64) -> f64 {
    (1.0 - nu) * (nu.powf(nu) * x).powf(1.0 / (1.0 - nu))
}

/// Leading coefficient of `W_{−ν,μ}(−x) ~ A₀ Y^{1/2−μ} e^{−Y}`, from the
/// saddle point of the Hankel integral: `A₀ = (1−ν)^{μ−1} ν^{1/2−μ} / √(2π)`.
pub fn wright_tail_constant(nu: f64, mu: f64) -> f64 {
    (1.0 - nu).powf(mu - 1.0) * nu.powf(0.5 - mu) / (2.0 * PI).sqrt()
}

/// Leading-order tail `ln W ≈ (1/2−μ) ln Y − Y + ln A₀` with
/// `Y = (1−ν)(ν^ν |z|)^{1/(1−ν)}`. Rejects `Y ≤ 1`.
pub fn log_wright_tail(nu: f64, mu: f64, z: f64) -> Result<LogValue> {
    check(nu, mu, z)?;
    let y = y_of(nu, -z);
    if !(y > 1.0) {
        return domain(format!("Wright tail asymptotic needs Y > 1, got Y = {y} at z = {z}"));
    }
    Ok(LogValue::from_log((0.5 - mu) * y.ln() - y + wright_tail_constant(nu, mu).ln()))
}

fn eval(nu: f64, mu: f64, x: f64, policy: &EvalPolicy) -> Result<(LogValue, LogValue, usize, Regime)> {
    if x > SERIES_MAX_X {
        return contour(nu, mu, x);
    }
    // For ν near 1 the terms shrink only once n^{1−ν} > x, which can take
    // thousands of terms; the contour covers those cases.
    let sum = series(nu, mu, x, policy);
    if let Ok((v, e, n)) = sum {
        if v.is_finite() && e <= 1e-12 * v.abs() {
            return Ok((LogValue::from_f64(v), LogValue::from_f64(e), n, Regime::TaylorSeries));
        }
    }
    match (contour(nu, mu, x), sum) {
        (Ok(c), _) => Ok(c),
        (Err(_), Ok((v, e, n))) if v.is_finite() && e.is_finite() => {
            Ok((LogValue::from_f64(v), LogValue::from_f64(e), n, Regime::TaylorSeries))
        }
        (Err(_), Err(e)) => Err(e),
        (Err(e), Ok(_)) => Err(e),
    }
}

/// Bound on `|1/Γ(s)|`: at most 1.13 for `s ≥ 0`, and `Γ(1−s)/π` below.
fn rgamma_envelope_log(s: f64) -> f64 {
    let base = 1.13f64.ln();
    if s >= 0.0 {
        base
    } else {
        base.max(ln_gamma(1.0 - s) - PI.ln())
    }
}

fn series(nu: f64, mu: f64, x: f64, policy: &EvalPolicy) -> Result<(f64, f64, usize)> {
    if x == 0.0 {
        let v = reciprocal_gamma(mu);
        return Ok((v, 2.0 * EPS * v.abs(), 1));
    }
    let ln_x = x.ln();
    let mut acc = KahanSum::new();
    let mut prev_env = f64::NEG_INFINITY;
    for n in 0..policy.max_terms {
        let log_pow = n as f64 * ln_x - ln_gamma(n as f64 + 1.0);
        let s = mu - nu * n as f64;
        let t = log_pow.exp() * reciprocal_gamma(s);
        if !t.is_finite() {
            return Err(Error::NonConvergence { what: "Wright series", terms: n });
        }
        acc.add(if n % 2 == 0 { t } else { -t });
        let env = log_pow + rgamma_envelope_log(s);
        let step = env - prev_env;
        prev_env = env;
        if n > 0 && step < -0.7 {
            let q = step.exp();
            let tail = env.exp() * q / (1.0 - q);
            let sum = acc.value();
            if tail <= 0.01 * policy.target_tol * sum.abs() || tail < 1e-300 {
                let err = tail + 8.0 * EPS * acc.abs_sum();
                return Ok((sum, err, n + 1));
            }
        }
    }
    Err(Error::NonConvergence { what: "Wright series", terms: policy.max_terms })
}

/// `ln(sin u / u)`.
fn ln_sinc(u: f64) -> f64 {
    if u < 0.05 {
        let u2 = u * u;
        -u2 * (1.0 / 6.0 + u2 * (1.0 / 180.0 + u2 * (1.0 / 2835.0 + u2 / 37800.0)))
    } else {
        (u.sin() / u).ln()
    }
}

/// `ln cos u` for `0 ≤ u < π/2`.
fn ln_cos(u: f64) -> f64 {
    let h = (0.5 * u).sin();
    (-2.0 * h * h).ln_1p()
}

fn contour(nu: f64, mu: f64, x: f64) -> Result<(LogValue, LogValue, usize, Regime)> {
    let inv = 1.0 / (1.0 - nu);
    let ln_big_x = x.ln() * inv;
    let big_x = ln_big_x.exp();
    let phi0 = -(1.0 - nu) * nu.powf(nu * inv);
    let one_mu = 1.0 - mu;
    let ln_rho0 = nu.ln() * inv;
    let c = (nu * ln_rho0).exp();
    // X is huge for ν near 1, so φ − φ(0) is assembled from pieces that are
    // each accurate to a few ulps of θ² rather than of φ(0).
    let g = |th: f64| -> f64 {
        if th <= 0.0 || th >= PI {
            return 0.0;
        }
        let delta = (ln_sinc(nu * th) - ln_sinc(th)) * inv;
        let ln_rho = ln_rho0 + delta;
        let rho = ln_rho.exp();
        let dphi = if th < 0.5 * PI {
            c * (nu * (delta + ln_cos(th)).exp_m1() - (nu * delta + ln_cos(nu * th)).exp_m1())
        } else {
            rho * th.cos() - (nu * ln_rho).exp() * (nu * th).cos() - phi0
        };
        let expo = big_x * dphi - mu * ln_rho;
        if expo < -745.0 {
            return 0.0;
        }
        let d = if th < 1e-3 {
            let t2 = th * th;
            th * ((1.0 - nu * nu) / 3.0 + (1.0 - nu.powi(4)) * t2 / 45.0)
        } else {
            nu / (nu * th).tan() - 1.0 / th.tan()
        };
        let drho = rho * inv * d;
        expo.exp() * (rho * (one_mu * th).cos() + drho * (one_mu * th).sin())
    };
    let width = (1.0 / big_x.sqrt()).min(0.5);
    let mut pts = vec![0.0];
    let mut p = width;
    while p < PI {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(PI);
    let r = adaptive(g, &pts, 0.0, CONTOUR_REL_TOL, 4000);
    if !r.converged && r.abs_error > 1e-8 * r.value.abs() {
        return Err(Error::QuadratureFailure(format!(
            "Wright contour integral for nu={nu}, mu={mu}, x={x} stalled at error {:e}",
            r.abs_error
        )));
    }
    let prefix = one_mu * ln_big_x - PI.ln() + big_x * phi0;
    let value = LogValue::from_f64(r.value).scale_log(prefix);
    let err = LogValue::from_f64(r.abs_error + 4.0 * EPS * r.value.abs() * (1.0 + big_x.abs() * phi0.abs()))
        .scale_log(prefix);
    Ok((value, err, r.evaluations, Regime::Quadrature))
}
