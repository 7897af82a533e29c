//! Classical (`α = 1`) kernels `μ_t^ϱ`, the fundamental solutions of
//! `∂_t u + (−Δ)^ϱ u = 0`, and their reactive counterparts `e^t μ_t^ϱ`.
//!
//! Every kernel takes a radius `r = ‖x‖`; the solutions are radial.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{adaptive, KahanSum};
use crate::specfun::{gamma, ln_gamma, LogValue};

/// `(α, ϱ, d)`: time order, diffusion order and spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracParams {
    pub alpha: f64,
    pub rho: f64,
    pub dim: u32,
}

impl FracParams {
    pub fn new(alpha: f64, rho: f64, dim: u32) -> Result<Self> {
        let p = FracParams { alpha, rho, dim };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return domain(format!("rho must be positive, got {}", self.rho));
        }
        if self.dim == 0 {
            return domain("dimension must be at least 1");
        }
        Ok(())
    }
}

/// Two-sided bound `lower ≤ value ≤ upper`, both in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub lower: LogValue,
    pub upper: LogValue,
}

impl BoundEnvelope {
    pub fn scale_log(self, delta: f64) -> Self {
        BoundEnvelope { lower: self.lower.scale_log(delta), upper: self.upper.scale_log(delta) }
    }
}

/// Either an exact kernel value or a bracketing envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelValue {
    Exact(LogValue),
    Envelope(BoundEnvelope),
}

impl KernelValue {
    pub fn scale_log(self, delta: f64) -> Self {
        match self {
            KernelValue::Exact(v) => KernelValue::Exact(v.scale_log(delta)),
            KernelValue::Envelope(e) => KernelValue::Envelope(e.scale_log(delta)),
        }
    }
}

/// `ln(a² + b²)` without overflow.
fn ln_hypot_sq(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a.abs() >= b.abs() { (a.abs(), b.abs()) } else { (b.abs(), a.abs()) };
    if hi == 0.0 {
        return f64::NEG_INFINITY;
    }
    let q = lo / hi;
    2.0 * hi.ln() + (q * q).ln_1p()
}

/// Heat kernel `e^{−r²/4t} / (4πt)^{d/2}`.
pub fn gaussian_density(t: f64, r: f64, d: u32) -> LogValue {
    LogValue::from_log(-r * r / (4.0 * t) - 0.5 * d as f64 * (4.0 * PI * t).ln())
}

/// Poisson kernel `c_d t / (r² + t²)^{(d+1)/2}`, `c_d = Γ((d+1)/2) / π^{(d+1)/2}`.
pub fn cauchy_density(t: f64, r: f64, d: u32) -> LogValue {
    let h = 0.5 * (d as f64 + 1.0);
    LogValue::from_log(ln_gamma(h) - h * PI.ln() + t.ln() - h * ln_hypot_sq(r, t))
}

/// `c·t / (r² + t^{1/ϱ})^{(d+2ϱ)/2}` with `c = c1` (lower) and `c = c2` (upper).
pub fn stable_envelope(rho: f64, t: f64, r: f64, d: u32, c1: f64, c2: f64) -> Result<BoundEnvelope> {
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("stable envelope needs 0 < rho < 1, got {rho}"));
    }
    if !(t > 0.0) || !(r >= 0.0) || d == 0 {
        return domain(format!("stable envelope needs t > 0, r >= 0, d >= 1 (t = {t}, r = {r}, d = {d})"));
    }
    if !(c1 > 0.0 && c2 >= c1 && c2.is_finite()) {
        return domain(format!("stable envelope needs 0 < c1 <= c2, got c1 = {c1}, c2 = {c2}"));
    }
    let base = LogValue::from_log(t.ln() / rho).add(LogValue::from_log(2.0 * r.ln()));
    let shape = t.ln() - 0.5 * (d as f64 + 2.0 * rho) * base.log_abs();
    Ok(BoundEnvelope { lower: LogValue::from_log(shape + c1.ln()), upper: LogValue::from_log(shape + c2.ln()) })
}

const F_ABS_TOL: f64 = 1e-10;
const F_MAX_SEGMENTS: usize = 1_000_000;

/// `F(y) = (1/π) ∫_0^∞ e^{−s^{2ϱ}} cos(sy) ds` with an absolute error estimate.
///
/// The range is cut where `e^{−s^{2ϱ}}` underflows and split at the zeros
/// of `cos(sy)`, so each piece has one sign.
pub fn f_profile(rho: f64, y: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho.is_finite()) {
        return domain(format!("F needs rho > 0, got {rho}"));
    }
    let y = y.abs();
    let q = 2.0 * rho;
    if y == 0.0 {
        return Ok((gamma(1.0 + 1.0 / q) / PI, 0.0));
    }
    if !y.is_finite() {
        return domain("F needs finite y");
    }
    let end = 745f64.powf(1.0 / q);
    let half = PI / y;
    let pieces = (end / half + 0.5).ceil();
    if pieces > F_MAX_SEGMENTS as f64 {
        return Err(Error::QuadratureFailure(format!(
            "F({y}) at rho = {rho} needs {pieces:.0} half periods"
        )));
    }
    let f = |s: f64| (-s.powf(q)).exp() * (s * y).cos();
    let mut sum = KahanSum::new();
    let mut err = 0.0;
    let mut a = 0.0;
    let mut k = 0usize;
    while a < end {
        let b = ((k as f64 + 0.5) * half).min(end);
        let piece = adaptive(f, &[a, b], 1e-17, 1e-13, 64);
        sum.add(piece.value);
        err += piece.abs_error;
        a = b;
        k += 1;
    }
    let err = err + 4.0 * f64::EPSILON * sum.abs_sum();
    if err > F_ABS_TOL * PI {
        return Err(Error::QuadratureFailure(format!(
            "F({y}) at rho = {rho}: error estimate {err:e} above tolerance"
        )));
    }
    Ok((sum.value() / PI, err / PI))
}

/// `t^{−1/2ϱ} F(t^{−1/2ϱ} x)`, the one-dimensional kernel for `ϱ ≥ 1`.
/// Sign-changing for `ϱ > 1`.
pub fn higher_order_kernel_1d(rho: f64, t: f64, x: f64) -> Result<LogValue> {
    if !(rho >= 1.0 && rho.is_finite()) {
        return domain(format!("higher-order kernel needs rho >= 1, got {rho}"));
    }
    if !(t > 0.0) || !x.is_finite() {
        return domain(format!("higher-order kernel needs t > 0 and finite x (t = {t}, x = {x})"));
    }
    let ln_scale = -t.ln() / (2.0 * rho);
    let (v, _) = f_profile(rho, ln_scale.exp() * x)?;
    Ok(LogValue::from_f64(v).scale_log(ln_scale))
}

/// `K exp(−ω |y|^{2ϱ/(2ϱ−1)})`, the decay envelope of `F` for `ϱ > 1`.
pub fn f_bound(rho: f64, y: f64, k_const: f64, omega: f64) -> f64 {
    k_const * (-omega * y.abs().powf(2.0 * rho / (2.0 * rho - 1.0))).exp()
}

/// Density `μ_t^ϱ(r)` of the classical problem (no reaction factor).
///
/// Exact for `ϱ = 1`, `ϱ = 1/2` and (in one dimension) `ϱ > 1`; other
/// `ϱ ∈ (0, 1)` yield the envelope with unit constants.
pub fn classical_kernel(rho: f64, dim: u32, t: f64, r: f64) -> Result<KernelValue> {
    if !(t > 0.0) || !(r >= 0.0) {
        return domain(format!("kernel needs t > 0 and r >= 0 (t = {t}, r = {r})"));
    }
    if dim == 0 {
        return domain("dimension must be at least 1");
    }
    if rho == 1.0 {
        Ok(KernelValue::Exact(gaussian_density(t, r, dim)))
    } else if rho == 0.5 {
        Ok(KernelValue::Exact(cauchy_density(t, r, dim)))
    } else if rho > 1.0 {
        if dim != 1 {
            return Err(Error::Unsupported(format!("exact kernel for rho = {rho} > 1 exists only in d = 1, got d = {dim}")));
        }
        Ok(KernelValue::Exact(higher_order_kernel_1d(rho, t, r)?))
    } else {
        Ok(KernelValue::Envelope(stable_envelope(rho, t, r, dim, 1.0, 1.0)?))
    }
}

/// `u_{1,ϱ}(t, r) = e^t μ_t^ϱ(r)`.
pub fn classical_solution(params: &FracParams, t: f64, r: f64) -> Result<KernelValue> {
    params.validate()?;
    if params.alpha != 1.0 {
        return domain(format!("classical solution needs alpha = 1, got {}", params.alpha));
    }
    Ok(classical_kernel(params.rho, params.dim, t, r)?.scale_log(t))
}
