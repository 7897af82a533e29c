//! Subordination of the classical solution by the Wright density:
//!
//! `u_{α,ϱ}(t, r) = t^{−α} ∫_0^∞ e^s μ_s^ϱ(r) W_{−α,1−α}(−t^{−α} s) ds`.
//!
//! The integral is taken in `v = ln s`, where the log-integrand is unimodal
//! for the exact kernels. The peak is located by a coarse scan plus
//! golden-section search, the range is cut where the log-integrand falls
//! `|tail_cut_log|` below the peak, and 32-point Gauss–Legendre panels are
//! doubled until the log-sum-exp settles. Nothing is exponentiated outside
//! a panel, so `e^s` factors far beyond `f64` range are harmless.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{classical_kernel, stable_envelope, BoundEnvelope, FracParams, KernelValue};
use crate::quad::log_panel;
use crate::specfun::{log_wright_neg, LogValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_panels: usize,
    pub peak_search_iters: usize,
    /// Log-distance below the peak at which the integrand is dropped.
    pub tail_cut_log: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-6, max_panels: 4096, peak_search_iters: 80, tail_cut_log: -40.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if !(self.tail_cut_log < 0.0) {
            return domain(format!("tail_cut_log must be negative, got {}", self.tail_cut_log));
        }
        if self.max_panels < 8 {
            return domain("max_panels must be at least 8");
        }
        Ok(())
    }
}

const INITIAL_PANELS: usize = 8;
const SCAN_STEP: f64 = 0.1;
const MAX_EXPANSIONS: usize = 60;
/// `ln s` below which the integrand is expected to have decayed.
const MIN_LN_S: f64 = -700.0;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Signed-log integrand in `v = ln s`, with the first error raised by the
/// underlying function kept aside so the quadrature can run on plain values.
struct Integrand<F> {
    f: F,
    error: RefCell<Option<Error>>,
}

impl<F: Fn(f64) -> Result<LogValue>> Integrand<F> {
    fn eval(&self, v: f64) -> LogValue {
        match (self.f)(v) {
            Ok(x) if x.log_abs().is_nan() => {
                self.fail(Error::QuadratureFailure(format!("integrand is NaN at ln s = {v}")));
                LogValue::ZERO
            }
            Ok(x) => x,
            Err(e) => {
                self.fail(e);
                LogValue::ZERO
            }
        }
    }

    fn level(&self, v: f64) -> f64 {
        self.eval(v).log_abs()
    }

    fn fail(&self, e: Error) {
        self.error.borrow_mut().get_or_insert(e);
    }

    fn check(&self) -> Result<()> {
        match self.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// `∫ exp(f(v)) dv` over the real line for a unimodal signed-log `f`.
/// `centre` seeds the peak bracket `[centre − ln 4, centre + ln 4]`.
fn integrate_log<F: Fn(f64) -> Result<LogValue>>(f: F, centre: f64, spec: &QuadratureSpec) -> Result<LogValue> {
    spec.validate()?;
    let h = Integrand { f, error: RefCell::new(None) };

    // coarse scan, widening the bracket while the maximum sits on an edge
    let width = 4f64.ln();
    let (mut lo, mut hi) = (centre - width, centre + width);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for _ in 0..MAX_EXPANSIONS {
        let n = ((hi - lo) / SCAN_STEP).ceil() as usize;
        let step = (hi - lo) / n as f64;
        best = (f64::NAN, f64::NEG_INFINITY);
        let mut at = 0;
        for i in 0..=n {
            let v = lo + step * i as f64;
            let g = h.level(v);
            if g > best.1 {
                best = (v, g);
                at = i;
            }
        }
        h.check()?;
        if best.1 == f64::NEG_INFINITY {
            lo -= width;
            hi += width;
            continue;
        }
        if at == 0 {
            lo -= width * (hi - lo) / (2.0 * width);
        } else if at == n {
            hi += width * (hi - lo) / (2.0 * width);
        } else {
            lo = best.0 - step;
            hi = best.0 + step;
            break;
        }
    }
    if !best.1.is_finite() {
        return Err(Error::QuadratureFailure(format!("no finite peak of the subordination integrand (best {})", best.1)));
    }

    // golden-section refinement inside the scan cell
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (h.level(c), h.level(d));
    for _ in 0..spec.peak_search_iters {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = h.level(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = h.level(d);
        }
        if b - a < 1e-10 * (1.0 + a.abs()) {
            break;
        }
    }
    h.check()?;
    let (peak_v, peak) = if gc.max(gd) > best.1 { if gc >= gd { (c, gc) } else { (d, gd) } } else { best };

    // walk outwards until the integrand stays below the cut
    let floor = peak + spec.tail_cut_log;
    let edge = |dir: f64| -> Result<f64> {
        let mut step = 0.5;
        let mut v = peak_v;
        for _ in 0..200 {
            v += dir * step;
            if v < MIN_LN_S {
                break;
            }
            let quiet = (0..3).all(|j| h.level(v + dir * 0.3 * j as f64) < floor);
            h.check()?;
            if quiet {
                return Ok(v + dir * 0.6);
            }
            step = (step * 1.5).min(64.0);
        }
        Err(Error::QuadratureFailure(format!("subordination integrand does not decay (ln s = {v})")))
    };
    let v_lo = edge(-1.0)?;
    let v_hi = edge(1.0)?;

    let sum_panels = |n: usize| -> LogValue {
        let w = (v_hi - v_lo) / n as f64;
        let mut eval = |v: f64| h.eval(v);
        (0..n).fold(LogValue::ZERO, |acc, i| {
            let a = v_lo + w * i as f64;
            acc.add(log_panel(&mut eval, a, a + w))
        })
    };
    let mut n = INITIAL_PANELS;
    let mut prev = sum_panels(n);
    h.check()?;
    while 2 * n <= spec.max_panels {
        n *= 2;
        let next = sum_panels(n);
        h.check()?;
        let change = next.sub(prev);
        if change.is_zero() || change.log_abs() - next.log_abs() < (spec.rel_tol / 4.0).ln() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure(format!("panel budget {} exhausted", spec.max_panels)))
}

fn check_alpha_t(alpha: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("subordination needs 0 < alpha < 1, got {alpha}"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("subordination needs t > 0, got {t}"));
    }
    Ok(())
}

/// Signed-log `t^{−α} e^s W_{−α,1−α}(−t^{−α} s)·s` at `s = e^v`: the part of
/// the integrand shared by every quantity here, including the `ds = s dv`
/// Jacobian.
fn wright_weight(alpha: f64, ln_t: f64, v: f64) -> Result<LogValue> {
    let s = v.exp();
    let w = log_wright_neg(alpha, 1.0 - alpha, -(v - alpha * ln_t).exp())?;
    Ok(w.scale_log(s + v - alpha * ln_t))
}

/// `u_{α,ϱ}(t, r)` for the exact kernels (`ϱ = 1`, `ϱ = 1/2`, and `ϱ > 1` in
/// one dimension). `α = 1` returns the classical solution directly.
pub fn subordinate(params: &FracParams, t: f64, r: f64, spec: &QuadratureSpec) -> Result<LogValue> {
    params.validate()?;
    if !(r >= 0.0 && r.is_finite()) {
        return domain(format!("radius must be finite and >= 0, got {r}"));
    }
    if params.alpha == 1.0 {
        return match classical_kernel(params.rho, params.dim, t, r)? {
            KernelValue::Exact(v) => Ok(v.scale_log(t)),
            KernelValue::Envelope(_) => Err(envelope_only(params.rho)),
        };
    }
    check_alpha_t(params.alpha, t)?;
    if let KernelValue::Envelope(_) = classical_kernel(params.rho, params.dim, 1.0, r)? {
        return Err(envelope_only(params.rho));
    }
    if r == 0.0 && params.dim as f64 >= 2.0 * params.rho {
        // μ_s(0) ~ s^{−d/2ϱ} is not integrable at s = 0
        return Err(Error::Overflow(format!(
            "u is infinite at the origin when d >= 2 rho (d = {}, rho = {})",
            params.dim, params.rho
        )));
    }
    let ln_t = t.ln();
    let alpha = params.alpha;
    let f = |v: f64| -> Result<LogValue> {
        let k = match classical_kernel(params.rho, params.dim, v.exp(), r)? {
            KernelValue::Exact(k) => k,
            KernelValue::Envelope(_) => return Err(envelope_only(params.rho)),
        };
        if k.is_zero() {
            return Ok(LogValue::ZERO);
        }
        Ok(wright_weight(alpha, ln_t, v)?.mul(k))
    };
    integrate_log(f, peak_seed(t, r), spec)
}

fn envelope_only(rho: f64) -> Error {
    Error::Unsupported(format!("no exact kernel for rho = {rho}; use the envelope route"))
}

/// Starting guess for the peak in `ln s`: the bracket `[t/4, 4t]`, moved out
/// when the radius dominates.
fn peak_seed(t: f64, r: f64) -> f64 {
    t.max(r).max(1e-300).ln()
}

/// `t^{−α} ∫_0^∞ e^s W_{−α,1−α}(−t^{−α} s) ds`, the spatial mass of
/// `u_{α,ϱ}(t, ·)`; equals `E_α(t^α)`.
pub fn total_mass(alpha: f64, t: f64, spec: &QuadratureSpec) -> Result<LogValue> {
    check_alpha_t(alpha, t)?;
    let ln_t = t.ln();
    integrate_log(|v| wright_weight(alpha, ln_t, v), peak_seed(t, 0.0), spec)
}

/// Subordinated stable envelope with unit constants.
pub fn subordinate_envelope(alpha: f64, rho: f64, d: u32, t: f64, r: f64, spec: &QuadratureSpec) -> Result<BoundEnvelope> {
    subordinate_envelope_with(alpha, rho, d, t, r, 1.0, 1.0, spec)
}

/// Subordinated stable envelope `c1·I ≤ u ≤ c2·I`; the two sides share the
/// integral `I` since they differ only by a constant.
#[allow(clippy::too_many_arguments)]
pub fn subordinate_envelope_with(
    alpha: f64,
    rho: f64,
    d: u32,
    t: f64,
    r: f64,
    c1: f64,
    c2: f64,
    spec: &QuadratureSpec,
) -> Result<BoundEnvelope> {
    check_alpha_t(alpha, t)?;
    stable_envelope(rho, 1.0, r, d, c1, c2)?;
    if r == 0.0 && d as f64 >= 2.0 * rho {
        return Err(Error::Overflow(format!("envelope is infinite at the origin when d >= 2 rho (d = {d}, rho = {rho})")));
    }
    let ln_t = t.ln();
    let f = |v: f64| -> Result<LogValue> {
        let k = stable_envelope(rho, v.exp(), r, d, 1.0, 1.0)?.lower;
        Ok(wright_weight(alpha, ln_t, v)?.mul(k))
    };
    let i = integrate_log(f, peak_seed(t, r), spec)?;
    Ok(BoundEnvelope { lower: i.scale_log(c1.ln()), upper: i.scale_log(c2.ln()) })
}
