//! Real-argument special functions: Mittag-Leffler, Wright (negative first
//! parameter), reciprocal and upper incomplete gamma, together with the
//! scalar constants that set the invasion thresholds.

mod constants;
pub(crate) mod estimates;
mod gamma;
mod logvalue;
pub(crate) mod mittag_leffler;
mod wright;

use serde::{Deserialize, Serialize};

pub use constants::{dottie, gamma_alpha, m_alpha};
pub use estimates::{estimate_compare, ml_estimate_rhs, EstimateComparison, EstimateKind, Verdict};
pub use gamma::{gamma, gamma_upper_incomplete, ln_gamma, reciprocal_gamma, sinpi};
pub use logvalue::{LogValue, Sign};
pub use mittag_leffler::{
    log_mittag_leffler, log_mittag_leffler_general, mittag_leffler, mittag_leffler_deriv,
};
pub use wright::{log_wright_neg, log_wright_tail, wright_neg, wright_tail_constant};

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    TaylorSeries,
    AsymptoticPos,
    AsymptoticNeg,
    Quadrature,
}

/// A value with an absolute error bound and the route that produced it.
///
/// Series bounds are rigorous up to floating-point rounding (first omitted
/// term plus a rounding allowance); asymptotic bounds use the magnitude of
/// the first omitted term; quadrature bounds are the integrator's estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_bound: f64,
    pub terms_used: usize,
    pub regime: Regime,
}

/// Regime switch points and iteration limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    /// `|z|` below which the Taylor series is attempted on the negative axis.
    pub series_cutoff: f64,
    /// `|z|` from which asymptotic expansions are used.
    pub asym_cutoff: f64,
    pub max_terms: usize,
    /// Relative accuracy target for series and quadrature routes.
    pub target_tol: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy { series_cutoff: 10.0, asym_cutoff: 25.0, max_terms: 10_000, target_tol: 1e-14 }
    }
}

impl EvalPolicy {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.series_cutoff > 0.0 && self.asym_cutoff > 0.0 && self.series_cutoff <= self.asym_cutoff) {
            return crate::error::domain("EvalPolicy requires 0 < series_cutoff <= asym_cutoff");
        }
        if !(self.target_tol > 0.0) || self.max_terms == 0 {
            return crate::error::domain("EvalPolicy requires target_tol > 0 and max_terms > 0");
        }
        Ok(())
    }
}

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`
/// and `"nan"` so that JSON output round-trips bit-exactly.
pub mod extended_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("invalid float literal {other:?}"))),
            },
        }
    }
}
