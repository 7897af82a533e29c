//! Fundamental solutions of the space-time fractional reaction-diffusion
//! equation `∂_t^α u + (−Δ)^ϱ u = u` with a Dirac initial datum, and the
//! tooling to study how `u(t, θ(t))` behaves along growing radii.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Mittag-Leffler and Wright functions, reciprocal and
//!   incomplete gamma, the scalar constants `γ_α`, `M_α` and the Dottie number.
//! * [`kernels`]: classical (`α = 1`) kernels for every diffusion order.
//! * [`subordination`]: log-domain quadrature of the Wright subordination
//!   integral.
//! * [`fourier1d`]: the one-dimensional alternating Fourier series for `ϱ ≥ 1`.
//! * [`invasion`]: trajectories along speed profiles and their classification.
//! * [`verify`]: executable identity and inequality suites.

pub mod error;
pub mod fourier1d;
pub mod invasion;
pub mod kernels;
pub mod quad;
pub mod specfun;
pub mod subordination;
pub mod verify;

mod oracle;

pub use error::{Error, Result};
pub use specfun::{EvalPolicy, EvalResult, LogValue, Regime, Sign};
