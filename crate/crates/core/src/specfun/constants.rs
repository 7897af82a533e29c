use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

/// `γ_α = (1−α) α^{α/(1−α)}`, the decay rate of `W_{−α,1}(−t^{1−α})` in `t`.
///
/// Lies in `(0, 1)` for `α ∈ (0, 1)`; `NaN` outside that range.
pub fn gamma_alpha(alpha: f64) -> f64 {
    if !(alpha > 0.0 && alpha < 1.0) {
        return f64::NAN;
    }
    (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha))
}

/// Smallest integer strictly greater than `(2/γ_α)^{(1−α)/α}`.
pub fn m_alpha(alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("m_alpha needs 0 < alpha < 1, got {alpha}"));
    }
    let bound = (2.0 / gamma_alpha(alpha)).powf((1.0 - alpha) / alpha);
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return Err(Error::Overflow(format!("M_alpha threshold {bound:e} exceeds u64 at alpha = {alpha}")));
    }
    Ok(bound.floor() as u64 + 1)
}

/// The Dottie number: the fixed point of `cos` in `(0, π/2)`.
pub fn dottie() -> f64 {
    static DOTTIE: OnceLock<f64> = OnceLock::new();
    *DOTTIE.get_or_init(|| {
        // damped iteration x ← (x + cos x)/2 contracts with factor ≤ 0.84,
        // then Newton polishes the last digits
        let mut x: f64 = 1.0;
        for _ in 0..200 {
            let next = 0.5 * (x + x.cos());
            if (next - x).abs() < 1e-15 {
                x = next;
                break;
            }
            x = next;
        }
        for _ in 0..3 {
            x -= (x.cos() - x) / (-x.sin() - 1.0);
        }
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_alpha_values() {
        assert!((gamma_alpha(0.5) - 0.25).abs() < 1e-16);
        assert!((gamma_alpha(0.75) - 0.105_468_75).abs() < 1e-16);
        assert!(gamma_alpha(0.999) < 1e-3);
        assert!(gamma_alpha(1.0).is_nan());
    }

    #[test]
    fn m_alpha_values() {
        assert_eq!(m_alpha(0.5).unwrap(), 9);
        assert_eq!(m_alpha(0.75).unwrap(), 3);
        assert!(matches!(m_alpha(0.01), Err(Error::Overflow(_))));
        assert!(m_alpha(0.0).is_err());
    }

    #[test]
    fn dottie_solves_fixed_point() {
        let l = dottie();
        assert!((l.cos() - l).abs() < 1e-14);
        assert!(l > 0.0 && l < std::f64::consts::FRAC_PI_2);
        assert!((l - 0.739_085_133_2).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn gamma_alpha_in_unit_interval(alpha in 0.001f64..0.999) {
            let g = gamma_alpha(alpha);
            prop_assert!(g > 0.0 && g < 1.0);
        }

        #[test]
        fn m_alpha_at_least_two(alpha in 0.05f64..0.999) {
            let m = m_alpha(alpha).unwrap();
            prop_assert!(m >= 2);
            let bound = (2.0 / gamma_alpha(alpha)).powf((1.0 - alpha) / alpha);
            prop_assert!((m as f64) > bound && ((m - 1) as f64) <= bound);
        }
    }
}
