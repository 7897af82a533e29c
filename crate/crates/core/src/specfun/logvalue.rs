use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Neg => -1.0,
            Sign::Zero => 0.0,
            Sign::Pos => 1.0,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }
}

/// A real number stored as `sign · exp(log_abs)`.
///
/// Zero is represented with `log_abs = −∞`; `log_abs = +∞` encodes a
/// genuinely infinite quantity (e.g. a kernel evaluated at a singular point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    sign: Sign,
    log_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: Sign::Zero, log_abs: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { sign: Sign::Pos, log_abs: 0.0 };

    pub fn new(sign: Sign, log_abs: f64) -> Self {
        if sign == Sign::Zero || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { sign, log_abs }
        }
    }

    /// Positive value with the given logarithm.
    pub fn from_log(log_abs: f64) -> Self {
        Self::new(Sign::Pos, log_abs)
    }

    pub fn pos_infinity() -> Self {
        LogValue { sign: Sign::Pos, log_abs: f64::INFINITY }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogValue { sign: Sign::Pos, log_abs: x.ln() }
        } else {
            LogValue { sign: Sign::Neg, log_abs: (-x).ln() }
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn signum(&self) -> f64 {
        self.sign.as_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// True when the value is a finite nonzero number in log form.
    pub fn is_finite(&self) -> bool {
        self.sign != Sign::Zero && self.log_abs.is_finite()
    }

    /// Converts back to `f64`; may overflow to ±∞ or underflow to 0.
    pub fn to_f64(&self) -> f64 {
        self.sign.as_f64() * self.log_abs.exp()
    }

    /// Multiply by `exp(delta)`.
    pub fn scale_log(self, delta: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.sign, self.log_abs + delta)
        }
    }

    pub fn mul(self, other: LogValue) -> Self {
        Self::new(self.sign.times(other.sign), self.log_abs + other.log_abs)
    }

    pub fn div(self, other: LogValue) -> Self {
        assert!(!other.is_zero(), "division by a zero LogValue");
        Self::new(self.sign.times(other.sign), self.log_abs - other.log_abs)
    }

    pub fn neg(self) -> Self {
        let sign = match self.sign {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
        };
        LogValue { sign, log_abs: self.log_abs }
    }

    /// Signed log-sum-exp.
    pub fn add(self, other: LogValue) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs { (self, other) } else { (other, self) };
        if big.log_abs == f64::INFINITY {
            return big;
        }
        let ratio = (small.log_abs - big.log_abs).exp();
        if big.sign == small.sign {
            Self::new(big.sign, big.log_abs + ratio.ln_1p())
        } else if ratio == 1.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.log_abs + (-ratio).ln_1p())
        }
    }

    pub fn sub(self, other: LogValue) -> Self {
        self.add(other.neg())
    }

    /// Order by the represented real value.
    pub fn cmp_value(&self, other: &LogValue) -> Ordering {
        let rank = |s: Sign| match s {
            Sign::Neg => 0,
            Sign::Zero => 1,
            Sign::Pos => 2,
        };
        match rank(self.sign).cmp(&rank(other.sign)) {
            Ordering::Equal => match self.sign {
                Sign::Zero => Ordering::Equal,
                Sign::Pos => self.log_abs.total_cmp(&other.log_abs),
                Sign::Neg => other.log_abs.total_cmp(&self.log_abs),
            },
            o => o,
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Pos => "+",
            Sign::Neg => "-",
            Sign::Zero => "0",
        };
        write!(f, "({s}, {})", self.log_abs)
    }
}

#[derive(Serialize, Deserialize)]
struct LogValueRepr {
    sign: Sign,
    #[serde(with = "crate::specfun::extended_float")]
    log_abs: f64,
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LogValueRepr { sign: self.sign, log_abs: self.log_abs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LogValueRepr::deserialize(d)?;
        Ok(LogValue::new(r.sign, r.log_abs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_normalised() {
        assert_eq!(LogValue::new(Sign::Pos, f64::NEG_INFINITY), LogValue::ZERO);
        assert_eq!(LogValue::new(Sign::Zero, 3.0).log_abs(), f64::NEG_INFINITY);
        assert_eq!(LogValue::from_f64(0.0), LogValue::ZERO);
    }

    #[test]
    fn exact_cancellation_gives_zero() {
        let a = LogValue::from_f64(2.5);
        assert!(a.sub(a).is_zero());
    }

    #[test]
    fn huge_values_stay_representable() {
        let big = LogValue::from_log(5000.0);
        let sum = big.add(big);
        assert!((sum.log_abs() - 5000.0 - 2f64.ln()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn multiplication_composes(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            prop_assume!(a != 0.0 && b != 0.0);
            let p = LogValue::from_f64(a).mul(LogValue::from_f64(b));
            prop_assert_eq!(p.signum(), (a * b).signum());
            prop_assert!((p.log_abs() - (a.abs().ln() + b.abs().ln())).abs() < 1e-12);
        }

        #[test]
        fn addition_matches_f64(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let s = LogValue::from_f64(a).add(LogValue::from_f64(b)).to_f64();
            prop_assert!((s - (a + b)).abs() <= 1e-12 * (a.abs() + b.abs()).max(1e-300));
        }

        #[test]
        fn ordering_matches_f64(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let o = LogValue::from_f64(a).cmp_value(&LogValue::from_f64(b));
            prop_assert_eq!(o, a.partial_cmp(&b).unwrap());
        }
    }
}
