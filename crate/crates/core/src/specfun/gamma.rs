use std::f64::consts::PI;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sin(πx)` with exact zeros at the integers.
pub fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut r = x % 2.0;
    if r < 0.0 {
        r += 2.0;
    }
    // r in [0, 2)
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    if r == 0.0 {
        return 0.0;
    }
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    sign * v
}

/// Lanczos sum and `t = x + g − 1/2` for `x ≥ 1/2`, with `x` already shifted.
fn lanczos(x: f64) -> (f64, f64) {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (a, x + LANCZOS_G + 0.5)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `ln|Γ(x)|`; `+∞` at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI.ln() - sinpi(x).abs().ln() - ln_gamma(1.0 - x);
    }
    let (a, t) = lanczos(x);
    LN_SQRT_2PI + (x - 0.5) * t.ln() - t + a.ln()
}

/// `Γ(x)`; `NaN` at the poles, `±∞` on overflow.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        let s = sinpi(x);
        return PI / (s * gamma(1.0 - x));
    }
    if x > 140.0 {
        return ln_gamma(x).exp();
    }
    if x == x.floor() && x <= 23.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let (a, t) = lanczos(x);
    (2.0 * PI).sqrt() * t.powf(x - 0.5) * (-t).exp() * a
}

/// `1/Γ(x)`, an entire function: exactly zero at `0, −1, −2, …`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        if x < 150.0 {
            return 1.0 / gamma(x);
        }
        return (-ln_gamma(x)).exp();
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1−x) / π
    let s = sinpi(x);
    let y = 1.0 - x;
    if y < 150.0 {
        s * gamma(y) / PI
    } else {
        s.signum() * (s.abs().ln() + ln_gamma(y) - PI.ln()).exp()
    }
}

/// Lower incomplete gamma `γ(s, x)` by its power series, for `s > 0`.
fn lower_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..10_000 {
        term *= x / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (s * x.ln() - x).exp()
}

/// `Γ(s, x)` by the Legendre continued fraction (modified Lentz).
fn upper_cf(s: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * x.ln() - x).exp() * h
}

/// Exponential integral `E₁(x)` for small positive `x`.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ e^{−σ} σ^{s−1} dσ` for real `s`.
pub fn gamma_upper_incomplete(s: f64, x: f64) -> Result<f64> {
    if !s.is_finite() || !(x >= 0.0) {
        return domain(format!("gamma_upper_incomplete needs finite s and x >= 0, got s={s}, x={x}"));
    }
    if x == 0.0 {
        if s > 0.0 {
            return Ok(gamma(s));
        }
        return domain(format!("Γ(s, 0) diverges for s = {s} <= 0"));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x >= 1.1 && x >= s + 1.0 {
        return Ok(upper_cf(s, x));
    }
    if s > 0.0 {
        if x < s + 1.0 {
            return Ok(gamma(s) - lower_series(s, x));
        }
        return Ok(upper_cf(s, x));
    }
    if x >= 1.1 {
        return Ok(upper_cf(s, x));
    }
    // s <= 0 and small x: start above zero and recur downward with
    // Γ(s, x) = (Γ(s+1, x) − x^s e^{−x}) / s.
    let shift = (-s).floor();
    let frac = s + shift;
    let (mut g, mut a) = if frac == 0.0 {
        (e1_series(x), 0.0)
    } else {
        let a = frac + 1.0;
        (gamma(a) - lower_series(a, x), a)
    };
    let target = s;
    while a - 1.0 >= target - 1e-12 {
        let next = a - 1.0;
        g = (g - (next * x.ln() - x).exp()) / next;
        a = next;
    }
    Ok(g)
}
