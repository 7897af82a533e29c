//! Quadrature and summation primitives used throughout the crate.
//!
//! Two integrators live here: an adaptive Gauss–Kronrod (10/21) scheme with
//! global error control for ordinary integrands, and a fixed 32-point
//! Gauss–Legendre panel rule that accumulates integrands given in signed
//! log form.

use std::sync::OnceLock;

use crate::specfun::LogValue;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
    abs_sum: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of the magnitudes of everything added so far; the rounding error
    /// of the compensated sum is a small multiple of `EPSILON` times this.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_847_082_196,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_748,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Adaptive Gauss–Kronrod integration of `f` over the polyline through
/// `points` (at least two, increasing). Bisects the worst segment until the
/// summed error estimate drops below `max(abs_tol, rel_tol·|I|)` or
/// `max_segments` is reached; in the latter case `converged` is false and
/// the best estimate is still returned.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    assert!(points.len() >= 2, "need at least one interval");
    let mut segs: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * segs.len();
    loop {
        let mut total = KahanSum::new();
        let mut err = 0.0;
        for s in &segs {
            total.add(s.value);
            err += s.error;
        }
        let value = total.value();
        let target = abs_tol.max(rel_tol * value.abs());
        if err <= target || segs.is_empty() {
            return Integral { value, abs_error: err, evaluations, converged: true };
        }
        if segs.len() >= max_segments {
            return Integral { value, abs_error: err, evaluations, converged: false };
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval can no longer be split in floating point
            return Integral { value, abs_error: err, evaluations, converged: false };
        }
        segs.push(gk21(&mut f, s.a, mid));
        segs.push(gk21(&mut f, mid, s.b));
        evaluations += 42;
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(32))
}

/// 32-point Gauss–Legendre on `[a, b]` for an integrand supplied in signed
/// log form; the result is returned in the same form and never overflows.
pub fn log_panel<F: FnMut(f64) -> LogValue>(h: &mut F, a: f64, b: f64) -> LogValue {
    let (nodes, weights) = gl32();
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let vals: Vec<LogValue> = nodes.iter().map(|x| h(centre + half * x)).collect();
    let peak = vals
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.log_abs())
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return LogValue::ZERO;
    }
    if peak == f64::INFINITY {
        return LogValue::pos_infinity();
    }
    let mut acc = KahanSum::new();
    for (v, w) in vals.iter().zip(weights) {
        if v.is_zero() {
            continue;
        }
        acc.add(w * v.signum() * (v.log_abs() - peak).exp());
    }
    LogValue::from_f64(acc.value() * half).scale_log(peak)
}
