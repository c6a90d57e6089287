//! Independent oracles for the integration and acceptance tests.
#![allow(dead_code)]

use irs_noma::channel::SystemConfig;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * KRONROD_NODES[i]) + f(c + h * KRONROD_NODES[i]);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive G7/K15 quadrature on `[a, b]`, refined until the summed
/// error estimate is below `rel_tol · |integral|` (or `1e-300`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut intervals = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let error: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if error <= rel_tol * total.abs() || error < 1e-300 {
            break;
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(&f, lo, mid)));
        intervals.push((mid, hi, gk15(&f, mid, hi)));
    }
    // Sum small contributions first.
    let mut parts: Vec<f64> = intervals.iter().map(|iv| iv.2 .0).collect();
    parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    parts.iter().sum()
}

/// `∫_a^∞ f` through `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> f64 {
    integrate(
        |t| {
            let s = 1.0 - t;
            let v = f(a + t / s);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        },
        0.0,
        1.0,
        rel_tol,
    )
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `K_n(z) = ∫_0^∞ exp(-z cosh t) cosh(n t) dt`, evaluated in log space and
/// cut where the integrand is below `1e-40` of its peak.
pub fn bessel_k_quadrature(n: u32, z: f64) -> f64 {
    let n = n as f64;
    let log_integrand = |t: f64| -z * t.cosh() + n * t;
    // Peak of -z cosh t + n t sits at sinh t = n / z.
    let peak = (n / z).asinh();
    let log_peak = log_integrand(peak);
    let mut upper = peak + 1.0;
    while log_integrand(upper) - log_peak > -92.0 {
        upper += 1.0;
    }
    // Factor the peak out so the quadrature sees O(1) values.
    let scaled = integrate(
        |t| {
            let mut v = (log_integrand(t) - log_peak).exp();
            if n > 0.0 {
                v *= 0.5 * (1.0 + (-2.0 * n * t).exp());
            }
            v
        },
        0.0,
        upper,
        1e-14,
    );
    scaled * log_peak.exp()
}

/// CDF of `E · S` with `E ~ Exp(1)` and `S ~ Gamma(q, 1)` independent: the
/// law of an on-off branch gain, built without Bessel functions.
pub fn product_gain_cdf(q: usize, x: f64) -> f64 {
    let norm = factorial(q - 1);
    integrate_to_infinity(
        |s| {
            if s == 0.0 {
                return 0.0;
            }
            (1.0 - (-x / s).exp()) * s.powi(q as i32 - 1) * (-s).exp() / norm
        },
        0.0,
        1e-12,
    )
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.001.
pub fn ks_critical_001(n: usize) -> f64 {
    1.949_5 / (n as f64).sqrt()
}

/// Default reference configuration: M = 4, α₁² = 0.8, α₂² = 0.2.
pub fn config(beams: usize, elements: usize, group_size: usize, rate: f64, snr_db: f64) -> SystemConfig {
    SystemConfig::reference(beams, elements, group_size, rate, snr_db)
}
