//! Modified Bessel functions of the second kind for integer order.
//!
//! `K_0` and `K_1` are evaluated in three regimes (power series for
//! `z <= 2`, Steed's continued fraction for `2 < z <= 20`, the Hankel
//! asymptotic series beyond) and higher orders follow by upward recurrence,
//! which is stable for `K_n`.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 20.0;
const MAX_TERMS: usize = 500;

/// `K_n(z)` for integer `n >= 0` and finite `z > 0`.
pub fn bessel_k_int(n: u32, z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("K_n(z) requires finite z > 0, got {z}")));
    }
    let (k0, k1) = bessel_k01(z);
    Ok(match n {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for m in 1..n {
                let next = prev + (2.0 * f64::from(m) / z) * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    })
}

/// `(K_0(z), K_1(z))` for `z > 0`.
pub(crate) fn bessel_k01(z: f64) -> (f64, f64) {
    if z <= SERIES_LIMIT {
        k01_series(z)
    } else if z <= ASYMPTOTIC_LIMIT {
        k01_continued_fraction(z)
    } else {
        (k_asymptotic(0, z), k_asymptotic(1, z))
    }
}

fn k01_series(z: f64) -> (f64, f64) {
    let y = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // K_0 = -(ln(z/2) + γ) I_0 + Σ H_k y^k / (k!)²
    // K_1 = 1/z + ln(z/2) I_1 - (z/4) Σ (ψ(k+1) + ψ(k+2)) y^k / (k! (k+1)!)
    let mut term0 = 1.0; // y^k / (k!)²
    let mut term1 = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = 0.0;
    let mut s0 = 0.0;
    let mut i1 = 0.0;
    let mut s1 = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if k > 0 {
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi_k1 = harmonic - EULER_GAMMA;
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        i0 += term0;
        s0 += harmonic * term0;
        i1 += term1;
        s1 += (psi_k1 + psi_k2) * term1;
        if term0 < 1e-18 * i0 && term1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + log_half * (0.5 * z * i1) - 0.25 * z * s1;
    (k0, k1)
}

/// Steed's method (continued fraction CF2 with Temme's normalisation sum) at
/// order zero; accurate to rounding for `z >= 2`.
fn k01_continued_fraction(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Hankel expansion `sqrt(π/2z) e^{-z} Σ a_k(ν) / z^k`, summed until the
/// terms stop shrinking.
fn k_asymptotic(order: u32, z: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (8.0 * kf * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}
