//! Closed-form far-user outage for on-off reflection control.
//!
//! With on-off vectors the `P` branch gains are i.i.d., so the outage is the
//! `P`-th power of a single-branch outage:
//!
//! - single pair (`K = 1`): each branch gain `Q·|v_pᴴ D h_k|²` has density
//!   `2 x^{(Q-1)/2} K_{Q-1}(2√x) / Γ(Q)` and the branch is in outage below
//!   `ξ = Qε / (ρτ)`, giving `1 - 2 ξ^{Q/2} K_Q(2√ξ) / Γ(Q)`;
//! - multiple pairs with `Q = 1`: the branch outage is
//!   `1 - 2√u K_1(2√u) / (1 + ε/τ)^{K-1}` with `u = ε / (ρτ)`, which tends to
//!   the error floor `1 - (1 + ε/τ)^{-(K-1)}` as `ρ → ∞`.
//!
//! Here `ε = 2^R - 1` and `τ = α₁² - ε α₂²`; every evaluator returns exactly 1
//! when `τ <= 0`.

use crate::channel::SystemConfig;
use crate::numerics::{bessel_k_int, gamma_int, EULER_GAMMA};
use crate::{Error, Result};

/// Below this `ξ` the single-branch outage is summed from its small-argument
/// series instead of `1 - (...)`, which would cancel.
const SERIES_XI: f64 = 0.25;

/// Derived quantities shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub epsilon: f64,
    pub tau: f64,
    /// `Q ε / (ρ τ)`; `None` when `τ <= 0`.
    pub xi: Option<f64>,
}

impl AnalyticParams {
    pub fn new(config: &SystemConfig) -> Self {
        let epsilon = config.epsilon();
        let tau = config.alpha1_sq - epsilon * config.alpha2_sq;
        let xi = (tau > 0.0).then(|| config.group_size as f64 * epsilon / (config.snr * tau));
        Self { epsilon, tau, xi }
    }
}

/// Outage of one on-off branch in the single-pair case: `P(gain < ξ)` for
/// the product-Gaussian branch gain with `Q` elements per block.
pub fn onoff_branch_outage(group_size: usize, xi: f64) -> Result<f64> {
    if group_size == 0 {
        return Err(Error::Domain("group size must be positive".into()));
    }
    if xi.is_nan() || xi < 0.0 {
        return Err(Error::Domain(format!("branch threshold must be >= 0, got {xi}")));
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    if xi.is_infinite() {
        return Ok(1.0);
    }
    let value = if xi < SERIES_XI {
        branch_outage_series(group_size, xi)
    } else {
        branch_outage_direct(group_size, xi)?
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `1 - 2 ξ^{Q/2} K_Q(2√ξ) / Γ(Q)`.
pub(crate) fn branch_outage_direct(group_size: usize, xi: f64) -> Result<f64> {
    let q = group_size as f64;
    let k = bessel_k_int(group_size as u32, 2.0 * xi.sqrt())?;
    // log-space keeps ξ^{Q/2} and Γ(Q) in range for large Q.
    let tail = if k > 0.0 {
        (std::f64::consts::LN_2 + 0.5 * q * xi.ln() + k.ln() - ln_factorial(group_size - 1)).exp()
    } else {
        0.0
    };
    Ok(1.0 - tail)
}

/// The same quantity expanded around `ξ = 0` so that no leading 1 cancels.
///
/// From the ascending series of `K_Q`,
/// `F(ξ) = -1/(Q-1)! · [ Σ_{k=1}^{Q-1} (Q-k-1)!/k! (-ξ)^k
///                      + (-1)^Q ξ^Q Σ_{k≥0} (ψ(k+1) + ψ(Q+k+1) - ln ξ) ξ^k / (k!(Q+k)!) ]`.
pub(crate) fn branch_outage_series(group_size: usize, xi: f64) -> f64 {
    let q = group_size;
    let mut finite = 0.0;
    // (Q-k-1)!/k! (-ξ)^k for k = 1..Q-1, built incrementally.
    for k in 1..q {
        let coeff = (ln_factorial(q - k - 1) - ln_factorial(k)).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        finite += sign * coeff * xi.powi(k as i32);
    }

    let ln_xi = xi.ln();
    // ψ(k+1) = H_k - γ and ψ(Q+k+1) = H_{Q+k} - γ.
    let mut h_k = 0.0;
    let mut h_qk: f64 = (1..=q).map(|j| 1.0 / j as f64).sum();
    let mut term = (-ln_factorial(q)).exp(); // ξ^k / (k! (Q+k)!) at k = 0
    let mut tail = 0.0;
    for k in 0..200usize {
        if k > 0 {
            let kf = k as f64;
            term *= xi / (kf * (q as f64 + kf));
            h_k += 1.0 / kf;
            h_qk += 1.0 / (q + k) as f64;
        }
        let add = (h_k + h_qk - 2.0 * EULER_GAMMA - ln_xi) * term;
        tail += add;
        if add.abs() < 1e-18 * tail.abs() {
            break;
        }
    }
    let sign_q = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    let bracket = finite + sign_q * xi.powi(q as i32) * tail;
    -bracket / (gamma_int(q as u64).unwrap_or(f64::INFINITY))
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn require_single_pair(config: &SystemConfig) -> Result<()> {
    config.validate()?;
    if config.beams != 1 {
        return Err(Error::InvalidConfig(format!(
            "the single-pair closed form needs K = 1, got K = {}",
            config.beams
        )));
    }
    Ok(())
}

fn require_multi_pair(config: &SystemConfig) -> Result<()> {
    config.validate()?;
    if config.beams < 2 || config.group_size != 1 {
        return Err(Error::InvalidConfig(format!(
            "the multi-pair closed form needs K >= 2 and Q = 1, got K = {} Q = {}",
            config.beams, config.group_size
        )));
    }
    Ok(())
}

/// Exact single-pair on-off outage, `[1 - 2 ξ^{Q/2} K_Q(2√ξ)/Γ(Q)]^P`.
pub fn lemma1_exact(config: &SystemConfig) -> Result<f64> {
    require_single_pair(config)?;
    let Some(xi) = AnalyticParams::new(config).xi else {
        return Ok(1.0);
    };
    let branch = onoff_branch_outage(config.group_size, xi)?;
    Ok(branch.powi(config.groups as i32))
}

/// High-SNR form of [`lemma1_exact`]: `ξ^N (-ln ξ)^N` for `Q = 1` and
/// `ξ^P / (Q-1)^P` otherwise.
pub fn lemma1_approx(config: &SystemConfig) -> Result<f64> {
    require_single_pair(config)?;
    let Some(xi) = AnalyticParams::new(config).xi else {
        return Err(Error::OutOfRegime("tau <= 0: outage is certain, no high-SNR form".into()));
    };
    let p = config.groups as i32;
    if config.group_size == 1 {
        if xi >= 1.0 {
            return Err(Error::OutOfRegime(format!("xi = {xi} >= 1, -ln(xi) is not positive")));
        }
        Ok((xi * -xi.ln()).powi(p))
    } else {
        Ok((xi / (config.group_size as f64 - 1.0)).powi(p))
    }
}

/// Outage of a single element (`Q = 1`) branch with `K - 1` interfering
/// beams.
pub fn multi_pair_branch_outage(config: &SystemConfig) -> Result<f64> {
    require_multi_pair(config)?;
    let params = AnalyticParams::new(config);
    if params.tau <= 0.0 {
        return Ok(1.0);
    }
    let u = params.epsilon / (config.snr * params.tau);
    let s = 2.0 * u.sqrt();
    let attenuation = (1.0 + params.epsilon / params.tau).powi(-(config.beams as i32 - 1));
    let near = s * bessel_k_int(1, s)?;
    Ok((1.0 - near * attenuation).clamp(0.0, 1.0))
}

/// Exact multi-pair on-off outage with `Q = 1`.
pub fn lemma2_exact(config: &SystemConfig) -> Result<f64> {
    Ok(multi_pair_branch_outage(config)?.powi(config.elements as i32))
}

/// SNR-independent error floor `(1 - (1 + ε/τ)^{-(K-1)})^N`.
pub fn lemma2_floor(config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    if config.beams < 2 {
        return Err(Error::InvalidConfig("the error floor needs K >= 2".into()));
    }
    let params = AnalyticParams::new(config);
    if params.tau <= 0.0 {
        return Ok(1.0);
    }
    let attenuation = (1.0 + params.epsilon / params.tau).powi(-(config.beams as i32 - 1));
    Ok((1.0 - attenuation).powi(config.elements as i32))
}

/// Closed-form on-off outage where one exists: single pair with any `Q`, or
/// multiple pairs with `Q = 1`.
pub fn closed_form_outage(config: &SystemConfig) -> Option<Result<f64>> {
    match (config.beams, config.group_size) {
        (1, _) => Some(lemma1_exact(config)),
        (k, 1) if k >= 2 => Some(lemma2_exact(config)),
        _ => None,
    }
}

/// Error floor where the multi-pair closed form applies.
pub fn error_floor(config: &SystemConfig) -> Option<Result<f64>> {
    (config.beams >= 2 && config.group_size == 1).then(|| lemma2_floor(config))
}

/// Density of the single-pair branch gain `Q·|v_pᴴ D h_k|²`:
/// `2 x^{(Q-1)/2} K_{Q-1}(2√x) / Γ(Q)`.
///
/// For `Q = 1` the density diverges logarithmically at 0, so `x` must be
/// positive; for `Q >= 2` the limit `1/(Q-1)` is returned at `x = 0`.
pub fn branch_pdf(group_size: usize, x: f64) -> Result<f64> {
    if group_size == 0 {
        return Err(Error::Domain("group size must be positive".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("density argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return if group_size == 1 {
            Err(Error::Domain("the Q = 1 density diverges at 0".into()))
        } else {
            Ok(1.0 / (group_size as f64 - 1.0))
        };
    }
    let order = (group_size - 1) as u32;
    let k = bessel_k_int(order, 2.0 * x.sqrt())?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let q = group_size as f64;
    Ok((std::f64::consts::LN_2 + 0.5 * (q - 1.0) * x.ln() + k.ln() - ln_factorial(group_size - 1)).exp())
}

/// Least-squares slope of `-log10(outage)` against `log10(ρ)` on a 1 dB grid
/// (at least five points) spanning `[rho_low_db, rho_high_db]`.
pub fn diversity_slope<F>(outage_fn: F, rho_low_db: f64, rho_high_db: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if rho_high_db.is_nan() || rho_low_db.is_nan() || rho_high_db <= rho_low_db {
        return Err(Error::Domain("diversity slope needs rho_high > rho_low".into()));
    }
    let points = ((rho_high_db - rho_low_db).ceil() as usize + 1).max(5);
    let step = (rho_high_db - rho_low_db) / (points - 1) as f64;
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let db = rho_low_db + step * i as f64;
        let p = outage_fn(db)?;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("outage {p} at {db} dB is not positive")));
        }
        xs.push(db / 10.0);
        ys.push(-p.log10());
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
