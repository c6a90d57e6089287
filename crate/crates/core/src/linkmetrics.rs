//! Far-user SINR and the outage predicate.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, SystemConfig};
use crate::irs_control::ReflectVector;
use crate::numerics::inner;
use crate::{Error, Result};

/// Channel gains seen through one reflection vector `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedGains {
    /// `|θᴴ D h_k|²` for the served beam.
    pub served: f64,
    /// `Σ_{i≠k} |θᴴ D h_i|²`.
    pub inter_pair: f64,
}

impl ProjectedGains {
    pub fn project(theta: &[Complex64], real: &ChannelRealization) -> Result<Self> {
        if theta.len() != real.elements() {
            return Err(Error::Dimension(format!(
                "reflection vector has {} entries, IRS has {}",
                theta.len(),
                real.elements()
            )));
        }
        let served = inner(theta, real.served_cascade()).norm_sqr();
        let inter_pair = real.interfering_cascades().map(|c| inner(theta, c).norm_sqr()).sum();
        Ok(Self { served, inter_pair })
    }
}

/// The terms of the far-user SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub useful: f64,
    pub self_interference: f64,
    pub inter_pair: f64,
    pub noise: f64,
    pub sinr: f64,
}

impl SinrBreakdown {
    pub fn from_gains(gains: ProjectedGains, config: &SystemConfig) -> Self {
        let useful = gains.served * config.alpha1_sq;
        let self_interference = gains.served * config.alpha2_sq;
        let noise = 1.0 / config.snr;
        let sinr = useful / (self_interference + gains.inter_pair + noise);
        Self {
            useful,
            self_interference,
            inter_pair: gains.inter_pair,
            noise,
            sinr,
        }
    }
}

/// SINR at which the far user decodes its own message through `theta`.
pub fn sinr_far(theta: &ReflectVector, real: &ChannelRealization, config: &SystemConfig) -> Result<SinrBreakdown> {
    let gains = ProjectedGains::project(&theta.values, real)?;
    Ok(SinrBreakdown::from_gains(gains, config))
}

/// True iff `log2(1 + sinr) < rate`, tested as `sinr < 2^rate - 1`.
pub fn is_outage(sinr: f64, rate_bpcu: f64) -> bool {
    sinr < rate_bpcu.exp2() - 1.0
}
