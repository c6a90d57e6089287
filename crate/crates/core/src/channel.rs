//! System parameters and random channel realisations.
//!
//! One realisation holds the base-station beams, the BS→IRS matrix, the
//! IRS→far-user vector and the derived cascade `D·h_i` for every beam, which
//! is the only channel quantity the far-user SINR depends on.

use num_complex::Complex64;

use crate::numerics::{orthonormal_columns, sample_cn_matrix, sample_cn_vector, ComplexMatrix, RandomStream};
use crate::{Error, Result};

/// Scalar parameters of one experiment point.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas (M).
    pub antennas: usize,
    /// Orthogonal beams, one near user each (K).
    pub beams: usize,
    /// IRS reflecting elements (N).
    pub elements: usize,
    /// On-off groups (P), with `elements = groups * group_size`.
    pub groups: usize,
    /// Elements switched on together in an on-off vector (Q).
    pub group_size: usize,
    /// Power share multiplying the far user's useful term.
    pub alpha1_sq: f64,
    /// Power share of the co-beam superposed signal.
    pub alpha2_sq: f64,
    /// Transmit SNR, linear.
    pub snr: f64,
    /// Far-user target rate in bits per channel use.
    pub rate_bpcu: f64,
}

impl SystemConfig {
    /// The evaluation setup used for the single- and multi-pair figures:
    /// four BS antennas and a 4/5, 1/5 power split.
    pub fn reference(beams: usize, elements: usize, group_size: usize, rate_bpcu: f64, snr_db: f64) -> Self {
        Self {
            antennas: 4,
            beams,
            elements,
            groups: elements.checked_div(group_size).unwrap_or(0),
            group_size,
            alpha1_sq: 0.8,
            alpha2_sq: 0.2,
            snr: db_to_linear(snr_db),
            rate_bpcu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.beams < 1 || self.antennas < self.beams {
            return bad(format!("need M >= K >= 1, got M={} K={}", self.antennas, self.beams));
        }
        if self.elements < 1 {
            return bad("need N >= 1".into());
        }
        if self.groups * self.group_size != self.elements || self.group_size == 0 {
            return bad(format!(
                "need N = P*Q, got N={} P={} Q={}",
                self.elements, self.groups, self.group_size
            ));
        }
        if !(self.alpha1_sq >= 0.0 && self.alpha2_sq >= 0.0) {
            return bad("power coefficients must be non-negative".into());
        }
        if (self.alpha1_sq + self.alpha2_sq - 1.0).abs() > 1e-12 {
            return bad(format!(
                "alpha1_sq + alpha2_sq must equal 1, got {}",
                self.alpha1_sq + self.alpha2_sq
            ));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad(format!("SNR must be positive and finite, got {}", self.snr));
        }
        if !(self.rate_bpcu > 0.0 && self.rate_bpcu.is_finite()) {
            return bad(format!("rate must be positive, got {}", self.rate_bpcu));
        }
        Ok(())
    }

    /// SINR threshold `2^R - 1`.
    pub fn epsilon(&self) -> f64 {
        self.rate_bpcu.exp2() - 1.0
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Self {
            snr: db_to_linear(snr_db),
            ..self.clone()
        }
    }
}

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One random draw of every channel in a served pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// M×K orthonormal beams.
    pub beams: ComplexMatrix,
    /// N×M base station to IRS.
    pub bs_to_irs: ComplexMatrix,
    /// IRS to far user, length N.
    pub irs_to_user: Vec<Complex64>,
    /// N×K effective channels, column i is `G·w_i`.
    pub effective: ComplexMatrix,
    /// N×K cascade, column i is `D·h_i` with `D = diag(conj(irs_to_user))`.
    pub cascade: ComplexMatrix,
    /// Zero-based index of the beam carrying the far user's signal.
    pub served: usize,
}

impl ChannelRealization {
    /// Assembles a realisation from explicit channels, deriving the effective
    /// and cascade matrices.
    pub fn from_channels(
        beams: ComplexMatrix,
        bs_to_irs: ComplexMatrix,
        irs_to_user: Vec<Complex64>,
        served: usize,
    ) -> Result<Self> {
        let n = bs_to_irs.rows();
        if irs_to_user.len() != n {
            return Err(Error::Dimension(format!(
                "IRS has {n} elements but the user channel has {}",
                irs_to_user.len()
            )));
        }
        if served >= beams.cols() {
            return Err(Error::InvalidConfig(format!(
                "served beam {served} out of range for {} beams",
                beams.cols()
            )));
        }
        let effective = bs_to_irs.matmul(&beams)?;
        let cascade =
            ComplexMatrix::from_fn(n, effective.cols(), |j, i| irs_to_user[j].conj() * effective[(j, i)]);
        Ok(Self {
            beams,
            bs_to_irs,
            irs_to_user,
            effective,
            cascade,
            served,
        })
    }

    /// Builds a realisation directly from cascade columns, bypassing the
    /// physical channels (useful for hand-constructed scenarios).
    pub fn from_cascade(cascade: ComplexMatrix, served: usize) -> Result<Self> {
        let (n, k) = (cascade.rows(), cascade.cols());
        if served >= k {
            return Err(Error::InvalidConfig(format!("served beam {served} out of range for {k} beams")));
        }
        Ok(Self {
            beams: ComplexMatrix::identity(k),
            bs_to_irs: cascade.clone(),
            irs_to_user: vec![Complex64::new(1.0, 0.0); n],
            effective: cascade.clone(),
            cascade,
            served,
        })
    }

    pub fn elements(&self) -> usize {
        self.cascade.rows()
    }

    pub fn beam_count(&self) -> usize {
        self.cascade.cols()
    }

    /// `D` as an explicit diagonal matrix.
    pub fn reflection_diagonal(&self) -> ComplexMatrix {
        let d: Vec<Complex64> = self.irs_to_user.iter().map(|z| z.conj()).collect();
        ComplexMatrix::diagonal(&d)
    }

    /// `D·h_k` for the served beam.
    pub fn served_cascade(&self) -> &[Complex64] {
        self.cascade.column(self.served)
    }

    /// `D·h_i` for every interfering beam `i != served`.
    pub fn interfering_cascades(&self) -> impl Iterator<Item = &[Complex64]> {
        let served = self.served;
        (0..self.beam_count())
            .filter(move |&i| i != served)
            .map(move |i| self.cascade.column(i))
    }
}

/// Draws beams, then the BS→IRS matrix, then the IRS→user vector from
/// `stream`. `served` is zero-based.
pub fn draw_realization(config: &SystemConfig, served: usize, stream: &RandomStream) -> Result<ChannelRealization> {
    config.validate()?;
    if served >= config.beams {
        return Err(Error::InvalidConfig(format!(
            "served beam {served} out of range for K={}",
            config.beams
        )));
    }
    let mut rng = stream.rng();
    let beams = orthonormal_columns(config.antennas, config.beams, &mut rng)?;
    let bs_to_irs = sample_cn_matrix(config.elements, config.antennas, &mut rng)?;
    let irs_to_user = sample_cn_vector(config.elements, &mut rng)?;
    ChannelRealization::from_channels(beams, bs_to_irs, irs_to_user, served)
}
