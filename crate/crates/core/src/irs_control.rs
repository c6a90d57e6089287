//! Reflection designs: ideal zero-forcing, DFT codebook search and on-off
//! codebook selection.
//!
//! Every design returns a [`ReflectVector`] `θ` whose entry magnitudes are the
//! amplitude coefficients and whose phases are the phase shifts. All vectors
//! are scaled to unit Euclidean norm so the three designs share one power
//! constraint.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::{ChannelRealization, SystemConfig};
use crate::linkmetrics::{ProjectedGains, SinrBreakdown};
use crate::numerics::{norm, null_space, ComplexMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Ideal,
    Dft,
    OnOff,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ideal, Scheme::Dft, Scheme::OnOff];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::Dft => "dft",
            Scheme::OnOff => "onoff",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ideal" => Ok(Scheme::Ideal),
            "dft" => Ok(Scheme::Dft),
            "onoff" | "on-off" => Ok(Scheme::OnOff),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectVector {
    pub values: Vec<Complex64>,
    pub scheme: Scheme,
    /// Position in the codebook for the codebook designs.
    pub index: Option<usize>,
}

impl ReflectVector {
    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Dft,
    OnOff { groups: usize, group_size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub kind: CodebookKind,
    pub elements: usize,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn scheme(&self) -> Scheme {
        match self.kind {
            CodebookKind::Dft => Scheme::Dft,
            CodebookKind::OnOff { .. } => Scheme::OnOff,
        }
    }

    /// Projected gains of every codebook vector on one realisation.
    pub fn gains(&self, real: &ChannelRealization) -> Result<Vec<ProjectedGains>> {
        self.vectors.iter().map(|v| ProjectedGains::project(v, real)).collect()
    }
}

/// Columns of the unit-norm `N`-point DFT matrix,
/// `v_p[n] = exp(-j2πnp/N) / √N`.
pub fn build_dft_codebook(elements: usize) -> Result<Codebook> {
    if elements == 0 {
        return Err(Error::InvalidConfig("DFT codebook needs N >= 1".into()));
    }
    let scale = 1.0 / (elements as f64).sqrt();
    let vectors = (0..elements)
        .map(|p| {
            (0..elements)
                .map(|n| {
                    // Reduce the exponent modulo N to keep the phase argument small.
                    let k = (n * p) % elements;
                    Complex64::from_polar(scale, -2.0 * PI * k as f64 / elements as f64)
                })
                .collect()
        })
        .collect();
    Ok(Codebook {
        kind: CodebookKind::Dft,
        elements,
        vectors,
    })
}

/// Columns of `(1/√Q) I_P ⊗ 1_Q`: vector `p` switches on the `p`-th block of
/// `Q` consecutive elements.
pub fn build_onoff_codebook(elements: usize, groups: usize, group_size: usize) -> Result<Codebook> {
    if groups == 0 || group_size == 0 || groups * group_size != elements {
        return Err(Error::InvalidConfig(format!(
            "on-off codebook needs N = P*Q, got N={elements} P={groups} Q={group_size}"
        )));
    }
    let on = Complex64::new(1.0 / (group_size as f64).sqrt(), 0.0);
    let vectors = (0..groups)
        .map(|p| {
            let mut v = vec![Complex64::new(0.0, 0.0); elements];
            v[p * group_size..(p + 1) * group_size].fill(on);
            v
        })
        .collect();
    Ok(Codebook {
        kind: CodebookKind::OnOff { groups, group_size },
        elements,
        vectors,
    })
}

/// Zero-forcing reflection vector maximising the served-beam gain.
///
/// `θ` is restricted to the null space `V` of the interfering cascades and
/// set to `V·Vᴴ D h_k / |Vᴴ D h_k|`.
pub fn ideal_theta(real: &ChannelRealization) -> Result<ReflectVector> {
    let (n, k) = (real.elements(), real.beam_count());
    if n < k {
        return Err(Error::Infeasible(format!(
            "zero forcing needs N >= K, got N={n} K={k}"
        )));
    }
    let interferers: Vec<Vec<Complex64>> = real.interfering_cascades().map(<[_]>::to_vec).collect();
    let constraints = ComplexMatrix::from_columns(n, &interferers)?;
    let basis = null_space(&constraints);
    if basis.cols() == 0 {
        return Err(Error::Degenerate("interfering cascades span the whole IRS space".into()));
    }
    let coords = basis.adjoint_mul_vec(real.served_cascade())?;
    let len = norm(&coords);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::Degenerate("served cascade has no component in the null space".into()));
    }
    let coords: Vec<Complex64> = coords.iter().map(|z| z / len).collect();
    Ok(ReflectVector {
        values: basis.mul_vec(&coords)?,
        scheme: Scheme::Ideal,
        index: None,
    })
}

/// Index of the largest SINR among precomputed codebook gains, lowest index
/// on ties.
pub fn best_codeword(gains: &[ProjectedGains], config: &SystemConfig) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in gains.iter().enumerate() {
        let sinr = SinrBreakdown::from_gains(*g, config).sinr;
        match best {
            Some((_, b)) if sinr <= b => {}
            _ => best = Some((i, sinr)),
        }
    }
    best.map(|(i, _)| i)
}

/// Exhaustive codebook search for the vector maximising the far-user SINR.
pub fn select_theta(book: &Codebook, real: &ChannelRealization, config: &SystemConfig) -> Result<ReflectVector> {
    if book.is_empty() {
        return Err(Error::InvalidConfig("empty codebook".into()));
    }
    let gains = book.gains(real)?;
    let index = best_codeword(&gains, config).expect("codebook is non-empty");
    Ok(ReflectVector {
        values: book.vectors[index].clone(),
        scheme: book.scheme(),
        index: Some(index),
    })
}
