//! Reproducible random streams and complex Gaussian sampling.
//!
//! A [`RandomStream`] is a (seed, stream index) pair backed by ChaCha8, whose
//! 64-bit stream selector gives counter-based, order-independent streams:
//! trial `t` of a run always draws from stream `t`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{householder_qr, ComplexMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[inline]
fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `rows×cols` matrix of i.i.d. CN(0, 1) entries, filled column by column.
pub fn sample_cn_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("cannot sample a {rows}x{cols} matrix")));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |_, _| cn(rng)))
}

pub fn sample_cn_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if len == 0 {
        return Err(Error::Dimension("cannot sample an empty vector".into()));
    }
    Ok((0..len).map(|_| cn(rng)).collect())
}

/// Random `m×k` matrix with orthonormal columns, Haar distributed.
///
/// A CN(0, 1) draw is QR-factorised and each column of `Q` is rotated by the
/// phase of the matching diagonal entry of `R`.
pub fn orthonormal_columns<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if k > m {
        return Err(Error::Dimension(format!("cannot fit {k} orthonormal columns in dimension {m}")));
    }
    let a = sample_cn_matrix(m, k, rng)?;
    let (q, r) = householder_qr(&a);
    let mut w = q.column_range(0..k);
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for z in w.column_mut(j) {
            *z *= phase;
        }
    }
    Ok(w)
}
