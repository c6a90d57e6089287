//! Numerical kernel shared by the channel model, the reflection designs and
//! the analytics.

mod bessel;
mod linalg;
mod random;

pub use bessel::{bessel_k_int, EULER_GAMMA};
pub use linalg::{
    householder_qr, inner, jacobi_left_svd, norm, norm_sqr, null_space, ComplexMatrix, RANK_TOLERANCE,
};
pub use random::{orthonormal_columns, sample_cn_matrix, sample_cn_vector, RandomStream};

use crate::{Error, Result};

/// `Γ(n) = (n-1)!` for positive integers. Exact for `n <= 21`.
pub fn gamma_int(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("gamma_int requires n >= 1".into()));
    }
    if n <= 21 {
        Ok((1..n).product::<u64>() as f64)
    } else {
        Ok((1..n).fold(1.0, |acc, k| acc * k as f64))
    }
}
