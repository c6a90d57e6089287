//! Dense complex matrices sized for per-trial channel work (a few dozen rows
//! at most). Storage is column-major so columns are contiguous slices.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative singular-value threshold below which a direction counts as
/// numerically zero in [`null_space`].
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// An all-zero matrix. A zero column count is allowed and denotes an
    /// empty collection of column vectors.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from column vectors of a common length.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        (0..self.cols).map(move |j| self.column(j))
    }

    /// Keeps the columns in `range`.
    pub fn column_range(&self, range: std::ops::Range<usize>) -> Self {
        let data = self.data[range.start * self.rows..range.end * self.rows].to_vec();
        Self {
            rows: self.rows,
            cols: range.len(),
            data,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in rhs.column(j).iter().enumerate() {
                for (d, &a) in dst.iter_mut().zip(self.column(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![ZERO; self.rows];
        for (col, &b) in self.columns().zip(x) {
            for (d, &a) in out.iter_mut().zip(col) {
                *d += a * b;
            }
        }
        Ok(out)
    }

    /// `selfᴴ · x` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        Ok(self.columns().map(|c| inner(c, x)).collect())
    }

    /// Largest entry modulus (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Scales every entry by `s`.
    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian inner product `aᴴ b`.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// Householder QR with the full `m×m` unitary factor.
///
/// Returns `(Q, R)` with `A = Q·R`; `R` is `m×n` upper trapezoidal. The
/// diagonal of `R` is in general complex.
pub fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(m);
    let mut v = vec![ZERO; m];

    for j in 0..n.min(m) {
        let x = &r.column(j)[j..];
        let xnorm = norm(x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;

        let len = m - j;
        v[..len].copy_from_slice(x);
        v[0] -= alpha;
        let vnorm = norm(&v[..len]);
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v[..len] {
            *z /= vnorm;
        }

        // R <- (I - 2vvᴴ) R on the trailing block.
        for c in j..n {
            let col = &mut r.column_mut(c)[j..];
            let s = inner(&v[..len], col) * 2.0;
            for (z, vi) in col.iter_mut().zip(&v[..len]) {
                *z -= vi * s;
            }
        }
        // Q <- Q (I - 2vvᴴ).
        for row in 0..m {
            let mut s = ZERO;
            for (t, vi) in v[..len].iter().enumerate() {
                s += q[(row, j + t)] * vi;
            }
            s *= 2.0;
            for (t, vi) in v[..len].iter().enumerate() {
                q[(row, j + t)] -= s * vi.conj();
            }
        }
    }
    // Clean the strictly lower part left at rounding level.
    for c in 0..n {
        for i in (c + 1)..m {
            r[(i, c)] = ZERO;
        }
    }
    (q, r)
}

/// Singular values and left singular directions from one-sided Jacobi.
///
/// Returns `(U, sigma)` where `U` has the same shape as `A` and its columns
/// are the mutually orthogonal columns of `A·V`, normalised where the
/// singular value is non-zero.
pub fn jacobi_left_svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let n = a.cols;
    let mut u = a.clone();
    const MAX_SWEEPS: usize = 60;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(u.column(p));
                let beta = norm_sqr(u.column(q));
                let gamma = inner(u.column(p), u.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..u.rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)] * phase.conj();
                    u[(i, p)] = up * c - uq * s;
                    u[(i, q)] = up * s + uq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = u.columns().map(norm).collect();
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 {
            for z in u.column_mut(j) {
                *z /= s;
            }
        }
    }
    (u, sigma)
}

/// Orthonormal basis of the vectors annihilated by `Aᴴ`, i.e. the orthogonal
/// complement of the column space of `A` (`N×J`).
///
/// Numerical rank counts singular values above [`RANK_TOLERANCE`] times the
/// largest one. With no columns (`J = 0`) the full identity is returned.
pub fn null_space(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows;
    if a.cols == 0 {
        return ComplexMatrix::identity(n);
    }
    let (u, sigma) = jacobi_left_svd(a);
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return ComplexMatrix::identity(n);
    }
    let range: Vec<Vec<Complex64>> = sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOLERANCE * smax)
        .map(|(j, _)| u.column(j).to_vec())
        .collect();
    let rank = range.len().min(n);
    let basis = ComplexMatrix::from_columns(n, &range[..rank]).expect("columns share length");
    let (q, _) = householder_qr(&basis);
    q.column_range(rank..n)
}
