//! Symmetric-matrix packing and positive-definite helpers.
//!
//! Symmetric matrices are packed by their lower triangle in row-major order:
//! (0,0), (1,0), (1,1), (2,0), (2,1), (2,2), ...

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Number of packed entries of a d×d symmetric matrix.
pub fn packed_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Solves `packed_len(d) == n` for d.
pub fn dim_from_packed(n: usize) -> Option<usize> {
    (0..=n).find(|&d| packed_len(d) == n)
}

pub fn pack_lower(m: &Matrix) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(packed_len(d));
    for i in 0..d {
        for j in 0..=i {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn unpack_lower(packed: &[f64], d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in 0..=i {
            m[(i, j)] = packed[k];
            m[(j, i)] = packed[k];
            k += 1;
        }
    }
    m
}

/// Packs with off-diagonal entries doubled: the coordinates of the linear
/// functional Θ ↦ tr(Θ X) with respect to the packed coordinates of Θ.
pub fn pack_dual(m: &Matrix) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(packed_len(d));
    for i in 0..d {
        for j in 0..=i {
            out.push(if i == j { m[(i, j)] } else { 2.0 * m[(i, j)] });
        }
    }
    out
}

/// Inverse of [`pack_dual`].
pub fn unpack_dual(packed: &[f64], d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in 0..=i {
            let v = if i == j { packed[k] } else { 0.5 * packed[k] };
            m[(i, j)] = v;
            m[(j, i)] = v;
            k += 1;
        }
    }
    m
}

pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| {
            (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol * (1.0 + m[(i, j)].abs()))
        })
}

/// Cholesky factor of a symmetric positive-definite matrix together with
/// its log-determinant.
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    pub log_det: f64,
}

impl SpdFactor {
    /// Factorizes `m`, returning a short reason on failure.
    pub fn new(m: &Matrix) -> Result<Self, String> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        let chol = Cholesky::new(m.clone()).ok_or_else(|| "not positive definite".to_string())?;
        let l = chol.l_dirty();
        let mut log_det = 0.0;
        for i in 0..m.nrows() {
            let lii = l[(i, i)];
            if !(lii > 0.0) {
                return Err("not positive definite".into());
            }
            log_det += 2.0 * lii.ln();
        }
        Ok(SpdFactor { chol, log_det })
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> Matrix {
        let inv = self.chol.inverse();
        // enforce exact symmetry
        (&inv + inv.transpose()) * 0.5
    }
}

/// Condition number of a symmetric positive-definite matrix (ratio of extreme eigenvalues).
pub fn spd_condition(m: &Matrix) -> f64 {
    if m.nrows() == 1 {
        return 1.0;
    }
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
