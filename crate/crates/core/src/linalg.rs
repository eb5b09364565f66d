//! Dense complex linear algebra shared by the imaging modules.
//!
//! Everything is built on `nalgebra` dynamic matrices; SVDs go through `faer`
//! and come back sorted in nonincreasing order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Thin singular value decomposition `B = U diag(s) V^*`, sorted so that
/// `singular_values[0] >= singular_values[1] >= ...`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD by `faer`. nalgebra's complex SVD was dropped after it returned
/// factorizations with O(1) reconstruction error on some exactly rank-one
/// response matrices.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return Svd {
            u: CMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let dec = to_faer(m).thin_svd().expect("svd converges on finite input");
    let s = dec.S().column_vector();
    let values: Vec<f64> = (0..p).map(|i| s[i].re).collect();
    debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
    Svd {
        u: from_faer(dec.U()),
        singular_values: values,
        v: from_faer(dec.V()),
    }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("svd converges on finite input")
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sine of the largest principal angle between the column spans of two
/// matrices with orthonormal columns, i.e. `||P_1 - P_2||_2` when both spans
/// have the same dimension.
///
/// Evaluated as `||(I - Q_1 Q_1^*) Q_2||_2`, which stays accurate for tiny
/// angles where `sqrt(1 - cos^2)` would cancel. When the dimensions differ the
/// projector distance is 1.
pub fn projection_distance(q1: &CMatrix, q2: &CMatrix) -> f64 {
    assert_eq!(q1.nrows(), q2.nrows(), "subspaces live in different spaces");
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let residual = q2 - q1 * (q1.adjoint() * q2);
    spectral_norm(&residual).min(1.0)
}

/// Largest principal angle sine between two subspaces given by arbitrary
/// spanning matrices, each truncated to its leading `rank` left singular
/// vectors.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix, rank: usize) -> f64 {
    let ua = svd(a).u.columns(0, rank).into_owned();
    let ub = svd(b).u.columns(0, rank).into_owned();
    projection_distance(&ua, &ub)
}

pub fn column_norms(m: &CMatrix) -> Vec<f64> {
    m.column_iter().map(|c| c.norm()).collect()
}

/// Copy of `m` with every column scaled to unit Euclidean norm. Zero columns
/// are left untouched.
pub fn normalize_columns(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
    out
}

/// Submatrix made of the listed columns, in order.
pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Submatrix made of the listed rows, in order.
pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(rows.len(), m.ncols());
    for (dst, &src) in rows.iter().enumerate() {
        out.set_row(dst, &m.row(src));
    }
    out
}

/// Stack matrices with equal column counts on top of each other.
pub fn vstack(blocks: &[CMatrix]) -> CMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((offset, 0), b.shape()).copy_from(b);
        offset += b.nrows();
    }
    out
}

/// Relative error `||a - b|| / ||b||` in the Frobenius norm (absolute when `b`
/// vanishes).
pub fn relative_error(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = frobenius(&(a - b));
    let scale = frobenius(b);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

pub fn vector_relative_error(a: &CVector, b: &CVector) -> f64 {
    let diff = (a - b).norm();
    let scale = b.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            2,
            &[c(1.0, 0.0), c(0.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
        );
        let d = svd(&m);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let s = CMatrix::from_diagonal(&DVector::from_iterator(
            2,
            d.singular_values.iter().map(|&x| c(x, 0.0)),
        ));
        let back = &d.u * s * d.v.adjoint();
        assert!(relative_error(&back, &m) < 1e-14);
        let gram = d.u.adjoint() * &d.u;
        assert!(relative_error(&gram, &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn projection_distance_matches_angle() {
        let theta: f64 = 0.3;
        let q1 = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let q2 = CMatrix::from_column_slice(2, 1, &[c(theta.cos(), 0.0), c(0.0, theta.sin())]);
        assert!((projection_distance(&q1, &q2) - theta.sin()).abs() < 1e-15);
        assert_eq!(projection_distance(&q1, &q1), 0.0);
    }

    #[test]
    fn wide_matrix_svd() {
        let m = CMatrix::from_row_slice(2, 3, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let d = svd(&m);
        assert_eq!(d.u.shape(), (2, 2));
        assert_eq!(d.v.shape(), (3, 2));
        let s = CMatrix::from_diagonal(&DVector::from_iterator(
            2,
            d.singular_values.iter().map(|&x| c(x, 0.0)),
        ));
        assert!(relative_error(&(&d.u * s * d.v.adjoint()), &m) < 1e-14);
    }
}
