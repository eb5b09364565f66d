//! Subspace engine: SVD split of a data matrix, the MUSIC imaging functional,
//! support extraction and amplitude recovery on a given support.
//!
//! The imaging functional at grid point `k` is
//!
//! ```text
//! I_k = ||a_k|| / sum_{j > M} |<a_k, u_j>|^2
//! ```
//!
//! where `u_{M+1}, ...` span the noise subspace of the data matrix. The sum
//! runs over the whole row dimension, so for stacked data it covers `N S`
//! vectors. It is evaluated as `||a_k - U_s U_s^* a_k||^2`, which needs only
//! the signal vectors.

use rayon::prelude::*;

use crate::error::{ImagingError, Result};
use crate::linalg::{svd, CMatrix, CVector, C64};
use crate::structures::{Exactness, ModelMatrixFamily};

/// How the signal rank is chosen from the singular values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankPolicy {
    Known(usize),
    /// Count `sigma_j > tau * sigma_1`.
    Threshold(f64),
    /// Split at the largest ratio `sigma_j / sigma_{j+1}`.
    Gap,
}

#[derive(Debug, Clone)]
pub struct SubspaceDecomposition {
    pub singular_values: Vec<f64>,
    /// Thin left singular vectors, one column per singular value.
    pub u: CMatrix,
    pub rank: usize,
    /// `sigma_M - sigma_{M+1}`, with `sigma_{p+1} = 0`.
    pub gap: f64,
}

impl SubspaceDecomposition {
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn signal_basis(&self) -> CMatrix {
        self.u.columns(0, self.rank).into_owned()
    }

    /// `(||U_s^* a||^2, ||a - U_s U_s^* a||^2)`.
    pub fn projection_energies(&self, a: &CVector) -> (f64, f64) {
        let us = self.u.columns(0, self.rank);
        let coeffs = us.adjoint() * a;
        let residual = a - us * &coeffs;
        (coeffs.norm_squared(), residual.norm_squared())
    }
}

fn gap_rank(s: &[f64]) -> usize {
    if s.len() <= 1 {
        return s.len();
    }
    let mut best = 1;
    let mut best_ratio = f64::NEG_INFINITY;
    for j in 0..s.len() - 1 {
        if s[j + 1] == 0.0 {
            if s[j] > 0.0 {
                return j + 1;
            }
            break;
        }
        let ratio = s[j] / s[j + 1];
        if ratio > best_ratio {
            best_ratio = ratio;
            best = j + 1;
        }
    }
    best
}

pub fn decompose(b: &CMatrix, policy: RankPolicy) -> Result<SubspaceDecomposition> {
    if b.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(ImagingError::ZeroMatrix);
    }
    let dec = svd(b);
    let s = dec.singular_values;
    let p = s.len();
    let rank = match policy {
        RankPolicy::Known(m) => {
            if m > p {
                return Err(ImagingError::InvalidArgument(format!(
                    "signal rank {m} exceeds the {p} singular values available"
                )));
            }
            m
        }
        RankPolicy::Threshold(tau) => s.iter().filter(|&&v| v > tau * s[0]).count(),
        RankPolicy::Gap => gap_rank(&s),
    };
    let upper = if rank == 0 { s[0] } else { s[rank - 1] };
    let gap = upper - s.get(rank).copied().unwrap_or(0.0);
    Ok(SubspaceDecomposition {
        singular_values: s,
        u: dec.u,
        rank,
        gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImagingOptions {
    /// Project `conj(a_k)` instead of `a_k`.
    pub conjugate: bool,
    /// Unit-normalize imaging vectors; `None` normalizes paraxial families only.
    pub normalize: Option<bool>,
    /// Use `||a_k||^2` in the numerator.
    pub squared_numerator: bool,
}

impl ImagingOptions {
    pub fn conjugated() -> Self {
        Self {
            conjugate: true,
            ..Self::default()
        }
    }
}

/// Relative floor on the denominator, in units of `||a_k||^2`.
pub const DENOMINATOR_FLOOR: f64 = f64::EPSILON * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct Pseudospectrum {
    pub values: Vec<f64>,
    /// The `rank` largest values, ascending index order.
    pub support: Vec<usize>,
    pub floor: f64,
}

pub fn pseudospectrum(
    decomp: &SubspaceDecomposition,
    family: &ModelMatrixFamily,
    opts: ImagingOptions,
) -> Result<Pseudospectrum> {
    if family.rows() != decomp.rows() {
        return Err(crate::error::mismatch(
            format!("{} model rows", decomp.rows()),
            family.rows(),
        ));
    }
    let normalize = opts.normalize.unwrap_or(family.exactness == Exactness::ParaxialApprox);
    let us = decomp.u.columns(0, decomp.rank);
    let values = (0..family.grid_size())
        .into_par_iter()
        .map(|k| {
            let mut a = family.a.column(k).into_owned();
            if opts.conjugate {
                a.iter_mut().for_each(|z| *z = z.conj());
            }
            if normalize {
                a /= C64::new(family.column_norms[k], 0.0);
            }
            let norm2 = a.norm_squared();
            let residual = &a - us * (us.adjoint() * &a);
            let denom = residual.norm_squared().max(DENOMINATOR_FLOOR * norm2).max(f64::MIN_POSITIVE);
            let numer = if opts.squared_numerator { norm2 } else { norm2.sqrt() };
            numer / denom
        })
        .collect::<Vec<f64>>();
    let support = extract_support(&values, decomp.rank);
    Ok(Pseudospectrum {
        values,
        support,
        floor: DENOMINATOR_FLOOR,
    })
}

/// Indices of the `m` largest values (ties to the lowest index), returned in
/// ascending index order.
pub fn extract_support(values: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(m);
    order.sort_unstable();
    order
}

/// Local maxima on a `cr_count x range_count` grid (8-neighbourhood, cross
/// range fastest), keeping the `m` largest. A plateau yields its
/// lowest-index point.
pub fn local_peaks(values: &[f64], dims: (usize, usize), m: usize) -> Vec<usize> {
    let (nx, ny) = dims;
    assert_eq!(values.len(), nx * ny, "grid dimensions do not match the image");
    let mut peaks = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let v = values[k];
            let mut is_peak = true;
            'scan: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    let kk = jj as usize * nx + ii as usize;
                    let w = values[kk];
                    if w > v || (w == v && kk < k) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push(k);
            }
        }
    }
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(m);
    peaks.sort_unstable();
    peaks
}

#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes {
    pub support: Vec<usize>,
    pub values: Vec<C64>,
    pub residual: f64,
}

/// Largest condition number accepted by [`recover_amplitudes`].
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares reflectivities on `support` from all data columns,
/// `b_q = sum_{k in T} a_k lambda_q(k) rho_k`.
pub fn recover_amplitudes(family: &ModelMatrixFamily, b: &CMatrix, support: &[usize]) -> Result<Amplitudes> {
    if b.nrows() != family.rows() {
        return Err(crate::error::mismatch(family.rows(), b.nrows()));
    }
    let cols = b.ncols().min(family.excitations());
    let rows = family.rows();
    let mut rhs = CVector::zeros(rows * cols);
    for q in 0..cols {
        rhs.rows_mut(q * rows, rows).copy_from(&b.column(q));
    }
    if support.is_empty() {
        return Ok(Amplitudes {
            support: Vec::new(),
            values: Vec::new(),
            residual: rhs.norm(),
        });
    }
    if let Some(&k) = support.iter().find(|&&k| k >= family.grid_size()) {
        return Err(ImagingError::InvalidArgument(format!("support index {k} outside the grid")));
    }
    if support.len() > rows * cols {
        return Err(ImagingError::RankDeficient(f64::INFINITY));
    }
    let mut g = CMatrix::zeros(rows * cols, support.len());
    for q in 0..cols {
        let lam = family.lambda(q);
        for (c, &k) in support.iter().enumerate() {
            for r in 0..rows {
                g[(q * rows + r, c)] = family.a[(r, k)] * lam[k];
            }
        }
    }
    let dec = svd(&g);
    let s = &dec.singular_values;
    let cond = if s[s.len() - 1] == 0.0 { f64::INFINITY } else { s[0] / s[s.len() - 1] };
    if !(cond <= MAX_CONDITION) {
        return Err(ImagingError::RankDeficient(cond));
    }
    let coeffs = dec.u.adjoint() * &rhs;
    let scaled = CVector::from_iterator(s.len(), coeffs.iter().zip(s).map(|(c, &v)| c / v));
    let rho = &dec.v * scaled;
    let residual = (&g * &rho - &rhs).norm();
    Ok(Amplitudes {
        support: support.to_vec(),
        values: rho.iter().copied().collect(),
        residual,
    })
}
