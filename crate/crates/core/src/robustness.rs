//! Noise robustness of MUSIC: illumination quality `gamma`, support coherence
//! `epsilon`, the admissible noise level and the projector-distance bound
//!
//! ```text
//! ||P_R(Q^delta) - P_R(B)|| <= delta / (mu gamma (1 - 2 epsilon))
//! ```
//!
//! valid when `epsilon < 1/3` and `2 delta < mu gamma (1 - 2 epsilon)`, with
//! `gamma = sigma_min(L_T)` and unit-norm model columns. Also the illumination
//! generators (point, random, optimal).
//!
//! Unit-norm columns are obtained by rescaling: `A X L = (A D^-1) X (D L)`
//! with `D = Diag(||a_k||)`, so `mu` keeps its meaning as the smallest
//! reflectivity and `gamma` is measured on `D L`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{ImagingError, Result};
use crate::forward::{Illumination, IlluminationLabel};
use crate::linalg::{
    column_norms, min_singular_value, projection_distance, select_columns, select_rows, singular_values,
    spectral_norm, svd, CMatrix, CVector, C64,
};
use crate::rng::{self, complex_normal_matrix, complex_normal_vector, Stream};
use crate::structures::ModelMatrixFamily;

/// Excitation coefficients `l_kq`: row `k` is a grid point, column `q` an
/// excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMatrix {
    pub l: CMatrix,
}

impl ParameterMatrix {
    pub fn from_family(family: &ModelMatrixFamily) -> Self {
        let (k, q) = (family.grid_size(), family.excitations());
        Self {
            l: CMatrix::from_fn(k, q, |i, j| family.lambda(j)[i]),
        }
    }

    /// Parameter matrix in the unit-column frame, `D L`.
    pub fn normalized_frame(family: &ModelMatrixFamily) -> Self {
        let mut p = Self::from_family(family);
        for (k, &n) in family.column_norms.iter().enumerate() {
            p.l.row_mut(k).scale_mut(n);
        }
        p
    }

    pub fn restrict(&self, support: &[usize]) -> CMatrix {
        select_rows(&self.l, support)
    }
}

/// `gamma = sigma_min(L_T)`.
pub fn compute_gamma(l: &ParameterMatrix, support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(ImagingError::EmptySupport);
    }
    if support.len() > l.l.ncols() {
        return Err(ImagingError::InvalidArgument(format!(
            "support of size {} exceeds the {} excitations",
            support.len(),
            l.l.ncols()
        )));
    }
    Ok(min_singular_value(&l.restrict(support)))
}

/// `(M - 1) max_{i != j in T} |<a_i, a_j>|` for unit-norm columns.
pub fn support_coherence(a: &CMatrix, support: &[usize]) -> f64 {
    let m = support.len();
    if m < 2 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for (x, &i) in support.iter().enumerate() {
        for &j in &support[x + 1..] {
            worst = worst.max(a.column(i).dotc(&a.column(j)).norm());
        }
    }
    (m - 1) as f64 * worst
}

/// Exact factorized problem `B = A X L` in the unit-column frame.
#[derive(Debug, Clone)]
pub struct TheoremSetup {
    /// Unit-norm model columns.
    pub a: CMatrix,
    pub rho: Vec<C64>,
    pub l: ParameterMatrix,
}

impl TheoremSetup {
    pub fn new(a: CMatrix, rho: Vec<C64>, l: ParameterMatrix) -> Result<Self> {
        if a.ncols() != rho.len() || l.l.nrows() != rho.len() {
            return Err(crate::error::mismatch(
                format!("{} grid points", a.ncols()),
                format!("{} reflectivities, {} parameter rows", rho.len(), l.l.nrows()),
            ));
        }
        if column_norms(&a).iter().any(|n| (n - 1.0).abs() > 1e-10) {
            return Err(ImagingError::InvalidArgument("model columns must have unit norm".into()));
        }
        Ok(Self { a, rho, l })
    }

    /// Rescale an exact family to unit columns.
    pub fn from_family(family: &ModelMatrixFamily, rho: &[C64]) -> Result<Self> {
        let a = crate::linalg::normalize_columns(&family.a);
        Self::new(a, rho.to_vec(), ParameterMatrix::normalized_frame(family))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.rho.len()).filter(|&k| self.rho[k] != C64::new(0.0, 0.0)).collect()
    }

    pub fn data(&self) -> CMatrix {
        let support = self.support();
        let at = select_columns(&self.a, &support);
        let mut xl = self.l.restrict(&support);
        for (r, &k) in support.iter().enumerate() {
            let rho = self.rho[k];
            xl.row_mut(r).iter_mut().for_each(|z| *z *= rho);
        }
        at * xl
    }

    pub fn mu(&self) -> f64 {
        self.support().iter().map(|&k| self.rho[k].norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn gamma(&self) -> Result<f64> {
        compute_gamma(&self.l, &self.support())
    }

    pub fn epsilon(&self) -> f64 {
        support_coherence(&self.a, &self.support())
    }

    /// Random toy instance: `m` support columns built as an orthonormal set
    /// tilted by `tilt`, the remaining `k - m` columns random, all unit norm;
    /// reflectivity magnitudes in `[1, 2)` and Gaussian parameters.
    pub fn random_toy(n: usize, k: usize, m: usize, aleph: usize, tilt: f64, seed: u64) -> Result<Self> {
        if m == 0 || m > k || m > n || m > aleph {
            return Err(ImagingError::InvalidArgument(format!("cannot place {m} scatterers in the toy problem")));
        }
        let mut r = rng::rng(seed, Stream::Scene);
        let q = svd(&complex_normal_matrix(&mut r, n, m, 1.0)).u;
        let mut a = complex_normal_matrix(&mut r, n, k, 1.0);
        for c in 0..m {
            let col = q.column(c) + complex_normal_vector(&mut r, n, tilt * tilt / n as f64);
            a.set_column(c, &col);
        }
        let a = crate::linalg::normalize_columns(&a);
        let mut rho = vec![C64::new(0.0, 0.0); k];
        for v in rho.iter_mut().take(m) {
            let mag: f64 = 1.0 + rand::Rng::random::<f64>(&mut r);
            let phase: f64 = rand::Rng::random_range(&mut r, 0.0..std::f64::consts::TAU);
            *v = C64::from_polar(mag, phase);
        }
        let l = ParameterMatrix {
            l: complex_normal_matrix(&mut r, k, aleph, 1.0),
        };
        Self::new(a, rho, l)
    }
}

/// Perturbation with spectral norm exactly `delta`: a Gaussian matrix
/// rescaled by its largest singular value.
pub fn spectral_perturbation(rows: usize, cols: usize, delta: f64, seed: u64) -> CMatrix {
    let mut r = rng::rng(seed, Stream::Perturbation);
    let e = complex_normal_matrix(&mut r, rows, cols, 1.0);
    let norm = spectral_norm(&e);
    e * C64::new(delta / norm, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Checked,
    /// The number of singular values above `delta` differs from `M`, so the
    /// subspaces are not comparable.
    RankMismatch { estimated: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub seed: u64,
    pub gamma: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub delta: f64,
    pub admissible: bool,
    pub bound: f64,
    /// `||(I - Q1 Q1^*) Q2||`, the largest principal-angle sine; NaN when
    /// the status is a rank mismatch.
    pub measured: f64,
    pub status: BoundStatus,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.status == BoundStatus::Checked && self.measured <= self.bound
    }
}

/// Whether `epsilon < 1/3` and `2 delta < mu gamma (1 - 2 epsilon)`.
pub fn admissible(gamma: f64, epsilon: f64, mu: f64, delta: f64) -> bool {
    epsilon < 1.0 / 3.0 && 2.0 * delta < mu * gamma * (1.0 - 2.0 * epsilon)
}

/// One trial with a given perturbation; does not enforce the hypotheses.
pub fn bound_trial(setup: &TheoremSetup, e: &CMatrix, seed: u64) -> Result<BoundReport> {
    let b = setup.data();
    if e.shape() != b.shape() {
        return Err(crate::error::mismatch(format!("{:?}", b.shape()), format!("{:?}", e.shape())));
    }
    let (gamma, epsilon, mu) = (setup.gamma()?, setup.epsilon(), setup.mu());
    let delta = spectral_norm(e);
    let m = setup.support().len();
    let bound = delta / (mu * gamma * (1.0 - 2.0 * epsilon));
    let perturbed = &b + e;
    let dec = svd(&perturbed);
    // with delta = 0 the cut must still sit above rounding noise
    let cut = delta.max(dec.singular_values[0] * f64::EPSILON * b.nrows().max(b.ncols()) as f64);
    let estimated = dec.singular_values.iter().filter(|&&s| s > cut).count();
    let (measured, status) = if estimated != m {
        (f64::NAN, BoundStatus::RankMismatch { estimated })
    } else {
        let q_delta = dec.u.columns(0, m).into_owned();
        let q_b = svd(&b).u.columns(0, m).into_owned();
        (projection_distance(&q_b, &q_delta), BoundStatus::Checked)
    };
    Ok(BoundReport {
        seed,
        gamma,
        epsilon,
        mu,
        delta,
        admissible: admissible(gamma, epsilon, mu, delta),
        bound,
        measured,
        status,
    })
}

/// Check the projector bound for spectral-norm-`delta` perturbations drawn
/// from each seed. Fails up front if the hypotheses do not hold.
pub fn check_theorem_bound(setup: &TheoremSetup, delta: f64, seeds: &[u64]) -> Result<Vec<BoundReport>> {
    let (gamma, epsilon, mu) = (setup.gamma()?, setup.epsilon(), setup.mu());
    if epsilon >= 1.0 / 3.0 {
        return Err(ImagingError::HypothesisViolated(format!("support coherence {epsilon:.4} >= 1/3")));
    }
    if 2.0 * delta >= mu * gamma * (1.0 - 2.0 * epsilon) {
        return Err(ImagingError::HypothesisViolated(format!(
            "noise level: 2 delta = {:.4e} >= mu gamma (1 - 2 eps) = {:.4e}",
            2.0 * delta,
            mu * gamma * (1.0 - 2.0 * epsilon)
        )));
    }
    let (rows, cols) = (setup.a.nrows(), setup.l.l.ncols());
    seeds
        .par_iter()
        .map(|&seed| {
            let e = if delta == 0.0 {
                CMatrix::zeros(rows, cols)
            } else {
                spectral_perturbation(rows, cols, delta, seed)
            };
            bound_trial(setup, &e, seed)
        })
        .collect()
}

pub fn write_bound_reports_csv<W: Write>(writer: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["seed", "gamma", "epsilon", "mu", "delta", "admissible", "bound", "measured", "status"])?;
    for r in reports {
        let status = match r.status {
            BoundStatus::Checked => "checked".to_string(),
            BoundStatus::RankMismatch { estimated } => format!("rank_mismatch:{estimated}"),
        };
        w.write_record([
            r.seed.to_string(),
            format!("{:e}", r.gamma),
            format!("{:e}", r.epsilon),
            format!("{:e}", r.mu),
            format!("{:e}", r.delta),
            r.admissible.to_string(),
            format!("{:e}", r.bound),
            format!("{:e}", r.measured),
            status,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Largest singular-value shift and `sigma_max(E)` for `B + E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCheck {
    pub max_shift: f64,
    pub perturbation_norm: f64,
}

impl WeylCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.max_shift <= self.perturbation_norm + slack
    }
}

pub fn weyl_check(b: &CMatrix, perturbed: &CMatrix) -> WeylCheck {
    let s0 = singular_values(b);
    let s1 = singular_values(perturbed);
    let max_shift = s0.iter().zip(&s1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    WeylCheck {
        max_shift,
        perturbation_norm: spectral_norm(&(perturbed - b)),
    }
}

/// Right singular vectors `v_1, ..., v_count` of the response matrix.
pub fn optimal_illuminations(p: &CMatrix, count: usize) -> Result<Vec<Illumination>> {
    if count > p.ncols() {
        return Err(ImagingError::InvalidArgument(format!(
            "{count} optimal illuminations requested from {} transducers",
            p.ncols()
        )));
    }
    let v = svd(p).v;
    (0..count)
        .map(|j| Illumination::new(v.column(j).into_owned(), IlluminationLabel::Optimal(j)))
        .collect()
}

/// Unit-norm circular complex Gaussian illuminations.
pub fn random_illuminations(n: usize, count: usize, seed: u64) -> Vec<Illumination> {
    let mut r = rng::rng(seed, Stream::Illumination);
    (0..count)
        .map(|index| {
            let v = complex_normal_vector(&mut r, n, 1.0);
            let v = &v / C64::new(v.norm(), 0.0);
            Illumination {
                vector: v,
                label: IlluminationLabel::Random { seed, index },
            }
        })
        .collect()
}

/// `gamma` of a set of illuminations on `support`, single frequency, in the
/// unit-column frame: `sigma_min` of rows `T` of `D A^T F`.
pub fn illumination_gamma(a: &CMatrix, illuminations: &[Illumination], support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(ImagingError::EmptySupport);
    }
    let at = select_columns(a, support);
    let norms = column_norms(&at);
    let f = CMatrix::from_columns(&illuminations.iter().map(|f| f.vector.clone()).collect::<Vec<CVector>>());
    let mut lt = at.transpose() * f;
    for (r, n) in norms.iter().enumerate() {
        lt.row_mut(r).scale_mut(*n);
    }
    if support.len() > lt.ncols() {
        return Ok(0.0);
    }
    Ok(min_singular_value(&lt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{green_vector, response_matrix};
    use crate::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
    use crate::structures::{build_single_freq, single_freq_model};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gamma_of_identity_rows() {
        let l = ParameterMatrix {
            l: CMatrix::identity(5, 5),
        };
        assert!((compute_gamma(&l, &[1, 3]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(compute_gamma(&l, &[]).unwrap_err(), ImagingError::EmptySupport);
    }

    #[test]
    fn gamma_matches_oracle_and_grows_with_columns() {
        let mut r = rng::rng(2, Stream::Scene);
        for _ in 0..20 {
            let l = ParameterMatrix {
                l: complex_normal_matrix(&mut r, 10, 6, 1.0),
            };
            let t = [0, 4, 7];
            // oracle: sqrt of the smallest eigenvalue of L_T L_T^*
            let lt = l.restrict(&t);
            let gram = &lt * lt.adjoint();
            let eig = nalgebra::SymmetricEigen::new(gram).eigenvalues;
            let oracle = eig.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
            let gamma = compute_gamma(&l, &t).unwrap();
            assert!((gamma - oracle).abs() < 1e-12 * oracle.max(1.0));

            let mut wider = l.l.clone().insert_column(6, c(0.0, 0.0));
            wider.set_column(6, &complex_normal_vector(&mut r, 10, 1.0));
            assert!(compute_gamma(&ParameterMatrix { l: wider }, &t).unwrap() >= gamma - 1e-12);
        }
    }

    #[test]
    fn coherence_examples() {
        let id = CMatrix::identity(4, 4);
        assert_eq!(support_coherence(&id, &[0, 1, 2]), 0.0);
        let mut dup = id.clone();
        dup.set_column(1, &id.column(0).into_owned());
        assert!((support_coherence(&dup, &[0, 1]) - 1.0).abs() < 1e-15);
        assert_eq!(support_coherence(&dup, &[0]), 0.0);
    }

    #[test]
    fn point_illumination_parameters_are_transposed_model() {
        let array = ArrayGeometry::linear(9, 20.0).unwrap();
        let grid = ImagingGrid::centered(0.0, 40.0, 10.0, 10.0, 5, 5).unwrap();
        let scene = Scene::new(array, vec![Scatterer::new(grid.point(3), c(1.0, 0.0)).unwrap()], grid, FrequencySet::single_central());
        let f = c(0.5, -0.5);
        let illums: Vec<Illumination> = (0..9)
            .map(|q| {
                let mut v = CVector::zeros(9);
                v[q] = f;
                Illumination::new(v, IlluminationLabel::Point(q)).unwrap()
            })
            .collect();
        let (_, fam) = build_single_freq(&scene, 0, &illums).unwrap();
        let l = ParameterMatrix::from_family(&fam);
        assert!((&l.l - single_freq_model(&scene, 0).unwrap().transpose() * f).norm() < 1e-15);
    }

    #[test]
    fn gamma_lower_bound_for_point_illuminations() {
        // unit columns, |f| = 1: sigma_min(A_T^T) >= 1 - 2 eps
        let array = ArrayGeometry::linear(41, 100.0).unwrap();
        let grid = ImagingGrid::centered(0.0, 100.0, 40.0, 40.0, 21, 21).unwrap();
        let a = crate::linalg::normalize_columns(
            &single_freq_model(&Scene::new(array, vec![], grid, FrequencySet::single_central()), 0).unwrap(),
        );
        let support = [211, 216, 221, 226];
        let eps = support_coherence(&a, &support);
        assert!(eps < 1.0 / 3.0);
        let l = ParameterMatrix { l: a.transpose() };
        assert!(compute_gamma(&l, &support).unwrap() >= 1.0 - 2.0 * eps);
    }

    #[test]
    fn zero_noise_gives_zero_distance() {
        let setup = (0..)
            .map(|seed| TheoremSetup::random_toy(12, 30, 4, 8, 0.2, seed).unwrap())
            .find(|s| s.epsilon() < 1.0 / 3.0)
            .unwrap();
        let reports = check_theorem_bound(&setup, 0.0, &[0, 1]).unwrap();
        for r in reports {
            assert_eq!(r.status, BoundStatus::Checked);
            assert!(r.measured < 1e-12);
        }
    }

    #[test]
    fn orthonormal_toy_bound() {
        // eps = 0, L_T = I, mu = 1: bound = delta
        let n = 8;
        let a = CMatrix::identity(n, n);
        let mut rho = vec![c(0.0, 0.0); n];
        rho[1] = c(1.0, 0.0);
        rho[4] = c(0.0, 1.0);
        rho[6] = c(-1.0, 0.0);
        let l = ParameterMatrix {
            l: CMatrix::identity(n, n),
        };
        let setup = TheoremSetup::new(a, rho, l).unwrap();
        assert_eq!((setup.epsilon(), setup.gamma().unwrap(), setup.mu()), (0.0, 1.0, 1.0));
        let seeds: Vec<u64> = (0..100).collect();
        for r in check_theorem_bound(&setup, 0.1, &seeds).unwrap() {
            assert!((r.bound - 0.1).abs() < 1e-12);
            assert!((r.delta - 0.1).abs() < 1e-12);
            assert!(r.holds(), "seed {} measured {}", r.seed, r.measured);
        }
    }

    #[test]
    fn hypothesis_boundary() {
        let setup = TheoremSetup::random_toy(12, 30, 3, 6, 0.1, 5).unwrap();
        let threshold = setup.mu() * setup.gamma().unwrap() * (1.0 - 2.0 * setup.epsilon());
        let err = check_theorem_bound(&setup, 1.01 * threshold / 2.0, &[0]).unwrap_err();
        assert!(matches!(err, ImagingError::HypothesisViolated(_)));
        assert!(check_theorem_bound(&setup, 0.99 * threshold / 2.0, &[0]).is_ok());
    }

    #[test]
    fn weyl_shifts() {
        let mut r = rng::rng(7, Stream::Scene);
        let b = complex_normal_matrix(&mut r, 6, 4, 1.0);
        let e = spectral_perturbation(6, 4, 0.3, 1);
        assert!((spectral_norm(&e) - 0.3).abs() < 1e-12);
        let w = weyl_check(&b, &(&b + &e));
        assert!(w.holds(1e-12));
    }

    #[test]
    fn optimal_illumination_for_rank_one() {
        let array = ArrayGeometry::linear(15, 30.0).unwrap();
        let g = green_vector(&[3.0, 0.0, 50.0], 2.0 * std::f64::consts::PI, &array).unwrap();
        let p = &g * g.transpose();
        let v = &optimal_illuminations(&p, 1).unwrap()[0].vector;
        let target = g.map(|z| z.conj()) / C64::new(g.norm(), 0.0);
        assert!((v.dotc(&target).norm() - 1.0).abs() < 1e-12);

        let pv = (&p * v).norm();
        for f in random_illuminations(15, 1000, 3) {
            assert!(pv >= (&p * &f.vector).norm() - 1e-15);
        }
    }

    #[test]
    fn random_illuminations_are_seeded_unit_vectors() {
        let a = random_illuminations(64, 10, 9);
        assert_eq!(a, random_illuminations(64, 10, 9));
        assert_ne!(a, random_illuminations(64, 10, 10));
        let mut worst = 0.0f64;
        for (i, f) in a.iter().enumerate() {
            assert!((f.vector.norm() - 1.0).abs() < 1e-12);
            for g in &a[i + 1..] {
                worst = worst.max(f.vector.dotc(&g.vector).norm());
            }
        }
        // typical overlap ~ 1/sqrt(N); allow a generous factor
        assert!(worst < 4.0 / 8.0);
    }

    #[test]
    fn optimal_gamma_tracks_green_norm() {
        let array = ArrayGeometry::linear(81, 100.0).unwrap();
        let grid = ImagingGrid::centered(0.0, 100.0, 50.0, 5.0, 50, 50).unwrap();
        let cells = [grid.index(5, 10), grid.index(25, 30), grid.index(44, 15)];
        let scatterers = cells
            .iter()
            .zip([c(1.0, 0.0), c(0.8, 0.4), c(-0.6, 0.9)])
            .map(|(&k, a)| Scatterer::new(grid.point(k), a).unwrap())
            .collect();
        let scene = Scene::new(array, scatterers, grid, FrequencySet::single_central());
        let a = single_freq_model(&scene, 0).unwrap();
        let p = response_matrix(&scene, 0).unwrap();
        let gamma = illumination_gamma(&a, &optimal_illuminations(&p, 3).unwrap(), &cells).unwrap();
        let predicted = cells.iter().map(|&k| a.column(k).norm_squared()).fold(f64::INFINITY, f64::min);
        assert!((gamma - predicted).abs() < 0.1 * predicted, "gamma {gamma} vs {predicted}");
    }

    #[test]
    fn bound_csv_header() {
        let setup = TheoremSetup::random_toy(10, 20, 2, 4, 0.1, 2).unwrap();
        let reports = check_theorem_bound(&setup, 1e-3, &[4]).unwrap();
        let mut buf = Vec::new();
        write_bound_reports_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("seed,gamma,epsilon,mu,delta,admissible,bound,measured,status\n4,"));
    }
}
