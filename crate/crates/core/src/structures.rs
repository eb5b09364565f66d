//! Multiple-measurement-vector data matrices and their model-matrix families.
//!
//! Every builder returns the data matrix `B` whose columns `b_q` satisfy
//! `A Lambda_q rho = b_q` (exactly or in the paraxial approximation) together
//! with the universal matrix `A` and the diagonal `Lambda_q` for each column.
//!
//! | kind              | shape           | factorization          |
//! |-------------------|-----------------|------------------------|
//! | `SingleFreq`      | `N x aleph`     | exact                  |
//! | `PronyToeplitz`   | `aleph x aleph` | exact                  |
//! | `PcStack`         | `N S x N`       | paraxial               |
//! | `PdBlock`         | `N S x N S`     | exact per block        |
//! | `MSingle`         | `N x N`         | exact (conjugated `A`) |
//! | `McStack`         | `N S x N`       | paraxial (conjugated)  |

use std::fmt;

use crate::error::{mismatch, ImagingError, Result};
use crate::forward::{green_vector, response_matrix, Illumination, ResponseTensor};
use crate::linalg::{column_norms, vector_relative_error, vstack, CMatrix, CVector, C64};
use crate::scene::{FrequencySet, ReflectivityVector, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataKind {
    SingleFreq,
    PronyToeplitz,
    PcStack,
    PdBlock,
    MSingle,
    McStack,
}

impl DataKind {
    pub const ALL: [DataKind; 6] = [
        DataKind::SingleFreq,
        DataKind::PronyToeplitz,
        DataKind::PcStack,
        DataKind::PdBlock,
        DataKind::MSingle,
        DataKind::McStack,
    ];

    pub fn tag(self) -> u8 {
        match self {
            DataKind::SingleFreq => 1,
            DataKind::PronyToeplitz => 2,
            DataKind::PcStack => 3,
            DataKind::PdBlock => 4,
            DataKind::MSingle => 5,
            DataKind::McStack => 6,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            DataKind::SingleFreq => "single_freq",
            DataKind::PronyToeplitz => "prony_toeplitz",
            DataKind::PcStack => "pc_stack",
            DataKind::PdBlock => "pd_block",
            DataKind::MSingle => "m_single",
            DataKind::McStack => "mc_stack",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Interferometric kinds span the conjugated model columns.
    pub fn is_interferometric(self) -> bool {
        matches!(self, DataKind::MSingle | DataKind::McStack)
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a data matrix came from, for the run manifest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub scene_hash: String,
    pub illuminations: Vec<String>,
    pub noise: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub entries: CMatrix,
    pub kind: DataKind,
    pub provenance: Provenance,
}

impl DataMatrix {
    pub fn new(entries: CMatrix, kind: DataKind, provenance: Provenance) -> Self {
        Self {
            entries,
            kind,
            provenance,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    /// Same matrix with additive noise recorded in the provenance.
    pub fn with_entries(&self, entries: CMatrix, noise: impl Into<String>) -> Self {
        Self {
            entries,
            kind: self.kind,
            provenance: Provenance {
                noise: noise.into(),
                ..self.provenance.clone()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    ParaxialApprox,
    /// Block-diagonal data: each frequency block factorizes exactly on its own
    /// slice of `A`, the stacked system does not.
    BlockExact,
}

impl Exactness {
    pub fn tag(self) -> u8 {
        match self {
            Exactness::Exact => 1,
            Exactness::ParaxialApprox => 2,
            Exactness::BlockExact => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        [Exactness::Exact, Exactness::ParaxialApprox, Exactness::BlockExact]
            .into_iter()
            .find(|e| e.tag() == tag)
    }
}

/// Universal model matrix `A` plus the diagonal of `Lambda_q` for each
/// excitation `q` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMatrixFamily {
    pub a: CMatrix,
    lambdas: Vec<CVector>,
    pub exactness: Exactness,
    pub column_norms: Vec<f64>,
    /// Documented approximation order for paraxial families.
    pub error_order: Option<String>,
}

impl ModelMatrixFamily {
    pub fn new(a: CMatrix, lambdas: Vec<CVector>, exactness: Exactness) -> Result<Self> {
        let k = a.ncols();
        if let Some(l) = lambdas.iter().find(|l| l.len() != k) {
            return Err(mismatch(k, l.len()));
        }
        let column_norms = column_norms(&a);
        if let Some(idx) = column_norms.iter().position(|&n| n == 0.0) {
            return Err(ImagingError::InvalidArgument(format!("model matrix column {idx} is zero")));
        }
        Ok(Self {
            a,
            lambdas,
            exactness,
            column_norms,
            error_order: None,
        })
    }

    /// Diagonal of `Lambda_q` (0-based `q`).
    pub fn lambda(&self, q: usize) -> &CVector {
        &self.lambdas[q]
    }

    pub fn lambdas(&self) -> &[CVector] {
        &self.lambdas
    }

    pub fn excitations(&self) -> usize {
        self.lambdas.len()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn grid_size(&self) -> usize {
        self.a.ncols()
    }

    /// `A Diag(lambda_q) rho`.
    pub fn predict(&self, q: usize, rho: &[C64]) -> CVector {
        let weights = CVector::from_iterator(rho.len(), rho.iter().zip(self.lambdas[q].iter()).map(|(r, l)| r * l));
        &self.a * weights
    }

    /// `||A Lambda_q rho - b_q|| / ||b_q||` for every column of `data`.
    pub fn factorization_residuals(&self, rho: &ReflectivityVector, data: &CMatrix) -> Vec<f64> {
        (0..data.ncols().min(self.excitations()))
            .map(|q| vector_relative_error(&self.predict(q, &rho.values), &data.column(q).into_owned()))
            .collect()
    }
}

fn provenance(scene: &Scene, illuminations: &[Illumination]) -> Provenance {
    Provenance {
        scene_hash: scene.content_hash(),
        illuminations: illuminations.iter().map(|f| f.label.to_string()).collect(),
        noise: "none".into(),
    }
}

/// Single-frequency model matrix: columns `g(y_k; w_l)`.
pub fn single_freq_model(scene: &Scene, l: usize) -> Result<CMatrix> {
    let kappa = scene.frequencies.wavenumber(l);
    let n = scene.array.len();
    let mut a = CMatrix::zeros(n, scene.grid.len());
    for k in 0..scene.grid.len() {
        a.set_column(k, &green_vector(&scene.grid.point(k), kappa, &scene.array)?);
    }
    Ok(a)
}

/// Data from illuminations `f_q` at frequency `l`: `b_q = P(w_l) f_q`, with
/// `A = [g(y_k)]` and `Lambda_q = Diag(A^T f_q)`.
pub fn build_single_freq(
    scene: &Scene,
    l: usize,
    illuminations: &[Illumination],
) -> Result<(DataMatrix, ModelMatrixFamily)> {
    if illuminations.is_empty() {
        return Err(ImagingError::InvalidArgument("at least one illumination is required".into()));
    }
    let n = scene.array.len();
    if let Some(f) = illuminations.iter().find(|f| f.len() != n) {
        return Err(mismatch(n, f.len()));
    }
    let p = response_matrix(scene, l)?;
    let mut b = CMatrix::zeros(n, illuminations.len());
    for (q, f) in illuminations.iter().enumerate() {
        b.set_column(q, &(&p * &f.vector));
    }
    let a = single_freq_model(scene, l)?;
    let at = a.transpose();
    let lambdas = illuminations.iter().map(|f| &at * &f.vector).collect();
    let family = ModelMatrixFamily::new(a, lambdas, Exactness::Exact)?;
    Ok((
        DataMatrix::new(b, DataKind::SingleFreq, provenance(scene, illuminations)),
        family,
    ))
}

/// One-dimensional scene probed by a single transducer: candidate delays on a
/// uniform grid and scatterers at (possibly off-grid) delays.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayScene {
    pub grid: Vec<f64>,
    pub scatterers: Vec<(f64, C64)>,
}

impl DelayScene {
    /// `count` candidate delays `start + n * step`.
    pub fn uniform_grid(start: f64, step: f64, count: usize) -> Vec<f64> {
        (0..count).map(|n| start + step * n as f64).collect()
    }

    /// Scene with scatterers placed exactly on the listed grid indices.
    pub fn on_grid(grid: Vec<f64>, placed: &[(usize, C64)]) -> Self {
        let scatterers = placed.iter().map(|&(k, rho)| (grid[k], rho)).collect();
        Self { grid, scatterers }
    }

    /// Reflectivity vector over the delay grid (nearest candidate delay).
    pub fn reflectivity(&self) -> Result<ReflectivityVector> {
        let mut values = vec![C64::new(0.0, 0.0); self.grid.len()];
        let mut owner: Vec<Option<usize>> = vec![None; self.grid.len()];
        for (j, &(delay, rho)) in self.scatterers.iter().enumerate() {
            let k = self.nearest(delay).ok_or(ImagingError::OutsideWindow { index: j })?;
            if let Some(first) = owner[k] {
                return Err(ImagingError::TwoScatterersOneCell { first, second: j, cell: k });
            }
            owner[k] = Some(j);
            values[k] = rho;
        }
        let support = (0..self.grid.len()).filter(|&k| owner[k].is_some()).collect();
        Ok(ReflectivityVector { values, support })
    }

    fn nearest(&self, delay: f64) -> Option<usize> {
        self.grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - delay).abs().total_cmp(&(b.1 - delay).abs()))
            .map(|(k, _)| k)
    }

    /// `b_m = sum_n exp(2 i kappa_m y_n) rho_n` at the true delays.
    pub fn measurements(&self, freqs: &FrequencySet) -> Vec<C64> {
        (0..freqs.len())
            .map(|m| {
                let kappa = freqs.wavenumber(m);
                self.scatterers
                    .iter()
                    .map(|&(y, rho)| C64::from_polar(1.0, 2.0 * kappa * y) * rho)
                    .sum()
            })
            .collect()
    }
}

/// Prony stacking of single-transducer multifrequency data. With
/// `S = 2 aleph - 1` equispaced wavenumbers, `B[i][j] = b_{i+j}` (0-based),
/// `A[m][k] = exp(2 i kappa_m y_k)` for `m < aleph`, and column `q` (0-based)
/// is matched by `Lambda_1^q` with `Lambda_1 = Diag(exp(2 i dkappa y_k))`.
pub fn build_prony(scene: &DelayScene, freqs: &FrequencySet) -> Result<(DataMatrix, ModelMatrixFamily)> {
    let s = freqs.len();
    if s.is_multiple_of(2) {
        return Err(ImagingError::SNotOdd(s));
    }
    freqs.wavenumber_step().ok_or(ImagingError::NotEquispaced)?;
    let aleph = s.div_ceil(2);
    let b = scene.measurements(freqs);
    let data = CMatrix::from_fn(aleph, aleph, |i, j| b[i + j]);

    let k = scene.grid.len();
    let a = CMatrix::from_fn(aleph, k, |m, n| C64::from_polar(1.0, 2.0 * freqs.wavenumber(m) * scene.grid[n]));
    // Lambda_1^q from the actual offsets kappa_q - kappa_0: a differenced
    // step carries an ulp of kappa, which q * 2y amplifies past 1e-12
    let lambdas = (0..aleph)
        .map(|q| {
            let offset = freqs.wavenumber(q) - freqs.wavenumber(0);
            CVector::from_iterator(k, scene.grid.iter().map(|&y| C64::from_polar(1.0, 2.0 * offset * y)))
        })
        .collect();
    let family = ModelMatrixFamily::new(a, lambdas, Exactness::Exact)?;
    let prov = Provenance {
        scene_hash: format!("delay-scene:{}", scene.scatterers.len()),
        illuminations: vec!["single-transducer".into()],
        noise: "none".into(),
    };
    Ok((DataMatrix::new(data, DataKind::PronyToeplitz, prov), family))
}

/// Stacked model columns `h(y_k; w_l) = exp(i kappa_l (L + eta_k)) g(y_k; w_l)`.
pub fn paraxial_model(scene: &Scene) -> Result<CMatrix> {
    let n = scene.array.len();
    let s = scene.frequencies.len();
    let mut a = CMatrix::zeros(n * s, scene.grid.len());
    for l in 0..s {
        let kappa = scene.frequencies.wavenumber(l);
        for k in 0..scene.grid.len() {
            let y = scene.grid.point(k);
            let g = green_vector(&y, kappa, &scene.array)?;
            // the array sits at range 0, so L + eta_k is the range coordinate
            let phase = C64::from_polar(1.0, kappa * y[2]);
            for r in 0..n {
                a[(l * n + r, k)] = phase * g[r];
            }
        }
    }
    Ok(a)
}

/// Stacked single-frequency model columns `[g(y_k; w_1); ...; g(y_k; w_S)]`.
pub fn stacked_green_model(scene: &Scene) -> Result<CMatrix> {
    let blocks = (0..scene.frequencies.len())
        .map(|l| single_freq_model(scene, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(vstack(&blocks))
}

/// Paraxial excitation phases `exp(i kappa_c |x_q - y_k|^2 / (2 L))` using
/// cross-range coordinates.
pub fn paraxial_lambdas(scene: &Scene) -> Vec<CVector> {
    let kc = scene.frequencies.central_wavenumber();
    let standoff = scene.grid.standoff();
    scene
        .array
        .positions()
        .iter()
        .map(|x| {
            CVector::from_fn(scene.grid.len(), |k, _| {
                let y = scene.grid.cross_range(k);
                let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
                C64::from_polar(1.0, kc * d2 / (2.0 * standoff))
            })
        })
        .collect()
}

fn check_tensor(scene: &Scene, tensor: &ResponseTensor) -> Result<()> {
    if tensor.transducers() != scene.array.len() || tensor.frequencies() != scene.frequencies.len() {
        return Err(mismatch(
            format!("{} transducers x {} frequencies", scene.array.len(), scene.frequencies.len()),
            format!("{} x {}", tensor.transducers(), tensor.frequencies()),
        ));
    }
    Ok(())
}

/// `P^c = [P(w_1)^T; ...; P(w_S)^T]` with the paraxial family built on
/// `h(y_k; w_l)`, one excitation per point source (`aleph = N`).
pub fn build_pc(scene: &Scene, tensor: &ResponseTensor) -> Result<(DataMatrix, ModelMatrixFamily)> {
    check_tensor(scene, tensor)?;
    let blocks: Vec<CMatrix> = tensor.slices().iter().map(|p| p.transpose()).collect();
    let data = vstack(&blocks);
    let mut family = ModelMatrixFamily::new(paraxial_model(scene)?, paraxial_lambdas(scene), Exactness::ParaxialApprox)?;
    family.error_order = Some("O(B a^2 / (c0 L) + w_c a^4 / (c0 L^3))".into());
    let prov = Provenance {
        scene_hash: scene.content_hash(),
        illuminations: (0..scene.array.len()).map(|q| format!("e{}", q + 1)).collect(),
        noise: "none".into(),
    };
    Ok((DataMatrix::new(data, DataKind::PcStack, prov), family))
}

/// Block-diagonal `P^d = diag(P(w_1), ..., P(w_S))`.
pub fn build_pd(tensor: &ResponseTensor) -> DataMatrix {
    let n = tensor.transducers();
    let s = tensor.frequencies();
    let mut d = CMatrix::zeros(n * s, n * s);
    for (l, p) in tensor.slices().iter().enumerate() {
        d.view_mut((l * n, l * n), (n, n)).copy_from(p);
    }
    DataMatrix::new(d, DataKind::PdBlock, Provenance::default())
}

/// Imaging family for block-diagonal data: stacked Green's columns, with the
/// excitation of column `l N + q` being `g(y_k; w_l)^T e_q` on block `l`.
pub fn block_family(scene: &Scene) -> Result<ModelMatrixFamily> {
    let n = scene.array.len();
    let a = stacked_green_model(scene)?;
    let mut lambdas = Vec::with_capacity(n * scene.frequencies.len());
    for l in 0..scene.frequencies.len() {
        for q in 0..n {
            lambdas.push(CVector::from_fn(scene.grid.len(), |k, _| a[(l * n + q, k)]));
        }
    }
    ModelMatrixFamily::new(a, lambdas, Exactness::BlockExact)
}

/// Interferometric matrix `M = P^* P`.
pub fn build_m_single(p: &CMatrix) -> DataMatrix {
    let mut m = p.adjoint() * p;
    // exact Hermitian storage
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DataMatrix::new(m, DataKind::MSingle, Provenance::default())
}

/// `M^c = [P(w_1)^* P(w_1); P(w_2)^* P(w_1); ...; P(w_S)^* P(w_1)]`.
pub fn build_mc(tensor: &ResponseTensor) -> DataMatrix {
    let p1 = tensor.slice(0);
    let blocks: Vec<CMatrix> = tensor.slices().iter().map(|p| p.adjoint() * p1).collect();
    DataMatrix::new(vstack(&blocks), DataKind::McStack, Provenance::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{response_tensor, IlluminationLabel};
    use crate::linalg::{relative_error, singular_values};
    use crate::scene::{ArrayGeometry, ImagingGrid, Scatterer};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grid_scene(placed: &[(usize, C64)], freqs: FrequencySet) -> Scene {
        let grid = ImagingGrid::centered(0.0, 60.0, 12.0, 12.0, 7, 7).unwrap();
        let scatterers = placed.iter().map(|&(k, a)| Scatterer::new(grid.point(k), a).unwrap()).collect();
        Scene::new(ArrayGeometry::linear(8, 40.0).unwrap(), scatterers, grid, freqs)
    }

    #[test]
    fn point_illuminations_reproduce_response_matrix() {
        let scene = grid_scene(&[(10, c(1.0, 0.5)), (30, c(-0.4, 1.0))], FrequencySet::single_central());
        let (b, fam) = build_single_freq(&scene, 0, &Illumination::all_points(8)).unwrap();
        assert_eq!(b.entries, response_matrix(&scene, 0).unwrap());
        assert_eq!(b.kind, DataKind::SingleFreq);
        assert_eq!(fam.exactness, Exactness::Exact);
        let rho = scene.discretize_reflectivity().unwrap();
        assert!(fam.factorization_residuals(&rho, &b.entries).iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn single_scatterer_single_term() {
        let scene = grid_scene(&[(24, c(2.0, -1.0))], FrequencySet::single_central());
        let (b, fam) = build_single_freq(&scene, 0, &[Illumination::point(8, 0)]).unwrap();
        let rho = scene.discretize_reflectivity().unwrap();
        let g = green_vector(&scene.grid.point(24), 2.0 * std::f64::consts::PI, &scene.array).unwrap();
        let expected = &g * (g[0] * c(2.0, -1.0));
        assert!(vector_relative_error(&b.entries.column(0).into_owned(), &expected) < 1e-15);
        assert!(vector_relative_error(&fam.predict(0, &rho.values), &expected) < 1e-13);
    }

    #[test]
    fn single_freq_dimension_mismatch() {
        let scene = grid_scene(&[(3, c(1.0, 0.0))], FrequencySet::single_central());
        assert!(matches!(
            build_single_freq(&scene, 0, &[Illumination::point(5, 0)]),
            Err(ImagingError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prony_rank_one_and_structure() {
        let freqs = FrequencySet::from_wavenumbers(6.0, 0.05, 9).unwrap();
        let grid = DelayScene::uniform_grid(100.0, 0.5, 20);
        let scene = DelayScene::on_grid(grid, &[(4, c(1.0, 0.0))]);
        let (b, fam) = build_prony(&scene, &freqs).unwrap();
        assert_eq!(b.shape(), (5, 5));
        let y = scene.grid[4];
        for i in 0..5 {
            for j in 0..5 {
                let expect = C64::from_polar(1.0, 2.0 * freqs.wavenumber(i + j) * y);
                assert!((b.entries[(i, j)] - expect).norm() < 1e-12);
            }
        }
        let s = singular_values(&b.entries);
        assert!(s[1] < 1e-12 * s[0]);
        assert!(fam.lambda(0).iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn prony_degenerate_and_errors() {
        let freqs = FrequencySet::from_wavenumbers(6.0, 0.05, 1).unwrap();
        let scene = DelayScene::on_grid(DelayScene::uniform_grid(10.0, 1.0, 4), &[(1, c(0.5, 0.5))]);
        let (b, _) = build_prony(&scene, &freqs).unwrap();
        assert_eq!(b.shape(), (1, 1));
        assert_eq!(b.entries[(0, 0)], scene.measurements(&freqs)[0]);

        let even = FrequencySet::from_wavenumbers(6.0, 0.05, 4).unwrap();
        assert_eq!(build_prony(&scene, &even).unwrap_err(), ImagingError::SNotOdd(4));
        let mut w = FrequencySet::from_wavenumbers(6.0, 0.05, 5).unwrap().frequencies().to_vec();
        w[2] += 1e-4;
        let uneven = FrequencySet::new(w, 1.0).unwrap();
        assert_eq!(build_prony(&scene, &uneven).unwrap_err(), ImagingError::NotEquispaced);
    }

    #[test]
    fn pc_single_slice_is_transpose() {
        let scene = grid_scene(&[(10, c(1.0, 0.0))], FrequencySet::single_central());
        let t = response_tensor(&scene).unwrap();
        let (b, fam) = build_pc(&scene, &t).unwrap();
        assert_eq!(b.entries, t.slice(0).transpose());
        assert_eq!(fam.exactness, Exactness::ParaxialApprox);
        let g = single_freq_model(&scene, 0).unwrap();
        for k in 0..scene.grid.len() {
            let ratio = fam.a[(0, k)] / g[(0, k)];
            assert!((ratio.norm() - 1.0).abs() < 1e-12);
            for r in 1..8 {
                assert!((fam.a[(r, k)] / g[(r, k)] - ratio).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pc_on_axis_phases() {
        // window centre on the array axis: eta = 0, cross range 0
        let grid = ImagingGrid::centered(0.0, 100.0, 4.0, 4.0, 3, 3).unwrap();
        let centre = grid.index(1, 1);
        let array = ArrayGeometry::new(vec![[0.0; 3], [5.0, 0.0, 0.0]]).unwrap();
        let freqs = FrequencySet::equispaced_band(3, 0.05).unwrap();
        let scene = Scene::new(
            array,
            vec![Scatterer::new(grid.point(centre), c(1.0, 0.0)).unwrap()],
            grid,
            freqs.clone(),
        );
        let t = response_tensor(&scene).unwrap();
        let (_, fam) = build_pc(&scene, &t).unwrap();
        assert!((fam.lambda(0)[centre] - c(1.0, 0.0)).norm() < 1e-15);
        for l in 0..3 {
            let kappa = freqs.wavenumber(l);
            let g = green_vector(&scene.grid.point(centre), kappa, &scene.array).unwrap();
            let expected = C64::from_polar(1.0, kappa * 100.0) * g[0];
            assert!((fam.a[(l * 2, centre)] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn pd_is_block_diagonal() {
        let scene = grid_scene(&[(10, c(1.0, 0.0)), (40, c(0.3, 0.3))], FrequencySet::equispaced_band(3, 0.1).unwrap());
        let t = response_tensor(&scene).unwrap();
        let d = build_pd(&t);
        assert_eq!(d.shape(), (24, 24));
        for l in 0..3 {
            for m in 0..3 {
                let block = d.entries.view((l * 8, m * 8), (8, 8)).into_owned();
                if l == m {
                    assert_eq!(&block, t.slice(l));
                } else {
                    assert!(block.iter().all(|z| *z == c(0.0, 0.0)));
                }
            }
        }
        let mut union: Vec<f64> = (0..3).flat_map(|l| singular_values(t.slice(l))).collect();
        union.sort_by(|a, b| b.total_cmp(a));
        let s = singular_values(&d.entries);
        for (a, b) in s.iter().zip(&union) {
            assert!((a - b).abs() <= 1e-12 * union[0]);
        }
        let one = ResponseTensor::from_slices(vec![t.slice(1).clone()]).unwrap();
        assert_eq!(build_pd(&one).entries, *t.slice(1));
    }

    #[test]
    fn m_single_is_hermitian_psd() {
        let scene = grid_scene(&[(10, c(1.0, 0.0)), (40, c(0.3, 0.3))], FrequencySet::single_central());
        let p = response_matrix(&scene, 0).unwrap();
        let m = build_m_single(&p);
        assert!(relative_error(&m.entries.adjoint(), &m.entries) < 1e-13);
        let mut eig: Vec<f64> = m.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let sv = singular_values(&p);
        for (e, s) in eig.iter().zip(&sv) {
            assert!((e - s * s).abs() <= 1e-12 * sv[0] * sv[0]);
        }
    }

    #[test]
    fn m_single_rank_one() {
        let g = CVector::from_fn(4, |i, _| c(1.0 + i as f64, -0.5 * i as f64));
        let p = &g * g.transpose();
        let m = build_m_single(&p);
        let expected = g.conjugate() * g.transpose() * C64::from(g.norm_squared());
        assert!(relative_error(&m.entries, &expected) < 1e-14);
        let s = singular_values(&m.entries);
        assert!(s[1] < 1e-12 * s[0]);
    }

    #[test]
    fn mc_blocks_match_naive_products() {
        let scene = grid_scene(&[(10, c(1.0, 0.0)), (40, c(0.3, 0.3))], FrequencySet::equispaced_band(3, 0.1).unwrap());
        let t = response_tensor(&scene).unwrap();
        let mc = build_mc(&t);
        assert_eq!(mc.shape(), (24, 8));
        for l in 0..3 {
            let (pl, p1) = (t.slice(l), t.slice(0));
            for i in 0..8 {
                for j in 0..8 {
                    let naive: C64 = (0..8).map(|k| pl[(k, i)].conj() * p1[(k, j)]).sum();
                    assert!((mc.entries[(l * 8 + i, j)] - naive).norm() < 1e-13 * naive.norm().max(1e-12));
                }
            }
        }
        let single = ResponseTensor::from_slices(vec![t.slice(0).clone()]).unwrap();
        assert!(relative_error(&build_mc(&single).entries, &build_m_single(t.slice(0)).entries) < 1e-15);
        let zero = ResponseTensor::from_slices(vec![CMatrix::zeros(3, 3); 2]).unwrap();
        assert!(build_mc(&zero).entries.iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn kind_tags_round_trip() {
        for k in DataKind::ALL {
            assert_eq!(DataKind::from_tag(k.tag()), Some(k));
            assert_eq!(DataKind::from_name(k.name()), Some(k));
        }
        assert_eq!(IlluminationLabel::Point(0).to_string(), "e1");
    }
}
