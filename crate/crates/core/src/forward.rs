//! Born-approximation array data.
//!
//! The echo recorded at `x_r` for a unit pulse sent from `x_s` is
//! `P(x_r, x_s; w) = sum_j alpha_j G(x_r, z_j; w) G(z_j, x_s; w)` with the
//! free-space Green's function `G(x, y; w) = exp(i k |x - y|) / (4 pi |x - y|)`.
//! Multiple scattering is neglected by construction.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{mismatch, ImagingError, Result};
use crate::linalg::{frobenius, CMatrix, CVector, C64};
use crate::rng::{self, Stream};
use crate::scene::{distance, ArrayGeometry, Point3, Scene};

/// Free-space Green's function between two points at wavenumber `kappa`.
pub fn green_scalar(x: &Point3, y: &Point3, kappa: f64) -> Result<C64> {
    let r = distance(x, y);
    if r == 0.0 {
        return Err(ImagingError::CoincidentPoints);
    }
    Ok(C64::from_polar(1.0 / (4.0 * PI * r), kappa * r))
}

/// `g(y; w)`: field at every transducer due to a point source at `y`.
pub fn green_vector(y: &Point3, kappa: f64, array: &ArrayGeometry) -> Result<CVector> {
    let mut g = CVector::zeros(array.len());
    for (r, x) in array.positions().iter().enumerate() {
        g[r] = green_scalar(x, y, kappa)?;
    }
    Ok(g)
}

/// Single-frequency response matrix `P(w_l) = sum_j alpha_j g_j g_j^T`
/// evaluated at the true (continuous) scatterer positions.
pub fn response_matrix(scene: &Scene, l: usize) -> Result<CMatrix> {
    let n = scene.array.len();
    let kappa = scene.frequencies.wavenumber(l);
    let mut p = CMatrix::zeros(n, n);
    for s in &scene.scatterers {
        let g = green_vector(&s.position, kappa, &scene.array)?;
        // upper triangle only, in a fixed order; mirrored below so the
        // reciprocity P = P^T holds bit for bit
        for c in 0..n {
            let w = s.reflectivity * g[c];
            for r in 0..=c {
                p[(r, c)] += g[r] * w;
            }
        }
    }
    for c in 0..n {
        for r in c + 1..n {
            p[(r, c)] = p[(c, r)];
        }
    }
    Ok(p)
}

/// Multi-frequency array response, one `N x N` slice per frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTensor {
    slices: Vec<CMatrix>,
}

impl ResponseTensor {
    pub fn from_slices(slices: Vec<CMatrix>) -> Result<Self> {
        let n = slices.first().map(|s| s.nrows()).unwrap_or(0);
        if slices.is_empty() {
            return Err(ImagingError::InvalidArgument("tensor needs at least one frequency".into()));
        }
        for s in &slices {
            if s.shape() != (n, n) {
                return Err(mismatch(format!("{n}x{n}"), format!("{}x{}", s.nrows(), s.ncols())));
            }
        }
        Ok(Self { slices })
    }

    /// `P[r][s][l]`.
    pub fn get(&self, r: usize, s: usize, l: usize) -> C64 {
        self.slices[l][(r, s)]
    }

    pub fn slice(&self, l: usize) -> &CMatrix {
        &self.slices[l]
    }

    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    pub fn transducers(&self) -> usize {
        self.slices[0].nrows()
    }

    pub fn frequencies(&self) -> usize {
        self.slices.len()
    }

    /// Replace every slice by `f(l, slice)`.
    pub fn map(&self, mut f: impl FnMut(usize, &CMatrix) -> Result<CMatrix>) -> Result<Self> {
        let slices = self.slices.iter().enumerate().map(|(l, s)| f(l, s)).collect::<Result<Vec<_>>>()?;
        Self::from_slices(slices)
    }
}

/// All response matrices of the scene. Frequencies are evaluated in parallel;
/// each slice is computed sequentially so results do not depend on the
/// thread count.
pub fn response_tensor(scene: &Scene) -> Result<ResponseTensor> {
    let slices = (0..scene.frequencies.len())
        .into_par_iter()
        .map(|l| response_matrix(scene, l))
        .collect::<Result<Vec<_>>>()?;
    ResponseTensor::from_slices(slices)
}

/// Provenance of an illumination vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IlluminationLabel {
    /// Basis vector `e_q` (0-based).
    Point(usize),
    /// Right singular vector `v_j` of the response matrix (0-based).
    Optimal(usize),
    /// Member `index` of a random set drawn with `seed`.
    Random { seed: u64, index: usize },
    Custom(String),
}

impl fmt::Display for IlluminationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IlluminationLabel::Point(q) => write!(f, "e{}", q + 1),
            IlluminationLabel::Optimal(j) => write!(f, "v{}", j + 1),
            IlluminationLabel::Random { seed, index } => write!(f, "rand{seed}_{}", index + 1),
            IlluminationLabel::Custom(name) => f.write_str(name),
        }
    }
}

/// Signals sent from the transducers: one complex weight per source. The same
/// pattern is used at every frequency it is applied to.
#[derive(Debug, Clone, PartialEq)]
pub struct Illumination {
    pub vector: CVector,
    pub label: IlluminationLabel,
}

impl Illumination {
    pub fn new(vector: CVector, label: IlluminationLabel) -> Result<Self> {
        if vector.iter().all(|z| z.norm() == 0.0) {
            return Err(ImagingError::InvalidArgument("illumination vector must be nonzero".into()));
        }
        Ok(Self { vector, label })
    }

    /// `e_q` on an `n`-element array (0-based `q`).
    pub fn point(n: usize, q: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[q] = C64::new(1.0, 0.0);
        Self {
            vector: v,
            label: IlluminationLabel::Point(q),
        }
    }

    /// The `n` basis illuminations `e_1..e_n`.
    pub fn all_points(n: usize) -> Vec<Self> {
        (0..n).map(|q| Self::point(n, q)).collect()
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }
}

/// Echoes at the receivers, `P f`.
pub fn apply_illumination(p: &CMatrix, f: &Illumination) -> Result<CVector> {
    if p.ncols() != f.len() {
        return Err(mismatch(p.ncols(), f.len()));
    }
    Ok(p * &f.vector)
}

/// Per-entry variance giving the requested SNR (dB) relative to the mean
/// power of `b`: `sigma^2 = ||b||_F^2 / (entries * 10^(snr/10))`.
pub fn noise_variance(b: &CMatrix, snr_db: f64) -> Result<f64> {
    let energy = frobenius(b).powi(2);
    if energy == 0.0 {
        return Err(ImagingError::ZeroSignal);
    }
    Ok(energy / (b.len() as f64 * 10f64.powf(snr_db / 10.0)))
}

/// The noise matrix `E` that `add_noise` would add.
pub fn noise_matrix(b: &CMatrix, snr_db: f64, seed: u64) -> Result<CMatrix> {
    let var = noise_variance(b, snr_db)?;
    let mut r = rng::rng(seed, Stream::DataNoise);
    Ok(rng::complex_normal_matrix(&mut r, b.nrows(), b.ncols(), var))
}

/// `B + E` with i.i.d. circular complex Gaussian `E` at the given SNR.
pub fn add_noise(b: &CMatrix, snr_db: f64, seed: u64) -> Result<CMatrix> {
    Ok(b + noise_matrix(b, snr_db, seed)?)
}

/// Add noise independently to every slice of a tensor, each slice at the
/// given SNR, with per-slice seeds derived from `seed`.
pub fn add_tensor_noise(tensor: &ResponseTensor, snr_db: f64, seed: u64) -> Result<ResponseTensor> {
    tensor.map(|l, s| add_noise(s, snr_db, seed.wrapping_mul(1_000_003).wrapping_add(l as u64)))
}
