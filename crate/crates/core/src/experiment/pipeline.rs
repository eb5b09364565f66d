//! One imaging run: scene -> data structure (full phase or from intensities)
//! -> optional noise -> MUSIC -> support.

use crate::error::{ImagingError, Result};
use crate::forward::{add_noise, add_tensor_noise, response_matrix, response_tensor, Illumination, ResponseTensor};
use crate::linalg::{CMatrix, C64};
use crate::music::{decompose, extract_support, local_peaks, pseudospectrum, ImagingOptions, Pseudospectrum, RankPolicy, SubspaceDecomposition};
use crate::phaseless::{
    add_intensity_noise, measure_intensities, recover_interferometric_with_fallback, recover_mc, AcquisitionPlan,
    IntensityTable,
};
use crate::robustness::{weyl_check, WeylCheck};
use crate::scene::Scene;
use crate::structures::{
    block_family, build_m_single, build_mc, build_pc, build_pd, build_prony, build_single_freq, single_freq_model,
    DataKind, DataMatrix, DelayScene, Exactness, ModelMatrixFamily,
};

/// Where noise enters phaseless data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Real Gaussian noise on the recorded intensities.
    #[default]
    Intensity,
    /// Complex noise on the echoes before the intensities are formed.
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Acquisition {
    #[default]
    FullPhase,
    Phaseless(NoiseMode),
}

#[derive(Debug, Clone)]
pub struct ImagingRequest<'a> {
    pub scene: &'a Scene,
    pub kind: DataKind,
    pub acquisition: Acquisition,
    /// Single-frequency illuminations; point illuminations when `None`.
    pub illuminations: Option<&'a [Illumination]>,
    pub snr_db: Option<f64>,
    pub seed: u64,
    /// `None` uses the number of scatterers (times `S` for block data).
    pub rank: Option<RankPolicy>,
    /// `None` uses the calibrated default for the data kind.
    pub conjugate: Option<bool>,
}

impl<'a> ImagingRequest<'a> {
    pub fn new(scene: &'a Scene, kind: DataKind) -> Self {
        Self {
            scene,
            kind,
            acquisition: Acquisition::FullPhase,
            illuminations: None,
            snr_db: None,
            seed: 0,
            rank: None,
            conjugate: None,
        }
    }
}

/// Whether MUSIC should project conjugated model columns for this data kind.
/// Interferometric data live in the span of `conj(A)`.
pub fn default_conjugation(kind: DataKind) -> bool {
    kind.is_interferometric()
}

#[derive(Debug, Clone)]
pub struct ImagingOutcome {
    pub data: DataMatrix,
    pub family: ModelMatrixFamily,
    pub decomposition: SubspaceDecomposition,
    pub image: Pseudospectrum,
    /// Estimated scatterer count used for the support.
    pub support: Vec<usize>,
    /// Local-maximum variant of the support, for diagnostics.
    pub peaks: Vec<usize>,
    /// Singular-value shifts against the noise-free data, when noisy.
    pub weyl: Option<WeylCheck>,
    /// Intensities clamped at zero after noise.
    pub clamped: usize,
}

/// Noise-free data and model family for a data kind.
pub fn clean_data(scene: &Scene, kind: DataKind, illuminations: Option<&[Illumination]>) -> Result<(DataMatrix, ModelMatrixFamily)> {
    match kind {
        DataKind::SingleFreq => {
            let default;
            let illums = match illuminations {
                Some(f) => f,
                None => {
                    default = Illumination::all_points(scene.array.len());
                    &default
                }
            };
            build_single_freq(scene, 0, illums)
        }
        DataKind::PronyToeplitz => {
            let delay = delay_scene(scene)?;
            build_prony(&delay, &scene.frequencies)
        }
        _ => {
            let tensor = response_tensor(scene)?;
            data_from_tensor(scene, kind, &tensor)
        }
    }
}

fn data_from_tensor(scene: &Scene, kind: DataKind, tensor: &ResponseTensor) -> Result<(DataMatrix, ModelMatrixFamily)> {
    Ok(match kind {
        DataKind::PcStack => build_pc(scene, tensor)?,
        DataKind::PdBlock => (build_pd(tensor), block_family(scene)?),
        DataKind::MSingle => (build_m_single(tensor.slice(0)), interferometric_family(scene)?),
        DataKind::McStack => (build_mc(tensor), build_pc(scene, tensor)?.1),
        DataKind::SingleFreq | DataKind::PronyToeplitz => unreachable!("handled without a tensor"),
    })
}

fn interferometric_family(scene: &Scene) -> Result<ModelMatrixFamily> {
    ModelMatrixFamily::new(single_freq_model(scene, 0)?, Vec::new(), Exactness::Exact)
}

/// Range-only view of a scene for Prony processing: one transducer at the
/// origin and a grid along range. The echo `exp(2 i k r) alpha / (4 pi r)^2`
/// is a delay term with reflectivity `alpha / (4 pi r)^2`.
pub fn delay_scene(scene: &Scene) -> Result<DelayScene> {
    if scene.array.len() != 1 || scene.array.positions()[0] != [0.0; 3] {
        return Err(ImagingError::InvalidArgument("Prony data need a single transducer at the origin".into()));
    }
    let (nx, _) = scene.grid.dims();
    if nx != 1 || scene.grid.origin()[0] != 0.0 {
        return Err(ImagingError::InvalidArgument("Prony data need a range-only grid on the array axis".into()));
    }
    let grid: Vec<f64> = scene.grid.points().iter().map(|p| p[2]).collect();
    let scatterers = scene
        .scatterers
        .iter()
        .map(|s| {
            let r = s.position[2];
            (r, s.reflectivity / C64::new((4.0 * std::f64::consts::PI * r).powi(2), 0.0))
        })
        .collect();
    Ok(DelayScene { grid, scatterers })
}

fn noisy_intensity_data(req: &ImagingRequest, tensor: &ResponseTensor, mode: NoiseMode) -> Result<(CMatrix, usize)> {
    let n = tensor.transducers();
    let s = if req.kind == DataKind::MSingle { 1 } else { tensor.frequencies() };
    let plan = if s == 1 {
        AcquisitionPlan::interferometric(0, n, 0)
    } else {
        AcquisitionPlan::multifrequency(s, n, 0)
    };
    let fields = match (mode, req.snr_db) {
        (NoiseMode::Field, Some(snr)) => add_tensor_noise(tensor, snr, req.seed)?,
        _ => tensor.clone(),
    };
    let mut records = measure_intensities(&fields, &plan)?;
    let mut clamped = 0;
    if let (NoiseMode::Intensity, Some(snr)) = (mode, req.snr_db) {
        let (noisy, c) = add_intensity_noise(&records, snr, req.seed)?;
        records = noisy;
        clamped = c;
    }
    let table = IntensityTable::from_records(&records);
    let m = if s == 1 {
        recover_interferometric_with_fallback(&table, 0, n)?.0
    } else {
        recover_mc(&table, s, n, 0)?
    };
    Ok((m, clamped))
}

pub fn image(req: &ImagingRequest) -> Result<ImagingOutcome> {
    let scene = req.scene;
    if scene.scatterers.is_empty() {
        return Err(ImagingError::InvalidArgument("the scene has no scatterers".into()));
    }
    let kind = req.kind;
    let (clean, family) = clean_data(scene, kind, req.illuminations)?;
    let mut clamped = 0;

    let noisy: Option<CMatrix> = match (req.acquisition, kind) {
        (Acquisition::Phaseless(mode), DataKind::MSingle | DataKind::McStack) => {
            let tensor = response_tensor(scene)?;
            let (m, c) = noisy_intensity_data(req, &tensor, mode)?;
            clamped = c;
            Some(m)
        }
        (Acquisition::Phaseless(_), _) => {
            return Err(ImagingError::InvalidArgument(format!(
                "{} data cannot be acquired from intensities",
                kind.name()
            )))
        }
        (Acquisition::FullPhase, _) => match req.snr_db {
            None => None,
            Some(snr) => Some(match kind {
                DataKind::SingleFreq | DataKind::PronyToeplitz => add_noise(&clean.entries, snr, req.seed)?,
                _ => {
                    let tensor = add_tensor_noise(&response_tensor(scene)?, snr, req.seed)?;
                    data_from_tensor(scene, kind, &tensor)?.0.entries
                }
            }),
        },
    };
    let weyl = noisy.as_ref().map(|b| weyl_check(&clean.entries, b));
    let data = match noisy {
        Some(b) => {
            let label = match (req.acquisition, req.snr_db) {
                (Acquisition::Phaseless(NoiseMode::Intensity), Some(snr)) => format!("intensity snr={snr}dB seed={}", req.seed),
                (_, Some(snr)) => format!("field snr={snr}dB seed={}", req.seed),
                (_, None) => "phaseless".into(),
            };
            clean.with_entries(b, label)
        }
        None => clean,
    };

    let s = scene.frequencies.len();
    let scatterers = scene.scatterers.len();
    let rank = req.rank.unwrap_or(RankPolicy::Known(if kind == DataKind::PdBlock { scatterers * s } else { scatterers }));
    let decomposition = decompose(&data.entries, rank)?;
    let opts = ImagingOptions {
        conjugate: req.conjugate.unwrap_or_else(|| default_conjugation(kind)),
        ..ImagingOptions::default()
    };
    let image = pseudospectrum(&decomposition, &family, opts)?;
    let count = if kind == DataKind::PdBlock {
        decomposition.rank.div_ceil(s)
    } else {
        decomposition.rank
    };
    let support = extract_support(&image.values, count);
    let peaks = local_peaks(&image.values, scene.grid.dims(), count);
    Ok(ImagingOutcome {
        data,
        family,
        decomposition,
        image,
        support,
        peaks,
        weyl,
        clamped,
    })
}

/// Noise-free response matrix at the first frequency, e.g. to derive
/// optimal illuminations.
pub fn first_response(scene: &Scene) -> Result<CMatrix> {
    response_matrix(scene, 0)
}
