//! Intensity-only acquisition and recovery of cross correlations through the
//! polarization identity.
//!
//! A *channel* is one illumination pattern sent at one frequency; its echo at
//! receiver `r` is `b_r = (P(w_l) f)_r`. A *probe* is what the array actually
//! transmits: a single channel, the coherent sum of two channels, or the sum
//! with the second channel phase-shifted by `i`. Only `|probe field|^2` is
//! recorded. Two-frequency probes record the intensity of the coherent
//! superposition at the common phase reference, which is what makes the
//! cross-frequency products `P(w_l)^* P(w_1)` observable.
//!
//! Probe labels (used as CSV keys): `w1:e3`, `w1:e3+w2:e5`, `w1:e3+i*w2:e5`.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{mismatch, ImagingError, Result};
use crate::forward::{Illumination, ResponseTensor};
use crate::linalg::{CMatrix, CVector, C64};
use crate::rng::{self, Stream};

/// `<u, v> = conj(u) v` from `|u|^2, |v|^2, |u+v|^2, |u-iv|^2`.
pub fn polarization_inner(abs_u2: f64, abs_v2: f64, abs_upv2: f64, abs_umiv2: f64) -> C64 {
    let re = 0.5 * (abs_upv2 - abs_u2 - abs_v2);
    let im = 0.5 * (abs_umiv2 - abs_u2 - abs_v2);
    C64::new(re, im)
}

/// One illumination pattern at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub freq: usize,
    pub illumination: Illumination,
}

impl Channel {
    pub fn new(freq: usize, illumination: Illumination) -> Self {
        Self { freq, illumination }
    }

    pub fn point(freq: usize, n: usize, q: usize) -> Self {
        Self::new(freq, Illumination::point(n, q))
    }

    pub fn label(&self) -> String {
        format!("w{}:{}", self.freq + 1, self.illumination.label)
    }

    fn field(&self, tensor: &ResponseTensor) -> CVector {
        tensor.slice(self.freq) * &self.illumination.vector
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Single(Channel),
    Sum(Channel, Channel),
    /// First channel plus `i` times the second.
    SumI(Channel, Channel),
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::Single(a) => write!(f, "{}", a.label()),
            Probe::Sum(a, b) => write!(f, "{}+{}", a.label(), b.label()),
            Probe::SumI(a, b) => write!(f, "{}+i*{}", a.label(), b.label()),
        }
    }
}

fn sum_label(a: &Channel, b: &Channel) -> String {
    Probe::Sum(a.clone(), b.clone()).to_string()
}

fn sum_i_label(a: &Channel, b: &Channel) -> String {
    Probe::SumI(a.clone(), b.clone()).to_string()
}

/// A recorded intensity `|b|^2` for one probe at one receiver (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityRecord {
    pub label: String,
    pub receiver: usize,
    pub value: f64,
}

/// The probes to transmit. Duplicate probes are dropped on insertion.
#[derive(Debug, Clone, Default)]
pub struct AcquisitionPlan {
    probes: Vec<Probe>,
    seen: std::collections::HashSet<String>,
}

impl AcquisitionPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, probe: Probe) {
        if self.seen.insert(probe.to_string()) {
            self.probes.push(probe);
        }
    }

    /// Add `a`, `b`, `a + b` and `a + i b`.
    pub fn push_pair(&mut self, a: &Channel, b: &Channel) {
        self.push(Probe::Single(a.clone()));
        self.push(Probe::Single(b.clone()));
        self.push(Probe::Sum(a.clone(), b.clone()));
        self.push(Probe::SumI(a.clone(), b.clone()));
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    /// Everything needed for the cross correlations `conj(b_q) b_{e_i}` of
    /// each base illumination with every point illumination at frequency `freq`.
    pub fn cross_correlation(freq: usize, n: usize, bases: &[Illumination]) -> Self {
        let mut plan = Self::new();
        for f in bases {
            plan.push(Probe::Single(Channel::new(freq, f.clone())));
        }
        for i in 0..n {
            plan.push(Probe::Single(Channel::point(freq, n, i)));
        }
        for f in bases {
            let base = Channel::new(freq, f.clone());
            for i in 0..n {
                plan.push_pair(&base, &Channel::point(freq, n, i));
            }
        }
        plan
    }

    /// Point illuminations plus the reference pairs `(e_ref, e_j)` needed for
    /// the interferometric matrix at frequency `freq`.
    pub fn interferometric(freq: usize, n: usize, reference: usize) -> Self {
        let mut plan = Self::new();
        plan.extend_interferometric(freq, n, reference);
        plan
    }

    fn extend_interferometric(&mut self, freq: usize, n: usize, reference: usize) {
        for i in 0..n {
            self.push(Probe::Single(Channel::point(freq, n, i)));
        }
        let r = Channel::point(freq, n, reference);
        for j in (0..n).filter(|&j| j != reference) {
            self.push_pair(&r, &Channel::point(freq, n, j));
        }
    }

    /// Interferometric probes at every frequency plus the two-frequency
    /// reference pairs `(w_l:e_ref, w_1:e_ref)` that tie the frequencies together.
    pub fn multifrequency(s: usize, n: usize, reference: usize) -> Self {
        let mut plan = Self::new();
        for l in 0..s {
            plan.extend_interferometric(l, n, reference);
        }
        let base = Channel::point(0, n, reference);
        for l in 1..s {
            plan.push_pair(&Channel::point(l, n, reference), &base);
        }
        plan
    }
}

/// Record `|field|^2` at every receiver for every probe of the plan.
pub fn measure_intensities(tensor: &ResponseTensor, plan: &AcquisitionPlan) -> Result<Vec<IntensityRecord>> {
    let n = tensor.transducers();
    let mut cache: HashMap<String, CVector> = HashMap::new();
    let mut field = |ch: &Channel| -> Result<CVector> {
        if ch.freq >= tensor.frequencies() {
            return Err(mismatch(format!("frequency < {}", tensor.frequencies()), ch.freq));
        }
        if ch.illumination.len() != n {
            return Err(mismatch(n, ch.illumination.len()));
        }
        Ok(cache.entry(ch.label()).or_insert_with(|| ch.field(tensor)).clone())
    };
    let mut out = Vec::with_capacity(plan.len() * n);
    for probe in plan.probes() {
        let values: CVector = match probe {
            Probe::Single(a) => field(a)?,
            Probe::Sum(a, b) => field(a)? + field(b)?,
            Probe::SumI(a, b) => field(a)? + field(b)? * C64::i(),
        };
        let label = probe.to_string();
        out.extend(values.iter().enumerate().map(|(r, z)| IntensityRecord {
            label: label.clone(),
            receiver: r,
            value: z.norm_sqr(),
        }));
    }
    Ok(out)
}

/// Intensities indexed by `(probe label, receiver)`.
#[derive(Debug, Clone, Default)]
pub struct IntensityTable {
    values: HashMap<(String, usize), f64>,
}

impl IntensityTable {
    pub fn from_records(records: &[IntensityRecord]) -> Self {
        let values = records.iter().map(|r| ((r.label.clone(), r.receiver), r.value)).collect();
        Self { values }
    }

    pub fn get(&self, label: &str, receiver: usize) -> Result<f64> {
        self.values
            .get(&(label.to_string(), receiver))
            .copied()
            .ok_or_else(|| ImagingError::MissingAuxiliary {
                probe: label.to_string(),
                receiver,
            })
    }

    pub fn contains(&self, label: &str, receiver: usize) -> bool {
        self.values.contains_key(&(label.to_string(), receiver))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `conj(b_a) b_b` at receiver `r`, from the `a`, `b`, `a + b` and
    /// `a + i b` intensities.
    pub fn inner(&self, a: &Channel, b: &Channel, r: usize) -> Result<C64> {
        let ua = self.get(&a.label(), r)?;
        let vb = self.get(&b.label(), r)?;
        let sum = self.get(&sum_label(a, b), r)?;
        let sum_i = self.get(&sum_i_label(a, b), r)?;
        // |a + i b|^2 = |b - i a|^2, so the identity yields <b, a>
        Ok(polarization_inner(vb, ua, sum, sum_i).conj())
    }
}

/// `m_q[i] = conj(b^(r)_q) b^(r)_{e_i}` for every base illumination `f_q`, at
/// fixed receiver `r` and frequency `freq`.
pub fn recover_cross_correlations(
    table: &IntensityTable,
    freq: usize,
    n: usize,
    r: usize,
    bases: &[Illumination],
) -> Result<Vec<CVector>> {
    bases
        .iter()
        .map(|f| {
            let base = Channel::new(freq, f.clone());
            let mut m = CVector::zeros(n);
            for i in 0..n {
                m[i] = table.inner(&base, &Channel::point(freq, n, i), r)?;
            }
            Ok(m)
        })
        .collect()
}

/// Relative floor under which a reference amplitude counts as vanishing.
pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 1e-8;

/// Amplitudes `|b_kj|` and phases `theta_kj - theta_k,ref` of all point
/// illuminations at one frequency.
#[derive(Debug, Clone)]
pub struct PhaseChain {
    pub reference: usize,
    /// `amplitudes[(k, j)] = |b_kj|`.
    pub amplitudes: nalgebra::DMatrix<f64>,
    /// `phases[(k, j)] = theta_kj - theta_k,ref`.
    pub phases: nalgebra::DMatrix<f64>,
}

impl PhaseChain {
    pub fn recover(table: &IntensityTable, freq: usize, n: usize, reference: usize, floor_rel: f64) -> Result<Self> {
        if reference >= n {
            return Err(ImagingError::InvalidArgument(format!("reference column {reference} out of range")));
        }
        let mut amplitudes = nalgebra::DMatrix::zeros(n, n);
        for k in 0..n {
            for j in 0..n {
                amplitudes[(k, j)] = table.get(&Channel::point(freq, n, j).label(), k)?.max(0.0).sqrt();
            }
        }
        let mut phases = nalgebra::DMatrix::zeros(n, n);
        if n > 1 {
            let max_ref = (0..n).map(|k| amplitudes[(k, reference)]).fold(0.0, f64::max);
            let floor = floor_rel * max_ref;
            if let Some(k) = (0..n).find(|&k| amplitudes[(k, reference)] <= floor) {
                return Err(ImagingError::ReferenceVanishes(k));
            }
            let rc = Channel::point(freq, n, reference);
            for j in (0..n).filter(|&j| j != reference) {
                let cj = Channel::point(freq, n, j);
                for k in 0..n {
                    phases[(k, j)] = table.inner(&rc, &cj, k)?.arg();
                }
            }
        }
        Ok(Self {
            reference,
            amplitudes,
            phases,
        })
    }

    /// `b_kj` up to the unknown per-receiver phase `theta_k,ref`.
    pub fn field(&self, k: usize, j: usize) -> C64 {
        C64::from_polar(self.amplitudes[(k, j)], self.phases[(k, j)])
    }
}

/// `M(w) = P^* P` from intensities, via amplitudes and chained phase
/// differences relative to the reference column.
pub fn recover_interferometric(table: &IntensityTable, freq: usize, n: usize, reference: usize) -> Result<CMatrix> {
    recover_interferometric_with_floor(table, freq, n, reference, DEFAULT_AMPLITUDE_FLOOR)
}

pub fn recover_interferometric_with_floor(
    table: &IntensityTable,
    freq: usize,
    n: usize,
    reference: usize,
    floor_rel: f64,
) -> Result<CMatrix> {
    let chain = PhaseChain::recover(table, freq, n, reference, floor_rel)?;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new((0..n).map(|k| chain.amplitudes[(k, i)].powi(2)).sum(), 0.0);
        for j in i + 1..n {
            let v: C64 = (0..n).map(|k| chain.field(k, i).conj() * chain.field(k, j)).sum();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(m)
}

/// Try reference columns in order until one has no vanishing entry and all
/// its probes were recorded. Returns the matrix and the reference used.
pub fn recover_interferometric_with_fallback(table: &IntensityTable, freq: usize, n: usize) -> Result<(CMatrix, usize)> {
    let mut last = ImagingError::ReferenceVanishes(0);
    for reference in 0..n {
        match recover_interferometric(table, freq, n, reference) {
            Ok(m) => {
                if reference > 0 {
                    log::info!("interferometric recovery at frequency {freq} uses reference column {}", reference + 1);
                }
                return Ok((m, reference));
            }
            Err(e @ (ImagingError::ReferenceVanishes(_) | ImagingError::MissingAuxiliary { .. })) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Multifrequency `M^c` from intensities recorded with
/// [`AcquisitionPlan::multifrequency`].
pub fn recover_mc(table: &IntensityTable, s: usize, n: usize, reference: usize) -> Result<CMatrix> {
    let chains = (0..s)
        .map(|l| PhaseChain::recover(table, l, n, reference, DEFAULT_AMPLITUDE_FLOOR))
        .collect::<Result<Vec<_>>>()?;
    let base = Channel::point(0, n, reference);
    let mut out = CMatrix::zeros(n * s, n);
    for (l, chain) in chains.iter().enumerate() {
        // psi_k = theta^1_k,ref - theta^l_k,ref
        let psi: Vec<f64> = if l == 0 {
            vec![0.0; n]
        } else {
            let ch = Channel::point(l, n, reference);
            (0..n).map(|k| table.inner(&ch, &base, k).map(|z| z.arg())).collect::<Result<_>>()?
        };
        for i in 0..n {
            for j in 0..n {
                let v: C64 = (0..n)
                    .map(|k| chain.field(k, i).conj() * chains[0].field(k, j) * C64::from_polar(1.0, psi[k]))
                    .sum();
                out[(l * n + i, j)] = v;
            }
        }
    }
    Ok(out)
}

/// Add real Gaussian noise to intensity records at the given SNR relative to
/// their mean power, clamping negative results to zero. Returns the noisy
/// records and how many were clamped.
pub fn add_intensity_noise(records: &[IntensityRecord], snr_db: f64, seed: u64) -> Result<(Vec<IntensityRecord>, usize)> {
    let power = records.iter().map(|r| r.value * r.value).sum::<f64>() / records.len().max(1) as f64;
    if power == 0.0 {
        return Err(ImagingError::ZeroSignal);
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut r = rng::rng(seed, Stream::IntensityNoise);
    let mut clamped = 0;
    let out = records
        .iter()
        .map(|rec| {
            let z: f64 = r.sample(StandardNormal);
            let mut value = rec.value + sigma * z;
            if value < 0.0 {
                value = 0.0;
                clamped += 1;
            }
            IntensityRecord { value, ..rec.clone() }
        })
        .collect();
    if clamped > 0 {
        log::warn!("clamped {clamped} of {} noisy intensities at zero", records.len());
    }
    Ok((out, clamped))
}

/// CSV with header `illumination_label,receiver,value`; receivers are 1-based.
pub fn write_intensities_csv<W: Write>(writer: W, records: &[IntensityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["illumination_label", "receiver", "value"])?;
    for r in records {
        w.write_record([r.label.clone(), (r.receiver + 1).to_string(), format!("{:e}", r.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_intensities_csv<R: Read>(reader: R) -> Result<Vec<IntensityRecord>> {
    let mut rd = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let parse_err = |what: &str| ImagingError::Format(format!("bad {what} in intensity row {row:?}"));
        let label = row.get(0).ok_or_else(|| parse_err("label"))?.to_string();
        let receiver: usize = row.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("receiver"))?;
        let value: f64 = row.get(2).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("value"))?;
        if receiver == 0 {
            return Err(parse_err("receiver"));
        }
        out.push(IntensityRecord {
            label,
            receiver: receiver - 1,
            value,
        });
    }
    Ok(out)
}
