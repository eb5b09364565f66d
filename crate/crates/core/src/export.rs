//! Pseudospectrum export: 16-bit binary PGM with a scale sidecar, plus the raw
//! values as CSV.
//!
//! The PGM is `cr_count` pixels wide and `range_count` tall; row `j` holds
//! range index `j`, so pixel order equals grid order. Values are min-max
//! scaled to `0..=65535`; the sidecar records the min and max so the scaling
//! can be undone. CSV rows are `k,I_k` with 1-based `k`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{ImagingError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    /// Scale `log10(I_k)`; useful for noise-free images with huge peaks.
    Log10,
}

impl Scale {
    fn name(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log10 => "log10",
        }
    }
}

/// Encoded image plus the range that was mapped onto `0..=65535`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub bytes: Vec<u8>,
    pub min: f64,
    pub max: f64,
}

pub fn encode_pgm(values: &[f64], dims: (usize, usize), scale: Scale) -> Result<Pgm> {
    let (w, h) = dims;
    if values.len() != w * h {
        return Err(crate::error::mismatch(format!("{w}x{h} pixels"), values.len()));
    }
    let mapped: Vec<f64> = match scale {
        Scale::Linear => values.to_vec(),
        Scale::Log10 => values.iter().map(|v| v.max(f64::MIN_POSITIVE).log10()).collect(),
    };
    if mapped.iter().any(|v| !v.is_finite()) {
        return Err(ImagingError::InvalidArgument("image contains non-finite values".into()));
    }
    let min = mapped.iter().copied().fold(f64::INFINITY, f64::min);
    let max = mapped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut bytes = format!("P5\n{w} {h}\n65535\n").into_bytes();
    bytes.reserve(2 * mapped.len());
    for v in mapped {
        let level = if span > 0.0 { ((v - min) / span * 65535.0).round() as u16 } else { 0 };
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    Ok(Pgm { bytes, min, max })
}

pub fn write_values_csv<W: Write>(writer: W, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "I_k"])?;
    for (k, v) in values.iter().enumerate() {
        w.write_record([(k + 1).to_string(), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Write `<stem>.pgm`, `<stem>.scale.txt` and `<stem>.csv` into `dir`;
/// returns the paths written.
pub fn write_pseudospectrum(dir: &Path, stem: &str, values: &[f64], dims: (usize, usize), scale: Scale) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let pgm = encode_pgm(values, dims, scale)?;
    let pgm_path = dir.join(format!("{stem}.pgm"));
    fs::write(&pgm_path, &pgm.bytes)?;
    let scale_path = dir.join(format!("{stem}.scale.txt"));
    fs::write(
        &scale_path,
        format!("scale = {}\nmin = {:e}\nmax = {:e}\nlevels = 65535\n", scale.name(), pgm.min, pgm.max),
    )?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_values_csv(fs::File::create(&csv_path)?, values)?;
    Ok(vec![pgm_path, scale_path, csv_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_scaling() {
        let pgm = encode_pgm(&[0.0, 1.0, 2.0, 4.0, 3.0, 2.0], (3, 2), Scale::Linear).unwrap();
        let header = b"P5\n3 2\n65535\n";
        assert_eq!(&pgm.bytes[..header.len()], header);
        let px: Vec<u16> = pgm.bytes[header.len()..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(px, vec![0, 16384, 32768, 65535, 49151, 32768]);
        assert_eq!((pgm.min, pgm.max), (0.0, 4.0));
    }

    #[test]
    fn constant_and_log_images() {
        let flat = encode_pgm(&[5.0; 4], (2, 2), Scale::Linear).unwrap();
        assert!(flat.bytes.ends_with(&[0; 8]));
        let log = encode_pgm(&[1.0, 10.0, 100.0, 1000.0], (4, 1), Scale::Log10).unwrap();
        assert_eq!((log.min, log.max), (0.0, 3.0));
        assert!(encode_pgm(&[1.0], (2, 2), Scale::Linear).is_err());
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_pseudospectrum(dir.path(), "img", &[1.0, 2.5], (2, 1), Scale::Linear).unwrap();
        assert_eq!(paths.len(), 3);
        let csv = fs::read_to_string(&paths[2]).unwrap();
        assert_eq!(csv, "k,I_k\n1,1e0\n2,2.5e0\n");
        assert!(fs::read_to_string(&paths[1]).unwrap().contains("max = 2.5e0"));
    }
}
