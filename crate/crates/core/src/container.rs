//! Binary container for data matrices and model families, used to cache
//! intermediate results between CLI stages.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic     4 bytes  "MMVC"
//! version   u16      1
//! object    u8       1 = data matrix, 2 = model family
//! kind      u8       data kind tag, or exactness tag for a family
//! rows      u32
//! cols      u32
//! strings   u32 count, then (u32 length, UTF-8 bytes) each
//! payload   rows * cols * (f64 re, f64 im), row-major
//! ```
//!
//! Data matrices store `[scene_hash, noise, illumination labels...]` as
//! strings. Families store `[error_order]` (empty when absent) and follow the
//! payload with `u32 excitations` and `excitations * cols` complex values.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{ImagingError, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::structures::{DataKind, DataMatrix, Exactness, ModelMatrixFamily, Provenance};

pub const MAGIC: &[u8; 4] = b"MMVC";
pub const VERSION: u16 = 1;
const OBJECT_DATA: u8 = 1;
const OBJECT_FAMILY: u8 = 2;

fn write_header<W: Write>(w: &mut W, object: u8, kind: u8, m: &CMatrix, strings: &[String]) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u16::<LittleEndian>(VERSION)?;
    w.write_u8(object)?;
    w.write_u8(kind)?;
    w.write_u32::<LittleEndian>(dim(m.nrows())?)?;
    w.write_u32::<LittleEndian>(dim(m.ncols())?)?;
    w.write_u32::<LittleEndian>(dim(strings.len())?)?;
    for s in strings {
        w.write_u32::<LittleEndian>(dim(s.len())?)?;
        w.write_all(s.as_bytes())?;
    }
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            write_c64(w, m[(r, c)])?;
        }
    }
    Ok(())
}

fn dim(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| ImagingError::Format(format!("dimension {n} does not fit the container")))
}

fn write_c64<W: Write>(w: &mut W, z: C64) -> Result<()> {
    w.write_f64::<LittleEndian>(z.re)?;
    w.write_f64::<LittleEndian>(z.im)?;
    Ok(())
}

fn read_c64<R: Read>(r: &mut R) -> Result<C64> {
    let re = r.read_f64::<LittleEndian>()?;
    let im = r.read_f64::<LittleEndian>()?;
    Ok(C64::new(re, im))
}

struct Header {
    object: u8,
    kind: u8,
    strings: Vec<String>,
    matrix: CMatrix,
}

// Upper limit on a single allocation requested by a header, to fail fast on
// corrupt files instead of attempting a huge allocation.
const MAX_ELEMENTS: usize = 1 << 28;

fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ImagingError::Format("not an MMVC container".into()));
    }
    let version = r.read_u16::<LittleEndian>()?;
    if version != VERSION {
        return Err(ImagingError::Format(format!("unsupported container version {version}")));
    }
    let object = r.read_u8()?;
    let kind = r.read_u8()?;
    let rows = r.read_u32::<LittleEndian>()? as usize;
    let cols = r.read_u32::<LittleEndian>()? as usize;
    if rows.saturating_mul(cols) > MAX_ELEMENTS {
        return Err(ImagingError::Format(format!("implausible dimensions {rows}x{cols}")));
    }
    let count = r.read_u32::<LittleEndian>()? as usize;
    let mut strings = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let len = r.read_u32::<LittleEndian>()? as usize;
        let mut buf = vec![0u8; len.min(MAX_ELEMENTS)];
        r.read_exact(&mut buf)?;
        strings.push(String::from_utf8(buf).map_err(|e| ImagingError::Format(e.to_string()))?);
    }
    let mut matrix = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            matrix[(i, j)] = read_c64(r)?;
        }
    }
    Ok(Header {
        object,
        kind,
        strings,
        matrix,
    })
}

pub fn write_data_matrix<W: Write>(mut w: W, d: &DataMatrix) -> Result<()> {
    let mut strings = vec![d.provenance.scene_hash.clone(), d.provenance.noise.clone()];
    strings.extend(d.provenance.illuminations.iter().cloned());
    write_header(&mut w, OBJECT_DATA, d.kind.tag(), &d.entries, &strings)
}

pub fn read_data_matrix<R: Read>(mut r: R) -> Result<DataMatrix> {
    let h = read_header(&mut r)?;
    if h.object != OBJECT_DATA {
        return Err(ImagingError::Format("container holds a model family, not a data matrix".into()));
    }
    let kind = DataKind::from_tag(h.kind).ok_or_else(|| ImagingError::Format(format!("unknown data kind tag {}", h.kind)))?;
    let mut strings = h.strings.into_iter();
    let scene_hash = strings.next().unwrap_or_default();
    let noise = strings.next().unwrap_or_default();
    let provenance = Provenance {
        scene_hash,
        noise,
        illuminations: strings.collect(),
    };
    Ok(DataMatrix::new(h.matrix, kind, provenance))
}

pub fn write_family<W: Write>(mut w: W, f: &ModelMatrixFamily) -> Result<()> {
    let strings = vec![f.error_order.clone().unwrap_or_default()];
    write_header(&mut w, OBJECT_FAMILY, f.exactness.tag(), &f.a, &strings)?;
    w.write_u32::<LittleEndian>(dim(f.excitations())?)?;
    for lam in f.lambdas() {
        for z in lam.iter() {
            write_c64(&mut w, *z)?;
        }
    }
    Ok(())
}

pub fn read_family<R: Read>(mut r: R) -> Result<ModelMatrixFamily> {
    let h = read_header(&mut r)?;
    if h.object != OBJECT_FAMILY {
        return Err(ImagingError::Format("container holds a data matrix, not a model family".into()));
    }
    let exactness =
        Exactness::from_tag(h.kind).ok_or_else(|| ImagingError::Format(format!("unknown exactness tag {}", h.kind)))?;
    let k = h.matrix.ncols();
    let count = r.read_u32::<LittleEndian>()? as usize;
    if count.saturating_mul(k) > MAX_ELEMENTS {
        return Err(ImagingError::Format(format!("implausible excitation count {count}")));
    }
    let mut lambdas = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = CVector::zeros(k);
        for z in v.iter_mut() {
            *z = read_c64(&mut r)?;
        }
        lambdas.push(v);
    }
    let mut family = ModelMatrixFamily::new(h.matrix, lambdas, exactness)?;
    family.error_order = h.strings.into_iter().next().filter(|s| !s.is_empty());
    Ok(family)
}
