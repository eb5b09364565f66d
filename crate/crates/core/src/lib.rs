//! MUSIC imaging of point scatterers with active arrays, from full-phase or
//! intensity-only data, at one or several frequencies.

pub mod container;
pub mod error;
pub mod experiment;
pub mod export;
pub mod forward;
pub mod linalg;
pub mod music;
pub mod phaseless;
pub mod rng;
pub mod robustness;
pub mod scene;
pub mod structures;

pub use error::{ImagingError, Result};
