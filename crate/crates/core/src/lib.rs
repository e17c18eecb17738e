//! Simulator of a hybrid optoelectronic OAM spectrum analyzer.

pub mod backprop;
pub mod config;
pub mod distortion;
pub mod error;
pub mod fft;
pub mod gradcheck;
pub mod grid;
pub mod holography;
pub mod interp;
pub mod interpret;
pub mod io;
pub mod loss;
pub mod model;
pub mod modes;
pub mod optics;
pub mod propagation;
pub mod readout;
pub mod spectrum;
pub mod training;

pub use error::{Error, Result};
pub use grid::{ComplexField, GridSpec};
pub use spectrum::{ComplexSpectrum, OamSpectrum, SpectrumBasis};
