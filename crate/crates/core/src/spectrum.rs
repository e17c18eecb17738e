//! OAM spectrum types: the topological-charge basis, the normalized power
//! spectrum, and the complex spectrum (amplitudes plus intermodal phases).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum-to-one (or unit-norm) normalization of spectra.
pub const NORM_TOL: f64 = 1e-9;

/// Amplitudes at or below this are treated as absent when choosing the phase reference.
const REFERENCE_FLOOR: f64 = 1e-12;

/// Contiguous range of topological charges `k_n..=k_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumBasis {
    pub k_n: i32,
    pub k_p: i32,
}

impl SpectrumBasis {
    pub fn new(k_n: i32, k_p: i32) -> Result<Self> {
        if k_n > 0 || k_p < 0 {
            return Err(Error::InvalidParameter(format!(
                "basis bounds must satisfy k_n <= 0 <= k_p, got [{k_n}, {k_p}]"
            )));
        }
        Ok(Self { k_n, k_p })
    }

    /// Symmetric basis `-k..=k`.
    pub fn symmetric(k: i32) -> Self {
        Self { k_n: -k.abs(), k_p: k.abs() }
    }

    pub fn count(&self) -> usize {
        (self.k_p - self.k_n + 1) as usize
    }

    pub fn charge(&self, index: usize) -> i32 {
        self.k_n + index as i32
    }

    pub fn index_of(&self, charge: i32) -> Option<usize> {
        (self.k_n..=self.k_p).contains(&charge).then(|| (charge - self.k_n) as usize)
    }

    pub fn charges(&self) -> impl Iterator<Item = i32> {
        self.k_n..=self.k_p
    }

    pub fn max_abs_charge(&self) -> i32 {
        self.k_n.abs().max(self.k_p)
    }
}

impl Default for SpectrumBasis {
    fn default() -> Self {
        Self::symmetric(10)
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi - 2.0 * PI * ((phi + PI) / (2.0 * PI)).floor();
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Normalized power distribution over a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OamSpectrum {
    pub basis: SpectrumBasis,
    pub weights: Vec<f64>,
}

impl OamSpectrum {
    pub fn new(basis: SpectrumBasis, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != basis.count() {
            return Err(Error::Dimension(format!("{} weights for a basis of {}", weights.len(), basis.count())));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("spectrum weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(sum));
        }
        Ok(Self { basis, weights })
    }

    /// Normalizes arbitrary non-negative weights to sum one.
    pub fn from_unnormalized(basis: SpectrumBasis, mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::Unnormalized(sum));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Self::new(basis, weights)
    }

    pub fn delta(basis: SpectrumBasis, charge: i32) -> Result<Self> {
        let idx = basis
            .index_of(charge)
            .ok_or_else(|| Error::InvalidParameter(format!("charge {charge} outside basis")))?;
        let mut w = vec![0.0; basis.count()];
        w[idx] = 1.0;
        Self::new(basis, w)
    }

    pub fn uniform(basis: SpectrumBasis) -> Self {
        let k = basis.count();
        Self {
            basis,
            weights: vec![1.0 / k as f64; k],
        }
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.weights)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.weights.iter().filter(|w| **w > 0.0).map(|w| -w * w.ln()).sum()
    }
}

/// Index of the largest entry (first on ties).
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Complex spectrum: coefficients `c_l = a_l exp(i phi_l)` with `sum a_l^2 = 1`
/// and the reference component's phase set to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    pub basis: SpectrumBasis,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl ComplexSpectrum {
    /// Validates normalization and re-references the phases.
    pub fn new(basis: SpectrumBasis, amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let k = basis.count();
        if amplitudes.len() != k || phases.len() != k {
            return Err(Error::Dimension(format!(
                "{} amplitudes / {} phases for a basis of {k}",
                amplitudes.len(),
                phases.len()
            )));
        }
        if amplitudes.iter().chain(&phases).any(|v| !v.is_finite()) || amplitudes.iter().any(|a| *a < 0.0) {
            return Err(Error::InvalidParameter("amplitudes must be finite and non-negative".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(norm));
        }
        let mut s = Self { basis, amplitudes, phases };
        s.rereference();
        Ok(s)
    }

    /// Builds a spectrum from raw coefficients, normalizing the amplitude.
    pub fn from_coefficients(basis: SpectrumBasis, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != basis.count() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a basis of {}",
                coeffs.len(),
                basis.count()
            )));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Unnormalized(norm));
        }
        let amplitudes = coeffs.iter().map(|c| c.norm() / norm).collect();
        let phases = coeffs.iter().map(|c| c.arg()).collect();
        Self::new(basis, amplitudes, phases)
    }

    /// Index of the phase reference: l = 0 when present, otherwise the
    /// lowest-|l| nonzero component (negative charge first on ties).
    pub fn reference_index(basis: &SpectrumBasis, amplitudes: &[f64]) -> usize {
        let mut order: Vec<usize> = (0..basis.count()).collect();
        order.sort_by_key(|&i| {
            let l = basis.charge(i);
            (l.abs(), l)
        });
        order.into_iter().find(|&i| amplitudes[i] > REFERENCE_FLOOR).unwrap_or(0)
    }

    fn rereference(&mut self) {
        let r = Self::reference_index(&self.basis, &self.amplitudes);
        let phi_ref = self.phases[r];
        for (phi, a) in self.phases.iter_mut().zip(&self.amplitudes) {
            *phi = if *a > REFERENCE_FLOOR { wrap_phase(*phi - phi_ref) } else { 0.0 };
        }
    }

    pub fn coefficient(&self, index: usize) -> Complex64 {
        Complex64::from_polar(self.amplitudes[index], self.phases[index])
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        (0..self.basis.count()).map(|i| self.coefficient(i)).collect()
    }

    pub fn power_spectrum(&self) -> OamSpectrum {
        let weights: Vec<f64> = self.amplitudes.iter().map(|a| a * a).collect();
        let sum: f64 = weights.iter().sum();
        OamSpectrum {
            basis: self.basis,
            weights: weights.into_iter().map(|w| w / sum).collect(),
        }
    }
}
