//! Off-grid sampling of complex fields.
//!
//! Points are given as fractional `(col, row)` sample indices. Points outside
//! the grid's footprint `[-0.5, n - 0.5]` evaluate to zero for both schemes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Four-neighbour linear blend; neighbours off the grid count as zero.
    #[default]
    Bilinear,
    /// Exact trigonometric (periodic sinc) interpolant of the samples.
    Fourier,
}

/// Samples `field` at each fractional `(col, row)` index.
pub fn sample(field: &ComplexField, points: &[(f64, f64)], scheme: Interpolation) -> Vec<Complex64> {
    match scheme {
        Interpolation::Bilinear => points.iter().map(|&(c, r)| bilinear(field, c, r)).collect(),
        Interpolation::Fourier => {
            let mut sampler = FourierSampler::new(field);
            points.iter().map(|&(c, r)| sampler.eval(c, r)).collect()
        }
    }
}

fn outside(n: usize, c: f64, r: f64) -> bool {
    let hi = n as f64 - 0.5;
    !(c >= -0.5 && c <= hi && r >= -0.5 && r <= hi)
}

pub fn bilinear(field: &ComplexField, c: f64, r: f64) -> Complex64 {
    let n = field.grid.n;
    let zero = Complex64::new(0.0, 0.0);
    if outside(n, c, r) {
        return zero;
    }
    let c0 = c.floor();
    let r0 = r.floor();
    let fc = c - c0;
    let fr = r - r0;
    let get = |ri: f64, ci: f64| -> Complex64 {
        if ri < 0.0 || ci < 0.0 || ri >= n as f64 || ci >= n as f64 {
            zero
        } else {
            field.samples[ri as usize * n + ci as usize]
        }
    };
    get(r0, c0) * ((1.0 - fr) * (1.0 - fc))
        + get(r0, c0 + 1.0) * ((1.0 - fr) * fc)
        + get(r0 + 1.0, c0) * (fr * (1.0 - fc))
        + get(r0 + 1.0, c0 + 1.0) * (fr * fc)
}

/// Periodic sinc kernel of an even-length grid: `sin(pi u) / (n tan(pi u / n))`.
fn dirichlet_weights(n: usize, x: f64, out: &mut [f64]) {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-13 {
        out.iter_mut().for_each(|w| *w = 0.0);
        out[(nearest as i64).rem_euclid(n as i64) as usize] = 1.0;
        return;
    }
    let s = (PI * x).sin();
    let nf = n as f64;
    for (j, w) in out.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *w = sign * s / (nf * (PI * (x - j as f64) / nf).tan());
    }
}

/// Evaluates the trigonometric interpolant of a field; holds scratch buffers.
pub struct FourierSampler<'a> {
    field: &'a ComplexField,
    wx: Vec<f64>,
    wy: Vec<f64>,
}

impl<'a> FourierSampler<'a> {
    pub fn new(field: &'a ComplexField) -> Self {
        let n = field.grid.n;
        Self {
            field,
            wx: vec![0.0; n],
            wy: vec![0.0; n],
        }
    }

    pub fn eval(&mut self, c: f64, r: f64) -> Complex64 {
        let n = self.field.grid.n;
        if outside(n, c, r) {
            return Complex64::new(0.0, 0.0);
        }
        self.eval_periodic(c, r)
    }

    /// Evaluates without the footprint test (the interpolant is n-periodic).
    pub fn eval_periodic(&mut self, c: f64, r: f64) -> Complex64 {
        let n = self.field.grid.n;
        dirichlet_weights(n, c, &mut self.wx);
        dirichlet_weights(n, r, &mut self.wy);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &wy) in self.wy.iter().enumerate() {
            if wy == 0.0 {
                continue;
            }
            let row = &self.field.samples[i * n..(i + 1) * n];
            let mut re = 0.0;
            let mut im = 0.0;
            for (v, &wx) in row.iter().zip(&self.wx) {
                re += v.re * wx;
                im += v.im * wx;
            }
            acc += Complex64::new(re, im) * wy;
        }
        acc
    }
}
