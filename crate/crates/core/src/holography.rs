//! Camera-side ingestion: 4-step phase-shift field reconstruction and the
//! crop / bicubic downsample / Gaussian smoothing chain applied to raw frames.
//!
//! Frame `i` (1-based) is modelled as `I_i = |E_S exp(i (i-1) pi/2) + A_R|^2`,
//! which inverts to `E_S = (I1 - I3) / (4 A_R) + i (I4 - I2) / (4 A_R)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};

/// Real-valued intensity image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!("{} pixels for a {width}x{height} image", data.len())));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Reference-wave amplitude: a plane wave or a recorded amplitude map.
#[derive(Debug, Clone)]
pub enum Reference {
    Uniform(f64),
    Map(Image),
}

impl Reference {
    fn at(&self, i: usize) -> f64 {
        match self {
            Reference::Uniform(a) => *a,
            Reference::Map(img) => img.data[i],
        }
    }
}

/// Simulates the four phase-stepped interferograms of `field` against `reference`.
pub fn phase_shift_frames(field: &ComplexField, reference: f64) -> [Image; 4] {
    let n = field.grid.n;
    std::array::from_fn(|step| {
        let shift = Complex64::from_polar(1.0, step as f64 * FRAC_PI_2);
        let data = field.samples.iter().map(|e| (e * shift + reference).norm_sqr()).collect();
        Image { width: n, height: n, data }
    })
}

/// Recovers the signal field from four frames ordered `I1..I4`.
pub fn phase_shift_reconstruct(frames: &[Image; 4], reference: &Reference, pitch: f64) -> Result<ComplexField> {
    let first = &frames[0];
    if frames.iter().any(|f| !f.same_shape(first)) {
        return Err(Error::Dimension("phase-shift frames differ in size".into()));
    }
    if let Reference::Map(m) = reference {
        if !m.same_shape(first) {
            return Err(Error::Dimension("reference map differs in size from the frames".into()));
        }
    }
    if first.width != first.height {
        return Err(Error::Dimension(format!("frames must be square, got {}x{}", first.width, first.height)));
    }
    let grid = GridSpec::new(first.width, pitch)?;
    let mut samples = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let a = reference.at(i);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("reference amplitude {a} at pixel {i} must be positive")));
        }
        let re = (frames[0].data[i] - frames[2].data[i]) / (4.0 * a);
        let im = (frames[3].data[i] - frames[1].data[i]) / (4.0 * a);
        samples.push(Complex64::new(re, im));
    }
    ComplexField::from_samples(grid, samples, 0.0)
}

/// Center crop to `crop_side`, bicubic resample to `out_side`, then Gaussian smoothing.
pub fn preprocess_frames(raw: &Image, crop_side: usize, out_side: usize, blur_sigma: f64) -> Result<Image> {
    if crop_side == 0 || out_side == 0 {
        return Err(Error::InvalidParameter("crop and output sides must be positive".into()));
    }
    if crop_side > raw.width || crop_side > raw.height {
        return Err(Error::Dimension(format!("crop {crop_side} exceeds frame {}x{}", raw.width, raw.height)));
    }
    if !(blur_sigma >= 0.0 && blur_sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("blur sigma {blur_sigma} must be >= 0")));
    }
    let x0 = (raw.width - crop_side) / 2;
    let y0 = (raw.height - crop_side) / 2;
    let mut cropped = Vec::with_capacity(crop_side * crop_side);
    for y in y0..y0 + crop_side {
        cropped.extend_from_slice(&raw.data[y * raw.width + x0..y * raw.width + x0 + crop_side]);
    }
    let cropped = Image {
        width: crop_side,
        height: crop_side,
        data: cropped,
    };
    let resized = resize_bicubic(&cropped, out_side, out_side);
    Ok(gaussian_blur(&resized, blur_sigma))
}

/// Keys cubic convolution kernel, a = -0.5.
fn cubic(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.5 * x * x * x - 2.5 * x * x + 1.0
    } else if x < 2.0 {
        -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0
    } else {
        0.0
    }
}

/// Per-output (indices, weights) for a 1D resample; the kernel is widened
/// when shrinking so the resample also low-passes.
fn resample_taps(src: usize, dst: usize) -> Vec<(Vec<usize>, Vec<f64>)> {
    let scale = dst as f64 / src as f64;
    let widen = if scale < 1.0 { scale } else { 1.0 };
    let support = 2.0 / widen;
    (0..dst)
        .map(|i| {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let lo = (center - support).floor() as i64;
            let hi = (center + support).ceil() as i64;
            let mut idx = Vec::new();
            let mut w = Vec::new();
            for j in lo..=hi {
                let k = cubic((center - j as f64) * widen);
                if k != 0.0 {
                    idx.push(j.clamp(0, src as i64 - 1) as usize);
                    w.push(k);
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            (idx, w)
        })
        .collect()
}

pub fn resize_bicubic(img: &Image, width: usize, height: usize) -> Image {
    let tx = resample_taps(img.width, width);
    let ty = resample_taps(img.height, height);
    let mut tmp = vec![0.0; width * img.height];
    for y in 0..img.height {
        let row = &img.data[y * img.width..(y + 1) * img.width];
        for (x, (idx, w)) in tx.iter().enumerate() {
            tmp[y * width + x] = idx.iter().zip(w).map(|(&j, &k)| row[j] * k).sum();
        }
    }
    let mut out = vec![0.0; width * height];
    for (y, (idx, w)) in ty.iter().enumerate() {
        for x in 0..width {
            out[y * width + x] = idx.iter().zip(w).map(|(&j, &k)| tmp[j * width + x] * k).sum();
        }
    }
    Image { width, height, data: out }
}

/// Unit-sum sampled Gaussian of radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable Gaussian smoothing with replicated borders.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    let k = gaussian_kernel(sigma);
    if k.len() == 1 {
        return img.clone();
    }
    let r = (k.len() / 2) as i64;
    let (w, h) = (img.width as i64, img.height as i64);
    let mut tmp = vec![0.0; img.data.len()];
    for y in 0..h {
        for x in 0..w {
            tmp[(y * w + x) as usize] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * img.data[(y * w + (x + i as i64 - r).clamp(0, w - 1)) as usize])
                .sum();
        }
    }
    let mut out = vec![0.0; img.data.len()];
    for y in 0..h {
        for x in 0..w {
            out[(y * w + x) as usize] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * tmp[((y + i as i64 - r).clamp(0, h - 1) * w + x) as usize])
                .sum();
        }
    }
    Image {
        width: img.width,
        height: img.height,
        data: out,
    }
}
