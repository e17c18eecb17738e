use num_complex::Complex64;

use oamnet::grid::{ComplexField, GridSpec};
use oamnet::holography::*;
use oamnet::modes::{default_waist, synthesize};
use oamnet::spectrum::{ComplexSpectrum, SpectrumBasis};

fn constant_field(value: Complex64) -> ComplexField {
    let g = GridSpec::new(8, 1.0).unwrap();
    ComplexField::from_fn(g, |_, _| value)
}

#[test]
fn unit_signal_and_reference() {
    let frames = phase_shift_frames(&constant_field(Complex64::new(1.0, 0.0)), 1.0);
    let expect = [4.0, 2.0, 0.0, 2.0];
    for (f, e) in frames.iter().zip(expect) {
        assert!(f.data.iter().all(|v| (v - e).abs() < 1e-12));
    }
    let rec = phase_shift_reconstruct(&frames, &Reference::Uniform(1.0), 1.0).unwrap();
    assert!(rec.samples.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-12));
}

#[test]
fn dark_signal() {
    let frames = phase_shift_frames(&constant_field(Complex64::new(0.0, 0.0)), 0.7);
    assert!(frames.iter().all(|f| f.data.iter().all(|v| (v - 0.49).abs() < 1e-15)));
    let rec = phase_shift_reconstruct(&frames, &Reference::Uniform(0.7), 1.0).unwrap();
    assert!(rec.samples.iter().all(|c| c.norm() < 1e-15));
}

#[test]
fn vortex_round_trip() {
    let g = GridSpec::new(64, 0.5).unwrap();
    let basis = SpectrumBasis::symmetric(5);
    let a = vec![(1.0 / 11.0f64).sqrt(); 11];
    let ph: Vec<f64> = (0..11).map(|i| 0.4 * i as f64 - 2.0).collect();
    let f = synthesize(&ComplexSpectrum::new(basis, a, ph).unwrap(), default_waist(&g), g).unwrap();
    let frames = phase_shift_frames(&f, 0.3);
    let rec = phase_shift_reconstruct(&frames, &Reference::Uniform(0.3), 0.5).unwrap();
    assert!(rec.max_abs_diff(&f) < 1e-10);
}

#[test]
fn mismatched_frames_rejected() {
    let a = Image::filled(8, 8, 1.0);
    let b = Image::filled(8, 6, 1.0);
    let frames = [a.clone(), a.clone(), b, a];
    assert!(phase_shift_reconstruct(&frames, &Reference::Uniform(1.0), 1.0).is_err());
}

#[test]
fn nonpositive_reference_rejected() {
    let a = Image::filled(8, 8, 1.0);
    let frames = [a.clone(), a.clone(), a.clone(), a];
    assert!(phase_shift_reconstruct(&frames, &Reference::Uniform(0.0), 1.0).is_err());
}

#[test]
fn constant_image_survives_preprocessing() {
    let raw = Image::filled(1280, 1024, 3.25);
    let out = preprocess_frames(&raw, 600, 200, 1.5).unwrap();
    assert_eq!((out.width, out.height), (200, 200));
    assert!(out.data.iter().all(|v| (v - 3.25).abs() < 1e-12));
}

#[test]
fn crop_out_of_bounds_rejected() {
    let raw = Image::filled(100, 80, 1.0);
    assert!(preprocess_frames(&raw, 90, 30, 0.0).is_err());
}

#[test]
fn impulse_blur_matches_direct_kernel() {
    let n = 41;
    let mut img = Image::filled(n, n, 0.0);
    img.data[20 * n + 20] = 1.0;
    let sigma = 2.0;
    let out = gaussian_blur(&img, sigma);
    // Direct 2D convolution with the outer product kernel.
    let k = gaussian_kernel(sigma);
    let r = k.len() as i64 / 2;
    for y in 0..n as i64 {
        for x in 0..n as i64 {
            let (dy, dx) = (y - 20, x - 20);
            let expect = if dy.abs() <= r && dx.abs() <= r {
                k[(dy + r) as usize] * k[(dx + r) as usize]
            } else {
                0.0
            };
            assert!((out.data[(y * n as i64 + x) as usize] - expect).abs() < 1e-15);
        }
    }
    assert!((out.data.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn identity_resize_is_exact() {
    let img = Image::new(4, 4, (0..16).map(|v| v as f64).collect()).unwrap();
    let out = resize_bicubic(&img, 4, 4);
    for (a, b) in out.data.iter().zip(&img.data) {
        assert!((a - b).abs() < 1e-12);
    }
}
