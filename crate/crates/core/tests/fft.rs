use num_complex::Complex64;

use oamnet::fft::*;

#[test]
fn fft2_round_trip() {
    let n = 16;
    let orig: Vec<Complex64> = (0..n * n)
        .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    let mut buf = orig.clone();
    fft2(&mut buf, n, false);
    fft2(&mut buf, n, true);
    for (a, b) in buf.iter().zip(&orig) {
        assert!((a / (n * n) as f64 - b).norm() < 1e-12);
    }
}

#[test]
fn fft2_of_plane_wave_is_single_bin() {
    let n = 8;
    let (kx, ky) = (3usize, 5usize);
    let mut buf: Vec<Complex64> = (0..n * n)
        .map(|i| {
            let (r, c) = (i / n, i % n);
            let ph = 2.0 * std::f64::consts::PI * ((kx * c + ky * r) as f64) / n as f64;
            Complex64::from_polar(1.0, ph)
        })
        .collect();
    fft2(&mut buf, n, false);
    for (i, v) in buf.iter().enumerate() {
        let expect = if i == ky * n + kx { (n * n) as f64 } else { 0.0 };
        assert!((v.re - expect).abs() < 1e-9 && v.im.abs() < 1e-9);
    }
}

#[test]
fn signed_bins() {
    assert_eq!(signed_bin(0, 8), 0);
    assert_eq!(signed_bin(3, 8), 3);
    assert_eq!(signed_bin(4, 8), -4);
    assert_eq!(signed_bin(7, 8), -1);
}
