use std::f64::consts::PI;

use oamnet::error::Error;
use oamnet::spectrum::*;

#[test]
fn basis_indexing() {
    let b = SpectrumBasis::default();
    assert_eq!(b.count(), 21);
    assert_eq!(b.charge(0), -10);
    assert_eq!(b.index_of(0), Some(10));
    assert_eq!(b.index_of(11), None);
    assert!(SpectrumBasis::new(1, 3).is_err());
    assert!(SpectrumBasis::new(-3, -1).is_err());
}

#[test]
fn wrap_phase_range() {
    assert_eq!(wrap_phase(PI), -PI);
    assert!((wrap_phase(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
    assert!((wrap_phase(-0.25) + 0.25).abs() < 1e-15);
    for k in -50..50 {
        let w = wrap_phase(k as f64 * 0.77);
        assert!((-PI..PI).contains(&w));
    }
}

#[test]
fn oam_spectrum_validation() {
    let b = SpectrumBasis::symmetric(1);
    assert!(OamSpectrum::new(b, vec![0.2, 0.3, 0.5]).is_ok());
    assert!(OamSpectrum::new(b, vec![0.2, 0.3, 0.6]).is_err());
    assert!(OamSpectrum::new(b, vec![-0.2, 0.7, 0.5]).is_err());
    assert!(OamSpectrum::new(b, vec![1.0]).is_err());
}

#[test]
fn complex_spectrum_rereferences_to_zero_charge() {
    let b = SpectrumBasis::symmetric(1);
    let a = (1.0f64 / 3.0).sqrt();
    let s = ComplexSpectrum::new(b, vec![a, a, a], vec![0.3, 1.0, -2.0]).unwrap();
    assert_eq!(s.phases[1], 0.0);
    assert!((s.phases[0] - wrap_phase(0.3 - 1.0)).abs() < 1e-15);
    assert!((s.phases[2] - wrap_phase(-3.0)).abs() < 1e-15);
}

#[test]
fn reference_falls_back_to_lowest_charge() {
    let b = SpectrumBasis::symmetric(2);
    let a = 0.5f64.sqrt();
    // l = 0 absent: the reference is l = -1 (ties resolved toward negative charge).
    let s = ComplexSpectrum::new(b, vec![0.0, a, 0.0, a, 0.0], vec![0.0, 0.7, 0.0, 0.2, 0.0]).unwrap();
    assert_eq!(s.phases[1], 0.0);
    assert!((s.phases[3] + 0.5).abs() < 1e-15);
}

#[test]
fn unnormalized_complex_spectrum_rejected() {
    let b = SpectrumBasis::symmetric(1);
    assert!(matches!(
        ComplexSpectrum::new(b, vec![1.0, 1.0, 0.0], vec![0.0; 3]),
        Err(Error::Unnormalized(_))
    ));
}
