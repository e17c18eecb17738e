use oamnet::loss::*;
use oamnet::readout::{HeadMode, HeadOutput};
use oamnet::spectrum::ComplexSpectrum;
use oamnet::spectrum::SpectrumBasis;

fn label(weights: &[f64], phases: &[f64]) -> ComplexSpectrum {
    let basis = SpectrumBasis::new(0, weights.len() as i32 - 1).unwrap();
    ComplexSpectrum::new(basis, weights.iter().map(|w| w.sqrt()).collect(), phases.to_vec()).unwrap()
}

#[test]
fn loss_examples() {
    let l = label(&[1.0, 0.0], &[0.0, 0.0]);
    let exact = HeadOutput {
        weights: vec![1.0, 0.0],
        raw_phases: None,
    };
    assert_eq!(compute_loss(&[exact], &[l.clone()], 0.0, 0.0, HeadMode::Power).unwrap(), 0.0);
    let half = HeadOutput {
        weights: vec![0.5, 0.5],
        raw_phases: None,
    };
    assert!((compute_loss(&[half], &[l.clone()], 0.0, 0.0, HeadMode::Power).unwrap() - 0.25).abs() < 1e-15);
    let exact = HeadOutput {
        weights: vec![1.0, 0.0],
        raw_phases: None,
    };
    assert_eq!(compute_loss(&[exact], &[l], 7.0, 1e-3, HeadMode::Power).unwrap(), 7e-3);
}

#[test]
fn phase_term_uses_relative_phases() {
    let l = label(&[0.5, 0.5], &[0.0, 1.0]);
    // A common offset does not matter.
    let pred = HeadOutput {
        weights: vec![0.5, 0.5],
        raw_phases: Some(vec![2.0, 3.0]),
    };
    let (v, g) = data_loss(&pred, &l, HeadMode::Complex).unwrap();
    assert!(v.abs() < 1e-15);
    assert!(g.phases.unwrap().iter().all(|p| p.abs() < 1e-15));
    let pred = HeadOutput {
        weights: vec![0.5, 0.5],
        raw_phases: Some(vec![0.0, 1.0 + std::f64::consts::PI]),
    };
    let (v, _) = data_loss(&pred, &l, HeadMode::Complex).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
}

#[test]
fn mismatched_lengths_rejected() {
    assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    let l = label(&[1.0, 0.0], &[0.0, 0.0]);
    let pred = HeadOutput {
        weights: vec![1.0, 0.0, 0.0],
        raw_phases: None,
    };
    assert!(data_loss(&pred, &l, HeadMode::Power).is_err());
}
