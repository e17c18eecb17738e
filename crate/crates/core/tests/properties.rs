use num_complex::Complex64;
use proptest::prelude::*;

use oamnet::modes::{default_waist, oam_decompose, synthesize};
use oamnet::optics::{layer_modulate, DiffractiveLayer};
use oamnet::propagation::PropagationOperator;
use oamnet::readout::temperature_softmax;
use oamnet::{ComplexField, ComplexSpectrum, GridSpec, SpectrumBasis};

fn field_from(grid: GridSpec, re: &[f64], im: &[f64]) -> ComplexField {
    let samples = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
    ComplexField::from_samples(grid, samples, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_adjoint_identity(
        re1 in prop::collection::vec(-1.0f64..1.0, 256),
        im1 in prop::collection::vec(-1.0f64..1.0, 256),
        re2 in prop::collection::vec(-1.0f64..1.0, 256),
        im2 in prop::collection::vec(-1.0f64..1.0, 256),
        z in 0.0f64..100.0,
    ) {
        let g = GridSpec::new(16, 0.5).unwrap();
        let (x, y) = (field_from(g, &re1, &im1), field_from(g, &re2, &im2));
        let op = PropagationOperator::with_default_padding(g, z).unwrap();
        let lhs = op.propagate(&x, false).unwrap().inner(&y);
        let rhs = x.inner(&op.propagate(&y, true).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn propagation_never_adds_power(
        re in prop::collection::vec(-1.0f64..1.0, 256),
        im in prop::collection::vec(-1.0f64..1.0, 256),
        z in 0.0f64..200.0,
    ) {
        let g = GridSpec::new(16, 0.5).unwrap();
        let x = field_from(g, &re, &im);
        let out = PropagationOperator::with_default_padding(g, z).unwrap().propagate(&x, false).unwrap();
        prop_assert!(out.power() <= x.power() * (1.0 + 1e-12));
    }

    #[test]
    fn phase_layers_keep_sample_moduli(
        theta in prop::collection::vec(-3.0f64..3.0, 256),
        re in prop::collection::vec(-1.0f64..1.0, 256),
        im in prop::collection::vec(-1.0f64..1.0, 256),
    ) {
        let g = GridSpec::new(16, 0.5).unwrap();
        let x = field_from(g, &re, &im);
        let mut layer = DiffractiveLayer::new(&g, 1.0, 3.0);
        layer.theta = theta;
        let out = layer_modulate(&x, &layer).unwrap();
        for (a, b) in x.samples.iter().zip(&out.samples) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_is_a_distribution(z in prop::collection::vec(-50.0f64..50.0, 1..12), t in 0.01f64..2.0) {
        let s = temperature_softmax(&z, t).unwrap();
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.iter().all(|v| *v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn decomposition_inverts_synthesis(
        amps in prop::collection::vec(0.0f64..1.0, 11),
        phases in prop::collection::vec(-3.14f64..3.14, 11),
    ) {
        prop_assume!(amps.iter().sum::<f64>() > 0.1);
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let amps: Vec<f64> = amps.iter().map(|a| a / norm).collect();
        let basis = SpectrumBasis::symmetric(5);
        let spec = ComplexSpectrum::new(basis, amps, phases).unwrap();
        let g = GridSpec::desk();
        let f = synthesize(&spec, default_waist(&g), g).unwrap();
        let got = oam_decompose(&f, basis).unwrap().power.weights;
        let want = spec.power_spectrum().weights;
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }
}
