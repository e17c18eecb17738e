use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oamnet::readout::*;
use oamnet::spectrum::SpectrumBasis;

#[test]
fn softmax_examples() {
    let u = temperature_softmax(&[0.3, 0.3, 0.3, 0.3], 0.2).unwrap();
    assert!(u.iter().all(|v| (v - 0.25).abs() < 1e-15));
    let s = temperature_softmax(&[2f64.ln(), 0.0], 1.0).unwrap();
    assert!((s[0] - 2.0 / 3.0).abs() < 1e-15 && (s[1] - 1.0 / 3.0).abs() < 1e-15);
    let s = temperature_softmax(&[2f64.ln(), 0.0], 0.5).unwrap();
    assert!((s[0] - 0.8).abs() < 1e-15 && (s[1] - 0.2).abs() < 1e-15);
    assert!(temperature_softmax(&[1.0], 0.0).is_err());
    assert!(temperature_softmax(&[1.0], -1.0).is_err());
}

#[test]
fn softmax_survives_large_logits() {
    let s = temperature_softmax(&[1000.0, 999.0, -1000.0], 0.01).unwrap();
    assert!(s.iter().all(|v| v.is_finite()));
    assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_network_outputs_zero() {
    let basis = SpectrumBasis::symmetric(2);
    let net = ReadoutNetwork::from_layers(vec![DenseLayer::zeros(16, 8), DenseLayer::zeros(8, 5)], basis, HeadMode::Power, 1.0, 1.0).unwrap();
    let (z, _) = net.forward_readout(&[1.5; 16], false).unwrap();
    assert_eq!(z, vec![0.0; 5]);
}

#[test]
fn selector_layer_passes_pixels() {
    let basis = SpectrumBasis::symmetric(1);
    let mut layer = DenseLayer::zeros(9, 3);
    for (r, pix) in [0usize, 4, 8].iter().enumerate() {
        layer.weights[r * 9 + pix] = 1.0;
    }
    let net = ReadoutNetwork::from_layers(vec![layer], basis, HeadMode::Power, 1.0, 1.0).unwrap();
    let a0: Vec<f64> = (0..9).map(|v| v as f64 * 0.5).collect();
    let (z, _) = net.forward_readout(&a0, false).unwrap();
    assert_eq!(z, vec![0.0, 2.0, 4.0]);
}

#[test]
fn dimension_checks() {
    let basis = SpectrumBasis::symmetric(1);
    assert!(ReadoutNetwork::from_layers(vec![DenseLayer::zeros(4, 5), DenseLayer::zeros(4, 3)], basis, HeadMode::Power, 1.0, 1.0).is_err());
    assert!(ReadoutNetwork::from_layers(vec![DenseLayer::zeros(4, 3)], basis, HeadMode::Complex, 1.0, 1.0).is_err());
    let net = ReadoutNetwork::from_layers(vec![DenseLayer::zeros(4, 3)], basis, HeadMode::Power, 1.0, 1.0).unwrap();
    assert!(net.forward_readout(&[0.0; 5], false).is_err());
}

#[test]
fn complex_head_phase_pairs() {
    let basis = SpectrumBasis::symmetric(2);
    let k = basis.count();
    let mut layer = DenseLayer::zeros(1, 3 * k);
    // Bias-only network: pairs (1, 0) give zero phase everywhere.
    for i in 0..k {
        layer.bias[k + 2 * i] = 1.0;
    }
    let net = ReadoutNetwork::from_layers(vec![layer.clone()], basis, HeadMode::Complex, 1.0, 1.0).unwrap();
    let c = net.forward_complex(&[0.0]).unwrap();
    assert!(c.phases.iter().all(|p| *p == 0.0));
    // Pairs (0, 1) give pi/2 before re-referencing.
    for i in 0..k {
        layer.bias[k + 2 * i] = 0.0;
        layer.bias[k + 2 * i + 1] = 1.0;
    }
    let net = ReadoutNetwork::from_layers(vec![layer], basis, HeadMode::Complex, 1.0, 1.0).unwrap();
    let (z, _) = net.forward_readout(&[0.0], false).unwrap();
    let raw = net.head_output(&z).unwrap().raw_phases.unwrap();
    assert!(raw.iter().all(|p| (p - std::f64::consts::FRAC_PI_2).abs() < 1e-15));
    assert!(net.forward_complex(&[0.0]).unwrap().phases.iter().all(|p| p.abs() < 1e-15));
}

#[test]
fn random_complex_heads_are_valid() {
    let basis = SpectrumBasis::symmetric(3);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let net = ReadoutNetwork::new(6, &[5], basis, HeadMode::Complex, 0.3, 1.0, &mut rng).unwrap();
        let a0: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..2.0)).collect();
        let c = net.forward_complex(&a0).unwrap();
        let w = c.power_spectrum();
        assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(c.phases.iter().all(|p| (-std::f64::consts::PI..std::f64::consts::PI).contains(p)));
    }
}

#[test]
fn trace_matches_dense_reevaluation() {
    let basis = SpectrumBasis::symmetric(2);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let net = ReadoutNetwork::new(12, &[7, 6], basis, HeadMode::Power, 0.5, 2.0, &mut rng).unwrap();
    let a0: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..1.0)).collect();
    let (z, trace) = net.forward_readout(&a0, true).unwrap();
    let trace = trace.unwrap();
    // Independent evaluation with explicit index loops.
    let mut a: Vec<f64> = a0.iter().map(|v| v * 2.0).collect();
    for (q, l) in net.layers.iter().enumerate() {
        let mut out = vec![0.0; l.outputs];
        for r in 0..l.outputs {
            let mut acc = l.bias[r];
            for c in 0..l.inputs {
                acc += l.weights[r * l.inputs + c] * a[c];
            }
            out[r] = acc;
        }
        assert_eq!(trace.pre[q].len(), out.len());
        for (x, y) in trace.pre[q].iter().zip(&out) {
            assert!((x - y).abs() < 1e-12);
        }
        a = if q + 1 < net.layers.len() {
            out.iter().map(|v| v.max(0.0)).collect()
        } else {
            out
        };
    }
    for (x, y) in z.iter().zip(&a) {
        assert!((x - y).abs() < 1e-12);
    }
}
