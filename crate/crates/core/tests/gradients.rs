use num_complex::Complex64;
use oamnet::backprop::{backward_electronic, backward_optical, backward_to_detector, dense_transmission_gradient, head_delta, HeadGradient};
use oamnet::gradcheck::{check_params, finite_difference_check, relative_error};
use oamnet::loss::data_loss;
use oamnet::model::{HybridModel, ModelConfig, ParamId};
use oamnet::modes::{default_waist, synthesize};
use oamnet::optics::OpticalStack;
use oamnet::readout::{DenseLayer, HeadMode, ReadoutNetwork};
use oamnet::{ComplexField, ComplexSpectrum, GridSpec, SpectrumBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_label(basis: SpectrumBasis, rng: &mut impl Rng) -> ComplexSpectrum {
    let w: Vec<f64> = (0..basis.count()).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let a = w.iter().map(|v| (v / s).sqrt()).collect();
    let p = (0..basis.count()).map(|_| rng.random_range(-3.0..3.0)).collect();
    ComplexSpectrum::new(basis, a, p).unwrap()
}

fn toy_model(n: usize, layers: usize, hidden: &[usize], head: HeadMode, seed: u64) -> (HybridModel, ComplexField, ComplexSpectrum) {
    let cfg = ModelConfig {
        n,
        pitch: 0.5,
        layers,
        hop: 10.0,
        hidden: hidden.to_vec(),
        k_n: -2,
        k_p: 2,
        head,
        temperature: 0.3,
        ..ModelConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = HybridModel::new(&cfg, &mut rng).unwrap();
    for l in &mut model.stack.layers {
        l.theta.iter_mut().for_each(|t| *t = rng.random_range(-1.0..1.0));
    }
    for l in &mut model.readout.layers {
        l.bias.iter_mut().for_each(|b| *b = rng.random_range(-0.1..0.1));
    }
    let basis = model.basis();
    let field = synthesize(&random_label(basis, &mut rng), default_waist(&model.grid()), model.grid()).unwrap();
    let label = random_label(basis, &mut rng);
    (model, field, label)
}

#[test]
fn full_pipeline_matches_finite_differences() {
    let (model, field, label) = toy_model(32, 2, &[16], HeadMode::Power, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let report = finite_difference_check(&model, &field, &label, 1e-3, 1e-4, 120, &mut rng).unwrap();
    assert!(report.max_relative_error < 1e-4, "max relative error {}", report.max_relative_error);
}

#[test]
fn every_theta_of_a_small_stack_matches() {
    let (model, field, label) = toy_model(16, 2, &[8], HeadMode::Power, 3);
    let ids: Vec<ParamId> = (0..2)
        .flat_map(|layer| (0..256).map(move |index| ParamId::Theta { layer, index }))
        .collect();
    // Small gradients here need a fine step to keep truncation error down.
    let report = check_params(&model, &field, &label, 0.0, 1e-5, &ids).unwrap();
    assert!(report.max_relative_error < 1e-4, "max relative error {}", report.max_relative_error);
}

#[test]
fn complex_head_matches_finite_differences() {
    let (model, field, label) = toy_model(16, 2, &[12], HeadMode::Complex, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let report = finite_difference_check(&model, &field, &label, 1e-4, 1e-4, 150, &mut rng).unwrap();
    assert!(report.max_relative_error < 1e-4, "max relative error {}", report.max_relative_error);
}

#[test]
fn readout_alone_matches_finite_differences() {
    let basis = SpectrumBasis::symmetric(2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let net = ReadoutNetwork::new(20, &[9, 7], basis, HeadMode::Power, 0.5, 1.0, &mut rng).unwrap();
    let a0: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..2.0)).collect();
    let label = random_label(basis, &mut rng);
    let loss = |net: &ReadoutNetwork, a0: &[f64]| {
        let (z, _) = net.forward_readout(a0, false).unwrap();
        data_loss(&net.head_output(&z).unwrap(), &label, HeadMode::Power).unwrap().0
    };
    let (z, trace) = net.forward_readout(&a0, true).unwrap();
    let (_, grad) = data_loss(&net.head_output(&z).unwrap(), &label, HeadMode::Power).unwrap();
    let g = backward_electronic(&net, trace.as_ref(), &grad).unwrap();
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for q in 0..net.layers.len() {
        for i in 0..net.layers[q].weights.len() {
            let mut p = net.clone();
            p.layers[q].weights[i] += h;
            let mut m = net.clone();
            m.layers[q].weights[i] -= h;
            worst = worst.max(relative_error(g.d_weights[q][i], (loss(&p, &a0) - loss(&m, &a0)) / (2.0 * h)));
        }
        for i in 0..net.layers[q].bias.len() {
            let mut p = net.clone();
            p.layers[q].bias[i] += h;
            let mut m = net.clone();
            m.layers[q].bias[i] -= h;
            worst = worst.max(relative_error(g.d_bias[q][i], (loss(&p, &a0) - loss(&m, &a0)) / (2.0 * h)));
        }
    }
    assert!(worst < 1e-5, "parameter error {worst}");
    let d_a0 = backward_to_detector(&net, &g.deltas[0]).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..a0.len() {
        let (mut p, mut m) = (a0.clone(), a0.clone());
        p[i] += h;
        m[i] -= h;
        worst = worst.max(relative_error(d_a0[i], (loss(&net, &p) - loss(&net, &m)) / (2.0 * h)));
    }
    assert!(worst < 1e-5, "detector error {worst}");
}

#[test]
fn exact_prediction_gives_zero_gradients() {
    let (model, field, _) = toy_model(16, 2, &[8], HeadMode::Power, 7);
    let pred = model.predict(&field).unwrap();
    let label = ComplexSpectrum::new(model.basis(), pred.weights.iter().map(|w| w.sqrt()).collect(), vec![0.0; 5]).unwrap();
    let (head, trace) = model.forward_trace(&field).unwrap();
    let (loss, grad) = data_loss(&head, &label, HeadMode::Power).unwrap();
    assert!(loss < 1e-30);
    let b = model.backward(&trace, &grad).unwrap();
    let biggest = b
        .electronic
        .d_weights
        .iter()
        .chain(&b.electronic.d_bias)
        .chain(&b.optical.d_theta)
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(biggest < 1e-14, "{biggest}");
}

#[test]
fn single_linear_layer_outer_product() {
    let basis = SpectrumBasis::symmetric(1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let net = ReadoutNetwork::new(4, &[], basis, HeadMode::Power, 1.0, 1.0, &mut rng).unwrap();
    let a0 = [0.3, -1.2, 0.5, 2.0];
    let (z, trace) = net.forward_readout(&a0, true).unwrap();
    let grad = HeadGradient {
        weights: vec![0.2, -0.7, 0.1],
        phases: None,
    };
    let delta = head_delta(&net, &z, &grad).unwrap();
    let g = backward_electronic(&net, trace.as_ref(), &grad).unwrap();
    for r in 0..3 {
        for c in 0..4 {
            assert_eq!(g.d_weights[0][r * 4 + c], delta[r] * a0[c]);
        }
    }
    assert_eq!(g.d_bias[0], delta);
}

#[test]
fn detector_error_trivial_cases() {
    let basis = SpectrumBasis::symmetric(1);
    let mut layer = DenseLayer::zeros(5, 3);
    for r in 0..3 {
        layer.weights[r * 5 + r + 1] = 1.0;
    }
    let net = ReadoutNetwork::from_layers(vec![layer], basis, HeadMode::Power, 1.0, 1.0).unwrap();
    assert_eq!(backward_to_detector(&net, &[0.0; 3]).unwrap(), vec![0.0; 5]);
    assert_eq!(backward_to_detector(&net, &[1.5, -2.0, 0.25]).unwrap(), vec![0.0, 1.5, -2.0, 0.25, 0.0]);
    assert!(backward_to_detector(&net, &[1.0; 4]).is_err());
}

#[test]
fn zero_detector_error_gives_zero_optical_gradients() {
    let (model, field, _) = toy_model(16, 3, &[8], HeadMode::Power, 9);
    let (_, trace) = model.forward_trace(&field).unwrap();
    let g = backward_optical(&model.stack, Some(&trace.optical), &vec![0.0; 256]).unwrap();
    assert!(g.d_theta.iter().flatten().all(|v| *v == 0.0));
    assert!(g.d_transmission.iter().flatten().all(|v| *v == Complex64::new(0.0, 0.0)));
}

#[test]
fn flat_phase_response_zeroes_theta_gradient() {
    let (mut model, field, _) = toy_model(16, 2, &[8], HeadMode::Power, 10);
    let beta = model.stack.layers[0].beta;
    model.stack.layers[0].theta[37] = std::f64::consts::PI / (2.0 * beta);
    let (_, trace) = model.forward_trace(&field).unwrap();
    let d: Vec<f64> = (0..256).map(|i| (i as f64 * 0.37).sin()).collect();
    let g = backward_optical(&model.stack, Some(&trace.optical), &d).unwrap();
    assert!(g.d_theta[0][37].abs() < 1e-15);
    assert!(g.d_transmission[0][37].norm() > 0.0);
}

#[test]
fn missing_or_mismatched_trace_rejected() {
    let (model, field, _) = toy_model(16, 2, &[8], HeadMode::Power, 11);
    assert!(backward_optical(&model.stack, None, &vec![0.0; 256]).is_err());
    let (_, trace) = model.forward_trace(&field).unwrap();
    let deeper = OpticalStack::new(model.grid(), 3, 10.0, 2, 1.0, 3.0).unwrap();
    assert!(backward_optical(&deeper, Some(&trace.optical), &vec![0.0; 256]).is_err());
    assert!(backward_electronic(
        &model.readout,
        None,
        &HeadGradient {
            weights: vec![0.0; 5],
            phases: None
        }
    )
    .is_err());
}

#[test]
fn reverse_sweep_equals_dense_products() {
    let grid = GridSpec::new(8, 0.5).unwrap();
    let mut stack = OpticalStack::new(grid, 3, 2.0, 2, 1.0, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for l in &mut stack.layers {
        l.theta.iter_mut().for_each(|t| *t = rng.random_range(-2.0..2.0));
    }
    let field = ComplexField::from_samples(
        grid,
        (0..64)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
        0.0,
    )
    .unwrap();
    let (_, trace) = stack.forward(&field, true).unwrap();
    let trace = trace.unwrap();
    let d: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sweep = backward_optical(&stack, Some(&trace), &d).unwrap();
    for p in 0..3 {
        let dense = dense_transmission_gradient(&stack, &trace, &d, p).unwrap();
        let err = dense
            .iter()
            .zip(&sweep.d_transmission[p])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "layer {p}: {err}");
    }
}

#[test]
fn gradients_are_additive_over_samples() {
    let (model, f1, l1) = toy_model(16, 2, &[8], HeadMode::Power, 13);
    let (_, f2, l2) = toy_model(16, 2, &[8], HeadMode::Power, 14);
    let ids: Vec<ParamId> = {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        (0..40).map(|_| model.random_param(&mut rng)).collect()
    };
    let bundle = |f: &ComplexField, l: &ComplexSpectrum| {
        let (h, t) = model.forward_trace(f).unwrap();
        model.backward(&t, &data_loss(&h, l, HeadMode::Power).unwrap().1).unwrap()
    };
    let (b1, b2) = (bundle(&f1, &l1), bundle(&f2, &l2));
    let sum_loss = |m: &HybridModel| {
        data_loss(&m.predict(&f1).unwrap(), &l1, HeadMode::Power).unwrap().0 + data_loss(&m.predict(&f2).unwrap(), &l2, HeadMode::Power).unwrap().0
    };
    let h = 1e-4;
    let mut work = model.clone();
    for id in ids {
        let orig = work.param(id);
        *work.param_mut(id) = orig + h;
        let p = sum_loss(&work);
        *work.param_mut(id) = orig - h;
        let m = sum_loss(&work);
        *work.param_mut(id) = orig;
        let err = relative_error(b1.get(id) + b2.get(id), (p - m) / (2.0 * h));
        assert!(err < 1e-4, "{id:?}: {err}");
    }
}

#[test]
fn coarse_steps_are_truncation_dominated() {
    let (model, field, label) = toy_model(16, 2, &[8], HeadMode::Power, 16);
    let ids: Vec<ParamId> = (0..20).map(|index| ParamId::Theta { layer: 0, index: index * 11 }).collect();
    let fine = check_params(&model, &field, &label, 0.0, 1e-4, &ids).unwrap();
    let coarse = check_params(&model, &field, &label, 0.0, 1e-1, &ids).unwrap();
    assert!(coarse.max_relative_error > fine.max_relative_error);
    assert!(coarse.max_relative_error > 1e-4);
}
