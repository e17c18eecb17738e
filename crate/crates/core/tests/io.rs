use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;
use oamnet::config::RunConfig;
use oamnet::holography::Image;
use oamnet::io::checkpoint::quantize_like_checkpoint;
use oamnet::io::{
    config_hash, decode_field, decode_pgm, decode_tensors, encode_field, encode_pgm16, encode_tensors, fmt_f64, load_checkpoint, load_dataset,
    read_csv, save_checkpoint, save_dataset, write_csv, Manifest, Tensor,
};
use oamnet::model::{HybridModel, ModelConfig};
use oamnet::training::{generate_dataset, DatasetConfig, Split};
use oamnet::{ComplexField, Error, GridSpec, SpectrumBasis};

fn small_model(seed: u64) -> HybridModel {
    let cfg = ModelConfig {
        n: 16,
        layers: 2,
        hidden: vec![8],
        k_n: -2,
        k_p: 2,
        ..ModelConfig::default()
    };
    let mut m = HybridModel::new(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    for l in &mut m.stack.layers {
        l.theta.iter_mut().for_each(|t| *t = rng.random_range(-1.0..1.0));
    }
    m
}

#[test]
fn field_round_trip_is_exact_at_f32() {
    let g = GridSpec::new(8, 0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = (0..64)
        .map(|_| Complex64::new(rng.random::<f32>() as f64, rng.random::<f32>() as f64))
        .collect();
    let f = ComplexField::from_samples(g, samples, 12.5).unwrap();
    let back = decode_field(&encode_field(&f)).unwrap();
    assert_eq!(back, f);
}

#[test]
fn truncated_or_foreign_field_bytes_are_rejected() {
    let f = ComplexField::zeros(GridSpec::new(8, 1.0).unwrap());
    let bytes = encode_field(&f);
    assert!(matches!(decode_field(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
    assert!(matches!(decode_field(b"hello world, not a field"), Err(Error::Format(_))));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(decode_field(&extra).is_err());
}

#[test]
fn tensor_round_trip() {
    let ts = vec![
        Tensor {
            name: "a".into(),
            dims: vec![2, 3],
            data: vec![1.0, -2.0, 0.5, 0.25, 8.0, -0.125],
        },
        Tensor {
            name: "bias.0".into(),
            dims: vec![1],
            data: vec![3.0],
        },
    ];
    assert_eq!(decode_tensors(&encode_tensors(&ts).unwrap()).unwrap(), ts);
    assert!(decode_tensors(&[1, 2, 3]).is_err());
}

#[test]
fn pgm16_round_trip_and_8bit_with_comment() {
    let img = Image::new(3, 2, vec![0.0, 1.0, 0.5, 0.25, 0.75, 1.0]).unwrap();
    let back = decode_pgm(&encode_pgm16(&img, 0.0, 1.0)).unwrap();
    for (a, b) in img.data.iter().zip(&back.data) {
        assert!((a * 65535.0 - b).abs() <= 0.5);
    }
    let mut p8 = b"P5\n# note\n2 1\n255\n".to_vec();
    p8.extend_from_slice(&[7, 200]);
    assert_eq!(decode_pgm(&p8).unwrap().data, vec![7.0, 200.0]);
    assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
    assert!(decode_pgm(b"P5\n2 2\n255\n\x00").is_err());
}

#[test]
fn csv_preserves_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut values: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 10f64.powi(rng.random_range(-300..300))).collect();
    values.extend([0.1, 1.0 / 3.0, f64::MIN_POSITIVE, f64::MAX, -0.0, 5e-324]);
    let rows: Vec<Vec<String>> = values.iter().map(|v| vec![fmt_f64(*v)]).collect();
    let path = dir.path().join("t.csv");
    write_csv(&path, &["v"], &rows).unwrap();
    let (header, back) = read_csv(&path).unwrap();
    assert_eq!(header, vec!["v"]);
    for (v, r) in values.iter().zip(&back) {
        assert_eq!(r[0].parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}

#[test]
fn checkpoint_reload_matches_stored_precision() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_model(5);
    save_checkpoint(dir.path(), &m, 5, Some(3)).unwrap();
    let (back, meta) = load_checkpoint(dir.path()).unwrap();
    assert_eq!(meta.epoch, Some(3));
    assert_eq!(meta.seed, 5);
    let mut q = m.clone();
    quantize_like_checkpoint(&mut q);
    let f = ComplexField::from_fn(m.grid(), |x, y| Complex64::new((-(x * x + y * y) / 4.0).exp(), 0.1 * x));
    assert_eq!(back.predict(&f).unwrap().weights, q.predict(&f).unwrap().weights);
    // Saving the reloaded model reproduces the same bytes.
    let dir2 = tempfile::tempdir().unwrap();
    save_checkpoint(dir2.path(), &back, 5, Some(3)).unwrap();
    for name in ["model.json", "model.tensors"] {
        assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(dir2.path().join(name)).unwrap()
        );
    }
}

#[test]
fn checkpoint_with_missing_tensor_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    save_checkpoint(dir.path(), &small_model(1), 0, None).unwrap();
    let path = dir.path().join("model.tensors");
    let mut ts = decode_tensors(&std::fs::read(&path).unwrap()).unwrap();
    ts.pop();
    std::fs::write(&path, encode_tensors(&ts).unwrap()).unwrap();
    assert!(load_checkpoint(dir.path()).is_err());
}

#[test]
fn dataset_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = DatasetConfig {
        spectra: 3,
        phases_per_weight: 2,
        val: 2,
        test: 2,
        verify: 1,
        ..DatasetConfig::desk()
    };
    let g = GridSpec::new(32, 0.5).unwrap();
    let ds = generate_dataset(&cfg, g, SpectrumBasis::symmetric(2)).unwrap();
    save_dataset(dir.path(), &ds, &cfg).unwrap();
    let back = load_dataset(dir.path()).unwrap();
    assert_eq!(back.samples.len(), ds.samples.len());
    assert_eq!(back.split(Split::Train).len(), 6);
    for (a, b) in ds.samples.iter().zip(&back.samples) {
        assert_eq!(a.split, b.split);
        assert_eq!(a.label.amplitudes, b.label.amplitudes);
        let err = a.field.max_abs_diff(&b.field);
        assert!(err < 1e-6, "{err}");
    }
}

#[test]
fn config_defaults_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"grid": {"n": 32}, "training": {"epochs": 4}}"#).unwrap();
    let cfg = RunConfig::load(&p).unwrap();
    assert_eq!(cfg.grid.n, 32);
    assert_eq!(cfg.grid.pitch, 0.5);
    assert_eq!(cfg.training.epochs, 4);
    assert_eq!(cfg.stack.layers, 5);
    std::fs::write(&p, r#"{"grid": {"n": 32, "size": 1}}"#).unwrap();
    assert!(RunConfig::load(&p).is_err());
    std::fs::write(&p, r#"{"extra": {}}"#).unwrap();
    assert!(RunConfig::load(&p).is_err());
}

#[test]
fn presets_have_the_expected_splits() {
    let p = RunConfig::paper();
    assert_eq!(p.dataset.train_len(), 27000);
    assert_eq!(
        (p.dataset.spectra * p.dataset.phases_per_weight, p.dataset.val, p.dataset.test),
        (25000, 5000, 5000)
    );
    assert_eq!(p.grid.n, 200);
    assert_eq!(p.model_config().basis().unwrap().count(), 21);
    let d = RunConfig::default();
    assert_eq!((d.dataset.train_len(), d.dataset.val, d.dataset.test), (2000, 1000, 1000));
    assert_eq!(d.model_config().basis().unwrap().count(), 11);
}

#[test]
fn config_hash_tracks_content() {
    let a = RunConfig::default();
    let mut b = a.clone();
    assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    b.training.seed = 1;
    assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    assert_eq!(config_hash(&a).unwrap().len(), 64);
}

#[test]
fn manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = Manifest::new("test", &RunConfig::default(), 9, vec!["x.csv".into()]).unwrap();
    m.write(dir.path()).unwrap();
    assert_eq!(Manifest::read(dir.path()).unwrap(), m);
}

#[test]
fn io_errors_map_to_io_exit_code() {
    let e = load_checkpoint("/nonexistent/checkpoint").unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(Error::Format("x".into()).exit_code(), 1);
    assert_eq!(Error::NonFinite { epoch: 1, step: 0 }.exit_code(), 3);
}
