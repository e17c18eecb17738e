use oamnet::training::optimizer::*;

#[test]
fn schedule_halves_every_period() {
    assert_eq!(learning_rate(1e-3, 0.5, 15, 0), 1e-3);
    assert_eq!(learning_rate(1e-3, 0.5, 15, 14), 1e-3);
    assert_eq!(learning_rate(1e-3, 0.5, 15, 15), 5e-4);
    assert_eq!(learning_rate(1e-3, 0.5, 15, 45), 1.25e-4);
}

#[test]
fn adam_minimizes_a_quadratic() {
    let mut x = vec![3.0, -2.0];
    let mut opt = Adam::new(&[2]);
    for _ in 0..2000 {
        let g = vec![2.0 * x[0], 8.0 * x[1]];
        opt.update(&mut [x.as_mut_slice()], &[g], &[0.05]);
    }
    assert!(x.iter().all(|v| v.abs() < 1e-3), "{x:?}");
}

#[test]
fn first_step_moves_by_the_learning_rate() {
    let mut x = vec![1.0];
    let mut opt = Adam::new(&[1]);
    opt.update(&mut [x.as_mut_slice()], &[vec![0.3]], &[0.01]);
    assert!((x[0] - 0.99).abs() < 1e-9);
}
