use num_complex::Complex64;

use oamnet::grid::*;

#[test]
fn grid_validation() {
    assert!(GridSpec::new(7, 1.0).is_err());
    assert!(GridSpec::new(9, 1.0).is_err());
    assert!(GridSpec::new(16, 0.0).is_err());
    assert!(GridSpec::new(16, -1.0).is_err());
    let g = GridSpec::new(16, 0.5).unwrap();
    assert_eq!(g.aperture(), 8.0);
}

#[test]
fn coordinates_are_centered() {
    let g = GridSpec::new(8, 1.0).unwrap();
    assert_eq!(g.coord(0), -3.5);
    assert_eq!(g.coord(7), 3.5);
    assert_eq!(g.coord(3) + g.coord(4), 0.0);
    assert_eq!(g.index_of(g.coord(5)), 5.0);
}

#[test]
fn normalize_gives_unit_power() {
    let g = GridSpec::new(16, 0.25).unwrap();
    let mut f = ComplexField::from_fn(g, |x, y| Complex64::new(x + 2.0, y));
    f.normalize().unwrap();
    assert!((f.power() - 1.0).abs() < 1e-12);
    let mut z = ComplexField::zeros(g);
    assert!(z.normalize().is_err());
}

#[test]
fn rejects_wrong_length() {
    let g = GridSpec::new(8, 1.0).unwrap();
    assert!(ComplexField::from_samples(g, vec![Complex64::new(0.0, 0.0); 63], 0.0).is_err());
}
