use cdsphere::measures::{MarginalDensity, SphereParams};
use cdsphere::sampling::{
    concentration_experiment, ks_one_sample, ks_two_sample, read_binary, read_csv, sample_direct, walk_on_spheres,
    write_binary, write_csv, SampleMethod,
};

fn params(n: usize, alpha: f64, s: f64) -> SphereParams<f64> {
    SphereParams::new(n, alpha, s).unwrap()
}

#[test]
fn uniform_two_sphere_angles() {
    let b = sample_direct(&params(2, 1.0, 0.0), 100_000, 3, false).unwrap();
    let ks = ks_one_sample(&b.thetas, |t| (1.0 - t.cos()) / 2.0);
    assert!(ks.statistic < 1.36 / (1e5f64).sqrt(), "{ks:?}");
}

#[test]
fn direct_sampling_matches_quadrature_cdf() {
    let p = params(2, 3.0, 0.8);
    let m = MarginalDensity::new(p).unwrap();
    let b = sample_direct(&p, 100_000, 11, false).unwrap();
    let ks = ks_one_sample(&b.thetas, |t| m.cdf(t).unwrap());
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn batches_are_reproducible() {
    let p = params(3, 1.0, 0.5);
    let a = sample_direct(&p, 1000, 7, true).unwrap();
    let b = sample_direct(&p, 1000, 7, true).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.method, SampleMethod::InverseCdf);
    a.check_invariants(0.01).unwrap();
    let c = sample_direct(&p, 1000, 8, true).unwrap();
    assert_ne!(a.thetas, c.thetas);
}

#[test]
fn walks_from_the_centre_are_uniform() {
    let b = walk_on_spheres(2, &[0.0; 3], 1e-4, 5, 5000).unwrap();
    let ks = ks_one_sample(&b.thetas, |t| (1.0 - t.cos()) / 2.0);
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn walks_reproduce_the_harmonic_measure_off_axis() {
    // pole along a non-coordinate direction: angles are measured from x/|x|
    let x = [0.0, 0.4, 0.0, -0.3];
    let walks = walk_on_spheres(3, &x, 1e-6, 21, 20_000).unwrap();
    walks.check_invariants(0.01).unwrap();
    assert!((walks.params.s - 0.5).abs() < 1e-15);
    let direct = sample_direct(&params(3, 1.0, 0.5), 20_000, 21, false).unwrap();
    let ks = ks_two_sample(&walks, &direct);
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn two_sample_ks_is_calibrated() {
    let p = params(3, 2.0, 0.6);
    let m = MarginalDensity::new(p).unwrap();
    let passes = (0..100u64)
        .filter(|&rep| {
            let a = cdsphere::sampling::sample_direct_with(&m, 10_000, 2 * rep, false).unwrap();
            let b = cdsphere::sampling::sample_direct_with(&m, 10_000, 2 * rep + 1, false).unwrap();
            ks_two_sample(&a, &b).p_value > 0.01
        })
        .count();
    assert!(passes >= 98, "{passes}");
}

#[test]
fn concentration_examples() {
    let at_zero = concentration_experiment(&params(2, 1.0, 0.5), &[0.0], 1000, 1).unwrap();
    assert!(at_zero.rows[0].exact <= 0.5 + 1e-9);
    let grid: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
    let harmonic = concentration_experiment(&params(3, 1.0, 0.7), &grid, 10_000, 2).unwrap();
    assert!(harmonic.passed());
    let peaked = concentration_experiment(&params(5, 5.0, 0.9), &grid, 10_000, 3).unwrap();
    assert!(peaked.passed());
    for row in &peaked.rows {
        assert!(row.empirical_within(3.0), "{row:?}");
    }
}

#[test]
fn batch_files_round_trip() {
    let b = sample_direct(&params(2, 1.0, 0.3), 257, 4, false).unwrap();
    let mut bin = Vec::new();
    write_binary(&b.thetas, &mut bin).unwrap();
    assert_eq!(bin.len(), 16 + 8 * 257);
    assert_eq!(read_binary(&bin[..]).unwrap(), b.thetas);
    let mut text = Vec::new();
    write_csv(&b.thetas, &mut text).unwrap();
    assert_eq!(read_csv(&text[..]).unwrap(), b.thetas);
}
