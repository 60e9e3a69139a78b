use std::f64::consts::PI;

use cdsphere::curvature::{
    curvature_constant, f_objective, f_p, fd_ricci_oracle, generalized_ricci_quadform, norm_epsilon, Ellipsoidal,
    Scaled,
};
use cdsphere::measures::{MarginalDensity, SphereParams};
use cdsphere::profiles::ModelProfile;
use cdsphere::quadrature::{integrate, Tolerance};
use cdsphere::spectral::spectral_gap;
use proptest::prelude::*;

fn any_params() -> impl Strategy<Value = SphereParams<f64>> {
    (2usize..=10, 0.0..=1.0f64, 0.0..=0.95f64).prop_map(|(n, frac, s)| {
        let nf = n as f64;
        SphereParams::new(n, -nf + frac * 4.0 * nf, s).unwrap()
    })
}

fn profile_params() -> impl Strategy<Value = SphereParams<f64>> {
    (2usize..=10, 0.01..=0.99f64).prop_map(|(n, frac)| {
        let top = 3.0 * n as f64 - 4.0;
        SphereParams::new(n, -1.0 + frac * (top + 1.0), 0.0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantile_inverts_cdf(p in any_params(), u in 0.001..0.999f64) {
        let m = MarginalDensity::new(p).unwrap();
        let theta = m.quantile(u).unwrap();
        prop_assert!((m.cdf(theta).unwrap() - u).abs() <= 10.0 * m.quantile_tolerance());
        prop_assert!((m.cdf(theta).unwrap() + m.sf(theta).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_integrates_to_one(p in any_params()) {
        let m = MarginalDensity::new(p).unwrap();
        // split at the concentration scale so the independent integrator sees the peak
        let knee = (1.0 - p.s).max(1e-3);
        let tol = Tolerance { max_intervals: 4000, ..Tolerance::new(1e-13, 1e-11) };
        let pdf = |t: f64| m.pdf(t).unwrap();
        let total = integrate(pdf, 0.0, knee, &tol).unwrap().value + integrate(pdf, knee, PI, &tol).unwrap().value;
        prop_assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn uniform_measures_share_one_marginal(n in 2usize..=10, alpha in -10.0..30.0f64, s in 0.0..0.95f64, theta in 0.01..3.13f64) {
        let flat = MarginalDensity::new(SphereParams::new(n, alpha, 0.0).unwrap()).unwrap();
        let other = MarginalDensity::new(SphereParams::new(n, -(n as f64), s).unwrap()).unwrap();
        prop_assert!((flat.pdf(theta).unwrap() - other.pdf(theta).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn harmonic_constant(n in 2usize..=10, s in 0.0..0.95f64) {
        let c = MarginalDensity::new(SphereParams::new(n, 1.0, s).unwrap()).unwrap().sphere_normalization();
        prop_assert!((c - (1.0 - s * s)).abs() <= 1e-8);
    }

    #[test]
    fn pressure_decreases(p in any_params(), a in 0.01..3.1f64, gap in 1e-3..0.5f64) {
        prop_assume!(p.s > 1e-3 && p.kernel_power() > 1e-3);
        let b = (a + gap).min(PI - 1e-3);
        prop_assume!(b > a);
        let m = MarginalDensity::new(p).unwrap();
        let ex = (p.n - 1) as i32;
        let ra = m.pdf(a).unwrap() / a.sin().powi(ex);
        let rb = m.pdf(b).unwrap() / b.sin().powi(ex);
        prop_assert!(rb < ra, "{ra} {rb}");
    }

    #[test]
    fn ricci_form_bounded_below_and_matches_fd(
        p in any_params(),
        theta in 0.0..=PI,
        phi in 0.0..=std::f64::consts::FRAC_PI_2,
    ) {
        prop_assume!(p.alpha >= -(p.n as f64) + 0.1);
        let exact = generalized_ricci_quadform(&p, theta, phi).unwrap();
        // the step has to resolve |y - x|, which shrinks to 1 - s at theta = 0
        let dist = (1.0 - 2.0 * p.s * theta.cos() + p.s * p.s).sqrt();
        let fd = fd_ricci_oracle(&p, theta, phi, 1e-3 * dist.min(1.0)).unwrap();
        prop_assert!((exact - fd).abs() <= 1e-4 * exact.abs().max(1.0));
        prop_assert!(exact >= curvature_constant(p.n, p.alpha) - 1e-9);
    }

    #[test]
    fn profile_inverse_round_trip(p in profile_params(), t in -5.0..5.0f64) {
        let prof = ModelProfile::new(p).unwrap();
        let u = prof.cdf(t).unwrap();
        let back = prof.cdf_inverse(u).unwrap();
        // the inverse stops at relative residual 1e-14 in the smaller tail
        let q = u.min(1.0 - u);
        prop_assert!((prof.cdf(back).unwrap() - u).abs() <= 2e-14 * q + 2.0 * f64::EPSILON);
        // u carries absolute error ~ulp(1), which moves t by ~ulp(1)/phi(t)
        prop_assert!((back - t).abs() <= 1e-8 + 4.0 * f64::EPSILON / prof.phi(t));
        prop_assert!(prof.cheeger_lower() > 0.0);
        prop_assert_eq!(prof.phi(t), prof.phi(-t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uniform_gap_is_dimension(n in 2usize..=10, alpha in -5.0..20.0f64, s in 0.0..0.95f64, flat_pole in any::<bool>()) {
        let p = if flat_pole {
            SphereParams::new(n, alpha, 0.0).unwrap()
        } else {
            SphereParams::new(n, -(n as f64), s).unwrap()
        };
        let r = spectral_gap(&p).unwrap();
        let nf = n as f64;
        prop_assert!((r.lambda_gap - nf).abs() <= 0.005 * nf);
        prop_assert!((r.trace(1).unwrap().extrapolated - nf).abs() <= 0.005 * nf);
    }

    #[test]
    fn norm_epsilon_scale_invariant(d in 1.0..5.0f64, factor in 0.1..10.0f64) {
        let ell = Ellipsoidal { diag: vec![1.0, d, 2.0] };
        let base = norm_epsilon(&ell, 2, 2000, 1e-3, 3).unwrap().epsilon;
        let scaled = Scaled { factor, inner: ell.clone() };
        let other = norm_epsilon(&scaled, 2, 2000, 1e-3, 3).unwrap().epsilon;
        prop_assert!((base - other).abs() <= 1e-9, "{base} {other}");
    }
}

#[test]
fn f_p_at_one_is_f_on_a_grid() {
    for i in 0..100 {
        for j in 0..100 {
            let a = -1.0 + 2.0 * (i as f64 + 0.5) / 100.0;
            let b = -1.0 + 2.0 * (j as f64 + 0.5) / 100.0;
            if a * a + b * b > 1.0 {
                continue;
            }
            let diff = (f_p(1.0, a, b).unwrap() - f_objective(a, b).unwrap()).abs();
            assert!(diff <= 1e-14, "({a}, {b})");
        }
    }
}

#[test]
fn f_blows_up_towards_the_pole() {
    assert!(f_objective(1.0 - 1e-6, 0.0).unwrap() > 1e5);
}

// A closure hides the factor, so finite-difference rounding steers the descent
// slightly differently; the result still agrees far below the FD accuracy.
#[test]
fn closure_scaling_matches_to_rounding() {
    use cdsphere::curvature::{FnNorm, Norm};
    let ell = Ellipsoidal { diag: vec![1.0, 3.0, 2.0] };
    let base = norm_epsilon(&ell, 2, 10_000, 1e-3, 5).unwrap().epsilon;
    let scaled = FnNorm(|y: &[f64]| 7.0 * ell.eval(y));
    let other = norm_epsilon(&scaled, 2, 10_000, 1e-3, 5).unwrap().epsilon;
    // minimum a_min / a_max at y = e₂, θ = e₁
    assert!((base - 1.0 / 3.0).abs() < 1e-6, "{base}");
    assert!((base - other).abs() < 1e-7, "{base} {other}");
}
