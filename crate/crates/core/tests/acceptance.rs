//! Acceptance gate. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails or exceeds its time budget.
//!
//! Run with `cargo test -p cdsphere --test acceptance -- --nocapture`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use cdsphere::curvature::{
    curvature_constant, f_objective, f_p, fd_ricci_oracle, generalized_ricci_quadform, min_f_disk, norm_epsilon,
    Euclidean,
};
use cdsphere::measures::{MarginalDensity, SphereParams};
use cdsphere::profiles::isop_check_caps;
use cdsphere::sampling::{concentration_experiment, ks_two_sample, sample_direct, walk_on_spheres};
use cdsphere::spectral::{spectral_gap, verify_bounds_for, BoundKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn params(n: usize, alpha: f64, s: f64) -> SphereParams<f64> {
    SphereParams::new(n, alpha, s).expect("valid acceptance parameters")
}

fn cd_minimum() -> Outcome {
    let m = min_f_disk(1.0_f64, 1.0).map_err(|e| e.to_string())?;
    let radius = m.argmin.0.hypot(m.argmin.1);
    if (m.min + 0.25).abs() > 1e-9 {
        return Err(format!("min {:.15}", m.min));
    }
    if (radius - 1.0).abs() > 1e-6 {
        return Err(format!("argmin radius {radius}"));
    }
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        // offset by half a step so the singular point (1, 0) is skipped
        let t = 2.0 * PI * (k as f64 + 0.5) / 100.0;
        let v = f_objective(t.cos(), t.sin()).map_err(|e| e.to_string())?;
        worst = worst.max((v + 0.25).abs());
    }
    if worst > 1e-12 {
        return Err(format!("boundary deviation {worst:.3e}"));
    }
    Ok(format!("min {:.12} at r={radius:.9}; boundary dev {worst:.1e}", m.min))
}

fn tensor_oracle() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut worst_rel: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..=10usize);
        let nf = n as f64;
        let alpha = rng.random_range(-nf + 0.1..=3.0 * nf);
        let s = rng.random_range(0.0..=0.95);
        let theta_y = rng.random_range(0.0..=PI);
        let phi = rng.random_range(0.0..=FRAC_PI_2);
        let p = params(n, alpha, s);
        let exact = generalized_ricci_quadform(&p, theta_y, phi).map_err(|e| e.to_string())?;
        let fd = fd_ricci_oracle(&p, theta_y, phi, 1e-3).map_err(|e| e.to_string())?;
        let rel = (exact - fd).abs() / exact.abs().max(1.0);
        worst_rel = worst_rel.max(rel);
        let rho = curvature_constant(n, alpha);
        worst_margin = worst_margin.min(exact.min(fd) - rho);
        if rel > 1e-4 || exact < rho - 1e-9 || fd < rho - 1e-9 {
            return Err(format!(
                "n={n} alpha={alpha} s={s} theta={theta_y} phi={phi}: exact {exact} fd {fd} rho {rho}"
            ));
        }
    }
    Ok(format!("max rel diff {worst_rel:.2e}; min margin over rho {worst_margin:.3e}"))
}

fn harmonic_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5, 10] {
        for s in [0.0, 0.3, 0.7, 0.95] {
            let c = MarginalDensity::new(params(n, 1.0, s))
                .map_err(|e| e.to_string())?
                .sphere_normalization();
            let err = (c - (1.0 - s * s)).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("n={n} s={s}: c={c}"));
            }
        }
    }
    Ok(format!("max |c - (1 - s^2)| = {worst:.2e}"))
}

fn uniform_gap() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 5] {
        let nf = n as f64;
        let cases = [(-nf, 0.0), (0.0, 0.0), (1.0, 0.0), (-nf, 0.5), (-nf, 0.9)];
        for (alpha, s) in cases {
            let r = spectral_gap(&params(n, alpha, s)).map_err(|e| e.to_string())?;
            let rel = (r.lambda_gap - nf).abs() / nf;
            worst = worst.max(rel);
            if rel > 0.005 {
                return Err(format!("n={n} alpha={alpha} s={s}: lambda {}", r.lambda_gap));
            }
        }
    }
    Ok(format!("max relative deviation from n: {worst:.2e}"))
}

fn harmonic_window() -> Outcome {
    let mut lines = Vec::new();
    for n in [2usize, 3, 5, 10] {
        let nf = n as f64;
        for s in [0.3, 0.7, 0.95] {
            let lambda = spectral_gap(&params(n, 1.0, s)).map_err(|e| e.to_string())?.lambda_gap;
            let in_window = (nf - 1.0) / 2.0 <= lambda && lambda <= nf * 1.005;
            let order = lambda >= 3.0 * (nf - 1.0) / 8.0 - 0.25;
            if !(in_window && order) {
                return Err(format!("n={n} s={s}: lambda {lambda}"));
            }
            if s == 0.95 {
                lines.push(format!("n={n}:{lambda:.4}"));
            }
        }
    }
    Ok(format!("all 12 in window; s=0.95 gaps {}", lines.join(" ")))
}

fn gap_lower_bounds() -> Outcome {
    let mut grid = Vec::new();
    let fractions = [0.05, 0.3, 0.6, 0.95, 0.99];
    let poles = [0.3, 0.7, 0.95, 0.5, 0.9];
    for n in [2usize, 3, 5, 10] {
        let top = 3.0 * n as f64 - 4.0;
        for (k, f) in fractions.iter().enumerate() {
            grid.push((n, f * top, poles[k]));
        }
    }
    for n in [2usize, 3, 5, 10] {
        for (alpha, s) in [(-0.9, 0.5), (-0.5, 0.95), (0.0, 0.8), (0.5, 0.7)] {
            grid.push((n, alpha, s));
        }
    }
    let (mut curvature, mut cheeger) = (0, 0);
    let mut slack = f64::INFINITY;
    for (n, alpha, s) in grid {
        let p = params(n, alpha, s);
        let lambda = spectral_gap(&p).map_err(|e| e.to_string())?.lambda_gap;
        let report = verify_bounds_for(&p, lambda).map_err(|e| e.to_string())?;
        for check in &report.checks {
            let relevant = match check.kind {
                BoundKind::Curvature => {
                    curvature += 1;
                    true
                }
                BoundKind::Cheeger if alpha < 1.0 => {
                    cheeger += 1;
                    true
                }
                _ => false,
            };
            if relevant {
                slack = slack.min(lambda - check.lower);
                if !check.holds {
                    return Err(format!("n={n} alpha={alpha} s={s}: {:?} lower {} lambda {lambda}", check.kind, check.lower));
                }
            }
        }
    }
    if curvature < 20 {
        return Err(format!("only {curvature} curvature checks"));
    }
    Ok(format!("{curvature} curvature + {cheeger} Cheeger checks; min slack {slack:.3e}"))
}

fn cap_isoperimetry() -> Outcome {
    let mut runs = 0;
    let mut worst = f64::INFINITY;
    for n in [2usize, 3, 5, 10] {
        let nf = n as f64;
        let top = 3.0 * nf - 4.0;
        for alpha in [-0.5, 0.0, 1.0, nf, top - 0.1] {
            if !(alpha > -1.0 && alpha < top) {
                continue;
            }
            for s in [0.0, 0.3, 0.7, 0.95] {
                let report = isop_check_caps(&params(n, alpha, s), 200).map_err(|e| e.to_string())?;
                runs += 1;
                worst = worst.min(report.worst_slack);
                if !report.passed() {
                    return Err(format!(
                        "n={n} alpha={alpha} s={s}: slack {} at theta0 {}",
                        report.worst_slack, report.worst_theta0
                    ));
                }
            }
        }
    }
    Ok(format!("{runs} parameter sets x 200 angles; worst slack {worst:.3e}"))
}

fn concentration() -> Outcome {
    let triples = [
        (2, 1.0, 0.5),
        (3, 1.0, 0.7),
        (5, 5.0, 0.9),
        (2, -0.5, 0.3),
        (3, 0.0, 0.95),
        (5, 1.0, 0.95),
        (10, 1.0, 0.5),
        (10, 20.0, 0.7),
        (3, 4.0, 0.3),
        (5, -0.9, 0.8),
    ];
    let r_grid: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    let mut worst_sigma: f64 = 0.0;
    for (i, &(n, alpha, s)) in triples.iter().enumerate() {
        let report = concentration_experiment(&params(n, alpha, s), &r_grid, 10_000, 100 + i as u64)
            .map_err(|e| e.to_string())?;
        for row in &report.rows {
            if !row.dominated() {
                return Err(format!("n={n} alpha={alpha} s={s} r={}: exact {} > model {}", row.r, row.exact, row.model_tail));
            }
            if !row.empirical_within(3.0) {
                return Err(format!(
                    "n={n} alpha={alpha} s={s} r={}: empirical {} exact {} se {}",
                    row.r, row.empirical, row.exact, row.std_error
                ));
            }
            if row.std_error > 0.0 {
                worst_sigma = worst_sigma.max((row.empirical - row.exact).abs() / row.std_error);
            }
        }
    }
    Ok(format!("10 triples x 20 radii dominated; max |z| {worst_sigma:.2}"))
}

fn harmonic_cross_validation() -> Outcome {
    let mut min_p: f64 = 1.0;
    for (k, (n, s)) in [(2usize, 0.3), (2, 0.5), (2, 0.8), (3, 0.3), (3, 0.5), (3, 0.8)]
        .into_iter()
        .enumerate()
    {
        let mut x = vec![0.0; n + 1];
        x[0] = s;
        let seed = 900 + k as u64;
        let walks = walk_on_spheres(n, &x, 1e-6, seed, 20_000).map_err(|e| e.to_string())?;
        let direct = sample_direct(&params(n, 1.0, s), 20_000, seed, false).map_err(|e| e.to_string())?;
        let ks = ks_two_sample(&walks, &direct);
        min_p = min_p.min(ks.p_value);
        if ks.p_value <= 0.01 {
            return Err(format!("n={n} s={s}: D={} p={}", ks.statistic, ks.p_value));
        }
    }
    Ok(format!("6 cases; min p-value {min_p:.3}"))
}

fn f_p_behaviour() -> Outcome {
    for p in [1.0_f64, 1.5, 2.0, 4.0] {
        let m = min_f_disk(1.0_f64, p).map_err(|e| e.to_string())?;
        if (m.min + 0.25).abs() > 1e-9 {
            return Err(format!("p={p}: min {}", m.min));
        }
    }
    let a: f64 = 1.0 - 1e-5;
    let v = f_p(0.5, a, (1.0 - a * a).sqrt()).map_err(|e| e.to_string())?;
    if v >= -1e4 {
        return Err(format!("F_0.5 at a={a}: {v}"));
    }
    Ok(format!("min -1/4 for p in {{1, 1.5, 2, 4}}; F_0.5(1-1e-5) = {v:.1}"))
}

fn norm_condition() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 5] {
        let eps = norm_epsilon::<f64, _>(&Euclidean, n, 10_000, 1e-3, 11).map_err(|e| e.to_string())?;
        worst = worst.max((eps.epsilon - 1.0).abs());
        if (eps.epsilon - 1.0).abs() > 1e-6 {
            return Err(format!("n={n}: epsilon {}", eps.epsilon));
        }
        for alpha in [-0.5, 1.0, 7.0] {
            let (rho, dim) = eps.implied_certificate(n, alpha);
            let expected = n as f64 - 1.0;
            if (rho - expected).abs() > 1e-6 * (n as f64 + alpha) || dim != -alpha {
                return Err(format!("n={n} alpha={alpha}: CD({rho}, {dim})"));
            }
        }
    }
    Ok(format!("max |eps - 1| = {worst:.2e}; certificate CD(n-1, -alpha)"))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("CD minimum on the unit disk", 1, cd_minimum),
        ("closed-form vs FD Ricci", 10, tensor_oracle),
        ("harmonic normalization", 5, harmonic_normalization),
        ("uniform-sphere spectral gap", 60, uniform_gap),
        ("harmonic gap window", 300, harmonic_window),
        ("gap lower bounds", 300, gap_lower_bounds),
        ("cap isoperimetry", 120, cap_isoperimetry),
        ("concentration tails", 120, concentration),
        ("walk-on-spheres vs inverse CDF", 120, harmonic_cross_validation),
        ("F_p behaviour", 5, f_p_behaviour),
        ("norm condition", 30, norm_condition),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over {budget}s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("[{tag}] {:>2}. {name:<32} {elapsed:>10.2?}  {detail}", i + 1);
        if tag == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
