//! Kolmogorov–Smirnov statistics with the asymptotic Kolmogorov p-value.

use serde::Serialize;

use super::SampleBatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `Q(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`, the Kolmogorov survival function.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let a = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 2.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = sign * (a * jf * jf).exp();
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

fn p_value(d: f64, effective_n: f64) -> f64 {
    let en = effective_n.sqrt();
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Panics if either slice is empty.
pub fn ks_two_sample_values(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    KsResult {
        statistic: d,
        p_value: if d == 0.0 { 1.0 } else { p_value(d, na * nb / (na + nb)) },
    }
}

pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch) -> KsResult {
    ks_two_sample_values(&a.thetas, &b.thetas)
}

/// One-sample statistic against a continuous CDF. Panics on an empty sample.
pub fn ks_one_sample(values: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    assert!(!values.is_empty(), "KS needs a nonempty sample");
    let v = sorted(values);
    let n = v.len() as f64;
    let d = v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    });
    KsResult {
        statistic: d,
        p_value: p_value(d, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_q_reference_points() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.04946).abs() < 1e-4);
        assert!((kolmogorov_q(1.63) - 0.00977).abs() < 1e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn identical_and_shuffled() {
        let a = [0.3, 1.0, 2.0, 0.1, 0.1];
        let b = [2.0, 0.1, 1.0, 0.1, 0.3];
        let r = ks_two_sample_values(&a, &b);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_samples() {
        let r = ks_two_sample_values(&[0.0, 0.1, 0.2], &[1.0, 1.1]);
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn one_sample_against_uniform() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_one_sample(&v, |x| x);
        assert!((r.statistic - 0.0005).abs() < 1e-12);
        assert_eq!(r.p_value, 1.0);
    }
}
