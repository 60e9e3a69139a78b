//! Seeded Monte-Carlo for `μ_x^{n,α}` in double precision.
//!
//! RNG discipline: every batch owns a `ChaCha20Rng` seeded from the user seed,
//! with a fixed stream per purpose (see [`Stream`]). Nothing is shared across
//! batches, so equal inputs give bit-identical output regardless of threads.

mod io;
mod ks;
mod wos;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

pub use io::{read_binary, read_csv, write_binary, write_csv, BINARY_MAGIC, BINARY_VERSION};
pub use ks::{kolmogorov_q, ks_one_sample, ks_two_sample, ks_two_sample_values, KsResult};
pub use wos::{walk_on_spheres, MAX_REJECTION_FRACTION, MAX_WALK_STEPS};

use crate::error::{Error, Result};
use crate::measures::{MarginalDensity, SphereParams};
use crate::profiles::ModelProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    InverseCdf,
    WalkOnSpheres,
}

/// ChaCha stream ids; one per independent purpose within a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Uniforms = 1,
    Directions = 2,
    Walk = 3,
    Audit = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Uniform on the open interval `(0, 1)` with 53 random bits.
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform direction in `R^dim`.
pub fn random_direction(rng: &mut impl RngCore, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Angle between a unit vector and the unit axis `axis`, accurate near both poles.
pub fn angle_to_axis(point: &[f64], axis: &[f64]) -> f64 {
    let c: f64 = point.iter().zip(axis).map(|(p, a)| p * a).sum();
    let perp = point
        .iter()
        .zip(axis)
        .map(|(p, a)| (p - c * a).powi(2))
        .sum::<f64>()
        .sqrt();
    perp.atan2(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub params: SphereParams<f64>,
    pub thetas: Vec<f64>,
    /// Unit vectors in `R^{n+1}`; the pole direction is the first axis for
    /// direct samples and `x/|x|` for walks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// Axis the angles are measured from.
    #[serde(skip)]
    pub axis: Vec<f64>,
    pub seed: u64,
    pub method: SampleMethod,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Unit norm within 1e-12 and angle consistency within 1e-10 on a seeded
    /// subsample of `fraction` of the points (at least one).
    pub fn check_invariants(&self, fraction: f64) -> Result<()> {
        if let Some(t) = self.thetas.iter().find(|t| !(0.0..=std::f64::consts::PI).contains(*t)) {
            return Err(Error::Format(format!("angle {t} outside [0, pi]")));
        }
        let Some(points) = &self.points else {
            return Ok(());
        };
        if points.len() != self.thetas.len() {
            return Err(Error::Format("points and angles differ in length".into()));
        }
        if points.is_empty() {
            return Ok(());
        }
        let picks = ((points.len() as f64 * fraction).ceil() as usize).clamp(1, points.len());
        let mut rng = stream_rng(self.seed, Stream::Audit);
        for _ in 0..picks {
            let i = (rng.next_u64() % points.len() as u64) as usize;
            let p = &points[i];
            let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Format(format!("point {i} has norm {norm}")));
            }
            let theta = angle_to_axis(p, &self.axis);
            if (theta - self.thetas[i]).abs() > 1e-10 {
                return Err(Error::Format(format!(
                    "point {i} lies at angle {theta}, recorded {}",
                    self.thetas[i]
                )));
            }
        }
        Ok(())
    }
}

fn first_axis(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = 1.0;
    e
}

/// Inverse-CDF draws of the angle, optionally lifted to `S^n` with a uniform
/// direction orthogonal to the first axis.
pub fn sample_direct(params: &SphereParams<f64>, count: usize, seed: u64, lift: bool) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: 0.0,
            reason: "at least one sample is required",
        });
    }
    let marginal = MarginalDensity::new(*params)?;
    sample_direct_with(&marginal, count, seed, lift)
}

pub fn sample_direct_with(marginal: &MarginalDensity<f64>, count: usize, seed: u64, lift: bool) -> Result<SampleBatch> {
    let params = *marginal.params();
    let mut rng = stream_rng(seed, Stream::Uniforms);
    let uniforms: Vec<f64> = (0..count).map(|_| open_unit(&mut rng)).collect();
    let thetas: Vec<f64> = uniforms
        .par_iter()
        .map(|&u| marginal.quantile(u))
        .collect::<Result<_>>()?;
    let dim = params.n + 1;
    let points = lift.then(|| {
        let mut rng = stream_rng(seed, Stream::Directions);
        thetas
            .iter()
            .map(|&t| {
                let dir = random_direction(&mut rng, params.n);
                let (sin, cos) = t.sin_cos();
                std::iter::once(cos).chain(dir.into_iter().map(|d| sin * d)).collect()
            })
            .collect()
    });
    Ok(SampleBatch {
        params,
        thetas,
        points,
        axis: first_axis(dim),
        seed,
        method: SampleMethod::InverseCdf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub r: f64,
    /// `μ(S^n \ A_r)` for the half-mass cap `A`.
    pub exact: f64,
    pub empirical: f64,
    /// `∫_r^∞ φ_{n,α}`.
    pub model_tail: f64,
    /// Binomial standard error of `empirical` around `exact`.
    pub std_error: f64,
}

impl ConcentrationRow {
    pub fn dominated(&self) -> bool {
        self.exact <= self.model_tail + CONCENTRATION_TOL
    }

    pub fn empirical_within(&self, sigmas: f64) -> bool {
        (self.empirical - self.exact).abs() <= sigmas * self.std_error
    }
}

/// Slack allowed when comparing the exact tail to the model tail.
pub const CONCENTRATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub params: SphereParams<f64>,
    pub median: f64,
    pub count: usize,
    pub seed: u64,
    pub rows: Vec<ConcentrationRow>,
}

impl ConcentrationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ConcentrationRow::dominated)
    }
}

/// Enlargements of the cap `{θ ≤ median}`: exact, sampled and model tails.
pub fn concentration_experiment(
    params: &SphereParams<f64>,
    r_grid: &[f64],
    count: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let profile = ModelProfile::new(*params)?;
    let marginal = MarginalDensity::new(*params)?;
    let median = marginal.median()?;
    let batch = sample_direct_with(&marginal, count.max(1), seed, false)?;
    let mut sorted = batch.thetas;
    sorted.sort_by(f64::total_cmp);
    let pi = std::f64::consts::PI;
    let rows = r_grid
        .iter()
        .map(|&r| {
            if !(r >= 0.0) {
                return Err(Error::Domain {
                    name: "r",
                    value: r,
                    domain: "[0, inf)",
                });
            }
            let edge = median + r;
            let exact = if edge >= pi { 0.0 } else { marginal.sf(edge)? };
            let beyond = sorted.len() - sorted.partition_point(|&t| t <= edge);
            let empirical = beyond as f64 / sorted.len() as f64;
            Ok(ConcentrationRow {
                r,
                exact,
                empirical,
                model_tail: profile.tail(r)?,
                std_error: (exact * (1.0 - exact) / sorted.len() as f64).sqrt(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConcentrationReport {
        params: *params,
        median,
        count: sorted.len(),
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_unit_stays_inside() {
        let mut rng = stream_rng(0, Stream::Uniforms);
        for _ in 0..10_000 {
            let u = open_unit(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn streams_are_independent() {
        let a = stream_rng(5, Stream::Uniforms).next_u64();
        let b = stream_rng(5, Stream::Directions).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, stream_rng(5, Stream::Uniforms).next_u64());
    }

    #[test]
    fn angle_to_axis_near_poles() {
        let t = 1e-9f64;
        let p = [t.cos(), t.sin(), 0.0];
        assert!((angle_to_axis(&p, &[1.0, 0.0, 0.0]) - t).abs() < 1e-20);
        let q = [-t.cos(), 0.0, t.sin()];
        assert!((angle_to_axis(&q, &[1.0, 0.0, 0.0]) - (std::f64::consts::PI - t)).abs() < 1e-15);
    }

    #[test]
    fn lifted_batch_satisfies_invariants() {
        let p = SphereParams::new(3, 1.0, 0.5).unwrap();
        let b = sample_direct(&p, 500, 7, true).unwrap();
        b.check_invariants(1.0).unwrap();
        let again = sample_direct(&p, 500, 7, false).unwrap();
        assert_eq!(b.thetas, again.thetas);
        assert!(sample_direct(&p, 0, 7, false).is_err());
    }

    #[test]
    fn concentration_at_zero_is_half() {
        let p = SphereParams::new(2, 1.0, 0.5).unwrap();
        let rep = concentration_experiment(&p, &[0.0, 0.5], 2000, 1).unwrap();
        assert!((rep.rows[0].exact - 0.5).abs() < 1e-9);
        assert!((rep.rows[0].model_tail - 0.5).abs() < 1e-15);
        assert!(rep.passed());
    }
}
