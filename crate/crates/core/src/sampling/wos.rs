//! Walk-on-spheres sampler of the exit point of Brownian motion from the unit
//! ball, independent of any density formula.

use rand::Rng;

use super::{angle_to_axis, first_axis, random_direction, stream_rng, SampleBatch, SampleMethod, Stream};
use crate::error::{Error, Result};
use crate::measures::SphereParams;

pub const MAX_WALK_STEPS: usize = 100_000;
/// Largest tolerated fraction of walks hitting the step cap.
pub const MAX_REJECTION_FRACTION: f64 = 1e-3;

fn walk(rng: &mut impl Rng, start: &[f64], eps: f64) -> Option<Vec<f64>> {
    let mut z = start.to_vec();
    for _ in 0..MAX_WALK_STEPS {
        let norm = z.iter().map(|c| c * c).sum::<f64>().sqrt();
        let radius = 1.0 - norm;
        if radius < eps {
            return Some(z.iter().map(|c| c / norm).collect());
        }
        for (zi, di) in z.iter_mut().zip(random_direction(rng, start.len())) {
            *zi += radius * di;
        }
    }
    None
}

/// Exit points on `S^n ⊂ R^{n+1}` of walks started at `x` and stopped within
/// `eps` of the sphere. Angles are measured from `x/|x|`, or the first axis
/// when `x = 0`. The result is attached to the harmonic measure `α = 1`.
pub fn walk_on_spheres(n: usize, x: &[f64], eps: f64, seed: u64, count: usize) -> Result<SampleBatch> {
    if x.len() != n + 1 {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x.len() as f64,
            reason: "starting point must have n + 1 coordinates",
        });
    }
    if !(1e-8..=1e-3).contains(&eps) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "stopping distance must lie in [1e-8, 1e-3]",
        });
    }
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: 0.0,
            reason: "at least one sample is required",
        });
    }
    let s = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let params = SphereParams::new(n, 1.0, s)?;
    let axis = if s > 0.0 {
        x.iter().map(|c| c / s).collect()
    } else {
        first_axis(n + 1)
    };

    let mut rng = stream_rng(seed, Stream::Walk);
    let mut points = Vec::with_capacity(count);
    let mut rejected = 0usize;
    while points.len() < count {
        match walk(&mut rng, x, eps) {
            Some(p) => points.push(p),
            None => {
                rejected += 1;
                log::warn!("walk {} exceeded {MAX_WALK_STEPS} steps", points.len() + rejected);
            }
        }
    }
    let total = points.len() + rejected;
    if rejected as f64 > MAX_REJECTION_FRACTION * total as f64 {
        return Err(Error::TooManyRejections { rejected, total });
    }
    let thetas = points.iter().map(|p| angle_to_axis(p, &axis)).collect();
    Ok(SampleBatch {
        params,
        thetas,
        points: Some(points),
        axis,
        seed,
        method: SampleMethod::WalkOnSpheres,
    })
}
