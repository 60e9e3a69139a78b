//! Curvature check for densities built from a general norm `‖·‖` in place of
//! the Euclidean distance, evaluated with `x = 0`.
//!
//! The relevant quantity is the largest `ε` with
//! `⟨∇²‖y‖ θ, θ⟩ ≥ ε ‖y‖` for all orthonormal `y, θ` on `S^n`; given it, the
//! weighted sphere satisfies `CD(n - 1 - (1 - ε)(n + α), -α)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A norm on `R^{n+1}`; only evaluation is required, derivatives are taken by
/// finite differences.
pub trait Norm<T: Scalar>: Sync {
    fn eval(&self, y: &[T]) -> T;

    /// `⟨∇²‖y‖ θ, θ⟩ / ‖y‖`, by default a five-point difference of step `h`
    /// along `θ`.
    fn curvature_ratio(&self, y: &[T], theta: &[T], h: T) -> T {
        let f = |t: T| self.eval(&along(y, theta, t));
        let two = h + h;
        let f0 = f(T::zero());
        let second = (-f(two) + T::lit(16.0) * f(h) - T::lit(30.0) * f0 + T::lit(16.0) * f(-h) - f(-two))
            / (T::lit(12.0) * h * h);
        second / f0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl<T: Scalar> Norm<T> for Euclidean {
    fn eval(&self, y: &[T]) -> T {
        y.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
    }
}

/// `⟨A y, y⟩^{1/2}` for diagonal positive `A`.
#[derive(Debug, Clone)]
pub struct Ellipsoidal<T> {
    pub diag: Vec<T>,
}

impl<T: Scalar> Norm<T> for Ellipsoidal<T> {
    fn eval(&self, y: &[T]) -> T {
        y.iter()
            .zip(self.diag.iter().chain(std::iter::repeat(&T::one())))
            .fold(T::zero(), |acc, (&v, &d)| acc + d * v * v)
            .sqrt()
    }
}

/// `(Σ |y_i|^p)^{1/p}`.
#[derive(Debug, Clone, Copy)]
pub struct LpNorm<T> {
    pub p: T,
}

impl<T: Scalar> Norm<T> for LpNorm<T> {
    fn eval(&self, y: &[T]) -> T {
        y.iter()
            .fold(T::zero(), |acc, &v| acc + v.abs().powf(self.p))
            .powf(T::one() / self.p)
    }
}

/// `λ ‖·‖`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<T, N> {
    pub factor: T,
    pub inner: N,
}

impl<T: Scalar, N: Norm<T>> Norm<T> for Scaled<T, N> {
    fn eval(&self, y: &[T]) -> T {
        self.factor * self.inner.eval(y)
    }

    // the factor cancels in the ratio
    fn curvature_ratio(&self, y: &[T], theta: &[T], h: T) -> T {
        self.inner.curvature_ratio(y, theta, h)
    }
}

/// Adapter for closures.
pub struct FnNorm<F>(pub F);

impl<T: Scalar, F: Fn(&[T]) -> T + Sync> Norm<T> for FnNorm<F> {
    fn eval(&self, y: &[T]) -> T {
        (self.0)(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEpsilon<T> {
    /// Smallest sampled value of `⟨∇²‖y‖ θ, θ⟩ / ‖y‖`; an upper bound on the
    /// true infimum.
    pub epsilon: T,
    pub witness_y: Vec<T>,
    pub witness_theta: Vec<T>,
    pub samples: usize,
}

impl<T: Scalar> NormEpsilon<T> {
    /// `(ρ, N) = (n - 1 - (1 - ε)(n + α), -α)`.
    pub fn implied_certificate(&self, n: usize, alpha: T) -> (T, T) {
        let dim = T::from_usize_lossy(n);
        (dim - T::one() - (T::one() - self.epsilon) * (dim + alpha), -alpha)
    }

    /// Upper end of `α ∈ (-1, (n - 1)/(1 - ε) - n)` where the implied curvature
    /// stays positive; infinite once `ε ≥ 1`.
    pub fn admissible_alpha_upper(&self, n: usize) -> T {
        let dim = T::from_usize_lossy(n);
        if self.epsilon >= T::one() {
            T::infinity()
        } else {
            (dim - T::one()) / (T::one() - self.epsilon) - dim
        }
    }
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let len = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x = *x / len;
    }
}

fn gaussian_vec<T: Scalar>(rng: &mut ChaCha20Rng, dim: usize) -> Vec<T> {
    (0..dim)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            T::lit(g)
        })
        .collect()
}

/// Uniform `y ∈ S^n` and a uniform unit `θ ⊥ y`.
fn orthonormal_pair<T: Scalar>(rng: &mut ChaCha20Rng, dim: usize) -> (Vec<T>, Vec<T>) {
    let mut y = gaussian_vec::<T>(rng, dim);
    normalize(&mut y);
    let mut t = gaussian_vec::<T>(rng, dim);
    let proj = dot(&t, &y);
    for (ti, &yi) in t.iter_mut().zip(&y) {
        *ti = *ti - proj * yi;
    }
    normalize(&mut t);
    (y, t)
}

fn along<T: Scalar>(y: &[T], dir: &[T], t: T) -> Vec<T> {
    y.iter().zip(dir).map(|(&a, &b)| a + t * b).collect()
}

/// Checks positivity, degree-1 homogeneity and the Euler identity
/// `⟨∇‖y‖, y⟩ = ‖y‖` at seeded random points.
pub fn validate_norm<T: Scalar, N: Norm<T> + ?Sized>(norm: &N, n: usize, h: T, seed: u64) -> Result<()> {
    let dim = n + 1;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0x6e6f726d);
    let tol = T::lit(1e-8).max(T::epsilon() * T::lit(1e3));
    let euler_tol = T::lit(1e-6).max(T::epsilon().sqrt());
    for i in 0..16 {
        let mut y = gaussian_vec::<T>(&mut rng, dim);
        normalize(&mut y);
        let radius = T::lit(0.5) + T::lit(1.5) * T::from_usize_lossy(i) / T::lit(15.0);
        for v in y.iter_mut() {
            *v = *v * radius;
        }
        let value = norm.eval(&y);
        if !(value > T::zero() && value.is_finite()) {
            return Err(Error::NormValidation(format!("non-positive value {value} at sample {i}")));
        }
        for lambda in [T::lit(0.5), T::lit(2.0)] {
            let scaled: Vec<T> = y.iter().map(|&v| v * lambda).collect();
            let gap = (norm.eval(&scaled) - lambda * value).abs();
            if gap > tol * lambda * value {
                return Err(Error::NormValidation(format!(
                    "not positively homogeneous: |N({lambda} y) - {lambda} N(y)| = {gap}"
                )));
            }
        }
        let radial = (norm.eval(&along(&y, &y, h)) - norm.eval(&along(&y, &y, -h))) / (h + h);
        if (radial - value).abs() > euler_tol * value {
            return Err(Error::NormValidation(format!(
                "Euler identity fails: <grad N(y), y> = {radial}, N(y) = {value}"
            )));
        }
    }
    Ok(())
}

const DESCENT_STARTS: usize = 8;
const DESCENT_STEPS: usize = 50;

/// Estimates `ε = inf ⟨∇²‖y‖ θ, θ⟩ / ‖y‖` over orthonormal `y, θ ∈ S^n`.
///
/// `samples` seeded random pairs are scored; the lowest few are then improved by
/// projected gradient descent on the sphere. The minimum found is returned with
/// its witness; negative values mean the condition fails for this norm.
pub fn norm_epsilon<T: Scalar, N: Norm<T> + ?Sized>(
    norm: &N,
    n: usize,
    samples: usize,
    h: T,
    seed: u64,
) -> Result<NormEpsilon<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "sphere dimension must be at least 2",
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: 0.0,
            reason: "need at least one sample",
        });
    }
    validate_norm(norm, n, h, seed)?;

    let dim = n + 1;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0x6570_7369);
    let mut scored: Vec<(T, Vec<T>, Vec<T>)> = Vec::with_capacity(DESCENT_STARTS + 1);
    for _ in 0..samples {
        let (y, t) = orthonormal_pair::<T>(&mut rng, dim);
        let q = norm.curvature_ratio(&y, &t, h);
        let pos = scored.iter().position(|s| q < s.0).unwrap_or(scored.len());
        if pos < DESCENT_STARTS {
            scored.insert(pos, (q, y, t));
            scored.truncate(DESCENT_STARTS);
        }
    }

    let mut best = scored[0].clone();
    for (q, y, t) in scored {
        let (q, y, t) = descend(norm, q, y, t, h);
        if q < best.0 {
            best = (q, y, t);
        }
    }
    Ok(NormEpsilon {
        epsilon: best.0,
        witness_y: best.1,
        witness_theta: best.2,
        samples,
    })
}

fn descend<T: Scalar, N: Norm<T> + ?Sized>(
    norm: &N,
    mut q: T,
    mut y: Vec<T>,
    mut t: Vec<T>,
    h: T,
) -> (T, Vec<T>, Vec<T>) {
    let dim = y.len();
    let delta = T::lit(1e-4);
    let mut step = T::lit(1e-2);
    for _ in 0..DESCENT_STEPS {
        let mut grad_y = vec![T::zero(); dim];
        let mut grad_t = vec![T::zero(); dim];
        for i in 0..dim {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[i] = yp[i] + delta;
            ym[i] = ym[i] - delta;
            grad_y[i] = (norm.curvature_ratio(&yp, &t, h) - norm.curvature_ratio(&ym, &t, h)) / (delta + delta);
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[i] = tp[i] + delta;
            tm[i] = tm[i] - delta;
            grad_t[i] = (norm.curvature_ratio(&y, &tp, h) - norm.curvature_ratio(&y, &tm, h)) / (delta + delta);
        }
        let mut y2: Vec<T> = y.iter().zip(&grad_y).map(|(&a, &g)| a - step * g).collect();
        normalize(&mut y2);
        let mut t2: Vec<T> = t.iter().zip(&grad_t).map(|(&a, &g)| a - step * g).collect();
        let proj = dot(&t2, &y2);
        for (ti, &yi) in t2.iter_mut().zip(&y2) {
            *ti = *ti - proj * yi;
        }
        normalize(&mut t2);
        let q2 = norm.curvature_ratio(&y2, &t2, h);
        if q2 < q {
            q = q2;
            y = y2;
            t = t2;
            step = (step + step).min(T::one());
        } else {
            step = step * T::lit(0.5);
        }
    }
    (q, y, t)
}
