//! The measure family `μ_x^{n,α}` on `S^n`, reduced to its angular marginal.
//!
//! The density of `μ_x^{n,α}` with respect to the uniform probability on `S^n`
//! is proportional to `|y - x|^{-(n+α)}` and depends on `y` only through the
//! angle `θ` between `y` and `x`. Its pushforward to `θ ∈ [0, π]` has density
//! proportional to
//!
//! ```text
//! w(θ) = sin^{n-1}(θ) · (1 - 2 s cos θ + s²)^{-(n+α)/2},   s = |x|.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::CumulativeTable;
use crate::scalar::Scalar;

/// Largest admissible `|x|`; closer to 1 the normalization degenerates.
pub const MAX_POLE_RADIUS: f64 = 1.0 - 1e-9;

const PANELS: usize = 256;

/// `(n, α, s = |x|)` identifying one measure of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawSphereParams<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SphereParams<T> {
    pub n: usize,
    pub alpha: T,
    pub s: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSphereParams<T> {
    n: usize,
    alpha: T,
    s: T,
}

impl<T: Scalar> TryFrom<RawSphereParams<T>> for SphereParams<T> {
    type Error = Error;

    fn try_from(raw: RawSphereParams<T>) -> Result<Self> {
        SphereParams::new(raw.n, raw.alpha, raw.s)
    }
}

impl<T: Scalar> SphereParams<T> {
    pub fn new(n: usize, alpha: T, s: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "sphere dimension must be at least 2",
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.as_f64(),
                reason: "exponent must be finite",
            });
        }
        if !(s >= T::zero() && s <= T::lit(MAX_POLE_RADIUS)) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s.as_f64(),
                reason: "pole radius must lie in [0, 1 - 1e-9]",
            });
        }
        Ok(Self { n, alpha, s })
    }

    pub fn dim(&self) -> T {
        T::from_usize_lossy(self.n)
    }

    /// `n + α`, the power of `|y - x|` in the denominator.
    pub fn kernel_power(&self) -> T {
        self.dim() + self.alpha
    }

    /// True when the density on `S^n` is constant (`s = 0` or `α = -n`).
    pub fn is_uniform(&self) -> bool {
        self.s == T::zero() || self.kernel_power() == T::zero()
    }

    /// Same `n` and `s` with `α = -n`: the uniform sphere.
    pub fn uniform(&self) -> Self {
        Self {
            n: self.n,
            alpha: -self.dim(),
            s: self.s,
        }
    }

    /// `|y - x|²` for `y` at angle `θ` from the pole, written to stay accurate
    /// near `θ = 0`.
    pub fn squared_distance(&self, theta: T) -> T {
        let one = T::one();
        let half_sin = (theta * T::lit(0.5)).sin();
        (one - self.s).powi(2) + T::lit(4.0) * self.s * half_sin * half_sin
    }

    /// `ln w(θ)` for `θ ∈ (0, π)`.
    pub fn log_weight(&self, theta: T) -> T {
        let k = self.kernel_power() * T::lit(0.5);
        let sin_term = (self.dim() - T::one()) * theta.sin().ln();
        if k == T::zero() {
            sin_term
        } else {
            sin_term - k * self.squared_distance(theta).ln()
        }
    }

    /// Approximate maximum of `ln w` over `(0, π)`, used to rescale the weight.
    fn log_weight_peak(&self) -> T {
        let pi = T::PI();
        let mut best = T::neg_infinity();
        let grid = 512;
        for i in 1..grid {
            let th = pi * T::from_usize_lossy(i) / T::from_usize_lossy(grid);
            best = best.max(self.log_weight(th));
        }
        // Stationary point of the small-angle approximation; resolves peaks
        // narrower than the grid when s is close to 1.
        let k2 = self.kernel_power();
        let m = self.dim() - T::one();
        if self.s > T::zero() && k2 > m {
            let t2 = m * (T::one() - self.s).powi(2) / (self.s * (k2 - m));
            let th = t2.sqrt();
            if th > T::zero() && th < pi {
                best = best.max(self.log_weight(th));
            }
        }
        best
    }
}

/// Normalized angular marginal of `μ_x^{n,α}` with cached normalizations.
///
/// Construction integrates the weight once; afterwards all evaluations are pure
/// and the value can be shared across threads.
#[derive(Debug, Clone)]
pub struct MarginalDensity<T> {
    params: SphereParams<T>,
    log_scale: T,
    table: CumulativeTable<T>,
    log_z: T,
    log_haar: T,
    quantile_tol: T,
}

impl<T: Scalar> MarginalDensity<T> {
    pub fn new(params: SphereParams<T>) -> Result<Self> {
        let params = SphereParams::new(params.n, params.alpha, params.s)?;
        let abs_fraction = T::lit(1e-10);
        let rel = T::quad_rel_tol();

        let (table, log_scale) = Self::tabulate(&params, abs_fraction, rel)?;
        let log_z = log_scale + table.total().ln();
        let uniform = params.uniform();
        let (haar, haar_scale) = Self::tabulate(&uniform, abs_fraction, rel)?;
        let log_haar = haar_scale + haar.total().ln();

        Ok(Self {
            params,
            log_scale,
            table,
            log_z,
            log_haar,
            quantile_tol: T::quad_rel_tol() * T::lit(10.0),
        })
    }

    fn tabulate(params: &SphereParams<T>, abs_fraction: T, rel: T) -> Result<(CumulativeTable<T>, T)> {
        let log_scale = params.log_weight_peak();
        let f = |th: T| scaled_weight(params, log_scale, th);
        let table = CumulativeTable::build(f, T::zero(), T::PI(), PANELS, abs_fraction, rel)?;
        Ok((table, log_scale))
    }

    pub fn params(&self) -> &SphereParams<T> {
        &self.params
    }

    /// Tolerance on `|cdf(quantile(u)) - u|`.
    pub fn quantile_tolerance(&self) -> T {
        self.quantile_tol
    }

    pub fn with_quantile_tolerance(mut self, tol: T) -> Self {
        self.quantile_tol = tol;
        self
    }

    fn weight(&self, theta: T) -> T {
        scaled_weight(&self.params, self.log_scale, theta)
    }

    /// `ln w(θ)` of the unnormalized marginal.
    pub fn log_unnormalized(&self, theta: T) -> T {
        self.params.log_weight(theta)
    }

    /// `ln Z` with `Z = ∫_0^π w`.
    pub fn log_normalization(&self) -> T {
        self.log_z
    }

    /// `Z = ∫_0^π w(θ) dθ`.
    pub fn normalization(&self) -> T {
        self.log_z.exp()
    }

    /// `∫ |y - x|^{-(n+α)} dσ^n(y)`.
    pub fn sphere_integral(&self) -> T {
        (self.log_z - self.log_haar).exp()
    }

    /// The constant `c_x^{n,α}` making `c |y - x|^{-(n+α)} dσ^n` a probability.
    pub fn sphere_normalization(&self) -> T {
        (self.log_haar - self.log_z).exp()
    }

    fn check_angle(theta: T) -> Result<()> {
        if theta >= T::zero() && theta <= T::PI() {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "theta",
                value: theta.as_f64(),
                domain: "[0, pi]",
            })
        }
    }

    pub fn pdf(&self, theta: T) -> Result<T> {
        Self::check_angle(theta)?;
        if theta == T::zero() || theta == T::PI() {
            return Ok(T::zero());
        }
        Ok((self.params.log_weight(theta) - self.log_z).exp())
    }

    pub fn cdf(&self, theta: T) -> Result<T> {
        Self::check_angle(theta)?;
        let mass = self.table.lower(|t| self.weight(t), theta)?;
        Ok((mass / self.table.total()).min(T::one()))
    }

    /// `1 - cdf(θ)`, computed from the upper tail directly.
    pub fn sf(&self, theta: T) -> Result<T> {
        Self::check_angle(theta)?;
        let mass = self.table.upper(|t| self.weight(t), theta)?;
        Ok((mass / self.table.total()).min(T::one()))
    }

    /// Angle `θ` with `|cdf(θ) - u|` within the quantile tolerance.
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u >= T::zero() && u <= T::one()) {
            return Err(Error::Domain {
                name: "u",
                value: u.as_f64(),
                domain: "[0, 1]",
            });
        }
        if u == T::zero() {
            return Ok(T::zero());
        }
        if u == T::one() {
            return Ok(T::PI());
        }

        let k = self.table.locate(u * self.table.total());
        let mut lo = self.table.node(k);
        let mut hi = self.table.node(k + 1);
        let mut theta = T::lit(0.5) * (lo + hi);
        let mut residual = T::infinity();

        for _ in 0..200 {
            residual = self.cdf(theta)? - u;
            if residual.abs() <= self.quantile_tol {
                return Ok(theta);
            }
            if residual < T::zero() {
                lo = theta;
            } else {
                hi = theta;
            }
            if hi - lo <= T::lit(4.0) * T::epsilon() * hi.max(T::one()) {
                break;
            }
            // Newton step, falling back to bisection when it leaves the bracket.
            let density = self.pdf(theta)?;
            let newton = theta - residual / density;
            theta = if density > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                T::lit(0.5) * (lo + hi)
            };
        }
        Err(Error::ToleranceNotReached {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            residual: residual.abs().as_f64(),
        })
    }

    /// Median angle: a cap `{θ ≤ median}` carries exactly half the mass.
    pub fn median(&self) -> Result<T> {
        self.quantile(T::lit(0.5))
    }
}

fn scaled_weight<T: Scalar>(params: &SphereParams<T>, log_scale: T, theta: T) -> T {
    if theta <= T::zero() || theta >= T::PI() {
        return T::zero();
    }
    (params.log_weight(theta) - log_scale).exp()
}

/// Normalized marginal density at `θ`. Builds the normalization on every call;
/// hold a [`MarginalDensity`] for repeated evaluation.
pub fn marginal_pdf<T: Scalar>(params: &SphereParams<T>, theta: T) -> Result<T> {
    MarginalDensity::new(*params)?.pdf(theta)
}

pub fn marginal_cdf<T: Scalar>(params: &SphereParams<T>, theta: T) -> Result<T> {
    MarginalDensity::new(*params)?.cdf(theta)
}

pub fn marginal_quantile<T: Scalar>(params: &SphereParams<T>, u: T) -> Result<T> {
    MarginalDensity::new(*params)?.quantile(u)
}

pub fn median_angle<T: Scalar>(params: &SphereParams<T>) -> Result<T> {
    MarginalDensity::new(*params)?.median()
}

/// `c_x^{n,α}`.
pub fn sphere_normalization<T: Scalar>(params: &SphereParams<T>) -> Result<T> {
    Ok(MarginalDensity::new(*params)?.sphere_normalization())
}
