//! One-dimensional model space `(R, |·|, φ_{n,α}(t) dt)` and the isoperimetric,
//! Cheeger and concentration bounds it induces on `μ_x^{n,α}`.
//!
//! `φ(t) = c / cosh(√δ t)^{α+1}` with `ρ = n - 1 - (n+α)/4` and `δ = ρ/(α+1)`.
//! Everything is computed in the rescaled variable `u = √δ t`, where the
//! density is `sech^β(u)` with `β = α + 1`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::curvature_constant;
use crate::error::{Error, Result};
use crate::measures::{MarginalDensity, SphereParams};
use crate::quadrature::CumulativeTable;
use crate::scalar::{ln_cosh, Scalar};

const PANELS: usize = 256;

/// Slack allowed below the isoperimetric lower bound before a cap check fails.
pub const CAP_SLACK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ModelProfile<T> {
    params: SphereParams<T>,
    rho: T,
    delta: T,
    sqrt_delta: T,
    beta: T,
    horizon: T,
    table: CumulativeTable<T>,
    half_mass: T,
    c_norm: T,
}

impl<T: Scalar> ModelProfile<T> {
    /// Requires `α ∈ (-1, 3n - 4)`, where both `ρ` and `δ` are positive.
    pub fn new(params: SphereParams<T>) -> Result<Self> {
        let n = params.n;
        let alpha = params.alpha;
        let upper = T::from_usize_lossy(3 * n) - T::lit(4.0);
        if !(alpha > -T::one() && alpha < upper) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.as_f64(),
                reason: "model profile requires alpha in (-1, 3n - 4)",
            });
        }
        let rho = curvature_constant(n, alpha);
        let beta = alpha + T::one();
        let delta = rho / beta;
        let sqrt_delta = delta.sqrt();
        // t-horizon max(10, 30/√δ), i.e. u-horizon max(10√δ, 30)
        let horizon = (T::lit(10.0) * sqrt_delta).max(T::lit(30.0));

        let density = |u: T| (-beta * ln_cosh(u)).exp();
        let table = CumulativeTable::build(density, T::zero(), horizon, PANELS, T::lit(1e-13), T::quad_rel_tol())?;
        let half_mass = table.total() + sech_tail(beta, horizon);
        let c_norm = sqrt_delta / (half_mass + half_mass);
        Ok(Self {
            params,
            rho,
            delta,
            sqrt_delta,
            beta,
            horizon,
            table,
            half_mass,
            c_norm,
        })
    }

    pub fn params(&self) -> &SphereParams<T> {
        &self.params
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn c_norm(&self) -> T {
        self.c_norm
    }

    /// `∫_0^∞ cosh(u)^{-(α+1)} du`.
    pub fn half_integral(&self) -> T {
        self.half_mass
    }

    /// Integration horizon in the original variable `t`.
    pub fn horizon_t(&self) -> T {
        self.horizon / self.sqrt_delta
    }

    fn sech_pow(&self, u: T) -> T {
        (-self.beta * ln_cosh(u)).exp()
    }

    /// `∫_u^∞ sech^β` for `u ≥ 0`.
    fn upper_u(&self, u: T) -> Result<T> {
        if u >= self.horizon {
            return Ok(sech_tail(self.beta, u));
        }
        Ok(self.table.upper(|v| self.sech_pow(v), u)? + sech_tail(self.beta, self.horizon))
    }

    pub fn phi(&self, t: T) -> T {
        self.c_norm * self.sech_pow(self.sqrt_delta * t)
    }

    /// `∫_{-∞}^t φ`.
    pub fn cdf(&self, t: T) -> Result<T> {
        if t >= T::zero() {
            Ok(T::one() - self.tail(t)?)
        } else {
            self.tail(-t)
        }
    }

    /// `∫_r^∞ φ` for `r ≥ 0`, evaluated without forming `1 - Φ(r)`.
    pub fn tail(&self, r: T) -> Result<T> {
        if !(r >= T::zero()) {
            return Err(Error::Domain {
                name: "r",
                value: r.as_f64(),
                domain: "[0, inf)",
            });
        }
        Ok(self.upper_u(self.sqrt_delta * r)? / (self.half_mass + self.half_mass))
    }

    /// Inverse of [`tail`](Self::tail) on `(0, 1/2]`.
    fn tail_inverse(&self, q: T) -> Result<T> {
        let target = q * (self.half_mass + self.half_mass);
        let mut lo = T::zero();
        let mut hi = T::one();
        while self.upper_u(hi)? > target {
            lo = hi;
            hi = hi + hi;
            if !hi.is_finite() {
                return Err(Error::ToleranceNotReached {
                    lo: lo.as_f64(),
                    hi: hi.as_f64(),
                    residual: q.as_f64(),
                });
            }
        }
        let mut x = T::lit(0.5) * (lo + hi);
        for _ in 0..200 {
            let resid = self.upper_u(x)? - target;
            if resid > T::zero() {
                lo = x;
            } else {
                hi = x;
            }
            if resid.abs() <= T::lit(1e-14) * target || hi - lo <= T::epsilon() * T::lit(4.0) * hi.max(T::one()) {
                break;
            }
            // d/dx upper_u(x) = -sech^β(x)
            let slope = self.sech_pow(x);
            let newton = x + resid / slope;
            x = if slope > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                T::lit(0.5) * (lo + hi)
            };
        }
        Ok(x / self.sqrt_delta)
    }

    /// `Φ^{-1}(u)` for `u ∈ (0, 1)`.
    pub fn cdf_inverse(&self, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::Domain {
                name: "u",
                value: u.as_f64(),
                domain: "(0, 1)",
            });
        }
        let half = T::lit(0.5);
        if u == half {
            return Ok(T::zero());
        }
        if u < half {
            Ok(-self.tail_inverse(u)?)
        } else {
            self.tail_inverse(T::one() - u)
        }
    }

    /// `φ(Φ^{-1}(v))`, the model isoperimetric profile; extended by 0 at `v ∈ {0, 1}`.
    pub fn isop_lower(&self, v: T) -> Result<T> {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::Domain {
                name: "v",
                value: v.as_f64(),
                domain: "[0, 1]",
            });
        }
        if v == T::zero() || v == T::one() {
            return Ok(T::zero());
        }
        let q = v.min(T::one() - v);
        Ok(self.phi(self.tail_inverse(q)?))
    }

    /// `√δ / ∫_0^∞ cosh(t)^{-(1+α)} dt`, the Cheeger constant of the model.
    pub fn cheeger_lower(&self) -> T {
        self.sqrt_delta / self.half_mass
    }

    /// Two-level concentration envelope with caller-chosen constants `c`, `C`.
    pub fn two_level_overlay(&self, r: T, c: T, big_c: T) -> T {
        let beta = self.beta;
        let rho = self.rho;
        let switch = (beta / rho).sqrt();
        if r <= switch {
            big_c * beta.sqrt().min(T::one()) * (-c * rho * r * r).exp() / (T::one() + rho.sqrt() * r)
        } else {
            big_c * (T::one() / beta.sqrt()).min(T::one()) * (-c * beta.sqrt() * rho.sqrt() * r).exp()
        }
    }
}

/// Sub-Gaussian envelope `C exp(-c n r²)` for comparison plots.
pub fn sub_gaussian_overlay<T: Scalar>(n: usize, r: T, c: T, big_c: T) -> T {
    big_c * (-c * T::from_usize_lossy(n) * r * r).exp()
}

/// `∫_u^∞ sech^β` from `sech^β = 2^β e^{-βv} (1 + e^{-2v})^{-β}` expanded to
/// second order; the omitted terms are `O(e^{-(β+6)u})`.
fn sech_tail<T: Scalar>(beta: T, u: T) -> T {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let lead = (beta * T::LN_2() - beta * u).exp();
    let e2 = (-two * u).exp();
    lead * (T::one() / beta - beta * e2 / (beta + two) + beta * (beta + T::one()) / two * e2 * e2 / (beta + four))
}

/// Minkowski boundary measure of the cap `{θ(y) ≤ θ₀}`: the marginal density
/// at `θ₀`, since geodesic enlargement of a cap by `ε` is the cap of radius
/// `θ₀ + ε`.
pub fn cap_boundary_measure<T: Scalar>(marginal: &MarginalDensity<T>, theta0: T) -> Result<T> {
    if !(theta0 > T::zero() && theta0 < T::PI()) {
        return Err(Error::Domain {
            name: "theta0",
            value: theta0.as_f64(),
            domain: "(0, pi)",
        });
    }
    marginal.pdf(theta0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CapSide {
    /// `{θ ≤ θ₀}`
    Near,
    /// `{θ ≥ θ₀}`
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapRow<T> {
    pub theta0: T,
    pub v: T,
    pub boundary_measure: T,
    pub lower_bound: T,
    pub slack: T,
    #[serde(skip)]
    pub side: CapSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapReport<T> {
    pub params: SphereParams<T>,
    pub rows: Vec<CapRow<T>>,
    pub worst_slack: T,
    pub worst_theta0: T,
}

impl<T: Scalar + Serialize> CapReport<T> {
    pub fn passed(&self) -> bool {
        self.worst_slack >= -T::lit(CAP_SLACK_TOL)
    }

    /// CSV with columns `theta0, v, boundary_measure, lower_bound, slack`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Checks the model isoperimetric inequality on axis caps of both orientations
/// at `grid_size` interior angles.
pub fn isop_check_caps<T: Scalar>(params: &SphereParams<T>, grid_size: usize) -> Result<CapReport<T>> {
    let profile = ModelProfile::new(*params)?;
    let marginal = MarginalDensity::new(*params)?;
    isop_check_caps_with(&marginal, &profile, grid_size)
}

pub fn isop_check_caps_with<T: Scalar>(
    marginal: &MarginalDensity<T>,
    profile: &ModelProfile<T>,
    grid_size: usize,
) -> Result<CapReport<T>> {
    let grid = grid_size.max(1);
    let per_angle: Vec<Result<[CapRow<T>; 2]>> = (1..=grid)
        .into_par_iter()
        .map(|i| {
            let theta0 = T::PI() * T::from_usize_lossy(i) / T::from_usize_lossy(grid + 1);
            let boundary = cap_boundary_measure(marginal, theta0)?;
            let row = |side, v: T| -> Result<CapRow<T>> {
                let lower = profile.isop_lower(v)?;
                Ok(CapRow {
                    theta0,
                    v,
                    boundary_measure: boundary,
                    lower_bound: lower,
                    slack: boundary - lower,
                    side,
                })
            };
            Ok([row(CapSide::Near, marginal.cdf(theta0)?)?, row(CapSide::Far, marginal.sf(theta0)?)?])
        })
        .collect();
    let mut rows = Vec::with_capacity(2 * grid);
    for pair in per_angle {
        rows.extend(pair?);
    }
    let worst = rows
        .iter()
        .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap_or(std::cmp::Ordering::Equal))
        .copied()
        .expect("grid is non-empty");
    Ok(CapReport {
        params: *marginal.params(),
        rows,
        worst_slack: worst.slack,
        worst_theta0: worst.theta0,
    })
}
