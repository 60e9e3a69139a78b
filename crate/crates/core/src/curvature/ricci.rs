//! The generalized Ricci form `Ric_{g,μ,N}(θ, θ)` with `N = -α` on the sphere.
//!
//! A point `y` is located by its angle `θ_y` from the pole direction and a unit
//! tangent `θ ∈ T_y S^n` by the angle `φ` it makes with the meridian, so that
//! `a = ⟨x, y⟩ = s cos θ_y` and `b = ⟨x, θ⟩ = ± s sin θ_y cos φ`. Rotations
//! fixing `x` make every other configuration equivalent to one of these.

use crate::error::{Error, Result};
use crate::measures::SphereParams;
use crate::scalar::Scalar;

use super::objective::f_objective;

pub(crate) fn check_cd_range<T: Scalar>(params: &SphereParams<T>) -> Result<()> {
    if params.kernel_power() < T::zero() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: params.alpha.as_f64(),
            reason: "curvature-dimension bound needs alpha >= -n",
        });
    }
    Ok(())
}

fn check_angles<T: Scalar>(theta_y: T, phi_dir: T) -> Result<()> {
    if !(theta_y >= T::zero() && theta_y <= T::PI()) {
        return Err(Error::Domain {
            name: "theta_y",
            value: theta_y.as_f64(),
            domain: "[0, pi]",
        });
    }
    if !(phi_dir >= T::zero() && phi_dir <= T::FRAC_PI_2()) {
        return Err(Error::Domain {
            name: "phi_dir",
            value: phi_dir.as_f64(),
            domain: "[0, pi/2]",
        });
    }
    Ok(())
}

/// Closed form `(n - 1) + (n + α) (a D - b²) / D²` with `D = |y - x|²`.
///
/// Uses `Ric_g = (n - 1) g` and `II = g` for the unit sphere with outward normal.
/// `D = (1 - a)² + b² + c²`, where `c` is the component of `x` orthogonal to
/// `span(y, θ)`; for `φ = 0` (so `c = 0`) the ratio is exactly `F(a, b)`, and in
/// general it is bounded below by `F(a, (b² + c²)^{1/2})`.
pub fn generalized_ricci_quadform<T: Scalar>(params: &SphereParams<T>, theta_y: T, phi_dir: T) -> Result<T> {
    check_cd_range(params)?;
    check_angles(theta_y, phi_dir)?;
    let base = params.dim() - T::one();
    let power = params.kernel_power();
    if power == T::zero() {
        return Ok(base);
    }
    Ok(base + power * hessian_ratio(params.s, theta_y, phi_dir)?)
}

/// `∇²_{S^n}|· - x|(θ, θ) / |y - x|`.
pub fn hessian_ratio<T: Scalar>(s: T, theta_y: T, phi_dir: T) -> Result<T> {
    let a = s * theta_y.cos();
    let b = s * theta_y.sin() * phi_dir.cos();
    if phi_dir == T::zero() {
        return f_objective(a, b);
    }
    let one_minus_a = T::one() - a;
    let c = s * theta_y.sin() * phi_dir.sin();
    let d = one_minus_a * one_minus_a + b * b + c * c;
    Ok((a * d - b * b) / (d * d))
}

/// Embedded configuration `(x, y, θ)` in `R^{n+1}`.
fn frame<T: Scalar>(params: &SphereParams<T>, theta_y: T, phi_dir: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let dim = params.n + 1;
    let mut x = vec![T::zero(); dim];
    let mut y = vec![T::zero(); dim];
    let mut tangent = vec![T::zero(); dim];
    x[0] = params.s;
    let (st, ct) = theta_y.sin_cos();
    y[0] = ct;
    y[1] = st;
    let (sp, cp) = phi_dir.sin_cos();
    // meridian direction (-sin θ_y, cos θ_y, 0) rotated toward e_3
    tangent[0] = -st * cp;
    tangent[1] = ct * cp;
    tangent[2] = sp;
    (x, y, tangent)
}

/// Finite-difference oracle for [`generalized_ricci_quadform`].
///
/// Differentiates `t ↦ Ψ^{1/(N-n)}(cos t · y + sin t · θ)` twice along the
/// great circle through `y` with velocity `θ` (a unit-speed geodesic, so the
/// second derivative is the Riemannian Hessian), divides by the value at
/// `t = 0`, and assembles `(n - 1) - (N - n) · ratio`. `Ψ` is taken without its
/// normalization constant, which cancels in the ratio. The returned value is the
/// Richardson combination of the steps `h` and `2h`.
pub fn fd_ricci_oracle<T: Scalar>(params: &SphereParams<T>, theta_y: T, phi_dir: T, h: T) -> Result<T> {
    check_cd_range(params)?;
    check_angles(theta_y, phi_dir)?;
    if !(h >= T::lit(1e-6) && h <= T::lit(1e-2)) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.as_f64(),
            reason: "finite-difference step must lie in [1e-6, 1e-2]",
        });
    }
    let base = params.dim() - T::one();
    let power = params.kernel_power();
    if power == T::zero() {
        return Ok(base);
    }

    let (x, y, tangent) = frame(params, theta_y, phi_dir);
    // Ψ = |z - x|^{-(n+α)}, N - n = -(n + α)
    let n_minus_dim = -power;
    let psi = |z: &[T]| {
        let dist2 = z.iter().zip(&x).fold(T::zero(), |acc, (&zi, &xi)| acc + (zi - xi) * (zi - xi));
        dist2.sqrt().powf(-power)
    };
    let transformed = |t: T| {
        let (st, ct) = t.sin_cos();
        let z: Vec<T> = y.iter().zip(&tangent).map(|(&yi, &vi)| ct * yi + st * vi).collect();
        psi(&z).powf(T::one() / n_minus_dim)
    };

    let g0 = transformed(T::zero());
    let ratio = |step: T| (transformed(step) - g0 - g0 + transformed(-step)) / (step * step * g0);
    let r1 = ratio(h);
    let r2 = ratio(h + h);
    let spread = (r1 - r2).abs();
    if !(spread <= T::lit(1e-3)) {
        return Err(Error::StepTooSmall {
            h: h.as_f64(),
            spread: spread.as_f64(),
        });
    }
    let hessian_ratio = (T::lit(4.0) * r1 - r2) / T::lit(3.0);
    Ok(base - n_minus_dim * hessian_ratio)
}
