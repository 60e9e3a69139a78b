//! Curvature-dimension certificates for `(S^n, g, μ_x^{n,α})`.
//!
//! With `N = -α` the generalized Ricci form reduces to
//! `(n - 1) + (n + α) F(a, b)`, so a certificate is the pair
//! `(n - 1 + (n + α) min F, -α)` with the minimum taken over the `(a, b)` disk
//! of radius 1 (uniform in `|x| < 1`) or radius `s` (for one pole).

mod norm;
mod objective;
mod ricci;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::SphereParams;
use crate::scalar::Scalar;

pub use norm::{norm_epsilon, validate_norm, Ellipsoidal, Euclidean, FnNorm, LpNorm, Norm, NormEpsilon, Scaled};
pub use objective::{f_objective, f_p, min_f_disk, min_f_disk_with, nelder_mead, DiskMinimum, DiskSearch};
pub use ricci::{fd_ricci_oracle, generalized_ricci_quadform, hessian_ratio};

/// The `(ρ, N)` pair of a `CD(ρ, N)` condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdPair<T> {
    pub rho: T,
    #[serde(rename = "N")]
    pub dimension: T,
}

/// `CD(n - 1 - (n + α)/4, -α)`, valid for every `|x| < 1` once `α ≥ -n`.
pub fn analytic_cd<T: Scalar>(params: &SphereParams<T>) -> Result<CdPair<T>> {
    ricci::check_cd_range(params)?;
    Ok(CdPair {
        rho: curvature_constant(params.n, params.alpha),
        dimension: -params.alpha,
    })
}

/// `ρ_{n,α} = n - 1 - (n + α)/4`.
pub fn curvature_constant<T: Scalar>(n: usize, alpha: T) -> T {
    let dim = T::from_usize_lossy(n);
    dim - T::one() - (dim + alpha) / T::lit(4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdCertificate<T> {
    pub params: SphereParams<T>,
    pub rho_analytic: T,
    #[serde(rename = "N")]
    pub dimension: T,
    pub rho_numeric: T,
    pub argmin: (T, T),
    pub search_radius: T,
}

/// Analytic pair plus a numerical minimum of the Ricci form.
///
/// `uniform_in_x` searches the whole unit disk, reproducing the analytic
/// constant; otherwise the disk of radius `s` yields a certificate specific to
/// this pole, which may be strictly better.
pub fn certify<T: Scalar>(params: &SphereParams<T>, uniform_in_x: bool) -> Result<CdCertificate<T>> {
    let pair = analytic_cd(params)?;
    let radius = if uniform_in_x { T::one() } else { params.s };
    let disk = min_f_disk(radius, T::one())?;
    let rho_numeric = params.dim() - T::one() + params.kernel_power() * disk.min;

    let slack = if uniform_in_x { T::lit(1e-9) } else { T::lit(1e-12) };
    if !(rho_numeric >= pair.rho - slack) {
        return Err(Error::CertificationFailure {
            numeric: rho_numeric.as_f64(),
            analytic: pair.rho.as_f64(),
        });
    }
    Ok(CdCertificate {
        params: *params,
        rho_analytic: pair.rho,
        dimension: pair.dimension,
        rho_numeric,
        argmin: disk.argmin,
        search_radius: radius,
    })
}
