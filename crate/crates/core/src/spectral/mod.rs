//! Spectral gap of `(S^n, g, μ_x^{n,α})`.
//!
//! The measure is invariant under rotations fixing `x`, so the Laplacian
//! splits into spherical-harmonic sectors `ℓ = 0, 1, 2, ...`, each a 1D
//! weighted problem with potential `ℓ(ℓ+n-2)/sin²θ`. The potential grows with
//! `ℓ`, so the gap is `min(sector 0, sector 1)`; sector 2 is computed as an
//! audit of that argument.

mod sector;
mod tridiag;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

pub use sector::{sector_gap, SectorProblem, MIN_GRID};
pub use tridiag::SymTridiagonal;

use crate::curvature::curvature_constant;
use crate::error::{Error, Result};
use crate::measures::SphereParams;
use crate::profiles::ModelProfile;
use crate::scalar::Scalar;

/// Largest relative change tolerated between consecutive grids.
pub const MAX_REFINEMENT_CHANGE: f64 = 0.05;
/// Absolute tolerance of the sector-monotonicity audit.
pub const AUDIT_TOL: f64 = 1e-6;
/// Absolute tolerance of every lower-bound check.
pub const BOUND_TOL: f64 = 1e-6;
/// Relative allowance above `n` in the Barthe–Ma–Zhang window.
pub const BMZ_UPPER_SLACK: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConfig {
    /// Cell counts, each twice the previous.
    pub grids: Vec<usize>,
    /// Also solve `ℓ = 2` and check it is not below `ℓ = 1`.
    pub audit: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            grids: vec![512, 1024, 2048],
            audit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorTrace<T> {
    pub ell: usize,
    /// Eigenvalue on each grid of `grids_used`.
    pub eigenvalues: Vec<T>,
    pub extrapolated: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult<T> {
    /// Richardson-extrapolated gap.
    pub lambda_gap: T,
    pub sector: usize,
    pub grids_used: Vec<usize>,
    pub extrapolated: T,
    /// `|λ(M_max) - extrapolated|` for the winning sector.
    pub error_estimate: T,
    pub sectors: Vec<SectorTrace<T>>,
}

impl<T: Scalar> SpectralResult<T> {
    pub fn trace(&self, ell: usize) -> Option<&SectorTrace<T>> {
        self.sectors.iter().find(|s| s.ell == ell)
    }
}

/// Second-order Richardson step between the two finest grids.
fn richardson<T: Scalar>(grids: &[usize], values: &[T]) -> T {
    let k = values.len();
    if k < 2 {
        return values[k - 1];
    }
    let r = T::from_usize_lossy(grids[k - 1]) / T::from_usize_lossy(grids[k - 2]);
    let r2 = r * r;
    (r2 * values[k - 1] - values[k - 2]) / (r2 - T::one())
}

fn check_refinement<T: Scalar>(grids: &[usize], values: &[T]) -> Result<()> {
    for k in 1..values.len() {
        let change = ((values[k] - values[k - 1]) / values[k]).abs();
        if !(change <= T::lit(MAX_REFINEMENT_CHANGE)) {
            return Err(Error::GridTooCoarse {
                grid: grids[k],
                relative_change: change.as_f64(),
            });
        }
    }
    Ok(())
}

pub fn spectral_gap<T: Scalar>(params: &SphereParams<T>) -> Result<SpectralResult<T>> {
    spectral_gap_with(params, &SpectralConfig::default())
}

pub fn spectral_gap_with<T: Scalar>(params: &SphereParams<T>, config: &SpectralConfig) -> Result<SpectralResult<T>> {
    let grids = &config.grids;
    if grids.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grids",
            value: 0.0,
            reason: "at least one grid is required",
        });
    }
    let levels: Vec<usize> = if config.audit { vec![0, 1, 2] } else { vec![0, 1] };
    let jobs: Vec<(usize, usize)> = levels
        .iter()
        .flat_map(|&ell| grids.iter().map(move |&m| (ell, m)))
        .collect();
    let solved: Vec<T> = jobs
        .par_iter()
        .map(|&(ell, m)| sector_gap(params, ell, m))
        .collect::<Result<_>>()?;

    let sectors: Vec<SectorTrace<T>> = levels
        .iter()
        .enumerate()
        .map(|(k, &ell)| {
            let eigenvalues = solved[k * grids.len()..(k + 1) * grids.len()].to_vec();
            let extrapolated = richardson(grids, &eigenvalues);
            SectorTrace {
                ell,
                eigenvalues,
                extrapolated,
            }
        })
        .collect();
    for trace in &sectors[..2] {
        check_refinement(grids, &trace.eigenvalues)?;
    }
    if config.audit {
        let (l1, l2) = (sectors[1].extrapolated, sectors[2].extrapolated);
        if l2 < l1 - T::lit(AUDIT_TOL) {
            return Err(Error::SectorAudit {
                level1: l1.as_f64(),
                level2: l2.as_f64(),
            });
        }
    }
    let best = if sectors[1].extrapolated < sectors[0].extrapolated { 1 } else { 0 };
    let winner = &sectors[best];
    let finest = *winner.eigenvalues.last().expect("non-empty grid list");
    Ok(SpectralResult {
        lambda_gap: winner.extrapolated,
        sector: winner.ell,
        grids_used: grids.clone(),
        extrapolated: winner.extrapolated,
        error_estimate: (finest - winner.extrapolated).abs(),
        sectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `λ ≥ α/(α+1) ρ_{n,α}` for `α ∈ (0, 3n-4)`.
    Curvature,
    /// `λ ≥ D²/4` with `D` the model Cheeger constant.
    Cheeger,
    /// `(n-1)/2 ≤ λ ≤ n` for the harmonic measure.
    BartheMaZhang,
    /// `λ ≥ 3(n-1)/8 - 1/4` for the harmonic measure.
    HarmonicOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck<T> {
    pub kind: BoundKind,
    pub lower: T,
    pub upper: Option<T>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport<T> {
    pub params: SphereParams<T>,
    pub lambda: T,
    pub checks: Vec<BoundCheck<T>>,
}

impl<T> BoundsReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Lower bounds on the gap that apply to `params`, each paired with its
/// upper bound when there is one.
pub fn applicable_bounds<T: Scalar>(params: &SphereParams<T>) -> Result<Vec<(BoundKind, T, Option<T>)>> {
    let n = params.n;
    let nf = params.dim();
    let alpha = params.alpha;
    let one = T::one();
    let mut out = Vec::new();
    let upper = T::from_usize_lossy(3 * n) - T::lit(4.0);
    if alpha > T::zero() && alpha < upper {
        out.push((BoundKind::Curvature, alpha / (alpha + one) * curvature_constant(n, alpha), None));
    }
    if alpha > -one && alpha < upper {
        let d = ModelProfile::new(*params)?.cheeger_lower();
        out.push((BoundKind::Cheeger, d * d / T::lit(4.0), None));
    }
    if alpha == one {
        out.push((
            BoundKind::BartheMaZhang,
            (nf - one) / T::lit(2.0),
            Some(nf * (one + T::lit(BMZ_UPPER_SLACK))),
        ));
        out.push((BoundKind::HarmonicOrder, T::lit(3.0) * (nf - one) / T::lit(8.0) - T::lit(0.25), None));
    }
    Ok(out)
}

pub fn verify_bounds<T: Scalar>(params: &SphereParams<T>) -> Result<BoundsReport<T>> {
    let result = spectral_gap(params)?;
    verify_bounds_for(params, result.lambda_gap)
}

/// Checks the applicable bounds against an already computed gap.
pub fn verify_bounds_for<T: Scalar>(params: &SphereParams<T>, lambda: T) -> Result<BoundsReport<T>> {
    let tol = T::lit(BOUND_TOL);
    let checks = applicable_bounds(params)?
        .into_iter()
        .map(|(kind, lower, upper)| BoundCheck {
            kind,
            lower,
            upper,
            holds: lambda >= lower - tol && upper.is_none_or(|u| lambda <= u + tol),
        })
        .collect();
    Ok(BoundsReport {
        params: *params,
        lambda,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow<T> {
    pub alpha: T,
    pub s: T,
    pub lambda: Option<T>,
    pub sector: Option<usize>,
    pub rho: T,
    pub lower_bound_cor14: Option<T>,
    pub bmz_low: Option<T>,
    pub bmz_high: Option<T>,
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub error: Option<Error>,
}

impl<T: Scalar> ScanRow<T> {
    /// `λ / n`.
    pub fn ratio(&self) -> Option<T> {
        self.lambda.map(|l| l / T::from_usize_lossy(self.n))
    }
}

/// Gap across `alphas` at fixed `(n, s)`. Failing rows keep their error and
/// the scan continues.
pub fn alpha_scan<T: Scalar>(n: usize, s: T, alphas: &[T]) -> Vec<ScanRow<T>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let rho = curvature_constant(n, alpha);
            let mut row = ScanRow {
                alpha,
                s,
                lambda: None,
                sector: None,
                rho,
                lower_bound_cor14: None,
                bmz_low: None,
                bmz_high: None,
                n,
                error: None,
            };
            if alpha < -T::from_usize_lossy(n) {
                row.error = Some(Error::InvalidParameter {
                    name: "alpha",
                    value: alpha.as_f64(),
                    reason: "scan requires alpha >= -n",
                });
                return row;
            }
            let outcome = SphereParams::new(n, alpha, s).and_then(|p| {
                let gap = spectral_gap(&p)?;
                Ok((gap, applicable_bounds(&p).unwrap_or_default()))
            });
            match outcome {
                Ok((gap, bounds)) => {
                    row.lambda = Some(gap.lambda_gap);
                    row.sector = Some(gap.sector);
                    for (kind, lower, upper) in bounds {
                        match kind {
                            BoundKind::Curvature => row.lower_bound_cor14 = Some(lower),
                            BoundKind::BartheMaZhang => {
                                row.bmz_low = Some(lower);
                                row.bmz_high = upper;
                            }
                            _ => {}
                        }
                    }
                }
                Err(e) => {
                    log::warn!("alpha scan row alpha={} failed: {e}", alpha);
                    row.error = Some(e);
                }
            }
            row
        })
        .collect()
}

/// CSV with columns `alpha, s, lambda, sector, rho, lower_bound_cor14, bmz_low, bmz_high`.
pub fn write_scan_csv<T: Scalar + Serialize, W: Write>(rows: &[ScanRow<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_quadratic_error() {
        let grids = [100, 200];
        let vals = [2.0 + 1.0 / 1e4, 2.0 + 1.0 / 4e4];
        assert!((richardson(&grids, &vals) - 2.0_f64).abs() < 1e-15);
    }

    #[test]
    fn refinement_check_flags_large_jumps() {
        assert!(check_refinement(&[512, 1024], &[1.0_f64, 1.2]).is_err());
        assert!(check_refinement(&[512, 1024], &[1.0_f64, 1.01]).is_ok());
    }

    #[test]
    fn uniform_gap_is_dimension() {
        let p = SphereParams::new(2, 1.0_f64, 0.0).unwrap();
        let r = spectral_gap(&p).unwrap();
        assert!((r.lambda_gap - 2.0).abs() < 1e-6, "{r:?}");
        assert!(r.error_estimate < 1e-4);
        assert_eq!(r.sectors.len(), 3);
    }

    #[test]
    fn bounds_for_harmonic_case() {
        let p = SphereParams::new(3, 1.0_f64, 0.5).unwrap();
        let kinds: Vec<_> = applicable_bounds(&p).unwrap().into_iter().map(|b| b.0).collect();
        assert_eq!(
            kinds,
            vec![BoundKind::Curvature, BoundKind::Cheeger, BoundKind::BartheMaZhang, BoundKind::HarmonicOrder]
        );
        let report = verify_bounds(&p).unwrap();
        assert!(report.passed(), "{report:?}");
        let cor = &report.checks[0];
        assert!((cor.lower - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scan_keeps_going_after_bad_rows() {
        let rows = alpha_scan(2, 0.0_f64, &[-3.0, 0.0]);
        assert!(rows[0].error.is_some());
        assert!((rows[1].lambda.unwrap() - 2.0).abs() < 1e-4);
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "alpha,s,lambda,sector,rho,lower_bound_cor14,bmz_low,bmz_high"
        );
    }
}
