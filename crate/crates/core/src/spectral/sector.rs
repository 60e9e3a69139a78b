//! One spherical-harmonic sector as a weighted Sturm–Liouville problem on
//! `(0, π)`, discretized by cell-centered finite volumes.
//!
//! Cells have centers `θ_i = (i + ½)h`, `h = π/M`, so the potential is never
//! evaluated at a pole. Fluxes use the weight at the cell faces; the faces at
//! the poles carry zero weight, which is the natural (Neumann) condition.

use serde::Serialize;

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};
use crate::measures::SphereParams;
use crate::scalar::Scalar;

pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorProblem<T> {
    pub params: SphereParams<T>,
    pub ell: usize,
    pub grid: usize,
}

impl<T: Scalar> SectorProblem<T> {
    pub fn new(params: SphereParams<T>, ell: usize, grid: usize) -> Result<Self> {
        if grid < MIN_GRID {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: grid as f64,
                reason: "at least 64 cells are required",
            });
        }
        Ok(Self { params, ell, grid })
    }

    pub fn step(&self) -> T {
        T::PI() / T::from_usize_lossy(self.grid)
    }

    /// `ℓ(ℓ + n - 2) / sin²θ`.
    pub fn potential(&self, theta: T) -> T {
        let l = T::from_usize_lossy(self.ell);
        let sin = theta.sin();
        l * (l + T::from_usize_lossy(self.params.n) - T::lit(2.0)) / (sin * sin)
    }

    pub fn cell_center(&self, i: usize) -> T {
        (T::from_usize_lossy(i) + T::lit(0.5)) * self.step()
    }

    fn log_cells(&self) -> Vec<T> {
        (0..self.grid).map(|i| self.params.log_weight(self.cell_center(i))).collect()
    }

    /// Log-weights at the interior faces `jh`, `j = 1..M-1`, stored at `j - 1`.
    fn log_faces(&self) -> Vec<T> {
        let h = self.step();
        (1..self.grid)
            .map(|j| self.params.log_weight(T::from_usize_lossy(j) * h))
            .collect()
    }

    /// Symmetric matrix whose smallest eigenvalue is the sector gap.
    ///
    /// For `ℓ ≥ 1` this is `W^{-1/2} K W^{-1/2}` with `K` the flux stiffness
    /// plus potential. For `ℓ = 0` the constant mode is removed exactly: with
    /// `K = Cᵀ D C` (`C` the face differences, `D` the face weights) the
    /// nonzero spectrum of `W^{-1/2} K W^{-1/2}` equals that of the
    /// `(M-1)`-square face matrix `D^{1/2} C W^{-1} Cᵀ D^{1/2}`.
    pub fn matrix(&self) -> SymTridiagonal<T> {
        let cells = self.log_cells();
        let faces = self.log_faces();
        let h2 = self.step() * self.step();
        let h4 = h2 * h2;
        let m = self.grid;
        if self.ell == 0 {
            let diag = (0..m - 1)
                .map(|j| ((faces[j] - cells[j]).exp() + (faces[j] - cells[j + 1]).exp()) / h2)
                .collect();
            let off_sq = (0..m - 2)
                .map(|j| (faces[j] + faces[j + 1] - cells[j + 1] - cells[j + 1]).exp() / h4)
                .collect();
            SymTridiagonal::from_squared(diag, off_sq)
        } else {
            let diag = (0..m)
                .map(|i| {
                    let left = if i > 0 { (faces[i - 1] - cells[i]).exp() } else { T::zero() };
                    let right = if i + 1 < m { (faces[i] - cells[i]).exp() } else { T::zero() };
                    (left + right) / h2 + self.potential(self.cell_center(i))
                })
                .collect();
            let off_sq = (0..m - 1)
                .map(|i| (faces[i] + faces[i] - cells[i] - cells[i + 1]).exp() / h4)
                .collect();
            SymTridiagonal::from_squared(diag, off_sq)
        }
    }

    pub fn solve(&self) -> T {
        let tol = (T::epsilon() * T::lit(16.0)).max(T::lit(1e-14));
        self.matrix().eigenvalue(0, tol)
    }
}

/// Smallest nontrivial eigenvalue of sector `ℓ` on an `M`-cell grid.
pub fn sector_gap<T: Scalar>(params: &SphereParams<T>, ell: usize, grid: usize) -> Result<T> {
    Ok(SectorProblem::new(*params, ell, grid)?.solve())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> SphereParams<f64> {
        SphereParams::new(n, 1.0, 0.0).unwrap()
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(sector_gap(&uniform(2), 0, 63).is_err());
    }

    #[test]
    fn uniform_sphere_levels() {
        // sector ℓ on S^n starts at ℓ(ℓ + n - 1); the radial sector's first
        // nontrivial mode is cos θ with eigenvalue n
        for n in [2, 3, 5] {
            let nf = n as f64;
            let p = uniform(n);
            assert!((sector_gap(&p, 0, 1024).unwrap() - nf).abs() < 1e-2 * nf, "{n}");
            assert!((sector_gap(&p, 1, 1024).unwrap() - nf).abs() < 1e-2 * nf, "{n}");
            let l2 = 2.0 * (1.0 + nf);
            assert!((sector_gap(&p, 2, 1024).unwrap() - l2).abs() < 1e-2 * l2, "{n}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let p = SphereParams::new(3, 1.0, 0.7).unwrap();
        let a: f64 = sector_gap(&p, 0, 256).unwrap();
        let b = sector_gap(&p, 0, 512).unwrap();
        let c = sector_gap(&p, 0, 1024).unwrap();
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn f32_uniform() {
        let p = SphereParams::new(2, 1.0f32, 0.0).unwrap();
        assert!((sector_gap(&p, 1, 256).unwrap() - 2.0).abs() < 0.02);
    }
}
