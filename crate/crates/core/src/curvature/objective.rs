//! The reduced curvature objective on the `(a, b) = (⟨x,y⟩, ⟨x,θ⟩)` disk and
//! its numerical minimization.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `F_p(a, b) = (a d + (p - 2) b²) / d²` with `d = (1 - a)² + b²`.
///
/// `p = 1` gives the objective whose minimum over the unit disk is the
/// curvature loss `-1/4`.
pub fn f_p<T: Scalar>(p: T, a: T, b: T) -> Result<T> {
    check_p(p)?;
    f_p_stable(p, a, T::one() - a, b)
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p.as_f64(),
            reason: "exponent must be positive",
        })
    }
}

// With u = 1 - a the numerator equals a u² + (p - 1 - u) b², which avoids the
// cancellation between a d and b² close to (1, 0).
fn f_p_stable<T: Scalar>(p: T, a: T, u: T, b: T) -> Result<T> {
    let d = u * u + b * b;
    if d == T::zero() {
        return Err(Error::Singular {
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    Ok((a * u * u + (p - T::one() - u) * b * b) / (d * d))
}

/// `F_p` at `(r cos φ, r sin φ)` with `1 - a` formed without cancellation.
fn f_p_polar<T: Scalar>(p: T, r: T, phi: T) -> Option<T> {
    let (sin, cos) = phi.sin_cos();
    let half = (phi * T::lit(0.5)).sin();
    let u = (T::one() - r) + T::lit(2.0) * r * half * half;
    f_p_stable(p, r * cos, u, r * sin).ok()
}

/// `F(a, b) = (a d - b²) / d²`, i.e. `F_1`.
pub fn f_objective<T: Scalar>(a: T, b: T) -> Result<T> {
    f_p(T::one(), a, b)
}

/// Search resolution for [`min_f_disk_with`].
#[derive(Debug, Clone, Copy)]
pub struct DiskSearch {
    pub radii: usize,
    pub angles: usize,
    /// Number of best grid cells refined locally.
    pub polish: usize,
}

impl Default for DiskSearch {
    fn default() -> Self {
        Self {
            radii: 1000,
            angles: 1000,
            polish: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskMinimum<T> {
    pub min: T,
    pub argmin: (T, T),
}

/// Global minimum of `F_p` over the closed disk `a² + b² ≤ radius²`.
pub fn min_f_disk<T: Scalar>(radius: T, p: T) -> Result<DiskMinimum<T>> {
    min_f_disk_with(radius, p, DiskSearch::default())
}

pub fn min_f_disk_with<T: Scalar>(radius: T, p: T, search: DiskSearch) -> Result<DiskMinimum<T>> {
    if !(radius >= T::zero() && radius <= T::one()) {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: radius.as_f64(),
            reason: "disk radius must lie in [0, 1]",
        });
    }
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p.as_f64(),
            reason: "minimization is only defined for p >= 1",
        });
    }
    let eval = |r: T, phi: T| f_p_polar(p, r, phi);

    if radius == T::zero() {
        let v = eval(T::zero(), T::zero()).unwrap_or(T::zero());
        return Ok(DiskMinimum {
            min: v,
            argmin: (T::zero(), T::zero()),
        });
    }

    let radii = search.radii.max(2);
    let angles = search.angles.max(4);
    let keep = search.polish.max(1);
    let two_pi = T::PI() + T::PI();
    let dphi = two_pi / T::from_usize_lossy(angles);

    // (value, a, b, r, phi)
    let mut best: Vec<(T, T, T, T, T)> = Vec::with_capacity(keep + 1);
    let consider = |cand: (T, T, T, T, T), best: &mut Vec<(T, T, T, T, T)>| {
        let pos = best
            .iter()
            .position(|b| candidate_order(&cand, b) == Ordering::Less)
            .unwrap_or(best.len());
        if pos < keep {
            best.insert(pos, cand);
            best.truncate(keep);
        }
    };
    let point = |r: T, phi: T| (r * phi.cos(), r * phi.sin());

    if let Some(v) = eval(T::zero(), T::zero()) {
        consider((v, T::zero(), T::zero(), T::zero(), T::zero()), &mut best);
    }
    for j in 1..radii {
        let r = radius * T::from_usize_lossy(j) / T::from_usize_lossy(radii - 1);
        for k in 0..angles {
            let phi = dphi * T::from_usize_lossy(k);
            if let Some(v) = eval(r, phi) {
                let (a, b) = point(r, phi);
                consider((v, a, b, r, phi), &mut best);
            }
        }
    }

    let mut candidates = best.clone();
    for &(_, _, _, r, phi) in &best {
        if r == radius {
            // Boundary cell: golden-section search along the circle.
            let along = |t: T| eval(radius, t).unwrap_or(T::infinity());
            let t = golden_section(along, phi - dphi, phi + dphi, T::lit(1e-13));
            if let Some(v) = eval(radius, t) {
                let (a, b) = point(radius, t);
                candidates.push((v, a, b, radius, t));
            }
        }
        let inside = |x: [T; 2]| {
            if x[0] < T::zero() || x[0] > radius {
                T::infinity()
            } else {
                eval(x[0], x[1]).unwrap_or(T::infinity())
            }
        };
        let x = nelder_mead(inside, [r, phi], radius / T::from_usize_lossy(radii), 400);
        if let Some(v) = eval(x[0], x[1]) {
            if x[0] >= T::zero() && x[0] <= radius {
                let (a, b) = point(x[0], x[1]);
                candidates.push((v, a, b, x[0], x[1]));
            }
        }
    }

    let min = candidates
        .iter()
        .map(|c| c.0)
        .fold(T::infinity(), |m, v| m.min(v));
    // Lexicographic tie-break on (a, b) among values equal up to rounding.
    let tie = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    let argmin = candidates
        .iter()
        .filter(|c| c.0 <= min + tie)
        .map(|c| (c.1, c.2))
        .min_by(|x, y| lexicographic(x, y))
        .unwrap_or((T::zero(), T::zero()));
    Ok(DiskMinimum { min, argmin })
}

fn lexicographic<T: Scalar>(x: &(T, T), y: &(T, T)) -> Ordering {
    x.0.partial_cmp(&y.0)
        .unwrap_or(Ordering::Equal)
        .then(x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal))
}

fn candidate_order<T: Scalar>(x: &(T, T, T, T, T), y: &(T, T, T, T, T)) -> Ordering {
    x.0.partial_cmp(&y.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| lexicographic(&(x.1, x.2), &(y.1, y.2)))
}

fn golden_section<T: Scalar, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, tol: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Derivative-free 2-D Nelder–Mead with standard coefficients.
pub fn nelder_mead<T: Scalar, F: Fn([T; 2]) -> T>(f: F, start: [T; 2], step: T, max_iter: usize) -> [T; 2] {
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(&f);
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = (values[2] - values[0]).abs();
        if values[0].is_finite() && spread <= T::epsilon() * (T::one() + values[0].abs()) {
            let size = (simplex[2][0] - simplex[0][0]).abs() + (simplex[2][1] - simplex[0][1]).abs();
            if size <= T::epsilon().sqrt() * T::lit(1e-3) {
                break;
            }
        }

        let centroid = [half * (simplex[0][0] + simplex[1][0]), half * (simplex[0][1] + simplex[1][1])];
        let along = |t: T| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let reflected = along(-T::one());
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-two);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let contracted = if fr < values[2] { along(-half) } else { along(half) };
        let fc = f(contracted);
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        for i in 1..3 {
            simplex[i] = [
                simplex[0][0] + half * (simplex[i][0] - simplex[0][0]),
                simplex[0][1] + half * (simplex[i][1] - simplex[0][1]),
            ];
            values[i] = f(simplex[i]);
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal))
        .unwrap_or(0);
    simplex[best]
}
