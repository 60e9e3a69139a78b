//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::scalar::Scalar;

/// Symmetric tridiagonal matrix stored as its diagonal and the squares of its
/// off-diagonal, which is all the Sturm recurrence needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    diag: Vec<T>,
    off_sq: Vec<T>,
}

impl<T: Scalar> SymTridiagonal<T> {
    /// Panics unless `off_sq.len() + 1 == diag.len()`.
    pub fn from_squared(diag: Vec<T>, off_sq: Vec<T>) -> Self {
        assert!(!diag.is_empty() && off_sq.len() + 1 == diag.len(), "inconsistent tridiagonal sizes");
        Self { diag, off_sq }
    }

    pub fn new(diag: Vec<T>, off: &[T]) -> Self {
        Self::from_squared(diag, off.iter().map(|&e| e * e).collect())
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off_squared(&self) -> &[T] {
        &self.off_sq
    }

    fn pivot_floor(&self) -> T {
        let big = self.off_sq.iter().fold(T::one(), |m, &e| m.max(e));
        T::min_positive_value() * big
    }

    /// Number of eigenvalues below `x`. An eigenvalue equal to `x` may be
    /// counted either way.
    pub fn count_below(&self, x: T) -> usize {
        let floor = self.pivot_floor();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.diag.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off_sq[i - 1] / q;
            }
            if q.abs() < floor {
                q = -floor;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (T, T) {
        let m = self.diag.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..m {
            let left = if i > 0 { self.off_sq[i - 1].sqrt() } else { T::zero() };
            let right = if i + 1 < m { self.off_sq[i].sqrt() } else { T::zero() };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) to relative width `rel_tol`.
    pub fn eigenvalue(&self, k: usize, rel_tol: T) -> T {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = T::epsilon() * T::lit(4.0) * lo.abs().max(hi.abs()).max(T::one());
        lo = lo - pad;
        hi = hi + pad;
        for _ in 0..400 {
            let mid = T::lit(0.5) * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= rel_tol * lo.abs().max(hi.abs()) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        T::lit(0.5) * (lo + hi)
    }
}
