//! Adaptive Gauss–Kronrod integration and a panelled cumulative integral used
//! for CDFs and quantiles.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`]: stop once the summed error estimate is
/// below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 2000,
        }
    }

    pub fn relative(rel: T) -> Self {
        Self::new(T::zero(), rel)
    }
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-10), T::quad_rel_tol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// One 15-point Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
pub fn gauss_kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);

    let mut res_g = f_center * T::lit(WG[3]);
    let mut res_k = f_center * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc > T::zero() && err > T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * ratio.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    (value, err)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    tol: &Tolerance<T>,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;

    loop {
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target {
            break;
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_err.as_f64(),
                requested: target.as_f64(),
                intervals: segments.len(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval collapsed to adjacent floats; nothing left to refine.
            return Err(Error::QuadratureNonConvergence {
                achieved: total_err.as_f64(),
                requested: target.as_f64(),
                intervals: segments.len() + 1,
            });
        }
        let (v1, e1) = gauss_kronrod(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, seg.b);
        total = total - seg.value + v1 + v2;
        total_err = total_err - seg.error + e1 + e2;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift accumulated by incremental updates.
    let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    Ok(Estimate {
        value,
        error,
        intervals: segments.len(),
    })
}

/// Cumulative integral of a non-negative function over `[lo, hi]`, split into
/// uniform panels with exact prefix and suffix sums.
///
/// Partial integrals are the sum of whole panels plus one adaptive integral over
/// the remainder of a single panel, so lower and upper tails both keep full
/// relative precision.
#[derive(Debug, Clone)]
pub struct CumulativeTable<T> {
    lo: T,
    hi: T,
    width: T,
    prefix: Vec<T>,
    suffix: Vec<T>,
    partial_tol: Tolerance<T>,
}

impl<T: Scalar> CumulativeTable<T> {
    /// `abs_fraction` bounds the absolute error of the total relative to its size.
    pub fn build<F: Fn(T) -> T>(
        f: F,
        lo: T,
        hi: T,
        panels: usize,
        abs_fraction: T,
        rel: T,
    ) -> Result<Self> {
        let panels = panels.max(1);
        let width = (hi - lo) / T::from_usize_lossy(panels);
        let node = |k: usize| {
            if k == panels {
                hi
            } else {
                lo + width * T::from_usize_lossy(k)
            }
        };

        let rough: T = (0..panels)
            .map(|k| gauss_kronrod(&f, node(k), node(k + 1)).0.abs())
            .fold(T::zero(), |a, b| a + b);
        let per_panel = Tolerance::new(abs_fraction * rough / T::from_usize_lossy(panels), rel);

        let mut values = Vec::with_capacity(panels);
        for k in 0..panels {
            values.push(integrate(&f, node(k), node(k + 1), &per_panel)?.value);
        }

        let mut prefix = vec![T::zero(); panels + 1];
        for k in 0..panels {
            prefix[k + 1] = prefix[k] + values[k];
        }
        let mut suffix = vec![T::zero(); panels + 1];
        for k in (0..panels).rev() {
            suffix[k] = suffix[k + 1] + values[k];
        }
        let total = prefix[panels];
        Ok(Self {
            lo,
            hi,
            width,
            prefix,
            suffix,
            partial_tol: Tolerance::new(abs_fraction * T::lit(1e-3) * total, rel),
        })
    }

    pub fn total(&self) -> T {
        self.prefix[self.prefix.len() - 1]
    }

    pub fn panels(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn bounds(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn node(&self, k: usize) -> T {
        if k >= self.panels() {
            self.hi
        } else {
            self.lo + self.width * T::from_usize_lossy(k)
        }
    }

    /// Index of the panel containing `x` (clamped to the table).
    pub fn panel_of(&self, x: T) -> usize {
        let idx = ((x - self.lo) / self.width).floor().to_usize().unwrap_or(0);
        idx.min(self.panels() - 1)
    }

    /// Sum of whole panels strictly left of panel `k`.
    pub fn prefix(&self, k: usize) -> T {
        self.prefix[k]
    }

    /// Sum of whole panels from panel `k` to the right end.
    pub fn suffix(&self, k: usize) -> T {
        self.suffix[k]
    }

    /// Integral over `[lo, x]`.
    pub fn lower<F: Fn(T) -> T>(&self, f: F, x: T) -> Result<T> {
        if x <= self.lo {
            return Ok(T::zero());
        }
        if x >= self.hi {
            return Ok(self.total());
        }
        let k = self.panel_of(x);
        let part = integrate(f, self.node(k), x, &self.partial_tol)?.value;
        Ok(self.prefix[k] + part)
    }

    /// Integral over `[x, hi]`.
    pub fn upper<F: Fn(T) -> T>(&self, f: F, x: T) -> Result<T> {
        if x <= self.lo {
            return Ok(self.total());
        }
        if x >= self.hi {
            return Ok(T::zero());
        }
        let k = self.panel_of(x);
        let part = integrate(f, x, self.node(k + 1), &self.partial_tol)?.value;
        Ok(self.suffix[k + 1] + part)
    }

    /// First panel `k` whose cumulative mass reaches `target`; the root of
    /// `lower(x) = target` lies in `[node(k), node(k+1)]`.
    pub fn locate(&self, target: T) -> usize {
        let n = self.panels();
        let idx = self.prefix[1..].partition_point(|&p| p < target);
        idx.min(n - 1)
    }
}
