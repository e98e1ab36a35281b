//! Limits of sequences sampled on a geometric ladder.
//!
//! The last [`TAIL_LEN`] values are fitted to `v_k = L + c q^k` with a
//! complex ratio `q`. When the fit is poor the raw spread of the tail is
//! reported instead.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Number of trailing values used by [`extrapolate`].
pub const TAIL_LEN: usize = 5;

/// Fits with `|q|` at or above this fall back to the spread.
pub const MAX_RATIO: f64 = 0.9;

/// A tail limit estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub limit: Complex64,
    /// Bound on `|limit - true limit|` as far as the tail can tell.
    pub error: f64,
    /// `max |v_i - v_j|` over the tail.
    pub spread: f64,
    /// Fitted ratio, `None` on fallback.
    pub ratio: Option<Complex64>,
    /// Largest misfit of the difference recursion `d_(i+1) = q d_i`.
    pub residual: f64,
}

impl TailFit {
    pub fn extrapolated(&self) -> bool {
        self.ratio.is_some()
    }
}

/// Maximal pairwise distance within `values`.
pub fn spread(values: &[Complex64]) -> f64 {
    let mut s: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            s = s.max((a - b).norm());
        }
    }
    s
}

/// Fits the tail of `values`. `None` if fewer than [`TAIL_LEN`] values or
/// any of them is not finite.
pub fn extrapolate(values: &[Complex64]) -> Option<TailFit> {
    if values.len() < TAIL_LEN {
        return None;
    }
    let v = &values[values.len() - TAIL_LEN..];
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let last = v[TAIL_LEN - 1];
    let sp = spread(v);
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let noise = 1e-14 * scale;
    let fallback = TailFit {
        limit: last,
        error: sp,
        spread: sp,
        ratio: None,
        residual: f64::INFINITY,
    };
    if sp <= noise {
        return Some(TailFit { residual: 0.0, ..fallback });
    }
    let d: [Complex64; TAIL_LEN - 1] = core::array::from_fn(|i| v[i + 1] - v[i]);
    let mut num = Complex64::ZERO;
    let mut den = 0.0;
    for i in 0..TAIL_LEN - 2 {
        num += d[i + 1] * d[i].conj();
        den += d[i].norm_sqr();
    }
    if den == 0.0 {
        return Some(fallback);
    }
    let q = num / den;
    let residual = (0..TAIL_LEN - 2).map(|i| (d[i + 1] - q * d[i]).norm()).fold(0.0, f64::max);
    let qn = q.norm();
    if !(qn < MAX_RATIO) || residual > sp {
        return Some(TailFit { residual, ..fallback });
    }
    let limit = last + d[TAIL_LEN - 2] * q / (Complex64::new(1.0, 0.0) - q);
    // the misfit propagates through the geometric remainder
    let error = (residual + noise) / (1.0 - qn) + (limit - last).norm() * residual / (d[TAIL_LEN - 2].norm() + noise);
    if error >= sp {
        return Some(TailFit { residual, ..fallback });
    }
    Some(TailFit {
        limit,
        error,
        spread: sp,
        ratio: Some(q),
        residual,
    })
}

/// Whether the magnitudes of the tail grow without a sign of settling:
/// roughly nondecreasing and at least doubling across the tail.
pub fn growing(values: &[Complex64]) -> bool {
    if values.len() < TAIL_LEN {
        return false;
    }
    let m: alloc::vec::Vec<f64> = values[values.len() - TAIL_LEN..].iter().map(|z| z.norm()).collect();
    if !m.iter().all(|x| x.is_finite()) {
        return m.iter().any(|x| x.is_infinite());
    }
    let mut peak: f64 = 0.0;
    for &x in &m {
        if x < 0.9 * peak {
            return false;
        }
        peak = peak.max(x);
    }
    m[TAIL_LEN - 1] >= 2.0 * m[0] && m[TAIL_LEN - 1] > 0.0
}
