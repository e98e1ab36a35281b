//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error drops below the tolerance or the subdivision cap is reached. Known
//! breakpoints (jumps, kinks) are passed in so the rule never straddles them.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;


use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Kronrod abscissae on `[0, 1]`, descending; the odd entries are the
/// 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_296_680,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Hard cap on the number of live subintervals.
pub const MAX_INTERVALS: usize = 1_000_000;

/// Stopping rule: stop once `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            ..Tolerance::default()
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Tolerance {
            abs: self.abs * factor,
            rel: self.rel,
        }
    }

    fn target(self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// A numerical value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

impl<T> Estimate<T> {
    pub fn new(value: T, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: T) -> Self {
        Estimate { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// QUADPACK-style error rescaling of the raw |K21 - G10| difference.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One application of the 21-point Kronrod rule with its embedded
/// 10-point Gauss estimate.
pub fn gauss_kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate<f64> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half);
    Estimate::new(value, error)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<f64>> {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Adaptive integral of `f` over `[a, b]`, never straddling any of `breaks`.
///
/// Breakpoints outside `(a, b)` are ignored. Returns [`Error::Accuracy`]
/// when [`MAX_INTERVALS`] live subintervals are not enough.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate<f64>> {
    if a == b {
        return Ok(Estimate::exact(0.0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::with_capacity(cuts.len() + 16);
    let mut total = 0.0;
    let mut total_err = 0.0;
    // intervals that can no longer be split in floating point
    let mut frozen_err = 0.0;
    let mut left = lo;
    for right in cuts.iter().copied().chain(core::iter::once(hi)) {
        let est = gauss_kronrod21(&mut f, left, right);
        total += est.value;
        total_err += est.error;
        heap.push(Segment {
            a: left,
            b: right,
            value: est.value,
            error: est.error,
        });
        left = right;
    }

    while total_err + frozen_err > tol.target(total) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if !(mid > worst.a && mid < worst.b) || width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            total_err -= worst.error;
            frozen_err += worst.error;
            continue;
        }
        if heap.len() + 2 > MAX_INTERVALS {
            return Err(Error::Accuracy {
                estimate: sign * total,
                bound: total_err + frozen_err,
            });
        }
        let l = gauss_kronrod21(&mut f, worst.a, mid);
        let r = gauss_kronrod21(&mut f, mid, worst.b);
        total += l.value + r.value - worst.value;
        total_err += l.error + r.error - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: l.value,
            error: l.error,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: r.value,
            error: r.error,
        });
    }

    // re-sum to shed the drift of the running update
    let mut value = 0.0;
    let mut err = frozen_err;
    for s in heap.iter() {
        value += s.value;
        err += s.error;
    }
    if !value.is_finite() {
        return Err(Error::Accuracy {
            estimate: value,
            bound: f64::INFINITY,
        });
    }
    Ok(Estimate::new(sign * value, err))
}
