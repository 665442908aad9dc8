//! Adaptive Gauss–Kronrod quadrature (7/15 pair) on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard values, stated to 33 digits.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

/// One 15-point Kronrod evaluation; returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut samples = [0.0f64; 15];
    samples[14] = f_center;

    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        samples[2 * j] = f_lo;
        samples[2 * j + 1] = f_hi;
        let pair = f_lo + f_hi;
        res_kronrod += WGK[j] * pair;
        res_abs += WGK[j] * (f_lo.abs() + f_hi.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * pair;
        }
    }
    res_gauss += WG[3] * f_center;

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[2 * j] - mean).abs() + (samples[2 * j + 1] - mean).abs());
    }

    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
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
        self.err.total_cmp(&other.err)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`, bisecting the
/// worst segment first. Errors out with the achieved accuracy if `max_segments`
/// subdivisions are not enough.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (value, err) = qk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, a, b, value });
    let mut total_err = err;
    let mut segments = 1usize;

    while total_err > abs_tol && segments < max_segments {
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; put it back and stop.
            total_err = worst.err + heap.iter().map(|s| s.err).sum::<f64>();
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        total_err = total_err - worst.err + e1 + e2;
        heap.push(Segment {
            err: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
        segments += 1;
    }

    let total: f64 = heap.iter().map(|s| s.value).sum();
    if total_err > abs_tol {
        return Err(Error::Numeric {
            message: format!("quadrature did not reach tolerance {abs_tol:e}"),
            achieved: total_err,
        });
    }
    Ok((total, total_err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) =
            adaptive_gauss_kronrod(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12, 100).unwrap();
        assert_abs_diff_eq!(v, 4.0 - 4.0 + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let (v, e) = adaptive_gauss_kronrod(|x| (-x * x).exp(), 0.0, 6.0, 1e-12, 1000).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-11);
        assert!(e <= 1e-12);
    }

    #[test]
    fn oscillatory_needs_subdivision() {
        let (v, _) = adaptive_gauss_kronrod(
            |x| (20.0 * x).sin(),
            0.0,
            std::f64::consts::PI,
            1e-11,
            10_000,
        )
        .unwrap();
        assert_abs_diff_eq!(
            v,
            (1.0 - (20.0 * std::f64::consts::PI).cos()) / 20.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn empty_interval() {
        let (v, e) = adaptive_gauss_kronrod(|x| x, 1.0, 1.0, 1e-12, 10).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(e, 0.0);
    }
}
