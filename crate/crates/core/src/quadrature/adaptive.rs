use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

// Gauss–Kronrod 7/15 tables, digits as published.
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration: value and error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive 15-point Gauss–Kronrod integrator.
///
/// Converges when the summed error bound is at most
/// `max(abs_tol, rel_tol * |value|)`. An infinite upper limit is handled by
/// the map `x = lo + u / (1 - u)`. Endpoints are never sampled, so integrable
/// endpoint singularities are fine (convergence is then driven by bisection).
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveQuad {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

/// `∫_lo^hi f`, with `tol` used as both absolute and relative tolerance.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    AdaptiveQuad {
        abs_tol: tol,
        rel_tol: tol,
        ..AdaptiveQuad::default()
    }
    .integrate(f, lo, hi)
    .map(|e| e.value)
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

impl AdaptiveQuad {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64) -> Result<Estimate> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::param("tol", "tolerance must be positive"));
        }
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || lo == f64::NEG_INFINITY {
            return Err(Error::param("lo", "lower limit must be finite"));
        }
        if hi == lo {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        if hi == f64::INFINITY {
            // [lo, lo+1] directly, then x = lo + 1/v on v ∈ (0, 1]; the
            // algebraic tail becomes an endpoint singularity at v = 0.
            let head = self.integrate_finite(&mut f, lo, lo + 1.0)?;
            let mut g = |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let r = f(lo + 1.0 / v) / (v * v);
                if r.is_finite() {
                    r
                } else {
                    0.0
                }
            };
            let tail = self.integrate_finite(&mut g, 0.0, 1.0)?;
            return Ok(Estimate {
                value: head.value + tail.value,
                error: head.error + tail.error,
                intervals: head.intervals + tail.intervals,
            });
        }
        if hi < lo {
            return self.integrate_finite(&mut f, hi, lo).map(|e| Estimate {
                value: -e.value,
                ..e
            });
        }
        self.integrate_finite(&mut f, lo, hi)
    }

    fn integrate_finite<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        lo: f64,
        hi: f64,
    ) -> Result<Estimate> {
        let mut heap = BinaryHeap::new();
        let (v, e) = kronrod15(f, lo, hi);
        heap.push(Segment {
            lo,
            hi,
            value: v,
            error: e,
        });
        let mut intervals = 1;
        loop {
            let mut total = CompensatedSum::new();
            let mut err = 0.0;
            for s in heap.iter() {
                total.add(s.value);
                err += s.error;
            }
            let value = total.value();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if err <= target {
                return Ok(Estimate {
                    value,
                    error: err,
                    intervals,
                });
            }
            if intervals >= self.max_intervals {
                return Err(Error::Quadrature {
                    estimate: value,
                    error_bound: err,
                    intervals,
                });
            }
            let worst = heap.pop().expect("non-empty heap");
            let mid = 0.5 * (worst.lo + worst.hi);
            if !(mid > worst.lo && mid < worst.hi) {
                // Interval exhausted at machine resolution; accept its estimate.
                heap.push(Segment {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            let (v1, e1) = kronrod15(f, worst.lo, mid);
            let (v2, e2) = kronrod15(f, mid, worst.hi);
            heap.push(Segment {
                lo: worst.lo,
                hi: mid,
                value: v1,
                error: e1,
            });
            heap.push(Segment {
                lo: mid,
                hi: worst.hi,
                value: v2,
                error: e2,
            });
            intervals += 1;
        }
    }
}

/// QUADPACK qk15: returns (Kronrod estimate, error estimate).
fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut abserr = ((resk - resg) * half).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    let uflow = f64::MIN_POSITIVE;
    if resabs > uflow / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    (result, abserr)
}
