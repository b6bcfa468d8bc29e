//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Infinite endpoints are handled by smooth changes of variable onto finite
//! intervals; optional break points split the domain where the integrand has
//! kinks or sharp peaks. Subintervals are bisected in order of decreasing
//! error estimate until the total estimate meets both tolerances.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_837,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target; both targets must hold.
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 5000,
        }
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

#[derive(Clone, Copy)]
enum Map {
    Finite,
    /// [a, ∞): x = a + t/(1−t)
    Upper(f64),
    /// (−∞, b]: x = b − t/(1−t)
    Lower(f64),
    /// ℝ: x = t/(1−t²)
    Whole,
}

impl Map {
    #[inline]
    fn apply<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> f64 {
        match *self {
            Map::Finite => f(t),
            Map::Upper(a) => {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            }
            Map::Lower(b) => {
                let s = 1.0 - t;
                f(b - t / s) / (s * s)
            }
            Map::Whole => {
                let s = 1.0 - t * t;
                f(t / s) * (1.0 + t * t) / (s * s)
            }
        }
    }
}

struct Piece {
    map: Map,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, map: Map, a: f64, b: f64) -> Result<(f64, f64)> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Result<f64> {
        let v = map.apply(f, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DegenerateIntegral(format!("integrand is {v} near t = {t}")))
        }
    };
    let fc = eval(centre)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let result = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

/// ∫_lo^hi f(x) dx; either endpoint may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, settings: &QuadSettings) -> Result<Quadrature> {
    integrate_with_breaks(f, lo, hi, &[], settings)
}

/// ∫_lo^hi f(x) dx with the domain pre-split at `breaks` (points outside
/// (lo, hi) are ignored).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    settings: &QuadSettings,
) -> Result<Quadrature> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidArgument("NaN integration limit".into()));
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            error_bound: 0.0,
            subdivisions: 0,
        });
    }
    if lo > hi {
        let q = integrate_with_breaks(f, hi, lo, breaks, settings)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut initial: Vec<(Map, f64, f64)> = Vec::new();
    if pts.is_empty() {
        initial.push(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (Map::Finite, lo, hi),
            (true, false) => (Map::Upper(lo), 0.0, 1.0),
            (false, true) => (Map::Lower(hi), 0.0, 1.0),
            (false, false) => (Map::Whole, -1.0, 1.0),
        });
    } else {
        let first = pts[0];
        let last = *pts.last().unwrap();
        if lo.is_finite() {
            initial.push((Map::Finite, lo, first));
        } else {
            initial.push((Map::Lower(first), 0.0, 1.0));
        }
        for w in pts.windows(2) {
            initial.push((Map::Finite, w[0], w[1]));
        }
        if hi.is_finite() {
            initial.push((Map::Finite, last, hi));
        } else {
            initial.push((Map::Upper(last), 0.0, 1.0));
        }
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (map, a, b) in initial {
        let (value, error) = gk21(&f, map, a, b)?;
        total += value;
        total_err += error;
        heap.push(Piece {
            map,
            a,
            b,
            value,
            error,
        });
    }
    let mut subdivisions = 0;
    let done = |value: f64, err: f64| err <= settings.abs_tol && err <= settings.rel_tol * value.abs();
    while !done(total, total_err) {
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        let (v1, e1) = gk21(&f, worst.map, worst.a, mid)?;
        let (v2, e2) = gk21(&f, worst.map, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            map: worst.map,
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            map: worst.map,
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
        // periodic re-summation limits drift of the running totals
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error_bound: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature {
        value,
        error_bound,
        subdivisions,
    })
}
