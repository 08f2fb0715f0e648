//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! Panels are bisected in order of decreasing error estimate until the total
//! estimate meets the tolerance. Semi-infinite ranges are mapped onto
//! `[0, 1)` with `x = a + t/(1 − t)`. The engine never looks for kinks; callers
//! pass breakpoints explicitly and every breakpoint becomes a panel edge.

use std::f64::consts::PI;

/// Panels allowed before giving up.
pub const MAX_PANELS: usize = 5000;

// 21-point Kronrod abscissae and weights; every other abscissa (odd index)
// belongs to the embedded 10-point Gauss rule.
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
    0.123_491_976_262_065_851_077_600_525_452_890,
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error(
        "no convergence after {} panels: best estimate {} ± {}",
        MAX_PANELS, best.value, best.error_estimate
    )]
    NoConvergence { best: QuadResult },
}

/// `∫_a^b f(x) dx`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breakpoints(f, a, b, &[], tol)
}

/// `∫_a^b f(x) dx` with panel edges forced at every breakpoint inside
/// `(a, b)`. Breakpoints outside the interval are ignored.
pub fn integrate_with_breakpoints<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let edges = panel_edges(a, b, breakpoints);
    let segments: Vec<Segment> = edges.windows(2).map(|w| Segment { map: Map::Identity, lo: w[0], hi: w[1] }).collect();
    Engine::new(&f, tol)?.run(segments)
}

/// `∫_a^∞ f(x) dx` through the substitution `x = a + t/(1 − t)`.
pub fn integrate_semiinfinite<F>(f: F, a: f64, tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    if !a.is_finite() {
        return Err(QuadError::InvalidInterval { a, b: f64::INFINITY });
    }
    let segments = vec![Segment { map: Map::Tail(a), lo: 0.0, hi: 1.0 }];
    Engine::new(&f, tol)?.run(segments)
}

/// `2π ∫_0^∞ f(r) r dr`, the integral of a radial function over the plane.
///
/// The finite panels run between consecutive breakpoints; the last breakpoint
/// (or 0) starts the transformed tail.
pub fn integrate_radial2d<F>(f: F, breakpoints: &[f64], tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    let mut edges: Vec<f64> = breakpoints.iter().copied().filter(|r| r.is_finite() && *r > 0.0).collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.insert(0, 0.0);

    let mut segments: Vec<Segment> =
        edges.windows(2).map(|w| Segment { map: Map::Identity, lo: w[0], hi: w[1] }).collect();
    let start = *edges.last().expect("edges always contain 0");
    segments.push(Segment { map: Map::Tail(start), lo: 0.0, hi: 1.0 });

    let integrand = |r: f64| 2.0 * PI * r * f(r);
    Engine::new(&integrand, tol)?.run(segments)
}

fn panel_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|x| *x > a && *x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `x = start + t/(1 − t)` on `t ∈ [0, 1)`.
    Tail(f64),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    map: Map,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    /// Set once the panel is too narrow to bisect in floating point.
    exhausted: bool,
}

struct Engine<'a> {
    f: &'a dyn Fn(f64) -> f64,
    tol: f64,
    evaluations: usize,
}

impl<'a> Engine<'a> {
    fn new(f: &'a dyn Fn(f64) -> f64, tol: f64) -> Result<Self, QuadError> {
        if !(tol > 0.0) {
            return Err(QuadError::InvalidTolerance(tol));
        }
        Ok(Engine { f, tol, evaluations: 0 })
    }

    fn eval(&mut self, map: Map, t: f64) -> Result<f64, QuadError> {
        self.evaluations += 1;
        let value = match map {
            Map::Identity => (self.f)(t),
            Map::Tail(start) => {
                let s = 1.0 - t;
                let x = start + t / s;
                if x.is_infinite() {
                    0.0
                } else {
                    (self.f)(x) / (s * s)
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            let x = match map {
                Map::Identity => t,
                Map::Tail(start) => start + t / (1.0 - t),
            };
            Err(QuadError::NonFinite { x })
        }
    }

    fn panel(&mut self, map: Map, lo: f64, hi: f64) -> Result<Panel, QuadError> {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let fc = self.eval(map, center)?;
        let mut kronrod = fc * WGK[10];
        let mut gauss = 0.0;
        let mut abs_sum = fc.abs() * WGK[10];
        let mut values = [0.0f64; 20];
        for j in 0..10 {
            let dx = half * XGK[j];
            let f1 = self.eval(map, center - dx)?;
            let f2 = self.eval(map, center + dx)?;
            values[2 * j] = f1;
            values[2 * j + 1] = f2;
            kronrod += WGK[j] * (f1 + f2);
            abs_sum += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kronrod;
        let mut asc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            asc += WGK[j] * ((values[2 * j] - mean).abs() + (values[2 * j + 1] - mean).abs());
        }
        let value = kronrod * half;
        let abs_value = abs_sum * half.abs();
        let asc = asc * half.abs();
        let error = rescale_error((kronrod - gauss) * half, abs_value, asc);
        let exhausted = {
            let mid = 0.5 * (lo + hi);
            !(mid > lo && mid < hi) || (hi - lo) <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs())
        };
        Ok(Panel { map, lo, hi, value, error, abs_value, exhausted })
    }

    fn run(mut self, segments: Vec<Segment>) -> Result<QuadResult, QuadError> {
        let mut panels = Vec::with_capacity(64);
        for seg in segments {
            panels.push(self.panel(seg.map, seg.lo, seg.hi)?);
        }
        loop {
            let (value, error, abs_value) = totals(&panels);
            let roundoff_floor = 100.0 * f64::EPSILON * abs_value;
            if error <= self.tol || error <= roundoff_floor {
                return Ok(QuadResult { value, error_estimate: error, evaluations: self.evaluations });
            }
            let worst = panels
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.exhausted)
                .max_by(|(ia, a), (ib, b)| a.error.total_cmp(&b.error).then(ib.cmp(ia)))
                .map(|(i, _)| i);
            let best = QuadResult { value, error_estimate: error, evaluations: self.evaluations };
            let Some(worst) = worst else {
                return Err(QuadError::NoConvergence { best });
            };
            if panels.len() >= MAX_PANELS {
                return Err(QuadError::NoConvergence { best });
            }
            let p = panels[worst];
            let mid = 0.5 * (p.lo + p.hi);
            let left = self.panel(p.map, p.lo, mid)?;
            let right = self.panel(p.map, mid, p.hi)?;
            panels[worst] = left;
            panels.insert(worst + 1, right);
        }
    }
}

/// Sums in panel order, so results do not depend on refinement history.
fn totals(panels: &[Panel]) -> (f64, f64, f64) {
    panels.iter().fold((0.0, 0.0, 0.0), |(v, e, a), p| (v + p.value, e + p.error, a + p.abs_value))
}

/// QUADPACK's error rescaling for the Kronrod-Gauss difference.
fn rescale_error(err: f64, abs_value: f64, asc: f64) -> f64 {
    let mut scaled = err.abs();
    if asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / asc).powf(1.5);
        scaled = if scale < 1.0 { asc * scale } else { asc };
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * abs_value);
    }
    scaled
}
