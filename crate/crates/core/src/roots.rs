//! Bracketed scalar root finding (Brent's method), the matching radius `u₀`
//! where `I₀ = K₀`, and single-pole location by sign-change scanning.

use crate::bessel::{self, BesselOrder};

const MAX_ITERATIONS: usize = 200;

/// Default search interval for [`crossing_u0`].
pub const U0_BRACKET: (f64, f64) = (0.1, 1.0);

/// Grid size of the monotonicity scan behind [`crossing_u0`].
pub const MONOTONICITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} (need lo < hi and a sign change)")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("no convergence after {iterations} iterations; last bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
    #[error("I0 - K0 is not strictly increasing between {x_prev} and {x}")]
    NotMonotone { x_prev: f64, x: f64 },
    #[error("expected exactly one sign change of the denominator on [{lo}, {hi}], found {count} near {locations:?}")]
    SignChangeCount { lo: f64, hi: f64, count: usize, locations: Vec<f64> },
    #[error("function value is not finite at {0}")]
    NonFinite(f64),
}

/// An interval known to contain a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks for a sign change. An exact zero
    /// at an endpoint counts as a sign change.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self, RootError> {
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self, RootError> {
        let valid = lo < hi
            && f_lo.is_finite()
            && f_hi.is_finite()
            && (f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() != f_hi.signum());
        if valid {
            Ok(Bracket { lo, hi, f_lo, f_hi })
        } else {
            Err(RootError::InvalidBracket { lo, hi, f_lo, f_hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }

    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }
}

/// Brent's method: inverse quadratic interpolation and secant steps guarded
/// by bisection. Returns a point inside the bracket whose enclosing interval
/// is no wider than `tol`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64, RootError> {
    if !(tol > 0.0) {
        return Err(RootError::InvalidTolerance(tol));
    }
    if bracket.f_lo == 0.0 {
        return Ok(bracket.lo);
    }
    if bracket.f_hi == 0.0 {
        return Ok(bracket.hi);
    }

    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.f_lo, bracket.f_hi);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NonFinite(b));
        }
    }
    Err(RootError::NoConvergence { iterations: MAX_ITERATIONS, lo: b.min(c), hi: b.max(c) })
}

/// The unique positive solution of `I₀(u) = K₀(u)`, searched in
/// [`U0_BRACKET`].
pub fn crossing_u0(tol: f64) -> Result<f64, RootError> {
    crossing_u0_in(U0_BRACKET.0, U0_BRACKET.1, tol)
}

/// [`crossing_u0`] with a caller-chosen starting bracket.
///
/// Before solving, `I₀ − K₀` is sampled on [`MONOTONICITY_SAMPLES`] points of
/// `[0.01, 10]` and must be strictly increasing there; a single crossing
/// follows from that.
pub fn crossing_u0_in(lo: f64, hi: f64, tol: f64) -> Result<f64, RootError> {
    monotonicity_scan(0.01, 10.0, MONOTONICITY_SAMPLES)?;
    let bracket = Bracket::new(i0_minus_k0, lo, hi)?;
    find_root(i0_minus_k0, bracket, tol)
}

/// `I₀(u) − K₀(u)`, strictly increasing on `(0, ∞)`.
pub fn i0_minus_k0(u: f64) -> f64 {
    bessel::i_unchecked(BesselOrder::Zero, u) - bessel::k_unchecked(BesselOrder::Zero, u)
}

fn monotonicity_scan(lo: f64, hi: f64, samples: usize) -> Result<(), RootError> {
    let step = (hi - lo) / (samples - 1) as f64;
    let mut x_prev = lo;
    let mut prev = i0_minus_k0(lo);
    for i in 1..samples {
        let x = lo + step * i as f64;
        let value = i0_minus_k0(x);
        if !(value > prev) {
            return Err(RootError::NotMonotone { x_prev, x });
        }
        x_prev = x;
        prev = value;
    }
    Ok(())
}

/// Locates the single zero of `denominator` on `range`.
///
/// The range is sampled on 1000 points (geometrically spaced when it spans
/// more than two decades of positive values) and must show exactly one sign
/// change, which is then refined with [`find_root`].
pub fn pole_scan<F: Fn(f64) -> f64>(denominator: F, range: (f64, f64), tol: f64) -> Result<f64, RootError> {
    const SAMPLES: usize = 1000;
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(RootError::InvalidBracket { lo, hi, f_lo: f64::NAN, f_hi: f64::NAN });
    }
    let geometric = lo > 0.0 && hi / lo > 100.0;
    let sample = |i: usize| -> f64 {
        let t = i as f64 / (SAMPLES - 1) as f64;
        if i == SAMPLES - 1 {
            hi
        } else if geometric {
            lo * (hi / lo).powf(t)
        } else {
            lo + (hi - lo) * t
        }
    };

    let xs: Vec<f64> = (0..SAMPLES).map(sample).collect();
    let mut values = Vec::with_capacity(SAMPLES);
    for &x in &xs {
        let v = denominator(x);
        if !v.is_finite() {
            return Err(RootError::NonFinite(x));
        }
        values.push(v);
    }

    // An exact zero on a sample is one crossing; it must not be counted again
    // by the neighbouring intervals.
    let mut crossings: Vec<(usize, usize)> = Vec::new();
    for i in 0..SAMPLES {
        if values[i] == 0.0 {
            crossings.push((i, i));
        } else if i + 1 < SAMPLES && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
            crossings.push((i, i + 1));
        }
    }
    if crossings.len() != 1 {
        return Err(RootError::SignChangeCount {
            lo,
            hi,
            count: crossings.len(),
            locations: crossings.iter().map(|&(i, j)| 0.5 * (xs[i] + xs[j])).collect(),
        });
    }
    let (i, j) = crossings[0];
    if i == j {
        return Ok(xs[i]);
    }
    let bracket = Bracket::from_values(xs[i], xs[j], values[i], values[j])?;
    find_root(denominator, bracket, tol)
}

/// Grows `[guess/factor, guess*factor]` geometrically until `f` changes sign.
/// Only for positive arguments.
pub fn expand_bracket<F: Fn(f64) -> f64>(f: F, guess: f64) -> Result<Bracket, RootError> {
    let mut lo = guess / 2.0;
    let mut hi = guess * 2.0;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    for _ in 0..60 {
        if let Ok(bracket) = Bracket::from_values(lo, hi, f_lo, f_hi) {
            return Ok(bracket);
        }
        lo /= 4.0;
        hi *= 4.0;
        f_lo = f(lo);
        f_hi = f(hi);
    }
    Err(RootError::InvalidBracket { lo, hi, f_lo, f_hi })
}
