//! Modified Bessel functions of the first (Basset, `I`) and second
//! (MacDonald, `K`) kind for orders 0 and 1.
//!
//! Evaluation strategy, per branch:
//!
//! * `I_n`: ascending power series up to [`I_SERIES_MAX`], Hankel asymptotic
//!   expansion beyond.
//! * `K_n`: logarithmic ascending series up to [`K_SERIES_MAX`], Steed's
//!   continued fraction on `(K_SERIES_MAX, K_ASYMPTOTIC_MIN)`, Hankel
//!   asymptotic expansion beyond.
//!
//! Every branch computes the exponentially scaled value internally; the
//! unscaled entry points multiply by `e^{±x}` and report overflow or
//! underflow instead of returning `inf` or `0`.

use std::f64::consts::PI;
use std::fmt;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the ascending-series branch for `I_n`.
pub const I_SERIES_MAX: f64 = 25.0;
/// Upper end of the logarithmic series branch for `K_n`.
pub const K_SERIES_MAX: f64 = 2.0;
/// Lower end of the asymptotic branch for `K_n`.
pub const K_ASYMPTOTIC_MIN: f64 = 25.0;
/// `K_n` is rejected below this argument.
pub const K_MIN_ARGUMENT: f64 = 1e-8;

const MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum BesselError {
    #[error("Bessel order {0} is not supported (only 0 and 1)")]
    UnsupportedOrder(u32),
    #[error("argument {0} is negative or NaN")]
    InvalidArgument(f64),
    #[error("K_n({x}) requested below the minimum argument {min}")]
    NearSingularity { x: f64, min: f64 },
    #[error("I_n({0}) overflows f64; use the scaled variant")]
    Overflow(f64),
    #[error("K_n({0}) underflows f64; use the scaled variant")]
    Underflow(f64),
}

/// Order of a modified Bessel function. Only 0 and 1 are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = BesselError;

    fn try_from(order: u32) -> Result<Self, Self::Error> {
        match order {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            other => Err(BesselError::UnsupportedOrder(other)),
        }
    }
}

impl fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

fn check_nonnegative(x: f64) -> Result<(), BesselError> {
    if x.is_nan() || x < 0.0 {
        Err(BesselError::InvalidArgument(x))
    } else {
        Ok(())
    }
}

fn check_k_domain(x: f64) -> Result<(), BesselError> {
    check_nonnegative(x)?;
    if x < K_MIN_ARGUMENT {
        return Err(BesselError::NearSingularity { x, min: K_MIN_ARGUMENT });
    }
    Ok(())
}

/// `I_order(x)`. Accepts `x = 0`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    check_nonnegative(x)?;
    if x <= I_SERIES_MAX {
        return Ok(branches::i_series(order, x));
    }
    let value = branches::i_asymptotic_scaled(order, x) * x.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(BesselError::Overflow(x))
    }
}

/// `e^{-x} I_order(x)`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    check_nonnegative(x)?;
    Ok(i_scaled_unchecked(order, x))
}

/// `K_order(x)` for `x >= 1e-8`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    check_k_domain(x)?;
    if x <= K_SERIES_MAX {
        return Ok(branches::k_series(order, x));
    }
    let value = k_scaled_unchecked(order, x) * (-x).exp();
    // Subnormal results have lost relative precision as well.
    if value < f64::MIN_POSITIVE {
        Err(BesselError::Underflow(x))
    } else {
        Ok(value)
    }
}

/// `e^{x} K_order(x)` for `x >= 1e-8`.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    check_k_domain(x)?;
    Ok(k_scaled_unchecked(order, x))
}

/// `I₀(x)K₁(x) + I₁(x)K₀(x) − 1/x`, computed from the scaled kernels so that
/// the exponentials cancel exactly.
pub fn wronskian_defect(x: f64) -> Result<f64, BesselError> {
    check_k_domain(x)?;
    let i0 = i_scaled_unchecked(BesselOrder::Zero, x);
    let i1 = i_scaled_unchecked(BesselOrder::One, x);
    let k0 = k_scaled_unchecked(BesselOrder::Zero, x);
    let k1 = k_scaled_unchecked(BesselOrder::One, x);
    Ok(i0 * k1 + i1 * k0 - 1.0 / x)
}

pub(crate) fn i_scaled_unchecked(order: BesselOrder, x: f64) -> f64 {
    if x <= I_SERIES_MAX {
        branches::i_series(order, x) * (-x).exp()
    } else {
        branches::i_asymptotic_scaled(order, x)
    }
}

pub(crate) fn k_scaled_unchecked(order: BesselOrder, x: f64) -> f64 {
    if x <= K_SERIES_MAX {
        branches::k_series(order, x) * x.exp()
    } else if x < K_ASYMPTOTIC_MIN {
        branches::k_continued_fraction_scaled(order, x)
    } else {
        branches::k_asymptotic_scaled(order, x)
    }
}

/// Unscaled `I_n` without domain checks. Callers guarantee `0 <= x <= ~700`.
pub(crate) fn i_unchecked(order: BesselOrder, x: f64) -> f64 {
    if x <= I_SERIES_MAX {
        branches::i_series(order, x)
    } else {
        branches::i_asymptotic_scaled(order, x) * x.exp()
    }
}

/// Unscaled `K_n` without domain checks; underflows quietly to zero.
pub(crate) fn k_unchecked(order: BesselOrder, x: f64) -> f64 {
    if x <= K_SERIES_MAX {
        branches::k_series(order, x)
    } else {
        k_scaled_unchecked(order, x) * (-x).exp()
    }
}

/// The individual evaluation branches, exposed so that their agreement at
/// the switchover points can be tested directly.
pub mod branches {
    use super::*;

    /// Ascending series `Σ (x/2)^{2k+n} / (k! (k+n)!)`.
    pub fn i_series(order: BesselOrder, x: f64) -> f64 {
        let n = order.as_u32() as f64;
        let half = 0.5 * x;
        let q = half * half;
        let mut term = if order == BesselOrder::Zero { 1.0 } else { half };
        let mut sum = term;
        for k in 1..MAX_TERMS {
            let k = k as f64;
            term *= q / (k * (k + n));
            sum += term;
            if term <= f64::EPSILON * 0.25 * sum {
                break;
            }
        }
        sum
    }

    /// Small-argument expansions
    /// `K₀ = −(ln(x/2)+γ) I₀ + Σ_{k≥1} H_k q^k/(k!)²` and
    /// `K₁ = 1/x + ln(x/2) I₁ − (x/4) Σ_{k≥0} (ψ(k+1)+ψ(k+2)) q^k/(k!(k+1)!)`,
    /// with `q = x²/4`.
    pub fn k_series(order: BesselOrder, x: f64) -> f64 {
        let q = 0.25 * x * x;
        let log_half = (0.5 * x).ln();
        match order {
            BesselOrder::Zero => {
                let mut term = 1.0;
                let mut harmonic = 0.0;
                let mut sum = 0.0;
                for k in 1..MAX_TERMS {
                    let kf = k as f64;
                    term *= q / (kf * kf);
                    harmonic += 1.0 / kf;
                    let contribution = term * harmonic;
                    sum += contribution;
                    if contribution <= f64::EPSILON * 0.25 * sum.abs() {
                        break;
                    }
                }
                -(log_half + EULER_GAMMA) * i_series(BesselOrder::Zero, x) + sum
            }
            BesselOrder::One => {
                // digamma(k+1) + digamma(k+2) = -2γ + H_k + H_{k+1}
                let mut term = 1.0;
                let mut h_k = 0.0;
                let mut h_k1 = 1.0;
                let mut sum = term * (h_k + h_k1 - 2.0 * EULER_GAMMA);
                for k in 1..MAX_TERMS {
                    let kf = k as f64;
                    term *= q / (kf * (kf + 1.0));
                    h_k += 1.0 / kf;
                    h_k1 += 1.0 / (kf + 1.0);
                    let contribution = term * (h_k + h_k1 - 2.0 * EULER_GAMMA);
                    sum += contribution;
                    if contribution.abs() <= f64::EPSILON * 0.25 * sum.abs() {
                        break;
                    }
                }
                1.0 / x + log_half * i_series(BesselOrder::One, x) - 0.25 * x * sum
            }
        }
    }

    /// Hankel expansion `e^{-x} I_n(x) ≈ (2πx)^{-1/2} Σ (−1)^k a_k(n) / x^k`.
    pub fn i_asymptotic_scaled(order: BesselOrder, x: f64) -> f64 {
        hankel_sum(order, x, -1.0) / (2.0 * PI * x).sqrt()
    }

    /// Hankel expansion `e^{x} K_n(x) ≈ (π/(2x))^{1/2} Σ a_k(n) / x^k`.
    pub fn k_asymptotic_scaled(order: BesselOrder, x: f64) -> f64 {
        hankel_sum(order, x, 1.0) * (PI / (2.0 * x)).sqrt()
    }

    /// Sums the Hankel series until the terms reach rounding level or start
    /// growing (the series is only asymptotic).
    fn hankel_sum(order: BesselOrder, x: f64, sign: f64) -> f64 {
        let mu = 4.0 * (order.as_u32() as f64).powi(2);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..MAX_TERMS {
            let odd = (2 * k - 1) as f64;
            let next = term * sign * (mu - odd * odd) / (8.0 * k as f64 * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
                break;
            }
        }
        sum
    }

    /// Steed's continued fraction (Temme's CF2) for `e^{x} K₀` and
    /// `e^{x} K₁`; converges rapidly for `x >= 2`.
    pub fn k_continued_fraction_scaled(order: BesselOrder, x: f64) -> f64 {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_TERMS {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < 0.5 * f64::EPSILON {
                break;
            }
        }
        h *= a1;
        let k0 = (PI / (2.0 * x)).sqrt() / s;
        match order {
            BesselOrder::Zero => k0,
            BesselOrder::One => k0 * (x + 0.5 - h) / x,
        }
    }
}
