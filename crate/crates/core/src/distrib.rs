//! A small numerical distribution calculus.
//!
//! Distributions are represented as a regular (locally integrable,
//! piecewise-smooth) density plus finitely many delta atoms. Derivatives of
//! piecewise-smooth representatives produce atoms at every breakpoint,
//! weighted by the jump of the first derivative. Brackets against compactly
//! supported test functions are evaluated with the adaptive quadrature in
//! [`crate::quad`].
//!
//! Two geometries are supported:
//!
//! * [`Support::Line`]: functions on `R`, atoms at arbitrary points.
//! * [`Support::Radial`]: radial functions on `R²` parameterised by
//!   `r ∈ [0, ∞)`; atoms are either the point mass at the origin or uniform
//!   layers on circles `r = R` with line measure (total mass `2πR` against
//!   the constant function 1).

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bessel::{self, BesselOrder};
use crate::quad::{self, QuadError};

/// Offsets, in units of the stencil step, of the one-sided jump stencil.
const STENCIL: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
/// Weights of `d/dt` at `t = 0` for the cubic through `t = 1, 2, 3, 4`.
const STENCIL_WEIGHTS: [f64; 4] = [-13.0 / 3.0, 19.0 / 2.0, -7.0, 11.0 / 6.0];
/// Relative step of the jump stencil.
pub const JUMP_STEP: f64 = 1e-3;
/// Relative agreement required between analytic and stencil jumps.
pub const JUMP_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistribError {
    #[error("breakpoints must be finite, strictly increasing{extra}; got {breakpoints:?}")]
    InvalidBreakpoints { breakpoints: Vec<f64>, extra: &'static str },
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCount { expected: usize, breakpoints: usize, got: usize },
    #[error("function is discontinuous at {at}: left {left}, right {right}")]
    Discontinuous { at: f64, left: f64, right: f64 },
    #[error("jump at {at}: analytic {analytic} and one-sided stencil {finite_difference} disagree")]
    JumpMismatch { at: f64, analytic: f64, finite_difference: f64 },
    #[error("operation needs a {expected} representative")]
    WrongSupport { expected: Support },
    #[error("a point atom in the plane must sit at the origin, got location {0}")]
    OffOriginPoint(f64),
    #[error("circle layer radius must be positive, got {0}")]
    InvalidCircle(f64),
    #[error("invalid test function: {0}")]
    InvalidTestFunction(&'static str),
    #[error("test function of dimension {dim} cannot pair with a {support} distribution")]
    DimensionMismatch { dim: usize, support: Support },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Where a representative lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Support {
    /// `x ∈ R`.
    Line,
    /// `r = |x| ∈ [0, ∞)` for radial functions on `R²`.
    Radial,
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Line => write!(f, "line"),
            Support::Radial => write!(f, "radial"),
        }
    }
}

/// Value and first two derivatives of a smooth piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }
}

pub type PieceFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn validate_breakpoints(support: Support, breakpoints: &[f64]) -> Result<(), DistribError> {
    let increasing = breakpoints.windows(2).all(|w| w[0] < w[1]);
    let finite = breakpoints.iter().all(|b| b.is_finite());
    if !(increasing && finite) {
        return Err(DistribError::InvalidBreakpoints { breakpoints: breakpoints.to_vec(), extra: "" });
    }
    if support == Support::Radial && breakpoints.iter().any(|&b| b <= 0.0) {
        return Err(DistribError::InvalidBreakpoints {
            breakpoints: breakpoints.to_vec(),
            extra: " and positive for radial functions",
        });
    }
    Ok(())
}

/// Index of the piece owning `x`; a breakpoint belongs to the piece on its
/// right.
fn piece_index(breakpoints: &[f64], x: f64) -> usize {
    breakpoints.partition_point(|&b| b <= x)
}

/// A piecewise-smooth function with explicit breakpoints. On
/// [`Support::Radial`] the pieces partition `[0, ∞)`, on [`Support::Line`]
/// they partition `R`. Each piece reports its value and two derivatives.
#[derive(Clone)]
pub struct Piecewise {
    support: Support,
    breakpoints: Vec<f64>,
    pieces: Vec<PieceFn>,
}

impl fmt::Debug for Piecewise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Piecewise")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

impl Piecewise {
    pub fn new(support: Support, breakpoints: Vec<f64>, pieces: Vec<PieceFn>) -> Result<Self, DistribError> {
        validate_breakpoints(support, &breakpoints)?;
        if pieces.len() != breakpoints.len() + 1 {
            return Err(DistribError::PieceCount {
                expected: breakpoints.len() + 1,
                breakpoints: breakpoints.len(),
                got: pieces.len(),
            });
        }
        Ok(Piecewise { support, breakpoints, pieces })
    }

    pub fn radial(breakpoints: Vec<f64>, pieces: Vec<PieceFn>) -> Result<Self, DistribError> {
        Self::new(Support::Radial, breakpoints, pieces)
    }

    pub fn line(breakpoints: Vec<f64>, pieces: Vec<PieceFn>) -> Result<Self, DistribError> {
        Self::new(Support::Line, breakpoints, pieces)
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn jet(&self, x: f64) -> Jet {
        (self.pieces[piece_index(&self.breakpoints, x)])(x)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).value
    }

    /// Jet of the piece to the left of breakpoint `i`, evaluated at it.
    fn jet_left(&self, i: usize) -> Jet {
        (self.pieces[i])(self.breakpoints[i])
    }

    fn jet_right(&self, i: usize) -> Jet {
        (self.pieces[i + 1])(self.breakpoints[i])
    }

    fn check_continuity(&self) -> Result<(), DistribError> {
        for i in 0..self.breakpoints.len() {
            let left = self.jet_left(i).value;
            let right = self.jet_right(i).value;
            let scale = left.abs().max(right.abs());
            if (left - right).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) && left != right {
                return Err(DistribError::Discontinuous { at: self.breakpoints[i], left, right });
            }
        }
        Ok(())
    }

    /// Characteristic length at breakpoint `i` used for the jump stencil.
    fn stencil_step(&self, i: usize) -> f64 {
        let at = self.breakpoints[i];
        match self.support {
            Support::Radial => JUMP_STEP * at,
            Support::Line => {
                let mut scale: f64 = 1.0;
                for jet in [self.jet_left(i), self.jet_right(i)] {
                    if jet.d1 != 0.0 && jet.d2 != 0.0 {
                        scale = scale.min((jet.d1 / jet.d2).abs());
                    }
                }
                if i > 0 {
                    scale = scale.min(0.25 * (at - self.breakpoints[i - 1]));
                }
                if i + 1 < self.breakpoints.len() {
                    scale = scale.min(0.25 * (self.breakpoints[i + 1] - at));
                }
                JUMP_STEP * scale
            }
        }
    }
}

/// Analytic and finite-difference values of `f'(B⁺) − f'(B⁻)` at one
/// breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCheck {
    pub location: f64,
    pub analytic: f64,
    pub finite_difference: f64,
}

impl JumpCheck {
    pub fn relative_difference(&self) -> f64 {
        (self.analytic - self.finite_difference).abs() / self.analytic.abs().max(f64::MIN_POSITIVE)
    }
}

/// Jumps of the first derivative at every breakpoint of `f`, each computed
/// from the pieces' analytic derivatives and from one-sided four-point
/// stencils that sample only one piece.
pub fn derivative_jumps(f: &Piecewise) -> Result<Vec<JumpCheck>, DistribError> {
    f.check_continuity()?;
    let mut checks = Vec::with_capacity(f.breakpoints.len());
    for i in 0..f.breakpoints.len() {
        let at = f.breakpoints[i];
        let (left, right) = (f.jet_left(i), f.jet_right(i));
        let analytic = right.d1 - left.d1;

        let h = f.stencil_step(i);
        let left_piece = &f.pieces[i];
        let right_piece = &f.pieces[i + 1];
        let mut d_right = 0.0;
        let mut d_left = 0.0;
        for (offset, weight) in STENCIL.iter().zip(STENCIL_WEIGHTS) {
            d_right += weight * right_piece(at + offset * h).value;
            d_left -= weight * left_piece(at - offset * h).value;
        }
        let finite_difference = (d_right - d_left) / h;

        let scale = analytic.abs().max(left.d1.abs()).max(right.d1.abs());
        if (analytic - finite_difference).abs() > JUMP_AGREEMENT * scale {
            return Err(DistribError::JumpMismatch { at, analytic, finite_difference });
        }
        checks.push(JumpCheck { location: at, analytic, finite_difference });
    }
    Ok(checks)
}

/// Value-only piecewise density: the regular part of a distribution.
#[derive(Clone)]
pub struct RegularPart {
    support: Support,
    breakpoints: Vec<f64>,
    pieces: Vec<DensityFn>,
}

impl fmt::Debug for RegularPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegularPart").field("support", &self.support).field("breakpoints", &self.breakpoints).finish()
    }
}

impl RegularPart {
    pub fn new(support: Support, breakpoints: Vec<f64>, pieces: Vec<DensityFn>) -> Result<Self, DistribError> {
        validate_breakpoints(support, &breakpoints)?;
        if pieces.len() != breakpoints.len() + 1 {
            return Err(DistribError::PieceCount {
                expected: breakpoints.len() + 1,
                breakpoints: breakpoints.len(),
                got: pieces.len(),
            });
        }
        Ok(RegularPart { support, breakpoints, pieces })
    }

    pub fn smooth(support: Support, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RegularPart { support, breakpoints: Vec::new(), pieces: vec![Arc::new(f)] }
    }

    pub fn zero(support: Support) -> Self {
        Self::smooth(support, |_| 0.0)
    }

    /// The values of `f` itself (dropping its derivative information).
    pub fn from_piecewise(f: &Piecewise) -> Self {
        let pieces = f
            .pieces
            .iter()
            .map(|p| {
                let p = Arc::clone(p);
                Arc::new(move |x: f64| p(x).value) as DensityFn
            })
            .collect();
        RegularPart { support: f.support, breakpoints: f.breakpoints.clone(), pieces }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.pieces[piece_index(&self.breakpoints, x)])(x)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let p = Arc::clone(p);
                Arc::new(move |x: f64| factor * p(x)) as DensityFn
            })
            .collect();
        RegularPart { support: self.support, breakpoints: self.breakpoints.clone(), pieces }
    }

    /// Pointwise sum; the breakpoint sets are merged.
    pub fn add(&self, other: &RegularPart) -> Result<Self, DistribError> {
        if self.support != other.support {
            return Err(DistribError::WrongSupport { expected: self.support });
        }
        let mut breakpoints: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let mut pieces = Vec::with_capacity(breakpoints.len() + 1);
        for k in 0..=breakpoints.len() {
            // any interior point of the k-th merged interval identifies the
            // pieces of both operands
            let probe = match (k.checked_sub(1).map(|j| breakpoints[j]), breakpoints.get(k)) {
                (None, None) => 0.0,
                (None, Some(&hi)) => match self.support {
                    Support::Line => hi - 1.0,
                    Support::Radial => 0.5 * hi,
                },
                (Some(lo), None) => lo + 1.0,
                (Some(lo), Some(&hi)) => 0.5 * (lo + hi),
            };
            let a = Arc::clone(&self.pieces[piece_index(&self.breakpoints, probe)]);
            let b = Arc::clone(&other.pieces[piece_index(&other.breakpoints, probe)]);
            pieces.push(Arc::new(move |x: f64| a(x) + b(x)) as DensityFn);
        }
        Ok(RegularPart { support: self.support, breakpoints, pieces })
    }
}

/// Location of a delta atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomKind {
    /// `δ(x − location)` on the line, or `δ(x)` at the origin of the plane
    /// (location 0).
    Point(f64),
    /// Uniform line measure on the circle `r = radius`.
    Circle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaAtom {
    pub kind: AtomKind,
    pub weight: f64,
}

impl DeltaAtom {
    pub fn point(location: f64, weight: f64) -> Self {
        DeltaAtom { kind: AtomKind::Point(location), weight }
    }

    pub fn origin(weight: f64) -> Self {
        Self::point(0.0, weight)
    }

    pub fn circle(radius: f64, weight: f64) -> Self {
        DeltaAtom { kind: AtomKind::Circle(radius), weight }
    }
}

/// Regular density plus delta atoms. Atoms are kept with distinct
/// locations; adding an atom at an occupied location merges the weights.
#[derive(Debug, Clone)]
pub struct DistributionSum {
    regular: RegularPart,
    atoms: Vec<DeltaAtom>,
}

impl DistributionSum {
    pub fn new(regular: RegularPart, atoms: Vec<DeltaAtom>) -> Result<Self, DistribError> {
        let mut sum = DistributionSum { regular, atoms: Vec::new() };
        for atom in atoms {
            sum.push_atom(atom)?;
        }
        Ok(sum)
    }

    pub fn atoms_only(support: Support, atoms: Vec<DeltaAtom>) -> Result<Self, DistribError> {
        Self::new(RegularPart::zero(support), atoms)
    }

    pub fn support(&self) -> Support {
        self.regular.support
    }

    pub fn regular(&self) -> &RegularPart {
        &self.regular
    }

    pub fn atoms(&self) -> &[DeltaAtom] {
        &self.atoms
    }

    pub fn push_atom(&mut self, atom: DeltaAtom) -> Result<(), DistribError> {
        match (self.support(), atom.kind) {
            (Support::Radial, AtomKind::Point(x)) if x != 0.0 => return Err(DistribError::OffOriginPoint(x)),
            (Support::Line, AtomKind::Circle(_)) => {
                return Err(DistribError::WrongSupport { expected: Support::Radial })
            }
            (_, AtomKind::Circle(r)) if !(r > 0.0 && r.is_finite()) => return Err(DistribError::InvalidCircle(r)),
            _ => {}
        }
        if let Some(existing) = self.atoms.iter_mut().find(|a| a.kind == atom.kind) {
            existing.weight += atom.weight;
        } else {
            self.atoms.push(atom);
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        DistributionSum {
            regular: self.regular.scale(factor),
            atoms: self.atoms.iter().map(|a| DeltaAtom { kind: a.kind, weight: factor * a.weight }).collect(),
        }
    }

    pub fn add(&self, other: &DistributionSum) -> Result<Self, DistribError> {
        let mut sum = DistributionSum { regular: self.regular.add(&other.regular)?, atoms: self.atoms.clone() };
        for &atom in &other.atoms {
            sum.push_atom(atom)?;
        }
        Ok(sum)
    }

    /// Adds a regular density term.
    pub fn add_regular(&self, regular: &RegularPart) -> Result<Self, DistribError> {
        Ok(DistributionSum { regular: self.regular.add(regular)?, atoms: self.atoms.clone() })
    }
}

/// `f''` in the sense of distributions for a continuous piecewise-smooth
/// `f` on the line: the classical second derivative off the breakpoints
/// plus `[f'](B) δ(x − B)` at every breakpoint `B`.
pub fn distributional_second_derivative_1d(f: &Piecewise) -> Result<DistributionSum, DistribError> {
    if f.support != Support::Line {
        return Err(DistribError::WrongSupport { expected: Support::Line });
    }
    let jumps = derivative_jumps(f)?;
    let pieces = f
        .pieces
        .iter()
        .map(|p| {
            let p = Arc::clone(p);
            Arc::new(move |x: f64| p(x).d2) as DensityFn
        })
        .collect();
    let regular = RegularPart::new(Support::Line, f.breakpoints.clone(), pieces)?;
    let atoms = jumps.iter().filter(|j| j.analytic != 0.0).map(|j| DeltaAtom::point(j.location, j.analytic)).collect();
    DistributionSum::new(regular, atoms)
}

/// `Δf` in the sense of distributions for a continuous radial
/// piecewise-smooth `f` on `R²`: `f'' + f'/r` off the breakpoints plus a
/// circle layer `[∂_r f](R) δ(r − R)` at every breakpoint `R`.
///
/// The pieces must be regular at the origin (`r f'(r) → 0`), which rules out
/// a point mass there.
pub fn distributional_laplacian_radial(f: &Piecewise) -> Result<DistributionSum, DistribError> {
    if f.support != Support::Radial {
        return Err(DistribError::WrongSupport { expected: Support::Radial });
    }
    let jumps = derivative_jumps(f)?;
    let pieces = f
        .pieces
        .iter()
        .map(|p| {
            let p = Arc::clone(p);
            Arc::new(move |r: f64| {
                let jet = p(r);
                jet.d2 + jet.d1 / r
            }) as DensityFn
        })
        .collect();
    let regular = RegularPart::new(Support::Radial, f.breakpoints.clone(), pieces)?;
    let atoms = jumps.iter().filter(|j| j.analytic != 0.0).map(|j| DeltaAtom::circle(j.location, j.analytic)).collect();
    DistributionSum::new(regular, atoms)
}

/// A function that can stand in the right slot of a bracket: compactly
/// supported in the closed ball `|x − center| ≤ radius`.
pub trait TestFunction<const D: usize> {
    fn value(&self, x: [f64; D]) -> f64;
    fn center(&self) -> [f64; D];
    fn radius(&self) -> f64;
    /// True when the function depends on `|x|` only.
    fn is_radial_about_origin(&self) -> bool {
        false
    }
}

/// Bump profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `e^{−1/(1−s²)}` in the scaled distance `s = |x − c|/ρ`.
    Canonical,
    /// Equal to the amplitude on `|x − c| ≤ inner`, then a smooth step
    /// (built from `e^{−1/t}`) down to zero at the outer radius.
    Plateau { inner: f64 },
}

/// Smooth compactly supported test function with analytic value, gradient
/// and Laplacian. `amplitude` is the value at the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFunction<const D: usize> {
    center: [f64; D],
    radius: f64,
    amplitude: f64,
    profile: Profile,
}

/// Radial profile derivatives `(φ, dφ/dρ, d²φ/dρ²)` as a function of
/// distance `ρ` from the center.
fn profile_jet(profile: Profile, radius: f64, rho: f64) -> (f64, f64, f64) {
    if rho >= radius {
        return (0.0, 0.0, 0.0);
    }
    match profile {
        Profile::Canonical => {
            // g(u) = e^{1 − 1/(1−u)}, u = (ρ/radius)²; normalized to g(0) = 1
            let u = (rho / radius).powi(2);
            let w = 1.0 - u;
            if w < 1.0 / 600.0 {
                return (0.0, 0.0, 0.0);
            }
            let g = (1.0 - 1.0 / w).exp();
            let g1 = -g / (w * w);
            let g2 = g * (2.0 * u - 1.0) / w.powi(4);
            let du = 2.0 * rho / (radius * radius);
            let duu = 2.0 / (radius * radius);
            (g, g1 * du, g2 * du * du + g1 * duu)
        }
        Profile::Plateau { inner } => {
            if rho <= inner {
                return (1.0, 0.0, 0.0);
            }
            let width = radius - inner;
            let v = (rho - inner) / width;
            let (a, a1, a2) = step_bump(1.0 - v);
            let (b, b1, b2) = step_bump(v);
            // S = a/(a + b) with a = f(1 − v), b = f(v)
            let a1 = -a1;
            let d = a + b;
            let n = a1 * b - a * b1;
            let n1 = a2 * b - a * b2;
            let d1 = a1 + b1;
            let s = a / d;
            let s1 = n / (d * d);
            let s2 = n1 / (d * d) - 2.0 * n * d1 / (d * d * d);
            (s, s1 / width, s2 / (width * width))
        }
    }
}

/// `f(z) = e^{−1/z}` and its first two derivatives for `z > 0`.
fn step_bump(z: f64) -> (f64, f64, f64) {
    if z < 1.0 / 600.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / z).exp();
    (f, f / (z * z), f * (1.0 - 2.0 * z) / z.powi(4))
}

impl<const D: usize> BumpTestFunction<D> {
    pub fn new(center: [f64; D], radius: f64, amplitude: f64) -> Result<Self, DistribError> {
        Self::with_profile(center, radius, amplitude, Profile::Canonical)
    }

    pub fn plateau(center: [f64; D], inner: f64, radius: f64, amplitude: f64) -> Result<Self, DistribError> {
        Self::with_profile(center, radius, amplitude, Profile::Plateau { inner })
    }

    pub fn with_profile(center: [f64; D], radius: f64, amplitude: f64, profile: Profile) -> Result<Self, DistribError> {
        if !(D == 1 || D == 2) {
            return Err(DistribError::InvalidTestFunction("dimension must be 1 or 2"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DistribError::InvalidTestFunction("radius must be positive and finite"));
        }
        if !amplitude.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(DistribError::InvalidTestFunction("center and amplitude must be finite"));
        }
        if let Profile::Plateau { inner } = profile {
            if !(inner > 0.0 && inner < radius) {
                return Err(DistribError::InvalidTestFunction("plateau radius must lie in (0, radius)"));
            }
        }
        Ok(BumpTestFunction { center, radius, amplitude, profile })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    fn offset(&self, x: [f64; D]) -> ([f64; D], f64) {
        let mut d = [0.0; D];
        let mut rho2 = 0.0;
        for i in 0..D {
            d[i] = x[i] - self.center[i];
            rho2 += d[i] * d[i];
        }
        (d, rho2.sqrt())
    }

    pub fn gradient(&self, x: [f64; D]) -> [f64; D] {
        let (d, rho) = self.offset(x);
        let (_, p1, _) = profile_jet(self.profile, self.radius, rho);
        let mut grad = [0.0; D];
        if rho > 0.0 {
            for i in 0..D {
                grad[i] = self.amplitude * p1 * d[i] / rho;
            }
        }
        grad
    }

    /// `Δφ = φ_ρρ + (D − 1) φ_ρ / ρ`; in one dimension this is `φ''`.
    pub fn laplacian(&self, x: [f64; D]) -> f64 {
        let (_, rho) = self.offset(x);
        let (_, p1, p2) = profile_jet(self.profile, self.radius, rho);
        if rho == 0.0 || D == 1 {
            // at the center the profile is even: φ_ρ/ρ → φ_ρρ
            let angular = if D == 1 { 0.0 } else { (D - 1) as f64 * p2 };
            return self.amplitude * (p2 + angular);
        }
        self.amplitude * (p2 + (D - 1) as f64 * p1 / rho)
    }
}

impl<const D: usize> TestFunction<D> for BumpTestFunction<D> {
    fn value(&self, x: [f64; D]) -> f64 {
        let (_, rho) = self.offset(x);
        self.amplitude * profile_jet(self.profile, self.radius, rho).0
    }

    fn center(&self) -> [f64; D] {
        self.center
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn is_radial_about_origin(&self) -> bool {
        self.center.iter().all(|&c| c == 0.0)
    }
}

/// A square-integrable function used in place of a test function,
/// truncated to the ball `|x − center| ≤ radius` for quadrature.
pub struct ProxyTestFunction<F, const D: usize> {
    f: F,
    center: [f64; D],
    radius: f64,
    radial: bool,
}

impl<F: Fn([f64; D]) -> f64, const D: usize> ProxyTestFunction<F, D> {
    pub fn new(f: F, center: [f64; D], radius: f64) -> Self {
        ProxyTestFunction { f, center, radius, radial: false }
    }

    /// Marks the proxy as depending only on `|x|` (centered at the origin).
    pub fn radial(f: F, radius: f64) -> Self {
        ProxyTestFunction { f, center: [0.0; D], radius, radial: true }
    }
}

impl<F: Fn([f64; D]) -> f64, const D: usize> TestFunction<D> for ProxyTestFunction<F, D> {
    fn value(&self, x: [f64; D]) -> f64 {
        (self.f)(x)
    }

    fn center(&self) -> [f64; D] {
        self.center
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn is_radial_about_origin(&self) -> bool {
        self.radial
    }
}

fn point<const D: usize>(coords: [f64; 2]) -> [f64; D] {
    std::array::from_fn(|i| coords[i])
}

/// Schwartz bracket `⟨T, φ⟩`: the regular part integrated against `φ` plus
/// `weight·φ(location)` for point atoms and `weight·∮_{r=R} φ ds` for circle
/// layers.
pub fn bracket<const D: usize, P: TestFunction<D>>(
    dist: &DistributionSum,
    phi: &P,
    tol: f64,
) -> Result<f64, DistribError> {
    match (D, dist.support()) {
        (1, Support::Line) => bracket_line(dist, phi, tol),
        (2, Support::Radial) => bracket_radial(dist, phi, tol),
        (dim, support) => Err(DistribError::DimensionMismatch { dim, support }),
    }
}

fn bracket_line<const D: usize, P: TestFunction<D>>(
    dist: &DistributionSum,
    phi: &P,
    tol: f64,
) -> Result<f64, DistribError> {
    let c = phi.center()[0];
    let rho = phi.radius();
    let regular = dist.regular();
    let integrand = |x: f64| regular.value(x) * phi.value(point([x, 0.0]));
    let mut total = quad::integrate_with_breakpoints(integrand, c - rho, c + rho, regular.breakpoints(), tol)?.value;
    for atom in dist.atoms() {
        if let AtomKind::Point(x) = atom.kind {
            total += atom.weight * phi.value(point([x, 0.0]));
        }
    }
    Ok(total)
}

fn bracket_radial<const D: usize, P: TestFunction<D>>(
    dist: &DistributionSum,
    phi: &P,
    tol: f64,
) -> Result<f64, DistribError> {
    let g = |x: [f64; 2]| phi.value(point(x));
    let c = phi.center();
    let center = [c[0], c[1]];
    let regular = dist.regular();
    let mut total = pair_radial(
        &|r| regular.value(r),
        regular.breakpoints(),
        &g,
        center,
        phi.radius(),
        phi.is_radial_about_origin(),
        tol,
    )?;
    for atom in dist.atoms() {
        total += match atom.kind {
            AtomKind::Point(_) => atom.weight * g([0.0, 0.0]),
            AtomKind::Circle(r) => {
                atom.weight * r * angular_integral(&g, center, phi.radius(), r, phi.is_radial_about_origin(), tol)?
            }
        };
    }
    Ok(total)
}

/// `|⟨f'', φ⟩ − ∫ f φ''|`: the integration-by-parts identity that defines
/// the distributional second derivative.
pub fn duality_defect(f: &Piecewise, phi: &BumpTestFunction<1>, tol: f64) -> Result<f64, DistribError> {
    let lhs = bracket(&distributional_second_derivative_1d(f)?, phi, tol)?;
    let (c, rho) = (phi.center[0], phi.radius);
    let rhs =
        quad::integrate_with_breakpoints(|x| f.value(x) * phi.laplacian([x]), c - rho, c + rho, &f.breakpoints, tol)?
            .value;
    Ok((lhs - rhs).abs())
}

/// `∫_0^{2π} g(r cos θ, r sin θ) dθ` restricted to the arc inside the
/// support disk of `g`.
fn angular_integral(
    g: &dyn Fn([f64; 2]) -> f64,
    center: [f64; 2],
    support: f64,
    r: f64,
    radial: bool,
    tol: f64,
) -> Result<f64, DistribError> {
    if r == 0.0 || radial {
        return Ok(2.0 * PI * g([r, 0.0]));
    }
    let d = center[0].hypot(center[1]);
    let on_circle = |theta: f64| g([r * theta.cos(), r * theta.sin()]);
    if r + d <= support {
        // the whole circle lies inside the support
        return Ok(quad::integrate_finite(on_circle, 0.0, 2.0 * PI, tol)?.value);
    }
    if r <= d - support || r >= d + support || d == 0.0 {
        return Ok(0.0);
    }
    let cos_half = ((r * r + d * d - support * support) / (2.0 * r * d)).clamp(-1.0, 1.0);
    let half = cos_half.acos();
    let theta_c = center[1].atan2(center[0]);
    Ok(quad::integrate_finite(on_circle, theta_c - half, theta_c + half, tol)?.value)
}

/// `∫_{R²} f(|x|) g(x) dx` for `g` supported in the disk of the given center
/// and radius, computed in polar coordinates about the origin.
fn pair_radial(
    f: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    g: &dyn Fn([f64; 2]) -> f64,
    center: [f64; 2],
    support: f64,
    radial: bool,
    tol: f64,
) -> Result<f64, DistribError> {
    let d = center[0].hypot(center[1]);
    let r_lo = (d - support).max(0.0);
    let r_hi = d + support;
    let mut cuts: Vec<f64> = breakpoints.to_vec();
    if support > d {
        cuts.push(support - d);
    }
    let inner_tol = (0.1 * tol / (2.0 * PI * r_hi)).max(1e-15);
    let mut failure = None;
    let integrand = |r: f64| -> f64 {
        match angular_integral(g, center, support, r, radial, inner_tol) {
            Ok(a) => f(r) * a * r,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let result = {
        let cell = std::cell::RefCell::new(integrand);
        quad::integrate_with_breakpoints(|r| (cell.borrow_mut())(r), r_lo, r_hi, &cuts, tol)?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(result.value)
}

/// Normalization of the unit-mass mollifier `C e^{−1/(1−|y|²)}` on the unit
/// disk of `R²`.
fn mollifier_constant() -> f64 {
    static CONSTANT: OnceLock<f64> = OnceLock::new();
    *CONSTANT.get_or_init(|| {
        let mass =
            quad::integrate_finite(|s| 2.0 * PI * s * profile_jet(Profile::Canonical, 1.0, s).0, 0.0, 1.0, 1e-15)
                .expect("mollifier mass integral converges")
                .value;
        // profile_jet is normalized to 1 at the center: e^{1 − 1/(1 − s²)}
        1.0 / mass
    })
}

/// Unit-mass radial mollifier of width `eps` on `R²`, as a function of `|y|`.
pub fn mollifier(eps: f64, s: f64) -> f64 {
    mollifier_constant() / (eps * eps) * profile_jet(Profile::Canonical, eps, s).0
}

/// L² distances `‖φ_n − ψ‖₂` for `φ_n = (ψ·1_{|x|<n}) ∗ η_{1/n}` on `R²`,
/// one per entry of `n_values`.
pub fn mollifier_sequence_check(psi: &Piecewise, n_values: &[u32]) -> Result<Vec<f64>, DistribError> {
    if psi.support != Support::Radial {
        return Err(DistribError::WrongSupport { expected: Support::Radial });
    }
    n_values.iter().map(|&n| mollified_distance(psi, n)).collect()
}

fn mollified_distance(psi: &Piecewise, n: u32) -> Result<f64, DistribError> {
    const TOL: f64 = 1e-12;
    let cutoff = n as f64;
    let eps = 1.0 / cutoff;
    // ψ truncated at the cutoff; the cutoff is one more kink circle
    let kinks: Vec<f64> = psi.breakpoints.iter().copied().filter(|&b| b < cutoff).chain([cutoff]).collect();
    let truncated = |r: f64| if r < cutoff { psi.value(r) } else { 0.0 };

    let mut failure: Option<DistribError> = None;
    let mut mollified = |r: f64| -> f64 {
        match convolve_at(&truncated, &kinks, eps, r, TOL) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };

    let mut outer_cuts = Vec::new();
    for &k in &kinks {
        outer_cuts.extend([k - eps, k, k + eps]);
    }
    outer_cuts.retain(|&c| c > 0.0);
    let reach = cutoff + eps;
    let near = {
        let cell = std::cell::RefCell::new(|r: f64| {
            let diff = mollified(r) - psi.value(r);
            2.0 * PI * r * diff * diff
        });
        quad::integrate_with_breakpoints(|r| (cell.borrow_mut())(r), 0.0, reach, &outer_cuts, TOL)?.value
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let tail_breaks: Vec<f64> = psi.breakpoints.iter().copied().filter(|&b| b > reach).collect();
    let tail = quad::integrate_with_breakpoints(
        |r| {
            let v = psi.value(reach + r);
            2.0 * PI * (reach + r) * v * v
        },
        0.0,
        1.0,
        &tail_breaks.iter().map(|b| b - reach).collect::<Vec<_>>(),
        TOL,
    )?
    .value
        + quad::integrate_semiinfinite(
            |r| {
                let v = psi.value(r);
                2.0 * PI * r * v * v
            },
            reach + 1.0,
            TOL,
        )?
        .value;
    Ok((near + tail).max(0.0).sqrt())
}

/// `(f ∗ η_ε)(x)` at `|x| = r` for radial `f` with kinks on the given circles.
fn convolve_at(f: &dyn Fn(f64) -> f64, kinks: &[f64], eps: f64, r: f64, tol: f64) -> Result<f64, DistribError> {
    // |x − y| for |y| = s at angle θ from x: √(r² + s² − 2rs cos θ);
    // symmetric in θ, so integrate θ ∈ [0, π] and double.
    let mut failure: Option<DistribError> = None;
    let mut shell = |s: f64| -> f64 {
        let dist = |theta: f64| (r * r + s * s - 2.0 * r * s * theta.cos()).max(0.0).sqrt();
        let mut cuts = Vec::new();
        if r > 0.0 && s > 0.0 {
            for &k in kinks {
                let c = (r * r + s * s - k * k) / (2.0 * r * s);
                if c > -1.0 && c < 1.0 {
                    cuts.push(c.acos());
                }
            }
        }
        match quad::integrate_with_breakpoints(|t| f(dist(t)), 0.0, PI, &cuts, tol) {
            Ok(q) => 2.0 * q.value * mollifier(eps, s) * s,
            Err(e) => {
                failure.get_or_insert(e.into());
                0.0
            }
        }
    };
    let s_cuts: Vec<f64> = kinks.iter().map(|&k| (k - r).abs()).filter(|&c| c > 0.0 && c < eps).collect();
    let value = {
        let cell = std::cell::RefCell::new(&mut shell);
        quad::integrate_with_breakpoints(|s| (cell.borrow_mut())(s), 0.0, eps, &s_cuts, tol)?.value
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Normalization of the fundamental solution `c·K₀(b|x|)` of
/// `−Δψ + b²ψ = δ` on `R²`.
pub const FUNDAMENTAL_SOLUTION_NORMALIZATION: f64 = 1.0 / (2.0 * PI);

/// `⟨c·K₀(b|x|), (−Δ + b²)φ⟩` with `c` = [`FUNDAMENTAL_SOLUTION_NORMALIZATION`].
/// Equals `φ(0)` when `c K₀(b|x|)` is the fundamental solution.
pub fn fundamental_solution_check(b: f64, phi: &BumpTestFunction<2>, tol: f64) -> Result<f64, DistribError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(DistribError::InvalidTestFunction("Helmholtz parameter b must be positive"));
    }
    let kernel = move |r: f64| {
        let x = b * r;
        let k0 = if x < bessel::K_MIN_ARGUMENT {
            // leading small-argument behavior, below the kernel's domain
            -(0.5 * x).ln() - 0.577_215_664_901_532_9
        } else {
            bessel::k_unchecked(BesselOrder::Zero, x)
        };
        FUNDAMENTAL_SOLUTION_NORMALIZATION * k0
    };
    let helmholtz = |x: [f64; 2]| -phi.laplacian(x) + b * b * phi.value(x);
    pair_radial(&kernel, &[], &helmholtz, phi.center(), phi.radius(), phi.is_radial_about_origin(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn piece(f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> PieceFn {
        Arc::new(f)
    }

    #[test]
    fn abs_has_unit_kink_of_two() {
        let f = Piecewise::line(vec![0.0], vec![piece(|x| Jet::new(-x, -1.0, 0.0)), piece(|x| Jet::new(x, 1.0, 0.0))])
            .unwrap();
        let d2 = distributional_second_derivative_1d(&f).unwrap();
        assert_eq!(d2.atoms(), &[DeltaAtom::point(0.0, 2.0)]);
        assert_eq!(d2.regular().value(0.3), 0.0);
    }

    #[test]
    fn smooth_function_has_no_atoms() {
        let f = Piecewise::line(vec![], vec![piece(|x| Jet::new(x * x, 2.0 * x, 2.0))]).unwrap();
        let d2 = distributional_second_derivative_1d(&f).unwrap();
        assert!(d2.atoms().is_empty());
        assert_eq!(d2.regular().value(-1.7), 2.0);

        let g = Piecewise::radial(vec![], vec![piece(|r| Jet::new((-r * r).exp(), -2.0 * r * (-r * r).exp(), 0.0))])
            .unwrap();
        assert!(distributional_laplacian_radial(&g).unwrap().atoms().is_empty());
    }

    #[test]
    fn unit_kink_on_circle() {
        let f = Piecewise::radial(
            vec![1.0],
            vec![piece(|r| Jet::new(1.0 - r, -1.0, 0.0)), piece(|_| Jet::new(0.0, 0.0, 0.0))],
        )
        .unwrap();
        let lap = distributional_laplacian_radial(&f).unwrap();
        assert_eq!(lap.atoms().len(), 1);
        assert_eq!(lap.atoms()[0].kind, AtomKind::Circle(1.0));
        assert!((lap.atoms()[0].weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_jumps_in_value_and_origin_breakpoints() {
        let f =
            Piecewise::line(vec![0.0], vec![piece(|_| Jet::new(0.0, 0.0, 0.0)), piece(|_| Jet::new(1.0, 0.0, 0.0))])
                .unwrap();
        assert!(matches!(distributional_second_derivative_1d(&f), Err(DistribError::Discontinuous { .. })));
        assert!(matches!(
            Piecewise::radial(vec![0.0], vec![piece(|_| Jet::new(0.0, 0.0, 0.0)), piece(|_| Jet::new(0.0, 0.0, 0.0))]),
            Err(DistribError::InvalidBreakpoints { .. })
        ));
    }

    #[test]
    fn inconsistent_piece_derivatives_are_caught() {
        // claims f' = 5 while the values say f' = 1
        let f = Piecewise::line(vec![0.0], vec![piece(|x| Jet::new(x, 5.0, 0.0)), piece(|_| Jet::new(0.0, 0.0, 0.0))])
            .unwrap();
        assert!(matches!(derivative_jumps(&f), Err(DistribError::JumpMismatch { .. })));
    }

    #[test]
    fn sifting_and_line_measure() {
        let phi = BumpTestFunction::new([0.0, 0.0], 2.0, 1.0).unwrap();
        let point = DistributionSum::atoms_only(Support::Radial, vec![DeltaAtom::origin(1.0)]).unwrap();
        assert_eq!(bracket(&point, &phi, 1e-12).unwrap(), 1.0);

        let layer = DistributionSum::atoms_only(Support::Radial, vec![DeltaAtom::circle(1.0, 1.0)]).unwrap();
        let expected = 2.0 * PI * phi.value([1.0, 0.0]);
        assert!((bracket(&layer, &phi, 1e-12).unwrap() - expected).abs() < 1e-14);

        // same layer against an off-center bump: quadrature over the arc
        let shifted = BumpTestFunction::new([0.5, 0.2], 2.0, 1.0).unwrap();
        let direct = quad::integrate_finite(|t| shifted.value([t.cos(), t.sin()]), 0.0, 2.0 * PI, 1e-13).unwrap().value;
        assert!((bracket(&layer, &shifted, 1e-12).unwrap() - direct).abs() < 1e-11);
    }

    #[test]
    fn atoms_merge_and_validate() {
        let mut t = DistributionSum::atoms_only(Support::Radial, vec![DeltaAtom::circle(1.0, 1.0)]).unwrap();
        t.push_atom(DeltaAtom::circle(1.0, 2.0)).unwrap();
        assert_eq!(t.atoms(), &[DeltaAtom::circle(1.0, 3.0)]);
        assert!(t.push_atom(DeltaAtom::point(0.5, 1.0)).is_err());
        assert!(t.push_atom(DeltaAtom::circle(-1.0, 1.0)).is_err());
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        for profile in [Profile::Canonical, Profile::Plateau { inner: 0.4 }] {
            let phi = BumpTestFunction::with_profile([0.1, -0.2], 1.3, 2.0, profile).unwrap();
            let h = 1e-4;
            for x in [[0.3, 0.1], [0.5, -0.6], [-0.2, 0.4]] {
                let f = |dx: f64, dy: f64| phi.value([x[0] + dx, x[1] + dy]);
                let gx = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
                let lap = (f(h, 0.0) + f(-h, 0.0) + f(0.0, h) + f(0.0, -h) - 4.0 * f(0.0, 0.0)) / (h * h);
                assert!((phi.gradient(x)[0] - gx).abs() < 1e-6, "{profile:?}");
                assert!((phi.laplacian(x) - lap).abs() < 1e-4, "{profile:?}");
            }
        }
        let one_d = BumpTestFunction::new([0.2], 1.0, 1.0).unwrap();
        let h = 1e-4;
        let f = |x: f64| one_d.value([x]);
        let second = (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h);
        assert!((one_d.laplacian([0.5]) - second).abs() < 1e-5);
    }

    #[test]
    fn bump_vanishes_outside_support_and_peaks_at_center() {
        let phi = BumpTestFunction::new([1.0], 0.5, 3.0).unwrap();
        assert_eq!(phi.value([1.0]), 3.0);
        assert_eq!(phi.value([1.5]), 0.0);
        assert_eq!(phi.value([0.2]), 0.0);
        let plateau = BumpTestFunction::plateau([0.0, 0.0], 1.0, 2.0, 1.0).unwrap();
        assert_eq!(plateau.value([0.6, 0.6]), 1.0);
        assert_eq!(plateau.value([2.0, 0.0]), 0.0);
        assert!(BumpTestFunction::plateau([0.0], 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn mollifier_has_unit_mass() {
        let eps = 0.25;
        let mass = quad::integrate_finite(|s| 2.0 * PI * s * mollifier(eps, s), 0.0, eps, 1e-14).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-13);
    }

    #[test]
    fn regular_parts_add_across_breakpoints() {
        let a = RegularPart::new(
            Support::Line,
            vec![0.0],
            vec![Arc::new(|_| 1.0) as DensityFn, Arc::new(|_| 2.0) as DensityFn],
        )
        .unwrap();
        let b = RegularPart::new(
            Support::Line,
            vec![1.0],
            vec![Arc::new(|_| 10.0) as DensityFn, Arc::new(|_| 20.0) as DensityFn],
        )
        .unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.breakpoints(), &[0.0, 1.0]);
        assert_eq!(s.value(-1.0), 11.0);
        assert_eq!(s.value(0.5), 12.0);
        assert_eq!(s.value(3.0), 22.0);
    }
}
