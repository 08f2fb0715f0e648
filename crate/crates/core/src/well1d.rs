//! The attractive delta well `−(ℏ²/2m)ψ'' − αδ(x)ψ = Eψ` on the line.
//!
//! Every estimator solves for the decay constant `b = √(2m|E|)/ℏ` of the
//! normalized trial state `ψ(x) = √b e^{−b|x|}`; the energy is always derived
//! as `E = −ℏ²b²/(2m)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::distrib::{
    self, BumpTestFunction, DeltaAtom, DistributionSum, Jet, PieceFn, Piecewise, ProxyTestFunction, RegularPart,
    Support, TestFunction,
};
use crate::quad;
use crate::roots;
use crate::Error;

/// Integrals over the line are truncated at `|x| = TRUNCATION / b`.
pub const TRUNCATION: f64 = 40.0;
/// Search range for the resolvent pole.
pub const POLE_SCAN_RANGE: (f64, f64) = (1e-8, 1e8);
/// Quadrature tolerance used by the estimators, relative to the scale of
/// the integrand.
const QUAD_TOL: f64 = 1e-13;
const ROOT_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params1D {
    hbar: f64,
    mass: f64,
    alpha: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64, Error> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be positive and finite" })
    }
}

impl Params1D {
    pub fn new(hbar: f64, mass: f64, alpha: f64) -> Result<Self, Error> {
        Ok(Params1D { hbar: positive("hbar", hbar)?, mass: positive("mass", mass)?, alpha: positive("alpha", alpha)? })
    }

    /// No potential (`α = 0`). Only meaningful for [`naive_form_defect`].
    pub fn free(hbar: f64, mass: f64) -> Result<Self, Error> {
        Ok(Params1D { hbar: positive("hbar", hbar)?, mass: positive("mass", mass)?, alpha: 0.0 })
    }

    pub fn unit() -> Self {
        Params1D { hbar: 1.0, mass: 1.0, alpha: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `E = −ℏ²b²/(2m)`.
    pub fn energy_from_b(&self, b: f64) -> f64 {
        -self.hbar * self.hbar * b * b / (2.0 * self.mass)
    }

    fn bound(&self) -> Result<(), Error> {
        if self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::NoSolution("the free particle (alpha = 0) has no bound state".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    ClosedForm,
    Integration,
    Distributional,
    QuadraticForm,
    ResolventPole,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::ClosedForm, Method::Integration, Method::Distributional, Method::QuadraticForm, Method::ResolventPole];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Integration => "integration",
            Method::Distributional => "distributional",
            Method::QuadraticForm => "quadratic_form",
            Method::ResolventPole => "resolvent_pole",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One estimator's answer. `energy` is always `−ℏ²b²/(2m)` of the reported `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub method: Method,
    pub energy: f64,
    pub b: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EnergyReport {
    fn new(p: &Params1D, method: Method, b: f64, diagnostics: BTreeMap<String, f64>) -> Self {
        EnergyReport { method, energy: p.energy_from_b(b), b, diagnostics }
    }
}

/// `√b e^{−b|x|}`, unit norm in `L²(R)`.
pub fn psi_1d(b: f64, x: f64) -> f64 {
    b.sqrt() * (-b * x.abs()).exp()
}

/// `ψ` as a piecewise-smooth function with its kink at the origin.
pub fn psi_1d_piecewise(b: f64) -> Piecewise {
    let s = b.sqrt();
    let left: PieceFn = Arc::new(move |x: f64| {
        let v = s * (b * x).exp();
        Jet::new(v, b * v, b * b * v)
    });
    let right: PieceFn = Arc::new(move |x: f64| {
        let v = s * (-b * x).exp();
        Jet::new(v, -b * v, b * b * v)
    });
    Piecewise::line(vec![0.0], vec![left, right]).expect("single breakpoint at the origin")
}

pub fn energy_closed_form(p: &Params1D) -> EnergyReport {
    let b = p.mass * p.alpha / (p.hbar * p.hbar);
    EnergyReport::new(p, Method::ClosedForm, b, BTreeMap::new())
}

/// The three terms of the integrated Schrödinger equation at trial `b`:
/// `−(ℏ²/2m)[ψ']_{−X}^{X}`, `−α⟨δ, ψ⟩` and `|E|∫ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedTerms {
    pub boundary: f64,
    pub delta: f64,
    pub energy: f64,
    pub integral_psi: f64,
}

impl IntegratedTerms {
    pub fn residual(&self) -> f64 {
        self.boundary + self.delta + self.energy
    }
}

pub fn integrated_terms(p: &Params1D, b: f64) -> Result<IntegratedTerms, Error> {
    let b = positive("b", b)?;
    let psi = psi_1d_piecewise(b);
    let x_max = TRUNCATION / b;
    let slope = |x: f64| psi.jet(x).d1;
    let boundary = -p.hbar * p.hbar / (2.0 * p.mass) * (slope(x_max) - slope(-x_max));

    let delta = DistributionSum::atoms_only(Support::Line, vec![DeltaAtom::point(0.0, 1.0)])?;
    let proxy = ProxyTestFunction::new(|x: [f64; 1]| psi.value(x[0]), [0.0], x_max);
    let delta_term = -p.alpha * distrib::bracket(&delta, &proxy, QUAD_TOL)?;

    let integral_psi =
        quad::integrate_with_breakpoints(|x| psi.value(x), -x_max, x_max, &[0.0], QUAD_TOL / b.sqrt())?.value;
    let energy = -p.energy_from_b(b) * integral_psi;
    Ok(IntegratedTerms { boundary, delta: delta_term, energy, integral_psi })
}

/// Solves the integrated equation `−(ℏ²/2m)[ψ'] − αψ(0) + |E|∫ψ = 0` for
/// `b`, every term evaluated numerically.
pub fn energy_integration(p: &Params1D, _tol: f64) -> Result<EnergyReport, Error> {
    p.bound()?;
    let residual = |b: f64| integrated_terms(p, b).map(|t| t.residual()).unwrap_or(f64::NAN);
    let b = solve_positive(residual)?;
    let terms = integrated_terms(p, b)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("boundary_term".into(), terms.boundary.abs());
    diagnostics.insert("delta_term".into(), terms.delta);
    diagnostics.insert("integral_psi".into(), terms.integral_psi);
    diagnostics.insert("integral_psi_error".into(), (terms.integral_psi - 2.0 / b.sqrt()).abs());
    diagnostics.insert("tail_bound".into(), 2.0 * (-TRUNCATION).exp() / b.sqrt());
    diagnostics.insert("residual".into(), terms.residual());
    Ok(EnergyReport::new(p, Method::Integration, b, diagnostics))
}

fn solve_positive(f: impl Fn(f64) -> f64) -> Result<f64, Error> {
    let bracket = roots::expand_bracket(&f, 1.0)?;
    Ok(roots::find_root(&f, bracket, ROOT_TOL)?)
}

/// `Hψ = −(ℏ²/2m)ψ'' − αψ(0)δ` as a distribution, at trial `b`.
pub fn h_psi(p: &Params1D, b: f64) -> Result<DistributionSum, Error> {
    let b = positive("b", b)?;
    let psi = psi_1d_piecewise(b);
    let kinetic = distrib::distributional_second_derivative_1d(&psi)?.scale(-p.hbar * p.hbar / (2.0 * p.mass));
    let potential = DistributionSum::atoms_only(Support::Line, vec![DeltaAtom::point(0.0, -p.alpha * psi.value(0.0))])?;
    Ok(kinetic.add(&potential)?)
}

/// `(⟨Hψ, φ⟩ + |E|⟨ψ, φ⟩) / (√b φ(0))` at trial `b`; vanishes exactly at the
/// bound state, where it equals `ℏ²b/m − α` in general.
pub fn distributional_coefficient<P: TestFunction<1>>(p: &Params1D, b: f64, phi: &P) -> Result<f64, Error> {
    let phi0 = phi.value([0.0]);
    if phi0 == 0.0 {
        return Err(Error::InadequateFamily("the origin"));
    }
    let energy = -p.energy_from_b(b);
    let psi = RegularPart::from_piecewise(&psi_1d_piecewise(b)).scale(energy);
    let total = h_psi(p, b)?.add_regular(&psi)?;
    let scale = b.sqrt() * phi0.abs() * (p.hbar * p.hbar * b / p.mass + p.alpha);
    let value = distrib::bracket(&total, phi, QUAD_TOL * scale)?;
    Ok(value / (b.sqrt() * phi0))
}

/// Bumps of radii 0.5, 1, 2, 4, 8, each covering the origin off-center.
pub fn default_bump_family() -> Vec<BumpTestFunction<1>> {
    [0.5, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let shift = if i % 2 == 0 { 0.2 } else { -0.3 };
            BumpTestFunction::new([shift * r], r, 1.0 + 0.25 * i as f64).expect("valid bump")
        })
        .collect()
}

/// Root of the bracket coefficient for every member of the family; the
/// roots must agree to `tol` (relative).
pub fn energy_distributional(p: &Params1D, family: &[BumpTestFunction<1>], tol: f64) -> Result<EnergyReport, Error> {
    p.bound()?;
    if family.is_empty() {
        return Err(Error::InadequateFamily("the origin"));
    }
    let mut roots_b = Vec::with_capacity(family.len());
    for phi in family {
        if phi.value([0.0]) == 0.0 {
            return Err(Error::InadequateFamily("the origin"));
        }
        let coefficient = |b: f64| distributional_coefficient(p, b, phi).unwrap_or(f64::NAN);
        roots_b.push(solve_positive(coefficient)?);
    }
    let spread = relative_spread(&roots_b);
    if spread > tol {
        return Err(Error::FamilyDisagreement { spread, tol, b_values: roots_b });
    }
    let b = roots_b.iter().sum::<f64>() / roots_b.len() as f64;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("family_spread".into(), spread);
    diagnostics.insert("family_size".into(), family.len() as f64);
    let trial = 2.0 * b;
    diagnostics.insert(
        "coefficient_at_2b_error".into(),
        (distributional_coefficient(p, trial, &family[0])? - (p.hbar * p.hbar * trial / p.mass - p.alpha)).abs(),
    );
    Ok(EnergyReport::new(p, Method::Distributional, b, diagnostics))
}

pub(crate) fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean.abs()
}

/// The quadratic form `⟨Hψ + |E|ψ, ψ⟩ / |ψ(0)|²` with `ψ` itself in the
/// test-function slot.
pub fn quadratic_form_coefficient(p: &Params1D, b: f64) -> Result<f64, Error> {
    let b = positive("b", b)?;
    let psi = psi_1d_piecewise(b);
    let proxy = ProxyTestFunction::new(move |x: [f64; 1]| psi.value(x[0]), [0.0], TRUNCATION / b);
    distributional_coefficient(p, b, &proxy)
}

pub fn energy_quadratic_form(p: &Params1D) -> Result<EnergyReport, Error> {
    p.bound()?;
    let b = solve_positive(|b| quadratic_form_coefficient(p, b).unwrap_or(f64::NAN))?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("psi0_sq".into(), psi_1d(b, 0.0).powi(2));
    diagnostics.insert("coefficient".into(), quadratic_form_coefficient(p, b)?);
    Ok(EnergyReport::new(p, Method::QuadraticForm, b, diagnostics))
}

/// `(Hψ, ψ) + |E|` with the classical second derivative `ψ'' = b²ψ` and
/// `α|ψ(0)|²` for the potential. Equals `−αb`.
pub fn naive_form_defect(p: &Params1D, b: f64) -> Result<f64, Error> {
    let b = positive("b", b)?;
    let psi = psi_1d_piecewise(b);
    let x_max = TRUNCATION / b;
    let classical =
        quad::integrate_with_breakpoints(|x| psi.value(x) * psi.jet(x).d2, -x_max, x_max, &[0.0], QUAD_TOL * b * b)?
            .value;
    let form = -p.hbar * p.hbar / (2.0 * p.mass) * classical - p.alpha * psi.value(0.0).powi(2);
    Ok(form - p.energy_from_b(b))
}

fn greens_denominator(p: &Params1D, b: f64) -> f64 {
    b * p.hbar * p.hbar - p.alpha * p.mass
}

fn check_pole(p: &Params1D, b: f64) -> Result<f64, Error> {
    let b = positive("b", b)?;
    let den = greens_denominator(p, b);
    let scale = (b * p.hbar * p.hbar).max(p.alpha * p.mass);
    if den.abs() <= 4.0 * f64::EPSILON * scale {
        return Err(Error::AtPole { pole: p.mass * p.alpha / (p.hbar * p.hbar) });
    }
    Ok(den)
}

/// `G(0) = m/(bℏ² − αm)`.
pub fn greens_at_origin(p: &Params1D, b: f64) -> Result<f64, Error> {
    Ok(p.mass / check_pole(p, b)?)
}

/// `G(x) = [m/(bℏ² − αm)] e^{−b|x|}`.
pub fn greens_function(p: &Params1D, b: f64, x: f64) -> Result<f64, Error> {
    Ok(greens_at_origin(p, b)? * (-b * x.abs()).exp())
}

/// `Ĝ(k) = (1 + αG(0)) / ((4π²ℏ²/2m)k² + |E|)`.
pub fn greens_fourier(p: &Params1D, b: f64, k: f64) -> Result<f64, Error> {
    let g0 = greens_at_origin(p, b)?;
    let kinetic = 4.0 * PI * PI * p.hbar * p.hbar / (2.0 * p.mass);
    Ok((1.0 + p.alpha * g0) / (kinetic * k * k - p.energy_from_b(b)))
}

/// `G(x) = ∫ Ĝ(k) cos(2πkx) dk` evaluated by quadrature.
pub fn greens_inverse_transform(p: &Params1D, b: f64, x: f64, tol: f64) -> Result<f64, Error> {
    let g0 = greens_at_origin(p, b)?;
    let a = b / (2.0 * PI);
    let prefactor = (1.0 + p.alpha * g0) * 2.0 * p.mass / (4.0 * PI * PI * p.hbar * p.hbar);
    Ok(prefactor * cosine_transform(a, x, tol / prefactor.abs())?)
}

/// Locates the zero of the denominator of `G` by scanning `b`.
pub fn energy_resolvent_pole(p: &Params1D, tol: f64) -> Result<EnergyReport, Error> {
    p.bound()?;
    let b = roots::pole_scan(|b| greens_denominator(p, b), POLE_SCAN_RANGE, ROOT_TOL.max(tol * 1e-6))?;
    let mut diagnostics = BTreeMap::new();
    let near = b * (1.0 + 1e-7);
    diagnostics.insert("abs_g0_near_pole".into(), greens_at_origin(p, near).map(f64::abs).unwrap_or(f64::INFINITY));
    diagnostics.insert("denominator".into(), greens_denominator(p, b));
    Ok(EnergyReport::new(p, Method::ResolventPole, b, diagnostics))
}

/// `∫_R cos(2πkx)/(k² + a²) dk`.
///
/// For `x ≠ 0` the integral over `[0, K]` is split at the zeros of the
/// cosine and the remaining tail is summed from its asymptotic
/// integration-by-parts series, with `K` far enough out that the series
/// converges to double precision.
pub fn cosine_transform(a: f64, x: f64, tol: f64) -> Result<f64, Error> {
    let a = positive("a", a)?;
    let g = |k: f64| 1.0 / (k * k + a * a);
    if x == 0.0 {
        return Ok(2.0 * quad::integrate_semiinfinite(g, 0.0, 0.5 * tol)?.value);
    }
    let omega = 2.0 * PI * x.abs();
    let half_period = PI / omega;
    let cutoff = (100.0 / omega).max(10.0 * a);
    let panels = (cutoff / half_period).ceil() as usize;
    let k_max = panels as f64 * half_period;
    let zeros: Vec<f64> = (0..panels).map(|j| (j as f64 + 0.5) * half_period).collect();
    let body = quad::integrate_with_breakpoints(|k| g(k) * (omega * k).cos(), 0.0, k_max, &zeros, 0.25 * tol)?.value;
    Ok(2.0 * (body + cosine_tail(a, omega, k_max)))
}

/// `∫_K^∞ cos(ωk)/(k² + a²) dk ≈ Re[−e^{iωK} Σ_j (−1)^j g^{(j)}(K)/(iω)^{j+1}]`
/// with `g^{(j)}(k) = (−1)^j j! Im[(k − ia)^{−(j+1)}]/a`.
fn cosine_tail(a: f64, omega: f64, k: f64) -> f64 {
    use num_complex::Complex64;
    let z = Complex64::new(k, -a);
    let i_omega = Complex64::new(0.0, omega);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut factorial = 1.0;
    let mut previous = f64::INFINITY;
    for j in 0..20 {
        if j > 0 {
            factorial *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let derivative = sign * factorial * (z.powi(-(j + 1))).im / a;
        let term = sign * derivative / i_omega.powi(j + 1);
        if term.norm() > previous {
            break;
        }
        previous = term.norm();
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    (-Complex64::from_polar(1.0, omega * k) * sum).re
}

/// Quadrature of the cosine integral minus `(π/a) e^{−2πa|x|}`.
pub fn fourier_identity_check(a: f64, x: f64, tol: f64) -> Result<f64, Error> {
    let closed = PI / a * (-2.0 * PI * a * x.abs()).exp();
    Ok(cosine_transform(a, x, tol)? - closed)
}

/// Every estimator at once.
pub fn all_methods(p: &Params1D, tol: f64) -> Result<Vec<EnergyReport>, Error> {
    Ok(vec![
        energy_closed_form(p),
        energy_integration(p, tol)?,
        energy_distributional(p, &default_bump_family(), tol)?,
        energy_quadratic_form(p)?,
        energy_resolvent_pole(p, tol)?,
    ])
}

/// Largest pairwise relative difference of the reported energies.
pub fn max_pairwise_deviation(reports: &[EnergyReport]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            worst = worst.max((a.energy - b.energy).abs() / a.energy.abs().max(b.energy.abs()));
        }
    }
    worst
}
