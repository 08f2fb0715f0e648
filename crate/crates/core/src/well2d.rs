//! The attractive delta well in the plane and its unique continuous radial
//! solution
//!
//! ```text
//! ψ_c(x) = N [I₀(b|x|) h(u₀ − b|x|) + K₀(b|x|) h(b|x| − u₀)],
//! N = 1/(√π R β),  β² = K₁(u₀)² − I₁(u₀)²,  bR = u₀,
//! ```
//!
//! where `u₀` is the crossing `I₀(u₀) = K₀(u₀)` and `R` is the free length
//! scale.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::bessel::{self, BesselOrder};
use crate::distrib::{
    self, AtomKind, BumpTestFunction, DeltaAtom, DistributionSum, Jet, PieceFn, Piecewise, RegularPart, Support,
};
use crate::quad;
use crate::roots;
use crate::well1d::relative_spread;
use crate::Error;

use BesselOrder::{One, Zero};

/// Radii closer than `GUARD_BAND·R` to the origin or to the matching circle
/// are rejected by [`helmholtz_residual`].
pub const GUARD_BAND: f64 = 1e-3;
const QUAD_TOL: f64 = 1e-13;

/// `u₀`, computed once to full double precision.
pub fn u0() -> f64 {
    static U0: OnceLock<f64> = OnceLock::new();
    *U0.get_or_init(|| roots::crossing_u0(1e-16).expect("I0 - K0 has a single crossing"))
}

/// `K₁(u₀)² − I₁(u₀)²`.
pub fn beta_sq(u0: f64) -> Result<f64, Error> {
    let k1 = bessel::bessel_k(One, u0)?;
    let i1 = bessel::bessel_i(One, u0)?;
    Ok(k1 * k1 - i1 * i1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params2D {
    hbar: f64,
    mass: f64,
    alpha: f64,
    radius: f64,
}

impl Params2D {
    pub fn new(hbar: f64, mass: f64, alpha: f64, radius: f64) -> Result<Self, Error> {
        let check = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidParameter { name, value: v, reason: "must be positive and finite" })
            }
        };
        if !(alpha.is_finite() && alpha != 0.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha, reason: "must be finite and nonzero" });
        }
        Ok(Params2D { hbar: check("hbar", hbar)?, mass: check("mass", mass)?, alpha, radius: check("R", radius)? })
    }

    /// Same constants with `α = 0`; there is then no C-spectrum.
    pub fn free(hbar: f64, mass: f64, radius: f64) -> Result<Self, Error> {
        let mut p = Self::new(hbar, mass, 1.0, radius)?;
        p.alpha = 0.0;
        Ok(p)
    }

    pub fn unit() -> Self {
        Params2D { hbar: 1.0, mass: 1.0, alpha: 1.0, radius: 1.0 }
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

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `b = u₀/R`.
    pub fn b(&self) -> f64 {
        u0() / self.radius
    }

    pub fn beta(&self) -> f64 {
        beta_sq(u0()).expect("u0 lies in the kernel domain").sqrt()
    }

    /// `N = 1/(√π R β)`.
    pub fn norm_constant(&self) -> f64 {
        1.0 / (PI.sqrt() * self.radius * self.beta())
    }

    /// `E = −ℏ²b²/(2m)` of the Helmholtz equation solved by `ψ_c`.
    pub fn helmholtz_energy(&self) -> f64 {
        let b = self.b();
        -self.hbar * self.hbar * b * b / (2.0 * self.mass)
    }
}

/// `ψ_c` with its derived constants.
#[derive(Debug, Clone)]
pub struct Psi2D {
    pub params: Params2D,
    pub u0: f64,
    pub beta: f64,
    pub b: f64,
    pub norm: f64,
    pub representation: Piecewise,
}

impl Psi2D {
    pub fn new(params: Params2D) -> Self {
        let (u0, b, norm, beta) = (u0(), params.b(), params.norm_constant(), params.beta());
        let inner: PieceFn = Arc::new(move |r: f64| {
            let x = b * r;
            let i0 = bessel::i_unchecked(Zero, x);
            let i1 = bessel::i_unchecked(One, x);
            // I₀'' = I₀ − I₁/x, with I₁(x)/x → 1/2
            let i1_over_x = if x < 1e-8 { 0.5 } else { i1 / x };
            Jet::new(norm * i0, norm * b * i1, norm * b * b * (i0 - i1_over_x))
        });
        let outer: PieceFn = Arc::new(move |r: f64| {
            let x = b * r;
            let k0 = bessel::k_unchecked(Zero, x);
            let k1 = bessel::k_unchecked(One, x);
            Jet::new(norm * k0, -norm * b * k1, norm * b * b * (k0 + k1 / x))
        });
        let representation = Piecewise::radial(vec![params.radius], vec![inner, outer]).expect("R is positive");
        Psi2D { params, u0, beta, b, norm, representation }
    }

    pub fn radial(&self, r: f64) -> f64 {
        self.representation.value(r)
    }

    /// Limits of `ψ_c` at `r = R` from inside and outside.
    pub fn limits_at_circle(&self) -> (f64, f64) {
        let x = self.u0;
        (self.norm * bessel::i_unchecked(Zero, x), self.norm * bessel::k_unchecked(Zero, x))
    }
}

pub fn psi_c(p: &Params2D, x: [f64; 2]) -> f64 {
    Psi2D::new(*p).radial(x[0].hypot(x[1]))
}

/// `∫_{R²} |ψ_c|²`.
pub fn norm_check(p: &Params2D, tol: f64) -> Result<f64, Error> {
    let psi = Psi2D::new(*p);
    Ok(quad::integrate_radial2d(|r| psi.radial(r).powi(2), &[p.radius], tol.min(1e-12))?.value)
}

/// `2π ∫_0^R I₀(br)² r dr` and `2π ∫_R^∞ K₀(br)² r dr`, the two pieces of
/// the unnormalized norm. Their sum is `πR²β²`.
pub fn normalization_pieces(p: &Params2D, tol: f64) -> Result<(f64, f64), Error> {
    let b = p.b();
    let r = p.radius;
    let inner = quad::integrate_finite(|s| 2.0 * PI * s * bessel::i_unchecked(Zero, b * s).powi(2), 0.0, r, tol)?;
    let outer = quad::integrate_semiinfinite(|s| 2.0 * PI * s * bessel::k_unchecked(Zero, b * s).powi(2), r, tol)?;
    Ok((inner.value, outer.value))
}

/// `(−ψ'' − ψ'/r + b²ψ) / max(|b²ψ|, 1)` at each radius from five-point
/// central differences on one piece.
pub fn helmholtz_residual(p: &Params2D, radii: &[f64]) -> Result<Vec<f64>, Error> {
    let (b, big_r) = (p.b(), p.radius);
    let norm = p.norm_constant();
    radii
        .iter()
        .map(|&r| {
            if !(r.is_finite() && r >= GUARD_BAND * big_r && (r - big_r).abs() >= GUARD_BAND * big_r) {
                return Err(Error::InvalidParameter {
                    name: "radius",
                    value: r,
                    reason: "inside a guard band around the origin or the matching circle",
                });
            }
            let h = (0.2 * r.min((r - big_r).abs())).min(0.01 * big_r);
            // samples of ψ divided by e^{∓br}, so the deep tail stays representable
            let (scaled, weight): (Box<dyn Fn(f64) -> f64>, f64) = if r < big_r {
                (Box::new(|s: f64| norm * bessel::i_scaled_unchecked(Zero, b * s) * (b * (s - r)).exp()), (b * r).exp())
            } else {
                (
                    Box::new(|s: f64| norm * bessel::k_scaled_unchecked(Zero, b * s) * (-b * (s - r)).exp()),
                    (-b * r).exp(),
                )
            };
            let f: Vec<f64> = (-2..=2).map(|j| scaled(r + j as f64 * h)).collect();
            let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
            let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
            let target = b * b * f[2];
            let numerator = -d2 - d1 / r + target;
            let magnitude = (target * weight).abs();
            Ok(numerator / target.abs() * (magnitude / magnitude.max(1.0)))
        })
        .collect()
}

/// Jump of `∂_r ψ_c` across `r = R` in three forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpWeights {
    /// `N b (−K₁(u₀) − I₁(u₀))` from `I₀' = I₁`, `K₀' = −K₁`.
    pub analytic: f64,
    /// One-sided stencil estimate.
    pub finite_difference: f64,
    /// `N b (K₁(u₀) − I₁(u₀))`, the combination printed in the corollary proof.
    pub paper_combination: f64,
}

pub fn jump_weight(p: &Params2D) -> Result<JumpWeights, Error> {
    let psi = Psi2D::new(*p);
    let check = distrib::derivative_jumps(&psi.representation)?[0];
    let (k1, i1) = (bessel::k_unchecked(One, psi.u0), bessel::i_unchecked(One, psi.u0));
    Ok(JumpWeights {
        analytic: psi.norm * psi.b * (-k1 - i1),
        finite_difference: check.finite_difference,
        paper_combination: psi.norm * psi.b * (k1 - i1),
    })
}

/// `E^C = −mα² / (2π²[K₁(u₀) − I₁(u₀)]² R² ℏ²)`.
pub fn c_spectrum_paper(p: &Params2D) -> f64 {
    let x = u0();
    let d = bessel::k_unchecked(One, x) - bessel::i_unchecked(One, x);
    -p.mass * p.alpha * p.alpha / (2.0 * PI * PI * d * d * p.radius * p.radius * p.hbar * p.hbar)
}

/// Which circle-layer jump enters `Hψ_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpConvention {
    /// The jump of `∂_r ψ_c` computed from the pieces.
    Derived,
    /// The corollary proof's layer `(ℏ²/2m) b N [K₁ − I₁] δ(r − R)`.
    Paper,
}

impl JumpConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpConvention::Derived => "derived",
            JumpConvention::Paper => "paper",
        }
    }
}

/// The pieces of `⟨Hψ_c − Eψ_c, φ⟩` at the Helmholtz `b₀ = u₀/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketTerms {
    /// Circle layer contribution, proportional to `b`.
    pub circle: f64,
    /// Point atom `−αN φ(0)`.
    pub point: f64,
    /// Regular part; vanishes because `ψ_c` solves the Helmholtz equation.
    pub regular: f64,
    /// `⟨δ(r − R), φ⟩` with the line measure and with the radial density
    /// (mass one) convention.
    pub layer_line_measure: f64,
    pub layer_radial_density: f64,
}

/// `Hψ_c − Eψ_c` as a distribution, with `E` the Helmholtz energy.
pub fn h_psi_c_minus_e(p: &Params2D, convention: JumpConvention) -> Result<DistributionSum, Error> {
    let psi = Psi2D::new(*p);
    let kinetic_factor = -p.hbar * p.hbar / (2.0 * p.mass);
    let laplacian = distrib::distributional_laplacian_radial(&psi.representation)?;
    let mut sum = DistributionSum::new(laplacian.regular().scale(kinetic_factor), Vec::new())?;
    let jump = match convention {
        JumpConvention::Derived => laplacian.atoms()[0].weight,
        JumpConvention::Paper => -jump_weight(p)?.paper_combination,
    };
    sum.push_atom(DeltaAtom::circle(p.radius, kinetic_factor * jump))?;
    sum.push_atom(DeltaAtom::origin(-p.alpha * psi.radial(0.0)))?;
    let energy = p.helmholtz_energy();
    Ok(sum.add_regular(&RegularPart::from_piecewise(&psi.representation).scale(-energy))?)
}

pub fn bracket_terms(
    p: &Params2D,
    convention: JumpConvention,
    phi: &BumpTestFunction<2>,
) -> Result<BracketTerms, Error> {
    let t = h_psi_c_minus_e(p, convention)?;
    let mut terms =
        BracketTerms { circle: 0.0, point: 0.0, regular: 0.0, layer_line_measure: 0.0, layer_radial_density: 0.0 };
    let scale = phi.amplitude().abs() * (p.alpha.abs() + p.hbar * p.hbar / p.mass) * p.norm_constant().max(1.0);
    for atom in t.atoms() {
        let single = DistributionSum::atoms_only(Support::Radial, vec![*atom])?;
        let value = distrib::bracket(&single, phi, QUAD_TOL * scale)?;
        match atom.kind {
            AtomKind::Circle(r) => {
                terms.circle = value;
                let unit = DistributionSum::atoms_only(Support::Radial, vec![DeltaAtom::circle(r, 1.0)])?;
                terms.layer_line_measure = distrib::bracket(&unit, phi, QUAD_TOL)?;
                terms.layer_radial_density = terms.layer_line_measure / (2.0 * PI * r);
            }
            AtomKind::Point(_) => terms.point = value,
        }
    }
    let regular = DistributionSum::new(t.regular().clone(), Vec::new())?;
    terms.regular = distrib::bracket(&regular, phi, QUAD_TOL * scale)?;
    Ok(terms)
}

/// Result of solving the C-spectrum bracket equation for one convention.
#[derive(Debug, Clone, PartialEq)]
pub struct CSpectrum {
    pub convention: JumpConvention,
    /// `|b|` averaged over the family.
    pub b_star: f64,
    /// `−ℏ²|b|²/(2m)`.
    pub energy: f64,
    /// `(max − min)/mean` of the per-member `|b|`.
    pub family_spread: f64,
    pub members: Vec<f64>,
}

/// Both conventions side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CSpectrumBrackets {
    pub derived: CSpectrum,
    pub paper: CSpectrum,
}

/// Per-member `|b|` solving `(b/b₀)·C_φ + P_φ + Reg_φ = 0`, where the circle
/// layer carries the factor `b` and the point atom does not.
fn member_solutions(
    p: &Params2D,
    convention: JumpConvention,
    family: &[BumpTestFunction<2>],
) -> Result<Vec<f64>, Error> {
    if p.alpha == 0.0 {
        return Err(Error::NoSolution(
            "with alpha = 0 there is no point atom, and the circle layer of the kink at R never vanishes".into(),
        ));
    }
    if family.is_empty() {
        return Err(Error::InadequateFamily("the origin and the circle r = R"));
    }
    let b0 = p.b();
    let mut members = Vec::with_capacity(family.len());
    for phi in family {
        let terms = bracket_terms(p, convention, phi)?;
        if terms.point == 0.0 || terms.circle == 0.0 {
            return Err(Error::InadequateFamily("the origin and the circle r = R"));
        }
        members.push((b0 * (terms.point + terms.regular) / terms.circle).abs());
    }
    Ok(members)
}

fn summarize(p: &Params2D, convention: JumpConvention, members: Vec<f64>) -> CSpectrum {
    let b_star = members.iter().sum::<f64>() / members.len() as f64;
    CSpectrum {
        convention,
        b_star,
        energy: -p.hbar * p.hbar * b_star * b_star / (2.0 * p.mass),
        family_spread: relative_spread(&members),
        members,
    }
}

/// One convention; fails when the family disagrees beyond `tol`.
pub fn c_spectrum_bracket_with(
    p: &Params2D,
    convention: JumpConvention,
    family: &[BumpTestFunction<2>],
    tol: f64,
) -> Result<CSpectrum, Error> {
    let result = summarize(p, convention, member_solutions(p, convention, family)?);
    if result.family_spread > tol {
        return Err(Error::FamilyDisagreement { spread: result.family_spread, tol, b_values: result.members });
    }
    Ok(result)
}

/// Solves `⟨Hψ_c − Eψ_c, φ⟩ = 0` over the family under both jump
/// conventions. A spread beyond `tol` in either is an error carrying both.
pub fn c_spectrum_bracket(p: &Params2D, family: &[BumpTestFunction<2>], tol: f64) -> Result<CSpectrumBrackets, Error> {
    let derived = summarize(p, JumpConvention::Derived, member_solutions(p, JumpConvention::Derived, family)?);
    let paper = summarize(p, JumpConvention::Paper, member_solutions(p, JumpConvention::Paper, family)?);
    if derived.family_spread > tol || paper.family_spread > tol {
        return Err(Error::BracketFamilyDisagreement {
            tol,
            derived_spread: derived.family_spread,
            derived_b: derived.members,
            paper_spread: paper.family_spread,
            paper_b: paper.members,
        });
    }
    Ok(CSpectrumBrackets { derived, paper })
}

/// Plateau bumps that are constant on a disk containing both the origin and
/// the whole circle `r = R`.
pub fn plateau_family(radius: f64) -> Vec<BumpTestFunction<2>> {
    let r = radius;
    [
        ([0.0, 0.0], 1.5 * r, 2.5 * r, 1.0),
        ([0.0, 0.0], 2.0 * r, 4.0 * r, 0.5),
        ([0.3 * r, 0.2 * r], 2.0 * r, 3.0 * r, 2.0),
        ([-0.4 * r, 0.1 * r], 3.0 * r, 6.0 * r, 1.0),
    ]
    .into_iter()
    .map(|(c, inner, outer, a)| BumpTestFunction::plateau(c, inner, outer, a).expect("valid plateau"))
    .collect()
}

/// Canonical bumps centered at the origin; their values on the circle
/// differ from their values at the origin.
pub fn canonical_family(radius: f64) -> Vec<BumpTestFunction<2>> {
    [1.5, 2.0, 4.0]
        .into_iter()
        .map(|s| BumpTestFunction::new([0.0, 0.0], s * radius, 1.0).expect("valid bump"))
        .collect()
}

/// Ratio `E_derived / E_paper = [(K₁ − I₁)/(K₁ + I₁)]²`.
pub fn convention_energy_ratio() -> f64 {
    let x = u0();
    let (k1, i1) = (bessel::k_unchecked(One, x), bessel::i_unchecked(One, x));
    ((k1 - i1) / (k1 + i1)).powi(2)
}
