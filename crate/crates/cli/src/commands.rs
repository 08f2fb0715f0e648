//! Subcommand implementations. Each returns a [`Report`] (or CSV text) and
//! leaves writing and exit codes to `main`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use deltawell::bessel;
use deltawell::distrib::{self, BumpTestFunction, Jet, PieceFn, Piecewise};
use deltawell::quad;
use deltawell::well1d::{self, Method, Params1D};
use deltawell::well2d::{self, JumpConvention, Params2D, Psi2D};
use deltawell::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::Report;

pub const JUMP_CONVENTION_NOTICE: &str =
    "jump convention: the corollary combines the circle jump as N b (K1(u0) - I1(u0)); \
differentiating I0 and K0 gives N b (-K1(u0) - I1(u0)). Both are reported; E^C uses the corollary's combination.";

pub const NEGATIVE_ALPHA_NOTICE: &str =
    "alpha < 0: the bound-state reading of E^C assumes an attractive coupling (alpha > 0); E^C depends on alpha only through alpha^2";

const HELMHOLTZ_TOL: f64 = 1e-6;
const CONTINUITY_TOL: f64 = 1e-13;
const JUMP_TOL: f64 = 1e-6;
const WRONSKIAN_TOL: f64 = 1e-12;
const FUNDAMENTAL_TOL: f64 = 1e-6;
const DUALITY_TOL: f64 = 1e-8;
const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum CommandError {
    /// Bad flags or parameters; exit status 2.
    Usage(String),
    /// The computation could not run at all; exit status 1.
    Runtime(String),
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Usage(m) | CommandError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CommandError {}

fn usage(e: Error) -> CommandError {
    CommandError::Usage(e.to_string())
}

fn check_tol(tol: f64) -> Result<(), CommandError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CommandError::Usage(format!("tolerance must be positive, got {tol}")))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn solve1d(hbar: f64, mass: f64, alpha: f64, tol: f64) -> Result<Report, CommandError> {
    check_tol(tol)?;
    let p = Params1D::new(hbar, mass, alpha).map_err(usage)?;
    let mut report = Report::new("solve1d");
    report.input("hbar", hbar).input("mass", mass).input("alpha", alpha).input("tol", tol);

    let exact = well1d::energy_closed_form(&p);
    let mut reports = Vec::new();
    for method in Method::ALL {
        let result = match method {
            Method::ClosedForm => Ok(exact.clone()),
            Method::Integration => well1d::energy_integration(&p, tol),
            Method::Distributional => well1d::energy_distributional(&p, &well1d::default_bump_family(), tol),
            Method::QuadraticForm => well1d::energy_quadratic_form(&p),
            Method::ResolventPole => well1d::energy_resolvent_pole(&p, tol),
        };
        let name = format!("energy.{method}");
        match result {
            Ok(r) => {
                report.check(&name, r.energy, method.as_str(), tol, rel(r.energy, exact.energy) <= tol);
                report.value(format!("b.{method}"), r.b, method.as_str(), tol);
                for (key, value) in &r.diagnostics {
                    report.value(format!("diagnostics.{method}.{key}"), *value, method.as_str(), tol);
                }
                reports.push(r);
            }
            Err(e) => report.failure(name, method.as_str(), tol, e),
        }
    }
    let spread = well1d::max_pairwise_deviation(&reports);
    report.check("max_pairwise_relative_deviation", spread, "cross_method", tol, spread <= tol);

    let b = exact.b;
    match well1d::naive_form_defect(&p, b) {
        Ok(d) => {
            let scale = alpha * b;
            report.check("naive_form_defect", d, "quadratic_form", tol, (d + scale).abs() <= tol * scale);
        }
        Err(e) => report.failure("naive_form_defect", "quadratic_form", tol, e),
    }
    Ok(report)
}

pub fn solve2d(hbar: f64, mass: f64, alpha: f64, radius: f64, tol: f64, sweep: &[f64]) -> Result<Report, CommandError> {
    check_tol(tol)?;
    let p = Params2D::new(hbar, mass, alpha, radius).map_err(usage)?;
    let sweep_params =
        sweep.iter().map(|&r| Params2D::new(hbar, mass, alpha, r).map_err(usage)).collect::<Result<Vec<_>, _>>()?;

    let mut report = Report::new("solve2d");
    report
        .input("hbar", hbar)
        .input("mass", mass)
        .input("alpha", alpha)
        .input("radius", radius)
        .input("tol", tol)
        .input("sweep_radius", sweep.to_vec());
    report.warn(JUMP_CONVENTION_NOTICE);
    if alpha < 0.0 {
        report.warn(NEGATIVE_ALPHA_NOTICE);
    }

    let u0 = well2d::u0();
    report.value("u0", u0, "brent", 1e-16);
    match well2d::beta_sq(u0) {
        Ok(v) => report.value("beta_sq", v, "bessel", 1e-15),
        Err(e) => report.failure("beta_sq", "bessel", 1e-15, e),
    }
    report.value("norm_constant", p.norm_constant(), "closed_form", 1e-15);
    report.value("b", p.b(), "closed_form", 1e-15);
    report.value("helmholtz_energy", p.helmholtz_energy(), "closed_form", 1e-15);

    match well2d::norm_check(&p, INNER_TOL) {
        Ok(n) => report.check("normalization", n, "radial_quadrature", tol, (n - 1.0).abs() <= tol),
        Err(e) => report.failure("normalization", "radial_quadrature", tol, e),
    }

    let (inside, outside) = Psi2D::new(p).limits_at_circle();
    let gap = rel(inside, outside);
    report.check("continuity_at_radius", gap, "one_sided_limits", CONTINUITY_TOL, gap <= CONTINUITY_TOL);

    match well2d::helmholtz_residual(&p, &helmholtz_radii(radius)) {
        Ok(residuals) => {
            let worst = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            report.check("helmholtz_max_residual", worst, "five_point_stencil", HELMHOLTZ_TOL, worst <= HELMHOLTZ_TOL);
        }
        Err(e) => report.failure("helmholtz_max_residual", "five_point_stencil", HELMHOLTZ_TOL, e),
    }

    match well2d::jump_weight(&p) {
        Ok(j) => {
            report.value("jump.analytic", j.analytic, "bessel_derivatives", 1e-15);
            let agreement = rel(j.finite_difference, j.analytic);
            report.check(
                "jump.finite_difference",
                j.finite_difference,
                "one_sided_stencil",
                JUMP_TOL,
                agreement <= JUMP_TOL,
            );
            report.value("jump.paper_combination", j.paper_combination, "corollary", 1e-15);
        }
        Err(e) => report.failure("jump.analytic", "bessel_derivatives", 1e-15, e),
    }

    let e_paper = well2d::c_spectrum_paper(&p);
    report.value("energy_c.paper_formula", e_paper, "corollary", 1e-15);

    let family = well2d::plateau_family(radius);
    if let Some(phi) = family.first() {
        match well2d::bracket_terms(&p, JumpConvention::Derived, phi) {
            Ok(t) => {
                report.value("circle_layer.line_measure", t.layer_line_measure, "bracket", INNER_TOL);
                report.value("circle_layer.radial_density", t.layer_radial_density, "bracket", INNER_TOL);
            }
            Err(e) => report.failure("circle_layer.line_measure", "bracket", INNER_TOL, e),
        }
    }
    match well2d::c_spectrum_bracket(&p, &family, tol) {
        Ok(brackets) => {
            for c in [&brackets.derived, &brackets.paper] {
                let method = format!("bracket_{}", c.convention.as_str());
                report.check(
                    format!("energy_c.bracket.{}", c.convention.as_str()),
                    c.energy,
                    &method,
                    tol,
                    c.family_spread <= tol,
                );
            }
            let paper_match = rel(brackets.paper.energy, e_paper);
            report.check("energy_c.bracket_paper_vs_formula", paper_match, "bracket_paper", tol, paper_match <= tol);
            let ratio = brackets.derived.energy / brackets.paper.energy;
            let expected = well2d::convention_energy_ratio();
            report.check("energy_c.convention_ratio", ratio, "bracket", tol, rel(ratio, expected) <= tol);
        }
        Err(e) => report.failure("energy_c.bracket", "bracket", tol, e),
    }

    for (r, q) in sweep.iter().zip(&sweep_params) {
        let e = well2d::c_spectrum_paper(q);
        report.value(format!("sweep.energy_c[R={r}]"), e, "corollary", 1e-15);
        let ratio = e / e_paper;
        let expected = (radius / r).powi(2);
        report.check(
            format!("sweep.ratio[R={r}]"),
            ratio,
            "corollary",
            1e-12,
            (ratio - expected).abs() <= 1e-12 * expected,
        );
    }
    Ok(report)
}

/// Fifty log-spaced radii in `[0.05R, 10R]`, shifted off the matching circle.
fn helmholtz_radii(radius: f64) -> Vec<f64> {
    let band = well2d::GUARD_BAND * radius;
    (0..50)
        .map(|i| 0.05 * radius * 200.0f64.powf(i as f64 / 49.0))
        .map(|r| if (r - radius).abs() < 2.0 * band { r + 4.0 * band } else { r })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    One,
    Two,
}

/// Uniformly sampled wave function as CSV.
pub fn profile(
    dimension: Dimension,
    hbar: f64,
    mass: f64,
    alpha: f64,
    radius: f64,
    r_max: Option<f64>,
    samples: usize,
) -> Result<String, CommandError> {
    if samples < 2 {
        return Err(CommandError::Usage(format!("samples must be at least 2, got {samples}")));
    }
    if let Some(r) = r_max {
        if !(r.is_finite() && r > 0.0) {
            return Err(CommandError::Usage(format!("r-max must be positive, got {r}")));
        }
    }
    let mut csv = String::new();
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (samples - 1) as f64;
    match dimension {
        Dimension::One => {
            let p = Params1D::new(hbar, mass, alpha).map_err(usage)?;
            let b = well1d::energy_closed_form(&p).b;
            let extent = r_max.unwrap_or(5.0 / b);
            csv.push_str("x,psi,psi_sq\n");
            for i in 0..samples {
                let x = step(-extent, extent, i);
                let psi = well1d::psi_1d(b, x);
                writeln!(csv, "{x:.16e},{psi:.16e},{:.16e}", psi * psi).unwrap();
            }
        }
        Dimension::Two => {
            let p = Params2D::new(hbar, mass, alpha, radius).map_err(usage)?;
            let psi = Psi2D::new(p);
            let extent = r_max.unwrap_or(5.0 * radius);
            csv.push_str("r,psi,psi_sq\n");
            for i in 0..samples {
                let r = step(0.0, extent, i);
                let v = psi.radial(r);
                writeln!(csv, "{r:.16e},{v:.16e},{:.16e}", v * v).unwrap();
            }
        }
    }
    Ok(csv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bessel,
    Quad,
    Distrib,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Bessel => "bessel",
            Suite::Quad => "quad",
            Suite::Distrib => "distrib",
            Suite::All => "all",
        }
    }
}

pub fn verify(suite: Suite, tol: f64) -> Result<Report, CommandError> {
    check_tol(tol)?;
    let mut report = Report::new("verify");
    report.input("suite", suite.as_str()).input("tol", tol);
    if matches!(suite, Suite::Bessel | Suite::All) {
        verify_bessel(&mut report);
    }
    if matches!(suite, Suite::Quad | Suite::All) {
        verify_quad(&mut report, tol);
    }
    if matches!(suite, Suite::Distrib | Suite::All) {
        verify_distrib(&mut report);
    }
    Ok(report)
}

fn verify_bessel(report: &mut Report) {
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let x = 10f64.powf(-6.0 + 9.0 * i as f64 / 200.0);
        match bessel::wronskian_defect(x) {
            Ok(d) => worst = worst.max((d * x).abs()),
            Err(e) => return report.failure("bessel.wronskian_max_scaled_defect", "wronskian", WRONSKIAN_TOL, e),
        }
    }
    report.check("bessel.wronskian_max_scaled_defect", worst, "wronskian", WRONSKIAN_TOL, worst <= WRONSKIAN_TOL);
}

fn verify_quad(report: &mut Report, tol: f64) {
    let inner = tol.min(1e-12);
    let cases: Vec<(&str, Result<quad::QuadResult, quad::QuadError>, f64)> = vec![
        ("quad.polynomial", quad::integrate_finite(|x| x * x, 0.0, 1.0, inner), 1.0 / 3.0),
        ("quad.sine", quad::integrate_finite(f64::sin, 0.0, PI, inner), 2.0),
        ("quad.log_endpoint", quad::integrate_finite(f64::ln, 0.0, 1.0, inner), -1.0),
        ("quad.abs_kink", quad::integrate_with_breakpoints(f64::abs, -1.0, 1.0, &[0.0], inner), 1.0),
        ("quad.exponential_tail", quad::integrate_semiinfinite(|x| (-x).exp(), 0.0, inner), 1.0),
        ("quad.lorentzian_tail", quad::integrate_semiinfinite(|x| 1.0 / (1.0 + x * x), 0.0, inner), PI / 2.0),
        ("quad.gaussian_plane", quad::integrate_radial2d(|r| (-r * r).exp(), &[], inner), PI),
    ];
    for (name, result, exact) in cases {
        match result {
            Ok(r) => report.check(name, r.value, "gauss_kronrod_21", tol, (r.value - exact).abs() <= tol * exact.abs()),
            Err(e) => report.failure(name, "gauss_kronrod_21", tol, e),
        }
    }
}

fn verify_distrib(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f = random_piecewise(&mut rng);
        let phi = BumpTestFunction::new([rng.gen_range(-1.0..1.0)], rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
            .expect("valid bump");
        match distrib::duality_defect(&f, &phi, INNER_TOL) {
            Ok(d) => worst = worst.max(d),
            Err(e) => return report.failure("distrib.duality_max_defect", "integration_by_parts", DUALITY_TOL, e),
        }
    }
    report.check("distrib.duality_max_defect", worst, "integration_by_parts", DUALITY_TOL, worst <= DUALITY_TOL);

    let psi = Psi2D::new(Params2D::unit());
    match distrib::mollifier_sequence_check(&psi.representation, &[4, 8, 16, 32]) {
        Ok(d) => {
            let decreasing = d.windows(2).all(|w| w[1] < w[0]);
            report.check("distrib.mollifier_final_distance", d[d.len() - 1], "mollifier", 0.0, decreasing);
        }
        Err(e) => report.failure("distrib.mollifier_final_distance", "mollifier", 0.0, e),
    }

    let phi = BumpTestFunction::new([0.0, 0.0], 1.0, 1.0).expect("valid bump");
    for b in [1.0, 2.0] {
        let name = format!("distrib.fundamental_solution[b={b}]");
        match distrib::fundamental_solution_check(b, &phi, INNER_TOL) {
            Ok(v) => report.check(name, v, "fundamental_solution", FUNDAMENTAL_TOL, (v - 1.0).abs() <= FUNDAMENTAL_TOL),
            Err(e) => report.failure(name, "fundamental_solution", FUNDAMENTAL_TOL, e),
        }
    }

    let mut worst_jump: f64 = 0.0;
    let mut functions = vec![psi.representation.clone(), well1d::psi_1d_piecewise(1.0)];
    functions.extend((0..5).map(|_| random_piecewise(&mut rng)));
    for f in &functions {
        match distrib::derivative_jumps(f) {
            Ok(checks) => {
                for c in checks {
                    worst_jump = worst_jump.max((c.analytic - c.finite_difference).abs() / c.analytic.abs().max(1.0));
                }
            }
            Err(e) => return report.failure("distrib.jump_agreement", "one_sided_stencil", JUMP_TOL, e),
        }
    }
    report.check("distrib.jump_agreement", worst_jump, "one_sided_stencil", JUMP_TOL, worst_jump <= JUMP_TOL);
}

/// Continuous piecewise `v + s t + q t² + w sin t` on up to five pieces.
fn random_piecewise(rng: &mut ChaCha8Rng) -> Piecewise {
    let count = rng.gen_range(1..=4);
    let mut breakpoints: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.5..1.5)).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let anchors: Vec<f64> = std::iter::once(breakpoints[0]).chain(breakpoints.iter().copied()).collect();
    let mut value = rng.gen_range(-1.0..1.0);
    let mut pieces: Vec<PieceFn> = Vec::new();
    for (k, &a) in anchors.iter().enumerate() {
        let (s, q, w): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = value;
        pieces.push(Arc::new(move |x: f64| {
            let t = x - a;
            Jet::new(v + s * t + q * t * t + w * t.sin(), s + 2.0 * q * t + w * t.cos(), 2.0 * q - w * t.sin())
        }));
        if let Some(&next) = anchors.get(k + 1) {
            let t = next - a;
            value += s * t + q * t * t + w * t.sin();
        }
    }
    Piecewise::line(breakpoints, pieces).expect("continuous by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let r = solve1d(1.0, 1.0, 1.0, 1e-8).unwrap();
        assert!(r.passed, "{}", r.to_json());
        assert_eq!(r.results.iter().filter(|e| e.name.starts_with("energy.")).count(), 5);
    }

    #[test]
    fn invalid_parameters_are_usage_errors() {
        assert!(matches!(solve1d(-1.0, 1.0, 1.0, 1e-8), Err(CommandError::Usage(_))));
        assert!(matches!(solve2d(1.0, 1.0, 0.0, 1.0, 1e-8, &[]), Err(CommandError::Usage(_))));
        assert!(matches!(profile(Dimension::Two, 1.0, 1.0, 1.0, 1.0, None, 1), Err(CommandError::Usage(_))));
        assert!(matches!(verify(Suite::All, 0.0), Err(CommandError::Usage(_))));
    }

    #[test]
    fn negative_alpha_is_flagged() {
        let r = solve2d(1.0, 1.0, -1.0, 1.0, 1e-8, &[]).unwrap();
        assert!(r.warnings.iter().any(|w| w == NEGATIVE_ALPHA_NOTICE));
        assert!(r.warnings.iter().any(|w| w == JUMP_CONVENTION_NOTICE));
    }

    #[test]
    fn profile_rows() {
        let csv = profile(Dimension::One, 1.0, 1.0, 1.0, 1.0, Some(2.0), 5).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "x,psi,psi_sq");
        assert!(lines[3].starts_with("0.0000000000000000e0,1.0000000000000000e0"));
    }
}
