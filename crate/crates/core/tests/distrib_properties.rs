mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::random_piecewise;
use deltawell::distrib::{
    bracket, derivative_jumps, distributional_laplacian_radial, distributional_second_derivative_1d,
    fundamental_solution_check, mollifier_sequence_check, BumpTestFunction, DeltaAtom, DistributionSum, Jet, PieceFn,
    Piecewise, RegularPart, Support, TestFunction,
};
use deltawell::quad;
use deltawell::well1d::psi_1d_piecewise;
use deltawell::well2d::{Params2D, Psi2D};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn integration_by_parts_duality_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    for _ in 0..10 {
        let f = random_piecewise(&mut rng);
        let phi = BumpTestFunction::new([rng.gen_range(-1.0..1.0)], rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
            .unwrap();
        let d2 = distributional_second_derivative_1d(&f).unwrap();
        let lhs = bracket(&d2, &phi, 1e-13).unwrap();
        let c = phi.center()[0];
        let rho = phi.radius();
        let rhs = quad::integrate_with_breakpoints(
            |x| f.value(x) * phi.laplacian([x]),
            c - rho,
            c + rho,
            f.breakpoints(),
            1e-13,
        )
        .unwrap()
        .value;
        assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn exponential_kink_weight() {
    for b in [0.5, 1.0, 2.0] {
        let d2 = distributional_second_derivative_1d(&psi_1d_piecewise(b)).unwrap();
        let atom = d2.atoms()[0];
        assert_eq!(atom.kind, deltawell::distrib::AtomKind::Point(0.0));
        assert!((atom.weight + 2.0 * b * b.sqrt()).abs() <= 1e-10);
        let x = 0.37;
        assert!((d2.regular().value(x) - b * b * b.sqrt() * (-b * x).exp()).abs() < 1e-14);
    }
}

#[test]
fn circle_layer_matches_mollified_ring_cubature() {
    // A ring of radial width ε and unit radial mass, integrated against φ
    // over a Cartesian grid of nested quadratures, tends to the line-measure
    // bracket 2πR·(circle mean of φ) as ε → 0.
    let radius = 1.0;
    let eps = 1e-3;
    let ring = |r: f64| {
        let s = (r - radius) / eps;
        if s.abs() < 1.0 {
            (1.0 - s.abs()) / eps
        } else {
            0.0
        }
    };
    let layer = DistributionSum::atoms_only(Support::Radial, vec![DeltaAtom::circle(radius, 1.0)]).unwrap();
    for phi in
        [BumpTestFunction::new([0.0, 0.0], 2.0, 1.0).unwrap(), BumpTestFunction::new([0.6, -0.3], 1.2, 1.0).unwrap()]
    {
        let cubature = quad::integrate_with_breakpoints(
            |x| {
                let mut cuts = Vec::new();
                for r in [radius - eps, radius, radius + eps] {
                    if r > x.abs() {
                        let y = (r * r - x * x).sqrt();
                        cuts.extend([-y, y]);
                    }
                }
                quad::integrate_with_breakpoints(|y| ring(x.hypot(y)) * phi.value([x, y]), -1.1, 1.1, &cuts, 1e-12)
                    .unwrap()
                    .value
            },
            -1.1,
            1.1,
            &[-1.0 - eps, -1.0, -1.0 + eps, 1.0 - eps, 1.0, 1.0 + eps],
            1e-11,
        )
        .unwrap()
        .value;
        let line_measure = bracket(&layer, &phi, 1e-12).unwrap();
        assert!((cubature - line_measure).abs() <= 1e-5 * line_measure.abs().max(1.0), "{cubature} vs {line_measure}");
    }
    let radial = BumpTestFunction::new([0.0, 0.0], 2.0, 1.0).unwrap();
    let expected = 2.0 * PI * radius * radial.value([radius, 0.0]);
    assert!((bracket(&layer, &radial, 1e-12).unwrap() - expected).abs() < 1e-14);
}

#[test]
fn regular_gaussian_bracket_is_an_ordinary_integral() {
    let gauss = DistributionSum::new(RegularPart::smooth(Support::Radial, |r| (-r * r).exp()), vec![]).unwrap();
    let phi = BumpTestFunction::new([0.0, 0.0], 1.5, 1.0).unwrap();
    let direct = quad::integrate_radial2d(|r| (-r * r).exp() * phi.value([r, 0.0]), &[1.5], 1e-13).unwrap().value;
    assert!((bracket(&gauss, &phi, 1e-13).unwrap() - direct).abs() < 1e-11);
}

#[test]
fn psi_c_kink_weight_and_stencil() {
    let psi = Psi2D::new(Params2D::unit());
    let lap = distributional_laplacian_radial(&psi.representation).unwrap();
    let jump = derivative_jumps(&psi.representation).unwrap()[0];
    let k1 = deltawell::bessel::bessel_k(deltawell::bessel::BesselOrder::One, psi.u0).unwrap();
    let i1 = deltawell::bessel::bessel_i(deltawell::bessel::BesselOrder::One, psi.u0).unwrap();
    let expected = psi.norm * psi.b * (-k1 - i1);
    assert!((lap.atoms()[0].weight - expected).abs() < 1e-14);
    assert!(jump.relative_difference() <= 1e-6);
}

#[test]
fn mollified_psi_c_converges() {
    let psi = Psi2D::new(Params2D::unit());
    let d = mollifier_sequence_check(&psi.representation, &[4, 8, 16, 32]).unwrap();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[3] < 0.01);
}

#[test]
fn mollified_bump_and_zero() {
    let bump: PieceFn = Arc::new(|r: f64| {
        let phi = BumpTestFunction::new([0.0, 0.0], 1.0, 1.0).unwrap();
        Jet::new(phi.value([r, 0.0]), 0.0, 0.0)
    });
    let zero: PieceFn = Arc::new(|_| Jet::new(0.0, 0.0, 0.0));
    let smooth = Piecewise::radial(vec![1.0], vec![bump, zero.clone()]).unwrap();
    let d = mollifier_sequence_check(&smooth, &[4, 8, 16]).unwrap();
    // second-order in the width for a smooth function
    assert!(d[0] / d[1] > 3.0 && d[1] / d[2] > 3.0, "{d:?}");

    let nothing = Piecewise::radial(vec![], vec![zero]).unwrap();
    assert_eq!(mollifier_sequence_check(&nothing, &[4, 8]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn fundamental_solution_normalization() {
    let phi = BumpTestFunction::new([0.0, 0.0], 1.0, 1.0).unwrap();
    for b in [1.0, 2.0] {
        assert!((fundamental_solution_check(b, &phi, 1e-12).unwrap() - 1.0).abs() < 1e-6);
    }
    let shifted = BumpTestFunction::new([0.4, -0.2], 0.8, 1.0).unwrap();
    let value = fundamental_solution_check(1.0, &shifted, 1e-12).unwrap();
    assert!((value - shifted.value([0.0, 0.0])).abs() < 1e-6);
    let away = BumpTestFunction::new([2.0, 1.0], 0.5, 1.0).unwrap();
    assert!(fundamental_solution_check(1.0, &away, 1e-12).unwrap().abs() < 1e-10);
}

fn line_bump() -> impl Strategy<Value = BumpTestFunction<1>> {
    (-1.0f64..1.0, 0.3f64..2.0, -2.0f64..2.0).prop_map(|(c, r, a)| BumpTestFunction::new([c], r, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_linear_in_the_distribution(seed in any::<u64>(), s in -3.0f64..3.0, t in -3.0f64..3.0, phi in line_bump()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = distributional_second_derivative_1d(&random_piecewise(&mut rng)).unwrap();
        let g = distributional_second_derivative_1d(&random_piecewise(&mut rng)).unwrap();
        let combined = f.scale(s).add(&g.scale(t)).unwrap();
        let lhs = bracket(&combined, &phi, 1e-13).unwrap();
        let rhs = s * bracket(&f, &phi, 1e-13).unwrap() + t * bracket(&g, &phi, 1e-13).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn bracket_is_linear_in_the_test_function(seed in any::<u64>(), s in -3.0f64..3.0, phi in line_bump(), psi in line_bump()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = distributional_second_derivative_1d(&random_piecewise(&mut rng)).unwrap();
        let sum = deltawell::distrib::ProxyTestFunction::new(
            |x: [f64; 1]| s * phi.value(x) + psi.value(x),
            [0.0],
            (phi.center()[0].abs() + phi.radius()).max(psi.center()[0].abs() + psi.radius()),
        );
        let lhs = bracket(&f, &sum, 1e-13).unwrap();
        let rhs = s * bracket(&f, &phi, 1e-13).unwrap() + bracket(&f, &psi, 1e-13).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn analytic_and_stencil_jumps_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for check in derivative_jumps(&random_piecewise(&mut rng)).unwrap() {
            let scale = check.analytic.abs().max(1.0);
            prop_assert!((check.analytic - check.finite_difference).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn psi_c_jump_agrees_across_parameters(radius in 0.1f64..10.0, alpha in 0.2f64..5.0) {
        let psi = Psi2D::new(Params2D::new(1.0, 1.0, alpha, radius).unwrap());
        let check = derivative_jumps(&psi.representation).unwrap()[0];
        prop_assert!(check.relative_difference() <= 1e-6);
    }
}
