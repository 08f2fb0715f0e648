use deltawell::bessel::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, branches, wronskian_defect, BesselOrder, I_SERIES_MAX,
    K_ASYMPTOTIC_MIN, K_SERIES_MAX,
};
use proptest::prelude::*;
use BesselOrder::{One, Zero};

/// Reference kernels from the integral representations
/// `e^{-x} I₀(x) = (1/π) ∫_0^π e^{x(cos θ − 1)} dθ`,
/// `e^{-x} I₁(x) = (x/π) ∫_0^π e^{x(cos θ − 1)} sin²θ dθ` and
/// `e^{x} K_n(x) = ∫_0^∞ e^{−x(cosh t − 1)} cosh nt dt`.
/// Both integrands are analytic and the trapezoid rule converges
/// geometrically, so this shares no code path with the series,
/// continued-fraction and asymptotic branches under test.
mod oracle {
    use std::f64::consts::PI;

    pub fn i_scaled(n: u32, x: f64) -> f64 {
        let steps = 4000;
        let h = PI / steps as f64;
        let mut sum = 0.0;
        for j in 0..=steps {
            let theta = j as f64 * h;
            let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
            let weight = if n == 0 { 1.0 } else { theta.sin().powi(2) };
            sum += w * (x * (theta.cos() - 1.0)).exp() * weight;
        }
        let prefactor = if n == 0 { 1.0 } else { x };
        prefactor * sum * h / PI
    }

    pub fn k_scaled(n: u32, x: f64) -> f64 {
        let h = 0.02;
        let mut sum = 0.5;
        let mut j = 1;
        loop {
            let t = j as f64 * h;
            let term = (-x * (t.cosh() - 1.0)).exp() * (n as f64 * t).cosh();
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            j += 1;
        }
        sum * h
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
}

#[test]
fn frozen_high_precision_values() {
    // 40-digit evaluations, rounded to 20 significant digits.
    let cases: [(BesselOrder, f64, f64, f64); 11] = [
        (Zero, 1.0, 1.266_065_877_752_008_335_6, 0.421_024_438_240_708_333_34),
        (One, 1.0, 0.565_159_103_992_485_027_21, 0.601_907_230_197_234_574_74),
        (Zero, 0.5, 1.063_483_370_741_323_519_3, 0.924_419_071_227_665_861_78),
        (One, 2.0, 1.590_636_854_637_329_063_4, 0.139_865_881_816_522_427_28),
        (Zero, 5.0, 27.239_871_823_604_446_895, 0.003_691_098_334_042_594_274_7),
        (One, 8.0, 399.873_136_782_560_098_22, 0.000_155_369_211_805_001_133_92),
        (Zero, 10.0, 2_815.716_628_466_254_471_5, 0.000_017_780_062_316_167_651_811),
        (One, 25.0, 5_657_865_129.878_701_353_1, 3.532_778_073_199_933_770_2e-12),
        (Zero, 50.0, 2.932_553_783_849_336_326_7e20, 3.410_167_749_789_495_513_9e-23),
        (One, 100.0, 1.068_369_390_338_162_481_2e42, 4.679_853_735_636_909_286_6e-45),
        (One, 1e-3, 0.000_500_000_062_500_002_614_58, 999.996_238_156_085_553_46),
    ];
    for (order, x, i_ref, k_ref) in cases {
        let i = bessel_i(order, x).unwrap();
        let k = bessel_k(order, x).unwrap();
        assert!(rel(i, i_ref) <= 1e-13, "I{order}({x}) = {i}, expected {i_ref}");
        assert!(rel(k, k_ref) <= 1e-13, "K{order}({x}) = {k}, expected {k_ref}");
    }
}

#[test]
fn oracle_agrees_with_frozen_values() {
    assert!(rel(oracle::i_scaled(0, 1.0) * 1f64.exp(), 1.266_065_877_752_008_3) < 1e-14);
    assert!(rel(oracle::k_scaled(1, 1.0) * (-1f64).exp(), 0.601_907_230_197_234_57) < 1e-14);
}

#[test]
fn i_matches_integral_oracle_on_zero_to_hundred() {
    for x in grid(1e-6, 100.0, 300) {
        for (order, n) in [(Zero, 0), (One, 1)] {
            let got = bessel_i_scaled(order, x).unwrap();
            let want = oracle::i_scaled(n, x);
            assert!(rel(got, want) <= 1e-13, "I{n}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn i1_small_argument_leading_terms() {
    for x in grid(1e-8, 1e-2, 50) {
        let q = x * x / 4.0;
        let want = 0.5 * x * (1.0 + q / 2.0 + q * q / 12.0 + q * q * q / 144.0);
        assert!(rel(bessel_i(One, x).unwrap(), want) <= 1e-14);
    }
}

#[test]
fn k_matches_integral_oracle() {
    for x in grid(1e-8, 100.0, 300) {
        for (order, n) in [(Zero, 0), (One, 1)] {
            let got = bessel_k_scaled(order, x).unwrap();
            let want = oracle::k_scaled(n, x);
            assert!(rel(got, want) <= 1e-13, "K{n}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn branches_agree_at_switchover_points() {
    for order in [Zero, One] {
        let x = I_SERIES_MAX;
        let series = branches::i_series(order, x) * (-x).exp();
        let asymptotic = branches::i_asymptotic_scaled(order, x);
        assert!(rel(series, asymptotic) <= 1e-12, "I{order} at {x}");

        let x = K_SERIES_MAX;
        let series = branches::k_series(order, x) * x.exp();
        let cf = branches::k_continued_fraction_scaled(order, x);
        assert!(rel(series, cf) <= 1e-12, "K{order} at {x}");

        let x = K_ASYMPTOTIC_MIN;
        let cf = branches::k_continued_fraction_scaled(order, x);
        let asymptotic = branches::k_asymptotic_scaled(order, x);
        assert!(rel(cf, asymptotic) <= 1e-12, "K{order} at {x}");
    }
}

#[test]
fn wronskian_sweep() {
    for x in grid(1e-6, 100.0, 2000) {
        let defect = wronskian_defect(x).unwrap();
        assert!(defect.abs() <= 1e-12 / x, "x = {x}: defect {defect}");
    }
}

#[test]
fn scaled_forms_satisfy_wronskian_at_fifty() {
    let x = 50.0;
    let w = bessel_i_scaled(Zero, x).unwrap() * bessel_k_scaled(One, x).unwrap()
        + bessel_i_scaled(One, x).unwrap() * bessel_k_scaled(Zero, x).unwrap();
    assert!((w - 1.0 / x).abs() <= 1e-12);
}

#[test]
fn i0_increasing_and_k0_decreasing_on_dense_grid() {
    let xs: Vec<f64> = (1..=20_000).map(|i| i as f64 * 1e-3).collect();
    for w in xs.windows(2) {
        assert!(bessel_i(Zero, w[1]).unwrap() > bessel_i(Zero, w[0]).unwrap());
        assert!(bessel_k(Zero, w[1]).unwrap() < bessel_k(Zero, w[0]).unwrap());
    }
}

proptest! {
    #[test]
    fn scaled_and_unscaled_are_consistent(x in 1e-6f64..700.0) {
        for order in [Zero, One] {
            let i = bessel_i(order, x).unwrap();
            let is = bessel_i_scaled(order, x).unwrap();
            prop_assert!(rel(i * (-x).exp(), is) <= 1e-13);
            let k = bessel_k(order, x).unwrap();
            let ks = bessel_k_scaled(order, x).unwrap();
            prop_assert!(rel(k * x.exp(), ks) <= 1e-13);
        }
    }

    #[test]
    fn wronskian_holds_for_random_arguments(x in 1e-6f64..100.0) {
        prop_assert!(wronskian_defect(x).unwrap().abs() <= 1e-12 / x);
    }
}
