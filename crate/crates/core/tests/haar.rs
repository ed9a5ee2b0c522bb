use madic::haar::*;
use madic::MadicNumber;
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn telescoping_additivity() {
    let total: f64 = (-5..=0).map(|j| sphere_measure(2, j)).sum::<f64>() + ball_measure(2, -6);
    assert_eq!(total, 1.0);
    for m in 2..=10 {
        assert_eq!(ball_measure(m, 0), 1.0);
    }
    assert_eq!((ball_measure(3, 2), sphere_measure(3, 2)), (9.0, 6.0));
}

#[test]
fn ball_integral_is_sum_of_sphere_integrals() {
    for m in 2..=7u32 {
        for r in -4..=4 {
            for k in std::iter::once(KNorm::Zero).chain((-6..=6).map(KNorm::Power)) {
                let shells: f64 = (r - 60..=r).map(|j| character_sphere_integral(m, k, j)).sum();
                assert!((character_ball_integral(m, k, r) - shells).abs() < 1e-12);
                let step = character_ball_integral(m, k, r) - character_ball_integral(m, k, r - 1);
                assert!((character_sphere_integral(m, k, r) - step).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn radial_integral_oracles() {
    // f(m^i) = m^i on i <= 0 and 0 outside, m = 2, r = 3: (1/2) sum 4^i = 2/3
    let f = RadialFunction::new(2, 0, vec![c(1.0)], Tail::Geometric(c(0.5)), Tail::Zero).unwrap();
    let got = integrate_radial(&f, 3).unwrap();
    assert!((got.value.re - 2.0 / 3.0).abs() < 1e-15);

    let one = RadialFunction::constant(7, 1.0).unwrap();
    assert!((integrate_radial(&one, 0).unwrap().value.re - 1.0).abs() < 1e-14);
    assert!(radial_character_integral(&one, KNorm::Power(1), 0).unwrap().value.norm() < 1e-15);

    let diverging = RadialFunction::power(3, 1.0, -1.0).unwrap();
    assert!(integrate_radial(&diverging, 0).is_err());
}

#[test]
fn radial_character_integral_of_unit_ball_indicator() {
    // f = Omega(|x| <= 1) with m = 2, |k| = 2, over B_0
    let f = RadialFunction::new(2, 0, vec![c(1.0)], Tail::Geometric(c(1.0)), Tail::Zero).unwrap();
    let got = radial_character_integral(&f, KNorm::Power(1), 0).unwrap().value.re;
    let oracle: f64 = (-80..=0).map(|j| character_sphere_integral(2, KNorm::Power(1), j)).sum();
    assert!((got - oracle).abs() < 1e-12);
    assert!(got.abs() < 1e-15);
}

#[test]
fn image_measures() {
    for n in 2..=4 {
        assert_eq!(image_measure_enumerate(2, 4, n).unwrap(), Ratio::new(1, 2));
    }
    assert_eq!(image_measure_enumerate(3, 4, 3).unwrap(), Ratio::new(1, 1));
    for m in 2..=10 {
        assert_eq!(image_measure_enumerate(1, m, 3).unwrap(), Ratio::new(1, 1));
    }
    // composite base: a unit-norm multiplier that shrinks the measure
    assert_eq!(MadicNumber::from_i64(6, 2).unwrap().pseudonorm(), 1.0);
    assert!(image_measure_enumerate(2, 6, 4).unwrap() < Ratio::new(1, 1));
    // prime base: the image measure equals |c|
    for c in [1i64, 2, 3, 6, 9, 18, 27, 45] {
        let norm = MadicNumber::from_i64(3, c).unwrap().pseudonorm();
        let got = image_measure_enumerate(c, 3, 6).unwrap();
        assert!((*got.numer() as f64 / *got.denom() as f64 - norm).abs() < 1e-15);
    }
}

fn number(m: u32, v: i64, digits: &[u32]) -> MadicNumber {
    MadicNumber::from_digits(m, v, digits.iter().map(|d| d % m).collect()).unwrap()
}

proptest! {
    #[test]
    fn any_member_is_a_center(
        m in 2u32..8,
        r in -3i64..3,
        a in prop::collection::vec(0u32..8, 30),
        b in prop::collection::vec(0u32..8, 30),
        p in prop::collection::vec(0u32..8, 30),
        vp in -6i64..6,
    ) {
        let center = number(m, -4, &a);
        let ball = Ball::new(center.clone(), r);
        let other = center.add(&number(m, -r, &b)).unwrap();
        prop_assert!(ball.contains(&other).unwrap());
        let moved = Ball::new(other, r);
        let x = number(m, vp, &p);
        prop_assert_eq!(ball.contains(&x).unwrap(), moved.contains(&x).unwrap());
        prop_assert_eq!(ball.measure(), moved.measure());
    }

    #[test]
    fn radial_shell_sum_cross_check(m in 2u32..8, e in -5i64..6, r in -4i64..5, exponent in -0.9f64..2.0) {
        let f = RadialFunction::power(m, 1.0, exponent).unwrap();
        let k = KNorm::Power(e);
        let got = radial_character_integral(&f, k, r).unwrap().value.re;
        let oracle: f64 = (r - 400..=r)
            .map(|j| (m as f64).powf(exponent * j as f64) * character_sphere_integral(m, k, j))
            .sum();
        prop_assert!((got - oracle).abs() < 1e-12 * oracle.abs().max(1.0));
    }
}
