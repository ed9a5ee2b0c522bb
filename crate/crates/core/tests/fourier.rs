use madic::fourier::*;
use madic::haar::{radial_character_integral, KNorm, RadialFunction, Tail};
use madic::MadicNumber;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random(rng: &mut ChaCha8Rng, m: u32, r: i64, l: i64) -> LocallyConstantFunction {
    let size = cell_count(m, r, l, MAX_CELLS).unwrap();
    let v = (0..size).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    LocallyConstantFunction::new(m, r, l, v).unwrap()
}

/// A representative with its unknown high digits set to zero.
fn exact(x: MadicNumber) -> MadicNumber {
    let Some(v) = x.valuation() else { return MadicNumber::zero(x.base()).unwrap() };
    let digits = (v..v + 48).map(|p| x.digit_at(p).unwrap_or(0)).collect();
    MadicNumber::from_digits(x.base(), v, digits).unwrap()
}

fn max_diff(a: &LocallyConstantFunction, b: &LocallyConstantFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn grid() -> impl Strategy<Value = (u32, i64, i64)> {
    (prop::sample::select(vec![2u32, 3, 4, 5, 6]), -3i64..4, 1i64..7)
        .prop_filter("at most 3^8 cells", |&(m, _, w)| (m as f64).powi(w as i32) <= 6561.0)
        .prop_map(|(m, r, w)| (m, r, r - w))
}

#[test]
fn round_trip_base_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let f = random(&mut rng, 6, 2, -2);
        assert!(max_diff(&inverse(&forward(&f).unwrap()).unwrap(), &f) < 1e-10);
    }
}

#[test]
fn indicator_examples() {
    let unit = LocallyConstantFunction::ball_indicator(3, 0, 1.0).unwrap();
    assert!(max_diff(&inverse(&forward(&unit).unwrap()).unwrap(), &unit) < 1e-15);

    let spike = LocallyConstantFunction::ball_indicator(3, -2, 9.0).unwrap();
    let back = inverse(&forward(&spike).unwrap()).unwrap();
    assert_eq!(back.values(), spike.values());

    let zero = LocallyConstantFunction::zero(5, 1, -1).unwrap();
    assert!(forward(&zero).unwrap().values().iter().all(|v| *v == c(0.0)));
}

#[test]
fn unit_ball_is_idempotent_under_convolution() {
    let unit = LocallyConstantFunction::ball_indicator(3, 0, 1.0).unwrap().embed(1, -1).unwrap();
    let conv = convolve(&unit, &unit).unwrap();
    assert!(max_diff(&conv, &unit) < 1e-14);
    let zero = LocallyConstantFunction::zero(3, 1, -1).unwrap();
    assert!(convolve(&unit, &zero).unwrap().values().iter().all(|v| *v == c(0.0)));
}

#[test]
fn convolution_theorem_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (f, g) = (random(&mut rng, 3, 1, -1), random(&mut rng, 3, 1, -1));
        let direct = convolve(&f, &g).unwrap();
        let spectral = pointwise_product(&forward(&f).unwrap(), &forward(&g).unwrap()).unwrap();
        assert!(max_diff(&forward(&direct).unwrap(), &spectral) < 1e-10);
    }
}

#[test]
fn convolution_mass_of_step_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let f = random(&mut rng, 2, 3, -2);
        let g = random(&mut rng, 2, 1, -3);
        let nonneg = |h: &LocallyConstantFunction| {
            let v = h.values().iter().map(|z| c(z.re.abs())).collect();
            LocallyConstantFunction::new(h.base(), h.support(), h.constancy(), v).unwrap()
        };
        let (f, g) = (nonneg(&f), nonneg(&g));
        let mass = convolve(&f, &g).unwrap().integral();
        let product = f.integral() * g.integral();
        assert!((mass - product).norm() < 1e-10 * product.norm().max(1.0));
    }
}

#[test]
fn fast_matches_naive_up_to_three_to_the_eighth() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for w in 1..=8 {
        let f = random(&mut rng, 3, 3, 3 - w);
        assert!(max_diff(&forward(&f).unwrap(), &forward_naive(&f).unwrap()) < 1e-11);
        let g = forward(&f).unwrap();
        assert!(max_diff(&inverse(&g).unwrap(), &inverse_naive(&g).unwrap()) < 1e-11);
    }
}

#[test]
fn radial_functions_match_radial_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (m, r, l) in [(2u32, 2i64, -3i64), (3, 1, -2), (5, 0, -2), (6, 1, -1)] {
        // h(m^j) for j = l ..= r; cells inside B_l carry h(m^l)
        let shells: Vec<f64> = (l..=r).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = |x: &MadicNumber| {
            let j = x.valuation().map_or(l, |v| (-v).max(l));
            c(shells[(j - l) as usize])
        };
        let f = LocallyConstantFunction::from_fn(m, r, l, h).unwrap();
        let radial = RadialFunction::new(
            m,
            l,
            shells.iter().map(|&v| c(v)).collect(),
            Tail::Geometric(c(1.0)),
            Tail::Zero,
        )
        .unwrap();
        let g = forward(&f).unwrap();
        let maps = coset_index_maps(m, g.support(), g.constancy()).unwrap();
        for j in 0..g.len() {
            let k = exact(x_representative(&maps, j).unwrap());
            let want = radial_character_integral(&radial, KNorm::of(&k).unwrap(), r).unwrap().value;
            let got = g.evaluate(&k).unwrap();
            assert!((got - want).norm() < 1e-12, "m={m} k={k}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn round_trip_and_plancherel((m, r, l) in grid(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random(&mut rng, m, r, l);
        let g = forward(&f).unwrap();
        prop_assert_eq!((g.support(), g.constancy()), (-l, -r));
        prop_assert!(max_diff(&inverse(&g).unwrap(), &f) < 1e-10);
        prop_assert!((f.energy() - g.energy()).abs() < 1e-10 * f.energy().max(1.0));
    }

    #[test]
    fn linearity((m, r, l) in grid(), seed in any::<u64>(), a in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, h) = (random(&mut rng, m, r, l), random(&mut rng, m, r, l));
        let combo: Vec<Complex64> = f.values().iter().zip(h.values()).map(|(x, y)| x * a + y).collect();
        let combo = LocallyConstantFunction::new(m, r, l, combo).unwrap();
        let (ff, fh) = (forward(&f).unwrap(), forward(&h).unwrap());
        let want: Vec<Complex64> = ff.values().iter().zip(fh.values()).map(|(x, y)| x * a + y).collect();
        let want = LocallyConstantFunction::new(m, -l, -r, want).unwrap();
        prop_assert!(max_diff(&forward(&combo).unwrap(), &want) < 1e-10);
    }

    #[test]
    fn real_input_has_conjugate_symmetric_spectrum((m, r, l) in grid(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..cell_count(m, r, l, MAX_CELLS).unwrap()).map(|_| c(rng.random_range(-1.0..1.0))).collect();
        let f = LocallyConstantFunction::new(m, r, l, v).unwrap();
        let g = forward(&f).unwrap();
        let maps = coset_index_maps(m, g.support(), g.constancy()).unwrap();
        for j in 0..g.len() {
            let k = exact(x_representative(&maps, j).unwrap());
            let minus = g.evaluate(&k.neg()).unwrap();
            prop_assert!((g.values()[j] - minus.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn spectrum_vanishes_outside_predicted_support((m, r, l) in grid(), seed in any::<u64>(), depth in 1i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random(&mut rng, m, r, l);
        let digits: Vec<u32> = (0..20).map(|i| if i == 0 { 1 } else { rng.random_range(0..m) }).collect();
        let k = MadicNumber::from_digits(m, l - depth, digits).unwrap();
        prop_assert_eq!(forward_at(&f, &k).unwrap(), c(0.0));
        if cell_count(m, r + 1, l - depth, 1 << 16).is_ok() {
            let g = forward(&f.embed(r + 1, l - depth).unwrap()).unwrap();
            prop_assert!(g.evaluate(&k).unwrap().norm() < 1e-10);
        }
    }
}
