//! Property tests for the structural invariants: normalization, direct
//! sums, mask algebra, kernel chains, zero sets, and the numeric
//! cross-checks that shadow the exact decision procedures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selftile::cyclotomic::kernel_chain;
use selftile::digitset::DigitSet;
use selftile::fourdigit::{analyze, classify};
use selftile::inttile::{find_complement, spectrum_of_integer_tile, verify_integer_tile};
use selftile::poly::IntPolynomial;
use selftile::productform::enumerate_structures;
use selftile::render::{measure_estimate, DEFAULT_INTERVAL_BUDGET};
use selftile::zeroset::{eval_mu_hat, is_zero_of_mu_hat, jp_quality, SelfSimilarMeasure};

fn ds(values: &[u64]) -> DigitSet {
    DigitSet::from_u64s(values)
}

proptest! {
    #[test]
    fn normalize_is_idempotent(raw in prop::collection::vec(0u64..500, 1..12)) {
        let raw: Vec<BigInt> = raw.into_iter().map(BigInt::from).collect();
        let once = DigitSet::normalize(&raw).unwrap();
        let twice = DigitSet::normalize(once.set.elements()).unwrap();
        prop_assert_eq!(&once.set, &twice.set);
        prop_assert!(twice.shift.is_zero());
        prop_assert!(twice.scale.is_one());
        prop_assert!(once.set.is_canonical() || once.set.len() == 1);
    }

    #[test]
    fn direct_sum_commutes(a in prop::collection::vec(0u64..60, 1..5),
                           b in prop::collection::vec(0u64..60, 1..5)) {
        let a = DigitSet::new(a.into_iter().map(BigInt::from)).unwrap();
        let b = DigitSet::new(b.into_iter().map(BigInt::from)).unwrap();
        match (a.direct_sum(&b), b.direct_sum(&a)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "asymmetric directness: {:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn direct_sum_associates(a in prop::collection::vec(0u64..40, 1..4),
                             b in prop::collection::vec(0u64..40, 1..4),
                             c in prop::collection::vec(0u64..40, 1..4)) {
        let a = DigitSet::new(a.into_iter().map(BigInt::from)).unwrap();
        let b = DigitSet::new(b.into_iter().map(BigInt::from)).unwrap();
        let c = DigitSet::new(c.into_iter().map(BigInt::from)).unwrap();
        let left = a.direct_sum(&b).and_then(|ab| ab.direct_sum(&c));
        let right = b.direct_sum(&c).and_then(|bc| a.direct_sum(&bc));
        match (left, right) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            // directness of the total sum is what both sides report on
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "asymmetric associativity: {:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn mask_polynomial_roundtrips(raw in prop::collection::vec(0u64..2000, 1..10)) {
        let set = DigitSet::new(raw.into_iter().map(BigInt::from)).unwrap();
        let mask = set.mask_polynomial().unwrap();
        prop_assert_eq!(mask.digit_set(), set.clone());
        prop_assert_eq!(
            mask.poly().eval_bigint(&BigInt::one()),
            BigInt::from(set.len())
        );
    }

    #[test]
    fn mask_of_direct_sum_is_product(a in prop::collection::vec(0u64..50, 1..4),
                                     b in prop::collection::vec(0u64..50, 1..4)) {
        let a = DigitSet::new(a.into_iter().map(BigInt::from)).unwrap();
        let b = DigitSet::new(b.into_iter().map(BigInt::from)).unwrap();
        if let Ok(sum) = a.direct_sum(&b) {
            let pa = a.mask_polynomial().unwrap().into_poly();
            let pb = b.mask_polynomial().unwrap().into_poly();
            let ps = sum.mask_polynomial().unwrap().into_poly();
            prop_assert_eq!(ps, &pa * &pb);
        }
    }

    #[test]
    fn complement_results_verify(vals in prop::collection::vec(0u64..12, 2..5)) {
        let a = DigitSet::new(vals.into_iter().map(BigInt::from)).unwrap();
        if !a.contains(&BigInt::zero()) {
            return Ok(());
        }
        if let Some(c) = find_complement(&a, 48) {
            prop_assert!(verify_integer_tile(&a, &c.complement, c.modulus));
            prop_assert_eq!(
                (a.len() * c.complement.len()) as u64,
                c.modulus
            );
        }
    }

    #[test]
    fn classifier_invariant_under_affine_maps(
        a in 1u64..30, b in 1u64..30, c in 1u64..30,
        scale in 1u64..6, shift in 0u64..8,
    ) {
        let scale = 2 * scale - 1; // odd
        let vals = vec![0, a, a + b, a + b + c];
        let set = DigitSet::new(vals.into_iter().map(BigInt::from)).unwrap();
        if set.len() != 4 || !set.is_canonical() {
            return Ok(());
        }
        let verdict = classify(&set).unwrap().is_tile;
        let moved = set.affine(&BigInt::from(scale), &BigInt::from(shift)).unwrap();
        let normalized = DigitSet::normalize(moved.elements()).unwrap();
        prop_assert_eq!(&normalized.set, &set);
        prop_assert_eq!(classify(&normalized.set).unwrap().is_tile, verdict);
    }
}

#[test]
fn kernel_chain_divides_expanded_mask() {
    for base in [4u64, 6, 8, 9] {
        for s in enumerate_structures(base, 2) {
            let data = kernel_chain(&s.factors, s.base, &s.exponents).unwrap();
            let d = selftile::productform::expand_product_form(&s).unwrap();
            let mask = d.mask_polynomial().unwrap().into_poly();
            let kernel = data.kernel_chain.last().unwrap();
            assert!(
                kernel.divides(&mask),
                "kernel of {} does not divide its mask",
                d
            );
            // moduli grow along the chain
            for w in data.moduli.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "n_i must divide n_{{i+1}}");
            }
        }
    }
}

#[test]
fn kernel_chain_divides_lifted_masks() {
    // lifting stages by multiples of n_i preserves the kernel divisor
    use selftile::productform::sample_lifted_forms;
    for base in [4u64, 8, 9] {
        for s in enumerate_structures(base, 2).into_iter().take(6) {
            let data = kernel_chain(&s.factors, s.base, &s.exponents).unwrap();
            let kernel = data.kernel_chain.last().unwrap();
            for form in sample_lifted_forms(&s, 2, 2).unwrap() {
                let mask = form.digits().mask_polynomial().unwrap().into_poly();
                assert!(
                    kernel.divides(&mask),
                    "kernel does not divide lifted mask of {}",
                    form.digits()
                );
            }
        }
    }
}

#[test]
fn spectrum_search_falls_back_to_exhaustion() {
    // {0,1,2,7} tiles Z_4 mod 4 but has no strict complement inside Z_4,
    // so the compositional route is unavailable
    let a = ds(&[0, 1, 2, 7]);
    let spectrum = spectrum_of_integer_tile(&a, 4).unwrap();
    let expected: Vec<BigRational> = [(0, 1), (1, 4), (1, 2), (3, 4)]
        .iter()
        .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect();
    assert_eq!(spectrum.gamma, expected);
}

#[test]
fn exact_zero_test_agrees_with_numeric_evaluation() {
    // 200 seeded rationals p/q, q ≤ 4096: exact membership in Z(μ̂) must
    // match |μ̂(ξ)| < 1e−7 at depth 40
    let mut rng = ChaCha8Rng::seed_from_u64(0x2e40_5e7);
    for digits in [vec![0u64, 1, 8, 9], vec![0, 1, 4, 5], vec![0, 1, 2, 3]] {
        let m = SelfSimilarMeasure::new(4, ds(&digits)).unwrap();
        let mut checked = 0;
        while checked < 200 {
            let q = rng.gen_range(1..=4096u64);
            let p = rng.gen_range(1..=4096u64);
            let xi = BigRational::new(BigInt::from(p), BigInt::from(q));
            let exact = is_zero_of_mu_hat(&m, &xi);
            let numeric = eval_mu_hat(&m, xi.to_f64().unwrap(), 40).norm() < 1e-7;
            assert_eq!(
                exact, numeric,
                "digits {digits:?}, ξ = {p}/{q}: exact {exact} vs numeric {numeric}"
            );
            checked += 1;
        }
    }
}

#[test]
fn zero_set_scales_by_the_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    for digits in [vec![0u64, 1, 8, 9], vec![0, 1, 4, 5], vec![0, 2, 3, 5]] {
        let m = SelfSimilarMeasure::new(4, ds(&digits)).unwrap();
        let four = BigRational::from(BigInt::from(4));
        for _ in 0..300 {
            let q = rng.gen_range(1..=512u64);
            let p = rng.gen_range(1..=512u64);
            let xi = BigRational::new(BigInt::from(p), BigInt::from(q));
            if is_zero_of_mu_hat(&m, &xi) {
                assert!(
                    is_zero_of_mu_hat(&m, &(&xi * &four)),
                    "digits {digits:?}: {xi} is a zero but 4·{xi} is not"
                );
            }
        }
    }
}

#[test]
fn scale_covariance_of_mu_hat() {
    // μ̂ for c·D at ξ equals μ̂ for D at c·ξ
    let base = ds(&[0, 1, 8, 9]);
    let m1 = SelfSimilarMeasure::new(4, base.clone()).unwrap();
    for c in [2u64, 3, 5] {
        let scaled = base.scale(&BigInt::from(c)).unwrap();
        let m2 = SelfSimilarMeasure::new(4, scaled).unwrap();
        for i in 0..40 {
            let xi = i as f64 * 0.173;
            let lhs = eval_mu_hat(&m2, xi, 32);
            let rhs = eval_mu_hat(&m1, c as f64 * xi, 32);
            assert!(
                (lhs - rhs).norm() < 1e-9,
                "c = {c}, ξ = {xi}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn bessel_bound_for_orthogonal_sets() {
    // partial sums of an exactly orthogonal Λ = Γ ⊕ Z never exceed 1 + 1e−6
    let cases = [
        (vec![0u64, 1, 8, 9], vec![(0i64, 1i64), (1, 4)]),
        (vec![0, 1, 8, 9], vec![(0, 1)]),
        (vec![0, 1, 2, 3], vec![(0, 1)]),
        (vec![0, 1, 32, 33], vec![(0, 1), (1, 16), (1, 4), (5, 16)]),
    ];
    let grid: Vec<f64> = (0..31).map(|i| i as f64 / 31.0).collect();
    for (digits, gamma) in cases {
        let m = SelfSimilarMeasure::new(4, ds(&digits)).unwrap();
        let gamma: Vec<BigRational> = gamma
            .into_iter()
            .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
            .collect();
        assert!(selftile::zeroset::verify_orthogonal_set(&m, &gamma).unwrap());
        for radius in [40.0, 120.0] {
            let q = jp_quality(&m, &gamma, &grid, radius, 30);
            assert!(
                q.iter().all(|&v| v <= 1.0 + 1e-6),
                "digits {digits:?} radius {radius}: max {}",
                q.iter().cloned().fold(f64::MIN, f64::max)
            );
        }
    }
}

#[test]
fn root_families_match_numeric_roots() {
    // elements of the root families evaluate to zero on the circle;
    // rationals outside stay bounded away
    let mut rng = ChaCha8Rng::seed_from_u64(0xf007);
    let mut analyses = 0;
    let mut tries = 0;
    while analyses < 50 && tries < 10_000 {
        tries += 1;
        let a = 2 * rng.gen_range(0..16u64) + 1;
        let b = rng.gen_range(1..40u64);
        let c = a + 2 * rng.gen_range(0..20u64) + 2;
        let Ok(set) = DigitSet::new([0, a, b, c].map(BigInt::from)) else {
            continue;
        };
        if set.len() != 4 || !set.is_canonical() {
            continue;
        }
        let analysis = analyze(&set).unwrap();
        let Some(z) = analysis.zero_structure.as_ref() else {
            continue;
        };
        analyses += 1;
        let mask = set.mask_polynomial().unwrap().into_poly();
        // a sample point of each root family
        let mut family_points: Vec<BigRational> = Vec::new();
        let odd = 2 * rng.gen_range(0..50i64) + 1;
        family_points.push(BigRational::new(
            BigInt::from(odd),
            BigInt::from(2) * &z.p1,
        ));
        family_points.push(BigRational::new(
            BigInt::from(odd),
            BigInt::from(2) * &z.p2,
        ));
        if z.t == z.t_prime {
            family_points.push(BigRational::new(
                BigInt::from(odd),
                BigInt::from(2).pow(z.t + 1) * &z.p3,
            ));
        }
        for xi in &family_points {
            let v = mask.eval_unit_circle(xi.to_f64().unwrap()).norm();
            assert!(v < 1e-8, "set {set}: |P({xi})| = {v}");
        }
        // two random rationals outside every family
        let mut outside = 0;
        while outside < 2 {
            let q = rng.gen_range(1..=10_000u64);
            let p = rng.gen_range(1..=10_000u64);
            let xi = BigRational::new(BigInt::from(p), BigInt::from(q));
            let in_family = |d0: &BigInt| {
                let s = &xi * BigRational::from(d0.clone());
                s.denom().is_one() && s.numer().bit(0)
            };
            let two = BigInt::from(2);
            if in_family(&(&two * &z.p1))
                || in_family(&(&two * &z.p2))
                || in_family(&(BigInt::from(2).pow(z.t + 1) * &z.p3))
            {
                continue;
            }
            outside += 1;
            let v = mask.eval_unit_circle(xi.to_f64().unwrap()).norm();
            assert!(v > 1e-4, "set {set}: |P({xi})| = {v} too small off the root set");
        }
    }
    assert_eq!(analyses, 50);
}

#[test]
fn integer_tile_spectra_verify_and_count() {
    for (tile, modulus) in [
        (ds(&[0, 2]), 4u64),
        (ds(&[0, 1, 4, 5]), 8),
        (ds(&[0, 2, 8, 10]), 16),
        (ds(&[0, 1, 2, 3]), 4),
        (ds(&[0, 3]), 6),
        (ds(&[0, 2, 4]), 6),
        (ds(&[0, 1, 6, 7]), 12),
    ] {
        let spectrum = spectrum_of_integer_tile(&tile, modulus).unwrap();
        assert_eq!(spectrum.gamma.len(), tile.len());
        assert!(selftile::inttile::verify_finite_spectrum(&spectrum.gamma, &tile));
    }
}

#[test]
fn cover_estimate_never_increases_with_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd3c4ea5e);
    for _ in 0..25 {
        let mut vals = vec![0u64];
        while vals.len() < 4 {
            let v = rng.gen_range(1..=30u64);
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
        let d = DigitSet::new(vals.into_iter().map(BigInt::from)).unwrap();
        let mut last: Option<BigRational> = None;
        for depth in 1..=8 {
            let est = measure_estimate(4, &d, depth, DEFAULT_INTERVAL_BUDGET).unwrap();
            if let Some(prev) = &last {
                assert!(est <= *prev, "{d}: depth {depth} rose to {est} from {prev}");
            }
            last = Some(est);
        }
    }
}
