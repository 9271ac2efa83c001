use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pickwedge::julia::corpus::{admissible_pair, builtin_corpus, random_measure, random_type1};
use pickwedge::pick::{directional_derivatives, sample_upper_point, DiscreteMeasure, PickOracle, TypeIRep};

fn corpus() -> Vec<PickOracle> {
    let mut out = builtin_corpus(0x51c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51d);
    for _ in 0..5 {
        let mu = random_measure(&mut rng, 5, -2.0, 2.0);
        out.push(PickOracle::measure_nd(&mu, &[0.2, 0.3, 0.5]).unwrap());
        out.push(PickOracle::measure(mu).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracles_map_the_poly_half_plane_to_the_closed_upper_half_plane(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for o in corpus() {
            for _ in 0..25 {
                let z = sample_upper_point(&mut rng, o.dim());
                let h = o.eval(&z).unwrap();
                prop_assert!(h.im >= -1e-12, "{}: Im h({z:?}) = {}", o.id(), h.im);
            }
        }
    }

    #[test]
    fn first_derivatives_are_nonnegative_along_positive_directions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for o in corpus() {
            if let Some((p, x)) = admissible_pair(&o, &mut rng) {
                let d = directional_derivatives(&o, &p, &x, 1).unwrap();
                prop_assert!(d[0] >= -1e-10, "{}: h'({p:?})[{x:?}] = {}", o.id(), d[0]);
            }
        }
    }

    #[test]
    fn derivatives_scale_with_the_direction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for o in corpus() {
            let Some((p, x)) = admissible_pair(&o, &mut rng) else { continue };
            let d1 = directional_derivatives(&o, &p, &x, 8).unwrap();
            let d2 = directional_derivatives(&o, &p, &x.scaled(2.0).unwrap(), 8).unwrap();
            for (k, (a, b)) in d1.iter().zip(&d2).enumerate() {
                let want = a * 2f64.powi(k as i32 + 1);
                prop_assert!((b - want).abs() <= 1e-8 * want.abs().max(1e-6), "{} order {}: {b} vs {want}", o.id(), k + 1);
            }
        }
    }
}

fn unit_measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-1.0..=1.0f64, 1e-6..1.0f64), 1..12).prop_map(|v| {
        let (atoms, weights) = v.into_iter().unzip();
        DiscreteMeasure::new(atoms, weights).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn moment_coefficients_are_dominated_by_the_first(mu in unit_measure()) {
        let a = mu.moment_coefficients(50).unwrap();
        for (k, ak) in a.iter().enumerate() {
            prop_assert!(ak.abs() <= a[0] * (1.0 + 1e-14), "a_{} = {ak} vs a_1 = {}", k + 1, a[0]);
        }
    }

    #[test]
    fn scalar_type_one_reduces_to_a_reciprocal(y in 0.0..=1.0f64, seed in any::<u64>()) {
        let rep = TypeIRep::scalar(0.0, y).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = sample_upper_point(&mut rng, 2);
        let want = -Complex64::new(1.0, 0.0) / (y * z[0] + (1.0 - y) * z[1]);
        let got = rep.eval([z[0], z[1]]).unwrap();
        prop_assert!((got - want).norm() <= 1e-14 * want.norm().max(1.0), "{got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_type_one_representations_are_pick(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_type1(&mut rng, 6);
        for _ in 0..20 {
            let z = sample_upper_point(&mut rng, 2);
            prop_assert!(rep.eval([z[0], z[1]]).unwrap().im >= -1e-12);
        }
    }
}
