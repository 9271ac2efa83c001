use num_complex::Complex64;
use proptest::prelude::*;

use pickwedge::chebyshev::{chebyshev_nodes, gautschi_bound, gautschi_index, interpolate_coefficients, interpolation_growth_bound};

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Monomial coefficients of `T_k`.
fn chebyshev_t(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn grid_sup(c: &[f64]) -> f64 {
    (0..1000)
        .map(|i| horner(c, Complex64::new(-1.0 + 2.0 * i as f64 / 999.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..=max_degree).prop_flat_map(|k| prop::collection::vec(-1.0..1.0f64, k + 1))
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..3.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn growth_bound_dominates_normalised_polynomials(c in poly_strategy(10), zs in prop::collection::vec(disk_point(), 8)) {
        let sup = grid_sup(&c);
        prop_assume!(sup > 1e-9);
        let c: Vec<f64> = c.iter().map(|a| a / sup).collect();
        let k = c.len() - 1;
        for z in zs {
            let v = horner(&c, z).norm();
            prop_assert!(v <= interpolation_growth_bound(k, z, 1.0), "k={k} z={z} |p|={v}");
        }
    }

    #[test]
    fn interpolation_reproduces_coefficients(c in poly_strategy(12)) {
        let nodes = chebyshev_nodes(c.len() - 1);
        let values: Vec<f64> = nodes.nodes().iter().map(|&t| horner(&c, Complex64::new(t, 0.0)).re).collect();
        let got = interpolate_coefficients(&values).unwrap();
        prop_assert_eq!(got.len(), c.len());
        for (a, b) in got.iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-10, "{got:?} vs {c:?}");
        }
    }
}

#[test]
fn chebyshev_polynomials_come_within_the_stated_factor() {
    for k in 0..=10 {
        let t = chebyshev_t(k);
        for z in [Complex64::new(3.0, 0.0), Complex64::new(0.0, 3.0), Complex64::new(-2.0, 2.0)] {
            let v = horner(&t, z).norm();
            let bound = interpolation_growth_bound(k, z, 1.0);
            assert!(v <= bound, "k={k} z={z}");
            let factor = (k + 1) as f64 * gautschi_bound(gautschi_index(k));
            assert!(v * factor >= bound, "k={k} z={z}: {v} * {factor} < {bound}");
        }
    }
}
