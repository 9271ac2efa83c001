//! Seeded families of Pick oracles and admissible `(p, x)` pairs for
//! inequality sweeps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{DirectionVec, Point};
use crate::pick::{DiscreteMeasure, PickOracle, TypeIRep};

/// Between one and `max_atoms` atoms uniform in `[lo, hi]` with weights in
/// `(0, 1]`.
pub fn random_measure<R: Rng>(rng: &mut R, max_atoms: usize, lo: f64, hi: f64) -> DiscreteMeasure {
    let n = rng.gen_range(1..=max_atoms.max(1));
    let atoms = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let weights = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    DiscreteMeasure::new(atoms, weights).expect("positive weights and finite atoms")
}

/// `A` symmetric with entries in `(-2, 2)`, `Y = Q diag(y) Q^T` with `y` in
/// `[0, 1]` and `Q` orthogonal, `alpha` with entries in `(-1, 1)`; size
/// between one and `max_size`.
pub fn random_type1<R: Rng>(rng: &mut R, max_size: usize) -> TypeIRep {
    let d = rng.gen_range(1..=max_size.max(1));
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-2.0..2.0));
    let a = (&g + g.transpose()) * 0.5;
    let q = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let eig = DVector::from_fn(d, |_, _| rng.gen::<f64>());
    let y = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    let alpha = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    TypeIRep::new(a, y, alpha).expect("symmetric input with spectrum in [0, 1]")
}

/// Twenty lifted measures, twenty Type I representations, `geom2`,
/// `-2/(z_1+z_2)` and four linear oracles, all in two variables.
pub fn builtin_corpus(seed: u64) -> Result<Vec<PickOracle>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(46);
    for i in 0..20 {
        let mu = random_measure(&mut rng, 6, -3.0, 3.0);
        let y = rng.gen::<f64>();
        out.push(PickOracle::lifted_measure(&mu, y)?.with_id(format!("lifted_measure_{i}")));
    }
    for i in 0..20 {
        let rep = random_type1(&mut rng, 4);
        out.push(PickOracle::type1(rep)?.with_id(format!("type1_{i}")));
    }
    out.push(PickOracle::geom2());
    out.push(PickOracle::neg_reciprocal_mean());
    for c in [[1.0, 0.0], [0.0, 2.0], [2.0, 3.0], [0.5, 0.5]] {
        out.push(PickOracle::linear(c.to_vec())?);
    }
    Ok(out)
}

/// A real point of the analytic domain with real parts in `(-3, 3)` and a
/// positive direction whose closed segment `p +- x` stays in the domain,
/// shrunk by a random factor in `(0.05, 0.95)` of the room. `None` when
/// the sampled point is too close to the singular set.
pub fn admissible_pair<R: Rng>(o: &PickOracle, rng: &mut R) -> Option<(Point, DirectionVec)> {
    let n = o.dim();
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    if !o.is_analytic_at(&p) {
        return None;
    }
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let (fwd, back) = o.real_reach(&p, &x).ok()?;
    let room = fwd.min(back).finite().unwrap_or(2.0);
    if room < 1e-6 {
        return None;
    }
    let scale = room.min(2.0) * rng.gen_range(0.05..0.95);
    let x = x.iter().map(|v| v * scale).collect();
    Some((Point::new(p).ok()?, DirectionVec::new(x).ok()?))
}

/// Up to `count` admissible pairs, skipping rejected samples.
pub fn admissible_pairs<R: Rng>(o: &PickOracle, rng: &mut R, count: usize) -> Vec<(Point, DirectionVec)> {
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count {
        tries += 1;
        if let Some(pair) = admissible_pair(o, rng) {
            out.push(pair);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_and_deterministic() {
        let a = builtin_corpus(7).unwrap();
        let b = builtin_corpus(7).unwrap();
        assert!(a.len() >= 40);
        assert_eq!(a, b);
    }

    #[test]
    fn pairs_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for o in builtin_corpus(1).unwrap() {
            let pairs = admissible_pairs(&o, &mut rng, 10);
            assert_eq!(pairs.len(), 10, "{}", o.id());
            for (p, x) in pairs {
                let (f, b) = o.real_reach(p.coords(), x.coords()).unwrap();
                assert!(f.exceeds(1.0) && b.exceeds(1.0));
            }
        }
    }
}
