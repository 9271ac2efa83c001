//! Finite atomic measures and their Cauchy transforms `sum w_i / (t_i - z)`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Atoms `t_i` with positive weights `w_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Error::check_dim(atoms.len(), weights.len())?;
        if atoms.is_empty() {
            return Err(Error::input("a measure needs at least one atom"));
        }
        if let Some(t) = atoms.iter().find(|t| !t.is_finite()) {
            return Err(Error::input(format!("atom {t} is not finite")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::input(format!("weight {w} is not a positive finite number")));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn point_mass(at: f64, weight: f64) -> Result<Self> {
        DiscreteMeasure::new(vec![at], vec![weight])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// `sum w_i / (t_i - z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, w) in self.pairs() {
            let d = Complex64::new(t, 0.0) - z;
            if d.re == 0.0 && d.im == 0.0 {
                return Err(Error::Pole(format!("evaluation at the atom {t}")));
            }
            acc += w / d;
        }
        Ok(acc)
    }

    /// `a_1..a_K` with `a_{n+1} = sum w_i t_i^n`.
    pub fn moment_coefficients(&self, k: usize) -> Result<Vec<f64>> {
        if let Some(t) = self.atoms.iter().find(|t| t.abs() > 1.0) {
            return Err(Error::Support(*t));
        }
        let mut powers: Vec<f64> = vec![1.0; self.len()];
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            out.push(powers.iter().zip(&self.weights).map(|(p, w)| p * w).sum());
            for (p, t) in powers.iter_mut().zip(&self.atoms) {
                *p *= t;
            }
        }
        Ok(out)
    }

    /// Taylor coefficients `c_k = sum w_i / (t_i - p)^{k+1}`, `k = 0..=order`,
    /// of the transform at a real point off the support.
    pub fn taylor_at(&self, p: f64, order: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; order + 1];
        for (t, w) in self.pairs() {
            if t == p {
                return Err(Error::NotAnalytic);
            }
            let u = 1.0 / (t - p);
            let mut term = w * u;
            for c in out.iter_mut() {
                *c += term;
                term *= u;
            }
        }
        Ok(out)
    }

    /// The measure whose moments are the Taylor coefficients of
    /// `s -> h(p + b s)`: atoms `b / (t_i - p)`, weights `w_i b / (t_i - p)^2`.
    /// Its support lies in `[-1, 1]` iff `b` is at most the distance from `p`
    /// to the support.
    pub fn rescaled_at(&self, p: f64, b: f64) -> Result<DiscreteMeasure> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::input(format!("scale must be positive, got {b}")));
        }
        let mut atoms = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for (t, w) in self.pairs() {
            if t == p {
                return Err(Error::NotAnalytic);
            }
            let u = 1.0 / (t - p);
            atoms.push(b * u);
            weights.push(w * b * u * u);
        }
        DiscreteMeasure::new(atoms, weights)
    }

    /// Distance from `p` to the nearest atom.
    pub fn distance_to_support(&self, p: f64) -> f64 {
        self.atoms.iter().map(|t| (t - p).abs()).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Deserialize)]
struct MeasureJson {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(d)?;
        DiscreteMeasure::new(raw.atoms, raw.weights).map_err(serde::de::Error::custom)
    }
}

/// `eval_measure_transform`.
pub fn eval_measure_transform(mu: &DiscreteMeasure, z: Complex64) -> Result<Complex64> {
    mu.eval(z)
}

/// `moment_coefficients`.
pub fn moment_coefficients(mu: &DiscreteMeasure, k: usize) -> Result<Vec<f64>> {
    mu.moment_coefficients(k)
}
