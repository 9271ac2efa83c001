//! Two-variable Pick functions `<(A - z_Y)^{-1} alpha, alpha>` with
//! `z_Y = Y z_1 + (1 - Y) z_2`, for real symmetric `A`, `0 <= Y <= 1`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TypeIRep {
    a: DMatrix<f64>,
    y: DMatrix<f64>,
    alpha: DVector<f64>,
}

fn check_symmetric(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::input(format!("{name} must be square")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::input(format!("{name} has non-finite entries")));
    }
    let scale = 1.0 + m.amax();
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::input(format!("{name} is not symmetric (defect {asym:e})")));
    }
    Ok(())
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

impl TypeIRep {
    pub fn new(a: DMatrix<f64>, y: DMatrix<f64>, alpha: DVector<f64>) -> Result<Self> {
        check_symmetric(&a, "A")?;
        check_symmetric(&y, "Y")?;
        let d = a.nrows();
        if d == 0 {
            return Err(Error::input("representation needs dimension at least 1"));
        }
        Error::check_dim(d, y.nrows())?;
        Error::check_dim(d, alpha.len())?;
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("alpha has non-finite entries"));
        }
        let (a, y) = (symmetrize(a), symmetrize(y));
        let spectrum = y.clone().symmetric_eigenvalues();
        if let Some(lam) = spectrum
            .iter()
            .find(|&&l| !(-SYMMETRY_TOL..=1.0 + SYMMETRY_TOL).contains(&l))
        {
            return Err(Error::input(format!("Y has eigenvalue {lam} outside [0, 1]")));
        }
        Ok(TypeIRep { a, y, alpha })
    }

    /// The scalar case `A = a`, `Y = y`, `alpha = 1`: `1 / (a - y z_1 - (1-y) z_2)`.
    pub fn scalar(a: f64, y: f64) -> Result<Self> {
        TypeIRep::new(
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, y),
            DVector::from_element(1, 1.0),
        )
    }

    /// Diagonal `A = diag(atoms)`, `Y = y I`, `alpha_i = sqrt(w_i)`: the
    /// measure transform evaluated at `y z_1 + (1 - y) z_2`.
    pub fn lifted_measure(atoms: &[f64], weights: &[f64], y: f64) -> Result<Self> {
        Error::check_dim(atoms.len(), weights.len())?;
        let d = atoms.len();
        TypeIRep::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(atoms)),
            DMatrix::identity(d, d) * y,
            DVector::from_iterator(d, weights.iter().map(|w| w.sqrt())),
        )
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// `Y c_1 + (1 - Y) c_2` for real `c`.
    fn real_mix(&self, c: [f64; 2]) -> DMatrix<f64> {
        let d = self.size();
        &self.y * (c[0] - c[1]) + DMatrix::identity(d, d) * c[1]
    }

    /// `A - z_Y` at a real point.
    fn real_resolvent_base(&self, p: [f64; 2]) -> DMatrix<f64> {
        &self.a - self.real_mix(p)
    }

    /// Smallest `|eigenvalue|` of `A - p_Y` relative to its size.
    fn singular_at(&self, p: [f64; 2]) -> bool {
        let b = self.real_resolvent_base(p);
        let scale = 1.0 + b.amax();
        let ev = b.symmetric_eigenvalues();
        ev.iter().any(|l| l.abs() <= 1e-13 * scale)
    }

    pub fn eval(&self, z: [Complex64; 2]) -> Result<Complex64> {
        if z[0].im == 0.0 && z[1].im == 0.0 && self.singular_at([z[0].re, z[1].re]) {
            return Err(Error::Pole(format!("A - z_Y is singular at ({}, {})", z[0].re, z[1].re)));
        }
        let d = self.size();
        let m = DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            let y = self.y[(i, j)];
            Complex64::new(self.a[(i, j)], 0.0) - z[0] * y - z[1] * (id - y)
        });
        let rhs = DVector::from_iterator(d, self.alpha.iter().map(|&v| Complex64::new(v, 0.0)));
        let u = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Pole("A - z_Y is singular".into()))?;
        Ok(u.iter().zip(self.alpha.iter()).map(|(ui, ai)| ui * ai).sum())
    }

    /// Offsets `s` where `A - (p + s x)_Y` is singular, for real `p` and a
    /// complex direction `x`: `s = 1 / mu` over the nonzero eigenvalues `mu`
    /// of `(A - p_Y)^{-1} x_Y`. For non-real `x` the returned set also holds
    /// the conjugate offsets of the conjugate direction, which share moduli.
    pub fn singular_offsets(&self, p: [f64; 2], x: [Complex64; 2]) -> Result<Vec<Complex64>> {
        if self.singular_at(p) {
            return Err(Error::NotAnalytic);
        }
        let binv = self
            .real_resolvent_base(p)
            .try_inverse()
            .ok_or(Error::NotAnalytic)?;
        let re = &binv * self.real_mix([x[0].re, x[1].re]);
        let mus: Vec<Complex64> = if x[0].im == 0.0 && x[1].im == 0.0 {
            eigenvalues(re)?
        } else {
            let im = &binv * self.real_mix([x[0].im, x[1].im]);
            let d = self.size();
            let mut big = DMatrix::zeros(2 * d, 2 * d);
            big.view_mut((0, 0), (d, d)).copy_from(&re);
            big.view_mut((d, d), (d, d)).copy_from(&re);
            big.view_mut((0, d), (d, d)).copy_from(&(-&im));
            big.view_mut((d, 0), (d, d)).copy_from(&im);
            eigenvalues(big)?
        };
        let scale = mus.iter().map(|m| m.norm()).fold(0.0, f64::max);
        Ok(mus
            .into_iter()
            .filter(|m| m.norm() > 1e-14 * scale && m.norm() > 0.0)
            .map(|m| {
                // eigenvalues of a matrix similar to a symmetric one come out
                // with rounding-level imaginary parts
                let m = if m.im.abs() <= 1e-10 * m.norm() {
                    Complex64::new(m.re, 0.0)
                } else {
                    m
                };
                m.inv()
            })
            .collect())
    }
}

fn eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Accuracy("eigenvalue iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::input(format!("{name} must be a square array of rows")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[derive(Serialize, Deserialize)]
struct TypeIJson {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
    alpha: Vec<f64>,
}

impl Serialize for TypeIRep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TypeIJson {
            a: rows(&self.a),
            y: rows(&self.y),
            alpha: self.alpha.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TypeIRep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TypeIJson::deserialize(d)?;
        let build = || -> Result<TypeIRep> {
            TypeIRep::new(
                from_rows(&raw.a, "A")?,
                from_rows(&raw.y, "Y")?,
                DVector::from_vec(raw.alpha.clone()),
            )
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// `eval_type1`.
pub fn eval_type1(rep: &TypeIRep, z: [Complex64; 2]) -> Result<Complex64> {
    rep.eval(z)
}
