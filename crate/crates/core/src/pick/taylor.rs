//! Homogeneous Taylor forms `h^{(k)}(p)[z] / k!` of an oracle at a real point.
//!
//! Directional series are taken along the complex directions
//! `(1, l_2 w^{j_2}, .., l_n w^{j_n})`, with `w` a primitive `(K+1)`-th root
//! of unity and `l` an aspect vector. The coefficient of `z^e` in the degree-`k`
//! form is the `(e_2, .., e_n)` discrete Fourier coefficient of the order-`k`
//! directional coefficients, divided by `l^e`. Fourier modes that belong to
//! no degree-`k` monomial must vanish; their size is the fit residual.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;

use crate::chebyshev::{chebyshev_nodes, gautschi_bound, gautschi_index, interpolate_coefficients};

use super::cauchy::directional_series;
use super::{roots_of_unity, OracleKind, PickOracle};

/// Highest dimension for which full tables are built.
pub const MAX_TABLE_DIM: usize = 3;
/// Allowed fit residual relative to the largest directional coefficient.
const FIT_TOL: f64 = 1e-7;

/// Exponent vectors of the degree-`k` monomials in `n` variables, ordered
/// by the exponents of `z_2, .., z_n` lexicographically.
pub fn monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tail = vec![0usize; n.saturating_sub(1)];
    fn rec(pos: usize, left: usize, tail: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if pos == tail.len() {
            let mut e = Vec::with_capacity(tail.len() + 1);
            e.push(left);
            e.extend_from_slice(tail);
            out.push(e);
            let _ = k;
            return;
        }
        for v in 0..=left {
            tail[pos] = v;
            rec(pos + 1, left - v, tail, k, out);
        }
        tail[pos] = 0;
    }
    if n == 0 {
        return out;
    }
    rec(0, k, &mut tail, k, &mut out);
    out
}

/// A homogeneous polynomial stored by monomial coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneousForm {
    dim: usize,
    degree: usize,
    exponents: Vec<Vec<usize>>,
    coeffs: Vec<f64>,
}

impl HomogeneousForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let exponents = monomials(dim, degree);
        let coeffs = vec![0.0; exponents.len()];
        HomogeneousForm {
            dim,
            degree,
            exponents,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.exponents.iter().map(|e| e.as_slice()).zip(self.coeffs.iter().copied())
    }

    pub fn coefficient(&self, exponent: &[usize]) -> f64 {
        self.exponents
            .iter()
            .position(|e| e == exponent)
            .map_or(0.0, |i| self.coeffs[i])
    }

    fn set(&mut self, exponent: &[usize], value: f64) {
        if let Some(i) = self.exponents.iter().position(|e| e == exponent) {
            self.coeffs[i] = value;
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms()
            .filter(|(_, c)| *c != 0.0)
            .map(|(e, c)| {
                e.iter()
                    .zip(z)
                    .fold(Complex64::new(c, 0.0), |acc, (&p, zi)| acc * zi.powu(p as u32))
            })
            .sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> f64 {
        self.terms()
            .map(|(e, c)| e.iter().zip(x).fold(c, |acc, (&p, xi)| acc * xi.powi(p as i32)))
            .sum()
    }
}

/// How sampling directions are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    /// Real directions `(1, l_2 u_i, ..)` with `u_i = 1 + nu_i`, `nu_i` the
    /// Chebyshev nodes; monomials separated by tensor interpolation.
    #[default]
    PositiveNodes,
    /// Complex directions `(1, l_2 w^j, ..)` with `w` a root of unity;
    /// monomials separated by a discrete Fourier transform. Stable to high order.
    RootsOfUnity,
}

/// Sampling options for [`taylor_table`].
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TableOptions {
    /// Relative sizes `(1, l_2, .., l_n)` of the sampling directions; match
    /// the shape of the region where the series will be summed. Ones if unset.
    pub aspect: Option<Vec<f64>>,
    pub scheme: SamplingScheme,
}

impl TableOptions {
    pub fn roots_of_unity(aspect: Option<Vec<f64>>) -> Self {
        TableOptions {
            aspect,
            scheme: SamplingScheme::RootsOfUnity,
        }
    }
}

/// Homogeneous Taylor forms of degrees `0..=K` at a real point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorTable {
    base: Point,
    order: usize,
    forms: Vec<HomogeneousForm>,
    /// Fit residual of each degree relative to its directional data.
    residuals: Vec<f64>,
    /// The series terminates within the table, so it has no tail.
    exact: bool,
}

impl TaylorTable {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `h(p)`.
    pub fn value(&self) -> f64 {
        self.forms[0].coefficient(&vec![0; self.dim()])
    }

    pub fn form(&self, k: usize) -> &HomogeneousForm {
        &self.forms[k]
    }

    pub fn forms(&self) -> &[HomogeneousForm] {
        &self.forms
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `form_k(z)` for `k = 0..=K`.
    pub fn terms(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Error::check_dim(self.dim(), z.len())?;
        Ok(self.forms.iter().map(|f| f.eval(z)).collect())
    }

    /// Partial sum of the series at offset `z`.
    pub fn sum(&self, z: &[Complex64]) -> Result<Complex64> {
        Ok(self.terms(z)?.into_iter().sum())
    }

    /// `h^{(k)}(p)[x] = k! form_k(x)`.
    pub fn derivative(&self, k: usize, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.dim(), x.len())?;
        if k > self.order {
            return Err(Error::input(format!("order {k} exceeds table order {}", self.order)));
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        Ok(fact * self.forms[k].eval_real(x))
    }
}

/// Builds the degree `0..=K` Taylor forms of `o` at `p`.
pub fn taylor_table(o: &PickOracle, p: &Point, k: usize, opts: &TableOptions) -> Result<TaylorTable> {
    let n = o.dim();
    Error::check_dim(n, p.dim())?;
    if n > MAX_TABLE_DIM {
        return Err(Error::input(format!(
            "full Taylor tables are limited to dimension {MAX_TABLE_DIM}, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::input("order must be at least 1"));
    }
    if !o.is_analytic_at(p.coords()) {
        return Err(Error::NotAnalytic);
    }
    if let OracleKind::Linear(c) = o.kind() {
        return Ok(linear_table(o, c, p, k));
    }
    let aspect = match &opts.aspect {
        Some(a) => {
            Error::check_dim(n, a.len())?;
            if a.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Sampling(format!("aspect entries must be positive, got {a:?}")));
            }
            a.clone()
        }
        None => vec![1.0; n],
    };

    let m = k + 1;
    let free = n - 1;
    let count = m.pow(free as u32);
    let roots = roots_of_unity(m);
    let nodes = chebyshev_nodes(k);
    let mut data: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    let mut noise: Vec<Vec<f64>> = Vec::with_capacity(count);
    for flat in 0..count {
        let idx = unflatten(flat, m, free);
        let mut x = vec![Complex64::new(1.0, 0.0)];
        for (a, &j) in idx.iter().enumerate() {
            let step = match opts.scheme {
                SamplingScheme::RootsOfUnity => roots[j],
                SamplingScheme::PositiveNodes => Complex64::new(1.0 + nodes.nodes()[j], 0.0),
            };
            x.push(step * aspect[a + 1]);
        }
        let series = directional_series(o, p.coords(), &x, k)?;
        data.push(series.coeffs);
        noise.push(series.noise);
    }
    // amplification of sample errors into the separated coefficients
    let amplification = match opts.scheme {
        SamplingScheme::RootsOfUnity => 1.0,
        SamplingScheme::PositiveNodes => {
            let per_axis = (m as f64) * gautschi_bound(gautschi_index(k)) * 2f64.powi(k as i32);
            per_axis.powi(free as i32)
        }
    };

    let mut forms = Vec::with_capacity(k + 1);
    let mut residuals = Vec::with_capacity(k + 1);
    for deg in 0..=k {
        let samples: Vec<Complex64> = data.iter().map(|c| c[deg]).collect();
        let modes = match opts.scheme {
            SamplingScheme::RootsOfUnity => fourier_modes(&samples, &roots, m, free),
            SamplingScheme::PositiveNodes => shifted_interpolation(&samples, m, free)?,
        };
        let scale = samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = noise.iter().map(|v| v[deg]).fold(0.0, f64::max);
        let mut form = HomogeneousForm::zero(n, deg);
        let mut defect = 0.0f64;
        for (mode_flat, mode) in modes.iter().enumerate() {
            let b = unflatten(mode_flat, m, free);
            let tail: usize = b.iter().sum();
            if tail <= deg {
                let lam: f64 = b.iter().enumerate().map(|(a, &e)| aspect[a + 1].powi(e as i32)).product();
                let mut e = vec![deg - tail];
                e.extend_from_slice(&b);
                form.set(&e, mode.re / lam);
                defect = defect.max(mode.im.abs());
            } else {
                defect = defect.max(mode.norm());
            }
        }
        let allowed = amplification.max(1.0) * (FIT_TOL * scale + 10.0 * floor);
        if defect > allowed {
            return Err(Error::Accuracy(format!(
                "degree {deg}: fit residual {defect:e} exceeds {allowed:e}"
            )));
        }
        residuals.push(if scale > 0.0 { defect / scale } else { 0.0 });
        forms.push(form);
    }
    Ok(TaylorTable {
        base: p.clone(),
        order: k,
        forms,
        residuals,
        exact: false,
    })
}

/// `hat{s}(b) = m^{-free} sum_j s(j) w^{-b.j}` over the tensor grid.
fn fourier_modes(samples: &[Complex64], roots: &[Complex64], m: usize, free: usize) -> Vec<Complex64> {
    let count = samples.len();
    (0..count)
        .map(|mode_flat| {
            let b = unflatten(mode_flat, m, free);
            let mut acc = Complex64::new(0.0, 0.0);
            for (flat, v) in samples.iter().enumerate() {
                let j = unflatten(flat, m, free);
                let phase: usize = b.iter().zip(&j).map(|(bi, ji)| bi * ji).sum::<usize>() % m;
                acc += v * roots[phase].conj();
            }
            acc / count as f64
        })
        .collect()
}

/// Coefficients of the tensor polynomial in `u = 1 + nu` through the grid
/// samples, one axis at a time. Imaginary parts are carried along so they
/// show up in the residual.
fn shifted_interpolation(samples: &[Complex64], m: usize, free: usize) -> Result<Vec<Complex64>> {
    let mut grid = samples.to_vec();
    for axis in 0..free {
        let stride = m.pow(axis as u32);
        let mut next = grid.clone();
        for flat in 0..grid.len() {
            if !(flat / stride).is_multiple_of(m) {
                continue;
            }
            let line: Vec<Complex64> = (0..m).map(|i| grid[flat + i * stride]).collect();
            let re = to_shifted_powers(&fit_line(&line.iter().map(|v| v.re).collect::<Vec<_>>())?);
            let im = to_shifted_powers(&fit_line(&line.iter().map(|v| v.im).collect::<Vec<_>>())?);
            for i in 0..m {
                next[flat + i * stride] = Complex64::new(re[i], im[i]);
            }
        }
        grid = next;
    }
    Ok(grid)
}

fn fit_line(values: &[f64]) -> Result<Vec<f64>> {
    interpolate_coefficients(values).map_err(|e| Error::Sampling(format!("node interpolation failed: {e}")))
}

/// Rewrites `sum g_j nu^j` as `sum a_b u^b` with `nu = u - 1`.
fn to_shifted_powers(g: &[f64]) -> Vec<f64> {
    let m = g.len();
    let mut out = vec![0.0; m];
    for (j, &gj) in g.iter().enumerate() {
        let mut binom = 1.0;
        for b in (0..=j).rev() {
            // C(j, b) (-1)^{j-b}
            let sign = if (j - b) % 2 == 0 { 1.0 } else { -1.0 };
            out[b] += sign * binom * gj;
            binom = binom * b as f64 / (j - b + 1) as f64;
        }
    }
    out
}

fn unflatten(mut flat: usize, m: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for v in out.iter_mut() {
        *v = flat % m;
        flat /= m;
    }
    out
}

fn linear_table(o: &PickOracle, c: &[f64], p: &Point, k: usize) -> TaylorTable {
    let n = c.len();
    let mut forms: Vec<HomogeneousForm> = (0..=k).map(|d| HomogeneousForm::zero(n, d)).collect();
    let value = o.eval_real(p.coords()).unwrap_or(0.0);
    forms[0].set(&vec![0; n], value);
    for (i, &ci) in c.iter().enumerate() {
        let mut e = vec![0; n];
        e[i] = 1;
        forms[1].set(&e, ci);
    }
    TaylorTable {
        base: p.clone(),
        order: k,
        forms,
        residuals: vec![0.0; k + 1],
        exact: true,
    }
}
