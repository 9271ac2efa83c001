//! Chebyshev nodes, their Vandermonde matrices, and the interpolation growth
//! bound that drives the wedge regulators.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest degree whose Vandermonde inverse is checked against the bound.
pub const MAX_VERIFIED_DEGREE: usize = 15;

/// Residual above which a computed inverse is considered unreliable.
const INVERSE_RESIDUAL_LIMIT: f64 = 1e-8;

/// Chebyshev points of the first kind for polynomials of degree `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    degree: usize,
    nodes: Vec<f64>,
}

impl NodeSet {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Strictly decreasing nodes in `(-1, 1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `cos((2i + 1) pi / (2k + 2))` for `i = 0..=k`.
pub fn chebyshev_nodes(k: usize) -> NodeSet {
    let denom = (2 * k + 2) as f64;
    let nodes = (0..=k)
        .map(|i| {
            let node = ((2 * i + 1) as f64 * PI / denom).cos();
            // the middle node of an odd count is exactly zero
            if 2 * i == k {
                0.0
            } else {
                node
            }
        })
        .collect();
    NodeSet { degree: k, nodes }
}

/// `V[i][j] = node_i^j`.
#[derive(Clone, Debug)]
pub struct VandermondeMatrix {
    entries: DMatrix<f64>,
}

impl VandermondeMatrix {
    pub fn from_nodes(nodes: &NodeSet) -> Self {
        let n = nodes.len();
        let entries = DMatrix::from_fn(n, n, |i, j| nodes.nodes[i].powi(j as i32));
        VandermondeMatrix { entries }
    }

    pub fn chebyshev(k: usize) -> Self {
        Self::from_nodes(&chebyshev_nodes(k))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Solves `V c = values` by LU with partial pivoting plus two rounds of
    /// iterative refinement. Returns the solution and the final residual
    /// max-norm.
    pub fn solve_refined(&self, values: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = self.entries.nrows();
        Error::check_dim(n, values.len())?;
        let lu = self.entries.clone().lu();
        let rhs = DVector::from_column_slice(values);
        let mut x = lu
            .solve(&rhs)
            .ok_or(Error::Conditioning { degree: n - 1, largest_reliable: 0 })?;
        let mut resid = residual(&self.entries, &x, &rhs);
        for _ in 0..2 {
            if let Some(dx) = lu.solve(&resid) {
                x += dx;
            }
            resid = residual(&self.entries, &x, &rhs);
        }
        let rnorm = resid.amax();
        Ok((x.iter().copied().collect(), rnorm))
    }

    /// Columns of `V^{-1}`, each solved against a unit vector.
    fn inverse(&self) -> Result<(DMatrix<f64>, f64)> {
        let n = self.entries.nrows();
        let mut inv = DMatrix::zeros(n, n);
        let mut worst = 0.0_f64;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let (col, r) = self.solve_refined(&e)?;
            worst = worst.max(r);
            inv.column_mut(j).copy_from_slice(&col);
        }
        Ok((inv, worst))
    }
}

fn residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = b.len();
    DVector::from_fn(n, |i, _| {
        let mut acc = b[i];
        for j in 0..n {
            acc = (-a[(i, j)]).mul_add(x[j], acc);
        }
        acc
    })
}

fn inverse_norm_checked(k: usize) -> Result<f64> {
    let (inv, resid) = VandermondeMatrix::chebyshev(k).inverse()?;
    if !(resid <= INVERSE_RESIDUAL_LIMIT) {
        return Err(Error::Conditioning { degree: k, largest_reliable: 0 });
    }
    Ok(inv
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max))
}

/// `||V_k^{-1}||_inf` for the Chebyshev-node Vandermonde matrix of degree `k`.
pub fn vandermonde_inverse_inf_norm(k: usize) -> Result<f64> {
    inverse_norm_checked(k).map_err(|e| match e {
        Error::Conditioning { degree, .. } => {
            let largest_reliable = (0..degree)
                .rev()
                .find(|&d| inverse_norm_checked(d).is_ok())
                .unwrap_or(0);
            Error::Conditioning { degree, largest_reliable }
        }
        other => other,
    })
}

/// `(3^{3/4} / 4) [(1 + sqrt 2)^m + (1 - sqrt 2)^m]`.
pub fn gautschi_bound(m: usize) -> f64 {
    let c = 3f64.powf(0.75) / 4.0;
    let m = m as i32;
    c * ((1.0 + SQRT_2).powi(m) + (1.0 - SQRT_2).powi(m))
}

/// Exponent fed to [`gautschi_bound`] for polynomials of degree `k`: the
/// node count `k + 1`. With `k` itself the bound already fails at `k = 1`.
pub fn gautschi_index(k: usize) -> usize {
    k + 1
}

/// Upper bound on `|r(z)|` for any polynomial `r` of degree `k` with
/// `|r| <= sup_norm` on `[-1, 1]`:
/// `M (k + 1) max(1, |z|^k) G(k + 1)`.
pub fn interpolation_growth_bound(k: usize, z: Complex64, sup_norm: f64) -> f64 {
    let zk = z.norm().powi(k as i32);
    sup_norm * (k + 1) as f64 * zk.max(1.0) * gautschi_bound(gautschi_index(k))
}

/// Monomial coefficients of the degree-`k` interpolant through `values` at
/// the Chebyshev nodes of degree `k`.
pub fn interpolate_coefficients(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::input("need at least one node value"));
    }
    let k = values.len() - 1;
    let (c, _) = VandermondeMatrix::chebyshev(k).solve_refined(values)?;
    Ok(c)
}
