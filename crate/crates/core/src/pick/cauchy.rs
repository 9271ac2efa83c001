//! Taylor coefficients of `s -> h(p + s x)` by the trapezoidal rule on a
//! circle inside the disc of analyticity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{DirectionVec, Point};

use super::{complexify, roots_of_unity, OracleKind, PickOracle};

/// Fraction of the analyticity radius used as the quadrature circle.
const RADIUS_FRACTION: f64 = 0.5;
const MIN_POINTS: usize = 64;
/// Allowed relative disagreement between the N- and 2N-point rules.
const AGREEMENT_TOL: f64 = 1e-6;
/// Rounding floor of one coefficient, relative to `sup |g| / rho^k`.
const NOISE_REL: f64 = 1e-12;

/// Coefficients `c_k = g^{(k)}(0) / k!` of `g(s) = h(p + s x)`, with the
/// rounding floor of each.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionalSeries {
    /// `c_0 ..= c_K`.
    pub coeffs: Vec<Complex64>,
    /// Attainable absolute accuracy of each `c_k`.
    pub noise: Vec<f64>,
    /// Circle radius used, or `None` when the coefficients are exact.
    pub rho: Option<f64>,
}

/// Series of `g(s) = h(p + s x)` for a real base point and a possibly
/// complex direction, up to order `k_max`.
pub fn directional_series(
    o: &PickOracle,
    p: &[f64],
    x: &[Complex64],
    k_max: usize,
) -> Result<DirectionalSeries> {
    Error::check_dim(o.dim(), p.len())?;
    Error::check_dim(o.dim(), x.len())?;
    if let OracleKind::Linear(c) = o.kind() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k_max + 1];
        coeffs[0] = Complex64::new(o.eval_real(p)?, 0.0);
        if k_max >= 1 {
            coeffs[1] = c.iter().zip(x).map(|(ci, xi)| xi * ci).sum();
        }
        return Ok(DirectionalSeries {
            noise: vec![0.0; k_max + 1],
            coeffs,
            rho: None,
        });
    }
    let radius = o.radius(p, x)?;
    let xnorm = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if xnorm == 0.0 {
        return Err(Error::input("direction must be nonzero"));
    }
    // beyond this the sample points are dominated by cancellation in p + s x
    let cap = (1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()))) / xnorm;
    let rho = match radius.finite() {
        Some(0.0) => return Err(Error::NotAnalytic),
        Some(r) => (RADIUS_FRACTION * r).min(cap),
        None => cap,
    };
    let g0 = o.eval(&complexify(p))?;
    let n = MIN_POINTS.max(4 * k_max);
    let fine = 2 * n;
    let nodes = roots_of_unity(fine);
    let mut samples = Vec::with_capacity(fine);
    let mut sup = g0.norm();
    for w in &nodes {
        let s = w * rho;
        let z: Vec<Complex64> = p.iter().zip(x).map(|(pi, xi)| xi * s + pi).collect();
        let v = o.eval(&z)? - g0;
        sup = sup.max((v + g0).norm());
        samples.push(v);
    }
    let mut coeffs = vec![g0];
    let mut noise = vec![NOISE_REL * sup];
    for k in 1..=k_max {
        let mut coarse = Complex64::new(0.0, 0.0);
        let mut all = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let term = v * nodes[(j * k) % fine].conj();
            all += term;
            if j % 2 == 0 {
                coarse += term;
            }
        }
        let scale = rho.powi(k as i32);
        let c_fine = all / (fine as f64 * scale);
        let c_coarse = coarse / (n as f64 * scale);
        let floor = NOISE_REL * sup / scale;
        let gap = (c_fine - c_coarse).norm();
        if gap > AGREEMENT_TOL * c_fine.norm() + floor {
            return Err(Error::Accuracy(format!(
                "order {k}: {n}- and {fine}-point rules differ by {gap:e}"
            )));
        }
        coeffs.push(c_fine);
        noise.push(floor);
    }
    Ok(DirectionalSeries {
        coeffs,
        noise,
        rho: Some(rho),
    })
}

/// `g^{(k)}(0)` for `k = 1..=K`, where `g(s) = h(p + s x)`.
pub fn directional_derivatives(
    o: &PickOracle,
    p: &Point,
    x: &DirectionVec,
    k_max: usize,
) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::input("order must be at least 1"));
    }
    let series = directional_series(o, p.coords(), &complexify(x.coords()), k_max)?;
    let mut fact = 1.0;
    Ok((1..=k_max)
        .map(|k| {
            fact *= k as f64;
            fact * series.coeffs[k].re
        })
        .collect())
}
