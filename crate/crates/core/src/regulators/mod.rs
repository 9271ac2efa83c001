//! Explicit upper bounds for the homogeneous polynomial regulator of a
//! wedge, the certified parallelogram they imply, and the iterated real
//! regulated set.
//!
//! A degree-`k` homogeneous `q` constrained on the wedge cone is restricted to
//! `q(1, w)`, interpolated at Chebyshev nodes on the slope interval
//! `[m1, m2]`, and the interpolant is extrapolated to complex `w`. Two closed
//! forms are provided, see [`BoundForm`].

mod regulated;

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{gautschi_bound, gautschi_index};
use crate::error::{Error, Result};
use crate::geometry::{Point, Wedge};

pub use regulated::{
    hyperbola_staircase, regulated_set_iterate, RegionSample, RegulateConfig, RegulatedSet, SamplePoint, SlopePair,
    TraceStep, DEFAULT_SLOPES,
};

/// `1 + sqrt 2`, the growth rate of the Chebyshev-node Vandermonde inverse.
pub const GROWTH_RATE: f64 = 1.0 + SQRT_2;

/// Which closed form of the wedge regulator bound to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundForm {
    /// Interpolation variable `u = (2 z_i / z_1 - (m1 + m2)) / (m2 - m1)`,
    /// which maps the slope interval onto `[-1, 1]`, times the amplitude
    /// `delta * max(1, m2)` of the cone constraint. Sound for every
    /// homogeneous polynomial obeying the constraint.
    #[default]
    Interpolation,
    /// The compact form
    /// `(1/delta^k)(k+1) max(|z_1|, |z_2 - (m1+m2) z_1| / (m2 - m1))^k G(k+1)`.
    /// It under-estimates Chebyshev-extremal polynomials for some complex `z`;
    /// kept for reproducing reference values.
    Compact,
}

/// Regulator bounds attached to one wedge.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeRegulator {
    wedge: Wedge,
    form: BoundForm,
}

impl WedgeRegulator {
    pub fn new(wedge: Wedge) -> Self {
        WedgeRegulator {
            wedge,
            form: BoundForm::default(),
        }
    }

    pub fn with_form(wedge: Wedge, form: BoundForm) -> Self {
        WedgeRegulator { wedge, form }
    }

    pub fn wedge(&self) -> &Wedge {
        &self.wedge
    }

    pub fn form(&self) -> BoundForm {
        self.form
    }

    pub fn dim(&self) -> usize {
        self.wedge.dim()
    }

    pub fn sum_slopes(&self) -> f64 {
        self.wedge.slope_lo() + self.wedge.slope_hi()
    }

    pub fn diff_slopes(&self) -> f64 {
        self.wedge.slope_hi() - self.wedge.slope_lo()
    }

    /// Slope of the axis the sheared coordinates are measured from.
    fn axis_slope(&self) -> f64 {
        match self.form {
            BoundForm::Interpolation => 0.5 * self.sum_slopes(),
            BoundForm::Compact => self.sum_slopes(),
        }
    }

    /// Half-range of the slope interval in the sheared coordinate.
    fn shear_scale(&self) -> f64 {
        match self.form {
            BoundForm::Interpolation => 0.5 * self.diff_slopes(),
            BoundForm::Compact => self.diff_slopes(),
        }
    }

    /// Sup of `||d(x) x||_inf` over the wedge cone.
    fn amplitude(&self) -> f64 {
        match self.form {
            BoundForm::Interpolation => self.wedge.half_width() * self.wedge.slope_hi().max(1.0),
            BoundForm::Compact => 1.0,
        }
    }

    /// Sheared coordinate of `z_i` relative to `z_1`.
    fn sheared(&self, z1: Complex64, zi: Complex64) -> Complex64 {
        (zi - z1 * self.axis_slope()) / self.shear_scale()
    }

    /// `max(|z_1|, max_i |sheared_i|)`: the norm whose unit ball is the
    /// region of certified convergence, up to `delta / (1 + sqrt 2)^{n-1}`.
    pub fn gauge(&self, z: &[Complex64]) -> Result<f64> {
        Error::check_dim(self.dim(), z.len())?;
        let z1 = z[0];
        Ok(z[1..]
            .iter()
            .map(|&zi| self.sheared(z1, zi).norm())
            .fold(z1.norm(), f64::max))
    }

    /// Real-offset version of [`Self::gauge`].
    pub fn gauge_real(&self, v: &[f64]) -> Result<f64> {
        let z: Vec<Complex64> = v.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        self.gauge(&z)
    }

    /// Tensor-product bound on `q^W_k(p)[z]` in any dimension `n >= 2`:
    /// `A (k+1)^{n-1} (gauge(z) / delta)^k G(k+1)^{n-1}` where `A` is the
    /// form's amplitude.
    pub fn bound_nd(&self, k: usize, z: &[Complex64]) -> Result<f64> {
        let gauge = self.gauge(z)?;
        let reps = (self.dim() - 1) as i32;
        let ratio = gauge / self.wedge.half_width();
        let growth = ((k + 1) as f64 * gautschi_bound(gautschi_index(k))).powi(reps);
        Ok(self.amplitude() * growth * ratio.powi(k as i32))
    }

    /// The planar bound; errors unless the wedge lives in `R^2`.
    pub fn bound_2d(&self, k: usize, z: [Complex64; 2]) -> Result<f64> {
        Error::check_dim(2, self.dim())?;
        self.bound_nd(k, &z)
    }

    /// `lim_k bound(k, z)^{1/k} = gauge(z) (1 + sqrt 2)^{n-1} / delta`.
    /// Offsets with root below one lie in the certified region.
    pub fn asymptotic_root(&self, z: &[Complex64]) -> Result<f64> {
        let reps = (self.dim() - 1) as i32;
        Ok(self.gauge(z)? * GROWTH_RATE.powi(reps) / self.wedge.half_width())
    }

    pub fn asymptotic_root_real(&self, v: &[f64]) -> Result<f64> {
        let z: Vec<Complex64> = v.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        self.asymptotic_root(&z)
    }

    /// The planar region `{asymptotic_root <= 1}` around the wedge base.
    pub fn parallelogram(&self) -> Result<Parallelogram> {
        Error::check_dim(2, self.dim())?;
        let c = self.wedge.base().coords();
        let r = self.wedge.half_width() / GROWTH_RATE;
        Ok(Parallelogram {
            center: [c[0], c[1]],
            half_width: r,
            axis_slope: self.axis_slope(),
            shear_half_width: self.shear_scale() * r,
        })
    }

    /// Aspect ratio `(1, |z_2| max / |z_1| max, ...)` of the certified
    /// region's bounding box, used to shape Taylor sampling tori.
    pub fn aspect(&self) -> Vec<f64> {
        let reach = self.axis_slope() + self.shear_scale();
        let mut a = vec![reach; self.dim()];
        a[0] = 1.0;
        a
    }
}

/// `wedge_regulator_bound_2d` with the default form.
pub fn wedge_regulator_bound_2d(reg: &WedgeRegulator, k: usize, z: [Complex64; 2]) -> Result<f64> {
    reg.bound_2d(k, z)
}

/// `wedge_regulator_bound_nd`.
pub fn wedge_regulator_bound_nd(reg: &WedgeRegulator, k: usize, z: &[Complex64]) -> Result<f64> {
    reg.bound_nd(k, z)
}

/// `{ q : |q_1 - x| <= r, |(q_2 - y) - s (q_1 - x)| <= w }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parallelogram {
    pub center: [f64; 2],
    /// `r = delta / (1 + sqrt 2)`.
    pub half_width: f64,
    /// Shear slope `s`.
    pub axis_slope: f64,
    /// Half-width `w` across the sheared axis.
    pub shear_half_width: f64,
}

impl Parallelogram {
    /// Normalised gauge of the offset `q - center`; at most one on the
    /// closed region.
    pub fn gauge(&self, q: [f64; 2]) -> f64 {
        let dx = q[0] - self.center[0];
        let dy = q[1] - self.center[1];
        let a = dx.abs() / self.half_width;
        let b = (dy - self.axis_slope * dx).abs() / self.shear_half_width;
        a.max(b)
    }

    pub fn contains(&self, q: [f64; 2]) -> bool {
        self.gauge(q) <= 1.0
    }

    /// Largest `t` with `center + t d` in the closed region.
    pub fn reach_along(&self, d: [f64; 2]) -> f64 {
        let g = self.gauge([self.center[0] + d[0], self.center[1] + d[1]]);
        if g == 0.0 {
            f64::INFINITY
        } else {
            1.0 / g
        }
    }

    /// `(lo, hi)` of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let ext_y = self.axis_slope * self.half_width + self.shear_half_width;
        (
            [self.center[0] - self.half_width, self.center[1] - ext_y],
            [self.center[0] + self.half_width, self.center[1] + ext_y],
        )
    }

    /// Whether the closed box `[lo, hi]` lies inside the region.
    pub fn covers_box(&self, lo: [f64; 2], hi: [f64; 2]) -> bool {
        let (dx0, dx1) = (lo[0] - self.center[0], hi[0] - self.center[0]);
        if dx0 < -self.half_width || dx1 > self.half_width {
            return false;
        }
        // s > 0: the lower edge rises with x, so the binding corners are fixed
        let floor = self.center[1] + self.axis_slope * dx1 - self.shear_half_width;
        let ceil = self.center[1] + self.axis_slope * dx0 + self.shear_half_width;
        lo[1] >= floor && hi[1] <= ceil
    }

    pub fn translated(&self, center: [f64; 2]) -> Parallelogram {
        Parallelogram { center, ..*self }
    }
}

/// `parallelogram_region`.
pub fn parallelogram_region(reg: &WedgeRegulator) -> Result<Parallelogram> {
    reg.parallelogram()
}

/// Convenience constructor used across the crate.
pub fn regulator_at(base: Point, delta: f64, m1: f64, m2: f64, form: BoundForm) -> Result<WedgeRegulator> {
    Ok(WedgeRegulator::with_form(Wedge::new(base, delta, m1, m2)?, form))
}
