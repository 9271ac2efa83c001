//! Power-series continuation certified by wedge regulators: summation of
//! `H(p + z) = sum_k form_k(z)` with a tail estimate, greedy re-expansion
//! along a segment, and rasterised comparison of certified and observed
//! convergence.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::pick::{inscribe_wedge_in, taylor_table, PickOracle, TableOptions, TaylorTable};
use crate::regulators::{BoundForm, WedgeRegulator, GROWTH_RATE};

/// Fraction of the certified reach taken per path step.
pub const STEP_FRACTION: f64 = 0.8;
/// A path is stuck once a step is shorter than this fraction of the segment.
pub const MIN_STEP_FRACTION: f64 = 1e-6;
/// Partial-sum agreement that counts as empirical convergence.
pub const CAUCHY_TOL: f64 = 1e-8;
/// Root of the regulator at the target that the wedge cap aims for.
const TARGET_ROOT: f64 = 0.5;
const BISECTION_STEPS: usize = 60;

/// One expansion point of a continuation path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathStep {
    pub centre: Vec<f64>,
    /// Half-width of the wedge inscribed at the centre.
    pub half_width: f64,
    /// Regulator root of the remaining offset to the target.
    pub root_to_target: f64,
    /// Fraction of the remaining offset that was certified.
    pub certified_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationResult {
    pub target: Vec<Complex64>,
    pub value: Complex64,
    pub order: usize,
    pub tail_bound: f64,
    /// Regulator root at the final offset.
    pub root: f64,
    pub certified: bool,
    pub steps: Vec<PathStep>,
}

/// Tail estimates of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    /// `r^{K+1} / (1 - r) max_k |term_k|`.
    pub analytic: f64,
    /// Geometric envelope fitted to the last quarter of the terms.
    pub empirical: f64,
}

impl TailEstimate {
    pub fn bound(&self) -> f64 {
        self.analytic.max(self.empirical)
    }
}

fn window(order: usize) -> usize {
    (order / 4).max(1)
}

/// Rate `q` of the envelope `max |term|` over the last window against the
/// window before, per order, together with the last window's maximum.
fn envelope_rate(mags: &[f64]) -> (f64, f64) {
    let order = mags.len() - 1;
    let w = window(order);
    let last = mags[order + 1 - w..].iter().copied().fold(0.0, f64::max);
    let lo = (order + 1).saturating_sub(2 * w).max(1);
    let prev = mags[lo..order + 1 - w].iter().copied().fold(0.0, f64::max);
    let rate = if last == 0.0 {
        0.0
    } else if prev == 0.0 {
        f64::INFINITY
    } else {
        (last / prev).powf(1.0 / w as f64)
    };
    (rate, last)
}

fn tail_estimate(mags: &[f64], root: f64, exact: bool) -> TailEstimate {
    if exact {
        return TailEstimate {
            analytic: 0.0,
            empirical: 0.0,
        };
    }
    let order = mags.len() - 1;
    let biggest = mags[1..].iter().copied().fold(0.0, f64::max);
    let analytic = if biggest == 0.0 {
        0.0
    } else if root < 1.0 {
        root.powi(order as i32 + 1) / (1.0 - root) * biggest
    } else {
        f64::INFINITY
    };
    let (rate, last) = envelope_rate(mags);
    let empirical = if last == 0.0 {
        0.0
    } else if rate < 1.0 {
        last * rate / (1.0 - rate)
    } else {
        f64::INFINITY
    };
    TailEstimate { analytic, empirical }
}

fn check_pair(t: &TaylorTable, reg: &WedgeRegulator) -> Result<()> {
    Error::check_dim(t.dim(), reg.dim())?;
    if reg.wedge().base() != t.base() {
        return Err(Error::input("the regulator's wedge must be based at the table's point"));
    }
    Ok(())
}

/// Sums the table at `z_offset` and certifies the sum when the regulator
/// root is below one and the tail estimate is below `tol`.
pub fn continue_eval(t: &TaylorTable, reg: &WedgeRegulator, z_offset: &[Complex64], tol: f64) -> Result<ContinuationResult> {
    check_pair(t, reg)?;
    if t.order() < 2 {
        return Err(Error::input("continuation needs a table of order at least 2"));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    let terms = t.terms(z_offset)?;
    let mags: Vec<f64> = terms.iter().map(|v| v.norm()).collect();
    let root = reg.asymptotic_root(z_offset)?;
    let tail = tail_estimate(&mags, root, t.is_exact()).bound();
    let target = t
        .base()
        .coords()
        .iter()
        .zip(z_offset)
        .map(|(p, z)| z + p)
        .collect();
    Ok(ContinuationResult {
        target,
        value: terms.into_iter().sum(),
        order: t.order(),
        tail_bound: tail,
        root,
        certified: root < 1.0 && tail < tol,
        steps: vec![PathStep {
            centre: t.base().coords().to_vec(),
            half_width: reg.wedge().half_width(),
            root_to_target: root,
            certified_fraction: if root < 1.0 && tail < tol { 1.0 } else { 0.0 },
        }],
    })
}

/// Knobs of [`continue_path`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathOptions {
    pub m1: f64,
    pub m2: f64,
    pub order: usize,
    pub tol: f64,
    pub max_steps: usize,
    pub form: BoundForm,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            m1: 0.5,
            m2: 2.0,
            order: 30,
            tol: 1e-6,
            max_steps: 500,
            form: BoundForm::default(),
        }
    }
}

/// Walks from `start` toward the real point `target` by re-expansion.
///
/// At each centre a wedge is inscribed in the oracle's analytic domain, the
/// Taylor table is built, and the farthest certified fraction of the
/// remaining offset is found by bisection. The walk ends once the target
/// itself is certified, and advances [`STEP_FRACTION`] of the certified
/// fraction otherwise.
pub fn continue_path(o: &PickOracle, start: &Point, target: &Point, opts: &PathOptions) -> Result<ContinuationResult> {
    let n = o.dim();
    Error::check_dim(n, start.dim())?;
    Error::check_dim(n, target.dim())?;
    if n < 2 {
        return Err(Error::input("continuation paths need dimension at least 2"));
    }
    if opts.max_steps == 0 {
        return Err(Error::input("max_steps must be positive"));
    }
    if !o.is_analytic_at(start.coords()) {
        return Err(Error::Domain(format!("start {:?} is not in the analytic domain", start.coords())));
    }
    let length = dist(start.coords(), target.coords());
    let mut centre = start.clone();
    let mut steps: Vec<PathStep> = Vec::new();
    for _ in 0..opts.max_steps {
        let d: Vec<f64> = target.coords().iter().zip(centre.coords()).map(|(t, c)| t - c).collect();
        let probe = crate::regulators::regulator_at(centre.clone(), 1.0, opts.m1, opts.m2, opts.form)?;
        let gauge = probe.gauge_real(&d)?;
        let cap = if gauge == 0.0 {
            1.0
        } else {
            gauge * GROWTH_RATE.powi(n as i32 - 1) / TARGET_ROOT
        };
        let wedge = inscribe_wedge_in(o, &centre, opts.m1, opts.m2, cap)?;
        let reg = WedgeRegulator::with_form(wedge, opts.form);
        let table = taylor_table(o, &centre, opts.order, &TableOptions::roots_of_unity(Some(reg.aspect())))?;
        let offset = |s: f64| -> Vec<Complex64> { d.iter().map(|v| Complex64::new(s * v, 0.0)).collect() };
        let at_target = continue_eval(&table, &reg, &offset(1.0), opts.tol)?;
        if at_target.certified {
            steps.push(PathStep {
                centre: centre.coords().to_vec(),
                half_width: reg.wedge().half_width(),
                root_to_target: at_target.root,
                certified_fraction: 1.0,
            });
            return Ok(ContinuationResult { steps, ..at_target });
        }
        // certification is monotone along the ray up to round-off; bisect it
        let mut lo = 0.0;
        let mut hi = if at_target.root > 0.0 { (1.0 / at_target.root).min(1.0) } else { 1.0 };
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if continue_eval(&table, &reg, &offset(mid), opts.tol)?.certified {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        steps.push(PathStep {
            centre: centre.coords().to_vec(),
            half_width: reg.wedge().half_width(),
            root_to_target: at_target.root,
            certified_fraction: lo,
        });
        let advance = STEP_FRACTION * lo;
        if advance * dist(&d, &vec![0.0; n]) < MIN_STEP_FRACTION * length {
            return Err(Error::Stuck {
                last: centre.coords().to_vec(),
                steps,
            });
        }
        centre = centre.offset(advance, &d);
    }
    Err(Error::Stuck {
        last: centre.coords().to_vec(),
        steps,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// One offset of a [`SeriesScan`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub offset: [f64; 2],
    pub root: f64,
    /// `root < 1`.
    pub certified: bool,
    /// Partial sums agree between orders `K/2` and `K`, or the term envelope
    /// decays.
    pub convergent: bool,
    /// `certified` implies `convergent`.
    pub agree: bool,
}

/// Certified against observed convergence on a lattice of real offsets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesScan {
    pub base: Vec<f64>,
    pub grid: f64,
    pub order: usize,
    pub points: Vec<ScanPoint>,
}

impl SeriesScan {
    pub fn all_agree(&self) -> bool {
        self.points.iter().all(|p| p.agree)
    }

    pub fn certified_count(&self) -> usize {
        self.points.iter().filter(|p| p.certified).count()
    }
}

/// Scans the lattice `grid * Z^2` over the regulator's certified
/// parallelogram enlarged by a quarter.
pub fn series_region_scan(t: &TaylorTable, reg: &WedgeRegulator, grid: f64) -> Result<SeriesScan> {
    check_pair(t, reg)?;
    Error::check_dim(2, t.dim())?;
    if !(grid > 0.0 && grid.is_finite()) {
        return Err(Error::input("grid step must be positive"));
    }
    let par = reg.parallelogram()?;
    let (lo, hi) = par.bounding_box();
    let ext = [1.25 * (hi[0] - lo[0]) / 2.0, 1.25 * (hi[1] - lo[1]) / 2.0];
    let nx = (ext[0] / grid).floor() as i64;
    let ny = (ext[1] / grid).floor() as i64;
    if ((2 * nx + 1) as f64) * ((2 * ny + 1) as f64) > 5e7 {
        return Err(Error::input("scan grid is too fine for the region"));
    }
    let order = t.order();
    let half = order / 2;
    let mut points = Vec::with_capacity(((2 * nx + 1) * (2 * ny + 1)) as usize);
    for i in -nx..=nx {
        for j in -ny..=ny {
            let offset = [i as f64 * grid, j as f64 * grid];
            let z = [Complex64::new(offset[0], 0.0), Complex64::new(offset[1], 0.0)];
            let root = reg.asymptotic_root(&z)?;
            let terms = t.terms(&z)?;
            let partial: Complex64 = terms[..=half].iter().sum();
            let full: Complex64 = terms.iter().sum();
            let mags: Vec<f64> = terms.iter().map(|v| v.norm()).collect();
            let cauchy = (full - partial).norm() <= CAUCHY_TOL * (1.0 + full.norm());
            let convergent = t.is_exact() || cauchy || envelope_rate(&mags).0 < 1.0;
            let certified = root < 1.0;
            points.push(ScanPoint {
                offset,
                root,
                certified,
                convergent,
                agree: !certified || convergent,
            });
        }
    }
    Ok(SeriesScan {
        base: t.base().coords().to_vec(),
        grid,
        order,
        points,
    })
}
