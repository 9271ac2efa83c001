//! Raster inner approximation of the real regulated set of a planar domain.
//!
//! The plane is cut into closed square pixels. A pixel is a member when its
//! whole square is known to lie in the set. Each sweep inscribes, at every
//! member pixel centre, the largest wedge inside the current member union
//! and adjoins every pixel lying inside that wedge's certified
//! parallelogram. Sweeps read only the set left by the previous sweep, so the
//! result does not depend on the order in which pixels are visited.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, BoxUnionDomain, Point, RealDomain};

use super::{regulator_at, BoundForm, Parallelogram};

/// Slopes `(m1, m2)` of one wedge family.
pub type SlopePair = (f64, f64);

/// Families swept when no slope pair is given.
pub const DEFAULT_SLOPES: [SlopePair; 2] = [(0.5, 2.0), (0.25, 4.0)];

/// Relative shrink applied to each parallelogram before rasterising it.
const RASTER_SHRINK: f64 = 1e-9;

/// Pixel squares are tested against the domain shrunk by this fraction of a
/// pixel, so that faces lying on the lattice up to rounding still count.
const LATTICE_SLACK: f64 = 1e-9;

const NOT_COMPUTED: u32 = u32::MAX;
const EDGE: u32 = u32::MAX - 1;

#[derive(Clone, Debug, PartialEq)]
pub struct RegulateConfig {
    pub slopes: Vec<SlopePair>,
    pub grid_step: f64,
    pub max_iters: usize,
    pub form: BoundForm,
    /// Extra region the raster must cover besides the domain's bounding box.
    pub window: Option<AxisBox>,
}

impl RegulateConfig {
    pub fn new(grid_step: f64) -> Self {
        RegulateConfig {
            slopes: DEFAULT_SLOPES.to_vec(),
            grid_step,
            max_iters: 25,
            form: BoundForm::default(),
            window: None,
        }
    }

    pub fn with_slopes(mut self, m1: f64, m2: f64) -> Self {
        self.slopes = vec![(m1, m2)];
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(Error::input(format!("grid step must be positive, got {}", self.grid_step)));
        }
        if self.max_iters == 0 {
            return Err(Error::input("max_iters must be positive"));
        }
        if self.slopes.is_empty() {
            return Err(Error::input("at least one slope pair is required"));
        }
        for &(m1, m2) in &self.slopes {
            if !(m1 > 0.0 && m1 < m2 && m2.is_finite()) {
                return Err(Error::input(format!("slopes must satisfy 0 < m1 < m2, got ({m1}, {m2})")));
            }
        }
        if let Some(w) = &self.window {
            Error::check_dim(2, w.lo.len())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    pub coords: [f64; 2],
    pub member: bool,
    /// Half a pixel, positive for members and negative otherwise.
    pub margin: f64,
    /// Sweep that first adjoined the pixel; 0 for the domain itself.
    pub first_iteration: Option<usize>,
}

/// Pixel centres of the raster with their membership.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSample {
    pub grid_step: f64,
    pub points: Vec<SamplePoint>,
}

/// How a pixel was adjoined: by the parallelogram of the wedge of
/// `half_width` at `parent` for slope family `slope_index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub parent: usize,
    pub slope_index: usize,
    pub half_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    origin: [f64; 2],
    step: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    fn cell(&self, i: usize) -> (usize, usize) {
        (i / self.ny, i % self.ny)
    }

    fn square(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        let (ix, iy) = self.cell(i);
        let lo = [
            self.origin[0] + ix as f64 * self.step,
            self.origin[1] + iy as f64 * self.step,
        ];
        (lo, [lo[0] + self.step, lo[1] + self.step])
    }

    fn centre(&self, i: usize) -> [f64; 2] {
        let (ix, iy) = self.cell(i);
        [
            self.origin[0] + (ix as f64 + 0.5) * self.step,
            self.origin[1] + (iy as f64 + 0.5) * self.step,
        ]
    }

    fn locate(&self, q: [f64; 2]) -> Option<usize> {
        let fx = ((q[0] - self.origin[0]) / self.step).floor();
        let fy = ((q[1] - self.origin[1]) / self.step).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some(self.index(fx as usize, fy as usize))
    }
}

/// Member flags with per-column prefix counts of non-members.
struct Raster {
    grid: Grid,
    prefix: Vec<u32>,
}

impl Raster {
    fn new(grid: Grid, member: &[bool]) -> Self {
        let stride = grid.ny + 1;
        let mut prefix = vec![0u32; grid.nx * stride];
        for ix in 0..grid.nx {
            let base = ix * stride;
            for iy in 0..grid.ny {
                let outside = !member[grid.index(ix, iy)] as u32;
                prefix[base + iy + 1] = prefix[base + iy] + outside;
            }
        }
        Raster { grid, prefix }
    }

    fn outside_count(&self, ix: usize, lo: usize, hi: usize) -> u32 {
        let base = ix * (self.grid.ny + 1);
        self.prefix[base + hi + 1] - self.prefix[base + lo]
    }

    /// Lowest (or highest, when `from_top`) non-member row in `[lo, hi]`.
    fn extreme_outside(&self, ix: usize, lo: usize, hi: usize, from_top: bool) -> Option<usize> {
        if self.outside_count(ix, lo, hi) == 0 {
            return None;
        }
        let base = ix * (self.grid.ny + 1);
        let p = &self.prefix[base..base + self.grid.ny + 1];
        let (mut a, mut b) = (lo, hi);
        if from_top {
            // largest r with p[hi+1] - p[r] >= 1
            while a < b {
                let mid = (a + b).div_ceil(2);
                if p[hi + 1] - p[mid] >= 1 {
                    a = mid;
                } else {
                    b = mid - 1;
                }
            }
        } else {
            // smallest r with p[r+1] - p[lo] >= 1
            while a < b {
                let mid = (a + b) / 2;
                if p[mid + 1] - p[lo] >= 1 {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
        }
        Some(a)
    }

    /// Largest half-width of the wedge with slopes `(m1, m2)` at the centre
    /// of pixel `i` that avoids every non-member pixel and the outside of
    /// the raster, with the cell that binds it.
    fn wedge_depth(&self, i: usize, m1: f64, m2: f64) -> (f64, u32) {
        let up = self.pyramid_depth(i, m1, m2, false);
        let down = self.pyramid_depth(i, m1, m2, true);
        if down.0 < up.0 {
            down
        } else {
            up
        }
    }

    /// Entry depth of one pyramid. The lower pyramid is handled in the frame
    /// rotated by a half turn, where it becomes an upper pyramid.
    fn pyramid_depth(&self, i: usize, m1: f64, m2: f64, flipped: bool) -> (f64, u32) {
        let g = self.grid;
        let h = g.step;
        let (cx, cy) = g.cell(i);
        let (fx, fy) = if flipped {
            (g.nx - 1 - cx, g.ny - 1 - cy)
        } else {
            (cx, cy)
        };
        let px = (fx as f64 + 0.5) * h;
        let py = (fy as f64 + 0.5) * h;
        let width = g.nx as f64 * h;
        let height = g.ny as f64 * h;
        let mut best = (width - px).min((height - py) / m2);
        let mut blocker = EDGE;
        for col in fx..g.nx {
            let a1 = col as f64 * h - px;
            let b1 = a1 + h;
            let floor = a1.max(0.0);
            if floor >= best {
                break;
            }
            let t = (py + m1 * floor) / h;
            let r_lo = t.floor().max(0.0) as usize;
            let u = (py + m2 * b1.min(best)) / h;
            let r_hi_f = u.ceil() - 1.0;
            if r_hi_f < 0.0 || r_lo >= g.ny {
                continue;
            }
            let r_hi = (r_hi_f as usize).min(g.ny - 1);
            if r_lo > r_hi {
                continue;
            }
            let ox = if flipped { g.nx - 1 - col } else { col };
            let (olo, ohi) = if flipped {
                (g.ny - 1 - r_hi, g.ny - 1 - r_lo)
            } else {
                (r_lo, r_hi)
            };
            if let Some(orow) = self.extreme_outside(ox, olo, ohi, flipped) {
                let row = if flipped { g.ny - 1 - orow } else { orow };
                let depth = floor.max((row as f64 * h - py) / m2);
                if depth < best {
                    best = depth;
                    blocker = g.index(ox, orow) as u32;
                }
            }
        }
        (best, blocker)
    }
}

/// One contiguous run of rows to adjoin within a column.
#[derive(Clone, Copy, Debug)]
struct Run {
    lo: usize,
    hi: usize,
    parent: usize,
    slope_index: usize,
    half_width: f64,
}

/// Result of [`regulated_set_iterate`].
#[derive(Clone, Debug)]
pub struct RegulatedSet {
    grid: Grid,
    slopes: Vec<SlopePair>,
    form: BoundForm,
    member: Vec<bool>,
    first_iteration: Vec<Option<usize>>,
    trace: Vec<Option<TraceStep>>,
    iterations: usize,
    converged: bool,
}

impl RegulatedSet {
    pub fn grid_step(&self) -> f64 {
        self.grid.step
    }

    /// `(nx, ny)` pixel counts.
    pub fn shape(&self) -> (usize, usize) {
        (self.grid.nx, self.grid.ny)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.len() == 0
    }

    /// Sweeps performed, including a final sweep that found nothing new.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Whether a fixed point was reached within the sweep budget.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn centre(&self, i: usize) -> [f64; 2] {
        self.grid.centre(i)
    }

    pub fn is_member(&self, i: usize) -> bool {
        self.member[i]
    }

    pub fn first_iteration(&self, i: usize) -> Option<usize> {
        self.first_iteration[i]
    }

    pub fn trace(&self, i: usize) -> Option<TraceStep> {
        self.trace[i]
    }

    pub fn member_count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    /// Members after sweep `t` (sweep 0 is the rasterised domain).
    pub fn member_count_after(&self, t: usize) -> usize {
        self.first_iteration
            .iter()
            .filter(|f| matches!(f, Some(s) if *s <= t))
            .count()
    }

    /// Membership of the pixel containing `q`; false outside the raster.
    pub fn contains(&self, q: [f64; 2]) -> bool {
        self.grid.locate(q).is_some_and(|i| self.member[i])
    }

    /// Fraction of the pixel centres inside `[lo, hi]` that are members.
    /// Centres outside the raster count as non-members, sampled on the same
    /// lattice.
    pub fn coverage(&self, lo: [f64; 2], hi: [f64; 2]) -> f64 {
        let h = self.grid.step;
        let start = |axis: usize| {
            let o = self.grid.origin[axis] + 0.5 * h;
            ((lo[axis] - o) / h).ceil() as i64
        };
        let end = |axis: usize| {
            let o = self.grid.origin[axis] + 0.5 * h;
            ((hi[axis] - o) / h).floor() as i64
        };
        let (x0, x1, y0, y1) = (start(0), end(0), start(1), end(1));
        if x1 < x0 || y1 < y0 {
            return 0.0;
        }
        let mut inside = 0usize;
        let mut total = 0usize;
        for ix in x0..=x1 {
            for iy in y0..=y1 {
                total += 1;
                if ix >= 0 && iy >= 0 && (ix as usize) < self.grid.nx && (iy as usize) < self.grid.ny {
                    inside += self.member[self.grid.index(ix as usize, iy as usize)] as usize;
                }
            }
        }
        inside as f64 / total as f64
    }

    pub fn sample(&self) -> RegionSample {
        let half = 0.5 * self.grid.step;
        let points = (0..self.grid.len())
            .map(|i| SamplePoint {
                coords: self.grid.centre(i),
                member: self.member[i],
                margin: if self.member[i] { half } else { -half },
                first_iteration: self.first_iteration[i],
            })
            .collect();
        RegionSample {
            grid_step: self.grid.step,
            points,
        }
    }

    /// Parallelogram that adjoined pixel `i`, if it was adjoined by a sweep.
    pub fn certificate(&self, i: usize) -> Option<Parallelogram> {
        let step = self.trace[i]?;
        let (m1, m2) = self.slopes[step.slope_index];
        let centre = self.grid.centre(step.parent);
        let reg = regulator_at(
            Point::new(centre.to_vec()).ok()?,
            step.half_width,
            m1,
            m2,
            self.form,
        )
        .ok()?;
        reg.parallelogram().ok()
    }

    /// Replays every adjoining step: sweep-0 pixels must lie in `domain`;
    /// every later pixel must sit inside the certificate parallelogram of an
    /// earlier member whose wedge fitted inside the set as it stood before
    /// the pixel's sweep.
    pub fn audit(&self, domain: &BoxUnionDomain) -> std::result::Result<(), String> {
        let mut by_sweep: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.grid.len() {
            match (self.member[i], self.first_iteration[i]) {
                (false, None) => {}
                (true, Some(0)) => {
                    if !pixel_in_domain(&self.grid, domain, i) {
                        return Err(format!("pixel {i} marked original but outside the domain"));
                    }
                }
                (true, Some(t)) => {
                    if by_sweep.len() <= t {
                        by_sweep.resize(t + 1, Vec::new());
                    }
                    by_sweep[t].push(i);
                }
                _ => return Err(format!("pixel {i} has inconsistent membership record")),
            }
        }
        for (t, pixels) in by_sweep.iter().enumerate() {
            if pixels.is_empty() {
                continue;
            }
            let before: Vec<bool> = self
                .first_iteration
                .iter()
                .map(|f| matches!(f, Some(s) if *s < t))
                .collect();
            let raster = Raster::new(self.grid, &before);
            for &i in pixels {
                let step = self.trace[i].ok_or(format!("pixel {i} has no trace"))?;
                if !before[step.parent] {
                    return Err(format!("parent of pixel {i} joined no earlier than sweep {t}"));
                }
                let (m1, m2) = self.slopes[step.slope_index];
                let (depth, _) = raster.wedge_depth(step.parent, m1, m2);
                if depth < step.half_width * (1.0 - 1e-12) {
                    return Err(format!(
                        "wedge of half-width {} at parent of pixel {i} leaves the set (fits {depth})",
                        step.half_width
                    ));
                }
                let cert = self.certificate(i).ok_or(format!("pixel {i}: bad certificate"))?;
                let (lo, hi) = self.grid.square(i);
                if !cert.covers_box(lo, hi) {
                    return Err(format!("pixel {i} is not covered by its certificate"));
                }
            }
        }
        Ok(())
    }
}

/// Inner box approximation of `{xy > -1}` inside `[-r, r]^2`: the two
/// closed quadrant squares where `xy >= 0` plus `steps` boxes in each of the
/// other quadrants, each with corner product `-fill`.
pub fn hyperbola_staircase(r: f64, steps: usize, fill: f64) -> Result<BoxUnionDomain> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::input(format!("half-width must be at least 1, got {r}")));
    }
    if !(fill > 0.0 && fill < 1.0) || steps == 0 {
        return Err(Error::input("need 0 < fill < 1 and at least one step"));
    }
    let mut boxes = vec![
        AxisBox::new(vec![0.0, 0.0], vec![r, r])?,
        AxisBox::new(vec![-r, -r], vec![0.0, 0.0])?,
    ];
    let ratio = (1.0 / (r * r)).powf(1.0 / steps as f64);
    for j in 0..=steps {
        let a = r * ratio.powi(j as i32);
        let b = (fill / a).min(r);
        boxes.push(AxisBox::new(vec![-a, 0.0], vec![0.0, b])?);
        boxes.push(AxisBox::new(vec![0.0, -a], vec![b, 0.0])?);
    }
    BoxUnionDomain::new(2, boxes)
}

fn pixel_in_domain(grid: &Grid, domain: &BoxUnionDomain, i: usize) -> bool {
    let (lo, hi) = grid.square(i);
    let e = LATTICE_SLACK * grid.step;
    domain.covers_box(&[lo[0] + e, lo[1] + e], &[hi[0] - e, hi[1] - e])
}

fn build_grid(domain: &BoxUnionDomain, cfg: &RegulateConfig) -> Result<Grid> {
    let mut bb = domain.bounding_box();
    if let Some(w) = &cfg.window {
        for a in 0..2 {
            bb.lo[a] = bb.lo[a].min(w.lo[a]);
            bb.hi[a] = bb.hi[a].max(w.hi[a]);
        }
    }
    let h = cfg.grid_step;
    let count = |a: usize| ((bb.hi[a] - bb.lo[a]) / h * (1.0 - 1e-12)).ceil().max(1.0);
    let (nx, ny) = (count(0), count(1));
    if nx * ny > 5e7 {
        return Err(Error::input(format!(
            "grid of {nx} x {ny} pixels is too large; increase the grid step"
        )));
    }
    Ok(Grid {
        origin: [bb.lo[0], bb.lo[1]],
        step: h,
        nx: nx as usize,
        ny: ny as usize,
    })
}

/// Iterates the parallelogram enlargement of `domain` to a fixed point or
/// until `cfg.max_iters` sweeps have run.
pub fn regulated_set_iterate(domain: &BoxUnionDomain, cfg: &RegulateConfig) -> Result<RegulatedSet> {
    iterate(domain, cfg, None)
}

pub(crate) fn iterate(
    domain: &BoxUnionDomain,
    cfg: &RegulateConfig,
    order: Option<&[usize]>,
) -> Result<RegulatedSet> {
    Error::check_dim(2, domain.dim())?;
    cfg.validate()?;
    let grid = build_grid(domain, cfg)?;
    let n = grid.len();
    if let Some(o) = order {
        Error::check_dim(n, o.len())?;
    }

    let mut member: Vec<bool> = (0..n).map(|i| pixel_in_domain(&grid, domain, i)).collect();
    if !member.iter().any(|&m| m) {
        return Err(Error::Domain(format!(
            "domain has no interior at grid step {}",
            cfg.grid_step
        )));
    }
    let mut first_iteration: Vec<Option<usize>> =
        member.iter().map(|&m| if m { Some(0) } else { None }).collect();
    let mut trace: Vec<Option<TraceStep>> = vec![None; n];

    let templates: Vec<Parallelogram> = cfg
        .slopes
        .iter()
        .map(|&(m1, m2)| regulator_at(Point::origin(2), 1.0, m1, m2, cfg.form)?.parallelogram())
        .collect::<Result<_>>()?;
    let families = cfg.slopes.len();
    let mut blocker = vec![NOT_COMPUTED; n * families];

    let natural: Vec<usize> = (0..n).collect();
    let order = order.unwrap_or(&natural);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let raster = Raster::new(grid, &member);
        let mut runs: Vec<Vec<Run>> = vec![Vec::new(); grid.nx];
        for &i in order {
            if !member[i] {
                continue;
            }
            for (f, &(m1, m2)) in cfg.slopes.iter().enumerate() {
                let slot = i * families + f;
                let b = blocker[slot];
                if b != NOT_COMPUTED && (b == EDGE || !member[b as usize]) {
                    continue;
                }
                let (depth, by) = raster.wedge_depth(i, m1, m2);
                blocker[slot] = by;
                if depth > 0.0 {
                    let t = &templates[f];
                    let scale = depth * (1.0 - RASTER_SHRINK);
                    let cert = Parallelogram {
                        center: grid.centre(i),
                        half_width: t.half_width * scale,
                        axis_slope: t.axis_slope,
                        shear_half_width: t.shear_half_width * scale,
                    };
                    collect_runs(&raster, &cert, i, f, depth, &mut runs);
                }
            }
        }

        let mut added = 0usize;
        for (ix, col) in runs.iter_mut().enumerate() {
            if col.is_empty() {
                continue;
            }
            col.sort_by(|a, b| {
                a.lo.cmp(&b.lo)
                    .then(a.parent.cmp(&b.parent))
                    .then(a.slope_index.cmp(&b.slope_index))
                    .then(b.hi.cmp(&a.hi))
            });
            let mut next = 0usize;
            for run in col.iter() {
                for iy in run.lo.max(next)..=run.hi {
                    let j = grid.index(ix, iy);
                    if !member[j] && first_iteration[j].is_none() {
                        first_iteration[j] = Some(iterations);
                        trace[j] = Some(TraceStep {
                            parent: run.parent,
                            slope_index: run.slope_index,
                            half_width: run.half_width,
                        });
                        added += 1;
                    }
                }
                next = next.max(run.hi + 1);
            }
        }
        for j in 0..n {
            if first_iteration[j] == Some(iterations) {
                member[j] = true;
            }
        }
        if added == 0 {
            converged = true;
            break;
        }
    }

    Ok(RegulatedSet {
        grid,
        slopes: cfg.slopes.clone(),
        form: cfg.form,
        member,
        first_iteration,
        trace,
        iterations,
        converged,
    })
}

/// Column runs of pixels whose closed squares lie in `cert` and which hold
/// at least one non-member.
fn collect_runs(
    raster: &Raster,
    cert: &Parallelogram,
    parent: usize,
    slope_index: usize,
    half_width: f64,
    runs: &mut [Vec<Run>],
) {
    let g = raster.grid;
    let h = g.step;
    let [px, py] = cert.center;
    let c_lo = ((px - cert.half_width - g.origin[0]) / h).ceil().max(0.0);
    let c_hi = ((px + cert.half_width - g.origin[0]) / h).floor() - 1.0;
    if c_hi < c_lo {
        return;
    }
    let c_hi = (c_hi as usize).min(g.nx - 1);
    for ix in c_lo as usize..=c_hi {
        let x0 = g.origin[0] + ix as f64 * h;
        let dx0 = x0 - px;
        let dx1 = dx0 + h;
        let floor = py + cert.axis_slope * dx1 - cert.shear_half_width;
        let ceil = py + cert.axis_slope * dx0 + cert.shear_half_width;
        let r_lo = ((floor - g.origin[1]) / h).ceil().max(0.0);
        let r_hi = ((ceil - g.origin[1]) / h).floor() - 1.0;
        if r_hi < r_lo || r_lo >= g.ny as f64 {
            continue;
        }
        let (lo, hi) = (r_lo as usize, (r_hi as usize).min(g.ny - 1));
        if raster.outside_count(ix, lo, hi) > 0 {
            runs[ix].push(Run {
                lo,
                hi,
                parent,
                slope_index,
                half_width,
            });
        }
    }
}
