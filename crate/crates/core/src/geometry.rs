//! Real domains in `R^n`: wedges, unions of axis-aligned boxes, and the
//! directional reach `d^S(p)[x]`.
//!
//! Every domain answers one question exactly: how far can the ray
//! `p + s x` travel before it leaves the set. The reach of a direction is the
//! smaller of the forward and backward exit times.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative slack used when testing closed linear constraints.
const CONSTRAINT_SLACK: f64 = 1e-12;

/// A point of `R^n` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// `self + s * x`.
    pub fn offset(&self, s: f64, x: &[f64]) -> Point {
        Point(self.0.iter().zip(x).map(|(p, xi)| p + s * xi).collect())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A non-zero direction in `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DirectionVec(Vec<f64>);

impl DirectionVec {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("direction must be a finite, non-empty vector"));
        }
        if coords.iter().all(|&c| c == 0.0) {
            return Err(Error::input("direction must be non-zero"));
        }
        Ok(DirectionVec(coords))
    }

    /// The all-ones direction `1 = (1, ..., 1)`.
    pub fn ones(dim: usize) -> Self {
        DirectionVec(vec![1.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c > 0.0)
    }

    /// Rejects directions outside the open positive cone.
    pub fn require_positive(&self) -> Result<()> {
        if self.is_positive() {
            Ok(())
        } else {
            Err(Error::input(format!(
                "direction {:?} is not in the open positive cone",
                self.0
            )))
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        DirectionVec::new(self.0.iter().map(|x| c * x).collect())
    }

    pub fn negated(&self) -> Self {
        DirectionVec(self.0.iter().map(|x| -x).collect())
    }
}

impl<'de> Deserialize<'de> for DirectionVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        DirectionVec::new(coords).map_err(serde::de::Error::custom)
    }
}

/// An exit time along a ray. `Unbounded` means the ray never leaves the set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reach {
    Finite(f64),
    Unbounded,
}

impl Reach {
    pub fn min(self, other: Reach) -> Reach {
        match (self, other) {
            (Reach::Unbounded, r) | (r, Reach::Unbounded) => r,
            (Reach::Finite(a), Reach::Finite(b)) => Reach::Finite(a.min(b)),
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Reach::Finite(v) => Some(v),
            Reach::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Reach::Unbounded)
    }

    /// True when the reach is strictly larger than `s`.
    pub fn exceeds(self, s: f64) -> bool {
        match self {
            Reach::Finite(v) => v > s,
            Reach::Unbounded => true,
        }
    }

    pub fn scaled(self, c: f64) -> Reach {
        match self {
            Reach::Finite(v) => Reach::Finite(v * c),
            Reach::Unbounded => Reach::Unbounded,
        }
    }
}

impl PartialOrd for Reach {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Reach::Unbounded, Reach::Unbounded) => Some(Ordering::Equal),
            (Reach::Unbounded, _) => Some(Ordering::Greater),
            (_, Reach::Unbounded) => Some(Ordering::Less),
            (Reach::Finite(a), Reach::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Reach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reach::Finite(v) => write!(f, "{v}"),
            Reach::Unbounded => write!(f, "inf"),
        }
    }
}

impl Serialize for Reach {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Reach::Finite(v) => s.serialize_f64(*v),
            Reach::Unbounded => s.serialize_str("inf"),
        }
    }
}

/// A subset of `R^n` that can report ray exit times.
pub trait RealDomain {
    fn dim(&self) -> usize;

    fn contains(&self, q: &[f64]) -> bool;

    /// `sup { s >= 0 : p + t x in S for all t in [0, s] }`, or `Finite(0)`
    /// when `p` is outside the set.
    fn ray_exit(&self, p: &[f64], x: &[f64]) -> Reach;
}

/// All of `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WholeSpace {
    pub dim: usize,
}

impl RealDomain for WholeSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, _q: &[f64]) -> bool {
        true
    }

    fn ray_exit(&self, _p: &[f64], _x: &[f64]) -> Reach {
        Reach::Unbounded
    }
}

/// `d^S(p)[x]`: the smaller of the forward and backward exit times.
pub fn directional_reach<D: RealDomain + ?Sized>(
    domain: &D,
    p: &Point,
    x: &DirectionVec,
) -> Result<Reach> {
    Error::check_dim(domain.dim(), p.dim())?;
    Error::check_dim(domain.dim(), x.dim())?;
    if !domain.contains(p.coords()) {
        return Ok(Reach::Finite(0.0));
    }
    let back = x.negated();
    Ok(domain
        .ray_exit(p.coords(), x.coords())
        .min(domain.ray_exit(p.coords(), back.coords())))
}

/// Interval of `s` for which `a_j + b_j s >= 0` holds for every constraint,
/// or `None` when empty.
fn clip_ray(constraints: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (a, b) in constraints {
        let slack = CONSTRAINT_SLACK * (1.0 + a.abs());
        if b == 0.0 {
            if a < -slack {
                return None;
            }
            continue;
        }
        let root = -a / b;
        if b > 0.0 {
            lo = lo.max(root);
        } else {
            hi = hi.min(root);
        }
    }
    if lo <= hi + CONSTRAINT_SLACK * (1.0 + hi.abs().min(lo.abs())) {
        Some((lo, hi.max(lo)))
    } else {
        None
    }
}

/// Given closed intervals of `s` where the ray lies in each piece, returns
/// how far the ray travels from `s = 0` through their union.
fn chain_from_zero(mut intervals: Vec<(f64, f64)>) -> Reach {
    intervals.retain(|&(_, hi)| hi >= 0.0);
    intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let tol = |v: f64| CONSTRAINT_SLACK * (1.0 + v.abs());
    if !intervals.iter().any(|&(lo, hi)| lo <= tol(0.0) && hi >= 0.0) {
        return Reach::Finite(0.0);
    }
    let mut reached = 0.0_f64;
    loop {
        let mut grew = false;
        for &(lo, hi) in &intervals {
            if lo <= reached + tol(reached) && hi > reached {
                if hi.is_infinite() {
                    return Reach::Unbounded;
                }
                reached = hi;
                grew = true;
            }
        }
        if !grew {
            return Reach::Finite(reached);
        }
    }
}

/// `W^n_p(delta; m1, m2)`: two pyramids with apex `p`, spanned by
/// `+-delta * (1, m_2, ..., m_n)` with every `m_i` in `[m1, m2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wedge {
    base: Point,
    half_width: f64,
    slope_lo: f64,
    slope_hi: f64,
}

impl Wedge {
    pub fn new(base: Point, half_width: f64, slope_lo: f64, slope_hi: f64) -> Result<Self> {
        if base.dim() < 2 {
            return Err(Error::input("a wedge needs dimension at least 2"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::input(format!(
                "wedge half-width must be positive and finite, got {half_width}"
            )));
        }
        if !(slope_lo > 0.0 && slope_lo < slope_hi && slope_hi.is_finite()) {
            return Err(Error::input(format!(
                "wedge slopes must satisfy 0 < m1 < m2, got ({slope_lo}, {slope_hi})"
            )));
        }
        Ok(Wedge {
            base,
            half_width,
            slope_lo,
            slope_hi,
        })
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn slope_lo(&self) -> f64 {
        self.slope_lo
    }

    pub fn slope_hi(&self) -> f64 {
        self.slope_hi
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Same slopes and base with a different half-width.
    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Wedge::new(self.base.clone(), half_width, self.slope_lo, self.slope_hi)
    }

    /// Same slopes and half-width centred at another base point.
    pub fn translated(&self, base: Point) -> Result<Self> {
        Error::check_dim(self.dim(), base.dim())?;
        Wedge::new(base, self.half_width, self.slope_lo, self.slope_hi)
    }

    /// Vertices `p +- delta * m` for `m` in `M_n`, upper pyramid first.
    pub fn vertices(&self) -> Vec<Point> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 << (n - 1));
        for sign in [1.0, -1.0] {
            for mask in 0..(1usize << (n - 1)) {
                let mut v = vec![1.0; n];
                for (i, vi) in v.iter_mut().enumerate().skip(1) {
                    *vi = if mask >> (i - 1) & 1 == 1 {
                        self.slope_hi
                    } else {
                        self.slope_lo
                    };
                }
                out.push(self.base.offset(sign * self.half_width, &v));
            }
        }
        out
    }

    /// `a + b s >= 0` constraints for `base + v` in the upper pyramid when
    /// `v = offset + s x`.
    fn pyramid_constraints<'a>(
        &'a self,
        offset: &'a [f64],
        x: &'a [f64],
    ) -> impl Iterator<Item = (f64, f64)> + 'a {
        let (m1, m2, d) = (self.slope_lo, self.slope_hi, self.half_width);
        let first = [(offset[0], x[0]), (d - offset[0], -x[0])];
        let rest = (1..offset.len()).flat_map(move |i| {
            [
                (offset[i] - m1 * offset[0], x[i] - m1 * x[0]),
                (m2 * offset[0] - offset[i], m2 * x[0] - x[i]),
            ]
        });
        first.into_iter().chain(rest)
    }
}

impl RealDomain for Wedge {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Closed-form membership: with `v = +-(q - p)` oriented so `v_1 >= 0`,
    /// either `v = 0` or `0 < v_1 <= delta` and `m1 <= v_i / v_1 <= m2`.
    fn contains(&self, q: &[f64]) -> bool {
        if q.len() != self.dim() {
            return false;
        }
        let mut v: Vec<f64> = q.iter().zip(self.base.coords()).map(|(a, b)| a - b).collect();
        if v[0] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        if v.iter().all(|&c| c == 0.0) {
            return true;
        }
        let v1 = v[0];
        let slack = CONSTRAINT_SLACK * (1.0 + self.half_width);
        if !(v1 > 0.0 && v1 <= self.half_width + slack) {
            return false;
        }
        v[1..].iter().all(|&vi| {
            let s = CONSTRAINT_SLACK * (1.0 + vi.abs());
            vi >= self.slope_lo * v1 - s && vi <= self.slope_hi * v1 + s
        })
    }

    fn ray_exit(&self, p: &[f64], x: &[f64]) -> Reach {
        if !self.contains(p) {
            return Reach::Finite(0.0);
        }
        let up: Vec<f64> = p.iter().zip(self.base.coords()).map(|(a, b)| a - b).collect();
        let down: Vec<f64> = up.iter().map(|c| -c).collect();
        let xneg: Vec<f64> = x.iter().map(|c| -c).collect();
        let mut pieces = Vec::with_capacity(2);
        if let Some(iv) = clip_ray(self.pyramid_constraints(&up, x)) {
            pieces.push(iv);
        }
        if let Some(iv) = clip_ray(self.pyramid_constraints(&down, &xneg)) {
            pieces.push(iv);
        }
        chain_from_zero(pieces)
    }
}

#[derive(Serialize, Deserialize)]
struct WedgeJson {
    base: Vec<f64>,
    delta: f64,
    m1: f64,
    m2: f64,
}

impl Serialize for Wedge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WedgeJson {
            base: self.base.0.clone(),
            delta: self.half_width,
            m1: self.slope_lo,
            m2: self.slope_hi,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Wedge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WedgeJson::deserialize(d)?;
        let base = Point::new(w.base).map_err(serde::de::Error::custom)?;
        Wedge::new(base, w.delta, w.m1, w.m2).map_err(serde::de::Error::custom)
    }
}

/// A closed axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = AxisBox { lo, hi };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        Error::check_dim(self.lo.len(), self.hi.len())?;
        let ok = self
            .lo
            .iter()
            .zip(&self.hi)
            .all(|(l, h)| l.is_finite() && h.is_finite() && l < h);
        if ok {
            Ok(())
        } else {
            Err(Error::input(format!(
                "box requires finite lo < hi componentwise, got lo={:?} hi={:?}",
                self.lo, self.hi
            )))
        }
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        q.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| *c >= *l && *c <= *h)
    }

    fn clip(&self, p: &[f64], x: &[f64]) -> Option<(f64, f64)> {
        clip_ray((0..p.len()).flat_map(|i| {
            [(p[i] - self.lo[i], x[i]), (self.hi[i] - p[i], -x[i])]
        }))
    }
}

/// A finite union of closed axis-aligned boxes of a common dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxUnionDomain {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl BoxUnionDomain {
    pub fn new(dim: usize, boxes: Vec<AxisBox>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("domain dimension must be positive"));
        }
        if boxes.is_empty() {
            return Err(Error::input("box union needs at least one box"));
        }
        for b in &boxes {
            Error::check_dim(dim, b.lo.len())?;
            b.validate()?;
        }
        Ok(BoxUnionDomain { dim, boxes })
    }

    /// A single box.
    pub fn from_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let dim = lo.len();
        BoxUnionDomain::new(dim, vec![AxisBox::new(lo, hi)?])
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn bounding_box(&self) -> AxisBox {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for b in &self.boxes {
            for i in 0..self.dim {
                lo[i] = lo[i].min(b.lo[i]);
                hi[i] = hi[i].max(b.hi[i]);
            }
        }
        AxisBox { lo, hi }
    }

    /// Boxes of the union which are a superset of this one: every box
    /// enlarged by `margin` in every direction.
    pub fn enlarged(&self, margin: f64) -> Result<Self> {
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                AxisBox::new(
                    b.lo.iter().map(|v| v - margin).collect(),
                    b.hi.iter().map(|v| v + margin).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        BoxUnionDomain::new(self.dim, boxes)
    }

    /// Cells of the arrangement generated by the box faces, restricted to
    /// `[lo, hi]`, that lie outside the union. Each cell is `(lo, hi)` with
    /// possibly infinite bounds; the cells are open.
    fn outside_cells(&self, lo: &[f64], hi: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        let axes: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| {
                let mut cuts = vec![lo[i], hi[i]];
                for b in &self.boxes {
                    for c in [b.lo[i], b.hi[i]] {
                        if c > lo[i] && c < hi[i] {
                            cuts.push(c);
                        }
                    }
                }
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
                cuts.dedup();
                cuts
            })
            .collect();
        let counts: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
        let total: usize = counts.iter().product();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.dim];
        for _ in 0..total {
            let clo: Vec<f64> = (0..self.dim).map(|i| axes[i][idx[i]]).collect();
            let chi: Vec<f64> = (0..self.dim).map(|i| axes[i][idx[i] + 1]).collect();
            let inside = clo.iter().zip(&chi).all(|(a, b)| a.is_finite() && b.is_finite()) && {
                let centre: Vec<f64> = clo.iter().zip(&chi).map(|(a, b)| 0.5 * (a + b)).collect();
                self.contains(&centre)
            };
            if !inside && clo.iter().zip(&chi).all(|(a, b)| a < b) {
                out.push((clo, chi));
            }
            for i in 0..self.dim {
                idx[i] += 1;
                if idx[i] < counts[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        out
    }

    /// Whether the closed box `[lo, hi]` lies inside the union.
    pub fn covers_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        if lo.len() != self.dim || hi.len() != self.dim {
            return false;
        }
        self.outside_cells(lo, hi).is_empty()
    }

    /// Whether `p` lies in the interior of the union.
    pub fn is_interior(&self, p: &[f64]) -> bool {
        let eps: Vec<f64> = p.iter().map(|c| 1e-12 * (1.0 + c.abs())).collect();
        let lo: Vec<f64> = p.iter().zip(&eps).map(|(c, e)| c - e).collect();
        let hi: Vec<f64> = p.iter().zip(&eps).map(|(c, e)| c + e).collect();
        self.contains(p) && self.covers_box(&lo, &hi)
    }
}

impl RealDomain for BoxUnionDomain {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, q: &[f64]) -> bool {
        q.len() == self.dim && self.boxes.iter().any(|b| b.contains(q))
    }

    /// Exact: each box meets the ray in one interval; the exit time chains
    /// the intervals that overlap, starting at `s = 0`.
    fn ray_exit(&self, p: &[f64], x: &[f64]) -> Reach {
        let pieces = self.boxes.iter().filter_map(|b| b.clip(p, x)).collect();
        chain_from_zero(pieces)
    }
}

#[derive(Deserialize)]
struct BoxUnionJson {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl<'de> Deserialize<'de> for BoxUnionDomain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BoxUnionJson::deserialize(d)?;
        BoxUnionDomain::new(raw.dim, raw.boxes).map_err(serde::de::Error::custom)
    }
}

/// Smallest half-width at which the open upper pyramid with apex `p`
/// enters the open cell `(lo, hi)`, or `None` if it never does.
///
/// With `a = lo - p`, `b = hi - p` the pyramid meets the cell at depth `v_1`
/// iff `a_1 < v_1 < b_1` and, for `i >= 2`, `m1 v_1 < b_i` and `m2 v_1 > a_i`.
pub(crate) fn pyramid_entry_depth(
    lo_rel: &[f64],
    hi_rel: &[f64],
    m1: f64,
    m2: f64,
) -> Option<f64> {
    let mut lower = lo_rel[0];
    let mut upper = hi_rel[0];
    for i in 1..lo_rel.len() {
        lower = lower.max(lo_rel[i] / m2);
        upper = upper.min(hi_rel[i] / m1);
    }
    let lower = lower.max(0.0);
    if upper > lower {
        Some(lower)
    } else {
        None
    }
}

/// Fits the largest wedge `W(p; delta, m1, m2)` inside a box union.
///
/// The supremum is exact: every cell of the face arrangement outside the
/// union contributes the depth at which either pyramid first enters it.
pub fn inscribe_wedge(domain: &BoxUnionDomain, p: &Point, m1: f64, m2: f64) -> Result<Wedge> {
    Error::check_dim(domain.dim(), p.dim())?;
    if p.dim() < 2 {
        return Err(Error::input("a wedge needs dimension at least 2"));
    }
    if !(m1 > 0.0 && m1 < m2 && m2.is_finite()) {
        return Err(Error::input(format!(
            "slopes must satisfy 0 < m1 < m2, got ({m1}, {m2})"
        )));
    }
    if !domain.is_interior(p.coords()) {
        return Err(Error::Domain(format!(
            "point {:?} is not interior to the domain",
            p.coords()
        )));
    }
    let n = domain.dim();
    let big = vec![f64::INFINITY; n];
    let small = vec![f64::NEG_INFINITY; n];
    let mut best = f64::INFINITY;
    for (clo, chi) in domain.outside_cells(&small, &big) {
        let a: Vec<f64> = clo.iter().zip(p.coords()).map(|(c, q)| c - q).collect();
        let b: Vec<f64> = chi.iter().zip(p.coords()).map(|(c, q)| c - q).collect();
        if let Some(d) = pyramid_entry_depth(&a, &b, m1, m2) {
            best = best.min(d);
        }
        let na: Vec<f64> = b.iter().map(|c| -c).collect();
        let nb: Vec<f64> = a.iter().map(|c| -c).collect();
        if let Some(d) = pyramid_entry_depth(&na, &nb, m1, m2) {
            best = best.min(d);
        }
    }
    if !(best > 0.0) || !best.is_finite() {
        return Err(Error::DegenerateWedge);
    }
    Wedge::new(p.clone(), best, m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn dir(c: &[f64]) -> DirectionVec {
        DirectionVec::new(c.to_vec()).unwrap()
    }

    fn unit_wedge() -> Wedge {
        Wedge::new(pt(&[0.0, 0.0]), 1.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn wedge_membership_examples() {
        let w = unit_wedge();
        assert!(w.contains(&[0.5, 0.6]));
        assert!(w.contains(&[0.0, 0.0]));
        assert!(!w.contains(&[0.5, 1.5]));
        assert!(w.contains(&[-0.5, -0.6]));
        assert!(!w.contains(&[0.0, 0.3]));
        assert!(!w.contains(&[1.1, 1.1]));
    }

    #[test]
    fn wedge_rejects_bad_parameters() {
        assert!(Wedge::new(pt(&[0.0, 0.0]), 1.0, 2.0, 2.0).is_err());
        assert!(Wedge::new(pt(&[0.0, 0.0]), 0.0, 0.5, 2.0).is_err());
        assert!(Wedge::new(pt(&[0.0]), 1.0, 0.5, 2.0).is_err());
        assert!(Wedge::new(pt(&[0.0, 0.0]), 1.0, -0.5, 2.0).is_err());
    }

    #[test]
    fn wedge_reach_examples() {
        let w = unit_wedge();
        let o = pt(&[0.0, 0.0]);
        assert_eq!(directional_reach(&w, &o, &dir(&[1.0, 1.0])).unwrap(), Reach::Finite(1.0));
        assert_eq!(directional_reach(&w, &o, &dir(&[2.0, 2.0])).unwrap(), Reach::Finite(0.5));
        assert_eq!(directional_reach(&w, &o, &dir(&[1.0, 3.0])).unwrap(), Reach::Finite(0.0));
        // negative cone direction reaches the lower pyramid
        assert_eq!(directional_reach(&w, &o, &dir(&[-1.0, -1.0])).unwrap(), Reach::Finite(1.0));
    }

    #[test]
    fn reach_dimension_mismatch_is_an_error() {
        let w = unit_wedge();
        assert!(directional_reach(&w, &pt(&[0.0, 0.0, 0.0]), &dir(&[1.0, 1.0])).is_err());
        assert!(directional_reach(&w, &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn whole_space_reach_is_unbounded() {
        let r = directional_reach(&WholeSpace { dim: 2 }, &pt(&[3.0, -1.0]), &dir(&[1.0, 2.0]))
            .unwrap();
        assert!(r.is_unbounded());
    }

    #[test]
    fn box_reach_chains_through_touching_boxes() {
        let d = BoxUnionDomain::new(
            2,
            vec![
                AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
                AxisBox::new(vec![1.0, 0.0], vec![3.0, 1.0]).unwrap(),
                AxisBox::new(vec![5.0, 0.0], vec![6.0, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        let r = d.ray_exit(&[0.5, 0.5], &[1.0, 0.0]);
        assert_eq!(r, Reach::Finite(2.5));
        let r = directional_reach(&d, &pt(&[0.5, 0.5]), &dir(&[1.0, 0.0])).unwrap();
        assert_eq!(r, Reach::Finite(0.5));
        // outside point
        let r = directional_reach(&d, &pt(&[4.0, 0.5]), &dir(&[1.0, 0.0])).unwrap();
        assert_eq!(r, Reach::Finite(0.0));
    }

    #[test]
    fn covers_box_sees_seams_and_gaps() {
        let d = BoxUnionDomain::new(
            2,
            vec![
                AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
                AxisBox::new(vec![1.0, 0.0], vec![2.0, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        assert!(d.covers_box(&[0.5, 0.2], &[1.5, 0.8]));
        assert!(!d.covers_box(&[0.5, 0.2], &[1.5, 1.2]));
        assert!(d.is_interior(&[1.0, 0.5]));
        assert!(!d.is_interior(&[1.0, 1.0]));
    }

    #[test]
    fn inscribe_in_square() {
        let d = BoxUnionDomain::from_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let w = inscribe_wedge(&d, &pt(&[0.0, 0.0]), 0.5, 2.0).unwrap();
        assert!((w.half_width() - 0.5).abs() < 1e-15);
        let w = inscribe_wedge(&d, &pt(&[0.9, 0.0]), 0.5, 2.0).unwrap();
        assert!((w.half_width() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn inscribe_rejects_equal_slopes_and_boundary_points() {
        let d = BoxUnionDomain::from_box(vec![-2.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert!(matches!(
            inscribe_wedge(&d, &pt(&[0.0, 0.0]), 1.0, 1.0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            inscribe_wedge(&d, &pt(&[3.0, 0.0]), 0.5, 2.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            inscribe_wedge(&d, &pt(&[2.0, 0.0]), 0.5, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inscribe_in_cross_uses_both_arms() {
        // a plus-shaped domain: the wedge must fit in the centre square
        let d = BoxUnionDomain::new(
            2,
            vec![
                AxisBox::new(vec![-2.0, -0.25], vec![2.0, 0.25]).unwrap(),
                AxisBox::new(vec![-0.25, -2.0], vec![0.25, 2.0]).unwrap(),
            ],
        )
        .unwrap();
        let w = inscribe_wedge(&d, &pt(&[0.0, 0.0]), 0.5, 2.0).unwrap();
        // (delta, 2 delta) leaves the vertical arm at x = 0.25, but stays in it
        // while delta <= 0.25; (delta, delta/2) leaves the horizontal arm at y = 0.25
        assert!((w.half_width() - 0.25).abs() < 1e-12, "{}", w.half_width());
    }

    #[test]
    fn wedge_json_round_trip() {
        let w = unit_wedge();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"base":[0.0,0.0],"delta":1.0,"m1":0.5,"m2":2.0}"#);
        let back: Wedge = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<Wedge>(r#"{"base":[0,0],"delta":1,"m1":2,"m2":1}"#).is_err());
    }

    #[test]
    fn box_union_json() {
        let d: BoxUnionDomain = serde_json::from_str(
            r#"{"dim": 2, "boxes": [{"lo": [-1, -1], "hi": [1, 1]}]}"#,
        )
        .unwrap();
        assert!(d.contains(&[0.5, -0.5]));
        assert!(serde_json::from_str::<BoxUnionDomain>(r#"{"dim": 2, "boxes": []}"#).is_err());
        assert!(serde_json::from_str::<BoxUnionDomain>(
            r#"{"dim": 2, "boxes": [{"lo": [1, -1], "hi": [1, 1]}]}"#
        )
        .is_err());
    }
}
