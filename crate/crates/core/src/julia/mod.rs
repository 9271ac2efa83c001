//! Numerical checks of the local Julia inequalities
//! `|h^{(k)}(p)[x]| <= k! ||x|| h'(p)[1]` and of the Liouville property of
//! entire locally operator monotone functions.

pub mod corpus;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DirectionVec, Point, Reach};
use crate::pick::{directional_derivatives, inscribe_wedge_in, taylor_table, PickOracle, TableOptions};
use crate::regulators::WedgeRegulator;

/// Relative slack `lhs <= rhs + SLACK (1 + |rhs|)`.
pub const SLACK: f64 = 1e-9;

/// Which inequality a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Point,
    Line,
    Set,
    Liouville,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    LinearConsistent,
    Inconclusive,
}

/// Direction of a real check or complex offset of a set check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Direction(Vec<f64>),
    Offset(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuliaRow {
    pub k: usize,
    /// Segment scale for Liouville rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl JuliaRow {
    fn new(k: usize, scale: Option<f64>, lhs: f64, rhs: f64) -> Self {
        JuliaRow {
            k,
            scale,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + SLACK * (1.0 + rhs.abs()),
        }
    }

    /// `lhs / rhs`, or zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuliaReport {
    pub oracle: String,
    pub check: CheckKind,
    pub base: Vec<f64>,
    pub target: Target,
    /// `h'(p)[1]`.
    pub gradient_sum: f64,
    pub rows: Vec<JuliaRow>,
    pub verdict: Verdict,
}

impl JuliaReport {
    fn conjunction(oracle: &PickOracle, check: CheckKind, p: &Point, target: Target, grad1: f64, rows: Vec<JuliaRow>) -> Self {
        let verdict = if rows.iter().all(|r| r.holds) {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        JuliaReport {
            oracle: oracle.id().to_string(),
            check,
            base: p.coords().to_vec(),
            target,
            gradient_sum: grad1,
            rows,
            verdict,
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::LinearConsistent)
    }

    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().map(JuliaRow::ratio).fold(0.0, f64::max)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `h'(p)[1]`.
pub fn gradient_sum(o: &PickOracle, p: &Point) -> Result<f64> {
    Ok(directional_derivatives(o, p, &DirectionVec::ones(o.dim()), 1)?[0])
}

/// `|h'(p)[x]|` against `||x|| h'(p)[1]`.
pub fn check_julia_point(o: &PickOracle, p: &Point, x: &DirectionVec) -> Result<JuliaReport> {
    Error::check_dim(o.dim(), p.dim())?;
    Error::check_dim(o.dim(), x.dim())?;
    x.require_positive()?;
    let grad1 = gradient_sum(o, p)?;
    let lhs = directional_derivatives(o, p, x, 1)?[0].abs();
    let rows = vec![JuliaRow::new(1, None, lhs, x.sup_norm() * grad1)];
    Ok(JuliaReport::conjunction(o, CheckKind::Point, p, Target::Direction(x.coords().to_vec()), grad1, rows))
}

/// Whether the closed segment `[p - x, p + x]` avoids the singular set.
fn segment_inside(o: &PickOracle, p: &Point, x: &[f64], scale: f64) -> Result<bool> {
    let (fwd, back) = o.real_reach(p.coords(), x)?;
    Ok(fwd.exceeds(scale) && back.exceeds(scale))
}

/// `|h^{(k)}(p)[x]|` against `k! ||x|| h'(p)[1]` for `k = 1..=K`.
pub fn check_julia_line(o: &PickOracle, p: &Point, x: &DirectionVec, k_max: usize) -> Result<JuliaReport> {
    Error::check_dim(o.dim(), p.dim())?;
    Error::check_dim(o.dim(), x.dim())?;
    x.require_positive()?;
    if k_max == 0 {
        return Err(Error::input("max order must be at least 1"));
    }
    if !o.is_analytic_at(p.coords()) {
        return Err(Error::NotAnalytic);
    }
    if !segment_inside(o, p, x.coords(), 1.0)? {
        return Err(Error::Precondition(format!(
            "segment {:?} +- {:?} leaves the analytic domain",
            p.coords(),
            x.coords()
        )));
    }
    let grad1 = gradient_sum(o, p)?;
    let d = directional_derivatives(o, p, x, k_max)?;
    let norm = x.sup_norm();
    let rows = d
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = i + 1;
            JuliaRow::new(k, None, v.abs(), factorial(k) * norm * grad1)
        })
        .collect();
    Ok(JuliaReport::conjunction(o, CheckKind::Line, p, Target::Direction(x.coords().to_vec()), grad1, rows))
}

/// `|h^{(k)}(p)[z]|` from the Taylor forms against
/// `k! bound_k(z) h'(p)[1]`, with `p` the regulator's wedge base.
pub fn check_julia_set(o: &PickOracle, reg: &WedgeRegulator, z: &[Complex64], k_max: usize) -> Result<JuliaReport> {
    Error::check_dim(o.dim(), reg.dim())?;
    Error::check_dim(o.dim(), z.len())?;
    if k_max == 0 {
        return Err(Error::input("max order must be at least 1"));
    }
    let w = reg.wedge();
    let p = w.base().clone();
    let cap = 2.0 * w.half_width();
    let room = inscribe_wedge_in(o, &p, w.slope_lo(), w.slope_hi(), cap)?;
    // undo the relative safety margin of the inscription
    if w.half_width() > room.half_width() * (1.0 + 2e-6) {
        return Err(Error::Precondition(format!(
            "wedge half-width {} exceeds the room {} in the analytic domain",
            w.half_width(),
            room.half_width()
        )));
    }
    let grad1 = gradient_sum(o, &p)?;
    let opts = TableOptions::roots_of_unity(Some(reg.aspect()));
    let table = taylor_table(o, &p, k_max, &opts)?;
    let terms = table.terms(z)?;
    let mut rows = Vec::with_capacity(k_max);
    for (k, term) in terms.iter().enumerate().skip(1) {
        let fact = factorial(k);
        let rhs = fact * reg.bound_nd(k, z)? * grad1;
        rows.push(JuliaRow::new(k, None, fact * term.norm(), rhs));
    }
    Ok(JuliaReport::conjunction(o, CheckKind::Set, &p, Target::Offset(z.to_vec()), grad1, rows))
}

/// For each admissible scale `s`, compares `|f^{(k)}(base)[x]|` with the
/// envelope `k! ||x|| f'(base)[1] / s^{k-1}`, `k = 2..=K`.
///
/// Scales whose segment leaves the domain are skipped. The verdict is
/// `Violated` if any row fails, `Inconclusive` if the domain is bounded along
/// `x` (the envelope cannot be driven to zero), and `LinearConsistent` otherwise.
pub fn liouville_check(
    o: &PickOracle,
    base: &Point,
    x: &DirectionVec,
    scales: &[f64],
    k_max: usize,
) -> Result<JuliaReport> {
    Error::check_dim(o.dim(), base.dim())?;
    Error::check_dim(o.dim(), x.dim())?;
    x.require_positive()?;
    if k_max < 2 {
        return Err(Error::input("max order must be at least 2"));
    }
    if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::input("scales must be positive and finite"));
    }
    if !o.is_analytic_at(base.coords()) {
        return Err(Error::NotAnalytic);
    }
    let (fwd, back) = o.real_reach(base.coords(), x.coords())?;
    let unbounded = fwd == Reach::Unbounded && back == Reach::Unbounded;
    let grad1 = gradient_sum(o, base)?;
    let d = directional_derivatives(o, base, x, k_max)?;
    let norm = x.sup_norm();
    let mut rows = Vec::new();
    for &s in scales {
        if !(fwd.exceeds(s) && back.exceeds(s)) {
            continue;
        }
        for k in 2..=k_max {
            let envelope = factorial(k) * norm * grad1 / s.powi(k as i32 - 1);
            rows.push(JuliaRow::new(k, Some(s), d[k - 1].abs(), envelope));
        }
    }
    let verdict = if rows.iter().any(|r| !r.holds) {
        Verdict::Violated
    } else if unbounded {
        Verdict::LinearConsistent
    } else {
        Verdict::Inconclusive
    };
    Ok(JuliaReport {
        oracle: o.id().to_string(),
        check: CheckKind::Liouville,
        base: base.coords().to_vec(),
        target: Target::Direction(x.coords().to_vec()),
        gradient_sum: grad1,
        rows,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pick::DiscreteMeasure;
    use crate::regulators::{regulator_at, BoundForm};

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn dir(v: &[f64]) -> DirectionVec {
        DirectionVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn point_examples() {
        let r = check_julia_point(&PickOracle::neg_reciprocal_mean(), &pt(&[1.0, 1.0]), &dir(&[1.0, 3.0])).unwrap();
        assert!((r.rows[0].lhs - 2.0).abs() < 1e-10);
        assert!((r.rows[0].rhs - 3.0).abs() < 1e-10);
        assert_eq!(r.verdict, Verdict::Holds);

        let lin = PickOracle::linear(vec![2.0, 3.0]).unwrap();
        let r = check_julia_point(&lin, &pt(&[4.0, -7.0]), &dir(&[0.5, 2.0])).unwrap();
        assert_eq!((r.rows[0].lhs, r.rows[0].rhs), (7.0, 10.0));
        let r = check_julia_point(&lin, &pt(&[0.0, 0.0]), &dir(&[2.0, 2.0])).unwrap();
        assert_eq!(r.rows[0].slack, 0.0);

        let r = check_julia_point(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0])).unwrap();
        assert!((r.rows[0].lhs - 1.0).abs() < 1e-12 && (r.rows[0].rhs - 1.0).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn line_examples() {
        let r = check_julia_line(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[0.5, 0.5]), 3).unwrap();
        assert!((r.rows[2].lhs - 0.75).abs() < 1e-10);
        assert!((r.rows[2].rhs - 3.0).abs() < 1e-10);
        assert!(r.holds());

        let lin = PickOracle::linear(vec![2.0, 3.0]).unwrap();
        let r = check_julia_line(&lin, &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0]), 5).unwrap();
        assert!(r.rows[1..].iter().all(|row| row.lhs == 0.0));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn sharpness_probe() {
        for (r, k) in [(0.9, 3usize), (0.99, 3), (0.99, 7)] {
            let rep = check_julia_line(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[r, r]), k).unwrap();
            // order 2j+1 ratio is r^{2j}
            let want = r.powi(k as i32 - 1);
            assert!((rep.rows[k - 1].ratio() - want).abs() < 1e-8, "r={r} k={k}");
        }
    }

    #[test]
    fn line_precondition() {
        let e = check_julia_line(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0]), 3);
        assert!(matches!(e, Err(Error::Precondition(_))));
        let e = check_julia_line(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[1.0, -1.0]), 3);
        assert!(e.is_err());
    }

    #[test]
    fn set_examples() {
        let reg = regulator_at(pt(&[0.0, 0.0]), 0.5, 0.5, 2.0, BoundForm::Interpolation).unwrap();
        let z = [Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0)];
        let r = check_julia_set(&PickOracle::geom2(), &reg, &z, 10).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!((r.rows[0].lhs - 0.1).abs() < 1e-10);
        assert!(r.holds());

        let zero = [Complex64::new(0.0, 0.0); 2];
        let r = check_julia_set(&PickOracle::geom2(), &reg, &zero, 6).unwrap();
        assert!(r.rows.iter().all(|row| row.lhs == 0.0 && row.rhs == 0.0 && row.holds));

        let lin = PickOracle::linear(vec![1.0, 4.0]).unwrap();
        let r = check_julia_set(&lin, &reg, &z, 6).unwrap();
        assert!(r.rows[1..].iter().all(|row| row.lhs == 0.0));

        let wide = regulator_at(pt(&[0.0, 0.0]), 1.0, 0.5, 2.0, BoundForm::Interpolation).unwrap();
        assert!(matches!(check_julia_set(&PickOracle::geom2(), &wide, &z, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn liouville_examples() {
        let lin = PickOracle::linear(vec![2.0, 3.0]).unwrap();
        let r = liouville_check(&lin, &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0]), &[1.0, 10.0, 100.0], 4).unwrap();
        assert_eq!(r.verdict, Verdict::LinearConsistent);
        let env = |k: usize, s: f64| r.rows.iter().find(|row| row.k == k && row.scale == Some(s)).unwrap().rhs;
        assert!((env(3, 1.0) / env(3, 10.0) - 100.0).abs() < 1e-9);

        let r = liouville_check(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0]), &[0.5, 10.0], 4).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.rows.iter().all(|row| row.scale == Some(0.5)));

        // -1/z at base 2: |g''(0)| = 2/8; envelope 2 g'(0)/s = 2 (1/4) / s
        let inv = PickOracle::measure(DiscreteMeasure::point_mass(0.0, 1.0).unwrap()).unwrap();
        let r = liouville_check(&inv, &pt(&[2.0]), &dir(&[1.0]), &[0.5, 1.0, 1.5, 3.0], 2).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.rows.len(), 3);
        for row in &r.rows {
            let s = row.scale.unwrap();
            assert!((row.lhs - 0.25).abs() < 1e-10);
            assert!((row.rhs - 0.5 / s).abs() < 1e-10);
            assert!(row.holds);
        }
    }

    #[test]
    fn report_serializes() {
        let r = check_julia_point(&PickOracle::geom2(), &pt(&[0.0, 0.0]), &dir(&[1.0, 1.0])).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["check"], "point");
        assert_eq!(v["verdict"], "holds");
        assert_eq!(v["target"]["direction"][0], 1.0);
    }
}
