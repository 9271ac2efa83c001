//! Exactly evaluable Pick functions on the upper poly-half-plane, their
//! singular sets along lines, and Taylor data at real points.

mod cauchy;
mod measure;
mod taylor;
mod type1;

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, Reach, RealDomain, Wedge};

pub use cauchy::{directional_derivatives, directional_series, DirectionalSeries};
pub use measure::{eval_measure_transform, moment_coefficients, DiscreteMeasure};
pub use taylor::{monomials, taylor_table, HomogeneousForm, SamplingScheme, TableOptions, TaylorTable, MAX_TABLE_DIM};
pub use type1::{eval_type1, TypeIRep};

/// Points of the upper poly-half-plane sampled when an oracle is built.
const CONSTRUCTION_SAMPLES: usize = 200;
const CONSTRUCTION_SEED: u64 = 0x005e_ed0f_91c4;
/// Allowed negative imaginary part, relative to `1 + |h|`.
const PICK_SLACK: f64 = 1e-10;

/// How an oracle evaluates.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleKind {
    /// One variable: `sum w_i / (t_i - z)`.
    Measure(DiscreteMeasure),
    /// Two variables: `<(A - z_Y)^{-1} alpha, alpha>`.
    TypeI(TypeIRep),
    /// `z_1 / (1 - z_1 z_2) = -1 / (z_2 - 1/z_1)`.
    Geom2,
    /// `sum c_i z_i` with `c_i >= 0`.
    Linear(Vec<f64>),
    /// A measure transform of `sum y_i z_i`, `y_i >= 0`; any number of variables.
    MeasureMean { measure: DiscreteMeasure, y: Vec<f64> },
}

/// A Pick function with exact evaluation and known singular set.
#[derive(Clone, Debug, PartialEq)]
pub struct PickOracle {
    id: String,
    kind: OracleKind,
}

impl PickOracle {
    fn build(id: impl Into<String>, kind: OracleKind) -> Result<Self> {
        let o = PickOracle { id: id.into(), kind };
        o.check_pick_property()?;
        Ok(o)
    }

    pub fn measure(mu: DiscreteMeasure) -> Result<Self> {
        PickOracle::build("measure", OracleKind::Measure(mu))
    }

    pub fn type1(rep: TypeIRep) -> Result<Self> {
        PickOracle::build("type1", OracleKind::TypeI(rep))
    }

    pub fn geom2() -> Self {
        PickOracle {
            id: "geom2".into(),
            kind: OracleKind::Geom2,
        }
    }

    pub fn linear(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::input("linear oracle needs at least one coefficient"));
        }
        if let Some(v) = c.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::input(format!(
                "linear coefficients must be finite and nonnegative, got {v}"
            )));
        }
        let id = format!(
            "linear:{}",
            c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        PickOracle::build(id, OracleKind::Linear(c))
    }

    /// `-2 / (z_1 + z_2)`.
    pub fn neg_reciprocal_mean() -> Self {
        PickOracle {
            id: "neg_reciprocal_mean".into(),
            kind: OracleKind::TypeI(TypeIRep::scalar(0.0, 0.5).expect("valid scalar representation")),
        }
    }

    /// The measure transform composed with `y z_1 + (1 - y) z_2`.
    pub fn lifted_measure(mu: &DiscreteMeasure, y: f64) -> Result<Self> {
        let rep = TypeIRep::lifted_measure(mu.atoms(), mu.weights(), y)?;
        PickOracle::build("lifted_measure", OracleKind::TypeI(rep))
    }

    /// `z -> mu(sum y_i z_i)` for nonnegative, not all zero, `y`.
    pub fn measure_nd(mu: &DiscreteMeasure, y: &[f64]) -> Result<Self> {
        if y.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || !y.iter().any(|v| *v > 0.0) {
            return Err(Error::input(format!("mixing weights must be nonnegative and not all zero, got {y:?}")));
        }
        PickOracle::build(
            "measure_nd",
            OracleKind::MeasureMean {
                measure: mu.clone(),
                y: y.to_vec(),
            },
        )
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            OracleKind::Measure(_) => 1,
            OracleKind::TypeI(_) | OracleKind::Geom2 => 2,
            OracleKind::Linear(c) => c.len(),
            OracleKind::MeasureMean { y, .. } => y.len(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        Error::check_dim(self.dim(), z.len())?;
        match &self.kind {
            OracleKind::Measure(mu) => mu.eval(z[0]),
            OracleKind::TypeI(rep) => rep.eval([z[0], z[1]]),
            OracleKind::Geom2 => {
                let d = 1.0 - z[0] * z[1];
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(Error::Pole(format!("z1 z2 = 1 at ({}, {})", z[0], z[1])));
                }
                Ok(z[0] / d)
            }
            OracleKind::Linear(c) => Ok(c.iter().zip(z).map(|(ci, zi)| zi * ci).sum()),
            OracleKind::MeasureMean { measure, y } => measure.eval(y.iter().zip(z).map(|(yi, zi)| zi * yi).sum()),
        }
    }

    /// Value at a real point of the analytic domain.
    pub fn eval_real(&self, p: &[f64]) -> Result<f64> {
        let z: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(self.eval(&z)?.re)
    }

    /// Whether the oracle is analytic at the real point `p`.
    pub fn is_analytic_at(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match &self.kind {
            OracleKind::Measure(mu) => !mu.atoms().contains(&p[0]),
            OracleKind::TypeI(rep) => rep.singular_offsets([p[0], p[1]], [Complex64::new(1.0, 0.0); 2]).is_ok(),
            OracleKind::Geom2 => p[0] * p[1] != 1.0,
            OracleKind::Linear(_) => true,
            OracleKind::MeasureMean { measure, y } => {
                let w: f64 = y.iter().zip(p).map(|(a, b)| a * b).sum();
                !measure.atoms().contains(&w)
            }
        }
    }

    /// Offsets `s` with `p + s x` on the singular set, for real `p` and
    /// complex `x`. The list may repeat values.
    pub fn singular_offsets(&self, p: &[f64], x: &[Complex64]) -> Result<Vec<Complex64>> {
        Error::check_dim(self.dim(), p.len())?;
        Error::check_dim(self.dim(), x.len())?;
        if !self.is_analytic_at(p) {
            return Err(Error::NotAnalytic);
        }
        match &self.kind {
            OracleKind::Measure(mu) => {
                if x[0].norm() == 0.0 {
                    return Ok(Vec::new());
                }
                Ok(mu.atoms().iter().map(|&t| Complex64::new(t - p[0], 0.0) / x[0]).collect())
            }
            OracleKind::TypeI(rep) => rep.singular_offsets([p[0], p[1]], [x[0], x[1]]),
            OracleKind::Geom2 => {
                // (p1 + s x1)(p2 + s x2) = 1
                let a = x[0] * x[1];
                let b = x[1] * p[0] + x[0] * p[1];
                let c = Complex64::new(p[0] * p[1] - 1.0, 0.0);
                Ok(quadratic_roots(a, b, c))
            }
            OracleKind::Linear(_) => Ok(Vec::new()),
            OracleKind::MeasureMean { measure, y } => {
                let w: f64 = y.iter().zip(p).map(|(a, b)| a * b).sum();
                let v: Complex64 = y.iter().zip(x).map(|(a, b)| b * a).sum();
                if v.norm() == 0.0 {
                    return Ok(Vec::new());
                }
                Ok(measure.atoms().iter().map(|&t| Complex64::new(t - w, 0.0) / v).collect())
            }
        }
    }

    /// Distance in `s` from 0 to the nearest singular offset along `x`.
    pub fn radius(&self, p: &[f64], x: &[Complex64]) -> Result<Reach> {
        let offsets = self.singular_offsets(p, x)?;
        Ok(offsets
            .iter()
            .map(|s| Reach::Finite(s.norm()))
            .fold(Reach::Unbounded, Reach::min))
    }

    /// Real radius along a real direction.
    pub fn radius_real(&self, p: &[f64], x: &[f64]) -> Result<Reach> {
        self.radius(p, &complexify(x))
    }

    /// First real singular offsets `(forward, backward)` along `x`.
    pub fn real_reach(&self, p: &[f64], x: &[f64]) -> Result<(Reach, Reach)> {
        let offsets = self.singular_offsets(p, &complexify(x))?;
        let mut fwd = Reach::Unbounded;
        let mut back = Reach::Unbounded;
        for s in offsets.iter().filter(|s| s.im == 0.0) {
            if s.re > 0.0 {
                fwd = fwd.min(Reach::Finite(s.re));
            } else if s.re < 0.0 {
                back = back.min(Reach::Finite(-s.re));
            }
        }
        Ok((fwd, back))
    }

    /// Checks `Im h >= 0` at seeded random points of the poly-half-plane.
    fn check_pick_property(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(CONSTRUCTION_SEED);
        for _ in 0..CONSTRUCTION_SAMPLES {
            let z = sample_upper_point(&mut rng, self.dim());
            let h = self.eval(&z)?;
            if h.im < -PICK_SLACK * (1.0 + h.norm()) {
                return Err(Error::input(format!(
                    "{} is not a Pick function: Im h = {} at {:?}",
                    self.id, h.im, z
                )));
            }
        }
        Ok(())
    }
}

/// A point of the upper poly-half-plane with real parts in `(-4, 4)` and
/// imaginary parts log-uniform in `(1e-3, 10)`.
pub fn sample_upper_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re = rng.gen_range(-4.0..4.0);
            let im = 10f64.powf(rng.gen_range(-3.0..1.0));
            Complex64::new(re, im)
        })
        .collect()
}

pub(crate) fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Roots of `a s^2 + b s + c`, with the cancellation-free formula.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if a == zero {
        if b == zero {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - a * c * 4.0;
    let root = if disc.im == 0.0 && disc.re >= 0.0 {
        Complex64::new(disc.re.sqrt(), 0.0)
    } else {
        disc.sqrt()
    };
    let plus = b + root;
    let minus = b - root;
    let q = if plus.norm() >= minus.norm() { plus } else { minus } * -0.5;
    if q == zero {
        return vec![zero, zero];
    }
    vec![q / a, c / q]
}

impl RealDomain for PickOracle {
    fn dim(&self) -> usize {
        PickOracle::dim(self)
    }

    fn contains(&self, q: &[f64]) -> bool {
        self.is_analytic_at(q)
    }

    fn ray_exit(&self, p: &[f64], x: &[f64]) -> Reach {
        match self.real_reach(p, x) {
            Ok((fwd, _)) => fwd,
            Err(_) => Reach::Finite(0.0),
        }
    }
}

/// Builds an oracle from its command-line name: `geom2`, `linear:c1,c2,..`,
/// `neg_reciprocal_mean`, `measure:<file.json>`, `type1:<file.json>`.
pub fn named_oracle(name: &str) -> Result<PickOracle> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    match (head, arg) {
        ("geom2", None) => Ok(PickOracle::geom2()),
        ("neg_reciprocal_mean", None) => Ok(PickOracle::neg_reciprocal_mean()),
        ("linear", Some(list)) => {
            let c = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::input(format!("bad linear coefficient {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            PickOracle::linear(c)
        }
        ("measure", Some(path)) => {
            let mu: DiscreteMeasure = read_json(path)?;
            Ok(PickOracle::measure(mu)?.with_id(name))
        }
        ("type1", Some(path)) => {
            let rep: TypeIRep = read_json(path)?;
            Ok(PickOracle::type1(rep)?.with_id(name))
        }
        _ => Err(Error::input(format!(
            "unknown oracle {name:?}; expected geom2, linear:<c,..>, neg_reciprocal_mean, measure:<file>, type1:<file>"
        ))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Slope samples per axis when scanning the wedge's direction box.
const SLOPE_SAMPLES: usize = 129;
/// Relative safety margin applied to the scanned half-width.
const INSCRIBE_MARGIN: f64 = 1e-6;

/// Largest wedge `W(p; delta, m1, m2)` inside the oracle's real analytic
/// domain, capped at `cap`. The pyramids are unions of segments along
/// `(1, m)` for `m` in the slope box, so `delta` is the least real reach over
/// those directions; it is found by sampling the box and refining the
/// minimum by golden-section search, then reduced by a relative margin.
pub fn inscribe_wedge_in(o: &PickOracle, p: &Point, m1: f64, m2: f64, cap: f64) -> Result<Wedge> {
    let n = o.dim();
    Error::check_dim(n, p.dim())?;
    if n < 2 {
        return Err(Error::input("a wedge needs dimension at least 2"));
    }
    if !(m1 > 0.0 && m1 < m2 && m2.is_finite()) {
        return Err(Error::input(format!("slopes must satisfy 0 < m1 < m2, got ({m1}, {m2})")));
    }
    if !(cap > 0.0) {
        return Err(Error::input("cap must be positive"));
    }
    if !o.is_analytic_at(p.coords()) {
        return Err(Error::Domain(format!("{:?} is not in the analytic domain", p.coords())));
    }
    let reach_at = |m: &[f64]| -> Result<f64> {
        let mut x = Vec::with_capacity(n);
        x.push(1.0);
        x.extend_from_slice(m);
        let (f, b) = o.real_reach(p.coords(), &x)?;
        Ok(f.min(b).finite().unwrap_or(f64::INFINITY))
    };
    let free = n - 1;
    let per_axis = if free == 1 { SLOPE_SAMPLES } else { 17 };
    let grid: Vec<f64> = (0..per_axis)
        .map(|i| m1 + (m2 - m1) * i as f64 / (per_axis - 1) as f64)
        .collect();
    let mut best = f64::INFINITY;
    let mut best_m = vec![m1; free];
    let mut idx = vec![0usize; free];
    loop {
        let m: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        let r = reach_at(&m)?;
        if r < best {
            best = r;
            best_m = m;
        }
        let mut axis = 0;
        while axis < free {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == free {
            break;
        }
    }
    if free == 1 && best.is_finite() {
        let step = (m2 - m1) / (per_axis - 1) as f64;
        let lo = (best_m[0] - step).max(m1);
        let hi = (best_m[0] + step).min(m2);
        best = best.min(golden_min(|m| reach_at(&[m]).unwrap_or(0.0), lo, hi, 60));
    }
    let delta = (best * (1.0 - INSCRIBE_MARGIN)).min(cap);
    if !(delta > 0.0) {
        return Err(Error::DegenerateWedge);
    }
    Wedge::new(p.clone(), delta, m1, m2)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd).min(f(a)).min(f(b));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

/// `2 pi j / m` roots of unity.
pub(crate) fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn named_examples() {
        let g = named_oracle("geom2").unwrap();
        let v = g.eval_real(&[0.1, 0.1]).unwrap();
        assert!((v - 0.1 / 0.99).abs() < 1e-16);
        assert!(matches!(g.eval_real(&[1.0, 1.0]), Err(Error::Pole(_))));
        let l = named_oracle("linear:2,3").unwrap();
        assert_eq!(l.eval_real(&[1.0, 1.0]).unwrap(), 5.0);
        assert_eq!(l.id(), "linear:2,3");
        let n = named_oracle("neg_reciprocal_mean").unwrap();
        assert!((n.eval_real(&[1.0, 3.0]).unwrap() + 0.5).abs() < 1e-16);
        assert!(matches!(named_oracle("cosh"), Err(Error::Input(_))));
        assert!(named_oracle("linear:1,x").is_err());
        assert!(named_oracle("linear:-1").is_err());
        assert!(named_oracle("measure:/nonexistent/file.json").is_err());
    }

    #[test]
    fn oracles_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let mpath = dir.path().join("m.json");
        std::fs::write(&mpath, r#"{"atoms":[0.0],"weights":[1.0]}"#).unwrap();
        let m = named_oracle(&format!("measure:{}", mpath.display())).unwrap();
        assert!((m.eval_real(&[1.0]).unwrap() + 1.0).abs() < 1e-16);
        let tpath = dir.path().join("t.json");
        std::fs::write(&tpath, r#"{"A":[[0]],"Y":[[0.5]],"alpha":[1]}"#).unwrap();
        let t = named_oracle(&format!("type1:{}", tpath.display())).unwrap();
        assert!((t.eval_real(&[1.0, 3.0]).unwrap() + 0.5).abs() < 1e-16);
    }

    #[test]
    fn non_pick_is_rejected() {
        let bad = PickOracle {
            id: "negated".into(),
            kind: OracleKind::Linear(vec![-1.0, 0.5]),
        };
        assert!(matches!(bad.check_pick_property(), Err(Error::Input(_))));
        assert!(PickOracle::geom2().check_pick_property().is_ok());
        assert!(PickOracle::neg_reciprocal_mean().check_pick_property().is_ok());
    }

    #[test]
    fn geom2_offsets() {
        let g = PickOracle::geom2();
        // along (1,1) from 0: s^2 = 1
        let (f, b) = g.real_reach(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(f, Reach::Finite(1.0));
        assert_eq!(b, Reach::Finite(1.0));
        // along (1,-1): s^2 = -1, no real singularity but radius 1
        let (f, b) = g.real_reach(&[0.0, 0.0], &[1.0, -1.0]).unwrap();
        assert!(f.is_unbounded() && b.is_unbounded());
        assert_eq!(g.radius_real(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), Reach::Finite(1.0));
        // along an axis from 0: never singular
        assert!(g.radius_real(&[0.0, 0.0], &[1.0, 0.0]).unwrap().is_unbounded());
        assert!(matches!(
            g.singular_offsets(&[1.0, 1.0], &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotAnalytic)
        ));
        // complex direction: (i s)(s) = 1 -> |s| = 1
        let r = g.radius(&[0.0, 0.0], &[c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        assert!((r.finite().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measure_offsets() {
        let mu = DiscreteMeasure::new(vec![-1.0, 2.0], vec![1.0, 1.0]).unwrap();
        let o = PickOracle::measure(mu).unwrap();
        let (f, b) = o.real_reach(&[0.5], &[2.0]).unwrap();
        assert_eq!(f, Reach::Finite(0.75));
        assert_eq!(b, Reach::Finite(0.75));
        assert!(!o.is_analytic_at(&[2.0]));
    }

    #[test]
    fn inscribed_wedge_for_geom2() {
        let g = PickOracle::geom2();
        let w = inscribe_wedge_in(&g, &Point::origin(2), 0.5, 2.0, 1e6).unwrap();
        // binding direction is (1, 2): s^2 * 2 = 1
        let exact = 0.5f64.sqrt();
        assert!(w.half_width() <= exact);
        assert!(w.half_width() > exact * (1.0 - 1e-5));
        let l = PickOracle::linear(vec![1.0, 2.0]).unwrap();
        let w = inscribe_wedge_in(&l, &Point::origin(2), 0.5, 2.0, 7.0).unwrap();
        assert_eq!(w.half_width(), 7.0);
        assert!(matches!(
            inscribe_wedge_in(&g, &Point::new(vec![1.0, 1.0]).unwrap(), 0.5, 2.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn quadratic_roots_are_accurate() {
        let r = quadratic_roots(c(1.0, 0.0), c(-1e8, 0.0), c(1.0, 0.0));
        let small = r.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        assert!((small - 1e-8).abs() < 1e-22);
        assert_eq!(quadratic_roots(c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)), vec![c(0.5, 0.0)]);
        assert!(quadratic_roots(c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)).is_empty());
    }
}
