//! Command-line front end. Every artifact carries the tool version, the
//! echoed configuration and the seed, and is written atomically.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::chebyshev::{gautschi_bound, vandermonde_inverse_inf_norm};
use crate::continuation::{continue_path, series_region_scan, PathOptions};
use crate::error::{Error, Result};
use crate::geometry::{AxisBox, BoxUnionDomain, DirectionVec, Point};
use crate::julia::{check_julia_line, check_julia_point, check_julia_set, liouville_check};
use crate::pick::{inscribe_wedge_in, named_oracle, taylor_table, TableOptions};
use crate::regulators::{hyperbola_staircase, regulated_set_iterate, BoundForm, RegulateConfig, WedgeRegulator};

/// Environment variable naming the directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "PICKWEDGE_OUT_DIR";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "pickwedge", version, about = "Pick functions, local Julia inequalities and wedge regulators")]
pub struct RunConfig {
    /// Seed recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent. Relative paths resolve against
    /// $PICKWEDGE_OUT_DIR when it is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Inverse norms of Chebyshev Vandermonde matrices against the Gautschi bound (CSV).
    Vandermonde {
        #[arg(long, default_value_t = 15)]
        max_degree: usize,
    },
    /// Regulated set of a box-union domain (CSV).
    Regulate(RegulateArgs),
    /// Local Julia inequality report (JSON).
    Julia(JuliaArgs),
    /// Certified continuation along a segment (JSON).
    Continue(ContinueArgs),
    /// Certified versus observed series convergence around a point (CSV).
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RegulateArgs {
    /// Domain JSON `{"dim": 2, "boxes": [{"lo": [..], "hi": [..]}, ..]}`.
    #[arg(long, conflicts_with = "staircase")]
    pub domain: Option<PathBuf>,
    /// Use the inscribed staircase of `{xy > -1}` with this half-width.
    #[arg(long)]
    pub staircase: Option<f64>,
    #[arg(long, default_value_t = 0.999)]
    pub fill: f64,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long)]
    pub m2: Option<f64>,
    #[arg(long, default_value_t = 0.04)]
    pub grid: f64,
    #[arg(long, default_value_t = 25)]
    pub iters: usize,
    #[arg(long, value_enum, default_value_t = FormArg::Interpolation)]
    pub form: FormArg,
    /// Extra raster window `xlo,ylo,xhi,yhi`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<Coords>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormArg {
    Interpolation,
    Compact,
}

impl From<FormArg> for BoundForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Interpolation => BoundForm::Interpolation,
            FormArg::Compact => BoundForm::Compact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JuliaMode {
    Point,
    Line,
    Set,
    Liouville,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct JuliaArgs {
    #[arg(long)]
    pub oracle: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Coords,
    /// Positive direction; for `set` mode the real parts of the offset.
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Coords,
    /// Imaginary parts of the offset in `set` mode.
    #[arg(long, allow_hyphen_values = true)]
    pub imag: Option<Coords>,
    #[arg(long, default_value_t = 10)]
    pub max_order: usize,
    #[arg(long, value_enum, default_value_t = JuliaMode::Line)]
    pub mode: JuliaMode,
    /// Wedge half-width for `set` mode; the inscribed one when absent.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub m1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub m2: f64,
    /// Segment scales for `liouville` mode.
    #[arg(long, default_value = "1,10,100,1000")]
    pub scales: Coords,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ContinueArgs {
    #[arg(long)]
    pub oracle: String,
    #[arg(long, allow_hyphen_values = true)]
    pub base: Coords,
    #[arg(long, allow_hyphen_values = true)]
    pub target: Coords,
    #[arg(long, default_value_t = 0.5)]
    pub m1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value_t = FormArg::Interpolation)]
    pub form: FormArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub oracle: String,
    #[arg(long, allow_hyphen_values = true)]
    pub base: Coords,
    /// Wedge half-width; the inscribed one when absent.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub m1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    #[arg(long, default_value_t = 0.01)]
    pub grid: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Interpolation)]
    pub form: FormArg,
}

/// A comma-separated list of numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Coords(pub Vec<f64>);

impl std::str::FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("{v:?} is not a number")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Coords)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a RunConfig,
    result: T,
}

/// A rendered artifact.
enum Artifact {
    Json(String),
    Csv(String),
}

impl Artifact {
    fn bytes(&self) -> &[u8] {
        match self {
            Artifact::Json(s) | Artifact::Csv(s) => s.as_bytes(),
        }
    }
}

fn json<T: Serialize>(cfg: &RunConfig, result: T) -> Result<Artifact> {
    let env = Envelope {
        tool: "pickwedge",
        version: VERSION,
        seed: cfg.seed,
        config: cfg,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(Artifact::Json(s))
}

/// Comment lines (version, config, seed, then `notes`) and the column row.
fn csv_header(cfg: &RunConfig, notes: &[String], columns: &[&str]) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "# pickwedge {VERSION}");
    let _ = writeln!(s, "# config: {}", serde_json::to_string(cfg)?);
    let _ = writeln!(s, "# seed: {}", cfg.seed);
    for note in notes {
        let _ = writeln!(s, "# {note}");
    }
    let _ = writeln!(s, "{}", columns.join(","));
    Ok(s)
}

fn point(v: &[f64]) -> Result<Point> {
    Point::new(v.to_vec())
}

fn run_vandermonde(cfg: &RunConfig, max_degree: usize) -> Result<Artifact> {
    let mut s = csv_header(
        cfg,
        &[],
        &["degree", "inverse_inf_norm", "bound_k", "bound_k_plus_1", "holds_k", "holds_k_plus_1"],
    )?;
    for k in 0..=max_degree {
        let norm = vandermonde_inverse_inf_norm(k)?;
        let (bk, bk1) = (gautschi_bound(k), gautschi_bound(k + 1));
        let _ = writeln!(
            s,
            "{k},{norm:.17e},{bk:.17e},{bk1:.17e},{},{}",
            norm <= bk + 1e-9,
            norm <= bk1 + 1e-9
        );
    }
    Ok(Artifact::Csv(s))
}

fn run_regulate(cfg: &RunConfig, a: &RegulateArgs) -> Result<Artifact> {
    let domain: BoxUnionDomain = match (&a.domain, a.staircase) {
        (Some(path), None) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        (None, Some(r)) => {
            let steps = (64.0 * (1.0 + r.max(1.0).ln())).ceil() as usize;
            hyperbola_staircase(r, steps, a.fill)?
        }
        _ => return Err(Error::input("give exactly one of --domain and --staircase")),
    };
    let mut rc = RegulateConfig::new(a.grid);
    rc.max_iters = a.iters;
    rc.form = a.form.into();
    match (a.m1, a.m2) {
        (Some(m1), Some(m2)) => rc = rc.with_slopes(m1, m2),
        (None, None) => {}
        _ => return Err(Error::input("give both --m1 and --m2 or neither")),
    }
    if let Some(Coords(w)) = &a.window {
        if w.len() != 4 {
            return Err(Error::input("--window takes xlo,ylo,xhi,yhi"));
        }
        rc.window = Some(AxisBox::new(vec![w[0], w[1]], vec![w[2], w[3]])?);
    }
    let set = regulated_set_iterate(&domain, &rc)?;
    let notes = [format!("iterations: {} converged: {}", set.iterations(), set.converged())];
    let mut s = csv_header(cfg, &notes, &["x", "y", "member", "first_iteration_reached"])?;
    for p in set.sample().points {
        let first = p.first_iteration.map_or(String::new(), |t| t.to_string());
        let _ = writeln!(s, "{},{},{},{}", p.coords[0], p.coords[1], u8::from(p.member), first);
    }
    Ok(Artifact::Csv(s))
}

fn regulator_for(
    o: &crate::pick::PickOracle,
    base: &Point,
    delta: Option<f64>,
    m1: f64,
    m2: f64,
    form: FormArg,
) -> Result<WedgeRegulator> {
    let wedge = match delta {
        Some(d) => crate::geometry::Wedge::new(base.clone(), d, m1, m2)?,
        None => inscribe_wedge_in(o, base, m1, m2, 1e6)?,
    };
    Ok(WedgeRegulator::with_form(wedge, form.into()))
}

fn run_julia(cfg: &RunConfig, a: &JuliaArgs) -> Result<Artifact> {
    let o = named_oracle(&a.oracle)?;
    let p = point(&a.point.0)?;
    let report = match a.mode {
        JuliaMode::Point => check_julia_point(&o, &p, &DirectionVec::new(a.direction.0.clone())?)?,
        JuliaMode::Line => check_julia_line(&o, &p, &DirectionVec::new(a.direction.0.clone())?, a.max_order)?,
        JuliaMode::Liouville => liouville_check(&o, &p, &DirectionVec::new(a.direction.0.clone())?, &a.scales.0, a.max_order)?,
        JuliaMode::Set => {
            let imag = a.imag.clone().map_or_else(|| vec![0.0; a.direction.0.len()], |c| c.0);
            Error::check_dim(a.direction.0.len(), imag.len())?;
            let z: Vec<Complex64> = a.direction.0.iter().zip(&imag).map(|(&r, &i)| Complex64::new(r, i)).collect();
            let reg = regulator_for(&o, &p, a.delta, a.m1, a.m2, FormArg::Interpolation)?;
            check_julia_set(&o, &reg, &z, a.max_order)?
        }
    };
    json(cfg, report)
}

fn run_continue(cfg: &RunConfig, a: &ContinueArgs) -> Result<Artifact> {
    let o = named_oracle(&a.oracle)?;
    let opts = PathOptions {
        m1: a.m1,
        m2: a.m2,
        order: a.order,
        tol: a.tol,
        max_steps: a.max_steps,
        form: a.form.into(),
    };
    let r = continue_path(&o, &point(&a.base.0)?, &point(&a.target.0)?, &opts)?;
    json(cfg, r)
}

fn run_scan(cfg: &RunConfig, a: &ScanArgs) -> Result<Artifact> {
    let o = named_oracle(&a.oracle)?;
    let base = point(&a.base.0)?;
    let reg = regulator_for(&o, &base, a.delta, a.m1, a.m2, a.form)?;
    let table = taylor_table(&o, &base, a.order, &TableOptions::roots_of_unity(Some(reg.aspect())))?;
    let scan = series_region_scan(&table, &reg, a.grid)?;
    let notes = [format!("half_width: {}", reg.wedge().half_width())];
    let mut s = csv_header(cfg, &notes, &["dx", "dy", "root", "certified", "convergent", "agree"])?;
    for p in &scan.points {
        let _ = writeln!(
            s,
            "{},{},{:.17e},{},{},{}",
            p.offset[0],
            p.offset[1],
            p.root,
            u8::from(p.certified),
            u8::from(p.convergent),
            u8::from(p.agree)
        );
    }
    Ok(Artifact::Csv(s))
}

fn produce(cfg: &RunConfig) -> Result<Artifact> {
    match &cfg.command {
        Command::Vandermonde { max_degree } => run_vandermonde(cfg, *max_degree),
        Command::Regulate(a) => run_regulate(cfg, a),
        Command::Julia(a) => run_julia(cfg, a),
        Command::Continue(a) => run_continue(cfg, a),
        Command::Scan(a) => run_scan(cfg, a),
    }
}

/// `path` itself if absolute, else joined onto `$PICKWEDGE_OUT_DIR` if set.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::input(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = (|| -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[derive(Serialize)]
struct ErrorBody {
    error: ErrorDetail,
}

#[derive(Serialize)]
struct ErrorDetail {
    kind: &'static str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "input",
        Error::Dimension { .. } => "dimension",
        Error::Domain(_) => "domain",
        Error::DegenerateWedge => "degenerate_wedge",
        Error::Pole(_) => "pole",
        Error::Support(_) => "support",
        Error::NotAnalytic => "not_analytic",
        Error::Accuracy(_) => "accuracy",
        Error::Sampling(_) => "sampling",
        Error::Conditioning { .. } => "conditioning",
        Error::Precondition(_) => "precondition",
        Error::Stuck { .. } => "stuck",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit status: 0 on success, 2 for usage errors, 1 for numeric failures.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let outcome = produce(&cfg).and_then(|art| match &cfg.out {
        Some(path) => write_atomic(&resolve_out(path), art.bytes()),
        None => stdout.write_all(art.bytes()).map_err(Error::from),
    });
    match outcome {
        Ok(()) => 0,
        Err(e @ (Error::Input(_) | Error::Dimension { .. })) => {
            let _ = writeln!(stderr, "error: {e}");
            let _ = writeln!(stderr, "run with --help for usage");
            2
        }
        Err(e) => {
            let body = ErrorBody {
                error: ErrorDetail {
                    kind: error_kind(&e),
                    message: e.to_string(),
                },
            };
            let _ = writeln!(stdout, "{}", serde_json::to_string(&body).unwrap_or_default());
            1
        }
    }
}
