//! Command-line front end: argument parsing, body-spec ingestion and report emission.
//!
//! Exit status is 0 on success, 2 for invalid input or violated preconditions and 3 when a
//! numerical budget ran out.

mod emit;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bodies::{Body, BodySpec, DirectionGrid};
use crate::calculus::{grad_f, hessian_f, one_sided_derivatives};
use crate::characterize::{curvature_law, homothety_necessity, shell_spread, CurvatureSource};
use crate::convolution::{convolution_body, curvature_positivity_probe, flatness_probe, homothety_check};
use crate::curvature::{cap_curvature, volumic_curvature, Schedule};
use crate::error::GeomError;
use crate::volume::{body_volume, intersection_volume, Method, TranslateProblem, VolumeOptions};

pub use emit::{profile_obj, profile_svg};

#[derive(Parser, Debug, Clone)]
#[command(name = "convgeom", version, about = "Numerical geometry of symmetric convex bodies")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (defaults to json, markdown for `report`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args, Debug, Clone)]
pub struct VolumeFlags {
    /// auto, exact or mc.
    #[arg(long, default_value = "auto")]
    pub method: Method,
    /// Target absolute volume error.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Initial boundary samples for smooth planar bodies.
    #[arg(long, default_value_t = 4096)]
    pub polygon_m: usize,
}

impl VolumeFlags {
    pub fn options(&self) -> Result<VolumeOptions, GeomError> {
        let o = VolumeOptions {
            method: self.method,
            tol: self.tol,
            seed: self.seed,
            polygon_m: self.polygon_m,
            mc_samples: self.samples,
            ..VolumeOptions::default()
        };
        o.validate()?;
        Ok(o)
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// |K ∩ (x + tau K)|.
    Volume {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// Radial profile of the convolution body K(delta, tau).
    Convbody {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Direction count in 2D, icosphere level in 3D.
        #[arg(long)]
        grid: Option<usize>,
        /// Radius tolerance.
        #[arg(long, default_value_t = 1e-9)]
        radius_tol: f64,
        /// Also run the flatness, homothety and curvature probes.
        #[arg(long)]
        probe: bool,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
        #[arg(long)]
        emit_obj: Option<PathBuf>,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// Gradient of F by boundary flux.
    Grad {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Angular sweep in 2D, icosphere level in 3D.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Hessian of F over the boundary intersection.
    Hess {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Angular sweep in 2D, curve samples in 3D.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// One-sided derivatives of r -> |K1 ∩ (r u + K2)| at 0.
    Lemma21 {
        #[arg(long)]
        k1: PathBuf,
        #[arg(long)]
        k2: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Grid cells per axis of the projection.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Curvature at a boundary point from translate (or cap) volumes.
    Curvature {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Use hyperplane caps instead of translates.
        #[arg(long)]
        cap: bool,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// Spread of F over gauge shells.
    Shells {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value = "1")]
        alphas: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// The curvature-function law h_K(u)^{n+1} / kappa(u) over a direction grid.
    Charlaw {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Direction count in 2D, icosphere level in 3D.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Estimate every curvature from volumes.
        #[arg(long)]
        volumic: bool,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// Whether a second gauge L can index F.
    Homothety {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Direction count in 2D, icosphere level in 3D.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        vol: VolumeFlags,
    },
    /// Summary table over several bodies.
    Report {
        #[arg(long, required = true)]
        body: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value = "0.5,1,1.5")]
        alphas: String,
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Also write the CSV table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        vol: VolumeFlags,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Geom(GeomError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Geom(e) if e.is_budget() || matches!(e, GeomError::IllConditionedCrossing { .. }) => 3,
            CliError::Geom(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geom(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Read and validate a body spec file.
pub fn load_body(path: &Path) -> CliResult<Body> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec = BodySpec::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Body::from_spec(&spec)?)
}

/// Parse a comma-separated vector.
pub fn parse_vector(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("not a finite number: {t:?} in {s:?}")))
        })
        .collect()
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("--{name} must be positive, got {v}")))
    }
}

fn vector_for(body: &Body, name: &str, s: &str) -> CliResult<Vec<f64>> {
    let v = parse_vector(s)?;
    if v.len() != body.dim() {
        return Err(CliError::Input(format!(
            "--{name} has {} components, the body has dimension {}",
            v.len(),
            body.dim()
        )));
    }
    Ok(v)
}

fn grid_for(dim: usize, requested: Option<usize>, default_2d: usize, default_3d: usize) -> CliResult<DirectionGrid> {
    let r = requested.unwrap_or(if dim == 2 { default_2d } else { default_3d });
    Ok(DirectionGrid::for_dim(dim, r)?)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn csv_row(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn reject_csv(format: Format, command: &str) -> CliResult<()> {
    if format == Format::Csv {
        return Err(CliError::Input(format!("csv output is not available for `{command}`")));
    }
    Ok(())
}

/// Run one command and return the text of its report.
pub fn dispatch(cfg: &RunConfig) -> CliResult<String> {
    let format = cfg.format.unwrap_or(match cfg.command {
        Command::Report { .. } => Format::Markdown,
        _ => Format::Json,
    });
    if format == Format::Markdown && !matches!(cfg.command, Command::Report { .. }) {
        return Err(CliError::Input("markdown output is only available for `report`".into()));
    }
    match &cfg.command {
        Command::Volume { body, tau, x, vol } => {
            reject_csv(format, "volume")?;
            let b = load_body(body)?;
            let x = vector_for(&b, "x", x)?;
            let p = TranslateProblem::new(b, positive("tau", *tau)?, x)?;
            let e = intersection_volume(&p, &vol.options()?)?;
            Ok(json_text(&json!({
                "command": "volume",
                "tau": p.tau,
                "x": p.x,
                "estimate": e,
                "interval": [e.lo(), e.hi()],
            })))
        }
        Command::Convbody {
            body,
            delta,
            tau,
            grid,
            radius_tol,
            probe,
            emit_svg,
            emit_obj,
            vol,
        } => {
            let b = load_body(body)?;
            let g = grid_for(b.dim(), *grid, 1024, 4)?;
            let prof = convolution_body(&b, *delta, positive("tau", *tau)?, &g, positive("radius-tol", *radius_tol)?, &vol.options()?)?;
            if let Some(path) = emit_svg {
                if b.dim() != 2 {
                    return Err(CliError::Input("--emit-svg needs a planar body".into()));
                }
                write_file(path, &profile_svg(&prof))?;
            }
            if let Some(path) = emit_obj {
                if b.dim() != 3 {
                    return Err(CliError::Input("--emit-obj needs a 3D body".into()));
                }
                write_file(path, &profile_obj(&prof))?;
            }
            if format == Format::Csv {
                let mut s = String::new();
                let head: Vec<String> = if b.dim() == 2 {
                    ["index", "ux", "uy", "radius"].map(String::from).to_vec()
                } else {
                    ["index", "ux", "uy", "uz", "radius"].map(String::from).to_vec()
                };
                s.push_str(&csv_row(&head));
                for (i, (u, r)) in prof.grid.units.iter().zip(&prof.radii).enumerate() {
                    let mut row = vec![i.to_string()];
                    row.extend(u.iter().map(|v| v.to_string()));
                    row.push(r.to_string());
                    s.push_str(&csv_row(&row));
                }
                return Ok(s);
            }
            let mut out = json!({
                "command": "convbody",
                "delta": prof.delta,
                "tau": prof.tau,
                "achieved_tol": prof.achieved_tol,
                "directions": prof.grid.units,
                "radii": prof.radii,
            });
            if *probe {
                let mut probes = serde_json::Map::new();
                probes.insert("homothety".into(), to_value(&homothety_check(&prof, &b, 1e-6)?));
                if b.dim() == 2 && prof.radii.len() >= 512 {
                    let mut f = to_value(&flatness_probe(&prof)?);
                    if let Value::Object(m) = &mut f {
                        m.remove("turning_angles");
                    }
                    probes.insert("flatness".into(), f);
                }
                if b.dim() == 2 && prof.radii.len() >= 2048 {
                    probes.insert("min_curvature".into(), json!(curvature_positivity_probe(&prof)?));
                }
                out["probes"] = Value::Object(probes);
            }
            Ok(json_text(&out))
        }
        Command::Grad { body, tau, x, resolution } => {
            reject_csv(format, "grad")?;
            let b = load_body(body)?;
            let x = vector_for(&b, "x", x)?;
            let res = resolution.unwrap_or(if b.dim() == 2 { 4096 } else { 6 });
            let p = TranslateProblem::new(b, positive("tau", *tau)?, x)?;
            let g = grad_f(&p, res)?;
            Ok(json_text(&json!({"command": "grad", "tau": p.tau, "x": p.x, "resolution": res, "report": g})))
        }
        Command::Hess { body, tau, x, resolution } => {
            reject_csv(format, "hess")?;
            let b = load_body(body)?;
            let x = vector_for(&b, "x", x)?;
            let res = resolution.unwrap_or(if b.dim() == 2 { 4096 } else { 2048 });
            let p = TranslateProblem::new(b, positive("tau", *tau)?, x)?;
            let h = hessian_f(&p, res)?;
            Ok(json_text(&json!({"command": "hess", "tau": p.tau, "x": p.x, "resolution": res, "report": h})))
        }
        Command::Lemma21 { k1, k2, u, resolution } => {
            reject_csv(format, "lemma21")?;
            let b1 = load_body(k1)?;
            let b2 = load_body(k2)?;
            let u = vector_for(&b1, "u", u)?;
            if crate::linalg::norm(&u) == 0.0 {
                return Err(CliError::Input("--u must be nonzero".into()));
            }
            let res = resolution.unwrap_or(if b1.dim() == 2 { 1024 } else { 96 });
            let r = one_sided_derivatives(&b1, &b2, &u, res)?;
            Ok(json_text(&json!({"command": "lemma21", "resolution": res, "report": r})))
        }
        Command::Curvature {
            body,
            x,
            tau,
            cap,
            h0,
            levels,
            vol,
        } => {
            reject_csv(format, "curvature")?;
            let b = load_body(body)?;
            let x = vector_for(&b, "x", x)?;
            let sched = Schedule {
                h0: h0.map(|h| positive("h0", h)).transpose()?,
                levels: *levels,
            };
            let opts = vol.options()?;
            let r = if *cap {
                cap_curvature(&b, &x, &sched, &opts)?
            } else {
                volumic_curvature(&b, &x, positive("tau", *tau)?, &sched, &opts)?
            };
            Ok(json_text(&json!({
                "command": "curvature",
                "report": r,
                "analytic_kappa": b.analytic_curvature(&x),
            })))
        }
        Command::Shells { body, tau, alphas, n, vol } => {
            let b = load_body(body)?;
            let alphas = parse_vector(alphas)?;
            let opts = vol.options()?;
            let reports = alphas
                .iter()
                .map(|&a| shell_spread(&b, positive("tau", *tau)?, a, *n, vol.seed, &opts).map_err(CliError::from))
                .collect::<CliResult<Vec<_>>>()?;
            if format == Format::Csv {
                let mut s = csv_row(&["alpha", "tau", "samples", "f_min", "f_max", "spread", "rel_spread", "degenerate"].map(String::from));
                for r in &reports {
                    s.push_str(&csv_row(&[
                        r.alpha.to_string(),
                        r.tau.to_string(),
                        r.samples.to_string(),
                        r.f_min.to_string(),
                        r.f_max.to_string(),
                        r.spread.to_string(),
                        r.rel_spread.to_string(),
                        r.degenerate.to_string(),
                    ]));
                }
                return Ok(s);
            }
            Ok(json_text(&json!({"command": "shells", "seed": vol.seed, "reports": reports})))
        }
        Command::Charlaw {
            body,
            tau,
            grid,
            volumic,
            h0,
            levels,
            vol,
        } => {
            let b = load_body(body)?;
            let g = DirectionGrid::for_dim(b.dim(), *grid)?;
            let sched = Schedule {
                h0: h0.map(|h| positive("h0", h)).transpose()?,
                levels: *levels,
            };
            let source = if *volumic { CurvatureSource::Volumic } else { CurvatureSource::Oracle };
            let r = curvature_law(&b, positive("tau", *tau)?, &g, &sched, source, &vol.options()?)?;
            if format == Format::Csv {
                let mut s = csv_row(&["index", "direction", "value"].map(String::from));
                for (i, (u, v)) in r.directions.iter().zip(&r.values).enumerate() {
                    let dir: Vec<String> = u.iter().map(|c| c.to_string()).collect();
                    let val = v.map(|v| v.to_string()).unwrap_or_default();
                    s.push_str(&csv_row(&[i.to_string(), dir.join(" "), val]));
                }
                return Ok(s);
            }
            Ok(json_text(&json!({"command": "charlaw", "tau": tau, "report": r})))
        }
        Command::Homothety { k, l, tau, grid, vol } => {
            reject_csv(format, "homothety")?;
            let bk = load_body(k)?;
            let bl = load_body(l)?;
            let g = grid_for(bk.dim(), *grid, 256, 3)?;
            let r = homothety_necessity(&bk, &bl, positive("tau", *tau)?, &g, &vol.options()?)?;
            Ok(json_text(&json!({"command": "homothety", "tau": tau, "report": r})))
        }
        Command::Report {
            body,
            tau,
            alphas,
            n,
            csv,
            vol,
        } => {
            let tau = positive("tau", *tau)?;
            let alphas = parse_vector(alphas)?;
            let opts = vol.options()?;
            let mut rows = Vec::new();
            for path in body {
                let b = load_body(path)?;
                rows.push(report_row(path, &b, tau, &alphas, *n, vol.seed, &opts)?);
            }
            let table = report_csv(&alphas, &rows);
            if let Some(path) = csv {
                write_file(path, &table)?;
            }
            match format {
                Format::Csv => Ok(table),
                Format::Json => Ok(json_text(&json!({"command": "report", "tau": tau, "rows": rows}))),
                Format::Markdown => Ok(report_markdown(tau, &alphas, &rows)),
            }
        }
    }
}

fn report_row(path: &Path, b: &Body, tau: f64, alphas: &[f64], n: usize, seed: u64, opts: &VolumeOptions) -> CliResult<Value> {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let volume = body_volume(b, opts)?.value;
    let spreads = alphas
        .iter()
        .map(|&a| Ok(shell_spread(b, tau, a, n, seed, opts)?.rel_spread))
        .collect::<CliResult<Vec<f64>>>()?;
    let law = if b.is_smooth() {
        let g = DirectionGrid::for_dim(b.dim(), if b.dim() == 2 { 32 } else { 2 })?;
        let r = curvature_law(b, tau, &g, &Schedule::default(), CurvatureSource::Oracle, opts)?;
        json!({"mean": r.mean, "max_rel_dev": r.max_rel_dev, "violated": r.violated})
    } else {
        Value::Null
    };
    Ok(json!({
        "body": name,
        "dim": b.dim(),
        "volume": volume,
        "rel_spread": spreads,
        "curvature_law": law,
    }))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn report_columns(alphas: &[f64]) -> Vec<String> {
    let mut head: Vec<String> = ["body", "dim", "volume"].map(String::from).to_vec();
    head.extend(alphas.iter().map(|a| format!("rel_spread@{a}")));
    head.extend(["law_mean", "law_max_rel_dev", "law_violated"].map(String::from));
    head
}

fn report_cells(row: &Value) -> Vec<String> {
    let mut cells = vec![cell(&row["body"]), cell(&row["dim"]), cell(&row["volume"])];
    if let Value::Array(s) = &row["rel_spread"] {
        cells.extend(s.iter().map(cell));
    }
    let law = &row["curvature_law"];
    cells.extend([cell(&law["mean"]), cell(&law["max_rel_dev"]), cell(&law["violated"])]);
    cells
}

fn report_csv(alphas: &[f64], rows: &[Value]) -> String {
    let mut s = csv_row(&report_columns(alphas));
    for r in rows {
        s.push_str(&csv_row(&report_cells(r)));
    }
    s
}

fn report_markdown(tau: f64, alphas: &[f64], rows: &[Value]) -> String {
    let head = report_columns(alphas);
    let mut s = format!("# Shell and curvature-law summary (tau = {tau})\n\n");
    writeln!(s, "| {} |", head.join(" | ")).unwrap();
    writeln!(s, "|{}|", vec!["---"; head.len()].join("|")).unwrap();
    for r in rows {
        writeln!(s, "| {} |", report_cells(r).join(" | ")).unwrap();
    }
    s.push_str("\nA relative shell spread of zero at every level is what an ellipsoid produces.\n");
    s
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CONVGEOM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("CONVGEOM_THREADS must be a positive integer, got {v:?}"))?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parse arguments, run, write the report and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    match dispatch(&cfg) {
        Ok(text) => match &cfg.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    2
                }
            },
            None => {
                print!("{text}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_parse() {
        assert_eq!(parse_vector("1, -0.5").unwrap(), vec![1.0, -0.5]);
        assert!(parse_vector("1,x").is_err());
        assert!(parse_vector("inf").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Geom(GeomError::Precondition("p".into())).exit_code(), 2);
        assert_eq!(CliError::Geom(GeomError::HTooSmall("h".into())).exit_code(), 3);
    }
}
