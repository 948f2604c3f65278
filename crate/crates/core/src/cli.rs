//! Command-line front end. Every run writes one CSV or JSON artifact whose
//! header records the version, command, parameters and seed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{correlation_mc, recurrence_profile, Observable};
use crate::error::{Error, Result};
use crate::origami::{
    agy_norm, path_norm_bounds, saddle_connections_with_budget, systole, v_delta, Cocycle, NormContext, Origami,
    PathOptions,
};
use crate::sl2::FlowKind;
use crate::specfit::{fit_window, rate_to_eigenvalue, DEFAULT_T_MIN};
use crate::spherical::{
    c_function, casimir_residual, gamma_coeffs, phi, ratner_check, SphericalFunction, SphericalParam,
};
use crate::transforms::{
    laplace_numeric, residue_contour, resolvent, spectral_projection, spectral_radius_via_iterates, ExtendedTransform,
    SpectralAtoms, ToyOperator,
};

pub const SCHEMA_VERSION: u32 = 1;
const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "sl2lab", version, about = "Spherical functions, Laplace continuation and origami geometry")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Tolerance override for the numerical kernels.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads; never affects the output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work budget for saddle-connection enumeration.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spherical functions φ_s(g_t) and their checks.
    #[command(subcommand)]
    Spherical(SphericalCmd),
    /// Coefficients Γ_n(s) of the spherical series.
    Gamma(GammaArgs),
    /// Laplace transforms of atomic spectra and their continuation.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Finite-dimensional model operators.
    #[command(subcommand)]
    Toy(ToyCmd),
    /// Square-tiled surfaces: topology, saddle connections, norms.
    #[command(subcommand)]
    Origami(OrigamiCmd),
    /// Recurrence of the diagonal flow.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Monte Carlo correlations on the modular surface.
    #[command(subcommand)]
    Mc(McCmd),
    /// Decay-rate fitting.
    #[command(subcommand)]
    Fit(FitCmd),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum SphericalCmd {
    /// Σ w_i φ_{s_i}(g_t) over a t grid.
    Eval {
        /// Comma-separated parameters, e.g. `0.8,0.4` or `2i`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Comma-separated weights, one per parameter (default all 1).
        #[arg(long)]
        weights: Option<String>,
        /// `t`, `t1,t2,…` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// φ_s(g_t) − c(s)e^{(s−1)t}.
    Defect {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// e^{(1−δ)t}|φ_{iv}(g_t)|.
    Ratner {
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Residual of the radial Casimir equation.
    Casimir {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Debug, Args, Serialize)]
struct GammaArgs {
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, default_value_t = 50)]
    n: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum TransformCmd {
    /// Numerical Laplace transform of the atom correlation.
    Laplace {
        /// `s:w,s:w,…`
        #[arg(long)]
        atoms: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Meromorphic continuation A_δ + B_δ.
    Extend {
        #[arg(long)]
        atoms: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Contour residue of the continuation at z0.
    Residue {
        #[arg(long)]
        atoms: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Atoms with their poles and predicted residues.
    Atoms {
        #[arg(long)]
        atoms: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum ToyCmd {
    /// Entries of (zI − L)^{-1}.
    Resolvent {
        /// Real matrix, rows separated by `;`, entries by `,`.
        #[arg(long)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Riesz projection onto the spectrum inside a circle.
    Projection {
        #[arg(long)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
    },
    /// min_n ‖L^n‖^{1/n}.
    Specradius {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 200)]
        nmax: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CocycleKind {
    /// The period cocycle Φ(x).
    Tautological,
    /// Tangent of the chosen flow.
    Tangent,
    /// Random closed real cocycle; needs `--seed`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FlowArg {
    Geodesic,
    Horocycle,
    OppHorocycle,
    Rotation,
}

impl From<FlowArg> for FlowKind {
    fn from(f: FlowArg) -> Self {
        match f {
            FlowArg::Geodesic => FlowKind::Geodesic,
            FlowArg::Horocycle => FlowKind::Horocycle,
            FlowArg::OppHorocycle => FlowKind::OppHorocycle,
            FlowArg::Rotation => FlowKind::Rotation,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct OrigamiInput {
    /// File holding one record `n; σ_h cycles; σ_v cycles[; deformation a b c d]`.
    #[arg(long, conflicts_with = "record")]
    file: Option<PathBuf>,
    /// The record itself.
    #[arg(long)]
    record: Option<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrigamiCmd {
    /// Genus, stratum and vertex data.
    Info {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
    },
    /// Saddle connections up to a length bound.
    Saddles {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
        #[arg(long)]
        bound: f64,
    },
    /// Length of the shortest saddle connection and V_δ.
    Systole {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Truncated Finsler norm of a cocycle.
    Norm {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
        #[arg(long, value_enum, default_value = "tautological")]
        cocycle: CocycleKind,
        #[arg(long, value_enum, default_value = "geodesic")]
        flow: FlowArg,
        /// Truncation radius; default max(20, 40·sys).
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Norm and period bounds along a short path exp(tX)·x.
    Path {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
        #[arg(long, value_enum, default_value = "geodesic")]
        flow: FlowArg,
        #[arg(long)]
        duration: f64,
        #[arg(long, value_enum, default_value = "random")]
        cocycle: CocycleKind,
        #[arg(long)]
        bound: Option<f64>,
        /// Fail unless every norm along the path stabilized.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum FlowCmd {
    /// Horocycle averages of V_δ along g_t and the envelope constant.
    Recurrence {
        #[command(flatten)]
        #[serde(flatten)]
        input: OrigamiInput,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum McCmd {
    /// Correlation of a systole bump under g_t on SL(2,R)/SL(2,Z).
    Correlate {
        #[arg(long, default_value_t = 0.8)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum FitCmd {
    /// Exponential-sum fit of a two-column CSV (comment lines start with `#`).
    Rates {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Value column; default the first column after `t`.
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = DEFAULT_T_MIN)]
        tmin: f64,
        #[arg(long)]
        tmax: Option<f64>,
    },
}

/// Column names and rows of one artifact.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Header<'a> {
    version: &'a str,
    schema: u32,
    command: &'a str,
    params: &'a Value,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct JsonArtifact<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    columns: &'a [&'static str],
    rows: &'a [Vec<Value>],
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code: 0 success, 1 usage, 2 numerical or budget failure,
/// 3 invalid input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.common.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(usage(e.to_string())),
        },
        None => execute(&cli),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    if let Some(tol) = c.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(usage("--tol must be positive"));
        }
    }
    let (name, sub_params, table) = dispatch(&cli.command, c)?;
    let mut params = serde_json::Map::new();
    if let Value::Object(m) = sub_params {
        params.extend(m);
    }
    params.insert("format".into(), json!(c.format));
    if let Some(t) = c.tol {
        params.insert("tol".into(), json!(t));
    }
    if let Some(b) = c.budget {
        params.insert("budget".into(), json!(b));
    }
    let params = Value::Object(params);
    let header = Header {
        version: env!("CARGO_PKG_VERSION"),
        schema: SCHEMA_VERSION,
        command: &name,
        params: &params,
        seed: c.seed,
    };
    let text = match c.format {
        Format::Json => {
            let art = JsonArtifact { header, columns: &table.columns, rows: &table.rows };
            let mut s = serde_json::to_string_pretty(&art).map_err(|e| usage(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(&header, &table)?,
    };
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render_csv(header: &Header, table: &Table) -> CliResult<String> {
    let mut s = String::from("# ");
    s.push_str(&serde_json::to_string(header).map_err(|e| usage(e.to_string()))?);
    s.push('\n');
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn params_of<T: Serialize>(v: &T) -> Value {
    let mut value = serde_json::to_value(v).unwrap_or(Value::Null);
    // unit-like enum tags wrap the fields; unwrap to the inner object
    if let Value::Object(m) = &value {
        if m.len() == 1 {
            if let Some(inner @ Value::Object(_)) = m.values().next() {
                value = inner.clone();
            }
        }
    }
    value
}

fn num(x: f64) -> Value {
    json!(x)
}

fn dispatch(cmd: &Command, c: &Common) -> CliResult<(String, Value, Table)> {
    let tol = c.tol.unwrap_or(DEFAULT_TOL);
    Ok(match cmd {
        Command::Spherical(sc) => {
            let (sub, table) = spherical(sc, tol)?;
            (format!("spherical {sub}"), params_of(sc), table)
        }
        Command::Gamma(g) => {
            let s = parse_complex(&g.s)?;
            let series = gamma_coeffs(s, g.n)?;
            let mut t = Table::new(&["n", "re", "im", "abs_root"]);
            for (n, z) in series.coeffs.iter().enumerate() {
                let root = if n == 0 { Value::Null } else { num(z.norm().powf(1.0 / n as f64)) };
                t.push(vec![json!(n), num(z.re), num(z.im), root]);
            }
            ("gamma".into(), params_of(g), t)
        }
        Command::Transform(tc) => {
            let (sub, table) = transform(tc, c.tol)?;
            (format!("transform {sub}"), params_of(tc), table)
        }
        Command::Toy(tc) => {
            let (sub, table) = toy(tc)?;
            (format!("toy {sub}"), params_of(tc), table)
        }
        Command::Origami(oc) => {
            let (sub, table) = origami(oc, c)?;
            (format!("origami {sub}"), params_of(oc), table)
        }
        Command::Flow(FlowCmd::Recurrence { input, delta, t }) => {
            let x = load_origami(input)?;
            let grid = parse_grid(t)?;
            let p = recurrence_profile(&x, *delta, &grid)?;
            let mut table = Table::new(&["t", "average", "abs_error", "nodes", "envelope", "c", "failure"]);
            for (i, t) in p.t.iter().enumerate() {
                let env = num(p.envelope(*t));
                match (&p.averages[i], &p.failures[i]) {
                    (Some(a), _) => table.push(vec![
                        num(*t),
                        num(a.value),
                        num(a.abs_error),
                        json!(a.nodes),
                        env,
                        num(p.c1),
                        Value::Null,
                    ]),
                    (None, f) => table.push(vec![
                        num(*t),
                        Value::Null,
                        Value::Null,
                        Value::Null,
                        env,
                        num(p.c1),
                        json!(f.clone().unwrap_or_default()),
                    ]),
                }
            }
            let params = params_of(&cmd_flow_params(input, *delta, t));
            ("flow recurrence".into(), params, table)
        }
        Command::Mc(McCmd::Correlate { lo, hi, t, n }) => {
            let seed = c.seed.ok_or_else(|| usage("mc correlate needs --seed"))?;
            let obs = Observable::bump(*lo, *hi)?;
            let grid = parse_grid(t)?;
            let s = correlation_mc(&obs, &grid, *n, seed)?;
            let mut table = Table::new(&["t", "estimate", "std_error"]);
            for i in 0..s.t.len() {
                table.push(vec![num(s.t[i]), num(s.estimates[i]), num(s.std_errors[i])]);
            }
            let params = json!({ "lo": lo, "hi": hi, "t": t, "n": n });
            ("mc correlate".into(), params, table)
        }
        Command::Fit(FitCmd::Rates { input, k, column, tmin, tmax }) => {
            let (t, y) = read_series(input, column.as_deref())?;
            let fit = fit_window(&t, &y, *k, *tmin, tmax.unwrap_or(f64::INFINITY))?;
            let mut table = Table::new(&["rate", "coefficient", "eigenvalue", "residual"]);
            for (a, coef) in &fit.pairs {
                let lambda = rate_to_eigenvalue(*a).map(num).unwrap_or(Value::Null);
                table.push(vec![num(*a), num(*coef), lambda, num(fit.residual)]);
            }
            let params = json!({
                "in": input.display().to_string(),
                "k": k,
                "column": column,
                "tmin": tmin,
                "tmax": tmax,
            });
            ("fit rates".into(), params, table)
        }
    })
}

fn cmd_flow_params<'a>(input: &'a OrigamiInput, delta: f64, t: &'a str) -> Value {
    json!({ "file": input.file, "record": input.record, "delta": delta, "t": t })
}

fn spherical(sc: &SphericalCmd, tol: f64) -> CliResult<(&'static str, Table)> {
    Ok(match sc {
        SphericalCmd::Eval { s, weights, t } => {
            let params: Vec<SphericalParam> = split_list(s).iter().map(|p| parse_param(p)).collect::<CliResult<_>>()?;
            let w: Vec<f64> = match weights {
                Some(w) => split_list(w).iter().map(|x| parse_f64(x)).collect::<CliResult<_>>()?,
                None => vec![1.0; params.len()],
            };
            if w.len() != params.len() {
                return Err(usage("--weights must match --s in length"));
            }
            let mut table = Table::new(&["t", "re", "im"]);
            for t in parse_grid(t)? {
                let mut acc = Complex64::new(0.0, 0.0);
                for (p, w) in params.iter().zip(&w) {
                    acc += *w * phi(p, t, tol)?;
                }
                table.push(vec![num(t), num(acc.re), num(acc.im)]);
            }
            ("eval", table)
        }
        SphericalCmd::Defect { s, t } => {
            let f = SphericalFunction::new(parse_param(s)?)?;
            let mut table = Table::new(&["t", "re", "im"]);
            for t in parse_grid(t)? {
                let d = f.defect(t)?;
                table.push(vec![num(t), num(d.re), num(d.im)]);
            }
            ("defect", table)
        }
        SphericalCmd::Ratner { v, delta, t } => {
            let mut table = Table::new(&["t", "envelope"]);
            for t in parse_grid(t)? {
                table.push(vec![num(t), num(ratner_check(*v, *delta, &[t])?)]);
            }
            ("ratner", table)
        }
        SphericalCmd::Casimir { s, t } => {
            let p = parse_param(s)?;
            let mut table = Table::new(&["t", "residual"]);
            for t in parse_grid(t)? {
                table.push(vec![num(t), num(casimir_residual(&p, t)?)]);
            }
            ("casimir", table)
        }
    })
}

fn transform(tc: &TransformCmd, tol: Option<f64>) -> CliResult<(&'static str, Table)> {
    Ok(match tc {
        TransformCmd::Laplace { atoms, z } => {
            let corr = parse_atoms(atoms)?.correlation()?;
            let mut table = Table::new(&["z_re", "z_im", "re", "im", "abs_error"]);
            for z in split_list(z) {
                let z = parse_complex(&z)?;
                let v = laplace_numeric(&corr, z, tol.unwrap_or(1e-10))?;
                table.push(vec![num(z.re), num(z.im), num(v.value.re), num(v.value.im), num(v.abs_error)]);
            }
            ("laplace", table)
        }
        TransformCmd::Extend { atoms, delta, z } => {
            let f = ExtendedTransform::new(parse_atoms(atoms)?, *delta)?;
            let mut table = Table::new(&["z_re", "z_im", "re", "im"]);
            for z in split_list(z) {
                let z = parse_complex(&z)?;
                let v = f.eval(z)?;
                table.push(vec![num(z.re), num(z.im), num(v.re), num(v.im)]);
            }
            ("extend", table)
        }
        TransformCmd::Residue { atoms, delta, z0, radius, nodes } => {
            let f = ExtendedTransform::new(parse_atoms(atoms)?, *delta)?;
            let z0 = parse_complex(z0)?;
            let r = residue_contour(|z| f.eval(z), z0, *radius, *nodes, tol.unwrap_or(1e-10))?;
            let mut table = Table::new(&["re", "im", "abs_error", "nodes"]);
            table.push(vec![num(r.value.re), num(r.value.im), num(r.abs_error), json!(r.nodes)]);
            ("residue", table)
        }
        TransformCmd::Atoms { atoms, delta } => {
            let a = parse_atoms(atoms)?;
            let f = ExtendedTransform::new(a.clone(), *delta)?;
            let poles = f.poles();
            let mut table = Table::new(&["s", "weight", "c_s", "pole", "residue"]);
            for &(s, w) in a.atoms() {
                let cs = c_function(Complex64::new(s, 0.0))?.re;
                let pole = poles.iter().find(|p| (**p - (s - 1.0)).abs() == 0.0).copied();
                let (pole, res) = match pole {
                    Some(p) => (num(p), num(cs * w)),
                    None => (Value::Null, Value::Null),
                };
                table.push(vec![num(s), num(w), num(cs), pole, res]);
            }
            ("atoms", table)
        }
    })
}

fn toy(tc: &ToyCmd) -> CliResult<(&'static str, Table)> {
    let entries = |m: &DMatrix<Complex64>, table: &mut Table, lead: &[Value]| {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let mut row = lead.to_vec();
                row.extend([json!(i), json!(j), num(m[(i, j)].re), num(m[(i, j)].im)]);
                table.push(row);
            }
        }
    };
    Ok(match tc {
        ToyCmd::Resolvent { matrix, z } => {
            let l = parse_matrix(matrix)?;
            let mut table = Table::new(&["z_re", "z_im", "i", "j", "re", "im"]);
            for z in split_list(z) {
                let z = parse_complex(&z)?;
                let r = resolvent(&l, z)?;
                entries(&r, &mut table, &[num(z.re), num(z.im)]);
            }
            ("resolvent", table)
        }
        ToyCmd::Projection { matrix, lambda, radius } => {
            let l = parse_matrix(matrix)?;
            let p = spectral_projection(&l, parse_complex(lambda)?, *radius)?;
            let mut table = Table::new(&["i", "j", "re", "im"]);
            entries(p.matrix(), &mut table, &[]);
            ("projection", table)
        }
        ToyCmd::Specradius { matrix, nmax } => {
            let l = parse_matrix(matrix)?;
            let est = spectral_radius_via_iterates(&l, *nmax)?;
            let exact = l.eigenvalues()?.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut table = Table::new(&["estimate", "max_abs_eigenvalue"]);
            table.push(vec![num(est), num(exact)]);
            ("specradius", table)
        }
    })
}

fn budget_of(c: &Common) -> u64 {
    c.budget.unwrap_or(crate::origami::DEFAULT_BUDGET)
}

fn cocycle_for(kind: CocycleKind, flow: FlowArg, x: &Origami, seed: Option<u64>) -> CliResult<Cocycle> {
    Ok(match kind {
        CocycleKind::Tautological => Cocycle::tautological(x),
        CocycleKind::Tangent => Cocycle::tangent(x, &FlowKind::from(flow).lie_generator()),
        CocycleKind::Random => {
            let seed = seed.ok_or_else(|| usage("a random cocycle needs --seed"))?;
            Cocycle::random_closed(x, &mut ChaCha8Rng::seed_from_u64(seed), 0.0)
        }
    })
}

fn default_bound(x: &Origami) -> Result<f64> {
    Ok((40.0 * systole(x)?).max(crate::origami::DEFAULT_NORM_FLOOR))
}

fn origami(oc: &OrigamiCmd, c: &Common) -> CliResult<(&'static str, Table)> {
    Ok(match oc {
        OrigamiCmd::Info { input } => {
            let x = load_origami(input)?;
            let kappa: Vec<String> = x.stratum().iter().map(|k| k.to_string()).collect();
            let mut table =
                Table::new(&["n_squares", "genus", "kappa", "vertex_classes", "relative_cohomology_dim", "record"]);
            table.push(vec![
                json!(x.n_squares()),
                json!(x.genus()),
                json!(format!("({})", kappa.join(" "))),
                json!(x.vertex_classes().len()),
                json!(x.relative_cohomology_dim()),
                json!(x.to_record()),
            ]);
            ("info", table)
        }
        OrigamiCmd::Saddles { input, bound } => {
            let x = load_origami(input)?;
            let list = saddle_connections_with_budget(&x, *bound, budget_of(c))?;
            let mut table = Table::new(&["p", "q", "length", "start_class", "end_class", "start_square", "steps"]);
            for g in list {
                table.push(vec![
                    json!(g.holonomy.0),
                    json!(g.holonomy.1),
                    num(g.length),
                    json!(g.start_class),
                    json!(g.end_class),
                    json!(g.start_square + 1),
                    json!(g.steps),
                ]);
            }
            ("saddles", table)
        }
        OrigamiCmd::Systole { input, delta } => {
            let x = load_origami(input)?;
            let mut table = Table::new(&["systole", "v_delta"]);
            table.push(vec![num(systole(&x)?), num(v_delta(&x, *delta)?)]);
            ("systole", table)
        }
        OrigamiCmd::Norm { input, cocycle, flow, bound } => {
            let x = load_origami(input)?;
            let v = cocycle_for(*cocycle, *flow, &x, c.seed)?;
            let bound = match bound {
                Some(b) => *b,
                None => default_bound(&x)?,
            };
            let n = agy_norm(&x, &v, bound)?;
            let mut table = Table::new(&["value", "stabilized", "bound", "connections", "argmax_p", "argmax_q"]);
            let (ap, aq) = match n.argmax {
                Some((p, q)) => (json!(p), json!(q)),
                None => (Value::Null, Value::Null),
            };
            table.push(vec![num(n.value), json!(n.stabilized), num(n.bound), json!(n.connections), ap, aq]);
            ("norm", table)
        }
        OrigamiCmd::Path { input, flow, duration, cocycle, bound, strict } => {
            let x = load_origami(input)?;
            let v = cocycle_for(*cocycle, *flow, &x, c.seed)?;
            let bound = match bound {
                Some(b) => *b,
                None => default_bound(&x)?,
            };
            // reuse the enumeration budget check before the path run
            NormContext::new(&x, bound)?;
            let dir = FlowKind::from(*flow).lie_generator();
            let r = path_norm_bounds(&x, dir, *duration, &v, bound, PathOptions { require_stabilized: *strict })?;
            let mut table = Table::new(&[
                "duration",
                "length",
                "length_error",
                "norm_start",
                "norm_end",
                "max_log_period_ratio",
                "connection_violations",
                "norm_ratio_ok",
                "stabilized",
                "connections",
                "systole_start",
                "systole_end",
            ]);
            table.push(vec![
                num(r.duration),
                num(r.length),
                num(r.length_error),
                num(r.norm_start),
                num(r.norm_end),
                num(r.max_log_period_ratio),
                json!(r.connection_violations),
                json!(r.norm_ratio_ok),
                json!(r.stabilized),
                json!(r.connections),
                num(r.systole_start),
                num(r.systole_end),
            ]);
            ("path", table)
        }
    })
}

fn load_origami(input: &OrigamiInput) -> CliResult<Origami> {
    let text = match (&input.file, &input.record) {
        (Some(path), None) => read_record(path)?,
        (None, Some(r)) => r.clone(),
        _ => return Err(usage("give exactly one of --file or --record")),
    };
    Ok(text.parse::<Origami>()?)
}

fn read_record(path: &Path) -> CliResult<String> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    Ok(lines.join(" "))
}

/// Reads `t` and one value column from a CSV with a header row; lines
/// starting with `#` are skipped.
fn read_series(path: &Path, column: Option<&str>) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<&str> =
        lines.next().ok_or_else(|| Error::invalid("empty series file"))?.split(',').map(str::trim).collect();
    let t_col = header.iter().position(|h| *h == "t").ok_or_else(|| Error::invalid("series file has no `t` column"))?;
    let v_col = match column {
        Some(name) => header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::invalid(format!("series file has no `{name}` column")))?,
        None => (0..header.len()).find(|&i| i != t_col).ok_or_else(|| Error::invalid("series file has one column"))?,
    };
    let (mut t, mut y) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |i: usize| -> Result<f64> {
            cells
                .get(i)
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("row {}: bad number in column {i}", k + 1)))
        };
        t.push(get(t_col)?);
        y.push(get(v_col)?);
    }
    Ok((t, y))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn parse_f64(s: &str) -> CliResult<f64> {
    s.trim().parse::<f64>().map_err(|_| usage(format!("`{s}` is not a number")))
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`.
fn parse_complex(s: &str) -> CliResult<Complex64> {
    let s = s.trim().replace(' ', "");
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_f64(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> CliResult<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_f64(t),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(parse_f64(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn parse_param(s: &str) -> CliResult<SphericalParam> {
    Ok(SphericalParam::from_complex(parse_complex(s)?)?)
}

/// `x`, `x1,x2,…` or `start:stop:step` (inclusive).
fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, h] => {
            let (a, b, h) = (parse_f64(a)?, parse_f64(b)?, parse_f64(h)?);
            if !(h > 0.0) || b < a {
                return Err(usage(format!("bad grid `{s}`")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * h).collect())
        }
        [_] => split_list(s).iter().map(|x| parse_f64(x)).collect(),
        _ => Err(usage(format!("bad grid `{s}`"))),
    }
}

fn parse_atoms(s: &str) -> CliResult<SpectralAtoms> {
    let mut atoms = Vec::new();
    for item in split_list(s) {
        let (a, w) = item.split_once(':').ok_or_else(|| usage(format!("atom `{item}` is not s:w")))?;
        atoms.push((parse_f64(a)?, parse_f64(w)?));
    }
    Ok(SpectralAtoms::new(atoms)?)
}

fn parse_matrix(s: &str) -> CliResult<ToyOperator> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|r| split_list(r).iter().map(|x| parse_f64(x)).collect::<CliResult<Vec<f64>>>())
        .collect::<CliResult<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("matrix must be square").into());
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(ToyOperator::from_real(&m)?)
}
