//! Command-line front end. [`run`] parses arguments, dispatches to the
//! subcommands and maps errors to exit codes: 0 success, 1 domain or
//! numerical error, 2 usage or parse error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_trajectory, sweep_a, AnalysisThresholds};
use crate::error::{Error, Result};
use crate::geometry::{folded_singularities, h_graph, m2s_point, theta};
use crate::model::{Params, State};
use crate::regimes::{a_mp, classify_regions, d_mp, RegimeReport};
use crate::simulate::{integrate, EventKind, IntegratorConfig, Method, Sample, Trajectory};
use crate::slowfast::{fibre_zeta, solve_exit_point};

/// Environment variable overriding the number of worker threads.
pub const THREADS_ENV: &str = "ENSO_GSPT_THREADS";

/// Effective configuration of one invocation. Every field may come from a
/// JSON file; command-line flags take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub c: Option<f64>,
    pub k: Option<f64>,
    pub a: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub integrator: IntegratorConfig,
    pub thresholds: AnalysisThresholds,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

const KNOWN_KEYS: &[&str] = &["subcommand", "c", "k", "a", "delta", "rho", "integrator", "thresholds", "out", "threads"];

/// Read a JSON configuration file. An empty file gives the defaults.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    if text.trim().is_empty() {
        return Ok(RunConfig::default());
    }
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("config at line {}, column {}: {e}", e.line(), e.column())))?;
    let mut warnings = Vec::new();
    if let Some(obj) = value.as_object() {
        for key in obj.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                warnings.push(format!("unknown config key '{key}' ignored"));
            }
        }
    }
    let mut cfg: RunConfig =
        serde_json::from_value(value).map_err(|e| Error::Parse(format!("config: {e}")))?;
    cfg.warnings = warnings;
    Ok(cfg)
}

#[derive(Parser, Debug)]
#[command(name = "enso-gspt", version, about = "Three-timescale ENSO model: geometry, regimes, simulation, classification")]
struct Cli {
    /// JSON configuration file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid and sweep jobs (ENSO_GSPT_THREADS overrides)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CkArgs {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct IntegratorArgs {
    /// Final fast time
    #[arg(long)]
    t_end: Option<f64>,
    /// Initial condition as x,y,z
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    /// implicit or explicit
    #[arg(long)]
    method: Option<String>,
    /// Keep every n-th sample in the output
    #[arg(long)]
    stride: Option<usize>,
    /// Raise t_end to this many multiples of 1/(delta rho a)
    #[arg(long)]
    slow_cycles: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical-manifold mesh, fold lines, M_2S curve and folded singularities as CSV
    Geometry {
        #[command(flatten)]
        ck: CkArgs,
        /// x grid lo:hi:n
        #[arg(long, default_value = "-3:0:31", allow_hyphen_values = true)]
        x_range: String,
        /// z grid lo:hi:n
        #[arg(long, default_value = "-2:3:51", allow_hyphen_values = true)]
        z_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regime report for one (c,k) as JSON
    ClassifyRegime {
        #[command(flatten)]
        ck: CkArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regime map over a (c,k) grid; cells are sampled at their centres
    RegimeMap {
        /// c cells lo:hi:n
        #[arg(long, default_value = "1:2:100")]
        c_range: String,
        /// k cells lo:hi:n
        #[arg(long, default_value = "0:1:100")]
        k_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Onset thresholds a-, a+, a_p and denominators d-, d+ as JSON
    Thresholds {
        #[command(flatten)]
        ck: CkArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the full system; writes t,x,y,z and an events sidecar
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        integ: IntegratorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a trajectory CSV; parameters come from its config sidecar or flags
    ClassifyTrajectory {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Leading fraction of the samples treated as transient
        #[arg(long)]
        transient_fraction: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate and classify over a grid of a
    SweepA {
        #[command(flatten)]
        ck: CkArgs,
        /// a grid lo:hi:n (inclusive)
        #[arg(long)]
        a_grid: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[command(flatten)]
        integ: IntegratorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delayed exit height from the plane as JSON
    Wayout {
        #[command(flatten)]
        ck: CkArgs,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y_in: f64,
        #[arg(long, allow_hyphen_values = true)]
        z_in: f64,
    },
    /// Intermediate fibre z = zeta(x) through (x0, z0) as CSV
    Fibre {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        z0: f64,
        /// x grid lo:hi:n
        #[arg(long, default_value = "-3:0:301", allow_hyphen_values = true)]
        x_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Format with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Parse `lo:hi:n`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Usage(format!("expected lo:hi:n, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cell_centres(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Usage(format!("missing --{name} (flag or config)")))
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}

/// `<out>.config.json`
pub fn config_sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(Error::from)
        }
    }
}

fn echo_config(cfg: &RunConfig) -> Result<()> {
    if let Some(out) = &cfg.out {
        let path = config_sidecar(out);
        let text = serde_json::to_string_pretty(cfg).map_err(|e| Error::Io(e.to_string()))? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn merge_model(cfg: &mut RunConfig, m: &ModelArgs) {
    cfg.c = m.c.or(cfg.c);
    cfg.k = m.k.or(cfg.k);
    cfg.a = m.a.or(cfg.a);
    cfg.delta = m.delta.or(cfg.delta);
    cfg.rho = m.rho.or(cfg.rho);
}

fn merge_ck(cfg: &mut RunConfig, m: &CkArgs) {
    cfg.c = m.c.or(cfg.c);
    cfg.k = m.k.or(cfg.k);
}

fn merge_integrator(cfg: &mut RunConfig, a: &IntegratorArgs) -> Result<()> {
    let ic = &mut cfg.integrator;
    if let Some(v) = a.t_end {
        ic.t_end = v;
    }
    if let Some(s) = &a.ic {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Usage(format!("--ic expects x,y,z, got '{s}'")))?;
        if v.len() != 3 {
            return Err(Error::Usage(format!("--ic expects x,y,z, got '{s}'")));
        }
        ic.initial_state = State::new(v[0], v[1], v[2]);
    }
    if let Some(v) = a.rtol {
        ic.rel_tol = v;
    }
    if let Some(v) = a.atol {
        ic.abs_tol = v;
    }
    if let Some(v) = a.max_step {
        ic.max_step = v;
    }
    if let Some(m) = &a.method {
        ic.method = match m.as_str() {
            "implicit" | "implicit_adaptive" => Method::ImplicitAdaptive,
            "explicit" | "explicit_adaptive" => Method::ExplicitAdaptive,
            _ => return Err(Error::Usage(format!("unknown method '{m}'"))),
        };
    }
    if let Some(v) = a.stride {
        ic.sample_stride = v;
    }
    if let Some(v) = a.slow_cycles {
        ic.slow_cycles = Some(v);
    }
    Ok(())
}

fn params(cfg: &RunConfig) -> Result<Params> {
    Params::new(
        need(cfg.c, "c")?,
        need(cfg.k, "k")?,
        need(cfg.a, "a")?,
        cfg.delta.unwrap_or(0.01),
        cfg.rho.unwrap_or(0.01),
    )
}

fn thread_count(cfg: &RunConfig) -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).or(cfg.threads).filter(|&n| n > 0)
}

fn in_pool<T: Send>(cfg: &RunConfig, job: impl FnOnce() -> T + Send) -> Result<T> {
    match thread_count(cfg) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

/// Run the CLI on `argv` (including the program name) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("enso-gspt: {e}");
            match e {
                Error::Usage(_) | Error::Parse(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    for w in &cfg.warnings {
        eprintln!("enso-gspt: warning: {w}");
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    match cli.command {
        Command::Geometry { ck, x_range, z_range, out } => {
            merge_ck(&mut cfg, &ck);
            cfg.subcommand = Some("geometry".into());
            cfg.out = out.or(cfg.out.take());
            let text = geometry_csv(need(cfg.c, "c")?, need(cfg.k, "k")?, parse_range(&x_range)?, parse_range(&z_range)?)?;
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
        Command::ClassifyRegime { ck, out } => {
            merge_ck(&mut cfg, &ck);
            cfg.subcommand = Some("classify-regime".into());
            cfg.out = out.or(cfg.out.take());
            let r = classify_regions(need(cfg.c, "c")?, need(cfg.k, "k")?)?;
            let text = serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))? + "\n";
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
        Command::RegimeMap { c_range, k_range, out } => {
            cfg.subcommand = Some("regime-map".into());
            cfg.out = out.or(cfg.out.take());
            let (c0, c1, nc) = parse_range(&c_range)?;
            let (k0, k1, nk) = parse_range(&k_range)?;
            let text = in_pool(&cfg, || regime_map_csv(&cell_centres(c0, c1, nc), &cell_centres(k0, k1, nk)))?;
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
        Command::Thresholds { ck, out } => {
            merge_ck(&mut cfg, &ck);
            cfg.subcommand = Some("thresholds".into());
            cfg.out = out.or(cfg.out.take());
            let (c, k) = (need(cfg.c, "c")?, need(cfg.k, "k")?);
            let (am, ap) = a_mp(c, k)?;
            let (dm, dp) = d_mp(c, k)?;
            let r = classify_regions(c, k)?;
            let v = serde_json::json!({
                "c": c, "k": k, "a_minus": am, "a_plus": ap, "a_p": r.a_p,
                "d_minus": dm, "d_plus": dp, "V_label": r.v_label,
            });
            let text = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))? + "\n";
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
        Command::Simulate { model, integ, out } => {
            merge_model(&mut cfg, &model);
            merge_integrator(&mut cfg, &integ)?;
            cfg.subcommand = Some("simulate".into());
            cfg.out = Some(out.or(cfg.out.take()).unwrap_or_else(|| PathBuf::from("traj.csv")));
            let p = params(&cfg)?;
            for w in p.warnings() {
                eprintln!("enso-gspt: warning: {w:?}");
            }
            let tr = integrate(&p, &cfg.integrator)?;
            let out = cfg.out.clone().expect("set above");
            std::fs::write(&out, trajectory_csv(&tr.samples))?;
            std::fs::write(sidecar(&out, "events.csv"), events_csv(&tr))?;
            echo_config(&cfg)
        }
        Command::ClassifyTrajectory { input, model, transient_fraction, out } => {
            let side = config_sidecar(&input);
            if side.exists() {
                let prev = load_config(&side)?;
                cfg.c = cfg.c.or(prev.c);
                cfg.k = cfg.k.or(prev.k);
                cfg.a = cfg.a.or(prev.a);
                cfg.delta = cfg.delta.or(prev.delta);
                cfg.rho = cfg.rho.or(prev.rho);
            }
            merge_model(&mut cfg, &model);
            cfg.subcommand = Some("classify-trajectory".into());
            cfg.out = out.or(cfg.out.take());
            if let Some(f) = transient_fraction {
                cfg.integrator.transient_fraction = f;
            }
            let p = params(&cfg)?;
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let samples = read_trajectory_csv(&text)?;
            let tr = trajectory_from_samples(p, samples, cfg.integrator.transient_fraction)?;
            let class = classify_trajectory(&tr, &cfg.thresholds)?;
            let text = serde_json::to_string_pretty(&class).map_err(|e| Error::Io(e.to_string()))? + "\n";
            write_text(cfg.out.as_deref(), &text)?;
            if cfg.out.is_some() {
                echo_config(&cfg)?;
            }
            Ok(())
        }
        Command::SweepA { ck, a_grid, delta, rho, integ, out } => {
            merge_ck(&mut cfg, &ck);
            cfg.delta = delta.or(cfg.delta);
            cfg.rho = rho.or(cfg.rho);
            merge_integrator(&mut cfg, &integ)?;
            cfg.subcommand = Some("sweep-a".into());
            cfg.out = out.or(cfg.out.take());
            let (lo, hi, n) = parse_range(&a_grid)?;
            let grid = linspace(lo, hi, n);
            let (c, k) = (need(cfg.c, "c")?, need(cfg.k, "k")?);
            let (d, r) = (cfg.delta.unwrap_or(0.01), cfg.rho.unwrap_or(0.01));
            let entries = in_pool(&cfg, || sweep_a(c, k, d, r, &grid, &cfg.integrator, &cfg.thresholds))?;
            let mut text = String::from("a,pattern,plateaus,sao_location,signature,x_min,x_max,period\n");
            for e in &entries {
                match &e.result {
                    Ok(cl) => {
                        let _ = writeln!(
                            text,
                            "{},{},{},{},{},{},{},{}",
                            fmt_num(e.a),
                            cl.pattern.as_str(),
                            cl.has_plateaus,
                            cl.sao_location.as_str(),
                            cl.signature_string(),
                            fmt_num(cl.x_range.0),
                            fmt_num(cl.x_range.1),
                            fmt_opt(cl.period_estimate)
                        );
                    }
                    Err(msg) => {
                        let _ = writeln!(text, "{},error,,,\"{}\",,,", fmt_num(e.a), msg.replace('"', "'"));
                    }
                }
            }
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
        Command::Wayout { ck, a, rho, y_in, z_in } => {
            merge_ck(&mut cfg, &ck);
            cfg.a = a.or(cfg.a);
            cfg.rho = rho.or(cfg.rho);
            let (c, k, a) = (need(cfg.c, "c")?, need(cfg.k, "k")?, need(cfg.a, "a")?);
            if !(c > 1.0) {
                return Err(Error::Domain(format!("c must exceed 1, got {c}")));
            }
            let e = solve_exit_point(c, k, a, cfg.rho.unwrap_or(0.01), y_in, z_in)?;
            let v = serde_json::json!({ "z_out": e.z_out, "w_residual": e.w_residual });
            println!("{}", serde_json::to_string(&v).map_err(|e| Error::Io(e.to_string()))?);
            Ok(())
        }
        Command::Fibre { c, x0, z0, x_range, out } => {
            cfg.c = c.or(cfg.c);
            cfg.subcommand = Some("fibre".into());
            cfg.out = out.or(cfg.out.take());
            let c = need(cfg.c, "c")?;
            if !(c > 1.0) {
                return Err(Error::Domain(format!("c must exceed 1, got {c}")));
            }
            let (lo, hi, n) = parse_range(&x_range)?;
            let mut text = String::from("x,z\n");
            for x in linspace(lo, hi, n) {
                if let Ok(z) = fibre_zeta(c, x, x0, z0) {
                    let _ = writeln!(text, "{},{}", fmt_num(x), fmt_num(z));
                }
            }
            write_text(cfg.out.as_deref(), &text)?;
            echo_config(&cfg)
        }
    }
}

/// `set,x,y,z` rows for the surface, fold lines, `M_2S` and `q-`, `q+`.
pub fn geometry_csv(c: f64, k: f64, xr: (f64, f64, usize), zr: (f64, f64, usize)) -> Result<String> {
    let th = theta(c)?;
    let fs = folded_singularities(c, k)?;
    let xs = linspace(xr.0, xr.1, xr.2);
    let zs = linspace(zr.0, zr.1, zr.2);
    let mut s = String::from("set,x,y,z\n");
    let mut row = |set: &str, p: State| {
        let _ = writeln!(s, "{set},{},{},{}", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z));
    };
    for &x in &xs {
        for &z in &zs {
            row("M_S", State::new(x, h_graph(c, x, z), z));
        }
    }
    for &x in &xs {
        let z = -x - th;
        row("L_minus", State::new(x, h_graph(c, x, z), z));
    }
    for &x in &xs {
        let z = -x + th;
        row("L_plus", State::new(x, h_graph(c, x, z), z));
    }
    for &x in &xs {
        row("M_2S", m2s_point(c, k, x));
    }
    row("q_minus", fs.q_minus);
    row("q_plus", fs.q_plus);
    Ok(s)
}

fn regime_row(r: &RegimeReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_num(r.c),
        fmt_num(r.k),
        fmt_num(r.a_qminus),
        fmt_opt(r.a_qstar),
        fmt_num(r.d_minus),
        fmt_num(r.d_plus),
        r.d_label,
        r.a_label,
        r.v_label,
        r.curve_c_side,
        fmt_opt(r.a_minus),
        fmt_opt(r.a_plus),
        fmt_opt(r.a_p)
    )
}

/// Regime reports over the grid in row-major order (`c` outer), in parallel.
pub fn regime_map(cs: &[f64], ks: &[f64]) -> Vec<Result<RegimeReport>> {
    let cells: Vec<(f64, f64)> = cs.iter().flat_map(|&c| ks.iter().map(move |&k| (c, k))).collect();
    cells.par_iter().map(|&(c, k)| classify_regions(c, k)).collect()
}

pub fn regime_map_csv(cs: &[f64], ks: &[f64]) -> String {
    let mut s = String::from("c,k,A_qminus,A_qstar,d_minus,d_plus,D,A,V,curve_side,a_minus,a_plus,a_p\n");
    let cells: Vec<(f64, f64)> = cs.iter().flat_map(|&c| ks.iter().map(move |&k| (c, k))).collect();
    let rows: Vec<String> = cells
        .par_iter()
        .map(|&(c, k)| match classify_regions(c, k) {
            Ok(r) => regime_row(&r),
            Err(_) => format!("{},{},,,,,degenerate,degenerate,unclassified,,,,", fmt_num(c), fmt_num(k)),
        })
        .collect();
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

pub fn trajectory_csv(samples: &[Sample]) -> String {
    let mut s = String::with_capacity(samples.len() * 96 + 16);
    s.push_str("t,x,y,z\n");
    for p in samples {
        let _ = writeln!(s, "{},{},{},{}", fmt_num(p.t), fmt_num(p.x), fmt_num(p.y), fmt_num(p.z));
    }
    s
}

pub fn events_csv(tr: &Trajectory) -> String {
    let mut s = String::from("t,kind,x,y,z\n");
    for e in &tr.events {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_num(e.t),
            e.kind.as_str(),
            fmt_num(e.state.x),
            fmt_num(e.state.y),
            fmt_num(e.state.z)
        );
    }
    s
}

pub fn read_trajectory_csv(text: &str) -> Result<Vec<Sample>> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("t,x,y,z") => {}
        other => return Err(Error::Parse(format!("expected header t,x,y,z, got {other:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", i + 2)));
        }
        out.push(Sample { t: v[0], x: v[1], y: v[2], z: v[3] });
    }
    Ok(out)
}

pub fn read_events_csv(text: &str) -> Result<Vec<(f64, EventKind)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            continue;
        }
        let t: f64 = parts[0].parse().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        let k = EventKind::parse(parts[1]).ok_or_else(|| Error::Parse(format!("line {}: unknown event kind", i + 1)))?;
        out.push((t, k));
    }
    Ok(out)
}

/// Wrap loaded samples as a trajectory whose leading `transient_fraction`
/// of the time span is treated as transient.
pub fn trajectory_from_samples(p: Params, samples: Vec<Sample>, transient_fraction: f64) -> Result<Trajectory> {
    if samples.len() < 3 {
        return Err(Error::Parse("trajectory needs at least three samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::Parse("sample times must be strictly increasing".into()));
    }
    let (t0, t1) = (samples[0].t, samples[samples.len() - 1].t);
    let mut tr = Trajectory {
        params: p,
        samples,
        events: Vec::new(),
        transient_end: t0 + transient_fraction * (t1 - t0),
        stats: Default::default(),
    };
    tr.events = crate::simulate::detect_events(&tr, p.c(), p.k());
    Ok(tr)
}
