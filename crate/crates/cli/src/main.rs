mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use adjzeta::checks::{self, CheckConfig, CheckResult};
use adjzeta::quasibeta::{self, QBExpression, QBParams, QbOptions, Window};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use config::{Overrides, Usage, UsageError};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "adjzeta", version, about = "Verification batteries for the adjoint zeta integral of GL(3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// flat `key = value` file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON report path (stdout if absent)
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// truncation degree in Y
    #[arg(long, global = true)]
    degree: Option<i64>,
    /// primes, comma separated
    #[arg(long, global = true, value_delimiter = ',', value_parser = config::parse_prime)]
    p: Vec<u64>,
    /// Satake triple a,b,c with abc = 1; repeat for several
    #[arg(long, global = true, value_parser = config::parse_satake)]
    satake: Vec<[String; 3]>,
    /// principal series parameters a,b,c
    #[arg(long, global = true, value_parser = config::parse_u)]
    u: Option<[f64; 3]>,
    /// re or re,im
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = |v: &str| config::parse_complex("s", v))]
    s: Option<Complex64>,
    #[arg(long, global = true)]
    quad_level: Option<u32>,
    /// torus_slack,max_depth for the unramified cell search
    #[arg(long, global = true, value_parser = config::parse_bounds)]
    bounds: Option<(i64, i64)>,
    /// CHECK=VALUE, e.g. quasibeta=1e-9 or arch_convergence.gl2=1e-7
    #[arg(long, global = true, value_parser = config::parse_tolerance)]
    tolerance: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// root group commutators, Weyl action, algebra soundness
    Structure,
    Iwasawa,
    Unramified,
    Arch,
    /// battery by default; --mode evaluates one quasi-beta integral
    Quasibeta(QbArgs),
    Orbits,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Direct,
    Continue,
    Poles,
}

#[derive(Args, Debug)]
struct QbArgs {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = |v: &str| config::parse_complex("a1", v))]
    a1: Complex64,
    #[arg(long, default_value_t = 0)]
    a2: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = |v: &str| config::parse_complex("b1", v))]
    b1: Complex64,
    #[arg(long, default_value_t = 0)]
    b2: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = |v: &str| config::parse_complex("c1", v))]
    c1: Complex64,
    #[arg(long, default_value_t = 0)]
    c2: u32,
    /// re0,re1,im0,im1 for --mode poles (default: 4 wide, 2 tall, centred at s)
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            degree: self.degree,
            primes: (!self.p.is_empty()).then(|| self.p.clone()),
            satake: (!self.satake.is_empty()).then(|| self.satake.clone()),
            u: self.u,
            s: self.s,
            quad_level: self.quad_level,
            bounds: self.bounds,
            report: self.report.clone(),
            tolerances: self.tolerance.clone(),
        }
    }
}

fn setup_threads() -> Usage<()> {
    let Ok(v) = std::env::var("ADJZETA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("ADJZETA_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn parse_window(v: &str) -> Usage<Window> {
    let xs = v
        .split(',')
        .map(|x| config::parse_f64("window", x))
        .collect::<Usage<Vec<_>>>()?;
    match xs.as_slice() {
        &[r0, r1, i0, i1] if r0 < r1 && i0 < i1 => Ok(Window { re: [r0, r1], im: [i0, i1] }),
        _ => Err(UsageError(format!("window: expected re0,re1,im0,im1 with re0 < re1, im0 < im1, got {v:?}"))),
    }
}

/// One quasi-beta evaluation, reported in the same shape as a battery check.
fn quasibeta_eval(q: &QbArgs, mode: Mode, cfg: &CheckConfig) -> Usage<CheckResult> {
    let p = QBParams {
        a1: q.a1,
        a2: q.a2,
        b1: q.b1,
        b2: q.b2,
        c1: q.c1,
        c2: q.c2,
    };
    let s = cfg.s;
    let e = QBExpression::square(&p);
    let opts = QbOptions {
        level: 6 + cfg.quad_level,
        ..QbOptions::default()
    };
    let window = match &q.window {
        Some(w) => parse_window(w)?,
        None => Window {
            re: [s.re - 2.0, s.re + 2.0],
            im: [s.im - 1.0, s.im + 1.0],
        },
    };
    let start = Instant::now();
    let (id, anchor, out): (&str, &str, adjzeta::Result<Value>) = match mode {
        Mode::Direct => (
            "quasibeta_direct",
            "quasi-beta integral over the unit square, direct quadrature",
            quasibeta::qb_direct_sum(&e, s, opts.level).map(|a| json!(a)),
        ),
        Mode::Continue => (
            "quasibeta_continue",
            "quasi-beta integral, meromorphic continuation by rewriting",
            quasibeta::qb_continue(&e, s, &opts).map(|a| json!(a)),
        ),
        Mode::Poles => (
            "quasibeta_poles",
            "quasi-beta integral, predicted poles in a window",
            quasibeta::pole_predictions(&e, window, &opts).map(|ps| json!({ "window": window, "poles": ps })),
        ),
    };
    let (pass, result) = match out {
        Ok(v) => (true, v),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Ok(CheckResult {
        id: id.into(),
        anchor: anchor.into(),
        pass,
        witness: json!({ "params": p, "s": s, "level": opts.level, "result": result }),
        seconds: start.elapsed().as_secs_f64(),
        budget_seconds: 120.0,
    })
}

fn run(cli: &Cli) -> Usage<(Report, Option<PathBuf>)> {
    let file = match &cli.common.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let o = file.merge(cli.common.overrides());
    let mut cfg = CheckConfig::default();
    o.apply(&mut cfg)?;
    setup_threads()?;

    let (name, single) = match &cli.command {
        Command::Structure => ("structure", None),
        Command::Iwasawa => ("iwasawa", None),
        Command::Unramified => ("unramified", None),
        Command::Arch => ("arch", None),
        Command::Quasibeta(q) => ("quasibeta", q.mode.map(|m| (q, m))),
        Command::Orbits => ("orbits", None),
        Command::All => ("all", None),
    };
    let checks = match single {
        Some((q, mode)) => vec![quasibeta_eval(q, mode, &cfg)?],
        None => checks::battery(name)
            .expect("every subcommand names a battery")
            .into_iter()
            .map(|id| checks::run_check(id, &cfg).map_err(|e| UsageError(e.to_string())))
            .collect::<Usage<Vec<_>>>()?,
    };
    let report = Report {
        command: name.into(),
        config: cfg,
        checks,
    };
    Ok((report, o.report))
}

fn main() -> ExitCode {
    // clap exits with 2 on malformed flags and unknown subcommands
    let cli = Cli::parse();
    let (report, path) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write(path.as_deref()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    eprint!("{}", report.summary());
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
