use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lsl::catalog::lookup;
use lsl::engine::{Side, DEFAULT_HORIZON};
use lsl::experiment::{compare_with_oracle, run_sweep, sweep_to_csv, sweep_to_json, ExperimentError, Scale, SweepConfig};
use lsl::numerics::{Real, DEFAULT_PRECISION, MIN_PRECISION};
use lsl::oracle::DEFAULT_CSV_DIGITS;
use lsl::verify::{refute_polynomial_bound, run_suite, Suite, SuiteOptions, VerifyError};

#[derive(Parser)]
#[command(name = "lsl", version, about = "Linear search for an escaping target with unknown speed")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "LSL_PRECISION_BITS", default_value_t = DEFAULT_PRECISION)]
    precision_bits: usize,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Competitive ratio over a range of evasiveness values.
    Sweep(SweepArgs),
    /// Run a verification suite: all, upper, lower, diff or unknown_d.
    Verify(VerifyArgs),
    /// Analytic catch time next to the oracle's intersection time.
    Oracle(OracleArgs),
    /// Export the robot path as `t,x` CSV.
    Trajectory(TrajectoryArgs),
    /// Search for a witness against `CR ≤ a·u^k`.
    Refute(RefuteArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "alg1")]
    strategy: String,
    #[arg(long, default_value = "1")]
    d: String,
    #[arg(long, default_value = "1")]
    u_min: String,
    #[arg(long, default_value = "1000")]
    u_max: String,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value = "log")]
    scale: Scale,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: usize,
    /// Render linear values instead of log₂ columns.
    #[arg(long)]
    linear: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 12)]
    i_max: usize,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: usize,
    /// Constant of the refuted bound (lower suite).
    #[arg(long)]
    a: Option<String>,
    /// Exponent of the refuted bound (lower) or difference order (diff).
    #[arg(long)]
    k: Option<String>,
    /// Single evaluation point for the difference bounds.
    #[arg(long)]
    x: Option<String>,
    /// Report the smallest passing constant on a 0.01 grid (exploratory).
    #[arg(long)]
    find_c: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value = "alg1")]
    strategy: String,
    #[arg(long)]
    u: String,
    #[arg(long, default_value = "1")]
    d: String,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    side: u8,
    #[arg(long, default_value_t = 8)]
    rounds: usize,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long, default_value = "alg1")]
    strategy: String,
    #[arg(long, default_value = "1")]
    d: String,
    #[arg(long, default_value_t = 4)]
    rounds: usize,
    #[arg(long, default_value_t = DEFAULT_CSV_DIGITS)]
    digits: usize,
    /// Output file; same as `--out`.
    path: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long, default_value = "alg1")]
    strategy: String,
    #[arg(long, default_value = "1")]
    a: String,
    #[arg(long)]
    k: String,
    #[arg(long, default_value_t = 40)]
    i_max: usize,
}

/// Exit status plus message.
enum Failure {
    Usage(String),
    Runtime(String),
    Verification(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) | ExperimentError::Catalog(_) | ExperimentError::Numerics(_) => {
                Failure::Usage(e.to_string())
            }
            ExperimentError::Engine(lsl::engine::EngineError::InvalidTarget(_)) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Precondition(_) | VerifyError::Numerics(_) | VerifyError::Catalog(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Context {
    precision: usize,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Context {
    fn real(&self, name: &str, text: &str) -> Result<Real, Failure> {
        Real::parse(text, self.precision).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => File::create(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Runtime(e.to_string())),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.precision_bits < MIN_PRECISION {
        return Err(Failure::Usage(format!("--precision-bits must be at least {MIN_PRECISION}")));
    }
    let mut ctx = Context { precision: cli.precision_bits, format: cli.format, out: cli.out };
    match cli.command {
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Oracle(a) => oracle(&ctx, a),
        Command::Trajectory(a) => {
            if a.path.is_some() {
                ctx.out = a.path.clone();
            }
            trajectory(&ctx, a)
        }
        Command::Refute(a) => refute(&ctx, a),
    }
}

fn sweep(ctx: &Context, a: SweepArgs) -> Result<(), Failure> {
    let mut cfg = SweepConfig::new(
        a.strategy,
        ctx.real("d", &a.d)?,
        ctx.real("u-min", &a.u_min)?,
        ctx.real("u-max", &a.u_max)?,
        a.samples,
    );
    cfg.scale = a.scale;
    cfg.horizon = a.horizon;
    cfg.linear = a.linear;
    let rows = run_sweep(&cfg)?;
    let text = match ctx.format {
        Some(Format::Json) => sweep_to_json(&rows, cfg.linear) + "\n",
        _ => sweep_to_csv(&rows, cfg.linear),
    };
    ctx.emit(&text)
}

fn verify(ctx: &Context, a: VerifyArgs) -> Result<(), Failure> {
    let mut opts = SuiteOptions {
        precision_bits: ctx.precision,
        i_max: a.i_max,
        horizon: a.horizon,
        find_c: a.find_c,
        ..Default::default()
    };
    match a.suite {
        Suite::Diff => {
            if a.a.is_some() {
                return Err(Failure::Usage("--a applies to the lower suite".into()));
            }
            if let Some(k) = &a.k {
                let k = k.parse::<usize>().map_err(|_| Failure::Usage(format!("--k {k} must be an integer order")))?;
                opts.diff_k = Some(k);
            } else if a.x.is_some() {
                return Err(Failure::Usage("--x needs --k".into()));
            }
            opts.diff_x = a.x;
        }
        Suite::Lower => {
            if a.x.is_some() {
                return Err(Failure::Usage("--x applies to the diff suite".into()));
            }
            match (a.a, a.k) {
                (None, None) => {}
                (a, Some(k)) => opts.refute = Some((a.unwrap_or_else(|| "1".into()), k)),
                (Some(_), None) => return Err(Failure::Usage("--a needs --k".into())),
            }
        }
        _ => {
            if a.a.is_some() || a.k.is_some() || a.x.is_some() {
                return Err(Failure::Usage("--a, --k and --x apply to the lower and diff suites".into()));
            }
        }
    }
    let report = run_suite(a.suite, &opts)?;
    let text = match ctx.format {
        Some(Format::Csv) => {
            let mut s = String::from("check_id,margin_log2,pass,precision_bits\n");
            for r in &report.records {
                let margin = r.margin_log2.map(|m| m.to_string()).unwrap_or_default();
                s.push_str(&format!("{},{},{},{}\n", r.check_id, margin, r.pass, r.precision_bits));
            }
            s
        }
        _ => report.to_json() + "\n",
    };
    ctx.emit(&text)?;
    if report.pass {
        Ok(())
    } else {
        let n = report.failures().count();
        Err(Failure::Verification(format!("{n} of {} checks failed", report.records.len())))
    }
}

fn oracle(ctx: &Context, a: OracleArgs) -> Result<(), Failure> {
    let u = ctx.real("u", &a.u)?;
    let d = ctx.real("d", &a.d)?;
    let cmp = compare_with_oracle(&a.strategy, &u, &d, Side::from_index(a.side as usize), a.rounds)?;
    let text = match ctx.format {
        Some(Format::Json) => serde_json::to_string_pretty(&cmp).expect("serializes") + "\n",
        Some(Format::Csv) => format!(
            "strategy,u,d,side,rounds,catch_round,analytic_time,oracle_time,relative_discrepancy\n{},{},{},{},{},{},{},{},{}\n",
            cmp.strategy,
            cmp.u,
            cmp.d,
            cmp.side,
            cmp.rounds,
            cmp.catch_round,
            cmp.analytic_time,
            cmp.oracle_time,
            cmp.relative_discrepancy
        ),
        None => cmp.to_text(),
    };
    ctx.emit(&text)
}

fn trajectory(ctx: &Context, a: TrajectoryArgs) -> Result<(), Failure> {
    if a.rounds == 0 {
        return Err(Failure::Usage("--rounds must be at least 1".into()));
    }
    let d = ctx.real("d", &a.d)?;
    let entry = lookup(&a.strategy, &d.max(&Real::one(ctx.precision))).map_err(|e| Failure::Usage(e.to_string()))?;
    let traj = entry.trajectory(&d, a.rounds).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = match ctx.format {
        Some(Format::Json) => {
            let pts: Vec<_> = traj
                .vertices()
                .iter()
                .map(|v| json!({"t": v.t.to_decimal(a.digits), "x": v.x.to_decimal(a.digits)}))
                .collect();
            serde_json::to_string_pretty(&pts).expect("serializes") + "\n"
        }
        _ => traj.to_csv(a.digits),
    };
    ctx.emit(&text)
}

fn refute(ctx: &Context, a: RefuteArgs) -> Result<(), Failure> {
    let entry = lookup(&a.strategy, &Real::one(ctx.precision)).map_err(|e| Failure::Usage(e.to_string()))?;
    let av = ctx.real("a", &a.a)?;
    let kv = ctx.real("k", &a.k)?;
    let witness = refute_polynomial_bound(&entry, &av, &kv, a.i_max)?;
    let Some(w) = witness else {
        let msg = format!("no witness against CR <= {}·u^{} within i <= {}", a.a, a.k, a.i_max);
        ctx.emit(&match ctx.format {
            Some(Format::Json) => json!({"a": a.a, "k": a.k, "witness": null}).to_string() + "\n",
            _ => msg.clone() + "\n",
        })?;
        return Err(Failure::Verification(msg));
    };
    let fields = [
        ("round_index", w.round_index.to_string()),
        ("log2_u_star", w.log2_u_star.to_shortest(30)),
        ("cr_log2", w.cr_log2.to_shortest(30)),
        ("bound_log2", w.bound_log2.to_shortest(30)),
        ("exact_cr_log2", w.exact_cr_log2.to_shortest(30)),
    ];
    let text = match ctx.format {
        Some(Format::Json) => {
            let mut obj = serde_json::Map::new();
            obj.insert("a".into(), json!(a.a));
            obj.insert("k".into(), json!(a.k));
            for (k, v) in &fields {
                obj.insert((*k).into(), json!(v));
            }
            serde_json::to_string_pretty(&obj).expect("serializes") + "\n"
        }
        Some(Format::Csv) => {
            let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let values: Vec<&str> = fields.iter().map(|f| f.1.as_str()).collect();
            format!("a,k,{}\n{},{},{}\n", names.join(","), a.a, a.k, values.join(","))
        }
        None => {
            let mut s = format!("witness against CR <= {}·u^{}\n", a.a, a.k);
            for (k, v) in &fields {
                s.push_str(&format!("  {k}: {v}\n"));
            }
            s
        }
    };
    ctx.emit(&text)
}
