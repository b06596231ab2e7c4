//! `mrec`: experiments on multiplicative functions and multiplicative
//! recurrence, writing CSV or JSON lines.

mod commands;
mod output;
mod parse;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mrec_core::config::Config;
use mrec_core::Error;
use serde_json::json;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "mrec", version, about = "Multiplicative recurrence experiments")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "MREC_WORKERS")]
    workers: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format (CSV for row outputs, JSON lines for records by default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Config file of `key = value` lines; section `[a.b]` supplies
    /// defaults for subcommand `a b`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the column schema of every subcommand and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Values f(n) over a range.
    Eval(EvalArgs),
    /// Pretentious distance D(f, g; A, B).
    Distance(DistanceArgs),
    /// Logarithmic average of f, optionally along a progression.
    Logavg(LogavgArgs),
    /// Logarithmic two-point correlation.
    Correlate(CorrelateArgs),
    /// Aperiodicity profile inf D(f, chi n^{it}; 1, X).
    Profile(ProfileArgs),
    /// Prime sums of chi(p) p^{-1-ia}.
    Primesum(PrimesumArgs),
    /// Multiplicative Folner sets and the CRT progression trick.
    #[command(subcommand)]
    Folner(FolnerCommand),
    /// Recurrence criterion, scans, densities and certificates.
    #[command(subcommand)]
    Recur(RecurCommand),
    /// Rotation systems on products of circles.
    #[command(subcommand)]
    Sys(SysCommand),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value_t = 1)]
    pub from: u64,
    #[arg(long)]
    pub to: Option<u64>,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value = "one")]
    pub g: String,
    /// Prime window A,B.
    #[arg(long)]
    pub window: String,
}

#[derive(Args, Debug)]
pub struct LogavgArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub x: u64,
    /// Progression L,r: average f(Ln + r).
    #[arg(long)]
    pub progression: Option<String>,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    /// a1,b1,a2,b2 for f(a1 m + b1) g(a2 m + b2).
    #[arg(long)]
    pub abcd: String,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub progression: Option<String>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub b: f64,
    /// Comma-separated scales X.
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Half-width of the t grid; defaults to B·X for each X.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Search all characters of modulus ≤ B rather than primitive ones.
    #[arg(long)]
    pub imprimitive: bool,
    /// Skip the local refinement around the best grid point.
    #[arg(long)]
    pub no_refine: bool,
    /// Include per-character distance rows.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Args, Debug)]
pub struct PrimesumArgs {
    /// Character q,index...
    #[arg(long)]
    pub chi: String,
    /// Comma-separated values of a.
    #[arg(long, conflicts_with = "log_spaced")]
    pub a: Option<String>,
    /// lo,hi,count: log-spaced values of a.
    #[arg(long)]
    pub log_spaced: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub y: u64,
    #[arg(long)]
    pub x: u64,
}

#[derive(Args, Debug, Clone)]
pub struct FolnerSetArgs {
    /// Folner primes, comma-separated.
    #[arg(long)]
    pub primes: String,
    /// Exponent window lo,hi: exponents in (lo, hi].
    #[arg(long)]
    pub window: String,
}

#[derive(Args, Debug, Clone)]
pub struct QtrickArgs {
    #[command(flatten)]
    pub set: FolnerSetArgs,
    /// a1,b1,a2,b2.
    #[arg(long)]
    pub abcd: String,
    #[arg(long)]
    pub mu: u32,
    #[arg(long)]
    pub nu: u32,
    /// Restrict to one element Q.
    #[arg(long)]
    pub q: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum FolnerCommand {
    /// List the set.
    Gen(FolnerSetArgs),
    /// |Phi ∩ Phi/p| / |Phi| per prime.
    Ratio(FolnerSetArgs),
    /// Average of f over the set with the shift bounds.
    Avg {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        set: FolnerSetArgs,
    },
    /// CRT decomposition Q = AW per element.
    Decompose(QtrickArgs),
    /// Exact identity checks per element.
    Verify {
        #[command(flatten)]
        args: QtrickArgs,
        /// Also reproduce r_Q by exhaustive search.
        #[arg(long)]
        brute: bool,
    },
    /// Character shift identities between Q and Qp.
    Claims {
        #[command(flatten)]
        args: QtrickArgs,
        /// Characters f1;f2;g1;g2, each q,index...
        #[arg(long)]
        chars: String,
    },
    /// Correlation averaged over the set through the factored forms.
    Corr {
        #[command(flatten)]
        args: QtrickArgs,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        x: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum RecurCommand {
    /// a = c and (b = d or a | bd), after normalising.
    Criterion {
        #[arg(long)]
        quad: String,
    },
    /// Running minima of |f(an+b) - g(cn+d)|.
    Scan {
        #[arg(long)]
        f: String,
        /// Second function; defaults to f.
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        quad: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        from: u64,
    },
    /// Logarithmic density of {n : |f(an+b) - f(cn+d)| < eps}.
    Density {
        #[arg(long)]
        f: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        quad: String,
        #[arg(long)]
        x: u64,
    },
    /// Certified counterexample for a quadruple failing the criterion.
    Counterexample {
        #[arg(long)]
        quad: String,
        /// Also verify up to this n.
        #[arg(long)]
        verify: Option<u64>,
    },
    /// Verify a certificate record (or the one built for --quad).
    Verify {
        /// File holding one certificate JSON line.
        #[arg(long, conflicts_with = "quad")]
        cert: Option<PathBuf>,
        #[arg(long)]
        quad: Option<String>,
        #[arg(long)]
        n: u64,
        /// Override the certificate threshold n0.
        #[arg(long)]
        n0: Option<u64>,
    },
    /// Fejer coefficients of the tent of half-width eps.
    Fejer {
        #[arg(long)]
        eps: f64,
        /// Degree bound; defaults to the least R meeting the eps^2 bound.
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        coefficients: bool,
    },
    /// The shift-2 pair counterexample, verified, with the shift-1 scan.
    Pair {
        #[arg(long, default_value = "1/3")]
        theta1: String,
        #[arg(long, default_value = "1/5")]
        theta2: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Coordinate function; repeat for each coordinate.
    #[arg(long = "f", required = true)]
    pub fs: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum SysCommand {
    /// Describe the system.
    Build(SystemArgs),
    /// mu(T_p^{-1}A ∩ T_q^{-1}A).
    Measure {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Arcs start:length joined by '+'; one per coordinate.
        #[arg(long = "arc", required = true)]
        arcs: Vec<String>,
    },
    /// All n with mu(T_{p_n}^{-1}A ∩ T_{q_n}^{-1}A) > 0, for p_n/q_n = (an+b)/(cn+d).
    Scan {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        quad: String,
        #[arg(long = "arc", required = true)]
        arcs: Vec<String>,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Composition law and measure preservation on random samples.
    Axioms {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const GROUPS: [&str; 3] = ["folner", "recur", "sys"];
const VALUED_GLOBALS: [&str; 4] = ["--workers", "--output", "--format", "--config"];

/// Splices `--key value` pairs from the config sections of the chosen
/// subcommand into the arguments, skipping keys given on the command line.
fn apply_config(args: Vec<String>) -> Result<Vec<String>, Error> {
    let mut config_path = None;
    let mut path = Vec::new();
    let mut insert_at = None;
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if let Some(v) = a.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        } else if a == "--config" {
            config_path = args.get(i + 1).cloned();
            i += 1;
        } else if VALUED_GLOBALS.contains(&a.as_str()) {
            i += 1;
        } else if !a.starts_with('-') && insert_at.is_none() {
            path.push(a.clone());
            if path.len() == 2 || !GROUPS.contains(&path[0].as_str()) {
                insert_at = Some(i + 1);
            }
        }
        i += 1;
    }
    let (Some(cfg), Some(at)) = (config_path, insert_at) else {
        return Ok(args);
    };
    let config = Config::load(std::path::Path::new(&cfg))?;
    let mut extra = Vec::new();
    let sections = [String::new(), path[0].clone(), path.join(".")];
    for (k, section) in sections.iter().enumerate() {
        if k == 1 && path.len() == 1 {
            continue;
        }
        for (key, value) in config.section(section) {
            let flag = format!("--{key}");
            let given = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
            if given {
                continue;
            }
            match value.as_str() {
                "true" => extra.push(flag),
                "false" => {}
                _ => {
                    for v in value.split(';') {
                        extra.push(flag.clone());
                        extra.push(v.trim().to_string());
                    }
                }
            }
        }
    }
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn diagnostic(err: &Error) -> String {
    let mut v = json!({ "error": err.kind(), "message": err.to_string() });
    match err {
        Error::Range { budget, .. } => v["budget"] = json!(budget),
        Error::Parse { offset, .. } => v["offset"] = json!(offset),
        Error::CertificateFailure { identity, detail } => {
            v["identity"] = json!(identity);
            v["detail"] = json!(detail);
            if let Some(n) = mrec_core::recurrence::witness_of(err) {
                v["witness"] = json!(n);
            }
        }
        _ => {}
    }
    v.to_string()
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.schema {
        return output::write(&schema::render(), cli.output.as_deref());
    }
    let Some(command) = cli.command else {
        return Err(Error::InvalidInput("no subcommand given; see --help".into()));
    };
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("cannot start {n} workers: {e}")))?;
    }
    let out = commands::dispatch(command)?;
    output::write(&out.render(cli.format)?, cli.output.as_deref())
}

fn main() -> ExitCode {
    let args = match apply_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(2)
        }
    }
}
