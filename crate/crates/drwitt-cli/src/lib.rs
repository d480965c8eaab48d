//! Command-line front end for `drwitt`.
//!
//! [`run`] parses an argument vector, executes one verb and returns the
//! exit code with everything that would go to stdout and stderr. Exit codes:
//! 0 on success, 2 when a verification verb finds the property violated, 1
//! on bad input or any other error.

mod commands;
pub mod manifest;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use drwitt::dieudonne::{precision_guard, set_precision_guard};

pub use manifest::RunManifest;

pub const SCHEMA_VERSION: u32 = 1;
pub const GUARD_ENV: &str = "DRWITT_PRECISION_GUARD";

#[derive(Parser, Debug)]
#[command(name = "drwitt", version, about = "de Rham–Witt and syntomic computations at finite precision")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for the randomized verbs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write a run manifest here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Witt vector arithmetic.
    Witt {
        #[command(subcommand)]
        op: WittOp,
    },
    /// de Rham cohomology by weight.
    Derham {
        #[command(subcommand)]
        op: DerhamOp,
    },
    /// Inverse Cartier isomorphisms up to the caps.
    CartierCheck(CartierArgs),
    /// Strict de Rham–Witt levels.
    Drw {
        #[command(subcommand)]
        op: DrwOp,
    },
    /// `Z/p^r(i)` cohomology.
    Syntomic(SyntomicArgs),
    /// The span of `dlog` symbols in `W_rΩ^i`.
    Logforms(LogArgs),
    /// Verification verbs; exit code 2 when the property fails.
    Check {
        #[command(subcommand)]
        op: CheckOp,
    },
    /// Spectral sequences of filtered complexes.
    Specseq {
        #[command(subcommand)]
        op: SpecseqOp,
    },
    /// Predicted K-groups.
    Kpredict(KArgs),
}

#[derive(Args, Debug, Clone)]
pub struct WittCommon {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub len: usize,
    /// Coefficient ring; `F_p` when absent.
    #[arg(long)]
    pub ring: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum WittOp {
    Add {
        #[command(flatten)]
        common: WittCommon,
        a: String,
        b: String,
    },
    Mul {
        #[command(flatten)]
        common: WittCommon,
        a: String,
        b: String,
    },
    /// Teichmüller lift of one ring element.
    Teich {
        #[command(flatten)]
        common: WittCommon,
        a: String,
    },
    Frob {
        #[command(flatten)]
        common: WittCommon,
        a: String,
    },
    Versch {
        #[command(flatten)]
        common: WittCommon,
        a: String,
    },
    /// Ghost components of an integer Witt vector, or with `--check N` a
    /// randomized comparison of the laws against integer arithmetic.
    Ghost {
        #[command(flatten)]
        common: WittCommon,
        a: Option<String>,
        #[arg(long)]
        check: Option<usize>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    #[arg(long)]
    pub ring: PathBuf,
    #[arg(long)]
    pub maxdeg: Option<usize>,
    #[arg(long = "weight-cap")]
    pub weight_cap: Option<String>,
    /// Also recompute at weight cap `cap·p`.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Subcommand, Debug)]
pub enum DerhamOp {
    Table(TableArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CartierArgs {
    #[arg(long)]
    pub ring: PathBuf,
    #[arg(long)]
    pub maxdeg: Option<usize>,
    #[arg(long = "weight-cap")]
    pub weight_cap: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum DrwOp {
    Table {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        level: u32,
        /// Print F and V on every component.
        #[arg(long)]
        operators: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SyntomicArgs {
    #[arg(long)]
    pub ring: PathBuf,
    #[arg(long)]
    pub twist: usize,
    #[arg(long)]
    pub modp: u32,
    /// Defaults to `2p²`.
    #[arg(long = "weight-cap")]
    pub weight_cap: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct LogArgs {
    #[arg(long)]
    pub ring: PathBuf,
    #[arg(long)]
    pub deg: usize,
    #[arg(long)]
    pub modp: u32,
}

#[derive(Args, Debug, Clone)]
pub struct TwistArgs {
    #[arg(long)]
    pub ring: PathBuf,
    #[arg(long)]
    pub twist: usize,
    #[arg(long = "weight-cap")]
    pub weight_cap: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CheckOp {
    FundamentalSeq(SyntomicArgs),
    NygaardGraded(TwistArgs),
    NygaardComplete(TwistArgs),
}

#[derive(Subcommand, Debug)]
pub enum SpecseqOp {
    Run {
        #[arg(long)]
        input: PathBuf,
        /// Last page to compute.
        #[arg(long, default_value_t = 8)]
        pages: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct KArgs {
    #[arg(long)]
    pub ring: PathBuf,
    /// Inclusive degree range `a..b`.
    #[arg(long, default_value = "0..4")]
    pub range: String,
    #[arg(long)]
    pub modp: u32,
    #[arg(long, conflicts_with = "json")]
    pub markdown: bool,
}

/// What a verb hands back before formatting.
pub struct Report {
    pub verb: String,
    pub result: Value,
    pub text: String,
    /// Verification verbs set this when the property fails.
    pub failed: bool,
    /// Canonical text of the ring spec read, if any.
    pub ring_text: Option<String>,
    pub caps: Value,
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// The JSON envelope every verb prints with `--json`.
pub fn envelope(verb: &str, result: &Value) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": verb,
        "result": result,
    });
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn apply_guard_env() -> Result<(), String> {
    match std::env::var(GUARD_ENV) {
        Ok(v) => {
            let g: u32 = v
                .trim()
                .parse()
                .map_err(|_| format!("{GUARD_ENV} must be a non-negative integer, got `{v}`"))?;
            set_precision_guard(g);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Err(msg) = apply_guard_env() {
        return Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") };
    }
    let start = Instant::now();
    let report = match commands::dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            return Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") };
        }
    };
    let stdout = if cli.json {
        envelope(&report.verb, &report.result)
    } else {
        report.text.clone()
    };
    let code = if report.failed { 2 } else { 0 };
    let mut stderr = String::new();
    if let Some(path) = &cli.manifest {
        let command: Vec<String> = strip_manifest(&argv);
        let m = RunManifest::new(command, &report, precision_guard(), start.elapsed(), &stdout);
        if let Err(e) = m.write(path) {
            return Outcome { code: 1, stdout, stderr: format!("error: writing manifest: {e}\n") };
        }
        stderr += &format!("manifest written to {}\n", path.display());
    }
    Outcome { code, stdout, stderr }
}

/// The argument vector without the program name and the `--manifest` flag.
fn strip_manifest(argv: &[std::ffi::OsString]) -> Vec<String> {
    let mut out = vec![];
    let mut skip = false;
    for a in argv.iter().skip(1) {
        let s = a.to_string_lossy().to_string();
        if skip {
            skip = false;
            continue;
        }
        if s == "--manifest" {
            skip = true;
            continue;
        }
        if s.starts_with("--manifest=") {
            continue;
        }
        out.push(s);
    }
    out
}
