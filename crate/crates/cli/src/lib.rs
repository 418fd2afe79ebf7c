//! Command-line surface: argument parsing, output formats and exit codes.
//!
//! Exit codes: 0 success, 1 any certified failure, 2 any unresolved result,
//! 64 usage error, 74 output not writable.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fibroot::family::{DEFAULT_BITS, DEFAULT_MAX_ESCALATIONS, DEFAULT_TARGET_RADIUS};
use fibroot::poly::{self, ORACLE_CAP};
use fibroot::recurrence::kfib;
use fibroot::rootfinder::solve_all;
use fibroot::verifier::{verify_range, Report, Status};
use fibroot::{FamilyIndex, MpFloat, PrecisionConfig, Real, Round};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_UNRESOLVED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

pub const BITS_ENV: &str = "FIBROOT_DEFAULT_BITS";

/// `k` or an inclusive range `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSpec {
    pub lo: u32,
    pub hi: u32,
}

impl KSpec {
    pub fn range(&self) -> RangeInclusive<u32> {
        self.lo..=self.hi
    }

    fn single(&self) -> Option<u32> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

impl FromStr for KSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("invalid order '{t}'"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo < 2 {
            return Err(format!("k must be at least 2 (got {lo})"));
        }
        if hi < lo {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(KSpec { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "fibroot", version, about = "Certified roots and bound checks for k-generalized Fibonacci polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Order k, or an inclusive range a..b.
    #[arg(long, value_name = "K|A..B")]
    pub k: KSpec,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Precision {
    /// Working precision in bits (default 128, or $FIBROOT_DEFAULT_BITS).
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TARGET_RADIUS)]
    pub target_radius: f64,
    /// Number of precision doublings after the first attempt.
    #[arg(long, default_value_t = DEFAULT_MAX_ESCALATIONS)]
    pub max_escalations: u32,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every claim over a range of orders and write a report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        precision: Precision,
        /// Write a null runtime so that equal runs give identical bytes.
        #[arg(long)]
        omit_runtime: bool,
    },
    /// Print the certified root balls of f_k.
    Roots {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        precision: Precision,
    },
    /// Print the exact discriminants.
    Disc {
        #[command(flatten)]
        common: Common,
    },
    /// Print the k-generalized Fibonacci number F_n.
    Fib {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

struct Usage(String);

fn precision_config(p: &Precision) -> Result<PrecisionConfig, Usage> {
    let bits = match p.bits {
        Some(b) => b,
        None => match std::env::var(BITS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Usage(format!("{BITS_ENV} is not an integer: '{v}'")))?,
            Err(_) => DEFAULT_BITS,
        },
    };
    PrecisionConfig::new(bits, p.target_radius, p.max_escalations).map_err(|e| Usage(e.to_string()))
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Usage> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Usage("--parallel must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn exit_for(status: Status) -> u8 {
    match status {
        Status::Fail => EXIT_FAIL,
        Status::Unresolved => EXIT_UNRESOLVED,
        Status::CertifiedPass | Status::Inapplicable => EXIT_OK,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let path = match &cli.command {
        Command::Verify { common, .. } | Command::Roots { common, .. } | Command::Disc { common } | Command::Fib { common, .. } => {
            common.out.clone()
        }
    };
    // Open the destination first so an unwritable path fails before any work.
    let mut file = match path.as_ref().map(File::create).transpose() {
        Ok(f) => f,
        Err(e) => {
            let p = path.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
            let _ = writeln!(stderr, "error: cannot write {p}: {e}");
            return EXIT_IO;
        }
    };
    let (out, code) = match execute(&cli.command) {
        Ok(v) => v,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match file.as_mut() {
        Some(f) => f.write_all(out.as_bytes()).and_then(|_| f.flush()),
        None => stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_IO;
    }
    code
}

fn execute(cmd: &Command) -> Result<(String, u8), Usage> {
    match cmd {
        Command::Verify { common, precision, omit_runtime } => {
            let prec = precision_config(precision)?;
            let report = with_pool(precision.parallel, || {
                verify_range::<MpFloat>(common.k.lo, common.k.hi, &prec)
            })?
            .map_err(|e| Usage(e.to_string()))?;
            let mut report = report;
            if *omit_runtime {
                report.runtime_seconds = None;
            }
            let code = exit_for(report.verdict());
            Ok((render_report(&report, common.format.unwrap_or(Format::Json)), code))
        }
        Command::Roots { common, precision } => {
            let k = common.k.single().ok_or_else(|| Usage("roots takes a single k".into()))?;
            let prec = precision_config(precision)?;
            let fk = FamilyIndex::new(k).map_err(|e| Usage(e.to_string()))?;
            let solved = with_pool(precision.parallel, || solve_all::<MpFloat>(fk, &prec))?;
            match solved {
                Ok(rs) => Ok((render_roots(&rs, common.format.unwrap_or(Format::Human)), EXIT_OK)),
                Err(e) => {
                    log::error!("{e}");
                    Ok((String::new(), EXIT_UNRESOLVED))
                }
            }
        }
        Command::Disc { common } => {
            let rows: Vec<DiscRow> = common.k.range().map(disc_row).collect();
            let code = if rows.iter().any(|r| !r.consistent) { EXIT_FAIL } else { EXIT_OK };
            Ok((render_disc(&rows, common.format.unwrap_or(Format::Human)), code))
        }
        Command::Fib { common, n } => {
            let mut rows = Vec::new();
            for k in common.k.range() {
                let fk = FamilyIndex::new(k).map_err(|e| Usage(e.to_string()))?;
                let v = kfib(fk, *n).map_err(|e| Usage(e.to_string()))?;
                rows.push(FibRow { k, n: *n, value: v.to_string() });
            }
            Ok((render_fib(&rows, common.format.unwrap_or(Format::Human)), EXIT_OK))
        }
    }
}

fn csv_string<S: Serialize>(rows: &[S]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

fn json_string<S: Serialize + ?Sized>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ClaimRow {
    k: u32,
    claim: &'static str,
    status: &'static str,
    margin: String,
    witness: String,
    bits_used: u32,
}

pub fn render_report(report: &Report, format: Format) -> String {
    let margin = |m: Option<f64>| m.map_or(String::new(), |v| format!("{v:e}"));
    let witness = |w: &Option<Vec<usize>>| {
        w.as_ref().map_or(String::new(), |v| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"))
    };
    match format {
        Format::Json => json_string(report),
        Format::Csv => {
            let rows: Vec<ClaimRow> = report
                .results
                .iter()
                .map(|r| ClaimRow {
                    k: r.k,
                    claim: r.claim.as_str(),
                    status: r.status.as_str(),
                    margin: margin(r.margin),
                    witness: witness(&r.witness),
                    bits_used: r.bits_used,
                })
                .collect();
            csv_string(&rows)
        }
        Format::Human => {
            let mut s = String::new();
            let _ = writeln!(s, "{:>5}  {:<9} {:<14} {:>12}  {:<9} {:>5}", "k", "claim", "status", "margin", "witness", "bits");
            for r in &report.results {
                let _ = writeln!(
                    s,
                    "{:>5}  {:<9} {:<14} {:>12}  {:<9} {:>5}",
                    r.k,
                    r.claim.as_str(),
                    r.status.as_str(),
                    r.margin.map_or("-".into(), |m| format!("{m:.3e}")),
                    witness(&r.witness),
                    r.bits_used
                );
            }
            let _ = writeln!(s, "\nworst margin per claim:");
            for (c, m) in &report.summary.worst_margin_per_claim {
                let _ = writeln!(s, "  {:<9} {}", c.as_str(), m.map_or("-".into(), |v| format!("{v:.3e}")));
            }
            let _ = writeln!(s, "verdict: {}", report.summary.verdict);
            if let Some(t) = report.runtime_seconds {
                let _ = writeln!(s, "runtime: {t:.2} s");
            }
            s
        }
    }
}

#[derive(Serialize)]
struct RootRow {
    k: u32,
    index: usize,
    sector_h: u32,
    kind: &'static str,
    mid_re: String,
    mid_im: String,
    radius: String,
    modulus_lo: String,
    modulus_hi: String,
    arg_lo: String,
    arg_hi: String,
}

#[derive(Serialize)]
struct RootsDoc<'a> {
    schema: &'static str,
    k: u32,
    bits_used: u32,
    certified: bool,
    roots: &'a [RootRow],
}

/// Decimal digits carried by `bits` binary digits, plus two. The factor is
/// the fixed 0.3010 of the output format, not `log10(2)`.
#[allow(clippy::approx_constant)]
pub fn digits_for(bits: u32) -> usize {
    (bits as f64 * 0.3010).ceil() as usize + 2
}

fn dec<R: Real>(v: &R, digits: usize, rnd: Round) -> String {
    v.to_mp().to_sci(digits, rnd)
}

pub fn render_roots<R: Real>(rs: &fibroot::RootSet<R>, format: Format) -> String {
    let d = digits_for(rs.bits());
    let rows: Vec<RootRow> = rs
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| RootRow {
            k: rs.k.get(),
            index: i,
            sector_h: r.sector_h,
            kind: r.kind.as_str(),
            mid_re: dec(r.value.mid_re(), d, Round::Nearest),
            mid_im: dec(r.value.mid_im(), d, Round::Nearest),
            radius: dec(r.value.radius(), d, Round::Up),
            modulus_lo: dec(r.modulus.lo(), d, Round::Down),
            modulus_hi: dec(r.modulus.hi(), d, Round::Up),
            arg_lo: dec(r.argument.lo(), d, Round::Down),
            arg_hi: dec(r.argument.hi(), d, Round::Up),
        })
        .collect();
    match format {
        Format::Csv => csv_string(&rows),
        Format::Json => json_string(&RootsDoc {
            schema: "fibroot-roots/1",
            k: rs.k.get(),
            bits_used: rs.bits(),
            certified: rs.certified,
            roots: &rows,
        }),
        Format::Human => {
            let mut s = format!("k = {}, {} bits, certified = {}\n", rs.k, rs.bits(), rs.certified);
            for r in &rows {
                let _ = writeln!(
                    s,
                    "[{:>3}] h={:<3} {:<13} ({}, {}) ± {}\n      |z| in [{}, {}]  arg in [{}, {}]",
                    r.index, r.sector_h, r.kind, r.mid_re, r.mid_im, r.radius, r.modulus_lo, r.modulus_hi, r.arg_lo,
                    r.arg_hi
                );
            }
            s
        }
    }
}

#[derive(Serialize)]
struct DiscRow {
    k: u32,
    closed_form: String,
    /// Empty beyond the oracle cap.
    oracle: String,
    disc_f: String,
    #[serde(skip)]
    consistent: bool,
}

fn disc_row(k: u32) -> DiscRow {
    let fk = FamilyIndex::new(k).expect("validated by KSpec");
    let closed = poly::discriminant_closed_form(fk);
    let oracle = (k <= ORACLE_CAP).then(|| poly::discriminant_resultant_oracle(fk).expect("within cap"));
    let disc_f = poly::disc_f_from_disc_g(fk);
    let consistent = oracle.as_ref().is_none_or(|o| *o == closed) && disc_f.is_ok();
    if !consistent {
        log::error!("k = {k}: discriminant identities do not hold");
    }
    DiscRow {
        k,
        closed_form: closed.to_string(),
        oracle: oracle.map_or(String::new(), |o| o.to_string()),
        disc_f: disc_f.map_or_else(|e| e.to_string(), |v| v.to_string()),
        consistent,
    }
}

fn render_disc(rows: &[DiscRow], format: Format) -> String {
    match format {
        Format::Csv => csv_string(rows),
        Format::Json => json_string(rows),
        Format::Human => {
            let mut s = String::new();
            for r in rows {
                let _ = writeln!(s, "k = {}", r.k);
                let _ = writeln!(s, "  closed form  {}", r.closed_form);
                if r.oracle.is_empty() {
                    let _ = writeln!(s, "  oracle       (k > {ORACLE_CAP}, not computed)");
                } else {
                    let _ = writeln!(s, "  oracle       {}", r.oracle);
                }
                let _ = writeln!(s, "  disc_f       {}", r.disc_f);
            }
            s
        }
    }
}

#[derive(Serialize)]
struct FibRow {
    k: u32,
    n: i64,
    value: String,
}

fn render_fib(rows: &[FibRow], format: Format) -> String {
    match format {
        Format::Csv => csv_string(rows),
        Format::Json => json_string(rows),
        Format::Human => rows.iter().map(|r| format!("{}\n", r.value)).collect(),
    }
}

/// Entry point for the binary.
pub fn main_with_env() -> u8 {
    // Unlocked handles: worker threads log to stderr while the run is in progress.
    run(std::env::args_os(), &mut io::stdout(), &mut io::stderr())
}
