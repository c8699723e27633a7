use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use charrank_core::cache::CacheDir;
use charrank_core::duals::{scan_table, DualTable};
use charrank_core::rank_cup::{charrank_oriented, cup_lower_sw, cup_upper};
use charrank_core::verify::{run_suite, Suite, SuiteOptions, SuiteReport};
use charrank_core::{CharrankValue, Cohomology, GrassmannContext, GysinReport, Prediction};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const FORMAT: &str = "charrank";
const FORMAT_VERSION: u32 = 1;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPPED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Exact GF(2) computations for oriented Grassmann manifolds G~(n,k).
#[derive(Debug, Parser)]
#[command(name = "charrank", version)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Cache directory for dual class tables (default: $CHARRANK_CACHE_DIR,
    /// $XDG_CACHE_HOME/charrank, ~/.cache/charrank).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,

    /// More progress output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dual Stiefel-Whitney class wbar_i in w1..wk.
    Dual(ClassArgs),
    /// g_i: wbar_i with w1 = 0.
    G(ClassArgs),
    /// Degrees in a range where the reduction of wbar_i vanishes.
    Scan(ScanArgs),
    /// Betti numbers of G(n,k) and G~(n,k) with the w1 ranks behind them.
    Betti(ContextArgs),
    /// Characteristic rank of the canonical bundle over G~(n,k).
    Charrank {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Stop scanning after this degree.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Cup-length bounds for G~(n,k).
    Cup {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Monomials tested by the lower-bound search.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Run a check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ClassArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    i: u32,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    k: usize,
    /// Variables set to zero, e.g. 1 or 1,2,3.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    kill: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    lo: u32,
    #[arg(long)]
    hi: u32,
    /// Print every reduced class, not only the zeros.
    #[arg(long)]
    values: bool,
}

#[derive(Debug, Args)]
struct ContextArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Zeros,
    Points,
    Frobenius,
    Charrank,
    Cup,
    Gysin,
    Ideal,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Zeros => Suite::Zeros,
            SuiteArg::Points => Suite::Points,
            SuiteArg::Frobenius => Suite::Frobenius,
            SuiteArg::Charrank => Suite::Charrank,
            SuiteArg::Cup => Suite::Cup,
            SuiteArg::Gysin => Suite::Gysin,
            SuiteArg::Ideal => Suite::Ideal,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Upper end of the g_i scans.
    #[arg(long)]
    hi: Option<u32>,
    /// Grids cover n <= 2^t-max.
    #[arg(long)]
    t_max: Option<u32>,
    /// Number of random (k, i, s) triples for the frobenius suite.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Add per-context wall-clock times to the rows.
    #[arg(long)]
    timing: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format: &'static str,
    version: u32,
    command: &'a str,
    result: T,
}

fn emit_json<T: Serialize>(command: &str, result: T) -> Result<()> {
    let env = Envelope {
        format: FORMAT,
        version: FORMAT_VERSION,
        command,
        result,
    };
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, &env)?;
    writeln!(out)?;
    Ok(())
}

/// `println!` that reports write failures instead of panicking.
macro_rules! out {
    () => {
        writeln!(io::stdout().lock())?
    };
    ($($arg:tt)*) => {
        writeln!(io::stdout().lock(), $($arg)*)?
    };
}

struct App {
    json: bool,
    cache: Option<CacheDir>,
}

impl App {
    /// Dual class table through degree `up_to`, via the cache when one is configured.
    fn table(&self, k: usize, killed: &[usize], up_to: u32) -> Result<DualTable> {
        if let Some(cache) = &self.cache {
            match cache.table_through(k, killed, up_to) {
                Ok(t) => return Ok(t),
                Err(e) if e.is_usage() => return Err(e.into()),
                Err(e) => log::warn!("cache unavailable ({e}); computing in memory"),
            }
        }
        let mut t = DualTable::reduced(k, killed)?;
        t.extend_to(up_to);
        Ok(t)
    }

    fn cohomology(&self, args: &ContextArgs) -> Result<Cohomology> {
        let ctx = GrassmannContext::new(args.n, args.k)?;
        let table = self.table(args.k as usize, &[], args.n)?;
        Ok(Cohomology::with_duals(ctx, &table)?)
    }

    fn run(&self, command: Command) -> Result<u8> {
        match command {
            Command::Dual(a) => self.class("dual", &a, &[]),
            Command::G(a) => {
                if a.k < 2 {
                    anyhow::bail!(charrank_core::Error::Precondition(format!(
                        "g_i needs k >= 2 (k={})",
                        a.k
                    )));
                }
                self.class("g", &a, &[1])
            }
            Command::Scan(a) => self.scan(&a),
            Command::Betti(a) => self.betti(&a),
            Command::Charrank { ctx, cap } => self.charrank(&ctx, cap),
            Command::Cup { ctx, budget } => self.cup(&ctx, budget),
            Command::Verify(a) => self.verify(&a),
        }
    }

    fn class(&self, command: &str, a: &ClassArgs, killed: &[usize]) -> Result<u8> {
        let table = self.table(a.k, killed, a.i)?;
        let p = table.get(a.i).expect("table extended");
        if self.json {
            #[derive(Serialize)]
            struct Class {
                k: usize,
                i: u32,
                value: String,
            }
            emit_json(
                command,
                Class {
                    k: a.k,
                    i: a.i,
                    value: p.to_string(),
                },
            )?;
        } else {
            out!("{p}");
        }
        Ok(0)
    }

    fn scan(&self, a: &ScanArgs) -> Result<u8> {
        if a.lo > a.hi {
            anyhow::bail!(charrank_core::Error::Precondition(format!(
                "empty range --lo {} --hi {}",
                a.lo, a.hi
            )));
        }
        let mut table = self.table(a.k, &a.kill, a.hi)?;
        let scan = scan_table(&mut table, a.lo, a.hi, a.values)?;
        if self.json {
            return emit_json("scan", &scan).map(|_| 0);
        }
        let name = reduction_name(scan.k, &scan.killed);
        let killed: Vec<String> = scan.killed.iter().map(|i| format!("w{i}")).collect();
        out!(
            "{name}_i (k={}, {} = 0), i = {}..{}",
            scan.k,
            if killed.is_empty() {
                "nothing".to_string()
            } else {
                killed.join(", ")
            },
            scan.lo,
            scan.hi
        );
        let zeros: Vec<String> = scan.zero_degrees.iter().map(u32::to_string).collect();
        out!(
            "zeros: {}",
            if zeros.is_empty() {
                "none".to_string()
            } else {
                zeros.join(" ")
            }
        );
        for (i, value) in scan.values.iter().flatten() {
            out!("{name}_{i} = {value}");
        }
        Ok(0)
    }

    fn betti(&self, a: &ContextArgs) -> Result<u8> {
        let coh = self.cohomology(a)?;
        let report = coh.gysin_report();
        let violations = report.violations();
        if !violations.is_empty() {
            anyhow::bail!(charrank_core::Error::Inconsistent(violations.join("; ")));
        }
        if self.json {
            return emit_json("betti", &report).map(|_| 0);
        }
        print_betti(&report)?;
        Ok(0)
    }

    fn charrank(&self, a: &ContextArgs, cap: Option<u32>) -> Result<u8> {
        let coh = self.cohomology(a)?;
        let result = charrank_oriented(&coh, cap)?;
        let code = match (result.value, result.agrees) {
            (CharrankValue::AtLeast(_), _) => EXIT_CAPPED,
            (_, false) => EXIT_VERIFY_FAILED,
            _ => 0,
        };
        if self.json {
            emit_json("charrank", &result)?;
            return Ok(code);
        }
        let value = match result.value {
            CharrankValue::Exact(v) => format!("{v}"),
            CharrankValue::AtLeast(v) => format!(">= {v} (scan capped)"),
        };
        out!("charrank(G~({},{})) = {value}", a.n, a.k);
        out!(
            "closed form: {}{}",
            describe_prediction(result.prediction),
            match result.prediction {
                Prediction::NotCovered => "",
                _ if result.agrees => ", agrees",
                _ if !result.value.is_exact() => ", not decided by the capped scan",
                _ => ", DISAGREES",
            }
        );
        if result.odd_n_manifold_note {
            out!(
                "n is odd: this is also the characteristic rank of the manifold G~({},{})",
                a.n,
                a.k
            );
        }
        Ok(code)
    }

    fn cup(&self, a: &ContextArgs, budget: usize) -> Result<u8> {
        let coh = self.cohomology(a)?;
        let charrank = charrank_oriented(&coh, None)?;
        let lower = cup_lower_sw(&coh, budget);
        let capped = lower.search_capped;
        let report = cup_upper(&coh, &charrank)?.with_lower(lower);
        let code = if capped { EXIT_CAPPED } else { 0 };
        if self.json {
            emit_json("cup", &report)?;
            return Ok(code);
        }
        out!("cup(G~({},{})), d = {}", a.n, a.k, report.d);
        out!(
            "upper bound: {} (charrank j = {}{}, r = {})",
            report.upper,
            report.j_used,
            if report.j_exact { "" } else { ", scan capped" },
            report.r_used
        );
        if let Some(closed) = report.closed_form_upper {
            out!("closed-form bound: {closed}");
        }
        if let Some(lower) = &report.lower {
            out!(
                "lower bound from Stiefel-Whitney monomials: {}{}{}",
                lower.value,
                lower
                    .witness
                    .as_ref()
                    .map(|w| format!(" ({w})"))
                    .unwrap_or_default(),
                if lower.search_capped {
                    format!(", search capped after {} monomials", lower.tested)
                } else {
                    String::new()
                }
            );
        }
        if let Some(exact) = report.exact {
            out!("cup length = {exact}");
        } else if let Some(known) = report.known_exact {
            out!(
                "known cup length = {known}; it needs a class outside the image of p*, so only the upper bound is certified here"
            );
        }
        Ok(code)
    }

    fn verify(&self, a: &VerifyArgs) -> Result<u8> {
        let opts = SuiteOptions {
            hi: a.hi,
            t_max: a.t_max,
            frobenius_samples: a.samples,
            seed: a.seed,
            timing: a.timing,
            ..SuiteOptions::default()
        };
        let report = run_suite(a.suite.into(), &opts)?;
        let code = if report.passed() {
            0
        } else {
            EXIT_VERIFY_FAILED
        };
        if self.json {
            emit_json("verify", &report)?;
        } else {
            print_suite(&report)?;
        }
        Ok(code)
    }
}

fn reduction_name(k: usize, killed: &[usize]) -> &'static str {
    match (k, killed) {
        (_, []) => "wbar",
        (_, [1]) => "g",
        (4, [1, 2, 3]) => "z",
        (5, [1, 2, 3]) => "h",
        _ => "r",
    }
}

fn describe_prediction(p: Prediction) -> String {
    match p {
        Prediction::Exact(v) => format!("exactly {v}"),
        Prediction::LowerBound(v) => format!("at least {v}"),
        Prediction::NotCovered => "none for this (n,k)".into(),
    }
}

fn print_betti(report: &GysinReport) -> io::Result<()> {
    let ctx = report.context;
    out!(
        "G({},{}) and G~({},{}), d = {}",
        ctx.n(),
        ctx.k(),
        ctx.n(),
        ctx.k(),
        ctx.dim()
    );
    out!(
        "{:>4} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "j",
        "dim_G",
        "rank_w1",
        "ker",
        "coker",
        "dim_G~"
    );
    for r in &report.rows {
        out!(
            "{:>4} {:>8} {:>8} {:>8} {:>8} {:>8}",
            r.j,
            r.dim_g,
            r.w1_rank,
            r.ker,
            r.coker,
            r.dim_oriented
        );
    }
    out!(
        "total: dim H*(G) = {}, dim H*(G~) = {}",
        report.total_dim_g(),
        report.total_dim_oriented()
    );
    out!("r(G~) = {}", report.r_oriented);
    Ok(())
}

fn print_suite(report: &SuiteReport) -> io::Result<()> {
    for c in &report.checks {
        out!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if !report.rows.is_empty() {
        out!();
        out!(
            "{:>4} {:>2} {:>12} {:>10} {:>6} {:>2} {:>5} {:>6} {:>5}{}",
            "n",
            "k",
            "predicted",
            "computed",
            "agrees",
            "r",
            "upper",
            "closed",
            "lower",
            if report.rows.iter().any(|r| r.elapsed_ms.is_some()) {
                "      ms"
            } else {
                ""
            }
        );
        let opt = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
        for r in &report.rows {
            let predicted = match r.predicted {
                Prediction::Exact(v) => format!("= {v}"),
                Prediction::LowerBound(v) => format!(">= {v}"),
                Prediction::NotCovered => "-".into(),
            };
            let computed = match r.computed {
                CharrankValue::Exact(v) => format!("{v}"),
                CharrankValue::AtLeast(v) => format!(">= {v}"),
            };
            out!(
                "{:>4} {:>2} {:>12} {:>10} {:>6} {:>2} {:>5} {:>6} {:>5}{}",
                r.n,
                r.k,
                predicted,
                computed,
                if r.agrees { "yes" } else { "NO" },
                r.r_oriented,
                opt(r.cup_upper),
                opt(r.cup_closed_form),
                opt(r.cup_lower),
                r.elapsed_ms
                    .map(|ms| format!(" {ms:>7}"))
                    .unwrap_or_default()
            );
        }
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out!();
    out!(
        "suite {}: {}",
        report.suite,
        if failed == 0 {
            format!("all {} checks passed", report.checks.len())
        } else {
            format!("{failed} of {} checks FAILED", report.checks.len())
        }
    );
    Ok(())
}

/// A closed stdout (`charrank ... | head`) ends the run quietly.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<io::Error>()
            .map(io::Error::kind)
            .or_else(|| {
                e.downcast_ref::<serde_json::Error>()
                    .and_then(|e| e.io_error_kind())
            })
            == Some(io::ErrorKind::BrokenPipe)
    })
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<charrank_core::Error>() {
        Some(e) if e.is_usage() => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .target(env_logger::Target::Stderr)
        .init();

    let app = App {
        json: cli.json,
        cache: if cli.no_cache {
            None
        } else {
            CacheDir::resolve(cli.cache_dir)
        },
    };
    match app.run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(exit_code_for(&err))
        }
    }
}
