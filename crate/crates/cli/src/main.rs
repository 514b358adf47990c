//! `conftc`: Betti numbers, tori certificates and topological complexity of
//! disk configurations in a strip.
//!
//! Exit codes: 0 success, 1 usage or invalid parameters, 2 resource limit,
//! 3 verification failure.

mod cache;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use conftc::certificates::{verify_certificate, ChainPolicy, VerifyOptions};
use conftc::chains::{Budget, ChainComplexF2, DEFAULT_MEMORY_BUDGET};
use conftc::cohomology::evaluate_witness;
use conftc::symbols::{enumerate_cells, ComplexParams};
use conftc::tc_report::{reference_values, tc_report, Space, TcOptions};
use conftc::Error;

use cache::{BettiReport, Cache, CONVENTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    /// Wheel-basis checks only.
    Symbolic,
    /// Require the F2 chain check.
    Chain,
    /// Symbolic and chain checks, both required.
    Both,
    /// Symbolic, plus the chain check in its default range.
    Auto,
}

#[derive(Debug, Parser)]
#[command(name = "conftc", version, about = "Homology and sequential topological complexity of disks in a strip")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Directory for cached Betti reports; caching is off when unset.
    #[arg(long, global = true, env = "CONFTC_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Memory budget for building complexes, in bytes (K/M/G suffixes allowed).
    #[arg(long, global = true, env = "CONFTC_MEMORY_BUDGET", value_parser = parse_bytes)]
    memory_budget: Option<u64>,

    /// Worker thread hint.
    #[arg(long, global = true, env = "CONFTC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Betti numbers of cell(n, w).
    Betti {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
    },
    /// Cell counts per dimension and the dimension formula check.
    Cells {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
    },
    /// Build and verify the disjoint tori pair.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_enum, default_value = "auto")]
        verify: VerifyMode,
    },
    /// TC_r and dTC_r with their bounds.
    Tc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Confirm the homotopy dimension from the complex's Betti numbers.
        #[arg(long)]
        check_hdim: bool,
    },
    /// Evaluate the zero-divisor product on the torus fundamental class.
    Witness {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Tabulated values: F(n,m), conf(n,w) or uconf(n,2).
    Reference {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Run the full verification grid and print a summary.
    VerifyAll,
}

fn parse_bytes(text: &str) -> Result<u64, String> {
    let text = text.trim();
    let (digits, scale) = match text.chars().last() {
        Some('K' | 'k') => (&text[..text.len() - 1], 1u64 << 10),
        Some('M' | 'm') => (&text[..text.len() - 1], 1 << 20),
        Some('G' | 'g') => (&text[..text.len() - 1], 1 << 30),
        _ => (text, 1),
    };
    let value: u64 = digits.parse().map_err(|_| format!("invalid byte count {text:?}"))?;
    match value.checked_mul(scale) {
        Some(0) | None => Err(format!("budget must be positive, got {text:?}")),
        Some(v) => Ok(v),
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit { .. } => 2,
            Error::Construction(_) | Error::DegreeMismatch { .. } => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub(crate) struct RunConfig {
    format: Format,
    budget: Budget,
    cache: Option<Cache>,
}

fn emit<T: Serialize>(config: &RunConfig, value: &T, table: impl FnOnce() -> String) {
    match config.format {
        Format::Json => println!("{}", serde_json::to_string(value).expect("report serializes")),
        Format::Table => print!("{}", table()),
    }
}

fn params(n: usize, w: usize) -> Result<ComplexParams, Failure> {
    Ok(ComplexParams::new(n, w)?)
}

pub(crate) fn compute_betti(config: &RunConfig, n: usize, w: usize) -> Result<BettiReport, Failure> {
    let p = params(n, w)?;
    if let Some(hit) = config.cache.as_ref().and_then(|c| c.load(n, w)) {
        return Ok(BettiReport { cached: true, ..hit });
    }
    let start = Instant::now();
    let complex = ChainComplexF2::build_with_budget(p, config.budget)?;
    let report = BettiReport {
        n,
        w,
        betti: complex.betti(),
        cells: complex.cell_counts(),
        euler: complex.euler_characteristic(),
        top_dimension: complex.top_dimension(),
        convention: CONVENTION.to_string(),
        elapsed_ms: start.elapsed().as_millis(),
        cached: false,
    };
    if let Some(cache) = &config.cache {
        if let Err(e) = cache.store(&report) {
            eprintln!("warning: could not write cache: {e}");
        }
    }
    Ok(report)
}

fn cmd_betti(config: &RunConfig, n: usize, w: usize) -> Result<(), Failure> {
    let report = compute_betti(config, n, w)?;
    emit(config, &report, || {
        format!(
            "cell({n},{w})\n  cells  {:?}\n  betti  {:?}\n  euler  {}\n  time   {} ms{}\n",
            report.cells,
            report.betti,
            report.euler,
            report.elapsed_ms,
            if report.cached { " (cached)" } else { "" }
        )
    });
    Ok(())
}

#[derive(Serialize)]
struct CellsReport {
    n: usize,
    w: usize,
    cells: Vec<usize>,
    top_dimension: usize,
    formula: usize,
    formula_holds: bool,
}

fn cmd_cells(config: &RunConfig, n: usize, w: usize) -> Result<(), Failure> {
    let p = params(n, w)?;
    let total: u64 = (0..n).map(|d| p.cell_count(d) * 16).sum();
    if total > config.budget.memory_bytes {
        return Err(Error::ResourceLimit {
            dimension: 0,
            cells: (0..n).map(|d| p.cell_count(d)).sum(),
            estimated_bytes: total,
            budget_bytes: config.budget.memory_bytes,
        }
        .into());
    }
    let cells: Vec<usize> = (0..n).map(|d| enumerate_cells(&p, d).len()).collect();
    let top = cells.iter().rposition(|&c| c > 0).unwrap_or(0);
    let cells = cells[..=top].to_vec();
    let report = CellsReport {
        n,
        w,
        top_dimension: top,
        formula: p.top_dimension(),
        formula_holds: top == p.top_dimension(),
        cells,
    };
    emit(config, &report, || {
        format!(
            "cell({n},{w})\n  cells          {:?}\n  top dimension  {}\n  n - ceil(n/w)  {}\n",
            report.cells, report.top_dimension, report.formula
        )
    });
    if report.formula_holds {
        Ok(())
    } else {
        Err(Failure::verification("top dimension differs from n - ceil(n/w)"))
    }
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    #[serde(flatten)]
    report: &'a conftc::certificates::CertificateReport,
    r: usize,
    lower_bound: Option<usize>,
    image_a: Vec<Vec<conftc::wheels::H1Term>>,
    image_b: Vec<Vec<conftc::wheels::H1Term>>,
}

fn cmd_certify(config: &RunConfig, n: usize, w: usize, r: usize, mode: VerifyMode) -> Result<(), Failure> {
    let p = params(n, w)?;
    if r < 2 {
        return Err(Failure::usage("r must be at least 2"));
    }
    let chain = match mode {
        VerifyMode::Symbolic => ChainPolicy::Never,
        VerifyMode::Chain | VerifyMode::Both => ChainPolicy::Always,
        VerifyMode::Auto => ChainPolicy::Auto,
    };
    let report = verify_certificate(
        p,
        VerifyOptions {
            chain,
            budget: config.budget,
        },
    )?;
    let out = CertifyOutput {
        report: &report,
        r,
        lower_bound: report.lower_bound(r),
        image_a: report.image_a.iter().map(|v| v.to_terms()).collect(),
        image_b: report.image_b.iter().map(|v| v.to_terms()).collect(),
    };
    emit(config, &out, || {
        let mut s = format!("certificate for conf({n},{w})\n");
        s += &format!("  A = {}  (m = {})\n", report.pair.a, report.pair.m);
        s += &format!("  B = {}  (l = {})\n", report.pair.b, report.pair.l);
        s += &format!("  decomposable A      {}\n", report.decomposable_a);
        s += &format!("  decomposable B      {}\n", report.decomposable_b);
        s += &format!("  disjoint (symbolic) {}\n", report.disjoint_symbolic);
        s += &format!("  disjoint (chain)    {:?}\n", report.disjoint_chain);
        if let Some(p) = report.projection_check {
            s += &format!("  projection check    {p}\n");
        }
        s += &format!("  lower bound (r={r})  {:?}\n", out.lower_bound);
        s
    });
    let symbolic_ok = report.passed();
    let chain_ok = report.disjoint_chain.passed();
    let ok = match mode {
        VerifyMode::Symbolic | VerifyMode::Auto => symbolic_ok,
        VerifyMode::Chain => chain_ok == Some(true) && report.consistent,
        VerifyMode::Both => symbolic_ok && chain_ok == Some(true),
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::verification(format!("certificate for conf({n},{w}) failed")))
    }
}

fn cmd_tc(config: &RunConfig, n: usize, w: usize, r: usize, check_hdim: bool) -> Result<(), Failure> {
    let options = TcOptions {
        verify: VerifyOptions {
            chain: ChainPolicy::Never,
            budget: config.budget,
        },
        check_hdim,
    };
    let (report, _) = tc_report(n, w, r, options)?;
    emit(config, &report, || {
        let mut s = format!("conf({n},{w}), r = {r}  [{}]\n", report.case);
        s += &format!("  hdim        {}\n", report.hdim);
        s += &format!("  upper       {}\n", report.upper_bgrt);
        s += &format!("  lower tori  {}\n", report.lower_tori);
        s += &format!("  TC_r        {}\n", report.tc);
        s += &format!("  dTC_r       {}\n", report.dtc);
        for p in &report.provenance {
            s += &format!("  - {p}\n");
        }
        if let Some(g) = &report.gap_note {
            s += &format!("  gap: {g}\n");
        }
        s
    });
    Ok(())
}

fn cmd_witness(config: &RunConfig, m: usize, l: usize, r: usize) -> Result<(), Failure> {
    let report = evaluate_witness(m, l, r)?;
    emit(config, &report, || {
        format!(
            "witness m = {m}, l = {l}, r = {r}\n  value            {}\n  factors          {}\n  surviving terms  {}\n  verified         {}\n",
            report.value, report.factors, report.surviving_terms, report.verified
        )
    });
    if report.verified {
        Ok(())
    } else {
        Err(Failure::verification(format!("witness evaluated to {}", report.value)))
    }
}

fn cmd_reference(config: &RunConfig, space: &str, r: usize) -> Result<(), Failure> {
    let space: Space = space.parse()?;
    let values = reference_values(space, r)?;
    emit(config, &values, || {
        values
            .iter()
            .map(|v| format!("{} {}  {} = {}  [{}]\n", v.space, v.r, v.invariant, v.value, v.citation))
            .collect()
    });
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        // a second initialisation in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let config = RunConfig {
        format: cli.format,
        budget: Budget {
            memory_bytes: cli.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET),
        },
        cache: cli.cache_dir.as_deref().and_then(|dir| {
            let cache = Cache::open(dir);
            if cache.is_none() {
                eprintln!("warning: cache dir {} is not writable; caching disabled", dir.display());
            }
            cache
        }),
    };
    match cli.command {
        Command::Betti { n, w } => cmd_betti(&config, n, w),
        Command::Cells { n, w } => cmd_cells(&config, n, w),
        Command::Certify { n, w, r, verify } => cmd_certify(&config, n, w, r, verify),
        Command::Tc { n, w, r, check_hdim } => cmd_tc(&config, n, w, r, check_hdim),
        Command::Witness { m, l, r } => cmd_witness(&config, m, l, r),
        Command::Reference { space, r } => cmd_reference(&config, &space, r),
        Command::VerifyAll => grid::verify_all(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
