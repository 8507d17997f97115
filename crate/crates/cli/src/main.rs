use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fuglede_core::catalog::{
    expected_class_count, fetch_order, load_local_file, CatalogConfig, HttpFetcher, Origin,
};
use fuglede_core::enumerate::{count_enumeration, CaseSpec, Tuples, X1Slice};
use fuglede_core::gf2::{rank_report, RankOptions, SignMatrix, RANK_BOUND};
use fuglede_core::par::Execution;
use fuglede_core::spectile::{check_equivalence, Subset};
use fuglede_core::verify::{verify, Mode, VerifyOptions, VerifyReport};

/// Exit status when a checked property is violated (as opposed to bad input).
const VIOLATION: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "fuglede", version, about = "Hadamard catalog ranks and spectral/tile checks over Z_2^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download (or copy from the vendored fixtures) the catalog of one order.
    Fetch(FetchArgs),
    /// Dephased GF(2) ranks of catalog matrices.
    Rank(RankArgs),
    /// Decide spectrality and tiling for one subset.
    Check(CheckArgs),
    /// Check spectral <=> tile over enumerated or sampled subsets.
    Verify(VerifyArgs),
    /// Stream or count the candidate tuples of a case.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Clone)]
struct CatalogArgs {
    /// Cache root [env: FUGLEDE_CACHE_DIR, default ~/.cache/fuglede]
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Remote library base URL [env: FUGLEDE_CATALOG_URL]
    #[arg(long)]
    base_url: Option<String>,
    /// Vendored catalog copies [env: FUGLEDE_FIXTURES_DIR]
    #[arg(long)]
    fixtures_dir: Option<PathBuf>,
    /// Skip cache and fixtures and download from the remote library.
    #[arg(long, conflicts_with = "offline")]
    remote: bool,
    /// Never touch the network.
    #[arg(long)]
    offline: bool,
    /// Remote file names to fetch instead of reading the index page.
    #[arg(long = "file", value_name = "NAME")]
    files: Vec<String>,
}

impl CatalogArgs {
    fn config(&self) -> CatalogConfig {
        let mut cfg = CatalogConfig::from_env();
        if let Some(dir) = &self.cache_dir {
            cfg.cache_dir = dir.clone();
        }
        if let Some(url) = &self.base_url {
            cfg.base_url = url.clone();
        }
        if let Some(dir) = &self.fixtures_dir {
            cfg.fixtures_dir = Some(dir.clone());
        }
        if self.remote {
            cfg.use_cache = false;
            cfg.use_vendored = false;
        }
        cfg.allow_network = !self.offline;
        if !self.files.is_empty() {
            cfg.files = Some(self.files.clone());
        }
        cfg
    }
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long)]
    order: usize,
    #[command(flatten)]
    catalog: CatalogArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Jsonl,
}

#[derive(Args)]
struct RankArgs {
    /// Catalog orders to rank (fetched or cached as needed).
    #[arg(long = "order")]
    orders: Vec<usize>,
    /// Local `+`/`-` matrix files.
    #[arg(value_name = "FILE")]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Skip the Hadamard property check.
    #[arg(long)]
    no_validate: bool,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    catalog: CatalogArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Dimension d of Z_2^d.
    #[arg(short, long)]
    dim: u32,
    /// Comma-separated elements as integers, coordinate 1 most significant.
    #[arg(value_delimiter = ',', num_args = 1..)]
    points: Vec<u32>,
}

#[derive(Args)]
struct CaseArgs {
    /// Dimension d of Z_2^d.
    #[arg(short, long)]
    dim: u32,
    /// Size of the subsets.
    #[arg(short, long)]
    size: usize,
    /// Apply the coordinate-symmetry pruning rules (default: only for d=6, size 16).
    #[arg(long, overrides_with = "no_heuristics")]
    heuristics: bool,
    #[arg(long, overrides_with = "heuristics")]
    no_heuristics: bool,
}

impl CaseArgs {
    fn spec(&self) -> Result<CaseSpec> {
        let mut spec = CaseSpec::new(self.dim, self.size)?;
        if self.heuristics {
            spec.heuristics = true;
        }
        if self.no_heuristics {
            spec.heuristics = false;
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// JSONL checkpoint; completed shards recorded there are skipped.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Check this many uniform random tuples instead of the whole stream.
    #[arg(long, conflicts_with = "full")]
    sample: Option<u64>,
    #[arg(long, default_value_t = 1, requires = "sample")]
    seed: u64,
    /// Run the complete stream (required for size 16 unless sampling).
    #[arg(long)]
    full: bool,
    /// Restrict the stream to an x1 range, e.g. x1=first or x1=3..15.
    #[arg(long, conflicts_with = "sample")]
    slice: Option<String>,
    /// Write per-shard and summary records as JSONL (`-` for stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Stop after this many shards, leaving the rest to a resumed run.
    #[arg(long, hide = true)]
    stop_after_shards: Option<usize>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long)]
    count_only: bool,
    /// x1=first, x1=<word> or x1=<a>..<b>
    #[arg(long)]
    slice: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fetch(a) => cmd_fetch(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Check(a) => cmd_check(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Enumerate(a) => cmd_enumerate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn cmd_fetch(a: FetchArgs) -> Result<ExitCode> {
    let cfg = a.catalog.config();
    let out = fetch_order(a.order, &cfg, &HttpFetcher)?;
    let n = out.entries.len();
    match out.origin {
        Origin::Cache => println!("cache hit: {n} matrices of order {} in {}", a.order, cfg.cache_dir.display()),
        Origin::Vendored => println!("{n} matrices cached (from vendored fixtures)"),
        Origin::Remote => println!("{n} matrices cached (from {})", cfg.base_url),
    }
    if let Some(expected) = out.missing_classes() {
        eprintln!(
            "warning: order {} has {expected} equivalence classes; this catalog copy holds {n}",
            a.order
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rank(a: RankArgs) -> Result<ExitCode> {
    if a.orders.is_empty() && a.inputs.is_empty() {
        bail!("give --order and/or matrix files");
    }
    let cfg = CatalogConfig { validate: !a.no_validate, ..a.catalog.config() };
    let mut inputs: Vec<(String, SignMatrix)> = Vec::new();
    for &order in &a.orders {
        let out = fetch_order(order, &cfg, &HttpFetcher)?;
        if let Some(expected) = out.missing_classes() {
            eprintln!(
                "warning: order {order} has {expected} equivalence classes; ranking the {} available",
                out.entries.len()
            );
        }
        inputs.extend(out.entries.into_iter().map(|e| (e.class_label, e.matrix)));
    }
    for path in &a.inputs {
        let entries = load_local_file(path, !a.no_validate)?;
        inputs.extend(entries.into_iter().map(|e| (e.class_label, e.matrix)));
    }
    let opts = RankOptions { validate: !a.no_validate, execution: Execution::from_jobs(a.jobs) };
    let report = rank_report(&inputs, opts)?;

    let mut out = io::stdout().lock();
    match a.format {
        Format::Jsonl => {
            for r in &report.records {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Table => {
            writeln!(out, "{:<40} {:>5} {:>5}", "source", "order", "rank")?;
            for r in &report.records {
                writeln!(out, "{:<40} {:>5} {:>5}", r.source_id, r.order, r.dephased_rank)?;
            }
            for s in &report.orders {
                let ranks: Vec<String> = s.distinct_ranks.iter().map(|r| r.to_string()).collect();
                let known = expected_class_count(s.order).map_or(String::new(), |n| format!(" of {n} classes"));
                writeln!(out, "order {}: {} matrices{known}, ranks {{{}}}", s.order, s.count, ranks.join(","))?;
            }
        }
    }
    for s in report.orders.iter().filter(|s| !s.is_uniform()) {
        eprintln!("warning: order {} matrices have differing ranks {:?}", s.order, s.distinct_ranks);
    }
    let pass = report.all_above(RANK_BOUND);
    for v in report.violations(RANK_BOUND) {
        eprintln!("violation: {} has dephased rank {} <= {RANK_BOUND}", v.source_id, v.dephased_rank);
    }
    if matches!(a.format, Format::Table) {
        writeln!(out, "all ranks > {RANK_BOUND}: {}", if pass { "PASS" } else { "FAIL" })?;
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(VIOLATION) })
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode> {
    let e = Subset::new(a.dim, a.points.iter().copied())?;
    let r = check_equivalence(&e);
    let show = |holds: bool, w: &Option<Subset>, what: &str| match w {
        Some(w) if holds => format!("yes ({what} {w})"),
        _ => "no".to_string(),
    };
    println!("set: {e} in Z_2^{}", a.dim);
    println!("spectral: {}", show(r.spectral.holds, &r.spectral.witness, "spectrum"));
    println!("tile: {}", show(r.tile.holds, &r.tile.witness, "tiling partner"));
    Ok(if r.agree() {
        ExitCode::SUCCESS
    } else {
        println!("spectral and tile disagree");
        ExitCode::from(VIOLATION)
    })
}

const VERIFY_CASES: [(u32, usize); 3] = [(5, 8), (6, 8), (6, 16)];

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let spec = a.case.spec()?;
    if !VERIFY_CASES.contains(&(spec.dim, spec.size)) {
        bail!("verify supports d=5 size 8, d=6 size 8 and d=6 size 16, not d={} size {}", spec.dim, spec.size);
    }
    let mode = match (a.sample, a.full) {
        (Some(count), _) => Mode::Sample { count, seed: a.seed },
        (None, full) => {
            if spec.size == 16 && !full && a.slice.is_none() {
                bail!("d=6 size 16 streams about 3e8 sets; pass --sample N, --slice or --full");
            }
            let slice = a.slice.clone().unwrap_or_else(|| "x1=all".into());
            X1Slice::parse(&slice)?;
            Mode::Full { slice }
        }
    };
    let opts = VerifyOptions {
        case: spec,
        mode,
        execution: Execution::from_jobs(a.jobs),
        checkpoint: a.checkpoint.clone(),
        stop_after_shards: a.stop_after_shards,
    };
    let report = verify(&opts)?;

    let to_stdout = a.report.as_deref().is_some_and(|p| p.as_os_str() == "-");
    match &a.report {
        Some(_) if to_stdout => print!("{}", report.to_jsonl()),
        Some(path) => fs::write(path, report.to_jsonl()).with_context(|| format!("writing {}", path.display()))?,
        None => {}
    }
    let summary = summary_text(&report);
    if to_stdout {
        eprint!("{summary}");
    } else {
        print!("{summary}");
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(VIOLATION) })
}

fn summary_text(r: &VerifyReport) -> String {
    let s = &r.summary;
    let mode = match &r.identity.mode {
        Mode::Full { slice } => format!("full stream ({slice})"),
        Mode::Sample { count, seed } => format!("{count} random tuples, seed {seed}"),
    };
    let mut out = format!("case {}: {mode}\n", s.case);
    out += &format!(
        "examined {}  spectral {}  tile {}  agree {}  failures {}\n",
        s.examined,
        s.spectral,
        s.tile,
        s.agree,
        s.failures.len()
    );
    out += &format!("elapsed {:.3} s, median {} us per set\n", s.elapsed_ms / 1000.0, s.median_us);
    if r.resumed > 0 {
        out += &format!("resumed {} shards from checkpoint\n", r.resumed);
    }
    if !r.is_complete() {
        out += &format!(
            "interrupted: {} of {} shards left (last completed {})\n",
            r.remaining,
            r.remaining + r.shards.len(),
            r.last_shard.as_deref().unwrap_or("none")
        );
    }
    for f in &s.failures {
        out += &format!("FAILURE tuple {:?}: spectral {} tile {}\n", f.tuple, f.spectral, f.tile);
    }
    out += &format!("witnesses rechecked {}  failed {}\n", r.witnesses_checked, r.witness_failures);
    out
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<ExitCode> {
    let spec = a.case.spec()?;
    let slice = match &a.slice {
        Some(s) => X1Slice::parse(s)?,
        None => X1Slice::All,
    };
    if a.count_only {
        println!("{}", count_enumeration(spec, &slice));
        return Ok(ExitCode::SUCCESS);
    }
    let mut out = io::BufWriter::new(io::stdout().lock());
    for t in Tuples::sliced(spec, slice.resolve(&spec)) {
        let words: Vec<String> = t.iter().map(u32::to_string).collect();
        if writeln!(out, "{}", words.join(",")).is_err() {
            // Closed pipe, e.g. `| head`.
            break;
        }
    }
    Ok(ExitCode::SUCCESS)
}
