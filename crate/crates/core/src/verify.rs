//! Spectral-versus-tile verification runs over enumerated or sampled sets.
//!
//! Work is split into shards that share nothing: an `(x_1, x_2)` prefix of
//! the tuple stream, or a block of seeded random draws. Workers evaluate
//! shards independently and a single aggregator collects the records, so
//! results do not depend on thread count or completion order. Completed
//! shards are appended to an optional JSONL checkpoint, rewritten atomically,
//! which a later run with the same identity resumes from.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{sample_tuple, shards, CaseSpec, ShardKey, Tuples, X1Slice};
use crate::par::Execution;
use crate::spectile::{check_equivalence, is_spectrum, is_tiling_partner};

/// Random draws per sample shard.
pub const SAMPLE_SHARD_SIZE: u64 = 5_000;

/// Cap on per-shard timing samples kept for the median.
const TIMING_CAP: usize = 8_192;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },
    #[error("checkpoint {path} belongs to a different run ({found}), expected {expected}")]
    CheckpointMismatch { path: PathBuf, found: String, expected: String },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every tuple of the (possibly sliced) stream.
    Full { slice: String },
    /// Uniform random tuples, pruning rules not applied.
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub case: CaseSpec,
    pub mode: Mode,
    pub execution: Execution,
    pub checkpoint: Option<PathBuf>,
    /// Stop once this many new shards have completed, as if killed.
    pub stop_after_shards: Option<usize>,
}

impl VerifyOptions {
    pub fn full(case: CaseSpec) -> Self {
        VerifyOptions {
            case,
            mode: Mode::Full { slice: "x1=all".into() },
            execution: Execution::default(),
            checkpoint: None,
            stop_after_shards: None,
        }
    }

    pub fn sample(case: CaseSpec, count: u64, seed: u64) -> Self {
        VerifyOptions { mode: Mode::Sample { count, seed }, ..Self::full(case) }
    }
}

/// Identity of a run; a checkpoint is only resumed by a run with the same one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunIdentity {
    pub case: CaseSpec,
    pub mode: Mode,
}

impl RunIdentity {
    fn describe(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub tuple: Vec<u32>,
    pub spectral: bool,
    pub tile: bool,
}

/// One line of the report: a shard, or the `summary` of all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardRecord {
    pub case: String,
    pub shard: String,
    pub examined: u64,
    pub spectral: u64,
    pub tile: u64,
    pub agree: u64,
    pub failures: Vec<Failure>,
    pub elapsed_ms: f64,
    pub median_us: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub identity: RunIdentity,
    /// Completed shards in shard order.
    pub shards: Vec<ShardRecord>,
    pub summary: ShardRecord,
    /// Shards taken from the checkpoint rather than recomputed.
    pub resumed: usize,
    /// Shards still to do; zero for a finished run.
    pub remaining: usize,
    /// Last completed shard in shard order.
    pub last_shard: Option<String>,
    /// Witnesses rechecked by this run, and how many failed the recheck.
    pub witnesses_checked: u64,
    pub witness_failures: u64,
}

impl VerifyReport {
    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    pub fn passed(&self) -> bool {
        self.summary.failures.is_empty() && self.witness_failures == 0
    }

    /// Shard records followed by the summary, one JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.shards.iter().chain(std::iter::once(&self.summary)) {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Shard {
    Prefix(ShardKey),
    Draws { index: u64, count: u64, seed: u64 },
}

impl Shard {
    fn id(&self) -> String {
        match self {
            Shard::Prefix(k) => k.id(),
            Shard::Draws { index, .. } => format!("sample-{index:05}"),
        }
    }
}

fn plan(opts: &VerifyOptions) -> Vec<Shard> {
    match &opts.mode {
        Mode::Full { slice } => {
            let slice = X1Slice::parse(slice).unwrap_or(X1Slice::All);
            shards(opts.case, &slice).into_iter().map(Shard::Prefix).collect()
        }
        Mode::Sample { count, seed } => (0..count.div_ceil(SAMPLE_SHARD_SIZE))
            .map(|index| Shard::Draws {
                index,
                count: SAMPLE_SHARD_SIZE.min(count - index * SAMPLE_SHARD_SIZE),
                seed: *seed,
            })
            .collect(),
    }
}

/// Median by decimation: when the buffer fills, every other sample is
/// dropped and the stride doubles. Deterministic and bounded.
struct Timings {
    kept: Vec<u32>,
    stride: u64,
    seen: u64,
}

impl Timings {
    fn new() -> Self {
        Timings { kept: Vec::with_capacity(TIMING_CAP), stride: 1, seen: 0 }
    }

    fn push(&mut self, nanos: u32) {
        if self.seen.is_multiple_of(self.stride) {
            if self.kept.len() == TIMING_CAP {
                let mut i = 0;
                self.kept.retain(|_| {
                    i += 1;
                    i % 2 == 1
                });
                self.stride *= 2;
            }
            if self.seen.is_multiple_of(self.stride) {
                self.kept.push(nanos);
            }
        }
        self.seen += 1;
    }

    fn median_us(mut self) -> f64 {
        if self.kept.is_empty() {
            return 0.0;
        }
        let mid = self.kept.len() / 2;
        let (_, m, _) = self.kept.select_nth_unstable(mid);
        round3(f64::from(*m) / 1000.0)
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

struct ShardOutcome {
    record: ShardRecord,
    witnesses: u64,
    witness_failures: u64,
}

fn run_shard(case: &CaseSpec, label: &str, shard: &Shard) -> ShardOutcome {
    let start = Instant::now();
    let mut rec = ShardRecord {
        case: label.to_string(),
        shard: shard.id(),
        examined: 0,
        spectral: 0,
        tile: 0,
        agree: 0,
        failures: Vec::new(),
        elapsed_ms: 0.0,
        median_us: 0.0,
    };
    let mut timings = Timings::new();
    let (mut witnesses, mut witness_failures) = (0, 0);
    let mut visit = |tuple: Vec<u32>| {
        let e = case.subset(&tuple);
        let t0 = Instant::now();
        let r = check_equivalence(&e);
        timings.push(t0.elapsed().as_nanos().min(u128::from(u32::MAX)) as u32);
        rec.examined += 1;
        rec.spectral += u64::from(r.spectral.holds);
        rec.tile += u64::from(r.tile.holds);
        if r.agree() {
            rec.agree += 1;
        } else {
            rec.failures.push(Failure { tuple, spectral: r.spectral.holds, tile: r.tile.holds });
        }
        if let Some(b) = &r.spectral.witness {
            witnesses += 1;
            witness_failures += u64::from(!is_spectrum(&e, b));
        }
        if let Some(t) = &r.tile.witness {
            witnesses += 1;
            witness_failures += u64::from(!is_tiling_partner(&e, t));
        }
    };
    match shard {
        Shard::Prefix(key) => Tuples::in_shard(*case, key).for_each(&mut visit),
        Shard::Draws { index, count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            rng.set_stream(*index);
            for _ in 0..*count {
                visit(sample_tuple(case, &mut rng));
            }
        }
    }
    rec.elapsed_ms = round3(start.elapsed().as_secs_f64() * 1000.0);
    rec.median_us = timings.median_us();
    ShardOutcome { record: rec, witnesses, witness_failures }
}

/// Examined-weighted median of per-shard medians.
fn weighted_median(records: &[ShardRecord]) -> f64 {
    let mut pairs: Vec<(f64, u64)> = records.iter().map(|r| (r.median_us, r.examined)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: u64 = pairs.iter().map(|p| p.1).sum();
    let mut acc = 0;
    for (m, w) in pairs {
        acc += w;
        if 2 * acc >= total {
            return m;
        }
    }
    0.0
}

fn summarize(label: &str, records: &[ShardRecord], elapsed_ms: f64) -> ShardRecord {
    ShardRecord {
        case: label.to_string(),
        shard: "summary".into(),
        examined: records.iter().map(|r| r.examined).sum(),
        spectral: records.iter().map(|r| r.spectral).sum(),
        tile: records.iter().map(|r| r.tile).sum(),
        agree: records.iter().map(|r| r.agree).sum(),
        failures: records.iter().flat_map(|r| r.failures.iter().cloned()).collect(),
        elapsed_ms: round3(elapsed_ms),
        median_us: weighted_median(records),
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    run: RunIdentity,
}

fn read_checkpoint(path: &Path, identity: &RunIdentity) -> Result<Vec<ShardRecord>, VerifyError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => {
            return Err(VerifyError::Checkpoint { path: path.into(), message: e.to_string() });
        }
    };
    let bad = |message: String| VerifyError::Checkpoint { path: path.into(), message };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let Some(first) = lines.next() else { return Ok(Vec::new()) };
    let header: CheckpointHeader =
        serde_json::from_str(first).map_err(|e| bad(format!("bad header: {e}")))?;
    if header.run != *identity {
        return Err(VerifyError::CheckpointMismatch {
            path: path.into(),
            found: header.run.describe(),
            expected: identity.describe(),
        });
    }
    lines
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| bad(format!("record {}: {e}", i + 1))))
        .collect()
}

fn write_checkpoint(path: &Path, identity: &RunIdentity, done: &BTreeMap<usize, ShardRecord>) -> Result<(), VerifyError> {
    let io = |source| VerifyError::Io { path: path.into(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    let header = CheckpointHeader { run: identity.clone() };
    writeln!(tmp, "{}", serde_json::to_string(&header).expect("header serializes")).map_err(io)?;
    for r in done.values() {
        writeln!(tmp, "{}", serde_json::to_string(r).expect("records serialize")).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Runs (or resumes) a verification and returns the aggregated report.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let start = Instant::now();
    // Random draws ignore the pruning rules; say so in the records.
    let case = match opts.mode {
        Mode::Sample { .. } => CaseSpec { heuristics: false, ..opts.case },
        Mode::Full { .. } => opts.case,
    };
    let identity = RunIdentity { case, mode: opts.mode.clone() };
    let label = case.to_string();
    let planned = plan(opts);
    let index_of: BTreeMap<String, usize> = planned.iter().enumerate().map(|(i, s)| (s.id(), i)).collect();

    let mut done: BTreeMap<usize, ShardRecord> = BTreeMap::new();
    if let Some(path) = &opts.checkpoint {
        for rec in read_checkpoint(path, &identity)? {
            let Some(&i) = index_of.get(&rec.shard) else {
                return Err(VerifyError::Checkpoint {
                    path: path.clone(),
                    message: format!("unknown shard {:?}", rec.shard),
                });
            };
            done.insert(i, rec);
        }
    }
    let resumed = done.len();
    let todo: Vec<(usize, Shard)> =
        planned.iter().cloned().enumerate().filter(|(i, _)| !done.contains_key(i)).collect();

    let started = AtomicUsize::new(0);
    let limit = opts.stop_after_shards.unwrap_or(usize::MAX);
    let (tx, rx) = mpsc::channel::<(usize, ShardOutcome)>();
    let mut witnesses = 0;
    let mut witness_failures = 0;
    let mut write_error = None;

    std::thread::scope(|scope| {
        let aggregator = scope.spawn(|| {
            for (i, outcome) in rx {
                witnesses += outcome.witnesses;
                witness_failures += outcome.witness_failures;
                done.insert(i, outcome.record);
                if let (Some(path), None) = (&opts.checkpoint, &write_error) {
                    if let Err(e) = write_checkpoint(path, &identity, &done) {
                        write_error = Some(e);
                    }
                }
            }
        });
        opts.execution.for_each(&todo, |(i, shard)| {
            if started.fetch_add(1, Ordering::SeqCst) >= limit {
                return;
            }
            let outcome = run_shard(&case, &label, shard);
            let _ = tx.send((*i, outcome));
        });
        drop(tx);
        aggregator.join().expect("aggregator thread");
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    let shards: Vec<ShardRecord> = done.values().cloned().collect();
    let summary = summarize(&label, &shards, start.elapsed().as_secs_f64() * 1000.0);
    Ok(VerifyReport {
        remaining: planned.len() - shards.len(),
        last_shard: done.keys().next_back().map(|&i| planned[i].id()),
        identity,
        shards,
        summary,
        resumed,
        witnesses_checked: witnesses,
        witness_failures,
    })
}
