//! Acceptance checks, one PASS/FAIL line each.
//!
//! Exits 0 regardless of the outcome so the rest of the workspace tests
//! still run; set `ACCEPTANCE_STRICT=1` to exit 1 when anything fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use fuglede_core::catalog::vendored_fixtures_dir;
use fuglede_core::enumerate::{
    count_enumeration, earlier_permutation, enumerate_tuples, passes_heuristics, sample_tuple, CaseSpec, Tuples,
    X1Slice,
};
use fuglede_core::oracle::{brute_is_spectral, brute_is_tile};
use fuglede_core::spectile::{is_spectral, is_tile, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const RANK_BOUND: usize = 6;
const CATALOG: [(usize, usize, usize); 3] = [(20, 3, 18), (24, 60, 11), (28, 487, 26)];
const PRUNING_BAND: (f64, f64) = (15.0, 60.0);
const SAMPLE_COUNT: u64 = 100_000;

type Verdict = Result<String, String>;
type Check = fn(&Ctx) -> Verdict;
/// Shard id with examined, spectral, tile and agree counts.
type ShardCounts = (String, u64, u64, u64, u64);

fn main() {
    let cache = tempfile::tempdir().expect("temp dir");
    let ctx = Ctx { cache: cache.path().to_path_buf(), witnesses: Default::default() };
    let checks: [(&str, Check); 9] = [
        ("1 dephased ranks 18/11/26 over 3/60/487 classes", ranks),
        ("2 catalog class counts 3/60/487", class_counts),
        ("3 small cases: d=5 size 8 (325 sets), d=6 size 8 (57 sets)", small_cases),
        ("4 d=6 size 16 sample of 1e5 tuples, zero failures", sampled_size_16),
        ("5 fast checks agree with the brute-force oracle", oracle_agreement),
        ("6 pruning rules only discard non-minimal tuples", heuristic_soundness),
        ("7 pruning factor in [15, 60]", pruning_factor),
        ("8 every witness passes an independent recheck", witness_validity),
        ("9 interrupted and resumed sample run matches", resume_determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let verdict = check(&ctx);
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS  {name}  [{detail}; {secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}  [{detail}; {secs:.1} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

struct Ctx {
    cache: PathBuf,
    /// Witness rechecks reported by the CLI runs: (checked, failed).
    witnesses: std::cell::Cell<(u64, u64)>,
}

impl Ctx {
    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_fuglede"))
            .args(args)
            .env("FUGLEDE_CACHE_DIR", &self.cache)
            .env_remove("FUGLEDE_FIXTURES_DIR")
            .output()
            .expect("run fuglede")
    }

    fn verify(&self, args: &[&str]) -> Result<Summary, String> {
        let out = self.run(&[&["verify"], args].concat());
        let text = String::from_utf8_lossy(&out.stdout);
        let summary = Summary::parse(&text).ok_or_else(|| {
            format!("unreadable verify output: {text} {}", String::from_utf8_lossy(&out.stderr))
        })?;
        let (c, f) = self.witnesses.get();
        self.witnesses.set((c + summary.witnesses.0, f + summary.witnesses.1));
        Ok(summary)
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Summary {
    examined: u64,
    spectral: u64,
    tile: u64,
    agree: u64,
    failures: u64,
    witnesses: (u64, u64),
}

impl Summary {
    fn parse(text: &str) -> Option<Summary> {
        let numbers = |prefix: &str| -> Option<Vec<u64>> {
            let line = text.lines().find(|l| l.starts_with(prefix))?;
            Some(line.split_whitespace().filter_map(|w| w.parse().ok()).collect())
        };
        let counts = numbers("examined ")?;
        let witnesses = numbers("witnesses rechecked ")?;
        match (counts.as_slice(), witnesses.as_slice()) {
            (&[examined, spectral, tile, agree, failures], &[checked, bad]) => Some(Summary {
                examined,
                spectral,
                tile,
                agree,
                failures,
                witnesses: (checked, bad),
            }),
            _ => None,
        }
    }
}

fn read_sign_matrix(path: &Path) -> Vec<Vec<i8>> {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().chars().map(|c| if c == '-' { -1 } else { 1 }).collect())
        .collect()
}

fn fixture_matrices(order: usize) -> Vec<(String, Vec<Vec<i8>>)> {
    let dir = vendored_fixtures_dir().join(format!("order-{order}"));
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    files.retain(|p| p.extension().is_some_and(|x| x == "txt"));
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), read_sign_matrix(&p)))
        .collect()
}

fn is_hadamard(h: &[Vec<i8>]) -> bool {
    let n = h.len();
    h.iter().all(|r| r.len() == n)
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let s: i32 = (0..n).map(|k| i32::from(h[i][k]) * i32::from(h[j][k])).sum();
                s == if i == j { n as i32 } else { 0 }
            })
        })
}

/// Normalises the first row and column to +1, maps -1 to 1 and +1 to 0, and
/// eliminates over GF(2) on byte rows.
fn naive_dephased_rank(h: &[Vec<i8>]) -> usize {
    let n = h.len();
    let mut m: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..n).map(|j| u8::from(h[i][j] * h[i][0] * h[0][j] * h[0][0] < 0)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| m[r][col] == 1) else { continue };
        m.swap(rank, p);
        for r in 0..n {
            if r != rank && m[r][col] == 1 {
                let pivot = m[rank].clone();
                for (x, v) in m[r].iter_mut().zip(pivot) {
                    *x ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn ranks(ctx: &Ctx) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (order, classes, expected) in CATALOG {
        let out = ctx.run(&["rank", "--order", &order.to_string(), "--offline", "--format", "jsonl"]);
        let records: Vec<Value> = String::from_utf8_lossy(&out.stdout)
            .lines()
            .filter_map(|l| serde_json::from_str(l).ok())
            .collect();
        let reported: BTreeMap<String, usize> = records
            .iter()
            .map(|r| (r["source_id"].as_str().unwrap_or("").to_string(), r["dephased_rank"].as_u64().unwrap_or(0) as usize))
            .collect();
        let mut oracle_agrees = true;
        for (name, h) in fixture_matrices(order) {
            oracle_agrees &= reported.get(&name) == Some(&naive_dephased_rank(&h));
        }
        let ranks: Vec<usize> = reported.values().copied().collect();
        let all_expected = !ranks.is_empty() && ranks.iter().all(|&r| r == expected);
        let above = ranks.iter().all(|&r| r > RANK_BOUND);
        ok &= reported.len() == classes && all_expected && above && oracle_agrees;
        let distinct: std::collections::BTreeSet<usize> = ranks.iter().copied().collect();
        notes.push(format!(
            "order {order}: {} of {classes} classes, ranks {distinct:?}{}",
            reported.len(),
            if oracle_agrees { "" } else { ", oracle disagrees" }
        ));
    }
    let detail = notes.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn class_counts(ctx: &Ctx) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (order, classes, _) in CATALOG {
        let out = ctx.run(&["fetch", "--order", &order.to_string(), "--offline"]);
        let text = String::from_utf8_lossy(&out.stdout);
        let fetched: Option<usize> = text.split_whitespace().find_map(|w| w.parse().ok());
        let valid = fixture_matrices(order).iter().filter(|(_, h)| h.len() == order && is_hadamard(h)).count();
        ok &= out.status.success() && fetched == Some(classes) && valid == classes;
        notes.push(format!("order {order}: {} fetched, {valid} valid, expected {classes}", fetched.unwrap_or(0)));
    }
    let detail = notes.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn small_cases(ctx: &Ctx) -> Verdict {
    let d5 = ctx.verify(&["-d", "5", "-s", "8"])?;
    let d6 = ctx.verify(&["-d", "6", "-s", "8"])?;
    let detail = format!(
        "d=5: {} examined, {} failures; d=6: {} examined, {} failures",
        d5.examined, d5.failures, d6.examined, d6.failures
    );
    if d5.examined == 325 && d6.examined == 57 && d5.failures == 0 && d6.failures == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sampled_size_16(ctx: &Ctx) -> Verdict {
    let s = ctx.verify(&["-d", "6", "-s", "16", "--sample", &SAMPLE_COUNT.to_string(), "--seed", "1"])?;
    let detail = format!("{} examined, {} spectral, {} tile, {} failures", s.examined, s.spectral, s.tile, s.failures);
    if s.examined == SAMPLE_COUNT && s.failures == 0 && s.agree == SAMPLE_COUNT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_agreement(_: &Ctx) -> Verdict {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let mut compare = |e: Subset| {
        checked += 1;
        let fast = (is_spectral(&e).holds, is_tile(&e).holds);
        let slow = (brute_is_spectral(&e).unwrap(), brute_is_tile(&e).unwrap());
        if fast != slow {
            mismatches.push(e);
        }
    };
    for mask in 1u64..256 {
        compare(Subset::from_word_mask(3, mask).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        compare(Subset::from_word_mask(4, rng.random_range(1u64..1 << 16)).unwrap());
    }
    let detail = format!("{checked} subsets (all 255 nonempty of Z_2^3, 10000 of Z_2^4), {} mismatches", mismatches.len());
    if mismatches.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}, first {:?}", mismatches[0]))
    }
}

fn permute(x: u32, d: u32, perm: &[u32]) -> u32 {
    // Bit for coordinate j of the image comes from coordinate perm[j].
    (0..d).fold(0, |w, j| w | (x >> (d - 1 - perm[j as usize]) & 1) << (d - 1 - j))
}

fn all_permutations(d: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..d {
        let mut longer = Vec::new();
        for p in &out {
            for c in (0..d).filter(|c| !p.contains(c)) {
                let mut q = p.clone();
                q.push(c);
                longer.push(q);
            }
        }
        out = longer;
    }
    out
}

fn image(t: &[u32], d: u32, perm: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = t.iter().map(|&x| permute(x, d, perm)).collect();
    v.sort_unstable();
    v
}

fn heuristic_soundness(_: &Ctx) -> Verdict {
    let spec = CaseSpec::new(6, 16).unwrap();
    let perms = all_permutations(6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut rejected, mut violations) = (0, 0);
    let n = 10_000;
    for _ in 0..n {
        let t = sample_tuple(&spec, &mut rng);
        if !passes_heuristics(6, &t) {
            rejected += 1;
            let earlier = earlier_permutation(6, &t).is_some_and(|p| image(&t, 6, &p) < t);
            violations += u32::from(!earlier);
        }
        let minimum = perms.iter().map(|p| image(&t, 6, p)).min().unwrap();
        violations += u32::from(!passes_heuristics(6, &minimum));
    }
    let detail = format!("{n} tuples, {rejected} rejected, {violations} violations");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn pruning_factor(ctx: &Ctx) -> Verdict {
    let on = CaseSpec::new(6, 16).unwrap();
    let off = CaseSpec::with_heuristics(6, 16, false).unwrap();
    let pruned = count_enumeration(on, &X1Slice::All);
    let unpruned = count_enumeration(off, &X1Slice::All);
    let factor = unpruned as f64 / pruned as f64;

    // Independent recounts: the unpruned stream is a binomial, the tail of the
    // pruned stream is walked tuple by tuple, and the CLI agrees on the total.
    let tail = X1Slice::Range(7..63);
    let streamed = Tuples::sliced(on, 7..63).count() as u64;
    let cli: Option<u64> = String::from_utf8_lossy(&ctx.run(&["enumerate", "-d", "6", "-s", "16", "--count-only"]).stdout)
        .trim()
        .parse()
        .ok();
    let recounts_agree =
        unpruned == binomial(57, 9) && streamed == count_enumeration(on, &tail) && cli == Some(pruned);

    let per_x1: Vec<String> = [3u32, 7, 15]
        .iter()
        .map(|&x1| {
            let slice = X1Slice::Range(x1..x1 + 1);
            let (a, b) = (count_enumeration(off, &slice), count_enumeration(on, &slice));
            format!("x1={x1}: {:.1}", a as f64 / b.max(1) as f64)
        })
        .collect();
    let detail = format!(
        "{unpruned} / {pruned} = {factor:.2} over all x1 (per slice {}); recounts {}",
        per_x1.join(", "),
        if recounts_agree { "agree" } else { "DISAGREE" }
    );
    if (PRUNING_BAND.0..=PRUNING_BAND.1).contains(&factor) && recounts_agree {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectrum_holds(e: &Subset, b: &Subset) -> bool {
    let chi = |c: u32, x: u32| if (c & x).count_ones().is_multiple_of(2) { 1i64 } else { -1 };
    b.len() == e.len()
        && b.points().iter().enumerate().all(|(i, &c1)| {
            b.points()[i + 1..]
                .iter()
                .all(|&c2| e.points().iter().map(|&x| chi(c1, x) * chi(c2, x)).sum::<i64>() == 0)
        })
}

fn partition_holds(e: &Subset, t: &Subset) -> bool {
    let mut hits = vec![0u32; e.group_size()];
    for &s in t.points() {
        for &x in e.points() {
            hits[(x ^ s) as usize] += 1;
        }
    }
    hits.iter().all(|&h| h == 1)
}

fn witness_validity(ctx: &Ctx) -> Verdict {
    let mut sets: Vec<Subset> = Vec::new();
    for (d, s) in [(5, 8), (6, 8)] {
        let spec = CaseSpec::new(d, s).unwrap();
        sets.extend(enumerate_tuples(spec).map(|t| spec.subset(&t)));
    }
    let big = CaseSpec::new(6, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    sets.extend((0..20_000).map(|_| big.subset(&sample_tuple(&big, &mut rng))));
    sets.extend((1u64..256).map(|m| Subset::from_word_mask(3, m).unwrap()));
    sets.extend((0..10_000).map(|_| Subset::from_word_mask(4, rng.random_range(1u64..1 << 16)).unwrap()));

    let (mut checked, mut bad) = (0u64, 0u64);
    for e in &sets {
        if let Some(b) = is_spectral(e).witness {
            checked += 1;
            bad += u64::from(!spectrum_holds(e, &b));
        }
        if let Some(t) = is_tile(e).witness {
            checked += 1;
            bad += u64::from(!partition_holds(e, &t));
        }
    }
    let (run_checked, run_bad) = ctx.witnesses.get();
    let detail = format!(
        "{checked} witnesses over {} sets rechecked here, {bad} bad; {run_checked} rechecked inside verify runs, {run_bad} bad",
        sets.len()
    );
    if bad == 0 && run_bad == 0 && checked > 0 && run_checked > 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn shard_counts(report: &Path) -> Result<Vec<ShardCounts>, String> {
    let text = fs::read_to_string(report).map_err(|e| format!("{}: {e}", report.display()))?;
    text.lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).map_err(|e| e.to_string())?;
            let n = |k: &str| v[k].as_u64().unwrap_or(u64::MAX);
            Ok((v["shard"].as_str().unwrap_or("").to_string(), n("examined"), n("spectral"), n("tile"), n("agree")))
        })
        .collect()
}

fn resume_determinism(ctx: &Ctx) -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let base = ["-d", "6", "-s", "16", "--sample", "40000", "--seed", "9"];

    ctx.verify(&[&base[..], &["--report", &p("straight.jsonl")]].concat())?;
    let first = ctx.verify(&[&base[..], &["--checkpoint", &p("ckpt"), "--stop-after-shards", "3"]].concat())?;
    ctx.verify(&[&base[..], &["--checkpoint", &p("ckpt"), "--report", &p("resumed.jsonl")]].concat())?;

    let straight = shard_counts(Path::new(&p("straight.jsonl")))?;
    let resumed = shard_counts(Path::new(&p("resumed.jsonl")))?;
    let detail = format!(
        "interrupted after {} of 40000 tuples; {} records compared",
        first.examined,
        straight.len()
    );
    if first.examined < 40_000 && straight == resumed {
        Ok(detail)
    } else {
        Err(format!("{detail}; straight {straight:?} vs resumed {resumed:?}"))
    }
}
