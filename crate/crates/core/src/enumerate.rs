//! Candidate subsets with a fixed affine prefix, and coordinate-symmetry
//! pruning.
//!
//! Every candidate set is `{0, e_d, ..., e_1} ∪ {x_1 < ... < x_r}` where the
//! free points `x_i` come from the pool of non-prefix words. Permuting the
//! `d` coordinates fixes the prefix, so only one tuple per orbit needs to be
//! examined. Twelve cheap rules throw out tuples that provably have an
//! earlier coordinate permutation; they are evaluated incrementally as the
//! tuple is built, so a bad `x_1` is rejected before any `x_2` is tried.
//!
//! Words are MSB-first: coordinate 1 is bit `d - 1`.

use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectile::{permute_word, Subset};

/// Largest dimension the enumerator handles (pool words fit a `u64` mask).
pub const MAX_ENUM_DIM: u32 = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaseError {
    #[error("dimension {0} outside 2..={MAX_ENUM_DIM}")]
    Dimension(u32),
    #[error("set size {size} leaves no free points after the {prefix}-point prefix in Z_2^{dim}")]
    Size { dim: u32, size: usize, prefix: usize },
    #[error("bad slice {0:?}: expected x1=first, x1=<word> or x1=<a>..<b>")]
    Slice(String),
}

/// Which subsets of which group are being enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseSpec {
    pub dim: u32,
    pub size: usize,
    pub heuristics: bool,
}

impl CaseSpec {
    /// Heuristics default to on only for the large d = 6, size 16 case.
    pub fn new(dim: u32, size: usize) -> Result<Self, CaseError> {
        Self::with_heuristics(dim, size, dim == 6 && size == 16)
    }

    pub fn with_heuristics(dim: u32, size: usize, heuristics: bool) -> Result<Self, CaseError> {
        if !(2..=MAX_ENUM_DIM).contains(&dim) {
            return Err(CaseError::Dimension(dim));
        }
        let prefix = dim as usize + 1;
        if size <= prefix || size > 1 << dim {
            return Err(CaseError::Size { dim, size, prefix });
        }
        Ok(CaseSpec { dim, size, heuristics })
    }

    /// `0` and the standard basis vectors, ascending.
    pub fn prefix(&self) -> Vec<u32> {
        std::iter::once(0).chain((0..self.dim).map(|k| 1 << k)).collect()
    }

    /// Non-prefix words, ascending: the words of weight at least two.
    pub fn pool(&self) -> Vec<u32> {
        (0..1u32 << self.dim).filter(|x| x.count_ones() >= 2).collect()
    }

    pub fn free_count(&self) -> usize {
        self.size - self.dim as usize - 1
    }

    /// Prefix plus free tuple as a subset of Z_2^d.
    pub fn subset(&self, tuple: &[u32]) -> Subset {
        Subset::new(self.dim, self.prefix().into_iter().chain(tuple.iter().copied()))
            .expect("tuple drawn from the pool")
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} size={} heuristics={}",
            self.dim,
            self.size,
            if self.heuristics { "on" } else { "off" }
        )
    }
}

/// Rule numbers follow the order x_1 (1), x_2 (2-4), x_3 (5-8), x_i (9-12).
pub type RuleId = u8;

fn full_mask(d: u32) -> u32 {
    (1 << d) - 1
}

/// Restricted to the positions in `positions`, the coordinates of `x` are
/// nondecreasing: every selected bit below the highest selected one-bit is
/// also a one.
fn nondecreasing_on(x: u32, positions: u32) -> bool {
    let ones = x & positions;
    if ones == 0 {
        return true;
    }
    let top = 31 - ones.leading_zeros();
    positions & ((1 << top) - 1) & !x == 0
}

/// Rule 1: the coordinates of `x1` are nondecreasing, i.e. `x1 = 0..01..1`.
pub fn check_x1(x1: u32) -> Option<RuleId> {
    (x1 & (x1.wrapping_add(1)) != 0).then_some(1)
}

/// Rules 2-4.
pub fn check_x2(d: u32, x1: u32, x2: u32) -> Option<RuleId> {
    if x2 <= x1 {
        return Some(2);
    }
    if x2.count_ones() < x1.count_ones() {
        return Some(3);
    }
    let zeros1 = !x1 & full_mask(d);
    if !nondecreasing_on(x2, zeros1) || !nondecreasing_on(x2, x1) {
        return Some(4);
    }
    None
}

/// Rules 5-8.
pub fn check_x3(d: u32, x1: u32, x2: u32, x3: u32) -> Option<RuleId> {
    if x3 <= x2 {
        return Some(5);
    }
    if x3.count_ones() < x1.count_ones() {
        return Some(6);
    }
    let zeros1 = !x1 & full_mask(d);
    if (x3 & zeros1).count_ones() < (x2 & zeros1).count_ones() {
        return Some(7);
    }
    // Bit p of `pairs` marks coordinates at bits p+1, p where x1 and x2 are
    // both constant; x3 must not read (1, 0) there.
    let low = full_mask(d) >> 1;
    let pairs = !(x1 ^ (x1 >> 1)) & !(x2 ^ (x2 >> 1)) & low;
    if (x3 >> 1) & !x3 & pairs != 0 {
        return Some(8);
    }
    None
}

/// Per-prefix data for rules 9-12.
#[derive(Debug, Clone, Copy)]
struct LaterRules {
    x3: u32,
    weight1: u32,
    zeros1: u32,
    weight2_on_zeros1: u32,
    lead_mask: u32,
    weight3_on_lead: u32,
}

impl LaterRules {
    fn new(d: u32, x1: u32, x2: u32, x3: u32) -> Self {
        let zeros1 = !x1 & full_mask(d);
        // First k coordinates of x2 are zero: the top k bits.
        let k = (x2 << (32 - d)).leading_zeros().min(d);
        let lead_mask = full_mask(d) & !(full_mask(d) >> k);
        LaterRules {
            x3,
            weight1: x1.count_ones(),
            zeros1,
            weight2_on_zeros1: (x2 & zeros1).count_ones(),
            lead_mask,
            weight3_on_lead: (x3 & lead_mask).count_ones(),
        }
    }

    #[inline]
    fn check(&self, xi: u32) -> Option<RuleId> {
        if xi <= self.x3 {
            Some(9)
        } else if xi.count_ones() < self.weight1 {
            Some(10)
        } else if (xi & self.zeros1).count_ones() < self.weight2_on_zeros1 {
            Some(11)
        } else if (xi & self.lead_mask).count_ones() < self.weight3_on_lead {
            Some(12)
        } else {
            None
        }
    }
}

/// Rules 9-12 for one later point.
pub fn check_xi(d: u32, x1: u32, x2: u32, x3: u32, xi: u32) -> Option<RuleId> {
    LaterRules::new(d, x1, x2, x3).check(xi)
}

/// First rule the strictly increasing tuple breaks, if any.
pub fn first_failing_rule(d: u32, tuple: &[u32]) -> Option<RuleId> {
    let x1 = *tuple.first()?;
    if let Some(r) = check_x1(x1) {
        return Some(r);
    }
    let &x2 = tuple.get(1)?;
    if let Some(r) = check_x2(d, x1, x2) {
        return Some(r);
    }
    let &x3 = tuple.get(2)?;
    if let Some(r) = check_x3(d, x1, x2, x3) {
        return Some(r);
    }
    let later = LaterRules::new(d, x1, x2, x3);
    tuple[3..].iter().find_map(|&xi| later.check(xi))
}

pub fn passes_heuristics(d: u32, tuple: &[u32]) -> bool {
    first_failing_rule(d, tuple).is_none()
}

/// Range of `x_1` values, used to cut the stream into desk-sized slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum X1Slice {
    All,
    /// The first `x_1` that can start a tuple under the spec.
    First,
    Range(Range<u32>),
}

impl X1Slice {
    pub fn parse(s: &str) -> Result<Self, CaseError> {
        let bad = || CaseError::Slice(s.to_string());
        let value = s.strip_prefix("x1=").ok_or_else(bad)?;
        if value == "first" {
            return Ok(X1Slice::First);
        }
        if value == "all" {
            return Ok(X1Slice::All);
        }
        if let Some((a, b)) = value.split_once("..") {
            let a = a.parse().map_err(|_| bad())?;
            let b = b.parse().map_err(|_| bad())?;
            return Ok(X1Slice::Range(a..b));
        }
        let v: u32 = value.parse().map_err(|_| bad())?;
        Ok(X1Slice::Range(v..v + 1))
    }

    /// Resolves to a concrete range of x_1 values.
    pub fn resolve(&self, spec: &CaseSpec) -> Range<u32> {
        match self {
            X1Slice::All => 0..1 << spec.dim,
            X1Slice::Range(r) => r.clone(),
            X1Slice::First => {
                let first = Tuples::new(*spec).next().map_or(0, |t| t[0]);
                first..first + 1
            }
        }
    }
}

/// Lazy depth-first stream of free tuples in lexicographic order.
pub struct Tuples {
    spec: CaseSpec,
    pool: Vec<u32>,
    x1_range: Range<u32>,
    chosen: Vec<usize>,
    fixed: usize,
    cursor: usize,
    later: Option<LaterRules>,
    done: bool,
}

impl Tuples {
    pub fn new(spec: CaseSpec) -> Self {
        Self::sliced(spec, 0..1 << spec.dim)
    }

    pub fn sliced(spec: CaseSpec, x1_range: Range<u32>) -> Self {
        Tuples {
            spec,
            pool: spec.pool(),
            x1_range,
            chosen: Vec::with_capacity(spec.free_count()),
            fixed: 0,
            cursor: 0,
            later: None,
            done: false,
        }
    }

    /// Tuples beginning with `key`'s fixed points.
    pub fn in_shard(spec: CaseSpec, key: &ShardKey) -> Self {
        let mut it = Self::new(spec);
        let prefix = key.points();
        let indices: Option<Vec<usize>> = prefix.iter().map(|p| it.pool.binary_search(p).ok()).collect();
        let valid = indices.is_some()
            && prefix.len() <= spec.free_count()
            && prefix.windows(2).all(|w| w[0] < w[1])
            && (0..prefix.len()).all(|lvl| it.accepts(lvl, prefix[lvl], &prefix[..lvl]));
        if !valid {
            it.done = true;
            return it;
        }
        let indices = indices.unwrap();
        it.cursor = indices.last().map_or(0, |&i| i + 1);
        it.fixed = indices.len();
        it.chosen = indices;
        it.refresh_later();
        it
    }

    fn refresh_later(&mut self) {
        self.later = (self.spec.heuristics && self.chosen.len() >= 3).then(|| {
            let p = |i: usize| self.pool[self.chosen[i]];
            LaterRules::new(self.spec.dim, p(0), p(1), p(2))
        });
    }

    fn accepts(&self, level: usize, cand: u32, earlier: &[u32]) -> bool {
        if level == 0 && !self.x1_range.contains(&cand) {
            return false;
        }
        if !self.spec.heuristics {
            return true;
        }
        let d = self.spec.dim;
        match level {
            0 => check_x1(cand).is_none(),
            1 => check_x2(d, earlier[0], cand).is_none(),
            2 => check_x3(d, earlier[0], earlier[1], cand).is_none(),
            _ => match &self.later {
                Some(rules) => rules.check(cand).is_none(),
                None => check_xi(d, earlier[0], earlier[1], earlier[2], cand).is_none(),
            },
        }
    }

    fn current(&self) -> Vec<u32> {
        self.chosen.iter().map(|&i| self.pool[i]).collect()
    }

    /// Drops the deepest choice and resumes after it. Returns false once the
    /// stream (or shard) is exhausted.
    fn backtrack(&mut self) -> bool {
        if self.chosen.len() <= self.fixed {
            self.done = true;
            return false;
        }
        let last = self.chosen.pop().unwrap();
        self.cursor = last + 1;
        if self.chosen.len() < 3 {
            self.later = None;
        }
        true
    }
}

impl Iterator for Tuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let r = self.spec.free_count();
        while !self.done {
            let level = self.chosen.len();
            if level == r {
                let t = self.current();
                self.backtrack();
                return Some(t);
            }
            // Not enough pool left to finish the tuple, or x1 past its range.
            let exhausted = self.cursor + (r - level) > self.pool.len()
                || (level == 0 && self.pool[self.cursor] >= self.x1_range.end);
            if exhausted {
                if !self.backtrack() {
                    break;
                }
                continue;
            }
            let cand = self.pool[self.cursor];
            let earlier = self.current();
            if self.accepts(level, cand, &earlier) {
                self.chosen.push(self.cursor);
                if self.chosen.len() == 3 {
                    self.refresh_later();
                }
            }
            self.cursor += 1;
        }
        None
    }
}

/// All tuples the spec emits, lazily.
pub fn enumerate_tuples(spec: CaseSpec) -> Tuples {
    Tuples::new(spec)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of tuples `enumerate_tuples` would emit, restricted to `slice`.
///
/// The first three points are enumerated; the remaining `r - 3` are
/// counted in closed form, since rules 9-12 judge each later point on its
/// own once `x_1, x_2, x_3` are fixed.
pub fn count_enumeration(spec: CaseSpec, slice: &X1Slice) -> u64 {
    let range = slice.resolve(&spec);
    let pool = spec.pool();
    let r = spec.free_count();
    let d = spec.dim;
    let h = spec.heuristics;
    let depth = r.min(3);
    let mut total = 0u64;

    let mut stack: Vec<usize> = Vec::with_capacity(3);
    let mut cursor = 0usize;
    loop {
        let level = stack.len();
        if level == depth {
            total += if r <= 3 {
                1
            } else {
                let last = stack[2];
                let (x1, x2, x3) = (pool[stack[0]], pool[stack[1]], pool[last]);
                let later = LaterRules::new(d, x1, x2, x3);
                let n = pool[last + 1..]
                    .iter()
                    .filter(|&&x| !h || later.check(x).is_none())
                    .count();
                binomial(n as u64, (r - 3) as u64)
            };
            let Some(last) = stack.pop() else { break };
            cursor = last + 1;
            continue;
        }
        if cursor + (r - level) > pool.len() || (level == 0 && pool[cursor] >= range.end) {
            let Some(last) = stack.pop() else { break };
            cursor = last + 1;
            continue;
        }
        let cand = pool[cursor];
        let ok = match level {
            0 => range.contains(&cand) && (!h || check_x1(cand).is_none()),
            1 => !h || check_x2(d, pool[stack[0]], cand).is_none(),
            _ => !h || check_x3(d, pool[stack[0]], pool[stack[1]], cand).is_none(),
        };
        if ok {
            stack.push(cursor);
        }
        cursor += 1;
    }
    total
}

/// Unit of independent work: the tuples sharing their first one or two
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShardKey {
    pub x1: u32,
    pub x2: Option<u32>,
}

impl ShardKey {
    pub fn points(&self) -> Vec<u32> {
        std::iter::once(self.x1).chain(self.x2).collect()
    }

    pub fn id(&self) -> String {
        match self.x2 {
            Some(x2) => format!("{}-{}", self.x1, x2),
            None => self.x1.to_string(),
        }
    }
}

/// Shard keys in stream order, restricted to `slice`. Keys are `(x_1, x_2)`
/// when at least two points are free, otherwise `x_1`.
pub fn shards(spec: CaseSpec, slice: &X1Slice) -> Vec<ShardKey> {
    let range = slice.resolve(&spec);
    let key_len = spec.free_count().min(2);
    let shallow = CaseSpec { size: spec.dim as usize + 1 + key_len, ..spec };
    let pool_len = spec.pool().len();
    Tuples::sliced(shallow, range)
        // A key must leave room in the pool for the rest of the tuple.
        .filter(|t| {
            let last = spec.pool().binary_search(t.last().unwrap()).unwrap();
            pool_len - last > spec.free_count() - key_len
        })
        .map(|t| ShardKey { x1: t[0], x2: t.get(1).copied() })
        .collect()
}

/// Uniform random free tuple (pruning rules not applied), ascending.
pub fn sample_tuple<R: Rng + ?Sized>(spec: &CaseSpec, rng: &mut R) -> Vec<u32> {
    let pool = spec.pool();
    let mut t: Vec<u32> = sample(rng, pool.len(), spec.free_count()).into_iter().map(|i| pool[i]).collect();
    t.sort_unstable();
    t
}

fn permutations(d: u32) -> &'static [Vec<u32>] {
    static TABLES: OnceLock<Vec<Vec<Vec<u32>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_ENUM_DIM)
            .map(|n| {
                let mut all = Vec::new();
                let mut p: Vec<u32> = (0..n).collect();
                heap_permutations(n as usize, &mut p, &mut all);
                all.sort();
                all
            })
            .collect()
    });
    &tables[d as usize]
}

fn heap_permutations(k: usize, p: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(k - 1, p, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        p.swap(j, k - 1);
    }
}

/// Smallest tuple in the coordinate-permutation orbit of `tuple`.
pub fn orbit_min(d: u32, tuple: &[u32]) -> Vec<u32> {
    let mut best = tuple.to_vec();
    best.sort_unstable();
    let mut image = Vec::with_capacity(tuple.len());
    for perm in permutations(d) {
        image.clear();
        image.extend(tuple.iter().map(|&x| permute_word(x, d, perm)));
        image.sort_unstable();
        if image < best {
            best.clone_from(&image);
        }
    }
    best
}

/// True iff no coordinate permutation maps `tuple` to a lexicographically
/// earlier tuple. Exhaustive over all `d!` permutations.
pub fn orbit_min_check(d: u32, tuple: &[u32]) -> bool {
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    orbit_min(d, &sorted) == sorted
}

/// A permutation witnessing that `tuple` is not orbit-minimal.
pub fn earlier_permutation(d: u32, tuple: &[u32]) -> Option<Vec<u32>> {
    let mut image = Vec::with_capacity(tuple.len());
    permutations(d).iter().find_map(|perm| {
        image.clear();
        image.extend(tuple.iter().map(|&x| permute_word(x, d, perm)));
        image.sort_unstable();
        (image.as_slice() < tuple).then(|| perm.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(coords: &[u8]) -> u32 {
        coords.iter().fold(0, |acc, &c| (acc << 1) | u32::from(c))
    }

    #[test]
    fn case_shapes() {
        let c = CaseSpec::new(6, 16).unwrap();
        assert!(c.heuristics);
        assert_eq!(c.prefix(), vec![0, 1, 2, 4, 8, 16, 32]);
        assert_eq!(c.pool().len(), 57);
        assert_eq!(c.free_count(), 9);
        let c = CaseSpec::new(5, 8).unwrap();
        assert!(!c.heuristics);
        assert_eq!(c.pool().len(), 26);
        assert_eq!(c.free_count(), 2);
        assert!(CaseSpec::new(6, 7).is_err());
        assert!(CaseSpec::new(7, 16).is_err());
        assert!(CaseSpec::new(3, 9).is_err());
    }

    #[test]
    fn rule_examples() {
        assert_eq!(check_x1(w(&[0, 0, 1, 0, 1, 1])), Some(1));
        assert_eq!(check_x1(w(&[0, 0, 0, 1, 1, 1])), None);
        let x1 = w(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(check_x2(6, x1, w(&[1, 0, 1, 0, 1, 1])), Some(4));
        assert_eq!(check_x2(6, x1, w(&[0, 0, 1, 1, 0, 1])), Some(4));
        assert_eq!(check_x2(6, x1, w(&[0, 1, 1, 0, 1, 1])), None);
        assert_eq!(check_x2(6, x1, w(&[0, 1, 1, 0, 0, 0])), Some(3));

        let t = [w(&[0, 0, 0, 0, 1, 1]), w(&[0, 0, 0, 1, 1, 1]), w(&[0, 0, 1, 1, 1, 1])];
        assert_eq!(first_failing_rule(6, &t), None);
        let mut longer = t.to_vec();
        longer.extend([w(&[0, 1, 0, 1, 1, 1]), w(&[0, 1, 1, 1, 1, 1])]);
        assert!(passes_heuristics(6, &longer));
    }

    #[test]
    fn rule_8_forbids_descent_on_constant_pairs() {
        // x1 = (0,0,0,0,1,1), x2 = (0,0,0,1,1,1): coordinates 1-3 are constant
        // in both, so x3 may not read 1,0 on positions (1,2) or (2,3).
        let (x1, x2) = (w(&[0, 0, 0, 0, 1, 1]), w(&[0, 0, 0, 1, 1, 1]));
        assert_eq!(check_x3(6, x1, x2, w(&[1, 0, 1, 1, 0, 0])), Some(8));
        assert_eq!(check_x3(6, x1, x2, w(&[0, 1, 1, 1, 1, 0])), Some(8));
        // Positions (4,5): x1 = (0,1) differs, so no constraint there.
        assert_eq!(check_x3(6, x1, x2, w(&[0, 1, 1, 1, 0, 1])), None);
    }

    #[test]
    fn rules_9_to_12() {
        let (x1, x2, x3) = (w(&[0, 0, 0, 0, 1, 1]), w(&[0, 0, 0, 1, 1, 1]), w(&[0, 1, 1, 0, 1, 1]));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[0, 1, 0, 1, 1, 1])), Some(9));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 0, 0, 0, 0, 0])), Some(10));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 1, 0, 0, 0, 0])), None);
        // k = 3 for x2; x3 has weight 2 on the first three coordinates.
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 0, 0, 0, 1, 1])), Some(12));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 0, 0, 1, 1, 1])), Some(12));
        let (x1, x2, x3) = (w(&[0, 0, 0, 1, 1, 1]), w(&[0, 0, 1, 0, 1, 1]), w(&[0, 0, 1, 1, 1, 1]));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 1, 0, 0, 0, 0])), Some(10));
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 0, 0, 0, 1, 1])), None);
        // x2 has weight 2 on x1's zero positions (the first four).
        let (x1, x2, x3) = (w(&[0, 0, 0, 0, 1, 1]), w(&[0, 0, 1, 1, 1, 1]), w(&[0, 1, 0, 1, 1, 1]));
        assert_eq!(check_x3(6, x1, x2, x3), None);
        assert_eq!(check_xi(6, x1, x2, x3, w(&[1, 0, 0, 0, 1, 1])), Some(11));
    }

    #[test]
    fn unpruned_counts_are_binomials() {
        assert_eq!(enumerate_tuples(CaseSpec::new(6, 8).unwrap()).count(), 57);
        assert_eq!(enumerate_tuples(CaseSpec::new(5, 8).unwrap()).count(), 325);
        let big = CaseSpec::with_heuristics(6, 16, false).unwrap();
        assert_eq!(count_enumeration(big, &X1Slice::All), binomial(57, 9));
        assert_eq!(binomial(57, 9), 8_996_462_475);
        for (d, s) in [(4, 8), (5, 9), (5, 12), (3, 6)] {
            let spec = CaseSpec::with_heuristics(d, s, false).unwrap();
            let n = spec.pool().len() as u64;
            assert_eq!(count_enumeration(spec, &X1Slice::All), binomial(n, spec.free_count() as u64));
            assert_eq!(enumerate_tuples(spec).count() as u64, binomial(n, spec.free_count() as u64));
        }
    }

    #[test]
    fn stream_is_strictly_increasing() {
        let spec = CaseSpec::with_heuristics(5, 12, true).unwrap();
        let all: Vec<Vec<u32>> = enumerate_tuples(spec).collect();
        assert!(!all.is_empty());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|t| t.windows(2).all(|p| p[0] < p[1])));
    }

    #[test]
    fn incremental_pruning_equals_filtering() {
        for (d, s) in [(4, 9), (5, 10), (5, 9), (4, 7), (6, 10)] {
            let on = CaseSpec::with_heuristics(d, s, true).unwrap();
            let off = CaseSpec { heuristics: false, ..on };
            let filtered: Vec<_> = enumerate_tuples(off).filter(|t| passes_heuristics(d, t)).collect();
            let streamed: Vec<_> = enumerate_tuples(on).collect();
            assert_eq!(streamed, filtered, "d={d} s={s}");
            assert_eq!(count_enumeration(on, &X1Slice::All), streamed.len() as u64);
        }
    }

    #[test]
    fn slices_and_shards_partition_the_stream() {
        let spec = CaseSpec::with_heuristics(5, 11, true).unwrap();
        let all: Vec<_> = enumerate_tuples(spec).collect();
        let mut from_shards = Vec::new();
        for key in shards(spec, &X1Slice::All) {
            let part: Vec<_> = Tuples::in_shard(spec, &key).collect();
            assert!(part.iter().all(|t| t[..key.points().len()] == key.points()[..]));
            from_shards.extend(part);
        }
        assert_eq!(from_shards, all);

        let first = X1Slice::First.resolve(&spec);
        assert_eq!(first, 3..4);
        let sliced: Vec<_> = Tuples::sliced(spec, first.clone()).collect();
        assert_eq!(sliced, all.iter().filter(|t| first.contains(&t[0])).cloned().collect::<Vec<_>>());
        assert_eq!(count_enumeration(spec, &X1Slice::First), sliced.len() as u64);
    }

    #[test]
    fn single_free_point_shards() {
        let spec = CaseSpec::new(6, 8).unwrap();
        let keys = shards(spec, &X1Slice::All);
        assert_eq!(keys.len(), 57);
        assert!(keys.iter().all(|k| k.x2.is_none()));
        assert_eq!(Tuples::in_shard(spec, &keys[0]).collect::<Vec<_>>(), vec![vec![3]]);
    }

    #[test]
    fn invalid_shard_is_empty() {
        let spec = CaseSpec::new(6, 16).unwrap();
        assert_eq!(Tuples::in_shard(spec, &ShardKey { x1: 5, x2: Some(6) }).count(), 0);
        assert_eq!(Tuples::in_shard(spec, &ShardKey { x1: 1, x2: Some(6) }).count(), 0);
    }

    #[test]
    fn slice_parsing() {
        assert_eq!(X1Slice::parse("x1=first").unwrap(), X1Slice::First);
        assert_eq!(X1Slice::parse("x1=7").unwrap(), X1Slice::Range(7..8));
        assert_eq!(X1Slice::parse("x1=3..15").unwrap(), X1Slice::Range(3..15));
        assert!(X1Slice::parse("x2=3").is_err());
        assert!(X1Slice::parse("x1=a..b").is_err());
    }

    #[test]
    fn orbit_checks() {
        assert_eq!(permutations(6).len(), 720);
        assert_eq!(permutations(3).len(), 6);
        // Fails rule 1, so sorting x1's coordinates gives an earlier tuple.
        let t = [w(&[0, 0, 1, 0, 1, 1])];
        assert!(!orbit_min_check(6, &t));
        assert!(earlier_permutation(6, &t).is_some());
        // The all-ones word is fixed by every permutation.
        assert!(orbit_min_check(6, &[63]));
        assert!(orbit_min_check(6, &[3]));
        assert_eq!(orbit_min(6, &[w(&[1, 1, 0, 0, 0, 0])]), vec![3]);
    }

    #[test]
    fn orbit_minimal_tuples_pass_the_rules() {
        let spec = CaseSpec::new(6, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let t = sample_tuple(&spec, &mut rng);
            let canon = orbit_min(6, &t);
            assert!(passes_heuristics(6, &canon), "{canon:?} from {t:?}");
            if !passes_heuristics(6, &t) {
                assert!(!orbit_min_check(6, &t));
            }
        }
    }

    #[test]
    fn pruned_stream_covers_every_orbit_exhaustively() {
        // Every subset of the pool with the right size has a coordinate
        // permutation in the pruned stream.
        for (d, s) in [(4, 8), (4, 9), (5, 9), (5, 10)] {
            let on = CaseSpec::with_heuristics(d, s, true).unwrap();
            let kept: std::collections::HashSet<Vec<u32>> = enumerate_tuples(on).collect();
            for t in enumerate_tuples(CaseSpec { heuristics: false, ..on }) {
                assert!(kept.contains(&orbit_min(d, &t)), "d={d} s={s} {t:?}");
            }
        }
    }
}
