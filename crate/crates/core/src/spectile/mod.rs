//! Spectrality and tiling of subsets of Z_2^d.
//!
//! Both questions are clique questions in Cayley graphs on Z_2^d:
//!
//! * characters `b`, `b'` are orthogonal on `E` iff the Fourier value of the
//!   indicator of `E` vanishes at `b ^ b'`, so `E` is spectral iff the zero
//!   set of its Fourier transform contains a clique of size `|E| - 1`;
//! * `E` and `E ^ t` are disjoint iff `t` is outside the difference set
//!   `E ^ E`, so `E` tiles iff the complement of `E ^ E` contains a clique of
//!   size `2^d / |E| - 1`.
//!
//! In both cases 0 can be assumed to be part of the spectrum or translate
//! set, which is why only the neighbourhood of 0 is ever built.

mod clique;
mod nodeset;
mod point;

pub use clique::{find_clique, NarrowTable};
pub use nodeset::{translate_word, NodeSet, WideSet};
pub use point::{permute_word, Point, Subset, SubsetError, MAX_DIM};

use serde::Serialize;

/// `sum_{x in E} (-1)^{popcount(t & x)}`.
pub fn fourier_value(e: &Subset, t: u32) -> i64 {
    let odd = e.points().iter().filter(|&&x| (t & x).count_ones() % 2 == 1).count() as i64;
    e.len() as i64 - 2 * odd
}

/// All Fourier values of the indicator of `e`, by the fast Walsh-Hadamard
/// transform.
pub fn fourier_transform(e: &Subset) -> Vec<i32> {
    let n = e.group_size();
    let mut f = vec![0i32; n];
    for &x in e.points() {
        f[x as usize] = 1;
    }
    let mut h = 1;
    while h < n {
        for block in f.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    f
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Mask {
    Narrow(u64),
    Wide(WideSet),
}

/// Neighbours of node 0 in a translation-invariant graph on Z_2^d.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConnectionSet {
    dim: u32,
    mask: Mask,
}

impl ConnectionSet {
    fn from_elements(dim: u32, elements: impl IntoIterator<Item = u32>) -> Self {
        if dim <= 6 {
            let mut m = 0u64;
            for t in elements {
                m.insert(t);
            }
            m.remove(0);
            ConnectionSet { dim, mask: Mask::Narrow(m) }
        } else {
            let mut m = WideSet::empty(dim);
            for t in elements {
                m.insert(t);
            }
            m.remove(0);
            ConnectionSet { dim, mask: Mask::Wide(m) }
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn contains(&self, t: u32) -> bool {
        match &self.mask {
            Mask::Narrow(m) => m.contains(t),
            Mask::Wide(m) => m.contains(t),
        }
    }

    pub fn len(&self) -> u32 {
        match &self.mask {
            Mask::Narrow(m) => m.len(),
            Mask::Wide(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<u32> {
        match &self.mask {
            Mask::Narrow(m) => m.iter(),
            Mask::Wide(m) => m.iter(),
        }
    }

    /// The single-word mask, when `dim <= 6`.
    pub fn as_word(&self) -> Option<u64> {
        match self.mask {
            Mask::Narrow(m) => Some(m),
            Mask::Wide(_) => None,
        }
    }

    /// `k` nonzero elements whose pairwise XORs are all in the set, if any.
    pub fn find_clique(&self, k: u32) -> Option<Vec<u32>> {
        match &self.mask {
            Mask::Narrow(m) => {
                let table = NarrowTable::new(*m, self.dim);
                find_clique(m, k, |v| table.get(v))
            }
            Mask::Wide(m) => find_clique(m, k, |v| m.translate(v)),
        }
    }
}

/// Nonzero `t` where the Fourier value of `e` vanishes.
pub fn spectral_connection_set(e: &Subset) -> ConnectionSet {
    let f = fourier_transform(e);
    ConnectionSet::from_elements(
        e.dim(),
        f.iter().enumerate().skip(1).filter(|(_, &v)| v == 0).map(|(t, _)| t as u32),
    )
}

/// Nonzero `t` outside the difference set `e ^ e`.
pub fn tiling_connection_set(e: &Subset) -> ConnectionSet {
    let d = e.dim();
    let n = e.group_size() as u32;
    if d <= 6 {
        let m = e.word_mask();
        let diff = e.points().iter().fold(0u64, |acc, &x| acc | m.translate(x));
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        ConnectionSet { dim: d, mask: Mask::Narrow(!diff & full & !1) }
    } else {
        let mut set = WideSet::empty(d);
        for &x in e.points() {
            set.insert(x);
        }
        let mut diff = WideSet::empty(d);
        for &x in e.points() {
            diff.union_with(&set.translate(x));
        }
        ConnectionSet::from_elements(d, (1..n).filter(|&t| !diff.contains(t)))
    }
}

/// `k`-clique among the neighbours of 0.
pub fn has_k_clique(conn: &ConnectionSet, k: u32) -> Option<Vec<u32>> {
    conn.find_clique(k)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DecisionResult {
    pub holds: bool,
    /// A spectrum or translate set containing 0, present iff `holds`.
    pub witness: Option<Subset>,
}

impl DecisionResult {
    fn no() -> Self {
        DecisionResult { holds: false, witness: None }
    }

    fn yes(w: Subset) -> Self {
        DecisionResult { holds: true, witness: Some(w) }
    }
}

/// Every pair of distinct characters in `b` is orthogonal on `e`.
pub fn is_spectrum(e: &Subset, b: &Subset) -> bool {
    b.len() == e.len()
        && b.points().iter().enumerate().all(|(i, &x)| {
            b.points()[i + 1..].iter().all(|&y| fourier_value(e, x ^ y) == 0)
        })
}

/// The translates `e ^ t`, `t` in `t_set`, partition the group.
pub fn is_tiling_partner(e: &Subset, t_set: &Subset) -> bool {
    let n = e.group_size();
    if e.len() * t_set.len() != n {
        return false;
    }
    let mut covered = vec![false; n];
    for &t in t_set.points() {
        for &x in e.points() {
            let y = (x ^ t) as usize;
            if covered[y] {
                return false;
            }
            covered[y] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

fn with_zero(dim: u32, clique: Vec<u32>) -> Subset {
    Subset::new(dim, std::iter::once(0).chain(clique)).expect("clique elements are distinct and nonzero")
}

pub fn is_spectral(e: &Subset) -> DecisionResult {
    let d = e.dim();
    let witness = if e.len() == 1 {
        Subset::new(d, [0]).unwrap()
    } else if e.len() == e.group_size() {
        Subset::full(d)
    } else {
        match spectral_connection_set(e).find_clique(e.len() as u32 - 1) {
            Some(c) => with_zero(d, c),
            None => return DecisionResult::no(),
        }
    };
    assert!(is_spectrum(e, &witness), "spectrum witness {witness:?} fails for {e:?}");
    DecisionResult::yes(witness)
}

pub fn is_tile(e: &Subset) -> DecisionResult {
    let d = e.dim();
    let n = e.group_size();
    if !n.is_multiple_of(e.len()) {
        return DecisionResult::no();
    }
    let witness = if e.len() == n {
        Subset::new(d, [0]).unwrap()
    } else if e.len() == 1 {
        Subset::full(d)
    } else {
        match tiling_connection_set(e).find_clique((n / e.len()) as u32 - 1) {
            Some(c) => with_zero(d, c),
            None => return DecisionResult::no(),
        }
    };
    assert!(is_tiling_partner(e, &witness), "tiling witness {witness:?} fails for {e:?}");
    DecisionResult::yes(witness)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Equivalence {
    pub spectral: DecisionResult,
    pub tile: DecisionResult,
}

impl Equivalence {
    pub fn agree(&self) -> bool {
        self.spectral.holds == self.tile.holds
    }
}

pub fn check_equivalence(e: &Subset) -> Equivalence {
    Equivalence {
        spectral: is_spectral(e),
        tile: is_tile(e),
    }
}
