//! k-clique decision in Cayley graphs on Z_2^d.
//!
//! The graph is given by its connection set `C`: `x ~ y` iff `x ^ y` is in
//! `C`. A clique among the neighbours of 0 is a set of elements of `C` whose
//! pairwise XORs also lie in `C`. The neighbourhood of `v` is `C` translated
//! by `v`, so a branching step is one AND.

use super::nodeset::NodeSet;

/// Finds `k` elements of `conn` with pairwise XOR in `conn`.
///
/// Branch and bound: take the smallest candidate `v`, recurse on the
/// candidates after `v` adjacent to it, and give up on a branch as soon as
/// fewer than the missing number of candidates remain. Candidates are tried
/// in ascending order, so the witness is the lexicographically first clique.
pub fn find_clique<S: NodeSet>(conn: &S, k: u32, neighbours: impl Fn(u32) -> S) -> Option<Vec<u32>> {
    let mut chosen = Vec::with_capacity(k as usize);
    if extend(conn.clone(), k, &neighbours, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn extend<S: NodeSet>(mut candidates: S, k: u32, neighbours: &impl Fn(u32) -> S, chosen: &mut Vec<u32>) -> bool {
    if k == 0 {
        return true;
    }
    while candidates.len() >= k {
        let v = candidates.first().expect("nonempty");
        candidates.remove(v);
        if k == 1 {
            chosen.push(v);
            return true;
        }
        let next = candidates.intersect(&neighbours(v));
        if next.len() >= k - 1 {
            chosen.push(v);
            if extend(next, k - 1, neighbours, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Precomputed neighbourhoods for single-word connection sets.
pub struct NarrowTable {
    rows: [u64; 64],
}

impl NarrowTable {
    pub fn new(conn: u64, dim: u32) -> Self {
        let mut rows = [0u64; 64];
        for (v, row) in rows.iter_mut().enumerate().take(1 << dim) {
            *row = conn.translate(v as u32);
        }
        NarrowTable { rows }
    }

    #[inline]
    pub fn get(&self, v: u32) -> u64 {
        self.rows[v as usize]
    }
}
