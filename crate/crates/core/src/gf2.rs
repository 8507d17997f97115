//! Matrices over GF(2): sign/log-Hadamard conversion, dephasing, and rank.
//!
//! Rows are bit-packed into `u64` words (bit `j % 64` of word `j / 64` holds
//! column `j`), so row addition is a word-wise XOR and matrices of any order
//! are supported, not just those that fit in one word.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::Execution;

/// A dephased rank at or below this bound would make Z_2^6 host a spectral
/// set whose size is not a power of two.
pub const RANK_BOUND: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix order must be positive")]
    EmptyMatrix,
    #[error("expected {expected} entries for a square matrix, found {found}")]
    NotSquare { expected: usize, found: usize },
    #[error("sign matrix entry {value} at ({row}, {col}) is not +1 or -1")]
    BadSign { row: usize, col: usize, value: i8 },
    #[error("{source_id}: not a Hadamard matrix")]
    InvalidHadamard { source_id: String },
}

/// A square matrix with entries in {+1, -1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(order: usize, entries: Vec<i8>) -> Result<Self, Gf2Error> {
        if order == 0 {
            return Err(Gf2Error::EmptyMatrix);
        }
        if entries.len() != order * order {
            return Err(Gf2Error::NotSquare {
                expected: order * order,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|&v| v != 1 && v != -1) {
            return Err(Gf2Error::BadSign {
                row: pos / order,
                col: pos % order,
                value: entries[pos],
            });
        }
        Ok(SignMatrix { order, entries })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self, Gf2Error> {
        let order = rows.len();
        let entries: Vec<i8> = rows.iter().flatten().copied().collect();
        if let Some(bad) = rows.iter().find(|r| r.len() != order) {
            return Err(Gf2Error::NotSquare {
                expected: order * order,
                found: order * (order - 1) + bad.len(),
            });
        }
        Self::new(order, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.order + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks_exact(self.order)
    }

    /// True iff every pair of distinct rows agrees in exactly half of the
    /// positions, i.e. `H * H^T = m * I`.
    pub fn is_hadamard(&self) -> bool {
        let m = self.order;
        if m > 1 && m % 2 == 1 {
            return false;
        }
        (0..m).all(|i| {
            (i + 1..m).all(|j| {
                let dot: i32 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(&a, &b)| i32::from(a * b))
                    .sum();
                dot == 0
            })
        })
    }

    /// Entrywise exponent: +1 becomes 0 and -1 becomes 1.
    pub fn to_log_hadamard(&self) -> Gf2Matrix {
        Gf2Matrix::from_fn(self.order, self.order, |i, j| self.get(i, j) == -1)
    }
}

impl fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SignMatrix({})", self.order)?;
        for row in self.rows() {
            let line: String = row.iter().map(|&v| if v == 1 { '+' } else { '-' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Bit-packed row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Gf2Matrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds from rows of 0/1 bytes; any nonzero byte counts as 1.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j] != 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        (self.data[row * self.words_per_row + col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        debug_assert!(row < self.rows && col < self.cols);
        let word = &mut self.data[row * self.words_per_row + col / 64];
        let bit = 1u64 << (col % 64);
        if value {
            *word |= bit;
        } else {
            *word &= !bit;
        }
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.data[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    fn row_distance(&self, a: usize, b: usize) -> u32 {
        self.row_words(a)
            .iter()
            .zip(self.row_words(b))
            .map(|(x, y)| (x ^ y).count_ones())
            .sum()
    }

    /// True iff the matrix is square and every pair of distinct rows differs
    /// in exactly `cols / 2` positions.
    pub fn is_log_hadamard(&self) -> bool {
        if self.rows != self.cols || (self.cols > 1 && self.cols % 2 == 1) {
            return false;
        }
        let half = (self.cols / 2) as u32;
        (0..self.rows).all(|i| (i + 1..self.rows).all(|j| self.row_distance(i, j) == half))
    }

    /// Mask with the low `cols` bits of the last word set.
    fn tail_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    /// Returns the dephased matrix
    /// `D[i][j] = L[i][j] ^ L[0][j] ^ L[i][0] ^ L[0][0]`,
    /// whose first row and first column are zero.
    pub fn dephase(&self) -> Gf2Matrix {
        let mut out = self.clone();
        if self.rows == 0 || self.cols == 0 {
            return out;
        }
        let first_row = self.row_words(0).to_vec();
        let corner = self.get(0, 0);
        let w = self.words_per_row;
        let tail = self.tail_mask();
        for i in 0..self.rows {
            let flip = self.get(i, 0) ^ corner;
            let row = &mut out.data[i * w..(i + 1) * w];
            for (k, (word, first)) in row.iter_mut().zip(&first_row).enumerate() {
                *word ^= first;
                if flip {
                    *word ^= if k + 1 == w { tail } else { u64::MAX };
                }
            }
        }
        out
    }

    /// Rank over GF(2) by forward elimination on packed rows.
    pub fn rank(&self) -> usize {
        let w = self.words_per_row;
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row_words(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for row in tail.iter_mut().filter(|r| r[word] & bit != 0) {
                for k in word..w {
                    row[k] ^= pivot_row[k];
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// `P * self * Q` for permutations given as index maps: row `i` of the
    /// result is row `row_perm[i]` of `self`, and likewise for columns.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Gf2Matrix {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self.get(row_perm[i], col_perm[j]))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Rank of the dephased log-Hadamard form of `h`.
pub fn dephased_rank(h: &SignMatrix) -> usize {
    h.to_log_hadamard().dephase().rank()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub source_id: String,
    pub order: usize,
    pub dephased_rank: usize,
}

/// Per-order digest of a rank report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub order: usize,
    pub count: usize,
    /// Ascending and deduplicated.
    pub distinct_ranks: Vec<usize>,
}

impl OrderSummary {
    pub fn min_rank(&self) -> usize {
        self.distinct_ranks[0]
    }

    /// Every class of this order has the same dephased rank.
    pub fn is_uniform(&self) -> bool {
        self.distinct_ranks.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    /// Sorted by (order, source id).
    pub records: Vec<RankRecord>,
    pub orders: Vec<OrderSummary>,
}

impl RankReport {
    /// True iff every rank exceeds `bound`.
    pub fn all_above(&self, bound: usize) -> bool {
        self.records.iter().all(|r| r.dephased_rank > bound)
    }

    pub fn violations(&self, bound: usize) -> impl Iterator<Item = &RankRecord> {
        self.records.iter().filter(move |r| r.dephased_rank <= bound)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RankOptions {
    pub validate: bool,
    pub execution: Execution,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            validate: true,
            execution: Execution::default(),
        }
    }
}

/// Runs `to_log_hadamard -> dephase -> rank` on every input.
///
/// With validation on, the first input (in source-id order) that is not a
/// Hadamard matrix aborts the report.
pub fn rank_report(
    inputs: &[(String, SignMatrix)],
    options: RankOptions,
) -> Result<RankReport, Gf2Error> {
    let mut sorted: Vec<&(String, SignMatrix)> = inputs.iter().collect();
    sorted.sort_by(|a, b| (a.1.order(), &a.0).cmp(&(b.1.order(), &b.0)));

    let results = options.execution.map(&sorted, |(id, h)| {
        if options.validate && !h.is_hadamard() {
            return Err(Gf2Error::InvalidHadamard {
                source_id: id.clone(),
            });
        }
        Ok(RankRecord {
            source_id: id.clone(),
            order: h.order(),
            dephased_rank: dephased_rank(h),
        })
    });
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut by_order: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    for r in &records {
        let entry = by_order.entry(r.order).or_default();
        entry.0 += 1;
        entry.1.push(r.dephased_rank);
    }
    let orders = by_order
        .into_iter()
        .map(|(order, (count, mut ranks))| {
            ranks.sort_unstable();
            ranks.dedup();
            OrderSummary {
                order,
                count,
                distinct_ranks: ranks,
            }
        })
        .collect();
    Ok(RankReport { records, orders })
}
