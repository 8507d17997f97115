//! Hadamard matrix catalog: the `+`/`-` text format, a local cache, and the
//! remote library it mirrors.
//!
//! A catalog file holds one or more matrix blocks. Each row is a line that,
//! once whitespace is removed, consists of exactly `m` signs. Blank lines and
//! prose header lines separate blocks; a full block followed directly by
//! another sign line starts a new block, so concatenated files parse too.

mod construct;
mod store;

pub use construct::{
    cancelling_quadruples, goethals_seidel, kronecker, paley_i, paley_ii, sylvester, williamson,
};
pub use store::{
    catalog_files, content_hash, expected_class_count, fetch_order, is_catalog_order, load_dir,
    load_local_file, vendored_fixtures_dir, write_dir, CatalogConfig, CatalogEntry, CatalogError, EntrySource,
    FetchOutcome, Fetcher, HttpFetcher, Manifest, ManifestRecord, Origin, DEFAULT_BASE_URL,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gf2::SignMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("matrix starting at line {line} has order {found}, expected {expected}")]
    OrderMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no matrix found in input")]
    Empty,
}

/// Parses every `+`/`-` block in `text`.
///
/// Lines made only of signs and whitespace are matrix rows. Any other
/// non-blank line is a header when it appears between blocks and a
/// malformed row when it interrupts an unfinished block.
pub fn parse_sign_matrices(
    text: &str,
    expected_order: Option<usize>,
) -> Result<Vec<SignMatrix>, ParseError> {
    let mut out = Vec::new();
    let mut block: Option<Block> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let compact: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let is_sign_row = !compact.is_empty() && compact.chars().all(|c| c == '+' || c == '-');

        if !is_sign_row {
            if let Some(b) = &block {
                let reason = if compact.is_empty() {
                    format!("block ended after {} of {} rows", b.rows.len(), b.order)
                } else {
                    let bad = compact.chars().find(|&c| c != '+' && c != '-').unwrap();
                    format!("illegal character {bad:?} in matrix row")
                };
                return Err(ParseError::MalformedLine { line: line_no, reason });
            }
            continue;
        }

        let b = block.get_or_insert_with(|| Block::start(line_no, compact.len()));
        if compact.len() != b.order {
            return Err(ParseError::MalformedLine {
                line: line_no,
                reason: format!("row has {} entries, expected {}", compact.len(), b.order),
            });
        }
        b.rows.push(compact.bytes().map(|c| if c == b'+' { 1 } else { -1 }).collect());
        if b.rows.len() == b.order {
            let done = block.take().unwrap();
            if let Some(expected) = expected_order {
                if done.order != expected {
                    return Err(ParseError::OrderMismatch {
                        line: done.first_line,
                        expected,
                        found: done.order,
                    });
                }
            }
            // Rows are validated above, so construction cannot fail.
            out.push(SignMatrix::from_rows(&done.rows).expect("validated block"));
        }
    }

    if let Some(b) = block {
        return Err(ParseError::MalformedLine {
            line: text.lines().count(),
            reason: format!("input ended after {} of {} rows", b.rows.len(), b.order),
        });
    }
    if out.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(out)
}

struct Block {
    first_line: usize,
    order: usize,
    rows: Vec<Vec<i8>>,
}

impl Block {
    fn start(first_line: usize, order: usize) -> Self {
        Block {
            first_line,
            order,
            rows: Vec::with_capacity(order),
        }
    }
}

/// Writes `h` in catalog form, one row per line, newline terminated.
pub fn to_sign_text(h: &SignMatrix) -> String {
    let mut s = String::with_capacity(h.order() * (h.order() + 1));
    for row in h.rows() {
        s.extend(row.iter().map(|&v| if v == 1 { '+' } else { '-' }));
        s.push('\n');
    }
    s
}

/// Per-row distributions, sorted.
pub type Profile = Vec<BTreeMap<u32, u64>>;

/// For every row, the distribution of `|sum_j h_aj h_bj h_cj h_dj|` over the
/// 4-sets of rows containing it; rows sorted, then the same for columns.
///
/// Row and column permutations and negations leave it unchanged, so two
/// matrices with different profiles are inequivalent.
pub fn four_profile(h: &SignMatrix) -> (Profile, Profile) {
    let t = SignMatrix::from_rows(&(0..h.order()).map(|j| h.rows().map(|r| r[j]).collect()).collect::<Vec<_>>())
        .expect("transpose of a square matrix");
    (row_profiles(h), row_profiles(&t))
}

fn row_profiles(h: &SignMatrix) -> Profile {
    let m = h.order();
    let mut per_row = vec![BTreeMap::new(); m];
    let mut ab = vec![0i32; m];
    for a in 0..m {
        for b in a + 1..m {
            for (j, v) in ab.iter_mut().enumerate() {
                *v = i32::from(h.get(a, j) * h.get(b, j));
            }
            for c in b + 1..m {
                for d in c + 1..m {
                    let s = (0..m)
                        .map(|j| ab[j] * i32::from(h.get(c, j) * h.get(d, j)))
                        .sum::<i32>()
                        .unsigned_abs();
                    for r in [a, b, c, d] {
                        *per_row[r].entry(s).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    per_row.sort();
    per_row
}
