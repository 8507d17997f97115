//! Brute-force reference answers for small groups.
//!
//! Deliberately naive: characters are explicit `±1` vectors, orthogonality
//! is a dot product, and tilings are checked by covering a boolean array.
//! Nothing here assumes 0 is in the spectrum or translate set.

use thiserror::Error;

use crate::spectile::Subset;

/// Largest dimension the exhaustive searches accept.
pub const ORACLE_MAX_DIM: u32 = 4;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("brute-force search is limited to d <= {ORACLE_MAX_DIM}, got d = {0}")]
pub struct DimensionTooLarge(pub u32);

fn check_dim(e: &Subset) -> Result<(), DimensionTooLarge> {
    if e.dim() > ORACLE_MAX_DIM {
        Err(DimensionTooLarge(e.dim()))
    } else {
        Ok(())
    }
}

/// `(-1)^{b.x}` for `x` in `e`, in the order of `e`.
fn character_on(e: &Subset, b: u32) -> Vec<i32> {
    e.points()
        .iter()
        .map(|&x| {
            let dot: u32 = (0..e.dim()).map(|k| (b >> k & 1) * (x >> k & 1)).sum();
            if dot.is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
        .collect()
}

fn dot(u: &[i32], v: &[i32]) -> i32 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// A spectrum for `e`, found by exhaustive search over sets of characters.
pub fn brute_spectrum(e: &Subset) -> Result<Option<Vec<u32>>, DimensionTooLarge> {
    check_dim(e)?;
    let n = 1u32 << e.dim();
    let chars: Vec<Vec<i32>> = (0..n).map(|b| character_on(e, b)).collect();
    let mut chosen = Vec::new();
    Ok(grow_spectrum(&chars, e.len(), 0, &mut chosen).then_some(chosen))
}

fn grow_spectrum(chars: &[Vec<i32>], want: usize, from: usize, chosen: &mut Vec<u32>) -> bool {
    if chosen.len() == want {
        return true;
    }
    for b in from..chars.len() {
        if chosen.iter().all(|&c| dot(&chars[c as usize], &chars[b]) == 0) {
            chosen.push(b as u32);
            if grow_spectrum(chars, want, b + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

pub fn brute_is_spectral(e: &Subset) -> Result<bool, DimensionTooLarge> {
    Ok(brute_spectrum(e)?.is_some())
}

/// A tiling partner for `e`, found by exhaustive search over translate sets.
pub fn brute_tiling_partner(e: &Subset) -> Result<Option<Vec<u32>>, DimensionTooLarge> {
    check_dim(e)?;
    let n = 1usize << e.dim();
    if !n.is_multiple_of(e.len()) {
        return Ok(None);
    }
    let translates: Vec<Vec<usize>> =
        (0..n).map(|t| e.points().iter().map(|&x| (x as usize) ^ t).collect()).collect();
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    Ok(grow_tiling(&translates, n / e.len(), 0, &mut covered, &mut chosen).then_some(chosen))
}

fn grow_tiling(
    translates: &[Vec<usize>],
    want: usize,
    from: usize,
    covered: &mut [bool],
    chosen: &mut Vec<u32>,
) -> bool {
    if chosen.len() == want {
        return covered.iter().all(|&c| c);
    }
    for t in from..translates.len() {
        if translates[t].iter().all(|&y| !covered[y]) {
            for &y in &translates[t] {
                covered[y] = true;
            }
            chosen.push(t as u32);
            if grow_tiling(translates, want, t + 1, covered, chosen) {
                return true;
            }
            chosen.pop();
            for &y in &translates[t] {
                covered[y] = false;
            }
        }
    }
    false
}

pub fn brute_is_tile(e: &Subset) -> Result<bool, DimensionTooLarge> {
    Ok(brute_tiling_partner(e)?.is_some())
}
