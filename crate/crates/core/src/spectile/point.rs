use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported dimension; the group then has 65536 elements.
pub const MAX_DIM: u32 = 16;

/// Element of Z_2^d as a d-bit word. Coordinate 1 is the most significant
/// bit, so lexicographic order on coordinate vectors is numeric order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point {
    pub word: u32,
    pub dim: u32,
}

impl Point {
    pub fn new(word: u32, dim: u32) -> Self {
        debug_assert!(dim <= MAX_DIM && word < 1 << dim);
        Point { word, dim }
    }

    pub fn from_coords(coords: &[u8]) -> Self {
        let word = coords.iter().fold(0, |w, &c| (w << 1) | u32::from(c & 1));
        Point::new(word, coords.len() as u32)
    }

    /// Coordinate `j` (0-based, most significant first).
    #[inline]
    pub fn coord(&self, j: u32) -> u32 {
        self.word >> (self.dim - 1 - j) & 1
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.dim).map(|j| self.coord(j) as u8).collect()
    }

    pub fn weight(&self) -> u32 {
        self.word.count_ones()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for j in 0..self.dim {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.coord(j))?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubsetError {
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    BadDimension(u32),
    #[error("point {point} out of range for Z_2^{dim}")]
    OutOfRange { point: u32, dim: u32 },
    #[error("point {0} listed twice")]
    Duplicate(u32),
    #[error("empty set")]
    Empty,
}

/// Nonempty subset of Z_2^d, kept as a strictly increasing list of words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    dim: u32,
    points: Vec<u32>,
}

impl Subset {
    pub fn new(dim: u32, points: impl IntoIterator<Item = u32>) -> Result<Self, SubsetError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(SubsetError::BadDimension(dim));
        }
        let mut points: Vec<u32> = points.into_iter().collect();
        if let Some(&p) = points.iter().find(|&&p| p >> dim != 0) {
            return Err(SubsetError::OutOfRange { point: p, dim });
        }
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(SubsetError::Duplicate(w[0]));
        }
        if points.is_empty() {
            return Err(SubsetError::Empty);
        }
        Ok(Subset { dim, points })
    }

    /// Members of a nonzero `mask` over Z_2^d with `d <= 6`.
    pub fn from_word_mask(dim: u32, mask: u64) -> Result<Self, SubsetError> {
        if dim == 0 || dim > 6 {
            return Err(SubsetError::BadDimension(dim));
        }
        if dim < 6 && mask >> (1u32 << dim) != 0 {
            let point = 64 - mask.leading_zeros() - 1;
            return Err(SubsetError::OutOfRange { point, dim });
        }
        Self::new(dim, (0..64).filter(|&x| mask >> x & 1 == 1))
    }

    pub fn full(dim: u32) -> Self {
        Subset::new(dim, 0..1 << dim).expect("valid dimension")
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn group_size(&self) -> usize {
        1 << self.dim
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn contains(&self, x: u32) -> bool {
        self.points.binary_search(&x).is_ok()
    }

    /// Membership mask; only for `dim <= 6`.
    pub fn word_mask(&self) -> u64 {
        debug_assert!(self.dim <= 6);
        self.points.iter().fold(0, |m, &x| m | 1 << x)
    }

    /// `{x ^ s : x in self}`.
    pub fn translate(&self, s: u32) -> Subset {
        Subset::new(self.dim, self.points.iter().map(|&x| x ^ s)).expect("translation is a bijection")
    }

    /// Applies a coordinate permutation: coordinate `j` of the image is
    /// coordinate `perm[j]` of the original.
    pub fn permute_coords(&self, perm: &[u32]) -> Subset {
        Subset::new(self.dim, self.points.iter().map(|&x| permute_word(x, self.dim, perm)))
            .expect("permutation is a bijection")
    }
}

/// Coordinate `j` of the result is coordinate `perm[j]` of `x`
/// (coordinates counted from the most significant bit).
pub fn permute_word(x: u32, dim: u32, perm: &[u32]) -> u32 {
    debug_assert_eq!(perm.len() as u32, dim);
    perm.iter()
        .fold(0, |w, &src| (w << 1) | (x >> (dim - 1 - src) & 1))
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z2^{}{:?}", self.dim, self.points)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.points.iter().map(u32::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_are_msb_first() {
        let p = Point::from_coords(&[0, 0, 1, 0, 1, 1]);
        assert_eq!(p.word, 0b001011);
        assert_eq!(p.coords(), vec![0, 0, 1, 0, 1, 1]);
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_string(), "(0,0,1,0,1,1)");
        assert!(Point::from_coords(&[0, 1, 0]) < Point::from_coords(&[1, 0, 0]));
    }

    #[test]
    fn subset_validation() {
        assert_eq!(Subset::new(2, [0, 1, 2, 5]), Err(SubsetError::OutOfRange { point: 5, dim: 2 }));
        assert_eq!(Subset::new(3, [1, 1]), Err(SubsetError::Duplicate(1)));
        assert_eq!(Subset::new(3, []), Err(SubsetError::Empty));
        assert_eq!(Subset::new(0, [0]), Err(SubsetError::BadDimension(0)));
        assert_eq!(Subset::new(3, [4, 0, 2]).unwrap().points(), &[0, 2, 4]);
        assert_eq!(Subset::from_word_mask(2, 0b10111), Err(SubsetError::OutOfRange { point: 4, dim: 2 }));
        assert_eq!(Subset::from_word_mask(6, 1 << 63).unwrap().points(), &[63]);
    }

    #[test]
    fn permutation_and_translation() {
        let e = Subset::new(3, [0, 1, 6]).unwrap();
        // Reversing coordinates: 1 = (0,0,1) -> (1,0,0) = 4; 6 = (1,1,0) -> (0,1,1) = 3.
        assert_eq!(e.permute_coords(&[2, 1, 0]).points(), &[0, 3, 4]);
        assert_eq!(e.translate(1).points(), &[0, 1, 7]);
        assert_eq!(permute_word(0b011, 3, &[0, 1, 2]), 0b011);
    }
}
