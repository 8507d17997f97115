//! Vertex sets of Cayley graphs on Z_2^d, as bitsets indexed by group element.
//!
//! The key operation is [`NodeSet::translate`]: `{x ^ t : x in S}`. Bit
//! index `x` moves to `x ^ t`, which is a composition of block swaps, one per
//! set bit of `t`.

use std::fmt::Debug;

/// Masks selecting the lower half of every aligned block of size `2^(k+1)`.
const LOW_HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Applies `x -> x ^ t` to the bit positions of one word (`t < 64`).
#[inline]
pub fn translate_word(mut w: u64, t: u32) -> u64 {
    debug_assert!(t < 64);
    for (k, &low) in LOW_HALVES.iter().enumerate() {
        if t >> k & 1 == 1 {
            let s = 1 << k;
            w = ((w & low) << s) | ((w >> s) & low);
        }
    }
    w
}

pub trait NodeSet: Clone + PartialEq + Debug {
    fn empty(dim: u32) -> Self;
    fn insert(&mut self, v: u32);
    fn remove(&mut self, v: u32);
    fn contains(&self, v: u32) -> bool;
    fn len(&self) -> u32;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn first(&self) -> Option<u32>;
    fn intersect(&self, other: &Self) -> Self;
    fn union_with(&mut self, other: &Self);
    fn translate(&self, t: u32) -> Self;
    fn iter(&self) -> Vec<u32>;
}

impl NodeSet for u64 {
    fn empty(dim: u32) -> Self {
        debug_assert!(dim <= 6);
        0
    }

    #[inline]
    fn insert(&mut self, v: u32) {
        *self |= 1 << v;
    }

    #[inline]
    fn remove(&mut self, v: u32) {
        *self &= !(1 << v);
    }

    #[inline]
    fn contains(&self, v: u32) -> bool {
        self >> v & 1 == 1
    }

    #[inline]
    fn len(&self) -> u32 {
        self.count_ones()
    }

    #[inline]
    fn first(&self) -> Option<u32> {
        (*self != 0).then(|| self.trailing_zeros())
    }

    #[inline]
    fn intersect(&self, other: &Self) -> Self {
        self & other
    }

    #[inline]
    fn union_with(&mut self, other: &Self) {
        *self |= other;
    }

    #[inline]
    fn translate(&self, t: u32) -> Self {
        translate_word(*self, t)
    }

    fn iter(&self) -> Vec<u32> {
        let mut w = *self;
        let mut out = Vec::with_capacity(w.count_ones() as usize);
        while w != 0 {
            out.push(w.trailing_zeros());
            w &= w - 1;
        }
        out
    }
}

/// Bitset over Z_2^d for d > 6, one `u64` per 64 elements.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct WideSet {
    words: Box<[u64]>,
}

impl NodeSet for WideSet {
    fn empty(dim: u32) -> Self {
        let n = (1usize << dim).div_ceil(64);
        WideSet {
            words: vec![0; n].into_boxed_slice(),
        }
    }

    fn insert(&mut self, v: u32) {
        self.words[(v / 64) as usize] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: u32) {
        self.words[(v / 64) as usize] &= !(1 << (v % 64));
    }

    fn contains(&self, v: u32) -> bool {
        self.words[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    fn len(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn first(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i as u32 * 64 + w.trailing_zeros())
    }

    fn intersect(&self, other: &Self) -> Self {
        WideSet {
            words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect(),
        }
    }

    fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    fn translate(&self, t: u32) -> Self {
        // The high bits of t permute whole words; the low six act inside each word.
        let (hi, lo) = ((t / 64) as usize, t % 64);
        let mut words = vec![0; self.words.len()];
        for (i, &w) in self.words.iter().enumerate() {
            words[i ^ hi] = translate_word(w, lo);
        }
        WideSet {
            words: words.into_boxed_slice(),
        }
    }

    fn iter(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (i, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                out.push(i as u32 * 64 + w.trailing_zeros());
                w &= w - 1;
            }
        }
        out
    }
}
