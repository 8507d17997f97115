//! Rank computations for Hadamard catalogs and a spectral-set versus tile
//! checker for subsets of Z_2^d.

pub mod catalog;
pub mod enumerate;
pub mod gf2;
pub mod oracle;
pub mod par;
pub mod spectile;
pub mod verify;
