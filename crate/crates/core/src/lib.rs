//! Exact and Monte-Carlo study of uniform random minimal factorizations of
//! the `n`-cycle into transpositions.
//!
//! The library covers the whole pipeline from the combinatorics to the
//! geometric scaling limits:
//!
//! * [`perm`] — permutations, transpositions, left-to-right products and
//!   minimal factorizations of the cycle `(1,2,...,n)`;
//! * [`ncp`] — non-crossing partitions and the Kreweras complement;
//! * [`tree`] — the dual bi-type plane tree of a non-crossing partition,
//!   contour sequences and corner labels;
//! * [`paths`] — walk encodings of bi-type trees, cyclic shifts and the
//!   discrete Vervaat transform;
//! * [`dist`] — the offspring-law family `a b^i (i+1)^{i-1}/i!`, the series
//!   behind it, mean-matching parameter solves and random-walk pmfs;
//! * [`sample`] — exact samplers for uniform minimal factorizations and for
//!   bi-conditioned alternating Galton-Watson trees;
//! * [`levy`] — the spectrally positive Levy process with inverse-Gaussian
//!   ladder, its bridge/excursion and discrete chord extraction;
//! * [`lam`] — chord laminations of the unit disk, Hausdorff distance and
//!   geometric diagnostics;
//! * [`oracle`] — exhaustive enumeration and exact rational arithmetic used
//!   as ground truth for every closed form at small `n`;
//! * [`verify`] — the check suites wired into the CLI and the acceptance
//!   test-suite.

pub mod dist;
pub mod error;
pub mod lam;
pub mod levy;
pub mod ncp;
pub mod oracle;
pub mod paths;
pub mod perm;
pub mod rng;
pub mod sample;
pub mod tree;
pub mod verify;

pub use error::Error;
pub use rng::RngStream;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
