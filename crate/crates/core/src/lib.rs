//! Exact-arithmetic verification engine for splitting sequences of low-degree
//! covers of curves over small finite fields.
//!
//! Given a candidate pair of point-count profiles for a curve `C` over F_q and
//! a degree-`d` cover `C'`, the engine searches for splitting sequences (per-degree
//! multisets of splitting types) compatible with the point counts, with the
//! admissible cycle types of a chosen Galois group, and with the existence of
//! Weil polynomials for the isogeny factors of the Jacobian of the Galois
//! closure. All arithmetic is exact; there are no tolerance parameters.
//!
//! Layers, bottom up:
//! - [`poly`]: integer polynomial arithmetic and Sturm-based certification that
//!   all roots are real and lie in `[-2*sqrt(q), 2*sqrt(q)]`.
//! - [`weil`]: real Weil polynomials, Frobenius data, point-count profiles, and
//!   enumeration of real Weil polynomials under prescribed power sums and value
//!   filters.
//! - [`cover`]: splitting types, group cases with their conversion tables, and
//!   the linear trace relations for quotient curves.
//! - [`sieve`]: the depth-limited backtracking search with static checks,
//!   count-matching extension, and Weil-existence pruning.
//! - [`cases`]: candidate rows, the case-file format, the bundled dataset, and
//!   completion of rows into full Weil-polynomial pairs.

pub mod cases;
pub mod cover;
pub mod poly;
pub mod sieve;
pub mod weil;

/// Exact integer scalar used by the polynomial layer.
pub type Int = num_bigint::BigInt;

/// Crate version, reported by the CLI and embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
