//! Irreducibility and absolute irreducibility of integer-valued polynomials.
//!
//! An element of `Int(Z) = { f in Q[x] : f(Z) ⊆ Z }` is written in standard
//! form `a * prod(g_i) / b`. Connectivity of the essential graph of the
//! `g_i` proves irreducibility; connectivity of the quintessential graph
//! proves absolute irreducibility, and for square-free `b` its failure
//! yields an explicit second factorization of `f^3`. A brute-force oracle
//! over divisor exponent shapes provides independent ground truth.

pub mod criteria;
pub mod error;
pub mod essential;
pub mod graph;
pub mod irreducible;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod prime;
pub mod report;
pub mod scalar;
pub mod standard_form;

pub use error::{Error, Result};
pub use essential::{classify, Classification, ClassificationGrid, Kind};
pub use graph::LabeledGraph;
pub use poly::Poly;
pub use prime::{padic_valuation, Prime, Valuation};
pub use scalar::Scalar;
pub use standard_form::{fixed_divisor, fixed_divisor_p, relevant_primes, MembershipReport, StandardForm};

/// Arbitrary-precision integers, the coefficient type used for analysis.
pub type Int = num_bigint::BigInt;
/// Polynomials over [`Int`].
pub type IntPoly = Poly<Int>;
/// Machine-word polynomials for quick experiments where overflow is not a concern.
pub type SmallPoly = Poly<i64>;
