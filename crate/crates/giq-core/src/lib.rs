//! giq-core: an exact-arithmetic engine for linearized compact-group
//! actions described by weight data. It computes unstable-stratum
//! index sets and codimensions, balance verdicts, equivariant and
//! intersection Poincare series, the truncated subspace of equivariant
//! cohomology cut out by fixed-locus restrictions, and the resulting
//! intersection-pairing matrices with exact determinants and
//! signatures.
//!
//! Everything is exact: coefficients are arbitrary-precision
//! rationals, Groebner bases and normal forms are computed over the
//! rationals, the min-norm subproblem runs Wolfe's method without
//! tolerances, and signatures come from congruence diagonalization.
//!
//! Module map:
//! - [`poly`]: graded polynomials and ring maps;
//! - [`groebner`]: reduced Groebner bases, normal forms, graded
//!   dimensions;
//! - [`weights`]: min-norm points, index sets, codimensions;
//! - [`balance`]: the strict balance inequalities on slice data;
//! - [`series`]: rational-function series, Morse assembly, presets;
//! - [`truncation`]: restriction matrices and kernel bases;
//! - [`pairing`]: pairing blocks, determinants, signatures;
//! - [`problem`] / [`presets`] / [`pipeline`]: problem files, built-in
//!   instances and the end-to-end driver.

pub mod balance;
pub mod error;
pub mod groebner;
pub mod linalg;
pub mod pairing;
pub mod pipeline;
pub mod poly;
pub mod presets;
pub mod problem;
pub mod rational;
pub mod series;
pub mod truncation;
pub mod weights;

pub use error::{Error, Result};
