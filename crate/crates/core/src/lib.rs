//! Exact truncated Poincaré-series realizations of the classes of moduli of
//! semistable Higgs bundles and of α-semistable chains on a curve.
//!
//! The pipeline is: [`kernel`] classes of atomic motives, [`chain`]
//! combinatorics of chain invariants, the memoized wall-crossing recursion in
//! [`engine`], and the Białynicki-Birula assembly in [`higgs`]. [`oracle`]
//! holds closed forms for rank two that share nothing with the recursion.

pub mod chain;
pub mod engine;
mod enumerate;
pub mod error;
pub mod higgs;
pub mod kernel;
pub mod oracle;
pub mod polytope;
pub mod series;

pub use chain::{ChainInvariants, HnType, Side, StabilityParameter, WallEvent};
pub use engine::Engine;
pub use error::{Error, Result};
pub use higgs::{FixedComponentType, HiggsBreakdown};
pub use kernel::CurveContext;
pub use series::{Coefficient, TruncatedSeries};

/// The series ring every public computation lives in.
pub type Series = TruncatedSeries<num_bigint::BigInt>;

/// Exact rationals used for stability parameters and slopes.
pub type Rational = num_rational::BigRational;
