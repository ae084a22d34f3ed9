//! Symbolic summation of hypergeometric terms.
//!
//! The crate finds closed forms for indefinite sums, rational certificates
//! for definite-sum identities, and holonomic recurrences for parametrized
//! definite sums, all in exact rational arithmetic.

pub mod error;
pub mod gosper;
pub mod wz;
pub mod zeilberger;
pub mod parse;
pub mod printer;
pub mod term;
pub mod linsolve;
pub mod poly;
pub mod ratfunc;
pub mod simplify;
pub mod rational;
pub mod var;

pub use error::{Error, Result};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::Rat;
pub use var::{Var, K, N};
