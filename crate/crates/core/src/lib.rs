//! Exact tropical and supertropical matrix ranks.
//!
//! The crate covers supertropical scalar arithmetic, permanents and tropical
//! rank, the symmetrization map between tropical matrices with paired rows and
//! supertropical matrices, finite Puiseux-series liftings with exact rank over
//! the series field, the `Phi(M)` construction built from a 0-1 matrix, and a
//! seeded sampler for 0-1 matrices with many ones and no large all-ones block.
//!
//! All arithmetic is exact. Values live in the rationals; transcendental
//! quantities used by the probability bounds are carried as rational interval
//! enclosures.

pub mod assignment;
pub mod construction;
pub mod error;
pub mod field;
pub mod interval;
pub mod io;
pub mod matrix;
pub mod puiseux;
pub mod rational;
pub mod sampler;
pub mod semiring;
pub mod symmetrize;

pub use construction::{GoodTuple, PhiMatrix, ZeroOneMatrix};
pub use error::{Error, Result};
pub use field::{Field, FieldElem};
pub use interval::Interval;
pub use matrix::{Matrix, RankWitness};
pub use puiseux::{PuiseuxPoly, SeriesMatrix};
pub use rational::Rat;
pub use sampler::{SamplerParams, SeparationReport};
pub use semiring::Scalar;
pub use symmetrize::SymmetrizedMatrix;
