//! Exact computation of Gaussian-map ranks for cyclic covers of the line.
//!
//! The pipeline: a cyclic monodromy datum ([`monodromy`]) determines a curve
//! `y^m = prod (x - t_i)^{a_i}`; [`cover`] expands `x` and a basis of
//! holomorphic forms as truncated series ([`series`]) at a totally ramified
//! point; [`gaussian`] builds the multiplication map, its kernel `I_2(K)` and
//! the Gaussian maps, whose ranks come from exact elimination ([`linalg`]).

pub mod cache;
pub mod cover;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod monodromy;
pub mod series;
pub mod table;
pub mod witness;

pub use rug::{Integer, Rational};

pub use cover::{branch_solve, canonical_form_basis, CoverModel, FormBasis};
pub use error::{CoverError, GaussianError, MonodromyError, SeriesError};
pub use gaussian::{PrecisionPolicy, RankReport};
pub use linalg::RationalMatrix;
pub use monodromy::{default_branch_points, enumerate_galois, GaloisFamilyClass, MonodromyDatum};
pub use series::{TruncatedSeries, VanishingOrder};
