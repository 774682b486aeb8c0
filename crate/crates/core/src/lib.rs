//! Covering algorithms, doubling constants and Besicovitch-type covering
//! properties on finite metric spaces, computed with exact rationals.

pub mod ball;
pub mod besicovitch;
pub mod clique;
pub mod covering;
pub mod doubling;
pub mod error;
pub mod gallery;
pub mod generators;
pub mod io;
pub mod nets;
pub mod pointset;
pub mod rational;
pub mod setcover;
pub mod space;

pub use ball::{Ball, BallFamily};
pub use error::{Error, Result};
pub use pointset::PointSet;
pub use rational::Rational;
pub use space::{BallKind, Encoding, FiniteMetricSpace};
