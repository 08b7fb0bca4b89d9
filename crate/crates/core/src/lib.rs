//! Lattice decoding for compute-and-forward relaying, with a seeded Monte
//! Carlo harness for error-rate sweeps.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod code;
pub mod diophantine;
pub mod error;
pub mod fading;
pub mod gaussian;
pub mod lattice;
pub mod selection;
pub mod sim;

pub use code::NestedLatticeCode;
pub use diophantine::{extended_gcd, hnf_solve, solve_pair, DiophantineSolution, PairSolutionFamily};
pub use error::{LatticeError, Result};
pub use fading::{ida_decode, IdaDecision, LikelihoodGeometry, ScaledObservation};
pub use gaussian::{GaussianDecoder, NoiseRatio, SumCodebook};
pub use lattice::{closest_point, shortest_vector, IntegerBox, Lattice};
pub use selection::{computation_rate, optimal_alpha, optimal_coefficients, ChannelRealization, NetworkCodeVector};
