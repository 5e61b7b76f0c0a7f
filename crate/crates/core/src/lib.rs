//! Harmonic (analytic) center of a bounded n-simplex given as `A x <= b`.
//!
//! A simplex here is n+1 half-spaces in n dimensions whose first n rows form a
//! nonsingular block. Everything is built around the row multipliers `gamma`
//! that express the last row as `-sum(gamma_i * row_i)`: they decide
//! boundedness, give a linear expression of the residuals that is constant over
//! the simplex, and yield the residuals at the center in closed form. A damped
//! Newton solver on the log-barrier provides an independent route to the same
//! point.
//!
//! Rows are indexed from 0 internally. User-facing messages and reports label
//! rows from 1, with the last row being `n+1`.

// `!(x <= tol)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod center;
pub mod cli;
pub mod construct;
pub mod error;
pub mod gamma;
pub mod io;
mod linalg;
pub mod probe;
pub mod simplex;
pub mod verify;

pub use center::{
    center_closed_form, center_newton, cross_check_center, skewed_start, CenterResult, Method,
    SolverConfig,
};
pub use construct::{
    enumerate_vertices, make_equal_gamma_simplex, random_bounded_simplex, GeneratorConfig,
    VertexSet,
};
pub use error::{Error, Result};
pub use gamma::{
    check_bounded, compute_gamma, evaluate_invariant, find_recession_direction, Boundedness,
    GammaDecomposition,
};
pub use probe::{
    axis_distances, direction_from_beta, harmonic_point_on_line, last_facet_distance, probe_line,
    LineProbe,
};
pub use simplex::{classify_point, evaluate_residuals, normalize_rows, Location, Point, Residuals, Simplex};
