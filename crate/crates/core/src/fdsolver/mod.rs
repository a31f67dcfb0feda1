//! Dirichlet solver for the discrete Pucci and Laplace equations on gridded
//! planar domains.
//!
//! Each inside node carries one second difference per stencil direction;
//! arms leaving the domain are cut at the boundary. Nodal equations are
//! solved exactly for the centre value and swept with over-relaxed
//! nonlinear Gauss–Seidel in alternating orders.

mod domain;
mod io;
mod solve;

pub use domain::{Crossing, GridDomain, Part, Shape, DEFAULT_PAD};
pub use io::{read_csv, write_csv, SolutionHeader};
pub use solve::{solve, BoundaryData, Problem, SolveOptions, SolveReport, DEFAULT_MAX_ITER, DEFAULT_REL_TOL};
