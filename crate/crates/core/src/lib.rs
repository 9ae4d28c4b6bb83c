//! Fast least-squares solvers for Gaussian RBF approximation and
//! boundary value problems on irregular domains.
//!
//! A domain is embedded in a periodic box. Gaussian centers on a uniform
//! grid of the box, collocated on an oversampled grid, give a block-circulant
//! collocation matrix that FFTs diagonalize exactly. Restricting to the
//! points inside the domain destroys that structure; the AZ algorithm
//! recovers it by using the periodic pseudo-inverse as the approximate
//! inverse `Z*` and solving only a low-rank correction with a randomized
//! truncated SVD.

pub mod approx;
pub mod azcore;
pub mod bvp;
pub mod circulant;
pub mod error;
pub mod geometry;
pub mod kernel;

pub use approx::{
    build_approx_problem_1d, build_approx_problem_2d, evaluate_expansion, max_error, ApproxConfig,
    AxisConfig, Discretization, Expansion, ReferenceFn,
};
pub use azcore::{
    az_solve, dense_tsvd_lsq, numerical_rank, operator_norm_estimate, randomized_lsq,
    randomized_lsq_floored, AZProblem, AZReport, DenseMatrix, LinearOperator, OperatorHandle,
    SolverConfig,
};
pub use bvp::{build_ode_problem, build_pde_problem, BcKind, BoundaryCondition, BvpProblem};
pub use circulant::{
    assemble_symbol, periodic_solve, symbol_pinv, BlockSymbol, CirculantOperator, SymbolPinv,
    TensorSymbol, C64,
};
pub use error::{Error, Result};
pub use geometry::{BoundaryPoint, Domain, Grid1D, IndexSelection};
pub use kernel::{bandwidth, shape_constant, Derivative, KernelSpec};
