//! Riemannian optimization for low-rank tensor completion on the manifold of
//! tensors with fixed multilinear (Tucker) rank.
//!
//! The crate provides dense and sampled tensors ([`tensor`], [`sampled`]),
//! Tucker-format tensors ([`tucker`]), the Riemannian geometry of the
//! fixed-rank manifold with exact, Gauss–Newton and finite-difference
//! Hessians ([`manifold`]), and trust-region and first-order solvers
//! ([`solver`]).

pub mod contract;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod sampled;
pub mod solver;
pub mod tensor;
pub mod tucker;

pub use contract::{Contract, ModeOp};
pub use error::{Error, Result};
pub use manifold::{
    curvature_term, hessian_exact, hessian_fd, hessian_gauss_newton, project_to_tangent, retract,
    riemannian_gradient, vector_transport, weingarten_dproj, HessianContext, ManifoldPoint,
    TangentVector,
};
pub use sampled::{sample_project, SampledTensor};
pub use solver::{
    nonlinear_cg_solve, steepest_descent_solve, trust_region_solve, HessianModel, SolverConfig,
    SolverOutput, SolverTrace,
};
pub use tensor::DenseTensor;
pub use tucker::{manifold_dimension, singular_spectrum, TuckerTensor};
