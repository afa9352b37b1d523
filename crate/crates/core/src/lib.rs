//! Layer-adapted meshes for singularly perturbed two-point boundary value
//! problems, with upwind, central and P1 finite-element solvers, mesh
//! diagnostics, an adaptive equidistribution loop and a convergence harness.

pub mod adapt;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod quadrature;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
pub use adapt::{ks_adapt, AdaptTrace, StopReason};
pub use diagnostics::{mesh_report, MeshReport};
pub use harness::{convergence_study, dl_robustness_study, ConvergenceReport, RateModel, StudyConfig};
pub use mesh::{generate, GeneratedMesh, LayerSide, Mesh1D, MeshFamily, MeshSpec, Psi};
pub use solver::{manufactured_problem, solve, DiscreteSolution, ProblemKind, Scheme, SpProblem};
