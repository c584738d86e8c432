//! Rectangular Morley finite elements for the biharmonic eigenvalue problem
//! `Δ²u = λu` on the unit square and cube.

pub mod assembly;
pub mod eigensolve;
pub mod element;
pub mod functions;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod study;
pub mod verify;

pub use element::{build_reference_element, Polynomial, ReferenceElement};
pub use mesh::{build_mesh, BoxDomain, CartesianMesh};
pub use assembly::{assemble, BoundaryCondition, DofMap, FemField, SymmetricSparseMatrix};
pub use eigensolve::{solve, EigenResult, SolverKind, SolverOptions};
pub use study::{run_study, ReportRow, StudyConfig, StudyReport, TableId};
pub use verify::{run_verification, Suite, VerifyConfig, VerifyReport};
