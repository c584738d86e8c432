//! Interpolation and projection operators on a single cell, bubble
//! functions, and the checks built on them.

pub mod bubbles;
pub mod convergence;
pub mod identities;
pub mod interpolation;
pub mod projection;

use thiserror::Error;

use crate::element::ElementError;
use crate::mesh::MeshError;
use crate::quadrature::QuadratureError;

pub use bubbles::{build_bubbles, max_dof_residual, printed_p_bubbles, Bubble, BubbleFamily, BubbleSet};
pub use convergence::{interpolation_convergence_probe, least_squares_slope, ConvergenceProbe};
pub use identities::{
    bubble_expansion, random_identity_pair, refined_identity_check, taylor_error_leading_term,
    uncovered_quartics, IdentityCheck,
};
pub use interpolation::{
    canonical_interpolate, canonical_interpolate_function, cell_dofs, FacetQuadrature,
    InterpolationResult,
};
pub use projection::{commuting_check, moment_project};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("facet quadrature order {requested} is below the configured minimum {minimum}")]
    QuadratureOrder { requested: usize, minimum: usize },
    #[error("expected a polynomial of degree at most 4, got degree {0}")]
    NotQuartic(u32),
    #[error("test function is not in the Morley shape space")]
    NotInShapeSpace,
    #[error("polynomial dimensions do not match the element")]
    DimensionMismatch,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
