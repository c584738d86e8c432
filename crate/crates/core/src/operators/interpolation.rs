use crate::element::{facet_of, physical_dof_scaling, reference_vertex, Polynomial, ReferenceElement};
use crate::functions::SmoothFunction;
use crate::mesh::ElementGeometry;
use crate::quadrature::facet_rule;

use super::OperatorError;

/// Facet quadrature settings for non-polynomial interpolation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacetQuadrature {
    /// Gauss points per facet axis.
    pub order: usize,
    /// Requests below this order are refused.
    pub min_order: usize,
}

impl Default for FacetQuadrature {
    fn default() -> Self {
        Self {
            order: crate::quadrature::DEFAULT_ORDER,
            min_order: 2,
        }
    }
}

impl FacetQuadrature {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterpolationResult {
    /// Interpolant in reference coordinates of the cell.
    pub interpolant: Polynomial,
    /// Element DOF values (physical for function inputs, reference for polynomial inputs).
    pub coefficients: Vec<f64>,
    /// `f - Π_K f` when `f` is a polynomial.
    pub error: Option<Polynomial>,
}

/// `Π_K f` for a polynomial given in reference coordinates on `[-1, 1]^dim`.
pub fn canonical_interpolate(reference: &ReferenceElement, f: &Polynomial) -> InterpolationResult {
    let coefficients = reference.dof_values(f);
    let interpolant = reference.combine(&coefficients).pruned(1e-14);
    let error = (f - &interpolant).pruned(1e-14);
    InterpolationResult {
        interpolant,
        coefficients,
        error: Some(error),
    }
}

/// Physical DOF values of `f` on a cell: vertex values and mean outward normal
/// derivatives, the latter by facet Gauss quadrature.
pub fn cell_dofs(
    reference: &ReferenceElement,
    f: &dyn SmoothFunction,
    geometry: &ElementGeometry,
    quad: FacetQuadrature,
) -> Result<Vec<f64>, OperatorError> {
    if quad.order < quad.min_order {
        return Err(OperatorError::QuadratureOrder {
            requested: quad.order,
            minimum: quad.min_order,
        });
    }
    let dim = reference.dim();
    let mut dofs = Vec::with_capacity(reference.ndofs());
    for v in 0..(1 << dim) {
        dofs.push(f.value(&geometry.to_physical(&reference_vertex(dim, v))));
    }
    for facet in 0..2 * dim {
        let (axis, side) = facet_of(facet);
        let rule = facet_rule(dim, axis, side, quad.order)?;
        let total = rule.integrate(|p| f.gradient(&geometry.to_physical(p))[axis]);
        dofs.push(side.sign() * total / rule.weight_sum());
    }
    Ok(dofs)
}

/// `Π_K f` for an analytic function on a physical cell.
pub fn canonical_interpolate_function(
    reference: &ReferenceElement,
    f: &dyn SmoothFunction,
    geometry: &ElementGeometry,
    quad: FacetQuadrature,
) -> Result<InterpolationResult, OperatorError> {
    let coefficients = cell_dofs(reference, f, geometry, quad)?;
    let interpolant = reference_polynomial(reference, &coefficients, geometry.h);
    Ok(InterpolationResult {
        interpolant,
        coefficients,
        error: None,
    })
}

/// The shape function with the given physical DOFs, in reference coordinates.
pub fn reference_polynomial(reference: &ReferenceElement, physical_dofs: &[f64], h: f64) -> Polynomial {
    let scale = physical_dof_scaling(reference.dim(), h);
    let reference_dofs: Vec<f64> = physical_dofs.iter().zip(&scale).map(|(d, s)| d / s).collect();
    reference.combine(&reference_dofs)
}
