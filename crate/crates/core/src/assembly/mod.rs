//! Global DOF numbering, element matrices, sparse assembly and discrete fields.

pub mod dofmap;
pub mod field;
pub mod identity;
pub mod sparse;

use thiserror::Error;

use crate::element::{physical_dof_scaling, ReferenceElement};
use crate::linalg::DenseMatrix;
use crate::mesh::MeshError;
use crate::operators::identities::hessian_product_reference;
use crate::operators::OperatorError;
use crate::quadrature::QuadratureError;

pub use dofmap::{BoundaryCondition, DofMap, Entity, LocalDof};
pub use field::{broken_energy_inner, interpolate_global, l2_inner, FemField, Operand};
pub use identity::{eigen_error_identity_terms, IdentityTerms};
pub use sparse::SymmetricSparseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("reference element is {element}D but the mesh is {mesh}D")]
    DimensionMismatch { element: usize, mesh: usize },
    #[error("function violates the boundary condition: constrained DOF of {entity:?} is {value:e}")]
    IncompatibleBoundary { entity: Entity, value: f64 },
    #[error("field has {got} coefficients, expected {expected}")]
    FieldLength { got: usize, expected: usize },
    #[error("eigenfunction has zero norm")]
    ZeroNorm,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Element matrices on `[-1, 1]^dim` for the reference nodal basis, computed
/// by exact polynomial integration.
#[derive(Debug, Clone)]
pub struct ReferenceMatrices {
    pub dim: usize,
    pub stiffness: DenseMatrix,
    pub mass: DenseMatrix,
}

impl ReferenceMatrices {
    pub fn new(reference: &ReferenceElement) -> Self {
        let basis = reference.basis();
        let n = basis.len();
        let mut stiffness = DenseMatrix::zeros(n, n);
        let mut mass = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let k = hessian_product_reference(&basis[i], &basis[j]);
                let m = (&basis[i] * &basis[j]).integrate_box();
                stiffness[(i, j)] = k;
                stiffness[(j, i)] = k;
                mass[(i, j)] = m;
                mass[(j, i)] = m;
            }
        }
        Self {
            dim: reference.dim(),
            stiffness,
            mass,
        }
    }

    /// Stiffness and mass for the physical nodal basis on a cell of half-width `h`.
    ///
    /// With `D = diag(physical_dof_scaling)`, `Ke = h^(dim-4) D^-1 K D^-1` and
    /// `Me = h^dim D^-1 M D^-1`.
    pub fn physical(&self, h: f64) -> (DenseMatrix, DenseMatrix) {
        let s = physical_dof_scaling(self.dim, h);
        let n = s.len();
        let kscale = h.powi(self.dim as i32 - 4);
        let mscale = h.powi(self.dim as i32);
        let mut ke = DenseMatrix::zeros(n, n);
        let mut me = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d = s[i] * s[j];
                ke[(i, j)] = kscale * self.stiffness[(i, j)] / d;
                me[(i, j)] = mscale * self.mass[(i, j)] / d;
            }
        }
        (ke, me)
    }
}

/// Element stiffness and mass matrices for a cell of half-width `h`.
pub fn element_matrices(reference: &ReferenceElement, h: f64) -> (DenseMatrix, DenseMatrix) {
    ReferenceMatrices::new(reference).physical(h)
}

/// Global stiffness `A` and mass `M` on the free DOFs.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: SymmetricSparseMatrix,
    pub mass: SymmetricSparseMatrix,
}

fn check_dims(reference: &ReferenceElement, dofmap: &DofMap) -> Result<(), AssemblyError> {
    if reference.dim() != dofmap.mesh().dim() {
        return Err(AssemblyError::DimensionMismatch {
            element: reference.dim(),
            mesh: dofmap.mesh().dim(),
        });
    }
    Ok(())
}

/// Assembles `A` and `M`, eliminating constrained DOFs. Entries are summed in
/// a fixed order, so the result is reproducible bit for bit.
pub fn assemble(dofmap: &DofMap, reference: &ReferenceElement) -> Result<AssembledSystem, AssemblyError> {
    check_dims(reference, dofmap)?;
    let mesh = dofmap.mesh();
    let (ke, me) = element_matrices(reference, mesh.half_width());
    let nloc = dofmap.local_per_element();
    let mut kt = Vec::with_capacity(mesh.element_count() * nloc * (nloc + 1) / 2);
    let mut mt = Vec::with_capacity(kt.capacity());
    for e in 0..mesh.element_count() {
        let g = dofmap.element_dofs(e);
        for a in 0..nloc {
            let Some(ga) = g[a].global else { continue };
            for b in 0..nloc {
                let Some(gb) = g[b].global else { continue };
                if gb > ga {
                    continue;
                }
                let s = g[a].sign * g[b].sign;
                kt.push((ga, gb, s * ke[(a, b)]));
                mt.push((ga, gb, s * me[(a, b)]));
            }
        }
    }
    let n = dofmap.free_count();
    Ok(AssembledSystem {
        stiffness: SymmetricSparseMatrix::from_triplets(n, &kt),
        mass: SymmetricSparseMatrix::from_triplets(n, &mt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::build_reference_element;
    use crate::mesh::CartesianMesh;

    #[test]
    fn reference_matrices_are_symmetric_semidefinite() {
        for dim in [2, 3] {
            let r = build_reference_element(dim).unwrap();
            let rm = ReferenceMatrices::new(&r);
            assert!(rm.stiffness.max_abs_diff(&rm.stiffness.transpose()) == 0.0);
            // constants lie in the kernel of the stiffness
            let ones: Vec<f64> = (0..r.ndofs()).map(|k| if k < 1 << dim { 1.0 } else { 0.0 }).collect();
            let ko = rm.stiffness.matvec(&ones);
            assert!(ko.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn stiffness_scaling_modulo_dof_scaling() {
        let r = build_reference_element(2).unwrap();
        let rm = ReferenceMatrices::new(&r);
        for h in [0.5, 0.125] {
            let (ke, me) = rm.physical(h);
            let s = physical_dof_scaling(2, h);
            for i in 0..r.ndofs() {
                for j in 0..r.ndofs() {
                    let k = ke[(i, j)] * s[i] * s[j] / h.powi(-2);
                    let m = me[(i, j)] * s[i] * s[j] / h.powi(2);
                    assert!((k - rm.stiffness[(i, j)]).abs() < 1e-9 * (1.0 + k.abs()));
                    assert!((m - rm.mass[(i, j)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn assembled_sizes_and_symmetry() {
        let r = build_reference_element(2).unwrap();
        let m = CartesianMesh::unit(2, 4).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        let sys = assemble(&d, &r).unwrap();
        assert_eq!(sys.stiffness.order(), 33);
        let dense = sys.mass.to_dense();
        assert_eq!(dense.max_abs_diff(&dense.transpose()), 0.0);
        assert!(sys.mass.diagonal().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let r = build_reference_element(3).unwrap();
        let m = CartesianMesh::unit(2, 2).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        assert!(matches!(
            assemble(&d, &r),
            Err(AssemblyError::DimensionMismatch { element: 3, mesh: 2 })
        ));
    }
}
