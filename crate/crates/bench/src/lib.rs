//! Shared fixtures for the benchmarks.

use morley_core::assembly::AssembledSystem;
use morley_core::{assemble, build_reference_element, BoundaryCondition, CartesianMesh, DofMap};

/// Assembled stiffness and mass matrices on the unit box.
pub fn system(dim: usize, n: usize, bc: BoundaryCondition) -> AssembledSystem {
    let reference = build_reference_element(dim).expect("reference element");
    let mesh = CartesianMesh::unit(dim, n).expect("mesh");
    let dofmap = DofMap::new(&mesh, bc).expect("dof map");
    assemble(&dofmap, &reference).expect("assembly")
}
