use serde::{Deserialize, Serialize};

use crate::mesh::CartesianMesh;

use super::AssemblyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// Boundary vertex values and boundary normal-derivative means vanish.
    Clamped,
    /// Only boundary vertex values vanish.
    SimplySupported,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            Self::Clamped => "clamped",
            Self::SimplySupported => "simply-supported",
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamped" => Ok(Self::Clamped),
            "simply-supported" | "simply_supported" | "ss" => Ok(Self::SimplySupported),
            other => Err(format!("unknown boundary condition `{other}`")),
        }
    }
}

/// A mesh entity carrying one global DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Entity {
    Vertex(usize),
    /// Facet DOF: mean derivative along the facet's global (`+axis`) normal.
    Facet(usize),
}

/// One element-local DOF seen globally: the free index, if any, and the sign
/// relating the local outward DOF to the global one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDof {
    pub global: Option<usize>,
    pub sign: f64,
}

/// Global numbering of the free DOFs. Vertex DOFs come first, then facet
/// DOFs, each in increasing entity order.
#[derive(Debug, Clone)]
pub struct DofMap {
    mesh: CartesianMesh,
    bc: BoundaryCondition,
    vertex_dof: Vec<Option<usize>>,
    facet_dof: Vec<Option<usize>>,
    free_entities: Vec<Entity>,
    local_per_element: usize,
    gather: Vec<LocalDof>,
}

impl DofMap {
    pub fn new(mesh: &CartesianMesh, bc: BoundaryCondition) -> Result<Self, AssemblyError> {
        let dim = mesh.dim();
        let mut free_entities = Vec::new();
        let mut vertex_dof = Vec::with_capacity(mesh.vertex_count());
        for v in 0..mesh.vertex_count() {
            if mesh.is_boundary_vertex(v) {
                vertex_dof.push(None);
            } else {
                vertex_dof.push(Some(free_entities.len()));
                free_entities.push(Entity::Vertex(v));
            }
        }
        let mut facet_dof = Vec::with_capacity(mesh.facet_count());
        for f in 0..mesh.facet_count() {
            if bc == BoundaryCondition::Clamped && mesh.is_boundary_facet(f) {
                facet_dof.push(None);
            } else {
                facet_dof.push(Some(free_entities.len()));
                free_entities.push(Entity::Facet(f));
            }
        }
        let local_per_element = (1 << dim) + 2 * dim;
        let mut gather = Vec::with_capacity(mesh.element_count() * local_per_element);
        for e in 0..mesh.element_count() {
            for v in mesh.element_vertices(e)? {
                gather.push(LocalDof {
                    global: vertex_dof[v],
                    sign: 1.0,
                });
            }
            for f in mesh.element_facets(e)? {
                gather.push(LocalDof {
                    global: facet_dof[f.id],
                    sign: f64::from(f.sign),
                });
            }
        }
        Ok(Self {
            mesh: mesh.clone(),
            bc,
            vertex_dof,
            facet_dof,
            free_entities,
            local_per_element,
            gather,
        })
    }

    pub fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn free_count(&self) -> usize {
        self.free_entities.len()
    }

    /// All entities, free or not.
    pub fn total_count(&self) -> usize {
        self.vertex_dof.len() + self.facet_dof.len()
    }

    pub fn constrained_count(&self) -> usize {
        self.total_count() - self.free_count()
    }

    pub fn local_per_element(&self) -> usize {
        self.local_per_element
    }

    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dof[v]
    }

    pub fn facet_dof(&self, f: usize) -> Option<usize> {
        self.facet_dof[f]
    }

    pub fn entity_dof(&self, entity: Entity) -> Option<usize> {
        match entity {
            Entity::Vertex(v) => self.vertex_dof[v],
            Entity::Facet(f) => self.facet_dof[f],
        }
    }

    /// Entity of free DOF `i`.
    pub fn entity(&self, i: usize) -> Entity {
        self.free_entities[i]
    }

    pub fn free_entities(&self) -> &[Entity] {
        &self.free_entities
    }

    /// Gather list of element `e` in reference-DOF order.
    pub fn element_dofs(&self, e: usize) -> &[LocalDof] {
        let k = self.local_per_element;
        &self.gather[e * k..(e + 1) * k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_counts() {
        let m = CartesianMesh::unit(2, 4).unwrap();
        assert_eq!(DofMap::new(&m, BoundaryCondition::Clamped).unwrap().free_count(), 33);
        assert_eq!(
            DofMap::new(&m, BoundaryCondition::SimplySupported).unwrap().free_count(),
            49
        );
        let m = CartesianMesh::unit(3, 2).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        assert_eq!(d.free_count(), 13);
        assert_eq!(d.total_count(), 27 + 36);
    }

    #[test]
    fn shared_facet_has_opposite_signs() {
        let m = CartesianMesh::unit(2, 2).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        // elements 0 and 1 share the facet on element 0's +x1 side
        let a = d.element_dofs(0)[4 + 1];
        let b = d.element_dofs(1)[4];
        assert_eq!(a.global, b.global);
        assert!(a.global.is_some());
        assert_eq!(a.sign, 1.0);
        assert_eq!(b.sign, -1.0);
    }

    #[test]
    fn parse_bc() {
        assert_eq!("clamped".parse::<BoundaryCondition>().unwrap(), BoundaryCondition::Clamped);
        assert_eq!(
            "simply-supported".parse::<BoundaryCondition>().unwrap(),
            BoundaryCondition::SimplySupported
        );
        assert!("free".parse::<BoundaryCondition>().is_err());
    }
}
