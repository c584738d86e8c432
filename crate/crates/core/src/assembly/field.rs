use std::io::{self, Write};

use crate::element::{physical_dof_scaling, Exponent, Polynomial, ReferenceElement};
use crate::functions::SmoothFunction;
use crate::operators::{FacetQuadrature, OperatorError};
use crate::quadrature::{facet_rule, tensor_rule, QuadRule, Side};

use super::{AssemblyError, DofMap, Entity, ReferenceMatrices};

/// A discrete function: one coefficient per free DOF of a [`DofMap`].
/// Constrained DOFs are zero.
#[derive(Debug, Clone)]
pub struct FemField<'a> {
    dofmap: &'a DofMap,
    values: Vec<f64>,
}

impl<'a> FemField<'a> {
    pub fn new(dofmap: &'a DofMap, values: Vec<f64>) -> Result<Self, AssemblyError> {
        if values.len() != dofmap.free_count() {
            return Err(AssemblyError::FieldLength {
                got: values.len(),
                expected: dofmap.free_count(),
            });
        }
        Ok(Self { dofmap, values })
    }

    pub fn zeros(dofmap: &'a DofMap) -> Self {
        Self {
            dofmap,
            values: vec![0.0; dofmap.free_count()],
        }
    }

    pub fn dofmap(&self) -> &'a DofMap {
        self.dofmap
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dofmap: self.dofmap,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `self - other` on the same DOF map.
    pub fn difference(&self, other: &Self) -> Self {
        assert!(std::ptr::eq(self.dofmap, other.dofmap), "fields live on different DOF maps");
        Self {
            dofmap: self.dofmap,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// Value of the DOF attached to `entity` (zero when constrained).
    pub fn entity_value(&self, entity: Entity) -> f64 {
        self.dofmap.entity_dof(entity).map_or(0.0, |i| self.values[i])
    }

    /// Physical element DOFs of element `e` with outward normal orientation.
    pub fn element_values(&self, e: usize) -> Vec<f64> {
        self.dofmap
            .element_dofs(e)
            .iter()
            .map(|d| d.global.map_or(0.0, |g| d.sign * self.values[g]))
            .collect()
    }

    /// Restriction to element `e` in its reference coordinates.
    pub fn element_polynomial(&self, reference: &ReferenceElement, e: usize) -> Polynomial {
        let h = self.dofmap.mesh().half_width();
        crate::operators::interpolation::reference_polynomial(reference, &self.element_values(e), h)
    }

    /// Writes `kind,id,value` rows for every vertex and facet of the mesh.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "kind,id,value")?;
        let mesh = self.dofmap.mesh();
        for v in 0..mesh.vertex_count() {
            writeln!(w, "vertex,{v},{:.17e}", self.entity_value(Entity::Vertex(v)))?;
        }
        for f in 0..mesh.facet_count() {
            writeln!(w, "facet,{f},{:.17e}", self.entity_value(Entity::Facet(f)))?;
        }
        Ok(())
    }
}

/// Global DOF value of `f` for one entity. Facet values use the facet's
/// `+axis` normal.
fn entity_dof_value(
    f: &dyn SmoothFunction,
    dofmap: &DofMap,
    entity: Entity,
    rules: &[QuadRule],
) -> f64 {
    let mesh = dofmap.mesh();
    match entity {
        Entity::Vertex(v) => f.value(&mesh.vertex_point(v)),
        Entity::Facet(id) => {
            let (axis, _) = mesh.facet_coords(id);
            let c = mesh.facet_center(id);
            let h = mesh.half_width();
            let rule = &rules[axis];
            let total = rule.integrate(|xi| {
                let mut x = c;
                for d in 0..mesh.dim() {
                    if d != axis {
                        x[d] += h * xi[d];
                    }
                }
                f.gradient(&x)[axis]
            });
            total / rule.weight_sum()
        }
    }
}

/// Global Morley interpolant of `f`. Fails if a constrained DOF of `f`
/// exceeds `tol` in absolute value.
pub fn interpolate_global<'a>(
    f: &dyn SmoothFunction,
    dofmap: &'a DofMap,
    quad: FacetQuadrature,
    tol: f64,
) -> Result<FemField<'a>, AssemblyError> {
    if quad.order < quad.min_order {
        return Err(OperatorError::QuadratureOrder {
            requested: quad.order,
            minimum: quad.min_order,
        }
        .into());
    }
    let mesh = dofmap.mesh();
    let dim = mesh.dim();
    let rules = (0..dim)
        .map(|a| facet_rule(dim, a, Side::Plus, quad.order))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = vec![0.0; dofmap.free_count()];
    let entities = (0..mesh.vertex_count())
        .map(Entity::Vertex)
        .chain((0..mesh.facet_count()).map(Entity::Facet));
    for entity in entities {
        let value = entity_dof_value(f, dofmap, entity, &rules);
        match dofmap.entity_dof(entity) {
            Some(i) => values[i] = value,
            None if value.abs() > tol => {
                return Err(AssemblyError::IncompatibleBoundary { entity, value });
            }
            None => {}
        }
    }
    FemField::new(dofmap, values)
}

/// Argument of the broken inner products.
#[derive(Clone, Copy)]
pub enum Operand<'f, 'a> {
    Field(&'f FemField<'a>),
    Analytic(&'f dyn SmoothFunction),
    /// `u - u_h`.
    Difference(&'f dyn SmoothFunction, &'f FemField<'a>),
}

impl<'f, 'a> Operand<'f, 'a> {
    fn field(&self) -> Option<&'f FemField<'a>> {
        match *self {
            Operand::Field(f) | Operand::Difference(_, f) => Some(f),
            Operand::Analytic(_) => None,
        }
    }
}

const SECOND: [[Exponent; 3]; 3] = [
    [[2, 0, 0], [1, 1, 0], [1, 0, 1]],
    [[1, 1, 0], [0, 2, 0], [0, 1, 1]],
    [[1, 0, 1], [0, 1, 1], [0, 0, 2]],
];

/// Basis values and second derivatives tabulated at the points of a rule.
struct Tabulation {
    values: Vec<Vec<f64>>,
    hessians: Vec<[[Vec<f64>; 3]; 3]>,
}

impl Tabulation {
    fn new(reference: &ReferenceElement, rule: &QuadRule) -> Self {
        let dim = reference.dim();
        let mut values = Vec::with_capacity(rule.len());
        let mut hessians = Vec::with_capacity(rule.len());
        for p in &rule.points {
            let pt = &p[..dim];
            values.push(reference.basis().iter().map(|b| b.eval(pt)).collect());
            let mut hq: [[Vec<f64>; 3]; 3] = Default::default();
            for a in 0..dim {
                for b in 0..dim {
                    let ders = reference
                        .basis_derivatives(SECOND[a][b])
                        .expect("second derivatives are tabulated");
                    hq[a][b] = ders.iter().map(|d| d.eval(pt)).collect();
                }
            }
            hessians.push(hq);
        }
        Self { values, hessians }
    }
}

fn field_reference_dofs(field: &FemField, e: usize, scale: &[f64]) -> Vec<f64> {
    field
        .element_values(e)
        .iter()
        .zip(scale)
        .map(|(v, s)| v / s)
        .collect()
}

fn operand_common_dofmap(a: &Operand, b: &Operand, dofmap: &DofMap) {
    for f in [a.field(), b.field()].into_iter().flatten() {
        assert!(std::ptr::eq(f.dofmap(), dofmap), "field lives on a different DOF map");
    }
}

enum Kind {
    Energy,
    Mass,
}

fn broken_inner(
    kind: Kind,
    a: Operand,
    b: Operand,
    dofmap: &DofMap,
    reference: &ReferenceElement,
    order: usize,
) -> Result<f64, AssemblyError> {
    operand_common_dofmap(&a, &b, dofmap);
    let mesh = dofmap.mesh();
    let dim = mesh.dim();
    if reference.dim() != dim {
        return Err(AssemblyError::DimensionMismatch {
            element: reference.dim(),
            mesh: dim,
        });
    }
    let h = mesh.half_width();
    if let (Operand::Field(fa), Operand::Field(fb)) = (a, b) {
        let (ke, me) = ReferenceMatrices::new(reference).physical(h);
        let mat = match kind {
            Kind::Energy => ke,
            Kind::Mass => me,
        };
        let mut total = 0.0;
        for e in 0..mesh.element_count() {
            total += mat.bilinear(&fa.element_values(e), &fb.element_values(e));
        }
        return Ok(total);
    }
    let rule = tensor_rule(dim, order)?;
    let tab = Tabulation::new(reference, &rule);
    let scale = physical_dof_scaling(dim, h);
    let jac = h.powi(dim as i32);
    let mut total = 0.0;
    for e in 0..mesh.element_count() {
        let g = mesh.element_geometry(e)?;
        let da = a.field().map(|f| field_reference_dofs(f, e, &scale));
        let db = b.field().map(|f| field_reference_dofs(f, e, &scale));
        for (q, (xi, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = g.to_physical(xi);
            match kind {
                Kind::Energy => {
                    let ha = hessian_at(&a, da.as_deref(), &tab, q, &x, dim, h);
                    let hb = hessian_at(&b, db.as_deref(), &tab, q, &x, dim, h);
                    let mut s = 0.0;
                    for i in 0..dim {
                        for j in 0..dim {
                            s += ha[i][j] * hb[i][j];
                        }
                    }
                    total += w * jac * s;
                }
                Kind::Mass => {
                    let va = value_at(&a, da.as_deref(), &tab, q, &x);
                    let vb = value_at(&b, db.as_deref(), &tab, q, &x);
                    total += w * jac * va * vb;
                }
            }
        }
    }
    Ok(total)
}

fn hessian_at(
    op: &Operand,
    dofs: Option<&[f64]>,
    tab: &Tabulation,
    q: usize,
    x: &[f64; 3],
    dim: usize,
    h: f64,
) -> [[f64; 3]; 3] {
    let discrete = |dofs: &[f64]| {
        let mut m = [[0.0; 3]; 3];
        for a in 0..dim {
            for b in 0..dim {
                m[a][b] = crate::linalg::dot(dofs, &tab.hessians[q][a][b]) / (h * h);
            }
        }
        m
    };
    match *op {
        Operand::Analytic(f) => f.hessian(x),
        Operand::Field(_) => discrete(dofs.unwrap()),
        Operand::Difference(f, _) => {
            let mut m = f.hessian(x);
            let d = discrete(dofs.unwrap());
            for a in 0..dim {
                for b in 0..dim {
                    m[a][b] -= d[a][b];
                }
            }
            m
        }
    }
}

fn value_at(op: &Operand, dofs: Option<&[f64]>, tab: &Tabulation, q: usize, x: &[f64; 3]) -> f64 {
    let discrete = |dofs: &[f64]| crate::linalg::dot(dofs, &tab.values[q]);
    match *op {
        Operand::Analytic(f) => f.value(x),
        Operand::Field(_) => discrete(dofs.unwrap()),
        Operand::Difference(f, _) => f.value(x) - discrete(dofs.unwrap()),
    }
}

/// Broken energy inner product `Σ_K ∫_K ∇²a : ∇²b`. Exact (element matrices)
/// when both operands are discrete, otherwise Gauss quadrature with `order`
/// points per axis on every element.
pub fn broken_energy_inner(
    a: Operand,
    b: Operand,
    dofmap: &DofMap,
    reference: &ReferenceElement,
    order: usize,
) -> Result<f64, AssemblyError> {
    broken_inner(Kind::Energy, a, b, dofmap, reference, order)
}

/// `L²` inner product, with the same evaluation rules as [`broken_energy_inner`].
pub fn l2_inner(
    a: Operand,
    b: Operand,
    dofmap: &DofMap,
    reference: &ReferenceElement,
    order: usize,
) -> Result<f64, AssemblyError> {
    broken_inner(Kind::Mass, a, b, dofmap, reference, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, BoundaryCondition};
    use crate::element::build_reference_element;
    use crate::functions::{PolynomialFunction, SineProduct};
    use crate::mesh::CartesianMesh;

    fn plate_bubble() -> PolynomialFunction {
        PolynomialFunction::new(crate::functions::squared_box_bubble(2))
    }

    #[test]
    fn clamped_interpolation_of_compatible_function() {
        let m = CartesianMesh::unit(2, 4).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        let u = interpolate_global(&plate_bubble(), &d, FacetQuadrature::default(), 1e-12).unwrap();
        assert_eq!(u.values().len(), 33);
        let center = m.vertex_index([2, 2, 0]);
        assert!((u.entity_value(Entity::Vertex(center)) - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn incompatible_boundary_is_reported() {
        let m = CartesianMesh::unit(2, 3).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Clamped).unwrap();
        let s = SineProduct::normalized(2, [1, 1, 0]);
        let err = interpolate_global(&s, &d, FacetQuadrature::default(), 1e-8).unwrap_err();
        assert!(matches!(err, AssemblyError::IncompatibleBoundary { entity: Entity::Facet(_), .. }));
        let d = DofMap::new(&m, BoundaryCondition::SimplySupported).unwrap();
        assert!(interpolate_global(&s, &d, FacetQuadrature::default(), 1e-8).is_ok());
    }

    #[test]
    fn discrete_products_match_assembled_matrices() {
        let r = build_reference_element(2).unwrap();
        let m = CartesianMesh::unit(2, 3).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::SimplySupported).unwrap();
        let sys = assemble(&d, &r).unwrap();
        let s = SineProduct::normalized(2, [1, 2, 0]);
        let u = interpolate_global(&s, &d, FacetQuadrature::default(), 1e-8).unwrap();
        let exact = broken_energy_inner(Operand::Field(&u), Operand::Field(&u), &d, &r, 4).unwrap();
        let via_a = sys.stiffness.bilinear(u.values(), u.values());
        assert!((exact - via_a).abs() < 1e-9 * via_a);
        // (0 - u) forces the quadrature path
        let zero = PolynomialFunction::new(Polynomial::zero(2));
        let quad =
            broken_energy_inner(Operand::Field(&u), Operand::Difference(&zero, &u), &d, &r, 4).unwrap();
        assert!((quad + exact).abs() < 1e-9 * exact);
        let mass = l2_inner(Operand::Field(&u), Operand::Field(&u), &d, &r, 4).unwrap();
        assert!((mass - sys.mass.bilinear(u.values(), u.values())).abs() < 1e-12);
    }

    #[test]
    fn analytic_energy_matches_eigenvalue() {
        let r = build_reference_element(2).unwrap();
        let m = CartesianMesh::unit(2, 2).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::SimplySupported).unwrap();
        let s = SineProduct::normalized(2, [1, 1, 0]);
        let e = broken_energy_inner(Operand::Analytic(&s), Operand::Analytic(&s), &d, &r, 10).unwrap();
        assert!((e - s.biharmonic_eigenvalue()).abs() < 1e-8 * e);
        let l2 = l2_inner(Operand::Analytic(&s), Operand::Analytic(&s), &d, &r, 10).unwrap();
        assert!((l2 - 1.0).abs() < 1e-10);
    }
}
