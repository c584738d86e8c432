//! The rectangular Morley reference element on `[-1, 1]^dim`.
//!
//! Shape space: `P_2 + span{xi_1^3, xi_2^3}` in 2D (8 functions) and
//! `P_2 + span{xi_1^3, xi_2^3, xi_3^3, xi_1 xi_2 xi_3}` in 3D (14 functions).
//! Degrees of freedom: the value at each vertex, then the mean outward normal
//! derivative over each facet.
//!
//! Ordering conventions used throughout the crate:
//! * vertex `v` sits at `xi_i = +1` when bit `i` of `v` is set, `-1` otherwise,
//!   so 2D vertices run `(--, +-, -+, ++)`;
//! * facets run axis by axis, minus side before plus side;
//! * DOFs list all vertices first, then all facets.

mod polynomial;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::DenseMatrix;
use crate::quadrature::Side;

pub use polynomial::{monomials_of_degree, monomials_up_to, Exponent, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("degree-of-freedom matrix is numerically singular (unisolvence violated)")]
    NotUnisolvent,
    #[error("derivative order {0} exceeds 3; the shape space is cubic")]
    DerivativeOrder(u32),
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum DofKind {
    /// Value at a reference vertex.
    VertexValue { vertex: usize },
    /// `(1/|F|) ∫_F ∂v/∂ν ds` with `ν` the outward unit normal of the facet.
    FacetNormalMean { axis: usize, side: Side },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DofFunctional {
    pub dim: usize,
    pub kind: DofKind,
}

impl DofFunctional {
    pub fn is_vertex(&self) -> bool {
        matches!(self.kind, DofKind::VertexValue { .. })
    }
}

/// Coordinates of reference vertex `v`.
pub fn reference_vertex(dim: usize, v: usize) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (i, slot) in p.iter_mut().enumerate().take(dim) {
        *slot = if v >> i & 1 == 1 { 1.0 } else { -1.0 };
    }
    p
}

/// Number of vertices (`2^dim`) and facets (`2 dim`) of a box cell.
pub fn vertex_count(dim: usize) -> usize {
    1 << dim
}

pub fn facet_count(dim: usize) -> usize {
    2 * dim
}

/// `(axis, side)` of local facet `f`.
pub fn facet_of(f: usize) -> (usize, Side) {
    (f / 2, if f.is_multiple_of(2) { Side::Minus } else { Side::Plus })
}

/// The DOF functionals in canonical order.
pub fn reference_dofs(dim: usize) -> Vec<DofFunctional> {
    let vertices = (0..vertex_count(dim)).map(|vertex| DofFunctional {
        dim,
        kind: DofKind::VertexValue { vertex },
    });
    let facets = (0..facet_count(dim)).map(|f| {
        let (axis, side) = facet_of(f);
        DofFunctional {
            dim,
            kind: DofKind::FacetNormalMean { axis, side },
        }
    });
    vertices.chain(facets).collect()
}

/// Monomials spanning the shape space, in canonical order.
pub fn shape_monomials(dim: usize) -> Result<Vec<Exponent>, ElementError> {
    let mut m = monomials_up_to(dim, 2);
    match dim {
        2 => m.extend([[3, 0, 0], [0, 3, 0]]),
        3 => m.extend([[3, 0, 0], [0, 3, 0], [0, 0, 3], [1, 1, 1]]),
        d => return Err(ElementError::UnsupportedDimension(d)),
    }
    Ok(m)
}

/// Applies a DOF functional to a polynomial given in reference coordinates.
pub fn apply_dof(f: &Polynomial, d: &DofFunctional) -> f64 {
    assert_eq!(f.dim(), d.dim, "dimension mismatch");
    match d.kind {
        DofKind::VertexValue { vertex } => f.eval(&reference_vertex(d.dim, vertex)),
        DofKind::FacetNormalMean { axis, side } => {
            side.sign() * f.derivative(axis).mean_facet(axis, side)
        }
    }
}

/// Per-DOF factor converting reference DOF values into physical ones for a
/// cell of half-width `h`: 1 for vertex values, `1/h` for normal-derivative means.
///
/// The physical nodal basis is the reference basis divided entrywise by this vector.
pub fn physical_dof_scaling(dim: usize, h: f64) -> Vec<f64> {
    assert!(h > 0.0, "half-width must be positive");
    let mut s = vec![1.0; vertex_count(dim)];
    s.extend(std::iter::repeat_n(1.0 / h, facet_count(dim)));
    s
}

/// Morley reference element with its nodal basis.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    dim: usize,
    monomials: Vec<Exponent>,
    dofs: Vec<DofFunctional>,
    basis: Vec<Polynomial>,
    /// `∂^alpha basis_j` for every `|alpha| <= 3`.
    derivatives: BTreeMap<Exponent, Vec<Polynomial>>,
    condition: f64,
}

impl ReferenceElement {
    pub fn new(dim: usize) -> Result<Self, ElementError> {
        let monomials = shape_monomials(dim)?;
        let dofs = reference_dofs(dim);
        let n = dofs.len();
        debug_assert_eq!(n, monomials.len());

        let mono_polys: Vec<Polynomial> = monomials
            .iter()
            .map(|e| Polynomial::monomial(dim, *e, 1.0))
            .collect();
        let mut vandermonde = DenseMatrix::zeros(n, n);
        for (i, d) in dofs.iter().enumerate() {
            for (j, m) in mono_polys.iter().enumerate() {
                vandermonde[(i, j)] = apply_dof(m, d);
            }
        }
        let inv = vandermonde.inverse().ok_or(ElementError::NotUnisolvent)?;
        let condition = vandermonde.norm1() * inv.norm1();

        let basis: Vec<Polynomial> = (0..n)
            .map(|j| {
                Polynomial::from_terms(
                    dim,
                    monomials.iter().enumerate().map(|(k, e)| (*e, inv[(k, j)])),
                )
                .pruned(1e-14)
            })
            .collect();

        let mut derivatives = BTreeMap::new();
        for alpha in monomials_up_to(dim, 3) {
            let d = basis
                .iter()
                .map(|b| b.derivative_multi(&alpha[..dim]))
                .collect();
            derivatives.insert(alpha, d);
        }

        Ok(Self {
            dim,
            monomials,
            dofs,
            basis,
            derivatives,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of local DOFs (8 or 14).
    pub fn ndofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn monomials(&self) -> &[Exponent] {
        &self.monomials
    }

    pub fn dofs(&self) -> &[DofFunctional] {
        &self.dofs
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    /// 1-norm condition number of the DOF/monomial matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// All DOF values of `f`.
    pub fn dof_values(&self, f: &Polynomial) -> Vec<f64> {
        self.dofs.iter().map(|d| apply_dof(f, d)).collect()
    }

    /// `sum_j coeffs[j] basis_j`.
    pub fn combine(&self, coeffs: &[f64]) -> Polynomial {
        assert_eq!(coeffs.len(), self.ndofs());
        let mut out = Polynomial::zero(self.dim);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = &out + &b.scale(*c);
        }
        out
    }

    /// Whether `p` lies in the shape space (no coefficient outside it above `tol`).
    pub fn in_shape_space(&self, p: &Polynomial, tol: f64) -> bool {
        p.terms()
            .all(|(e, c)| self.monomials.contains(e) || c.abs() <= tol)
    }

    /// `∂^alpha basis_j(point)` for every basis function `j`.
    pub fn eval_basis(&self, alpha: &[u32], point: &[f64]) -> Result<Vec<f64>, ElementError> {
        if point.len() < self.dim {
            return Err(ElementError::PointDimension {
                got: point.len(),
                expected: self.dim,
            });
        }
        let order: u32 = alpha.iter().sum();
        if order > 3 {
            return Err(ElementError::DerivativeOrder(order));
        }
        let mut key = [0; 3];
        key[..alpha.len().min(3)].copy_from_slice(&alpha[..alpha.len().min(3)]);
        let polys = &self.derivatives[&key];
        Ok(polys.iter().map(|p| p.eval(point)).collect())
    }

    /// Basis derivative polynomials `∂^alpha basis_j`, `|alpha| <= 3`.
    pub fn basis_derivatives(&self, alpha: Exponent) -> Option<&[Polynomial]> {
        self.derivatives.get(&alpha).map(Vec::as_slice)
    }
}

/// Builds the reference element for `dim` in `{2, 3}`.
pub fn build_reference_element(dim: usize) -> Result<ReferenceElement, ElementError> {
    ReferenceElement::new(dim)
}
