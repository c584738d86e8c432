//! Uniform Cartesian meshes of a square or cube.
//!
//! Numbering is lexicographic with the first coordinate running fastest.
//! Vertices carry integer coordinates in `0..=n`, elements in `0..n`.
//! Facets are grouped by normal axis; a facet normal to axis `a` has integer
//! coordinate `0..=n` along `a` and `0..n` along the other axes. Every facet
//! has a fixed global normal pointing along the positive `a` axis.

use serde::Serialize;
use thiserror::Error;

use crate::element::{facet_count, facet_of, vertex_count};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("number of subdivisions must be at least 1")]
    NoSubdivisions,
    #[error("domain extent along axis {axis} is {extent}, must be positive")]
    DegenerateDomain { axis: usize, extent: f64 },
    #[error("domain is not a square/cube: extents {0:?} differ")]
    NonUniformDomain(Vec<f64>),
    #[error("{kind} id {id} out of range (count {count})")]
    OutOfRange {
        kind: &'static str,
        id: usize,
        count: usize,
    },
}

/// Axis-aligned box `[lower, upper]`; only the first `dim` slots are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxDomain {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl BoxDomain {
    pub fn unit() -> Self {
        Self {
            lower: [0.0; 3],
            upper: [1.0; 3],
        }
    }

    pub fn new(lower: [f64; 3], upper: [f64; 3]) -> Self {
        Self { lower, upper }
    }
}

impl Default for BoxDomain {
    fn default() -> Self {
        Self::unit()
    }
}

/// A facet reference seen from an element: global id plus the sign relating
/// the element's outward normal to the facet's global normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FacetRef {
    pub id: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementGeometry {
    pub center: [f64; 3],
    /// Half of the element side length.
    pub h: f64,
}

impl ElementGeometry {
    /// Physical point of reference coordinates `xi`.
    pub fn to_physical(&self, xi: &[f64; 3]) -> [f64; 3] {
        [
            self.center[0] + self.h * xi[0],
            self.center[1] + self.h * xi[1],
            self.center[2] + self.h * xi[2],
        ]
    }

    /// Reference coordinates of physical point `x`.
    pub fn to_reference(&self, x: &[f64; 3]) -> [f64; 3] {
        [
            (x[0] - self.center[0]) / self.h,
            (x[1] - self.center[1]) / self.h,
            (x[2] - self.center[2]) / self.h,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFlags {
    pub vertices: Vec<bool>,
    pub facets: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartesianMesh {
    dim: usize,
    n: usize,
    domain: BoxDomain,
    side: f64,
}

impl CartesianMesh {
    pub fn new(dim: usize, n: usize, domain: BoxDomain) -> Result<Self, MeshError> {
        if !(2..=3).contains(&dim) {
            return Err(MeshError::UnsupportedDimension(dim));
        }
        if n == 0 {
            return Err(MeshError::NoSubdivisions);
        }
        let extents: Vec<f64> = (0..dim)
            .map(|a| domain.upper[a] - domain.lower[a])
            .collect();
        for (axis, &extent) in extents.iter().enumerate() {
            if !(extent > 0.0) {
                return Err(MeshError::DegenerateDomain { axis, extent });
            }
        }
        let side = extents[0];
        if extents
            .iter()
            .any(|e| (e - side).abs() > 1e-12 * side.abs().max(1.0))
        {
            return Err(MeshError::NonUniformDomain(extents));
        }
        Ok(Self { dim, n, domain, side })
    }

    pub fn unit(dim: usize, n: usize) -> Result<Self, MeshError> {
        Self::new(dim, n, BoxDomain::unit())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Subdivisions per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Element half-width `L / (2n)`.
    pub fn half_width(&self) -> f64 {
        self.side / (2.0 * self.n as f64)
    }

    pub fn element_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn vertex_count(&self) -> usize {
        (self.n + 1).pow(self.dim as u32)
    }

    pub fn facets_per_axis(&self) -> usize {
        self.n.pow(self.dim as u32 - 1) * (self.n + 1)
    }

    pub fn facet_count(&self) -> usize {
        self.dim * self.facets_per_axis()
    }

    fn check(&self, kind: &'static str, id: usize, count: usize) -> Result<(), MeshError> {
        if id >= count {
            Err(MeshError::OutOfRange { kind, id, count })
        } else {
            Ok(())
        }
    }

    fn split(&self, mut id: usize, sizes: [usize; 3]) -> [usize; 3] {
        let mut c = [0; 3];
        for d in 0..self.dim {
            c[d] = id % sizes[d];
            id /= sizes[d];
        }
        c
    }

    fn join(&self, c: [usize; 3], sizes: [usize; 3]) -> usize {
        (0..self.dim).rev().fold(0, |acc, d| acc * sizes[d] + c[d])
    }

    pub fn vertex_index(&self, c: [usize; 3]) -> usize {
        self.join(c, [self.n + 1; 3])
    }

    pub fn vertex_coords(&self, v: usize) -> [usize; 3] {
        self.split(v, [self.n + 1; 3])
    }

    pub fn vertex_point(&self, v: usize) -> [f64; 3] {
        let c = self.vertex_coords(v);
        let step = self.side / self.n as f64;
        let mut p = [0.0; 3];
        for d in 0..self.dim {
            p[d] = self.domain.lower[d] + step * c[d] as f64;
        }
        p
    }

    pub fn element_coords(&self, e: usize) -> [usize; 3] {
        self.split(e, [self.n; 3])
    }

    fn facet_sizes(&self, axis: usize) -> [usize; 3] {
        let mut s = [self.n; 3];
        s[axis] = self.n + 1;
        s
    }

    pub fn facet_index(&self, axis: usize, c: [usize; 3]) -> usize {
        axis * self.facets_per_axis() + self.join(c, self.facet_sizes(axis))
    }

    /// `(normal axis, integer coordinates)` of facet `f`.
    pub fn facet_coords(&self, f: usize) -> (usize, [usize; 3]) {
        let per = self.facets_per_axis();
        let axis = f / per;
        (axis, self.split(f % per, self.facet_sizes(axis)))
    }

    /// Center of facet `f`.
    pub fn facet_center(&self, f: usize) -> [f64; 3] {
        let (axis, c) = self.facet_coords(f);
        let step = self.side / self.n as f64;
        let mut p = [0.0; 3];
        for d in 0..self.dim {
            let offset = if d == axis { 0.0 } else { 0.5 };
            p[d] = self.domain.lower[d] + step * (c[d] as f64 + offset);
        }
        p
    }

    /// The `2^dim` vertex ids of element `e` in reference-vertex order.
    pub fn element_vertices(&self, e: usize) -> Result<Vec<usize>, MeshError> {
        self.check("element", e, self.element_count())?;
        let base = self.element_coords(e);
        Ok((0..vertex_count(self.dim))
            .map(|v| {
                let mut c = base;
                for (d, slot) in c.iter_mut().enumerate().take(self.dim) {
                    *slot += v >> d & 1;
                }
                self.vertex_index(c)
            })
            .collect())
    }

    /// The `2 dim` facets of element `e` in reference-facet order.
    pub fn element_facets(&self, e: usize) -> Result<Vec<FacetRef>, MeshError> {
        self.check("element", e, self.element_count())?;
        let base = self.element_coords(e);
        Ok((0..facet_count(self.dim))
            .map(|f| {
                let (axis, side) = facet_of(f);
                let mut c = base;
                c[axis] += usize::from(side == crate::quadrature::Side::Plus);
                FacetRef {
                    id: self.facet_index(axis, c),
                    sign: side.sign() as i8,
                }
            })
            .collect())
    }

    pub fn element_geometry(&self, e: usize) -> Result<ElementGeometry, MeshError> {
        self.check("element", e, self.element_count())?;
        let c = self.element_coords(e);
        let h = self.half_width();
        let mut center = [0.0; 3];
        for d in 0..self.dim {
            center[d] = self.domain.lower[d] + h * (2 * c[d] + 1) as f64;
        }
        Ok(ElementGeometry { center, h })
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        let c = self.vertex_coords(v);
        c[..self.dim].iter().any(|&k| k == 0 || k == self.n)
    }

    pub fn is_boundary_facet(&self, f: usize) -> bool {
        let (axis, c) = self.facet_coords(f);
        c[axis] == 0 || c[axis] == self.n
    }

    pub fn boundary_flags(&self) -> BoundaryFlags {
        BoundaryFlags {
            vertices: (0..self.vertex_count())
                .map(|v| self.is_boundary_vertex(v))
                .collect(),
            facets: (0..self.facet_count())
                .map(|f| self.is_boundary_facet(f))
                .collect(),
        }
    }
}

/// Builds the uniform mesh of `domain` with `n` subdivisions per axis.
pub fn build_mesh(dim: usize, n: usize, domain: BoxDomain) -> Result<CartesianMesh, MeshError> {
    CartesianMesh::new(dim, n, domain)
}
