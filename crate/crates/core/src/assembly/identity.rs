//! Exact decomposition of the discrete eigenvalue error.
//!
//! For `L²`-normalized `u`, `u_h` with `a(u,u) = λ`, `a_h(u_h,u_h) = λ_h` and
//! `Π = Π_h u`:
//!
//! ```text
//! λ - λ_h = |u - u_h|_h² - λ_h ‖Πu - u_h‖² + λ_h (‖Πu‖² - ‖u‖²)
//!         + 2 (a_h(u, u_h) - a_h(Πu, u_h))
//! ```

use serde::Serialize;

use crate::element::ReferenceElement;
use crate::functions::SmoothFunction;
use crate::operators::FacetQuadrature;

use super::field::{broken_energy_inner, interpolate_global, l2_inner, FemField, Operand};
use super::{AssemblyError, DofMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityTerms {
    pub lambda: f64,
    pub lambda_h: f64,
    /// `|u - u_h|_h²`.
    pub t1: f64,
    /// `-λ_h ‖Πu - u_h‖²`.
    pub t2: f64,
    /// `λ_h (‖Πu‖² - ‖u‖²)`.
    pub t3: f64,
    /// `2 (a_h(u, u_h) - a_h(Πu, u_h))`.
    pub t4: f64,
    /// `(λ - λ_h) - (t1 + t2 + t3 + t4)`.
    pub residual: f64,
}

impl IdentityTerms {
    pub fn sum(&self) -> f64 {
        self.t1 + self.t2 + self.t3 + self.t4
    }

    /// `|residual| / λ`.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.lambda.abs()
    }
}

struct Scaled<'f> {
    f: &'f dyn SmoothFunction,
    s: f64,
}

impl SmoothFunction for Scaled<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn value(&self, x: &[f64; 3]) -> f64 {
        self.s * self.f.value(x)
    }

    fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        self.f.gradient(x).map(|g| self.s * g)
    }

    fn hessian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        self.f.hessian(x).map(|r| r.map(|v| self.s * v))
    }
}

/// Evaluates the four terms for an exact pair `(λ, u)` and a discrete pair
/// `(λ_h, u_h)`. Both functions are renormalized in `L²`; `u` must satisfy
/// the boundary condition of `dofmap` so that its interpolant exists.
/// `volume_order` is the Gauss order per axis for terms involving `u`.
#[allow(clippy::too_many_arguments)]
pub fn eigen_error_identity_terms(
    reference: &ReferenceElement,
    dofmap: &DofMap,
    u: &dyn SmoothFunction,
    lambda: f64,
    u_h: &FemField,
    lambda_h: f64,
    quad: FacetQuadrature,
    volume_order: usize,
) -> Result<IdentityTerms, AssemblyError> {
    let nu = l2_inner(Operand::Analytic(u), Operand::Analytic(u), dofmap, reference, volume_order)?.sqrt();
    let nh = l2_inner(Operand::Field(u_h), Operand::Field(u_h), dofmap, reference, volume_order)?.sqrt();
    if nu == 0.0 || nh == 0.0 {
        return Err(AssemblyError::ZeroNorm);
    }
    let u = Scaled { f: u, s: 1.0 / nu };
    let uh = u_h.scaled(1.0 / nh);
    let pi = interpolate_global(&u, dofmap, quad, 1e-8)?;

    let energy = |a, b| broken_energy_inner(a, b, dofmap, reference, volume_order);
    let mass = |a, b| l2_inner(a, b, dofmap, reference, volume_order);

    let t1 = energy(Operand::Difference(&u, &uh), Operand::Difference(&u, &uh))?;
    let diff = pi.difference(&uh);
    let t2 = -lambda_h * mass(Operand::Field(&diff), Operand::Field(&diff))?;
    let pi_sq = mass(Operand::Field(&pi), Operand::Field(&pi))?;
    let u_sq = mass(Operand::Analytic(&u), Operand::Analytic(&u))?;
    let t3 = lambda_h * (pi_sq - u_sq);
    let cross = energy(Operand::Analytic(&u), Operand::Field(&uh))?;
    let cross_h = energy(Operand::Field(&pi), Operand::Field(&uh))?;
    let t4 = 2.0 * (cross - cross_h);
    let residual = (lambda - lambda_h) - (t1 + t2 + t3 + t4);
    Ok(IdentityTerms {
        lambda,
        lambda_h,
        t1,
        t2,
        t3,
        t4,
        residual,
    })
}
