//! Refined interpolation identities on a single cell.
//!
//! For `u` quartic and `v` in the shape space,
//!
//! ```text
//! (∇²(u - Π_K u), ∇²v)_K = (h²/3) Σ_{i≠j} ∫_K ∂_i ∂_j² u · ∂_i³ v
//! ```
//!
//! holds in 2D for all quartics and in 3D on the quartics without
//! `x_i² x_j x_k` terms. Both sides are evaluated by exact integration.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element::{monomials_up_to, Exponent, Polynomial, ReferenceElement};

use super::bubbles::{p_corrected, phi, psi, q};
use super::interpolation::canonical_interpolate;
use super::OperatorError;

/// `u - Π_K u` for a polynomial of degree at most 4 in reference coordinates.
pub fn taylor_error_leading_term(
    reference: &ReferenceElement,
    u: &Polynomial,
) -> Result<Polynomial, OperatorError> {
    let degree = u.total_degree();
    if degree > 4 {
        return Err(OperatorError::NotQuartic(degree));
    }
    Ok(canonical_interpolate(reference, u)
        .error
        .expect("polynomial input yields an error term"))
}

fn axis_exponent(pairs: &[(usize, u32)]) -> [u32; 3] {
    let mut e = [0; 3];
    for &(a, k) in pairs {
        e[a] += k;
    }
    e
}

/// Bubble combination predicted for `u - Π_K u` on the reference cell
/// (half-width 1):
///
/// ```text
/// ½ Σ_{i≠j} mean(∂_i²∂_j u) φ_ij + (1/24) Σ_i ∂_i⁴u ψ_i
///   + ¼ Σ_{i<j} ∂_i²∂_j² u p_ij + (1/6) Σ_{i≠j} ∂_i³∂_j u q_ij
/// ```
///
/// with the corrected `p_ij`. Fourth derivatives of a quartic are constants;
/// they are taken as cell means.
pub fn bubble_expansion(u: &Polynomial) -> Polynomial {
    let dim = u.dim();
    let d = |pairs: &[(usize, u32)]| {
        u.derivative_multi(&axis_exponent(pairs)[..dim]).mean_box()
    };
    let mut out = Polynomial::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            out = &out + &phi(dim, i, j).scale(0.5 * d(&[(i, 2), (j, 1)]));
            out = &out + &q(dim, i, j).scale(d(&[(i, 3), (j, 1)]) / 6.0);
            if i < j {
                out = &out + &p_corrected(dim, i, j).scale(0.25 * d(&[(i, 2), (j, 2)]));
            }
        }
        out = &out + &psi(dim, i).scale(d(&[(i, 4)]) / 24.0);
    }
    out.pruned(1e-14)
}

/// Exponents of the quartic monomials `x_i² x_j x_k` (all indices distinct),
/// which the 3D bubble expansion does not cover.
pub fn uncovered_quartics(dim: usize) -> Vec<Exponent> {
    if dim < 3 {
        return Vec::new();
    }
    vec![[2, 1, 1], [1, 2, 1], [1, 1, 2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn diff(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs - rhs| <= tol (1 + |lhs|)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.diff() <= tol * (1.0 + self.lhs.abs())
    }
}

/// Frobenius Hessian product `∫ ∇²a : ∇²b` over `[-1, 1]^dim` in reference coordinates.
pub fn hessian_product_reference(a: &Polynomial, b: &Polynomial) -> f64 {
    let dim = a.dim();
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let da = a.derivative(i).derivative(j);
            let db = b.derivative(i).derivative(j);
            total += (&da * &db).integrate_box();
        }
    }
    total
}

/// Both sides of the refined identity on a cell of half-width `h`, with `u`
/// and `v` given in the cell's reference coordinates.
pub fn refined_identity_check(
    reference: &ReferenceElement,
    u: &Polynomial,
    v: &Polynomial,
    h: f64,
) -> Result<IdentityCheck, OperatorError> {
    let dim = reference.dim();
    if u.dim() != dim || v.dim() != dim {
        return Err(OperatorError::DimensionMismatch);
    }
    if !reference.in_shape_space(v, 1e-12) {
        return Err(OperatorError::NotInShapeSpace);
    }
    let err = taylor_error_leading_term(reference, u)?;
    let jac = h.powi(dim as i32 - 4);
    let lhs = jac * hessian_product_reference(&err, v);
    let mut rhs = 0.0;
    for i in 0..dim {
        let v3 = v.derivative(i).derivative(i).derivative(i);
        for j in 0..dim {
            if i == j {
                continue;
            }
            let u3 = u.derivative(i).derivative(j).derivative(j);
            rhs += (&u3 * &v3).integrate_box();
        }
    }
    rhs *= jac / 3.0;
    Ok(IdentityCheck { lhs, rhs })
}

/// A randomly drawn `(u, v)` pair on a random cell.
#[derive(Debug, Clone)]
pub struct RandomPair {
    pub center: [f64; 3],
    pub h: f64,
    /// `u` in physical coordinates.
    pub u_physical: Polynomial,
    /// `v` in physical coordinates.
    pub v_physical: Polynomial,
    pub check: IdentityCheck,
}

/// Draws `u` in `P_4` (excluding the given monomials) and `v` in the shape
/// space, both with coefficients uniform in `[-1, 1]` in physical coordinates
/// on a random cell, and evaluates both sides of the identity.
pub fn random_identity_pair(
    reference: &ReferenceElement,
    rng: &mut ChaCha8Rng,
    excluded: &[Exponent],
) -> Result<RandomPair, OperatorError> {
    let dim = reference.dim();
    let mut center = [0.0; 3];
    for c in center.iter_mut().take(dim) {
        *c = rng.gen_range(-1.0..1.0);
    }
    let h = rng.gen_range(0.05..1.0);
    let u_physical = Polynomial::from_terms(
        dim,
        monomials_up_to(dim, 4)
            .into_iter()
            .filter(|e| !excluded.contains(e))
            .map(|e| (e, rng.gen_range(-1.0..1.0)))
            .collect::<Vec<_>>(),
    );
    let v_physical = Polynomial::from_terms(
        dim,
        reference
            .monomials()
            .iter()
            .map(|e| (*e, rng.gen_range(-1.0..1.0)))
            .collect::<Vec<_>>(),
    );
    let u = u_physical.affine_pullback(&center, h);
    let v = v_physical.affine_pullback(&center, h).pruned(1e-15);
    let check = refined_identity_check(reference, &u, &v, h)?;
    Ok(RandomPair {
        center,
        h,
        u_physical,
        v_physical,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{build_reference_element, monomials_of_degree};
    use crate::operators::bubbles::build_bubbles;
    use rand::SeedableRng;

    #[test]
    fn leading_term_examples() {
        let r2 = build_reference_element(2).unwrap();
        let u = Polynomial::monomial(2, [1, 2, 0], 1.0);
        let e = taylor_error_leading_term(&r2, &u).unwrap();
        assert!(e.max_coefficient_diff(build_bubbles(2).get("phi_2_1").unwrap()) < 1e-13);
        let u = Polynomial::monomial(2, [2, 2, 0], 1.0);
        let e = taylor_error_leading_term(&r2, &u).unwrap();
        assert!(e.max_coefficient_diff(build_bubbles(2).get("p_1_2").unwrap()) < 1e-13);
        let r3 = build_reference_element(3).unwrap();
        let u = Polynomial::monomial(3, [2, 1, 1], 1.0);
        let e = taylor_error_leading_term(&r3, &u).unwrap();
        let expect = Polynomial::from_terms(3, [([2, 1, 1], 1.0), ([0, 1, 1], -1.0)]);
        assert!(e.max_coefficient_diff(&expect) < 1e-13);
        // not in the span of the expansion
        assert!(bubble_expansion(&u).is_zero());
        assert!(matches!(
            taylor_error_leading_term(&r2, &Polynomial::monomial(2, [5, 0, 0], 1.0)),
            Err(OperatorError::NotQuartic(5))
        ));
    }

    #[test]
    fn expansion_exact_on_2d_quartics() {
        let r = build_reference_element(2).unwrap();
        for e in monomials_of_degree(2, 4).into_iter().chain(monomials_of_degree(2, 3)) {
            let u = Polynomial::monomial(2, e, 1.0);
            let lhs = taylor_error_leading_term(&r, &u).unwrap();
            assert!(lhs.max_coefficient_diff(&bubble_expansion(&u)) < 1e-13, "{e:?}");
        }
    }

    #[test]
    fn worked_2d_case() {
        let r = build_reference_element(2).unwrap();
        let u = Polynomial::monomial(2, [1, 2, 0], 1.0);
        let v = Polynomial::monomial(2, [3, 0, 0], 1.0);
        let c = refined_identity_check(&r, &u, &v, 1.0).unwrap();
        assert!((c.lhs - 16.0).abs() < 1e-12 && (c.rhs - 16.0).abs() < 1e-12);
    }

    #[test]
    fn shape_space_u_gives_zero() {
        for dim in [2, 3] {
            let r = build_reference_element(dim).unwrap();
            let u = Polynomial::monomial(dim, [3, 0, 0], 1.0);
            let v = Polynomial::monomial(dim, [0, 3, 0], 1.0);
            let c = refined_identity_check(&r, &u, &v, 0.3).unwrap();
            assert!(c.lhs.abs() < 1e-12 && c.rhs.abs() < 1e-12);
        }
    }

    #[test]
    fn documented_3d_counterexample() {
        let r = build_reference_element(3).unwrap();
        let u = Polynomial::monomial(3, [2, 1, 1], 1.0);
        let v = Polynomial::monomial(3, [0, 1, 1], 1.0);
        let c = refined_identity_check(&r, &u, &v, 1.0).unwrap();
        assert!((c.lhs + 32.0 / 3.0).abs() < 1e-12);
        assert!(c.rhs.abs() < 1e-12);
    }

    #[test]
    fn rejects_v_outside_shape_space() {
        let r = build_reference_element(2).unwrap();
        let u = Polynomial::monomial(2, [1, 2, 0], 1.0);
        let v = Polynomial::monomial(2, [2, 1, 0], 1.0);
        assert!(matches!(
            refined_identity_check(&r, &u, &v, 1.0),
            Err(OperatorError::NotInShapeSpace)
        ));
    }

    #[test]
    fn random_pairs_are_reproducible() {
        let r = build_reference_element(2).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let pa = random_identity_pair(&r, &mut a, &[]).unwrap();
        let pb = random_identity_pair(&r, &mut b, &[]).unwrap();
        assert_eq!(pa.check, pb.check);
    }
}
