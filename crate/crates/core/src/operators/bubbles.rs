//! Bubble functions: polynomials on `[-1, 1]^dim` whose Morley DOFs all vanish.
//! They carry the interpolation error of quartics.

use serde::Serialize;

use crate::element::{Exponent, Polynomial, ReferenceElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BubbleFamily {
    /// `xi_i^2 xi_j - 4/3 xi_j + xi_j^3 / 3`
    Phi,
    /// `(xi_i^2 - 1)^2`
    Psi,
    /// `xi_i^2 xi_j^2 - (xi_i^2 + xi_j^2 + 1) / 3`
    P,
    /// `xi_i^3 xi_j - xi_i xi_j`
    Q,
}

#[derive(Debug, Clone)]
pub struct Bubble {
    pub name: String,
    pub family: BubbleFamily,
    /// Zero-based axes `(i, j)`; `j == i` for the one-index `psi`.
    pub axes: (usize, usize),
    pub poly: Polynomial,
}

#[derive(Debug, Clone)]
pub struct BubbleSet {
    pub dim: usize,
    pub bubbles: Vec<Bubble>,
}

fn mono(dim: usize, terms: &[(Exponent, f64)]) -> Polynomial {
    Polynomial::from_terms(dim, terms.iter().copied())
}

fn exp2(i: usize, ei: u32, j: usize, ej: u32) -> Exponent {
    let mut e = [0; 3];
    e[i] += ei;
    e[j] += ej;
    e
}

pub fn phi(dim: usize, i: usize, j: usize) -> Polynomial {
    mono(
        dim,
        &[
            (exp2(i, 2, j, 1), 1.0),
            (exp2(j, 1, j, 0), -4.0 / 3.0),
            (exp2(j, 3, j, 0), 1.0 / 3.0),
        ],
    )
}

pub fn psi(dim: usize, i: usize) -> Polynomial {
    mono(
        dim,
        &[
            (exp2(i, 4, i, 0), 1.0),
            (exp2(i, 2, i, 0), -2.0),
            ([0; 3], 1.0),
        ],
    )
}

/// The `p` bubble in the form that actually annihilates the DOFs: the
/// interpolation error of `xi_i^2 xi_j^2`.
pub fn p_corrected(dim: usize, i: usize, j: usize) -> Polynomial {
    mono(
        dim,
        &[
            (exp2(i, 2, j, 2), 1.0),
            (exp2(i, 2, i, 0), -1.0 / 3.0),
            (exp2(j, 2, j, 0), -1.0 / 3.0),
            ([0; 3], -1.0 / 3.0),
        ],
    )
}

/// The printed `p` bubble `xi_i^2 + xi_j^2 - xi_i^3/3 - xi_j^3/3 - 1/3`.
/// It does not vanish at the vertices (value 1 at `(1, 1)`); kept only to
/// report the discrepancy.
pub fn p_printed(dim: usize, i: usize, j: usize) -> Polynomial {
    mono(
        dim,
        &[
            (exp2(i, 2, i, 0), 1.0),
            (exp2(j, 2, j, 0), 1.0),
            (exp2(i, 3, i, 0), -1.0 / 3.0),
            (exp2(j, 3, j, 0), -1.0 / 3.0),
            ([0; 3], -1.0 / 3.0),
        ],
    )
}

pub fn q(dim: usize, i: usize, j: usize) -> Polynomial {
    mono(dim, &[(exp2(i, 3, j, 1), 1.0), (exp2(i, 1, j, 1), -1.0)])
}

fn ordered_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim)
        .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

fn unordered_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .collect()
}

fn build(dim: usize, printed: bool) -> BubbleSet {
    let mut bubbles = Vec::new();
    for (i, j) in ordered_pairs(dim) {
        bubbles.push(Bubble {
            name: format!("phi_{}_{}", i + 1, j + 1),
            family: BubbleFamily::Phi,
            axes: (i, j),
            poly: phi(dim, i, j),
        });
    }
    for i in 0..dim {
        bubbles.push(Bubble {
            name: format!("psi_{}", i + 1),
            family: BubbleFamily::Psi,
            axes: (i, i),
            poly: psi(dim, i),
        });
    }
    for (i, j) in unordered_pairs(dim) {
        let (name, poly) = if printed {
            (format!("p_{}_{}_printed", i + 1, j + 1), p_printed(dim, i, j))
        } else {
            (format!("p_{}_{}", i + 1, j + 1), p_corrected(dim, i, j))
        };
        bubbles.push(Bubble {
            name,
            family: BubbleFamily::P,
            axes: (i, j),
            poly,
        });
    }
    for (i, j) in ordered_pairs(dim) {
        bubbles.push(Bubble {
            name: format!("q_{}_{}", i + 1, j + 1),
            family: BubbleFamily::Q,
            axes: (i, j),
            poly: q(dim, i, j),
        });
    }
    BubbleSet { dim, bubbles }
}

/// The 7 (2D) or 18 (3D) bubbles with the corrected `p` family.
pub fn build_bubbles(dim: usize) -> BubbleSet {
    assert!((2..=3).contains(&dim));
    build(dim, false)
}

/// Only the printed `p` bubbles (1 in 2D, 3 in 3D).
pub fn printed_p_bubbles(dim: usize) -> Vec<Bubble> {
    build(dim, true)
        .bubbles
        .into_iter()
        .filter(|b| b.family == BubbleFamily::P)
        .collect()
}

impl BubbleSet {
    pub fn get(&self, name: &str) -> Option<&Polynomial> {
        self.bubbles.iter().find(|b| b.name == name).map(|b| &b.poly)
    }
}

/// Largest absolute DOF value of `p`.
pub fn max_dof_residual(reference: &ReferenceElement, p: &Polynomial) -> f64 {
    reference
        .dof_values(p)
        .into_iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}
