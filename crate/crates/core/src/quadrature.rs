//! Gauss-Legendre rules on the reference box `[-1, 1]^dim` and its facets,
//! plus exact monomial integration.
//!
//! Element matrices and every polynomial identity are integrated exactly
//! through [`integrate_monomial_box`]; the Gauss rules are only used for
//! transcendental integrands (sine eigenfunctions, error norms).

use std::f64::consts::PI;

use thiserror::Error;

/// Largest supported number of Gauss points per axis.
pub const MAX_POINTS: usize = 16;

/// Default number of Gauss points per axis for non-polynomial integrands.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("unsupported number of Gauss points {0} (expected 1..={MAX_POINTS})")]
    UnsupportedPoints(usize),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("facet axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
}

/// Which of the two facets normal to an axis: `xi_axis = -1` or `xi_axis = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Minus, Side::Plus];

    /// `-1.0` or `+1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

/// A quadrature rule with points stored in three slots; only the first
/// `dim` coordinates are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weighted sum of `f` over the rule's points.
    pub fn integrate<F: FnMut(&[f64; 3]) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre_1d(n: usize) -> Result<QuadRule, QuadratureError> {
    if n == 0 || n > MAX_POINTS {
        return Err(QuadratureError::UnsupportedPoints(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // Pin the middle node; Newton leaves it at ~1e-17.
        let (_, dp) = legendre(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    Ok(QuadRule {
        dim: 1,
        points: nodes.into_iter().map(|x| [x, 0.0, 0.0]).collect(),
        weights,
    })
}

/// Tensor-product rule on `[-1, 1]^dim`, first coordinate fastest.
pub fn tensor_rule(dim: usize, n_per_axis: usize) -> Result<QuadRule, QuadratureError> {
    if !(1..=3).contains(&dim) {
        return Err(QuadratureError::UnsupportedDimension(dim));
    }
    let line = gauss_legendre_1d(n_per_axis)?;
    let xs: Vec<f64> = line.points.iter().map(|p| p[0]).collect();
    let count = n_per_axis.pow(dim as u32);
    let mut points = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for flat in 0..count {
        let mut p = [0.0; 3];
        let mut w = 1.0;
        let mut rem = flat;
        for slot in p.iter_mut().take(dim) {
            let idx = rem % n_per_axis;
            rem /= n_per_axis;
            *slot = xs[idx];
            w *= line.weights[idx];
        }
        points.push(p);
        weights.push(w);
    }
    Ok(QuadRule {
        dim,
        points,
        weights,
    })
}

/// Rule on the facet `{xi_axis = side}` of `[-1, 1]^dim`: a `(dim-1)`-dimensional
/// tensor rule over the free coordinates, embedded with the fixed coordinate pinned.
pub fn facet_rule(
    dim: usize,
    axis: usize,
    side: Side,
    n_per_axis: usize,
) -> Result<QuadRule, QuadratureError> {
    if !(2..=3).contains(&dim) {
        return Err(QuadratureError::UnsupportedDimension(dim));
    }
    if axis >= dim {
        return Err(QuadratureError::AxisOutOfRange { axis, dim });
    }
    let free = tensor_rule(dim - 1, n_per_axis)?;
    let points = free
        .points
        .iter()
        .map(|q| {
            let mut p = [0.0; 3];
            let mut k = 0;
            for (d, slot) in p.iter_mut().enumerate().take(dim) {
                if d == axis {
                    *slot = side.sign();
                } else {
                    *slot = q[k];
                    k += 1;
                }
            }
            p
        })
        .collect();
    Ok(QuadRule {
        dim,
        points,
        weights: free.weights,
    })
}

/// `∫_{-1}^{1} x^e dx`.
pub fn integrate_monomial_1d(e: u32) -> f64 {
    if e % 2 == 1 {
        0.0
    } else {
        2.0 / (e as f64 + 1.0)
    }
}

/// Exact integral of `prod_i xi_i^{e_i}` over `[-1, 1]^dim` with `dim = exponents.len()`.
pub fn integrate_monomial_box(exponents: &[u32]) -> f64 {
    exponents.iter().map(|&e| integrate_monomial_1d(e)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule_is_midpoint() {
        let r = gauss_legendre_1d(1).unwrap();
        assert_eq!(r.points[0][0], 0.0);
        assert_eq!(r.weights[0], 2.0);
    }

    #[test]
    fn exactness_degree() {
        let r2 = gauss_legendre_1d(2).unwrap();
        assert!((r2.integrate(|p| p[0] * p[0]) - 2.0 / 3.0).abs() < 1e-15);
        let r4 = gauss_legendre_1d(4).unwrap();
        assert!((r4.integrate(|p| p[0].powi(6)) - 2.0 / 7.0).abs() < 1e-15);
        for n in 1..=MAX_POINTS {
            let r = gauss_legendre_1d(n).unwrap();
            for e in 0..(2 * n as u32) {
                let got = r.integrate(|p| p[0].powi(e as i32));
                assert!(
                    (got - integrate_monomial_1d(e)).abs() < 1e-13,
                    "n={n} e={e} got {got}"
                );
            }
        }
    }

    #[test]
    fn rejects_unsupported_point_counts() {
        assert_eq!(gauss_legendre_1d(0), Err(QuadratureError::UnsupportedPoints(0)));
        assert_eq!(gauss_legendre_1d(17), Err(QuadratureError::UnsupportedPoints(17)));
    }

    #[test]
    fn tensor_rules() {
        let r = tensor_rule(2, 4).unwrap();
        assert_eq!(r.len(), 16);
        assert!((r.integrate(|p| p[0].powi(6)) - 4.0 / 7.0).abs() < 1e-14);
        let r = tensor_rule(3, 2).unwrap();
        assert_eq!(r.len(), 8);
        assert!((r.integrate(|_| 1.0) - 8.0).abs() < 1e-14);
        let r = tensor_rule(2, 1).unwrap();
        assert_eq!(r.integrate(|p| p[0]), 0.0);
    }

    #[test]
    fn facet_rules() {
        let r = facet_rule(2, 0, Side::Plus, 2).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.points.iter().all(|p| p[0] == 1.0));
        assert!((r.integrate(|p| p[1] * p[1]) - 2.0 / 3.0).abs() < 1e-15);
        let r = facet_rule(3, 2, Side::Minus, 3).unwrap();
        assert_eq!(r.len(), 9);
        assert!(r.points.iter().all(|p| p[2] == -1.0));
        assert!((r.weight_sum() - 4.0).abs() < 1e-14);
        assert!(facet_rule(2, 2, Side::Plus, 2).is_err());
    }

    #[test]
    fn monomial_box_integrals() {
        assert!((integrate_monomial_box(&[2, 0]) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(integrate_monomial_box(&[1, 4]), 0.0);
        assert!((integrate_monomial_box(&[2, 2, 0]) - 8.0 / 9.0).abs() < 1e-15);
    }
}
