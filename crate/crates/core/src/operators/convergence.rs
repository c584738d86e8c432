use serde::Serialize;

use crate::element::ReferenceElement;
use crate::functions::SmoothFunction;
use crate::mesh::CartesianMesh;
use crate::quadrature::tensor_rule;

use super::interpolation::{canonical_interpolate_function, FacetQuadrature};
use super::OperatorError;

/// Broken-seminorm errors of `f - Π_h f` on a sequence of unit-box meshes.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceProbe {
    pub ns: Vec<usize>,
    /// Mesh parameter `1/N`.
    pub hs: Vec<f64>,
    /// `errors[l][k]`: broken `H^l` seminorm on mesh `k`, `l = 0, 1, 2`.
    pub errors: [Vec<f64>; 3],
    /// Least-squares slope of `log error` against `log h`, per `l`.
    pub orders: [f64; 3],
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Squared broken `H^0`, `H^1`, `H^2` seminorms of `f - Π_h f` on one mesh.
pub fn interpolation_errors(
    reference: &ReferenceElement,
    f: &dyn SmoothFunction,
    mesh: &CartesianMesh,
    quad: FacetQuadrature,
    volume_order: usize,
) -> Result<[f64; 3], OperatorError> {
    let dim = mesh.dim();
    let rule = tensor_rule(dim, volume_order)?;
    let mut sums = [0.0; 3];
    for e in 0..mesh.element_count() {
        let g = mesh.element_geometry(e)?;
        let interp = canonical_interpolate_function(reference, f, &g, quad)?.interpolant;
        let grad: Vec<_> = (0..dim).map(|a| interp.derivative(a)).collect();
        let hess: Vec<Vec<_>> = grad
            .iter()
            .map(|ga| (0..dim).map(|b| ga.derivative(b)).collect())
            .collect();
        let jac = g.h.powi(dim as i32);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let x = g.to_physical(xi);
            let wj = w * jac;
            sums[0] += wj * (f.value(&x) - interp.eval(xi)).powi(2);
            let fg = f.gradient(&x);
            let fh = f.hessian(&x);
            for a in 0..dim {
                sums[1] += wj * (fg[a] - grad[a].eval(xi) / g.h).powi(2);
                for b in 0..dim {
                    sums[2] += wj * (fh[a][b] - hess[a][b].eval(xi) / (g.h * g.h)).powi(2);
                }
            }
        }
    }
    Ok(sums)
}

/// Runs the interpolation error study on unit-box meshes with the given `N` values.
pub fn interpolation_convergence_probe(
    reference: &ReferenceElement,
    f: &dyn SmoothFunction,
    ns: &[usize],
    quad: FacetQuadrature,
    volume_order: usize,
) -> Result<ConvergenceProbe, OperatorError> {
    let mut errors: [Vec<f64>; 3] = Default::default();
    let mut hs = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = CartesianMesh::unit(reference.dim(), n)?;
        let sq = interpolation_errors(reference, f, &mesh, quad, volume_order)?;
        for l in 0..3 {
            errors[l].push(sq[l].sqrt());
        }
        hs.push(1.0 / n as f64);
    }
    let log_h: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let mut orders = [f64::NAN; 3];
    if ns.len() >= 2 {
        for l in 0..3 {
            let log_e: Vec<f64> = errors[l].iter().map(|e| e.ln()).collect();
            orders[l] = least_squares_slope(&log_h, &log_e);
        }
    }
    Ok(ConvergenceProbe {
        ns: ns.to_vec(),
        hs,
        errors,
        orders,
    })
}
