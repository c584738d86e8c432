//! Analytic functions with exact first and second derivatives, used as
//! interpolation targets and exact eigenfunctions.

use std::f64::consts::PI;

use crate::element::Polynomial;

/// A smooth function on physical coordinates with closed-form derivatives.
pub trait SmoothFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64; 3]) -> f64;
    fn gradient(&self, x: &[f64; 3]) -> [f64; 3];
    fn hessian(&self, x: &[f64; 3]) -> [[f64; 3]; 3];
}

/// `amplitude * prod_d sin(m_d pi x_d)`: the simply-supported biharmonic
/// eigenfunctions of the unit box, with eigenvalue `(sum m_d^2)^2 pi^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineProduct {
    pub dim: usize,
    pub modes: [u32; 3],
    pub amplitude: f64,
}

impl SineProduct {
    pub fn new(dim: usize, modes: [u32; 3], amplitude: f64) -> Self {
        Self {
            dim,
            modes,
            amplitude,
        }
    }

    /// The mode normalized to unit `L^2` norm on the unit box: amplitude `2^{dim/2}`.
    pub fn normalized(dim: usize, modes: [u32; 3]) -> Self {
        Self::new(dim, modes, 2f64.powf(dim as f64 / 2.0))
    }

    /// `(sum m_d^2)^2 pi^4`.
    pub fn biharmonic_eigenvalue(&self) -> f64 {
        let s: u32 = self.modes[..self.dim].iter().map(|m| m * m).sum();
        f64::from(s * s) * PI.powi(4)
    }

    fn factors(&self, x: &[f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let mut s = [1.0; 3];
        let mut ds = [0.0; 3];
        let mut dds = [0.0; 3];
        for d in 0..self.dim {
            let k = f64::from(self.modes[d]) * PI;
            let (sn, cs) = (k * x[d]).sin_cos();
            s[d] = sn;
            ds[d] = k * cs;
            dds[d] = -k * k * sn;
        }
        (s, ds, dds)
    }
}

impl SmoothFunction for SineProduct {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64; 3]) -> f64 {
        let (s, _, _) = self.factors(x);
        self.amplitude * s[..self.dim].iter().product::<f64>()
    }

    fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let (s, ds, _) = self.factors(x);
        let mut g = [0.0; 3];
        for a in 0..self.dim {
            g[a] = self.amplitude
                * (0..self.dim)
                    .map(|d| if d == a { ds[d] } else { s[d] })
                    .product::<f64>();
        }
        g
    }

    fn hessian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let (s, ds, dds) = self.factors(x);
        let mut hm = [[0.0; 3]; 3];
        for a in 0..self.dim {
            for b in 0..self.dim {
                hm[a][b] = self.amplitude
                    * (0..self.dim)
                        .map(|d| match (d == a, d == b) {
                            (true, true) => dds[d],
                            (true, false) | (false, true) => ds[d],
                            (false, false) => s[d],
                        })
                        .product::<f64>();
            }
        }
        hm
    }
}

/// A polynomial in physical coordinates, viewed as a smooth function.
#[derive(Debug, Clone)]
pub struct PolynomialFunction {
    value: Polynomial,
    gradient: Vec<Polynomial>,
    hessian: Vec<Vec<Polynomial>>,
}

impl PolynomialFunction {
    pub fn new(p: Polynomial) -> Self {
        let dim = p.dim();
        let gradient: Vec<Polynomial> = (0..dim).map(|a| p.derivative(a)).collect();
        let hessian = gradient
            .iter()
            .map(|g| (0..dim).map(|b| g.derivative(b)).collect())
            .collect();
        Self {
            value: p,
            gradient,
            hessian,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.value
    }
}

impl SmoothFunction for PolynomialFunction {
    fn dim(&self) -> usize {
        self.value.dim()
    }

    fn value(&self, x: &[f64; 3]) -> f64 {
        self.value.eval(x)
    }

    fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for (a, p) in self.gradient.iter().enumerate() {
            g[a] = p.eval(x);
        }
        g
    }

    fn hessian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let mut hm = [[0.0; 3]; 3];
        for (a, row) in self.hessian.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                hm[a][b] = p.eval(x);
            }
        }
        hm
    }
}

/// `(prod_d x_d (1 - x_d))^2`: vanishes with its gradient on the unit box boundary.
pub fn squared_box_bubble(dim: usize) -> Polynomial {
    let mut p = Polynomial::constant(dim, 1.0);
    for d in 0..dim {
        let x = Polynomial::coordinate(dim, d);
        let factor = &x - &(&x * &x);
        p = &p * &factor;
    }
    &p * &p
}
