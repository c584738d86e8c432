use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::quadrature::{integrate_monomial_box, Side};

/// Exponent multi-index; slots beyond the polynomial's dimension stay zero.
pub type Exponent = [u32; 3];

/// Exact multivariate polynomial with real coefficients on `dim <= 3` variables.
///
/// Terms with an exactly zero coefficient are never stored.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "polynomial dimension must be 1..=3");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(dim, [0; 3], c)
    }

    pub fn monomial(dim: usize, exponent: Exponent, coeff: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(exponent, coeff);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, f64)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// The coordinate `xi_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(dim, e, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, exponent: Exponent, coeff: f64) {
        debug_assert!(exponent[self.dim..].iter().all(|&e| e == 0));
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&exponent);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &Exponent) -> f64 {
        self.terms.get(exponent).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    /// Drops terms with `|coeff| <= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(e, c)| (*e, *c)),
        )
    }

    /// Partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < self.dim);
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(e, _)| e[axis] > 0).map(|(e, c)| {
                let mut d = *e;
                d[axis] -= 1;
                (d, c * e[axis] as f64)
            }),
        )
    }

    /// Mixed derivative `∂^alpha`, `alpha[i]` times along axis `i`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> Self {
        let mut p = self.clone();
        for (axis, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                p = p.derivative(axis);
            }
        }
        p
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for d in 0..self.dim {
                    if e[d] > 0 {
                        v *= point[d].powi(e[d] as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Exact integral over `[-1, 1]^dim`.
    pub fn integrate_box(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * integrate_monomial_box(&e[..self.dim]))
            .sum()
    }

    /// Exact mean over `[-1, 1]^dim`.
    pub fn mean_box(&self) -> f64 {
        self.integrate_box() / f64::from(1u32 << self.dim)
    }

    /// Substitutes `xi_axis = value`; the result keeps the same dimension
    /// with no dependence on `axis`.
    pub fn restrict(&self, axis: usize, value: f64) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(e, c)| {
                let mut r = *e;
                r[axis] = 0;
                (r, c * value.powi(e[axis] as i32))
            }),
        )
    }

    /// Exact integral over the facet `{xi_axis = side}` of `[-1, 1]^dim`.
    pub fn integrate_facet(&self, axis: usize, side: Side) -> f64 {
        let r = self.restrict(axis, side.sign());
        r.terms
            .iter()
            .map(|(e, c)| {
                let free: Vec<u32> = (0..self.dim).filter(|&d| d != axis).map(|d| e[d]).collect();
                c * integrate_monomial_box(&free)
            })
            .sum()
    }

    /// Exact mean over the facet `{xi_axis = side}`.
    pub fn mean_facet(&self, axis: usize, side: Side) -> f64 {
        self.integrate_facet(axis, side) / f64::from(1u32 << (self.dim - 1))
    }

    /// `q(xi) = p(center + h xi)`: pulls a polynomial in physical coordinates
    /// back to the reference cell of a box with the given center and half-width.
    pub fn affine_pullback(&self, center: &[f64], h: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            // prod_d (center_d + h xi_d)^{e_d}, expanded binomially
            let mut acc = Self::constant(self.dim, *c);
            for d in 0..self.dim {
                let k = e[d];
                if k == 0 {
                    continue;
                }
                let mut factor = Self::zero(self.dim);
                for j in 0..=k {
                    let mut ex = [0; 3];
                    ex[d] = j;
                    let coeff = binomial(k, j) * center[d].powi((k - j) as i32) * h.powi(j as i32);
                    factor.add_term(ex, coeff);
                }
                acc = &acc * &factor;
            }
            out = &out + &acc;
        }
        out
    }

    /// `max |a_e - b_e|` over the union of terms.
    pub fn max_coefficient_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs_coefficient()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// All exponents of total degree `<= degree` in `dim` variables, graded then
/// lexicographic (first variable's exponent descending within a grade).
pub fn monomials_up_to(dim: usize, degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for total in 0..=degree {
        out.extend(monomials_of_degree(dim, total));
    }
    out
}

/// All exponents of total degree exactly `degree`.
pub fn monomials_of_degree(dim: usize, degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    match dim {
        1 => out.push([degree, 0, 0]),
        2 => {
            for a in (0..=degree).rev() {
                out.push([a, degree - a, 0]);
            }
        }
        3 => {
            for a in (0..=degree).rev() {
                for b in (0..=degree - a).rev() {
                    out.push([a, b, degree - a - b]);
                }
            }
        }
        _ => panic!("unsupported dimension {dim}"),
    }
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            write!(f, "{}", c.abs())?;
            for d in 0..self.dim {
                match e[d] {
                    0 => {}
                    1 => write!(f, "*x{}", d + 1)?,
                    k => write!(f, "*x{}^{}", d + 1, k)?,
                }
            }
        }
        Ok(())
    }
}
