use crate::element::{monomials_of_degree, monomials_up_to, Exponent, Polynomial};
use crate::linalg::DenseMatrix;

/// The quartic `P f` on `[-1, 1]^dim` whose derivative averages of every
/// order `0..=4` match those of `f`.
pub fn moment_project(f: &Polynomial) -> Polynomial {
    let dim = f.dim();
    let basis = monomials_up_to(dim, 4);
    let n = basis.len();
    let mut moments = DenseMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (i, alpha) in basis.iter().enumerate() {
        for (j, beta) in basis.iter().enumerate() {
            moments[(i, j)] = Polynomial::monomial(dim, *beta, 1.0)
                .derivative_multi(&alpha[..dim])
                .integrate_box();
        }
        rhs[i] = f.derivative_multi(&alpha[..dim]).integrate_box();
    }
    // Block triangular by degree with nonzero diagonal, so always solvable.
    let lu = moments
        .lu(1e-14)
        .expect("moment system on a box is nonsingular");
    let coeffs = lu.solve(&rhs);
    Polynomial::from_terms(dim, basis.into_iter().zip(coeffs)).pruned(1e-13)
}

/// `max_{|alpha| = 4} |∂^alpha (P f) - mean(∂^alpha f)|`.
pub fn commuting_check(f: &Polynomial) -> f64 {
    let dim = f.dim();
    let p = moment_project(f);
    let alphas: Vec<Exponent> = monomials_of_degree(dim, 4);
    alphas
        .iter()
        .map(|a| {
            let lhs = p.derivative_multi(&a[..dim]).mean_box();
            let rhs = f.derivative_multi(&a[..dim]).mean_box();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}
