use morley_core::eigensolve::{EnvelopeCholesky, Ordering};
use morley_core::element::{monomials_up_to, Exponent};
use morley_core::quadrature::{integrate_monomial_box, tensor_rule};
use morley_core::{build_reference_element, Polynomial, SymmetricSparseMatrix};
use proptest::prelude::*;

fn poly_strategy(dim: usize, degree: u32) -> impl Strategy<Value = Polynomial> {
    let n = monomials_up_to(dim, degree).len();
    prop::collection::vec(-1.0f64..1.0, n).prop_map(move |c| {
        Polynomial::from_terms(dim, monomials_up_to(dim, degree).into_iter().zip(c))
    })
}

/// Diagonally dominant symmetric matrix on a random sparsity pattern.
fn spd_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..25).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, -1.0f64..1.0), 0..3 * n).prop_map(move |off| {
            let mut t: Vec<(usize, usize, f64)> = off.into_iter().filter(|(i, j, _)| i != j).collect();
            let mut rowsum = vec![0.0; n];
            for &(i, j, v) in &t {
                rowsum[i] += v.abs();
                rowsum[j] += v.abs();
            }
            for (i, s) in rowsum.into_iter().enumerate() {
                t.push((i, i, 1.0 + s));
            }
            (n, t)
        })
    })
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        p.swap(i, (s % (i as u64 + 1)) as usize);
    }
    p
}

proptest! {
    #[test]
    fn sparse_matvec_matches_dense((n, t) in spd_strategy(), x in prop::collection::vec(-1.0f64..1.0, 25)) {
        let s = SymmetricSparseMatrix::from_triplets(n, &t);
        let x = &x[..n];
        let y = s.matvec(x);
        let z = s.to_dense().matvec(x);
        for (a, b) in y.iter().zip(&z) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_preserves_quadratic_form((n, t) in spd_strategy(), seed in any::<u64>(), x in prop::collection::vec(-1.0f64..1.0, 25)) {
        let s = SymmetricSparseMatrix::from_triplets(n, &t);
        let perm = shuffled(n, seed);
        let p = s.permuted(&perm);
        let x = &x[..n];
        let xp: Vec<f64> = perm.iter().map(|&o| x[o]).collect();
        prop_assert!((s.bilinear(x, x) - p.bilinear(&xp, &xp)).abs() < 1e-10);
        prop_assert_eq!(s.nnz(), p.nnz());
    }

    #[test]
    fn envelope_cholesky_solves((n, t) in spd_strategy(), b in prop::collection::vec(-1.0f64..1.0, 25)) {
        let s = SymmetricSparseMatrix::from_triplets(n, &t);
        let b = &b[..n];
        for ordering in [Ordering::Natural, Ordering::Rcm] {
            let x = EnvelopeCholesky::factor(&s, ordering).unwrap().solve(b);
            let r = s.matvec(&x);
            for (ri, bi) in r.iter().zip(b) {
                prop_assert!((ri - bi).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_rule(a in poly_strategy(3, 3), b in poly_strategy(3, 3), axis in 0usize..3) {
        let lhs = (&a * &b).derivative(axis);
        let rhs = &(&a.derivative(axis) * &b) + &(&a * &b.derivative(axis));
        prop_assert!(lhs.max_coefficient_diff(&rhs) < 1e-12);
    }

    #[test]
    fn pullback_agrees_with_evaluation(p in poly_strategy(2, 4), cx in -1.0f64..1.0, cy in -1.0f64..1.0, h in 0.05f64..1.0, xi in -1.0f64..1.0, eta in -1.0f64..1.0) {
        let q = p.affine_pullback(&[cx, cy], h);
        let direct = p.eval(&[cx + h * xi, cy + h * eta]);
        prop_assert!((q.eval(&[xi, eta]) - direct).abs() < 1e-11);
    }

    #[test]
    fn gauss_rule_exact_on_monomials(e in prop::array::uniform3(0u32..8)) {
        let rule = tensor_rule(3, 4).unwrap();
        let exact = integrate_monomial_box(&e);
        let approx = rule.integrate(|x| x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32));
        prop_assert!((exact - approx).abs() < 1e-13);
    }

    #[test]
    fn shape_functions_round_trip_through_dofs(c in prop::collection::vec(-1.0f64..1.0, 14), dim in 2usize..4) {
        let r = build_reference_element(dim).unwrap();
        let c = &c[..r.ndofs()];
        let p = r.combine(c);
        let back = r.dof_values(&p);
        for (a, b) in back.iter().zip(c) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(r.in_shape_space(&p, 1e-12));
    }

    #[test]
    fn integrals_match_monomial_table(p in poly_strategy(2, 5)) {
        let expect: f64 = p.terms().map(|(e, c): (&Exponent, &f64)| c * integrate_monomial_box(&e[..2])).sum();
        prop_assert!((p.integrate_box() - expect).abs() < 1e-12);
    }
}
