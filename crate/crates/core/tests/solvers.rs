mod common;

use common::{dense_of_block, dense_of_scalar, dense_solve, dominant_block, dominant_scalar, rng};
use curveflow::linalg::CyclicTridiag;
use rand::Rng;

#[test]
fn scalar_solver_matches_dense_elimination() {
    let mut r = rng(11);
    for case in 0..1000 {
        let n = r.gen_range(3..40);
        let (a, b) = dominant_scalar(&mut r, n);
        let x = a.solve(&b).unwrap();
        let y = dense_solve(dense_of_scalar(&a), b.clone());
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() <= 1e-11 * scale, "case {case}: {u} vs {v}");
        }
    }
}

#[test]
fn block_solver_matches_dense_elimination() {
    let mut r = rng(12);
    for case in 0..1000 {
        let n = r.gen_range(3..30);
        let (a, b) = dominant_block(&mut r, n);
        assert!(a.is_diagonally_dominant());
        let x = a.solve(&b).unwrap();
        let flat: Vec<f64> = b.iter().flat_map(|v| [v.x, v.y]).collect();
        let y = dense_solve(dense_of_block(&a), flat);
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (j, v) in x.iter().enumerate() {
            assert!((v.x - y[2 * j]).abs() <= 1e-11 * scale, "case {case}");
            assert!((v.y - y[2 * j + 1]).abs() <= 1e-11 * scale, "case {case}");
        }
    }
}

#[test]
fn four_by_four_shifted_laplacian() {
    let a = CyclicTridiag::new(vec![-1.0; 4], vec![3.0; 4], vec![-1.0; 4]).unwrap();
    let b = vec![1.0, 0.0, 0.0, 0.0];
    let x = a.solve(&b).unwrap();
    let y = dense_solve(dense_of_scalar(&a), b);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).abs() < 1e-15);
    }
}

#[test]
fn residual_is_small_for_wide_range_of_sizes() {
    let mut r = rng(13);
    for n in [3usize, 4, 5, 64, 1000, 5000] {
        let (a, b) = dominant_scalar(&mut r, n);
        let x = a.solve(&b).unwrap();
        let res = a.apply(&x);
        for (u, v) in res.iter().zip(&b) {
            assert!((u - v).abs() < 1e-11 * (1.0 + v.abs()));
        }
    }
}
