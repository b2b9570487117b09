use catenoid::simons::{algebraic_battery, breakdown, random_admissible_tensor, ShapeTensor3};
use catenoid::Execution;
use proptest::prelude::*;

fn scaled(t: &ShapeTensor3, c: f64) -> ShapeTensor3 {
    let diag = t.h_diag.iter().map(|x| c * x).collect();
    let h3 = t.h3().iter().map(|x| c * c * x).collect();
    ShapeTensor3::new(diag, h3).unwrap()
}

/// `|∇A|²` and `|∇|A||²` straight from their definitions.
fn invariants(t: &ShapeTensor3) -> (f64, f64) {
    let n = t.n;
    let a2: f64 = t.h_diag.iter().map(|x| x * x).sum();
    let mut full = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                full += t.get(i, j, k).powi(2);
            }
        }
    }
    let grad: f64 = (0..n)
        .map(|k| {
            let d: f64 = (0..n).map(|i| t.h_diag[i] * t.get(i, i, k)).sum::<f64>() / a2.sqrt();
            d * d
        })
        .sum();
    (full, grad)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_tensors_are_admissible(n in 2usize..9, seed in any::<u64>()) {
        let t = random_admissible_tensor(n, seed).unwrap();
        prop_assert!(t.admissibility_defect() <= 1e-13);
    }

    #[test]
    fn identity_and_signs(n in 3usize..9, seed in any::<u64>()) {
        let t = random_admissible_tensor(n, seed).unwrap();
        let b = breakdown(&t).unwrap();
        prop_assert!(b.e1 >= 0.0 && b.e2 >= 0.0 && b.e3 >= 0.0);
        prop_assert!(b.relative_residual() <= 1e-12);
        let (full, grad) = invariants(&t);
        let lhs = full - (1.0 + 2.0 / n as f64) * grad;
        prop_assert!((lhs - b.e()).abs() <= 1e-12 * full);
        prop_assert!((b.sum_h2 - full).abs() <= 1e-13 * full);
        prop_assert!((b.grad_norm_a2 - grad).abs() <= 1e-12 * full);
    }

    #[test]
    fn gradient_bounded_by_full_derivative(n in 3usize..9, seed in any::<u64>()) {
        let b = breakdown(&random_admissible_tensor(n, seed).unwrap()).unwrap();
        prop_assert!(b.grad_norm_a2 <= b.sum_h2 * (1.0 + 1e-12));
        prop_assert!((1.0 + 2.0 / n as f64) * b.grad_norm_a2 <= b.sum_h2 * (1.0 + 1e-12));
    }

    #[test]
    fn terms_scale_with_fourth_power(n in 3usize..8, seed in any::<u64>(), c in 0.05f64..20.0) {
        let t = random_admissible_tensor(n, seed).unwrap();
        let b = breakdown(&t).unwrap();
        let s = breakdown(&scaled(&t, c)).unwrap();
        let c4 = c.powi(4);
        for (x, y) in [(b.e1, s.e1), (b.e2, s.e2), (b.e3, s.e3), (b.sum_h2, s.sum_h2), (b.grad_norm_a2, s.grad_norm_a2)] {
            prop_assert!((y - c4 * x).abs() <= 1e-11 * c4 * b.sum_h2);
        }
    }

    #[test]
    fn index_permutation_invariance(n in 3usize..7, seed in any::<u64>(), shift in 1usize..6) {
        let t = random_admissible_tensor(n, seed).unwrap();
        let p = |i: usize| (i + shift) % n;
        let diag = (0..n).map(|i| t.h_diag[p(i)]).collect();
        let mut h3 = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    h3[(i * n + j) * n + k] = t.get(p(i), p(j), p(k));
                }
            }
        }
        let a = breakdown(&t).unwrap();
        let b = breakdown(&ShapeTensor3::new(diag, h3).unwrap()).unwrap();
        for (x, y) in [(a.e1, b.e1), (a.e2, b.e2), (a.e3, b.e3)] {
            prop_assert!((x - y).abs() <= 1e-12 * a.sum_h2);
        }
    }
}

#[test]
fn battery_is_independent_of_execution_strategy() {
    for n in [3, 5] {
        let a = algebraic_battery(n, 300, 9, Execution::Sequential).unwrap();
        let b = algebraic_battery(n, 300, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.max_relative_residual <= 1e-12 && a.min_term >= 0.0);
    }
}

#[test]
fn malformed_tensors_are_rejected() {
    assert!(ShapeTensor3::new(vec![1.0, -1.0, 0.0], vec![0.0; 26]).is_err());
    assert!(ShapeTensor3::new(vec![1.0], vec![0.0]).is_err());
}
