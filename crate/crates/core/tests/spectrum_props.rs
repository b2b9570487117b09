use catenoid::spectrum::{
    delta_sweep, eigenfunctions, eigenvalues, eigenvalues_with, morse_index_with, multiplicity, IndexConfig,
    SpectralProblem,
};
use catenoid::{make_spec, Error, Execution};
use proptest::prelude::*;

fn lowest(n: usize, delta: f64, r: f64, l: usize, k: usize) -> Vec<f64> {
    let spec = make_spec(n, 1.0).unwrap();
    let p = SpectralProblem::two_sided(&spec, delta, r, l).unwrap().with_grid(1024).unwrap();
    eigenvalues(&p, k, 1e-8).unwrap().eigenvalues
}

#[test]
fn eigenvalues_decrease_with_domain() {
    for n in [3, 5] {
        let a = lowest(n, 0.0, 2.0, 0, 2);
        let b = lowest(n, 0.0, 4.0, 0, 2);
        let c = lowest(n, 0.0, 8.0, 0, 2);
        for k in 0..2 {
            assert!(a[k] > b[k] && b[k] > c[k], "n={n} k={k}: {a:?} {b:?} {c:?}");
        }
    }
}

#[test]
fn eigenvalues_increase_with_mode_and_delta() {
    let mut last = f64::NEG_INFINITY;
    for l in 0..4 {
        let v = lowest(4, 0.0, 6.0, l, 1)[0];
        assert!(v > last);
        last = v;
    }
    let mut last = f64::NEG_INFINITY;
    for delta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let v = lowest(3, delta, 6.0, 0, 1)[0];
        assert!(v > last);
        last = v;
    }
}

#[test]
fn full_delta_leaves_a_positive_operator() {
    // with δ = 1 the operator is the plain Laplacian
    for l in [0, 2] {
        assert!(lowest(3, 1.0, 8.0, l, 1)[0] > 0.0);
    }
}

#[test]
fn eigenfunctions_oscillate_and_solve_the_problem() {
    let spec = make_spec(3, 1.0).unwrap();
    let p = SpectralProblem::two_sided(&spec, 0.0, 8.0, 0).unwrap().with_grid(512).unwrap();
    let table = eigenfunctions(&p, 4).unwrap();
    assert_eq!(table.r.len(), 514);
    for (k, u) in table.functions.iter().enumerate() {
        assert_eq!(u[0], 0.0);
        assert_eq!(*u.last().unwrap(), 0.0);
        let big = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let signs: Vec<f64> = u.iter().copied().filter(|v| v.abs() > 1e-8 * big).collect();
        let changes = signs.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, k);
        assert!(table.residuals[k] < 1e-9);
        let q = catenoid::spectrum::rayleigh_quotient(&p, u).unwrap();
        assert!((q - table.eigenvalues[k]).abs() < 1e-8 * (1.0 + q.abs()), "{q} vs {}", table.eigenvalues[k]);
    }
    // ground state is even and positive
    let u = &table.functions[0];
    assert!(u[1..u.len() - 1].iter().all(|&v| v > 0.0));
    for i in 0..u.len() {
        assert!((u[i] - u[u.len() - 1 - i]).abs() < 1e-8 * u[u.len() / 2]);
    }
}

#[test]
fn flat_problem_converges_under_refinement() {
    let exact = (std::f64::consts::PI / 8.0).powi(2);
    let mut last = f64::INFINITY;
    for grid in [64, 256, 1024] {
        let p = SpectralProblem::flat(4.0).unwrap().with_grid(grid).unwrap();
        let s = eigenvalues(&p, 1, 1e-9).unwrap();
        let err = (s.base_eigenvalues[0] - exact).abs();
        assert!(err < last);
        last = err;
        assert!((s.eigenvalues[0] - exact).abs() < 1e-8);
    }
}

#[test]
fn strategies_agree() {
    let spec = make_spec(4, 1.0).unwrap();
    let p = SpectralProblem::two_sided(&spec, 0.0, 5.0, 1).unwrap().with_grid(256).unwrap();
    let a = eigenvalues_with(&p, 3, 1e-8, Execution::Sequential).unwrap();
    let b = eigenvalues_with(&p, 3, 1e-8, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let cfg = |exec| IndexConfig { grid_n: 256, tol: 1e-8, exec };
    let x = morse_index_with(&spec, 0.0, 5.0, 4, cfg(Execution::Sequential)).unwrap();
    let y = morse_index_with(&spec, 0.0, 5.0, 4, cfg(Execution::Parallel)).unwrap();
    assert_eq!(x, y);
}

#[test]
fn index_falls_as_delta_grows() {
    let spec = make_spec(3, 1.0).unwrap();
    let deltas = [0.0, 0.3, 2.0 / 3.0, 0.9, 1.0];
    let reports = delta_sweep(&spec, 8.0, &deltas, 4, IndexConfig::default()).unwrap();
    let totals: Vec<u64> = reports.iter().map(|r| r.total_index).collect();
    assert_eq!(totals[0], 1);
    assert_eq!(*totals.last().unwrap(), 0);
    assert!(totals.windows(2).all(|w| w[0] >= w[1]), "{totals:?}");
    for (r, d) in reports.iter().zip(deltas) {
        assert_eq!(r.delta, d);
        assert_eq!(r.per_mode.len(), 5);
    }
}

#[test]
fn failures_are_reported() {
    let spec = make_spec(3, 1.0).unwrap();
    let p = SpectralProblem::two_sided(&spec, 0.0, 8.0, 0).unwrap();
    assert!(matches!(eigenvalues(&p, 1, 1e-30), Err(Error::NotConverged { .. })));
    assert!(eigenvalues(&p, 0, 1e-8).is_err());
    assert!(SpectralProblem::two_sided(&spec, 0.0, -1.0, 0).is_err());
    assert!(p.with_grid(4).is_err());
    assert!(matches!(
        morse_index_with(&spec, 0.0, 8.0, 1, IndexConfig::default()),
        Err(Error::InsufficientModes { .. })
    ));
    assert!(morse_index_with(&spec, 1.5, 8.0, 4, IndexConfig::default()).is_err());
}

/// Dimension of degree-`l` harmonic polynomials in `n` variables, by
/// counting monomials with a Pascal table.
fn harmonic_dimension(n: usize, l: usize) -> u64 {
    let mut table = vec![vec![0u64; l + 1]; n + 1];
    for row in table.iter_mut() {
        row[0] = 1;
    }
    for v in 1..=n {
        for d in 1..=l {
            table[v][d] = table[v - 1][d] + table[v][d - 1];
        }
    }
    let monomials = |d: usize| table[n][d];
    let lower = if l >= 2 { monomials(l - 2) } else { 0 };
    monomials(l) - lower
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplicities(n in 3usize..9, l in 0usize..12) {
        prop_assert_eq!(multiplicity(n, l), harmonic_dimension(n, l));
        if n == 3 {
            prop_assert_eq!(multiplicity(n, l), 2 * l as u64 + 1);
        }
    }

    #[test]
    fn rayleigh_bounds_the_ground_state(c in proptest::collection::vec(-1.0f64..1.0, 1..6), l in 0usize..3) {
        prop_assume!(c.iter().any(|x| x.abs() > 1e-3));
        let spec = make_spec(4, 1.0).unwrap();
        let p = SpectralProblem::two_sided(&spec, 0.0, 6.0, l).unwrap().with_grid(256).unwrap();
        let nodes = p.nodes();
        let f: Vec<f64> = nodes
            .iter()
            .map(|&r| {
                let x = (r + 6.0) / 12.0;
                c.iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * x).sin())
                    .sum::<f64>()
            })
            .collect();
        let mut f = f;
        let last = f.len() - 1;
        f[0] = 0.0;
        f[last] = 0.0;
        let q = catenoid::spectrum::rayleigh_quotient(&p, &f).unwrap();
        let base = eigenvalues(&p, 1, 1e-6).unwrap().base_eigenvalues[0];
        prop_assert!(q >= base - 1e-9 * (1.0 + base.abs()));
    }
}
