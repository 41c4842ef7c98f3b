mod common;

use common::{max_abs_diff, rel_diff};
use hyperpint::blockprec::{PrecConfig, PrecShape};
use hyperpint::conslaw::{LinearFlux, NonlinearStep};
use hyperpint::grid::forward_solve;
use hyperpint::nonlinear::{
    interpolate_trajectory, nested_solve, nonlinear_solve, replicate_initial, LinearMode,
    NestedLevel, NonlinearConfig,
};
use hyperpint::problems::{NonlinearProblem, NonlinearProblemId};
use hyperpint::{Boundary, SolveStatus, SpaceTimeGrid, SpaceTimeVector};

fn idp(nx: usize) -> (NonlinearStep, Vec<f64>) {
    let p = NonlinearProblem::new(NonlinearProblemId::Idp, 0.1).unwrap();
    let g = p.grid(nx, None, None).unwrap();
    (p.step(g.clone()), p.discrete_initial(&g))
}

fn replicated(step: &NonlinearStep, q0: &[f64]) -> SpaceTimeVector {
    let g = step.grid();
    replicate_initial(q0, step.nvars(), g.nx(), g.nt()).unwrap()
}

#[test]
fn sequential_solution_needs_no_iterations() {
    let (step, q0) = idp(32);
    let b = SpaceTimeVector::initial_value_rhs(&q0, 2, 32, step.grid().nt()).unwrap();
    let exact = forward_solve(&step, &b).unwrap();
    let (q, rep) = nonlinear_solve(&step, &q0, &exact, &NonlinearConfig::default()).unwrap();
    assert_eq!(rep.iterations, 0);
    assert_eq!(rep.status, SolveStatus::Converged);
    assert_eq!(q.as_slice(), exact.as_slice());
}

#[test]
fn exact_linear_solves_reach_the_sequential_solution() {
    let (step, q0) = idp(64);
    let nt = step.grid().nt();
    let b = SpaceTimeVector::initial_value_rhs(&q0, 2, 64, nt).unwrap();
    let exact = forward_solve(&step, &b).unwrap();
    let (q, rep) = nonlinear_solve(&step, &q0, &replicated(&step, &q0), &NonlinearConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Converged, "{:?}", rep.residual_history);
    assert!(max_abs_diff(q.as_slice(), exact.as_slice()) < 1e-9);
    assert_eq!(rep.residual_history.len(), rep.iterations + 1);
    assert_eq!(rep.residual_history[0], 1.0);
    assert!(rep.inner_iteration_counts.is_none());
}

#[test]
fn linear_flux_converges_in_one_iteration() {
    let nx = 40;
    let g = SpaceTimeGrid::tiled(nx, 0.0, 1.0, 0.5, 41, Boundary::Periodic).unwrap();
    let step = NonlinearStep::new(LinearFlux::acoustics(2.0, 0.5).unwrap().into(), g.clone());
    let q0: Vec<f64> = (0..2 * nx).map(|k| ((k * 7) % 11) as f64 / 11.0).collect();
    let (_, rep) = nonlinear_solve(&step, &q0, &replicated(&step, &q0), &NonlinearConfig::default()).unwrap();
    assert_eq!(rep.iterations, 1);
    assert!(rep.final_relative_residual() < 1e-12);
}

#[test]
fn untruncated_preconditioner_reproduces_exact_mode() {
    let (step, q0) = idp(48);
    let init = replicated(&step, &q0);
    let exact = nonlinear_solve(&step, &q0, &init, &NonlinearConfig::default()).unwrap().1;
    let cfg = NonlinearConfig {
        linear_mode: LinearMode::Preconditioned(PrecConfig { shape: PrecShape::Full, ..PrecConfig::default() }),
        ..NonlinearConfig::default()
    };
    let full = nonlinear_solve(&step, &q0, &init, &cfg).unwrap().1;
    assert_eq!(exact.iterations, full.iterations);
    assert_eq!(full.inner_iteration_counts.as_ref().unwrap(), &vec![1; full.iterations]);
    for (a, b) in exact.residual_history.iter().zip(&full.residual_history).skip(1) {
        assert!((a - b).abs() <= 1e-6 * a + 1e-14, "{a} {b}");
    }
}

#[test]
fn nested_iteration_starts_closer() {
    let (s1, q1) = idp(64);
    let (s2, q2) = idp(128);
    let cfg = NonlinearConfig::default();
    let nested = nested_solve(
        &[NestedLevel { step: s1, q0: q1 }, NestedLevel { step: s2.clone(), q0: q2.clone() }],
        &cfg,
    )
    .unwrap();
    assert_eq!(nested.len(), 2);
    let cold = nonlinear_solve(&s2, &q2, &replicated(&s2, &q2), &cfg).unwrap().1;
    assert!(nested.iter().all(|(_, r)| r.converged));
    let warm = &nested[1].1;
    assert!(warm.iterations <= cold.iterations, "{} vs {}", warm.iterations, cold.iterations);
    assert!(warm.initial_residual_norm < 0.5 * cold.initial_residual_norm);
    assert!(rel_diff(nested[1].0.at(0), &q2) == 0.0);
}

#[test]
fn inadmissible_iterate_is_reported() {
    let (step, q0) = idp(32);
    let mut init = replicated(&step, &q0);
    // a C-point survives F-relaxation, so its negative depth reaches the linearization
    init.set(0, 5, 8, -0.5);
    let (_, rep) = nonlinear_solve(&step, &q0, &init, &NonlinearConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Inadmissible);
    assert!(!rep.converged);
    assert!(rep.failure.is_some());

    let levels = [NestedLevel { step: step.clone(), q0: vec![-1.0; 64] }, NestedLevel { step, q0 }];
    let res = nested_solve(&levels, &NonlinearConfig::default()).unwrap();
    assert_eq!(res.len(), 1);
    assert_eq!(res[0].1.status, SolveStatus::Inadmissible);
}

#[test]
fn configuration_is_validated() {
    let (step, q0) = idp(16);
    let init = replicated(&step, &q0);
    for cfg in [
        NonlinearConfig { maxit: 0, ..NonlinearConfig::default() },
        NonlinearConfig { inner_it: 0, ..NonlinearConfig::default() },
        NonlinearConfig { m: 1, ..NonlinearConfig::default() },
        NonlinearConfig {
            linear_mode: LinearMode::Preconditioned(PrecConfig { m: 0, ..PrecConfig::default() }),
            ..NonlinearConfig::default()
        },
    ] {
        assert!(nonlinear_solve(&step, &q0, &init, &cfg).is_err());
    }
    let short = SpaceTimeVector::zeros(2, 16, 3);
    assert!(nonlinear_solve(&step, &q0, &short, &NonlinearConfig::default()).is_err());
    assert!(replicate_initial(&q0, 2, 15, 4).is_err());
}

#[test]
fn interpolation_reproduces_linear_fields() {
    let coarse_g = SpaceTimeGrid::tiled(16, 0.0, 2.0, 1.0, 9, Boundary::Extrapolate).unwrap();
    let fine_g = SpaceTimeGrid::tiled(32, 0.0, 2.0, 1.0, 21, Boundary::Extrapolate).unwrap();
    let f = |x: f64, t: f64| 3.0 * x - 2.0 * t + 0.5;
    let coarse = SpaceTimeVector::from_fn(1, 16, 9, |_, i, n| f(coarse_g.x(i), coarse_g.t(n)));
    let fine = interpolate_trajectory(&coarse, &coarse_g, &fine_g).unwrap();
    for n in 0..21 {
        // the outermost half cells lie beyond the first and last coarse centres
        for i in 1..31 {
            let want = f(fine_g.x(i), fine_g.t(n));
            assert!((fine.get(0, i, n) - want).abs() < 1e-12, "{i} {n}");
        }
    }
    let same = interpolate_trajectory(&coarse, &coarse_g, &coarse_g).unwrap();
    assert!(max_abs_diff(same.as_slice(), coarse.as_slice()) < 1e-15);
    assert!(interpolate_trajectory(&coarse, &fine_g, &coarse_g).is_err());
}
