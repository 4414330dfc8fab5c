use mprk::harness::{on_b2_eq_b3_circle, FeasibilityPoint};
use mprk::pds::{eval_production, eval_rhs, exact_solution};
use mprk::{
    builtin, error_metric, feasibility_map, feasible_case1, fit_slope, integrate, mmatrix_solve,
    uniform_grid, DenseMatrix, Integrator, LuFactors, SchemeSpec, Tableau3, Trajectory,
};
use proptest::prelude::*;

const PROBLEMS: &[&str] = &[
    "linear",
    "nonlinear",
    "brusselator",
    "robertson",
    "monomial-pair:1,2,1,1",
    "monomial-pair:1,3,2,2",
    "monomial-pair:2,1,0.5,2,4",
];

const SCHEMES: &[&str] = &[
    "mpe",
    "mprk22:1",
    "mprk22:0.5",
    "mprk22:2/3:ncs",
    "mprk43i:1,0.5",
    "mprk43i:0.5,0.75",
    "mprk43ii:0.5",
    "mprk43ii:0.5:ncs",
];

fn positive_state(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-6.0f64..1.0, n)
        .prop_map(|e| e.into_iter().map(|x| 10f64.powf(x)).collect())
}

fn problem_and_state() -> impl Strategy<Value = (&'static str, Vec<f64>)> {
    prop::sample::select(PROBLEMS).prop_flat_map(|name| {
        let n = builtin(name).unwrap().system.dim();
        (Just(name), positive_state(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_components_sum_to_zero((name, y) in problem_and_state()) {
        let p = builtin(name).unwrap();
        let f = eval_rhs(p.system.as_ref(), &y).unwrap();
        let prod = eval_production(p.system.as_ref(), &y).unwrap();
        let scale: f64 = prod.as_slice().iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        let total: f64 = f.iter().sum();
        prop_assert!(total.abs() <= 8.0 * f64::EPSILON * scale, "{name}: {total} vs scale {scale}");
    }

    #[test]
    fn production_is_nonnegative_with_empty_diagonal((name, y) in problem_and_state()) {
        let p = builtin(name).unwrap();
        let prod = eval_production(p.system.as_ref(), &y).unwrap();
        for i in 0..prod.n() {
            prop_assert_eq!(prod.get(i, i), 0.0);
            for j in 0..prod.n() {
                prop_assert!(prod.get(i, j) >= 0.0);
                prop_assert_eq!(prod.destruction(i, j), prod.get(j, i));
            }
        }
    }

    #[test]
    fn exact_solutions_satisfy_the_ode(
        name in prop::sample::select(&["linear", "monomial-pair:1,2,1,1", "monomial-pair:1,3,2,2", "monomial-pair:2,1,0.5,2,4"][..]),
        t in 0.05f64..3.0,
    ) {
        let p = builtin(name).unwrap();
        let sys = p.system.as_ref();
        let h = 1e-5;
        let ya = exact_solution(sys, t - h, &p.initial).unwrap();
        let yb = exact_solution(sys, t + h, &p.initial).unwrap();
        let y = exact_solution(sys, t, &p.initial).unwrap();
        let f = eval_rhs(sys, &y).unwrap();
        for i in 0..y.len() {
            let fd = (yb[i] - ya[i]) / (2.0 * h);
            prop_assert!((fd - f[i]).abs() <= 1e-6 * f[i].abs().max(1.0), "{name} t={t} i={i}: {fd} vs {}", f[i]);
        }
    }

    #[test]
    fn steps_are_positive_and_conservative(
        (name, y) in problem_and_state(),
        scheme in prop::sample::select(SCHEMES),
        log_dt in -6.0f64..6.0,
    ) {
        let p = builtin(name).unwrap();
        let spec: SchemeSpec = scheme.parse().unwrap();
        let step = spec.step(p.system.as_ref(), &y, 10f64.powf(log_dt)).unwrap();
        let s0: f64 = y.iter().sum();
        let s1: f64 = step.state.iter().sum();
        prop_assert!(step.state.iter().all(|&v| v > 0.0));
        prop_assert!((s1 - s0).abs() <= 1e-12 * s0, "{name} {scheme}: {s0} -> {s1}");
    }

    #[test]
    fn mmatrix_solver_agrees_with_pivoted_lu(
        n in 2usize..7,
        seed in prop::collection::vec((0.0f64..1.0, -3.0f64..3.0), 36),
        rhs in prop::collection::vec(0.01f64..10.0, 6),
    ) {
        // random column diagonally dominant M-matrix with unit column sums
        let mut a = DenseMatrix::identity(n);
        for j in 0..n {
            for i in 0..n {
                let (keep, mag) = seed[i * 6 + j];
                if i != j && keep < 0.6 {
                    let v = 10f64.powf(mag);
                    a[(i, j)] = -v;
                    a[(j, j)] += v;
                }
            }
        }
        let b = &rhs[..n];
        let x = mmatrix_solve(&a, &vec![1.0; n], b).unwrap();
        let y = LuFactors::new(a.clone()).unwrap().solve(b);
        let sb: f64 = b.iter().sum();
        let sx: f64 = x.iter().sum();
        prop_assert!(x.iter().all(|&v| v > 0.0));
        prop_assert!((sx - sb).abs() <= 1e-13 * sb);
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(v.abs()) + 1e-300, "{u} vs {v}");
        }
    }

    #[test]
    fn feasible_case1_tableaus_are_third_order(
        alpha in 1.0f64 / 3.0..3.0,
        beta in 0.0f64..1.0,
    ) {
        prop_assume!(feasible_case1(alpha, beta));
        let t = Tableau3::from_case1(alpha, beta).unwrap();
        prop_assert!(t.order_residuals().max_abs() <= 1e-10);
        prop_assert!(t.is_nonnegative());
        // the embedded denominator solve additionally needs a21 = alpha >= 1/2
        prop_assert_eq!(t.is_mprk43_admissible(), alpha >= 0.5);
    }

    #[test]
    fn error_metric_is_zero_only_for_identical_runs(
        states in prop::collection::vec(positive_state(3), 2..6),
        k in 0usize..5,
        bump in 1e-6f64..1.0,
    ) {
        let r = trajectory(&states);
        prop_assert_eq!(error_metric(&r, &r).unwrap(), 0.0);
        let k = 1 + k % (states.len() - 1);
        let mut other = states.clone();
        other[k][0] *= 1.0 + bump;
        prop_assert!(error_metric(&r, &trajectory(&other)).unwrap() > 0.0);
    }

    #[test]
    fn error_metric_is_scale_invariant(
        a in prop::collection::vec(positive_state(3), 3),
        b in prop::collection::vec(positive_state(3), 3),
        scale in -8.0f64..8.0,
    ) {
        let s = 10f64.powf(scale);
        let scaled = |v: &[Vec<f64>]| -> Vec<Vec<f64>> {
            v.iter().map(|y| y.iter().map(|x| x * s).collect()).collect()
        };
        let e1 = error_metric(&trajectory(&a), &trajectory(&b)).unwrap();
        let e2 = error_metric(&trajectory(&scaled(&a)), &trajectory(&scaled(&b))).unwrap();
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.max(1e-300), "{e1} vs {e2}");
    }

    #[test]
    fn error_metric_ignores_component_order(
        a in prop::collection::vec(positive_state(3), 3),
        b in prop::collection::vec(positive_state(3), 3),
    ) {
        let rotate = |v: &[Vec<f64>]| -> Vec<Vec<f64>> {
            v.iter().map(|y| vec![y[2], y[0], y[1]]).collect()
        };
        let e1 = error_metric(&trajectory(&a), &trajectory(&b)).unwrap();
        let e2 = error_metric(&trajectory(&rotate(&a)), &trajectory(&rotate(&b))).unwrap();
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.max(1e-300));
    }

    #[test]
    fn fitted_slope_recovers_power_laws(
        order in 0.5f64..4.0,
        c in -5.0f64..5.0,
        levels in 3usize..9,
    ) {
        let dts: Vec<f64> = (0..levels).map(|k| 0.1 / 2f64.powi(k as i32)).collect();
        let errors: Vec<f64> = dts.iter().map(|dt| 10f64.powf(c) * dt.powf(order)).collect();
        let slope = fit_slope(&dts, &errors).unwrap();
        prop_assert!((slope - order).abs() <= 1e-9);
    }

    #[test]
    fn feasibility_map_refines_consistently(
        a0 in 0.0f64..2.0,
        aw in 0.1f64..1.5,
        b0 in -0.5f64..1.0,
        bw in 0.1f64..1.0,
        res in 2usize..12,
    ) {
        let coarse = feasibility_map((a0, a0 + aw), (b0, b0 + bw), res).unwrap();
        let fine = feasibility_map((a0, a0 + aw), (b0, b0 + bw), 2 * res).unwrap();
        prop_assert_eq!(coarse.len(), (res + 1) * (res + 1));
        prop_assert_eq!(fine.len(), (2 * res + 1) * (2 * res + 1));
        for (k, p) in coarse.iter().enumerate() {
            let (i, j) = (k / (res + 1), k % (res + 1));
            let q: &FeasibilityPoint = &fine[(2 * i) * (2 * res + 1) + 2 * j];
            prop_assert!((p.alpha - q.alpha).abs() <= 1e-12 && (p.beta - q.beta).abs() <= 1e-12);
            prop_assert_eq!(p.feasible, q.feasible);
            prop_assert_eq!(p.feasible, feasible_case1(p.alpha, p.beta));
            prop_assert_eq!(p.b2_eq_b3, on_b2_eq_b3_circle(p.alpha, p.beta));
        }
    }
}

fn trajectory(states: &[Vec<f64>]) -> Trajectory {
    let mut t = Trajectory::new(0.0, states[0].clone());
    for (k, y) in states.iter().enumerate().skip(1) {
        t.push(k as f64, y.clone());
    }
    t
}

#[test]
fn integration_conserves_over_whole_runs() {
    for name in PROBLEMS {
        let p = builtin(name).unwrap();
        let t_end = p.t0 + (p.t_end - p.t0).min(10.0);
        let grid = uniform_grid(p.t0, t_end, (t_end - p.t0) / 50.0).unwrap();
        for scheme in SCHEMES {
            let spec: SchemeSpec = scheme.parse().unwrap();
            let traj = integrate(p.system.as_ref(), &p.initial, &grid, &spec).unwrap();
            assert_eq!(traj.steps(), 50);
            assert!(traj.min_component() > 0.0, "{name} {scheme}");
            assert!(traj.conservation_drift() <= 1e-13, "{name} {scheme}");
        }
    }
}
