use dpgrid_solver::format::{self, Problem};
use dpgrid_solver::{
    Backend, InteriorPointBackend, LinearProgram, MixedIntegerProgram, ReferenceBackend, Sense,
    Status,
};
use proptest::prelude::*;

/// Random LP that is feasible by construction (rows are satisfied at `x0`).
fn feasible_lp() -> impl Strategy<Value = LinearProgram> {
    (2usize..7, 1usize..7).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), m),
            prop::collection::vec((0usize..3, 0.0f64..1.5), m),
            prop::collection::vec(0usize..4, n),
        )
            .prop_map(move |(c, x0, a, senses, kinds)| {
                let mut lp = LinearProgram::new();
                for j in 0..n {
                    let (lo, hi) = match kinds[j] {
                        0 => (-4.0, 4.0),
                        1 => (x0[j] - 1.0, f64::INFINITY),
                        2 => (f64::NEG_INFINITY, x0[j] + 1.0),
                        _ => (-3.0, 2.5),
                    };
                    lp.add_var(c[j], lo.min(x0[j]), hi.max(x0[j]));
                }
                for (row, &(s, slack)) in a.iter().zip(&senses) {
                    let act: f64 = row.iter().zip(&x0).map(|(p, q)| p * q).sum();
                    let coeffs: Vec<(usize, f64)> = row.iter().copied().enumerate().collect();
                    match s {
                        0 => lp.add_row(coeffs, Sense::Le, act + slack),
                        1 => lp.add_row(coeffs, Sense::Ge, act - slack),
                        _ => lp.add_row(coeffs, Sense::Eq, act),
                    };
                }
                lp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_and_interior_point_agree(lp in feasible_lp()) {
        let s = ReferenceBackend::default().solve_lp(&lp).unwrap();
        let i = InteriorPointBackend::default().solve_lp(&lp).unwrap();
        prop_assert!(s.status != Status::Infeasible);
        if s.status == Status::Optimal {
            prop_assert!(s.residuals.primal <= 1e-8, "primal {}", s.residuals.primal);
            prop_assert!(s.residuals.dual <= 1e-8, "dual {}", s.residuals.dual);
            prop_assert!(s.residuals.gap <= 1e-8 * (1.0 + s.objective.abs()), "gap {}", s.residuals.gap);
            prop_assert_eq!(i.status, Status::Optimal);
            let rel = (s.objective - i.objective).abs() / s.objective.abs().max(1.0);
            prop_assert!(rel <= 1e-6, "simplex {} vs ipm {}", s.objective, i.objective);
        } else {
            prop_assert_eq!(s.status, Status::Unbounded);
            prop_assert_eq!(i.status, Status::Unbounded);
        }
    }

    #[test]
    fn solves_are_deterministic(lp in feasible_lp()) {
        let b = ReferenceBackend::default();
        let first = b.solve_lp(&lp).unwrap();
        let second = b.solve_lp(&lp).unwrap();
        prop_assert_eq!(format!("{first:?}"), format!("{second:?}"));
        let cp = dpgrid_solver::ConicProgram::new(lp);
        let first = b.solve_socp(&cp).unwrap();
        let second = b.solve_socp(&cp).unwrap();
        prop_assert_eq!(format!("{first:?}"), format!("{second:?}"));
    }

    #[test]
    fn text_form_round_trips(lp in feasible_lp()) {
        let p = Problem::Lp(lp);
        let text = format::write(&p);
        let back = format::parse(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(format::write(&back), text);
    }

    #[test]
    fn branch_and_bound_matches_enumeration(
        lp in feasible_lp(),
        nb in 1usize..5,
        bcost in prop::collection::vec(-3.0f64..3.0, 5),
        bcoef in prop::collection::vec(-2.0f64..2.0, 40),
    ) {
        let mut mip = MixedIntegerProgram::new(lp);
        let bins: Vec<usize> = (0..nb).map(|k| mip.add_binary(bcost[k])).collect();
        for (i, row) in mip.lp.rows.iter_mut().enumerate() {
            for (k, &b) in bins.iter().enumerate() {
                row.coeffs.push((b, bcoef[(i * 5 + k) % bcoef.len()]));
            }
        }
        let b = ReferenceBackend::default();
        let out = b.solve_milp(&mip).unwrap();

        let mut best: Option<f64> = None;
        let mut any_unbounded = false;
        for mask in 0u32..(1 << nb) {
            let mut lp = mip.lp.clone();
            for (k, &j) in bins.iter().enumerate() {
                let v = f64::from((mask >> k) & 1);
                lp.lower[j] = v;
                lp.upper[j] = v;
            }
            let r = b.solve_lp(&lp).unwrap();
            match r.status {
                Status::Optimal => best = Some(best.map_or(r.objective, |v: f64| v.min(r.objective))),
                Status::Unbounded => any_unbounded = true,
                _ => {}
            }
        }
        if any_unbounded {
            return Ok(());
        }
        match best {
            None => prop_assert_eq!(out.status, Status::Infeasible),
            Some(v) => {
                prop_assert_eq!(out.status, Status::Optimal);
                prop_assert!((out.objective - v).abs() <= 1e-6 * v.abs().max(1.0), "bnb {} vs enum {}", out.objective, v);
            }
        }
    }
}
