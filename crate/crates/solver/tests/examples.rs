use dpgrid_solver::format::{self, Problem};
use dpgrid_solver::{
    solve_lp, solve_milp, solve_socp, AffineExpr, ConicProgram, LinearProgram,
    MixedIntegerProgram, Sense, Status,
};

#[test]
fn lp_single_lower_bound() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    lp.add_row(vec![(x, 1.0)], Sense::Ge, 3.0);
    let out = solve_lp(&lp).unwrap();
    assert_eq!(out.status, Status::Optimal);
    assert_eq!(out.x[x], 3.0);
    assert_eq!(out.objective, 3.0);
    assert!(out.residuals.primal <= 1e-8 && out.residuals.dual <= 1e-8);
    assert!(out.residuals.gap <= 1e-8 * (1.0 + out.objective.abs()));
}

#[test]
fn lp_contradictory_bounds_infeasible() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    lp.add_row(vec![(x, 1.0)], Sense::Ge, 3.0);
    lp.add_row(vec![(x, 1.0)], Sense::Le, 2.0);
    assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
}

#[test]
fn malformed_problem_rejected_before_solving() {
    let mut lp = LinearProgram::new();
    lp.add_var(1.0, 0.0, 1.0);
    lp.add_row(vec![(7, 1.0)], Sense::Le, 1.0);
    assert!(solve_lp(&lp).is_err());
    let mut cp = ConicProgram::new(LinearProgram::new());
    cp.add_cone(AffineExpr::var(2), vec![]);
    assert!(solve_socp(&cp).is_err());
}

#[test]
fn socp_norm_of_shifted_pair() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
    let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    let mut cp = ConicProgram::new(lp);
    cp.add_cone(
        AffineExpr::var(t),
        vec![AffineExpr::new(vec![(x, 1.0)], -1.0), AffineExpr::new(vec![(x, 1.0)], 1.0)],
    );
    let out = solve_socp(&cp).unwrap();
    assert_eq!(out.status, Status::Optimal);
    assert!(out.x[x].abs() < 1e-7);
    assert!((out.x[t] - 2f64.sqrt()).abs() < 1e-8);
    assert!(out.residuals.primal <= 1e-8);
}

#[test]
fn socp_zero_cone_is_nonnegativity() {
    let mut lp = LinearProgram::new();
    let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    let mut cp = ConicProgram::new(lp);
    cp.add_cone(AffineExpr::var(t), vec![AffineExpr::constant(0.0), AffineExpr::constant(0.0)]);
    let out = solve_socp(&cp).unwrap();
    assert_eq!(out.status, Status::Optimal);
    assert!(out.x[t].abs() <= 1e-8);
}

#[test]
fn milp_binary_above_half() {
    let mut mip = MixedIntegerProgram::new(LinearProgram::new());
    let x = mip.add_binary(1.0);
    mip.lp.add_row(vec![(x, 1.0)], Sense::Ge, 0.5);
    let out = solve_milp(&mip).unwrap();
    assert_eq!(out.status, Status::Optimal);
    assert_eq!(out.x[x], 1.0);
    assert!(out.mip.unwrap().gap <= 1e-6);
}

#[test]
fn milp_with_fixed_binaries_equals_lp_restriction() {
    let mut mip = MixedIntegerProgram::new(LinearProgram::new());
    let b0 = mip.add_binary(3.0);
    let b1 = mip.add_binary(-2.0);
    let y = mip.lp.add_var(1.0, 0.0, 10.0);
    mip.lp.add_row(vec![(b0, 4.0), (b1, 1.0), (y, 1.0)], Sense::Ge, 5.5);
    mip.lp.add_row(vec![(y, 1.0), (b1, -3.0)], Sense::Le, 4.0);
    for (v0, v1) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        let mut fixed = mip.clone();
        fixed.lp.lower[b0] = v0;
        fixed.lp.upper[b0] = v0;
        fixed.lp.lower[b1] = v1;
        fixed.lp.upper[b1] = v1;
        let lp_out = solve_lp(&fixed.lp).unwrap();
        fixed.binaries.clear();
        let mip_out = solve_milp(&fixed).unwrap();
        assert_eq!(lp_out.status, mip_out.status);
        if lp_out.is_optimal() {
            assert!((lp_out.objective - mip_out.objective).abs() < 1e-12);
        }
    }
}

fn expectation(text: &str) -> (Option<f64>, Option<&str>) {
    let mut obj = None;
    let mut status = None;
    for line in text.lines() {
        if let Some(v) = line.strip_prefix("# objective: ") {
            obj = Some(v.trim().parse().unwrap());
        }
        if let Some(v) = line.strip_prefix("# status: ") {
            status = Some(v.trim());
        }
    }
    (obj, status)
}

#[test]
fn golden_fixtures_solve_and_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut entries: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    assert!(entries.len() >= 4);
    for path in entries {
        let text = std::fs::read_to_string(&path).unwrap();
        let problem = format::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(format::write(&problem), body, "{} is not canonical", path.display());
        let out = match &problem {
            Problem::Lp(lp) => solve_lp(lp),
            Problem::Socp(cp) => solve_socp(cp),
            Problem::Milp(mip) => solve_milp(mip),
        }
        .unwrap();
        match expectation(&text) {
            (Some(obj), _) => {
                assert_eq!(out.status, Status::Optimal, "{}", path.display());
                assert!(
                    (out.objective - obj).abs() <= 1e-8 * (1.0 + obj.abs()),
                    "{}: {} vs {obj}",
                    path.display(),
                    out.objective
                );
            }
            (None, Some("infeasible")) => assert_eq!(out.status, Status::Infeasible),
            _ => panic!("{} has no expectation", path.display()),
        }
    }
}
