//! Branch-and-bound over the reference simplex.
//!
//! Nodes are explored best-bound first; among nodes with equal bound the
//! deepest is taken, so the search plunges after each branching. A child popped
//! right after its parent reoptimizes from the parent's final basis in place;
//! other nodes reload the basis their parent finished with.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use crate::error::Result;
use crate::outcome::{MipReport, Residuals, SolveOutcome, Status};
use crate::problem::{MixedIntegerProgram, Sense};
use crate::simplex::{Basis, Engine, LpStatus, SimplexOptions};

const INT_TOL: f64 = 1e-6;
const FEAS_TOL: f64 = 1e-7;

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    /// `(binary position, value)` fixings accumulated from the root.
    fixings: Rc<Vec<(usize, u8)>>,
    basis: Option<Rc<Basis>>,
    parent: usize,
    /// `(binary position, direction, distance moved)` of the branching that
    /// created this node.
    branched: Option<(usize, u8, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: the "greatest" node has the lowest bound,
    // then the greatest depth, then the latest sequence number.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

/// Up and down locks per variable: rows that may become violated when the
/// variable increases (up) or decreases (down).
fn locks(mip: &MixedIntegerProgram) -> (Vec<u32>, Vec<u32>) {
    let n = mip.lp.num_vars();
    let mut up = vec![0; n];
    let mut down = vec![0; n];
    for row in &mip.lp.rows {
        for &(j, a) in &row.coeffs {
            let (u, d) = match (row.sense, a > 0.0) {
                (Sense::Eq, _) => (1, 1),
                (Sense::Le, true) | (Sense::Ge, false) => (1, 0),
                (Sense::Le, false) | (Sense::Ge, true) => (0, 1),
            };
            up[j] += u;
            down[j] += d;
        }
    }
    (up, down)
}

/// Per-binary average objective gain per unit of change, by direction.
struct Pseudocosts {
    sum: [Vec<f64>; 2],
    count: [Vec<u32>; 2],
}

impl Pseudocosts {
    fn new(n: usize) -> Self {
        Self {
            sum: [vec![0.0; n], vec![0.0; n]],
            count: [vec![0; n], vec![0; n]],
        }
    }

    fn record(&mut self, k: usize, dir: u8, gain: f64) {
        if gain.is_finite() {
            self.sum[dir as usize][k] += gain;
            self.count[dir as usize][k] += 1;
        }
    }

    fn estimate(&self, k: usize, dir: usize) -> Option<f64> {
        let c = self.count[dir][k];
        (c > 0).then(|| self.sum[dir][k] / c as f64)
    }

    fn average(&self, dir: usize) -> Option<f64> {
        let (s, c) = self.sum[dir]
            .iter()
            .zip(&self.count[dir])
            .fold((0.0, 0u32), |(s, c), (v, n)| (s + v, c + n));
        (c > 0).then(|| s / c as f64)
    }

    /// Product score of the two estimated child gains. Without any history
    /// this reduces to most-fractional branching.
    fn score(&self, k: usize, frac: f64) -> f64 {
        const FLOOR: f64 = 1e-6;
        let down = self.estimate(k, 0).or(self.average(0)).unwrap_or(1.0);
        let up = self.estimate(k, 1).or(self.average(1)).unwrap_or(1.0);
        (down * frac).max(FLOOR) * (up * (1.0 - frac)).max(FLOOR)
    }
}

fn is_feasible(mip: &MixedIntegerProgram, x: &[f64]) -> bool {
    mip.lp.max_violation(x) <= FEAS_TOL
        && mip
            .binaries
            .iter()
            .all(|&j| (x[j] - x[j].round()).abs() <= INT_TOL)
}

/// Solves a mixed-binary linear program to the gap in `mip.limits`.
pub fn solve(mip: &MixedIntegerProgram, opts: &SimplexOptions) -> Result<SolveOutcome> {
    mip.validate()?;
    let n = mip.lp.num_vars();
    let limits = &mip.limits;
    let (up_locks, down_locks) = locks(mip);
    let mut engine = Engine::new(&mip.lp, opts.clone())?;
    let mut iterations = 0;

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    if let Some(start) = &mip.start {
        if is_feasible(mip, start) {
            let mut x = start.clone();
            for &j in &mip.binaries {
                x[j] = x[j].round();
            }
            incumbent = Some((mip.lp.objective_value(&x), x));
        }
    }

    let gap_closed = |inc: f64, bound: f64| {
        inc - bound <= limits.absolute_gap.max(limits.relative_gap * inc.abs().max(1.0))
    };

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        fixings: Rc::new(Vec::new()),
        basis: None,
        parent: usize::MAX,
        branched: None,
    });
    let mut pseudo = Pseudocosts::new(mip.binaries.len());
    let mut seq = 1;
    let mut nodes = 0usize;
    let mut last_node = usize::MAX;
    let mut unresolved = false;
    let mut hit_limit = false;
    let mut current = vec![u8::MAX; mip.binaries.len()];
    let mut root_unbounded = false;
    // Smallest bound among nodes that were pruned without being solved
    // because of the node limit.
    let mut open_bound = f64::INFINITY;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if gap_closed(*inc, node.bound) {
                continue;
            }
        }
        if nodes >= limits.max_nodes {
            hit_limit = true;
            open_bound = open_bound.min(node.bound);
            break;
        }
        let id = nodes;
        nodes += 1;

        let mut want = vec![u8::MAX; mip.binaries.len()];
        for &(k, v) in node.fixings.iter() {
            want[k] = v;
        }
        for (k, &j) in mip.binaries.iter().enumerate() {
            if want[k] != current[k] {
                let (lo, hi) = match want[k] {
                    0 => (0.0, 0.0),
                    1 => (1.0, 1.0),
                    _ => (0.0, 1.0),
                };
                engine.set_bounds(j, lo, hi);
                current[k] = want[k];
            }
        }
        match (&node.basis, node.parent == last_node) {
            (Some(b), false) => engine.load_basis(b)?,
            _ => engine.recompute_basics(),
        }
        last_node = id;
        let status = engine.optimize()?;
        iterations = engine.iterations;
        match status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if id == 0 {
                    root_unbounded = true;
                    break;
                }
                unresolved = true;
                continue;
            }
            LpStatus::IterationLimit => {
                unresolved = true;
                continue;
            }
            LpStatus::Optimal => {}
        }
        let obj = engine.objective() + mip.lp.objective_offset;
        if let Some((k, dir, dist)) = node.branched {
            pseudo.record(k, dir, (obj - node.bound).max(0.0) / dist);
        }
        if let Some((inc, _)) = &incumbent {
            if gap_closed(*inc, obj) {
                continue;
            }
        }
        let x = engine.primal().to_vec();

        let mut branch: Option<(usize, f64)> = None;
        let mut best_score = f64::NEG_INFINITY;
        let mut roundable = true;
        for (k, &j) in mip.binaries.iter().enumerate() {
            let f = x[j] - x[j].floor();
            let dist = f.min(1.0 - f);
            if dist > INT_TOL {
                if up_locks[j] > 0 && down_locks[j] > 0 {
                    roundable = false;
                }
                let score = pseudo.score(k, f);
                if score > best_score {
                    best_score = score;
                    branch = Some((k, x[j]));
                }
            }
        }
        let Some((k, value)) = branch else {
            let mut xi = x;
            for &j in &mip.binaries {
                xi[j] = xi[j].round();
            }
            if mip.lp.max_violation(&xi) <= FEAS_TOL {
                let better = incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc);
                if better {
                    incumbent = Some((mip.lp.objective_value(&xi), xi));
                }
            } else {
                unresolved = true;
            }
            continue;
        };

        if roundable {
            let mut xr = x.clone();
            for &j in &mip.binaries {
                let f = xr[j] - xr[j].floor();
                if f.min(1.0 - f) > INT_TOL {
                    xr[j] = if down_locks[j] == 0 { xr[j].floor() } else { xr[j].ceil() };
                } else {
                    xr[j] = xr[j].round();
                }
            }
            if mip.lp.max_violation(&xr) <= FEAS_TOL {
                let val = mip.lp.objective_value(&xr);
                if incumbent.as_ref().is_none_or(|(inc, _)| val < *inc) {
                    incumbent = Some((val, xr));
                }
            }
        }

        let basis = Rc::new(engine.basis());
        let up_first = value >= 0.5;
        let frac = value - value.floor();
        for (i, v) in [0u8, 1u8].into_iter().enumerate() {
            let dist = if v == 1 { 1.0 - frac } else { frac };
            let mut fx = (*node.fixings).clone();
            fx.push((k, v));
            // The preferred child gets the later sequence number.
            let preferred = (v == 1) == up_first;
            heap.push(Node {
                bound: obj,
                depth: node.depth + 1,
                seq: seq + if preferred { 1 } else { 0 } + 2 * i,
                fixings: Rc::new(fx),
                basis: Some(basis.clone()),
                parent: id,
                branched: Some((k, v, dist)),
            });
        }
        seq += 4;
    }

    if root_unbounded {
        return Ok(SolveOutcome::without_solution(Status::Unbounded, n, iterations));
    }
    let remaining = heap.iter().map(|nd| nd.bound).fold(open_bound, f64::min);
    let report = |inc: f64| {
        let bound = if hit_limit || unresolved { remaining.min(inc) } else { inc };
        MipReport {
            best_bound: bound,
            gap: (inc - bound).max(0.0) / inc.abs().max(1.0),
            nodes,
        }
    };
    Ok(match incumbent {
        Some((obj, x)) => {
            let mip_report = report(obj);
            let optimal = !hit_limit && !unresolved;
            SolveOutcome {
                status: if optimal { Status::Optimal } else { Status::Limit },
                residuals: Residuals {
                    primal: mip.lp.max_violation(&x),
                    dual: 0.0,
                    gap: mip_report.gap,
                },
                objective: obj,
                x,
                duals: None,
                reduced_costs: None,
                iterations,
                mip: Some(mip_report),
            }
        }
        None => {
            let status = if hit_limit || unresolved { Status::Limit } else { Status::Infeasible };
            let mut out = SolveOutcome::without_solution(status, n, iterations);
            out.mip = Some(MipReport {
                best_bound: remaining,
                gap: f64::INFINITY,
                nodes,
            });
            out
        }
    })
}
