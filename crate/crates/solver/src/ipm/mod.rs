//! Primal-dual interior-point method for second-order cone programs.
//!
//! Problems are converted to `min c'x  s.t.  Ax = b, Gx + s = h, s in K`
//! where `K` is a product of one nonnegative orthant and second-order cones,
//! and solved through the homogeneous self-dual embedding with Mehrotra
//! predictor-corrector steps and Nesterov-Todd scaling. Each iteration
//! factors one sparse quasidefinite KKT matrix.

mod cones;
mod ldl;

use crate::error::Result;
use crate::outcome::{Residuals, SolveOutcome, Status};
use crate::problem::{ConicProgram, Sense};
use cones::{Cone, Scaling, EXPAND_DIM};
use ldl::Ldl;

#[derive(Debug, Clone, PartialEq)]
pub struct IpmOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    /// Tolerance for declaring a primal or dual infeasibility certificate.
    pub infeas_tol: f64,
    pub max_iterations: usize,
    /// When progress stalls, the best iterate is accepted as optimal if its
    /// residuals and relative gap are below this.
    pub reduced_tol: f64,
    pub static_reg: f64,
    pub refine_iterations: usize,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            gap_tol: 1e-10,
            infeas_tol: 1e-9,
            max_iterations: 120,
            reduced_tol: 1e-7,
            static_reg: 1e-9,
            refine_iterations: 12,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum RowLink {
    Eq(usize),
    /// Row is `a x <= rhs`, stored as `G` row `+a`.
    Le(usize),
    /// Row is `a x >= rhs`, stored as `G` row `-a`.
    Ge(usize),
}

#[derive(Debug, Clone, Default)]
struct Sparse {
    rows: usize,
    trip: Vec<(usize, usize, f64)>,
}

impl Sparse {
    fn push_row(&mut self, terms: impl IntoIterator<Item = (usize, f64)>) -> usize {
        let r = self.rows;
        for (j, v) in terms {
            if v != 0.0 {
                self.trip.push((r, j, v));
            }
        }
        self.rows += 1;
        r
    }

    fn mul_add(&self, x: &[f64], out: &mut [f64]) {
        for &(r, c, v) in &self.trip {
            out[r] += v * x[c];
        }
    }

    fn tmul_add(&self, y: &[f64], out: &mut [f64]) {
        for &(r, c, v) in &self.trip {
            out[c] += v * y[r];
        }
    }
}

struct StdForm {
    n: usize,
    c: Vec<f64>,
    a: Sparse,
    b: Vec<f64>,
    g: Sparse,
    h: Vec<f64>,
    cones: Vec<Cone>,
    links: Vec<RowLink>,
}

impl StdForm {
    fn from_conic(cp: &ConicProgram) -> Self {
        let lp = &cp.lp;
        let n = lp.num_vars();
        let mut a = Sparse::default();
        let mut b = Vec::new();
        let mut g = Sparse::default();
        let mut h = Vec::new();
        let mut links = Vec::with_capacity(lp.num_rows());
        for row in &lp.rows {
            let coeffs = row.coeffs.iter().copied();
            links.push(match row.sense {
                Sense::Eq => {
                    b.push(row.rhs);
                    RowLink::Eq(a.push_row(coeffs))
                }
                Sense::Le => {
                    h.push(row.rhs);
                    RowLink::Le(g.push_row(coeffs))
                }
                Sense::Ge => {
                    h.push(-row.rhs);
                    RowLink::Ge(g.push_row(coeffs.map(|(j, v)| (j, -v))))
                }
            });
        }
        for j in 0..n {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            if lo == hi {
                a.push_row([(j, 1.0)]);
                b.push(lo);
                continue;
            }
            if lo.is_finite() {
                g.push_row([(j, -1.0)]);
                h.push(-lo);
            }
            if hi.is_finite() {
                g.push_row([(j, 1.0)]);
                h.push(hi);
            }
        }
        let push_expr = |g: &mut Sparse, h: &mut Vec<f64>, e: &crate::problem::AffineExpr| {
            g.push_row(e.terms.iter().map(|&(j, v)| (j, -v)));
            h.push(e.constant);
        };
        for cone in cp.cones.iter().filter(|c| c.tail.is_empty()) {
            push_expr(&mut g, &mut h, &cone.head);
        }
        let mut cones = vec![Cone::Nonneg(g.rows)];
        for cone in cp.cones.iter().filter(|c| !c.tail.is_empty()) {
            push_expr(&mut g, &mut h, &cone.head);
            for e in &cone.tail {
                push_expr(&mut g, &mut h, e);
            }
            cones.push(Cone::Soc(cone.dim()));
        }
        if cones[0].dim() == 0 {
            cones.remove(0);
        }
        StdForm {
            n,
            c: lp.objective.clone(),
            a,
            b,
            g,
            h,
            cones,
            links,
        }
    }

    fn blocks(&self) -> Vec<(Cone, usize)> {
        let mut off = 0;
        self.cones
            .iter()
            .map(|&k| {
                let r = (k, off);
                off += k.dim();
                r
            })
            .collect()
    }
}

/// Fixed-pattern KKT system `[[0, A', G'], [A, 0, 0], [G, 0, -W^2]]` with
/// large second-order cones expanded into sparse rank-two form.
struct Kkt {
    dim: usize,
    entries: Vec<(usize, usize)>,
    vals: Vec<f64>,
    reg: Vec<f64>,
    /// First index of each block's `-W^2` entries in `entries`.
    block_start: Vec<usize>,
    factor: Ldl,
}

impl Kkt {
    fn new(sf: &StdForm, opts: &IpmOptions) -> Self {
        let n = sf.n;
        let p = sf.a.rows;
        let mz = sf.g.rows;
        let mut entries = Vec::new();
        let mut vals = Vec::new();
        let mut reg = Vec::new();
        let mut signs = vec![1.0; n];
        signs.resize(n + p + mz, -1.0);
        for j in 0..n {
            entries.push((j, j));
            vals.push(0.0);
            reg.push(opts.static_reg);
        }
        for &(r, c, v) in &sf.a.trip {
            entries.push((c, n + r));
            vals.push(v);
            reg.push(0.0);
        }
        for i in 0..p {
            entries.push((n + i, n + i));
            vals.push(0.0);
            reg.push(-opts.static_reg);
        }
        for &(r, c, v) in &sf.g.trip {
            entries.push((c, n + p + r));
            vals.push(v);
            reg.push(0.0);
        }
        let mut dim = n + p + mz;
        let mut block_start = Vec::new();
        for (cone, off) in sf.blocks() {
            block_start.push(entries.len());
            let z0 = n + p + off;
            let d = cone.dim();
            match cone {
                Cone::Nonneg(_) => {
                    for k in 0..d {
                        entries.push((z0 + k, z0 + k));
                    }
                }
                Cone::Soc(_) if d < EXPAND_DIM => {
                    for i in 0..d {
                        for j in i..d {
                            entries.push((z0 + i, z0 + j));
                        }
                    }
                }
                Cone::Soc(_) => {
                    for k in 0..d {
                        entries.push((z0 + k, z0 + k));
                    }
                    for k in 0..d {
                        entries.push((z0 + k, dim));
                        entries.push((z0 + k, dim + 1));
                    }
                    entries.push((dim, dim));
                    entries.push((dim + 1, dim + 1));
                    signs.push(1.0);
                    signs.push(-1.0);
                    dim += 2;
                }
            }
            let added = entries.len() - vals.len();
            vals.extend(std::iter::repeat_n(0.0, added));
            reg.extend(std::iter::repeat_n(0.0, added));
        }
        // Static regularization on the diagonal of every cone block.
        for (e, r) in entries.iter().zip(reg.iter_mut()) {
            if e.0 == e.1 && e.0 >= n + p {
                let s = signs[e.0];
                *r = s * opts.static_reg;
            }
        }
        let factor = Ldl::analyze(dim, &entries, &signs);
        Kkt {
            dim,
            entries,
            vals,
            reg,
            block_start,
            factor,
        }
    }

    fn update_scaling(&mut self, sf: &StdForm, scalings: &[Scaling]) {
        for (bi, ((cone, _), w)) in sf.blocks().iter().zip(scalings).enumerate() {
            let mut k = self.block_start[bi];
            let d = cone.dim();
            match (cone, w) {
                (Cone::Nonneg(_), Scaling::Diag(wd)) => {
                    for i in 0..d {
                        self.vals[k] = -wd[i] * wd[i];
                        k += 1;
                    }
                }
                (Cone::Soc(_), _) if d < EXPAND_DIM => {
                    let w2 = w.soc_w2_dense();
                    for i in 0..d {
                        for j in i..d {
                            self.vals[k] = -w2[i * d + j];
                            k += 1;
                        }
                    }
                }
                (Cone::Soc(_), _) => {
                    let (eta, u, v) = w.soc_expansion();
                    for _ in 0..d {
                        self.vals[k] = -eta * eta;
                        k += 1;
                    }
                    for i in 0..d {
                        self.vals[k] = -eta * u[i];
                        self.vals[k + 1] = eta * v[i];
                        k += 2;
                    }
                    self.vals[k] = 1.0;
                    self.vals[k + 1] = -1.0;
                }
                _ => unreachable!("scaling does not match cone"),
            }
        }
        let total: Vec<f64> = self.vals.iter().zip(&self.reg).map(|(a, b)| a + b).collect();
        self.factor.factor(&total);
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (&(r, c), &v) in self.entries.iter().zip(&self.vals) {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// Solves against the unregularized matrix with iterative refinement.
    fn solve(&self, rhs: &[f64], iters: usize) -> Vec<f64> {
        let mut b = rhs.to_vec();
        b.resize(self.dim, 0.0);
        let bnorm = inf_norm(&b);
        let mut x = self.factor.solve(&b);
        let mut last = f64::INFINITY;
        for _ in 0..iters {
            let kx = self.mul(&x);
            let r: Vec<f64> = b.iter().zip(&kx).map(|(p, q)| p - q).collect();
            let rn = inf_norm(&r);
            if rn <= 1e-14 * (1.0 + bnorm) || rn >= last * 0.9 {
                break;
            }
            last = rn;
            let dx = self.factor.solve(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        x
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Direction {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    s: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct State<'a> {
    sf: &'a StdForm,
    blocks: Vec<(Cone, usize)>,
    kkt: Kkt,
    scalings: Vec<Scaling>,
    lambda: Vec<f64>,
    opts: &'a IpmOptions,
}

impl State<'_> {
    fn w_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for ((cone, off), w) in self.blocks.iter().zip(&self.scalings) {
            let r = *off..*off + cone.dim();
            w.apply(&v[r.clone()], &mut out[r]);
        }
        out
    }

    fn w_inv_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for ((cone, off), w) in self.blocks.iter().zip(&self.scalings) {
            let r = *off..*off + cone.dim();
            w.apply_inv(&v[r.clone()], &mut out[r]);
        }
        out
    }

    fn lambda_div(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (cone, off) in &self.blocks {
            let r = *off..*off + cone.dim();
            cones::jordan_div(*cone, &self.lambda[r.clone()], &v[r.clone()], &mut out[r]);
        }
        out
    }

    fn kkt_solve(&self, rx: &[f64], ry: &[f64], rz: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.sf.n;
        let p = self.sf.a.rows;
        let mut rhs = Vec::with_capacity(self.kkt.dim);
        rhs.extend_from_slice(rx);
        rhs.extend_from_slice(ry);
        rhs.extend_from_slice(rz);
        let sol = self.kkt.solve(&rhs, self.opts.refine_iterations);
        (
            sol[..n].to_vec(),
            sol[n..n + p].to_vec(),
            sol[n + p..n + p + rz.len()].to_vec(),
        )
    }
}

fn max_cone_step(blocks: &[(Cone, usize)], x: &[f64], dx: &[f64]) -> f64 {
    blocks
        .iter()
        .map(|&(cone, off)| {
            let r = off..off + cone.dim();
            cones::max_step(cone, &x[r.clone()], &dx[r])
        })
        .fold(f64::INFINITY, f64::min)
}

fn shift_into_cone(blocks: &[(Cone, usize)], v: &mut [f64]) {
    let margin = blocks
        .iter()
        .map(|&(cone, off)| cones::interior_margin(cone, &v[off..off + cone.dim()]))
        .fold(f64::NEG_INFINITY, f64::max);
    if margin >= 0.0 {
        for &(cone, off) in blocks {
            cones::add_identity(cone, &mut v[off..off + cone.dim()], 1.0 + margin);
        }
    }
}

/// Solves a second-order cone program (or an LP, with no cones).
/// Iterations without a new best merit before a stalled solve may stop.
const STALL_LIMIT: usize = 6;

struct Iterate {
    merit: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
}

pub fn solve(cp: &ConicProgram, opts: &IpmOptions) -> Result<SolveOutcome> {
    cp.validate()?;
    let sf = StdForm::from_conic(cp);
    let n = sf.n;
    let p = sf.a.rows;
    let mz = sf.g.rows;
    let blocks = sf.blocks();
    let nu: usize = sf.cones.iter().map(|k| k.degree()).sum();

    let mut kkt = Kkt::new(&sf, opts);
    let scalings: Vec<Scaling> = sf.cones.iter().map(|&k| Scaling::identity(k)).collect();
    kkt.update_scaling(&sf, &scalings);
    let mut st = State {
        sf: &sf,
        blocks: blocks.clone(),
        kkt,
        scalings,
        lambda: vec![0.0; mz],
        opts,
    };

    let neg_c: Vec<f64> = sf.c.iter().map(|v| -v).collect();
    let zeros_n = vec![0.0; n];
    let (mut x, _, zp) = st.kkt_solve(&zeros_n, &sf.b, &sf.h);
    let mut s: Vec<f64> = zp.iter().map(|v| -v).collect();
    shift_into_cone(&blocks, &mut s);
    let (_, mut y, mut z) = st.kkt_solve(&neg_c, &vec![0.0; p], &vec![0.0; mz]);
    shift_into_cone(&blocks, &mut z);
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let bnorm = inf_norm(&sf.b);
    let hnorm = inf_norm(&sf.h);
    let cnorm = inf_norm(&sf.c);
    let mut status = Status::Limit;
    let mut iterations = 0;
    let mut best: Option<Iterate> = None;
    let mut stalled = 0;

    for it in 0..=opts.max_iterations {
        iterations = it;
        let mut rx = sf.c.iter().map(|v| v * tau).collect::<Vec<_>>();
        sf.a.tmul_add(&y, &mut rx);
        sf.g.tmul_add(&z, &mut rx);
        let mut ry: Vec<f64> = sf.b.iter().map(|v| -v * tau).collect();
        sf.a.mul_add(&x, &mut ry);
        let mut rz: Vec<f64> = sf.h.iter().zip(&s).map(|(hv, sv)| sv - hv * tau).collect();
        sf.g.mul_add(&x, &mut rz);
        let cx = dot(&sf.c, &x);
        let by = dot(&sf.b, &y);
        let hz = dot(&sf.h, &z);
        let rt = kappa + cx + by + hz;

        // Convergence tests on the de-homogenized iterate.
        let pres = (inf_norm(&ry) / (1.0 + bnorm)).max(inf_norm(&rz) / (1.0 + hnorm)) / tau;
        let dres = inf_norm(&rx) / (1.0 + cnorm) / tau;
        let pcost = cx / tau;
        let dcost = -(by + hz) / tau;
        let gap = dot(&s, &z) / (tau * tau);
        let scale = 1.0 + pcost.abs().min(dcost.abs());
        let merit = pres.max(dres).max(gap / scale);
        let merit = merit.max((pcost - dcost).abs() / scale);
        if best.as_ref().is_none_or(|b| merit < b.merit) {
            best = Some(Iterate { merit, x: x.clone(), y: y.clone(), z: z.clone(), tau });
            stalled = 0;
        } else {
            stalled += 1;
        }
        if stalled >= STALL_LIMIT && best.as_ref().is_some_and(|b| b.merit <= opts.reduced_tol) {
            break;
        }
        if pres <= opts.feas_tol
            && dres <= opts.feas_tol
            && gap <= opts.gap_tol * scale
            && (pcost - dcost).abs() <= opts.gap_tol * scale
        {
            status = Status::Optimal;
            break;
        }
        if by + hz < 0.0 {
            let mut aty = vec![0.0; n];
            sf.a.tmul_add(&y, &mut aty);
            sf.g.tmul_add(&z, &mut aty);
            if inf_norm(&aty) <= opts.infeas_tol * -(by + hz) * (1.0 + cnorm) {
                status = Status::Infeasible;
                break;
            }
        }
        if cx < 0.0 {
            let mut ax = vec![0.0; p];
            sf.a.mul_add(&x, &mut ax);
            let mut gxs = s.clone();
            sf.g.mul_add(&x, &mut gxs);
            if inf_norm(&ax).max(inf_norm(&gxs)) <= opts.infeas_tol * -cx * (1.0 + bnorm + hnorm) {
                status = Status::Unbounded;
                break;
            }
        }
        if it == opts.max_iterations {
            break;
        }

        let mu = (dot(&s, &z) + tau * kappa) / (nu as f64 + 1.0);
        st.scalings = blocks
            .iter()
            .map(|&(cone, off)| {
                let r = off..off + cone.dim();
                Scaling::nt(cone, &s[r.clone()], &z[r])
            })
            .collect();
        st.lambda = st.w_apply(&z);
        let scalings = std::mem::take(&mut st.scalings);
        st.kkt.update_scaling(&sf, &scalings);
        st.scalings = scalings;

        let (x1, y1, z1) = st.kkt_solve(&neg_c, &sf.b, &sf.h);
        let mut denom_base = dot(&sf.c, &x1) + dot(&sf.b, &y1) + dot(&sf.h, &z1);
        if denom_base >= 0.0 {
            let wz1 = st.w_apply(&z1);
            denom_base = -dot(&wz1, &wz1);
        }

        let direction = |st: &State, sigma_mix: f64, ds_target: &[f64], dk_target: f64| -> Direction {
            let keep = 1.0 - sigma_mix;
            let qx: Vec<f64> = rx.iter().map(|v| -keep * v).collect();
            let qy: Vec<f64> = ry.iter().map(|v| -keep * v).collect();
            let ldiv = st.lambda_div(ds_target);
            let wl = st.w_apply(&ldiv);
            let qz: Vec<f64> = rz.iter().zip(&wl).map(|(r, w)| -keep * r + w).collect();
            let (x2, y2, z2) = st.kkt_solve(&qx, &qy, &qz);
            let num = keep * rt - dk_target / tau + dot(&sf.c, &x2) + dot(&sf.b, &y2) + dot(&sf.h, &z2);
            let dtau = num / (kappa / tau - denom_base);
            let dx: Vec<f64> = x2.iter().zip(&x1).map(|(a, b)| a + dtau * b).collect();
            let dy: Vec<f64> = y2.iter().zip(&y1).map(|(a, b)| a + dtau * b).collect();
            let dz: Vec<f64> = z2.iter().zip(&z1).map(|(a, b)| a + dtau * b).collect();
            let wdz = st.w_apply(&dz);
            let inner: Vec<f64> = ldiv.iter().zip(&wdz).map(|(a, b)| a + b).collect();
            let ds: Vec<f64> = st.w_apply(&inner).iter().map(|v| -v).collect();
            let dkappa = (-dk_target - kappa * dtau) / tau;
            Direction {
                x: dx,
                y: dy,
                z: dz,
                s: ds,
                tau: dtau,
                kappa: dkappa,
            }
        };
        let step_len = |d: &Direction| -> f64 {
            let mut a = max_cone_step(&blocks, &s, &d.s).min(max_cone_step(&blocks, &z, &d.z));
            if d.tau < 0.0 {
                a = a.min(-tau / d.tau);
            }
            if d.kappa < 0.0 {
                a = a.min(-kappa / d.kappa);
            }
            a
        };

        // Predictor.
        let mut ll = vec![0.0; mz];
        for &(cone, off) in &blocks {
            let r = off..off + cone.dim();
            cones::jordan_product(cone, &st.lambda[r.clone()], &st.lambda[r.clone()], &mut ll[r]);
        }
        let aff = direction(&st, 0.0, &ll, tau * kappa);
        let alpha_aff = step_len(&aff).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let ws = st.w_inv_apply(&aff.s);
        let wz = st.w_apply(&aff.z);
        let mut target = ll.clone();
        let mut cross = vec![0.0; mz];
        for &(cone, off) in &blocks {
            let r = off..off + cone.dim();
            cones::jordan_product(cone, &ws[r.clone()], &wz[r.clone()], &mut cross[r.clone()]);
        }
        for i in 0..mz {
            target[i] += cross[i];
        }
        for &(cone, off) in &blocks {
            cones::add_identity(cone, &mut target[off..off + cone.dim()], -sigma * mu);
        }
        let dk = tau * kappa + aff.tau * aff.kappa - sigma * mu;
        let d = direction(&st, sigma, &target, dk);
        let alpha = (0.99 * step_len(&d)).min(1.0);
        if !(alpha > 1e-12) {
            break;
        }
        for (v, dv) in x.iter_mut().zip(&d.x) {
            *v += alpha * dv;
        }
        for (v, dv) in y.iter_mut().zip(&d.y) {
            *v += alpha * dv;
        }
        for (v, dv) in z.iter_mut().zip(&d.z) {
            *v += alpha * dv;
        }
        for (v, dv) in s.iter_mut().zip(&d.s) {
            *v += alpha * dv;
        }
        tau += alpha * d.tau;
        kappa += alpha * d.kappa;
        if !tau.is_finite() || x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }

    if status == Status::Limit {
        if let Some(b) = best.take() {
            if b.merit <= opts.reduced_tol {
                status = Status::Optimal;
                (x, y, z, tau) = (b.x, b.y, b.z, b.tau);
            } else {
                best = Some(b);
            }
        }
    }

    Ok(match status {
        Status::Optimal => {
            let xs: Vec<f64> = x.iter().map(|v| v / tau).collect();
            let duals = sf
                .links
                .iter()
                .map(|l| match *l {
                    RowLink::Eq(i) => -y[i] / tau,
                    RowLink::Le(k) => -z[k] / tau,
                    RowLink::Ge(k) => z[k] / tau,
                })
                .collect();
            let mut rx = sf.c.clone();
            let yt: Vec<f64> = y.iter().map(|v| v / tau).collect();
            let zt: Vec<f64> = z.iter().map(|v| v / tau).collect();
            sf.a.tmul_add(&yt, &mut rx);
            sf.g.tmul_add(&zt, &mut rx);
            let pcost = dot(&sf.c, &xs);
            let dcost = -(dot(&sf.b, &yt) + dot(&sf.h, &zt));
            SolveOutcome {
                status,
                objective: cp.lp.objective_value(&xs),
                residuals: Residuals {
                    primal: cp.max_violation(&xs),
                    dual: inf_norm(&rx),
                    gap: (pcost - dcost).abs(),
                },
                x: xs,
                duals: Some(duals),
                reduced_costs: None,
                iterations,
                mip: None,
            }
        }
        Status::Limit => {
            let mut out = SolveOutcome::without_solution(Status::Limit, n, iterations);
            if let Some(b) = best {
                let xb: Vec<f64> = b.x.iter().map(|v| v / b.tau).collect();
                out.residuals.primal = cp.max_violation(&xb);
                out.objective = cp.lp.objective_value(&xb);
                out.x = xb;
            }
            out
        }
        other => SolveOutcome::without_solution(other, n, iterations),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{AffineExpr, LinearProgram};

    #[test]
    fn norm_of_shifted_pair() {
        // min t  s.t.  t >= ||(x - 1, x + 1)||
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
        let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        let mut cp = ConicProgram::new(lp);
        cp.add_cone(
            AffineExpr::var(t),
            vec![AffineExpr::new(vec![(x, 1.0)], -1.0), AffineExpr::new(vec![(x, 1.0)], 1.0)],
        );
        let out = solve(&cp, &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!(out.x[x].abs() < 1e-7);
        assert!((out.x[t] - 2f64.sqrt()).abs() < 1e-8);
        assert!(out.residuals.primal <= 1e-8);
    }

    #[test]
    fn zero_tail_reduces_to_nonnegativity() {
        let mut lp = LinearProgram::new();
        let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        let mut cp = ConicProgram::new(lp);
        cp.add_cone(AffineExpr::var(t), vec![AffineExpr::constant(0.0); 3]);
        let out = solve(&cp, &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!(out.x[t].abs() < 1e-8);
    }

    #[test]
    fn lp_matches_known_optimum() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-3.0, 0.0, f64::INFINITY);
        let y = lp.add_var(-5.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_row(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let out = solve(&ConicProgram::new(lp), &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!((out.objective + 36.0).abs() < 1e-8);
        let duals = out.duals.unwrap();
        assert!((duals[2] + 1.0).abs() < 1e-7 && (duals[1] + 1.5).abs() < 1e-7);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 3.0);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 2.0);
        let out = solve(&ConicProgram::new(lp), &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let t = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
        let mut cp = ConicProgram::new(lp);
        cp.add_cone(AffineExpr::var(t), vec![AffineExpr::constant(1.0)]);
        let _ = x;
        let out = solve(&cp, &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Unbounded);
    }

    #[test]
    fn large_cone_uses_expansion() {
        // min t s.t. t >= ||x - a||, sum x = 0: optimum at x = a - mean(a).
        let d = 40;
        let a: Vec<f64> = (0..d).map(|i| (i as f64 * 0.37).sin()).collect();
        let mean = a.iter().sum::<f64>() / d as f64;
        let mut lp = LinearProgram::new();
        let xs: Vec<usize> = (0..d).map(|_| lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY)).collect();
        let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(xs.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 0.0);
        let mut cp = ConicProgram::new(lp);
        cp.add_cone(
            AffineExpr::var(t),
            xs.iter().zip(&a).map(|(&j, &ai)| AffineExpr::new(vec![(j, 1.0)], -ai)).collect(),
        );
        let out = solve(&cp, &IpmOptions::default()).unwrap();
        assert_eq!(out.status, Status::Optimal);
        let expected = d as f64 * mean * mean;
        assert!((out.objective - expected.sqrt()).abs() < 1e-7, "{} vs {}", out.objective, expected.sqrt());
    }
}
