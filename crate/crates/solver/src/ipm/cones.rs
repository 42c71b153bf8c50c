//! Cone algebra for the interior-point method: the nonnegative orthant and
//! second-order cones, Jordan products, step lengths and Nesterov-Todd scaling.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cone {
    Nonneg(usize),
    Soc(usize),
}

impl Cone {
    pub fn dim(self) -> usize {
        match self {
            Cone::Nonneg(d) | Cone::Soc(d) => d,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            Cone::Nonneg(d) => d,
            Cone::Soc(_) => 1,
        }
    }
}

/// Second-order cones at or above this dimension use the sparse rank-two
/// expansion in the KKT system instead of a dense scaling block.
pub(crate) const EXPAND_DIM: usize = 8;

/// Nesterov-Todd scaling of a single cone block.
#[derive(Debug, Clone)]
pub(crate) enum Scaling {
    /// `W = diag(w)`.
    Diag(Vec<f64>),
    /// `W = eta (2 wbar wbar' - J)` with `wbar' J wbar = 1`.
    Soc {
        eta: f64,
        wbar: Vec<f64>,
    },
}

impl Scaling {
    pub fn identity(cone: Cone) -> Self {
        match cone {
            Cone::Nonneg(d) => Scaling::Diag(vec![1.0; d]),
            Cone::Soc(d) => {
                let mut wbar = vec![0.0; d];
                wbar[0] = 1.0;
                Scaling::Soc { eta: 1.0, wbar }
            }
        }
    }

    /// Scaling with `W^2 z = s`; both points must be strictly interior.
    pub fn nt(cone: Cone, s: &[f64], z: &[f64]) -> Self {
        match cone {
            Cone::Nonneg(_) => Scaling::Diag(s.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect()),
            Cone::Soc(d) => {
                let sres = soc_residual(s).max(f64::MIN_POSITIVE);
                let zres = soc_residual(z).max(f64::MIN_POSITIVE);
                let sn = sres.sqrt();
                let zn = zres.sqrt();
                let sbar: Vec<f64> = s.iter().map(|v| v / sn).collect();
                let zbar: Vec<f64> = z.iter().map(|v| v / zn).collect();
                let dotsz: f64 = sbar.iter().zip(&zbar).map(|(a, b)| a * b).sum();
                let gamma = ((1.0 + dotsz) / 2.0).max(f64::MIN_POSITIVE).sqrt();
                // w = (sbar + J zbar) / (2 gamma) is the NT point; W/eta is the
                // hyperbolic rotation taking e to w, written as 2 v v' - J.
                let w0 = (sbar[0] + zbar[0]) / (2.0 * gamma);
                let tail2: f64 = (1..d).map(|i| ((sbar[i] - zbar[i]) / (2.0 * gamma)).powi(2)).sum();
                let w0 = w0.max((1.0 + tail2).sqrt());
                let v0 = ((1.0 + w0) / 2.0).sqrt();
                let mut wbar = vec![0.0; d];
                wbar[0] = v0;
                for i in 1..d {
                    wbar[i] = (sbar[i] - zbar[i]) / (2.0 * gamma) / (2.0 * v0);
                }
                Scaling::Soc {
                    eta: (sres / zres).sqrt().sqrt(),
                    wbar,
                }
            }
        }
    }

    /// `out = W v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Diag(w) => {
                for i in 0..w.len() {
                    out[i] = w[i] * v[i];
                }
            }
            Scaling::Soc { eta, wbar } => {
                let t: f64 = wbar.iter().zip(v).map(|(a, b)| a * b).sum();
                out[0] = eta * (2.0 * wbar[0] * t - v[0]);
                for i in 1..v.len() {
                    out[i] = eta * (2.0 * wbar[i] * t + v[i]);
                }
            }
        }
    }

    /// `out = W^{-1} v`.
    pub fn apply_inv(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Diag(w) => {
                for i in 0..w.len() {
                    out[i] = v[i] / w[i];
                }
            }
            Scaling::Soc { eta, wbar } => {
                // J wbar and wbar' J v
                let t: f64 = wbar[0] * v[0] - wbar[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>();
                out[0] = (2.0 * wbar[0] * t - v[0]) / eta;
                for i in 1..v.len() {
                    out[i] = (-2.0 * wbar[i] * t + v[i]) / eta;
                }
            }
        }
    }

    /// Dense `W^2` of a (small) second-order cone block, row-major.
    pub fn soc_w2_dense(&self) -> Vec<f64> {
        let Scaling::Soc { eta, wbar } = self else {
            unreachable!("dense W^2 requested for a diagonal block")
        };
        let d = wbar.len();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let jij = if i == j {
                    if i == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                m[i * d + j] = 2.0 * wbar[i] * wbar[j] - jij;
            }
        }
        let mut w2 = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = m[i * d + k];
                if a != 0.0 {
                    for j in 0..d {
                        w2[i * d + j] += a * m[k * d + j];
                    }
                }
            }
        }
        let e2 = eta * eta;
        w2.iter_mut().for_each(|v| *v *= e2);
        w2
    }

    /// Rank-two split `W^2 = eta^2 (I + u u' - v v')` with `||v|| < 1`.
    pub fn soc_expansion(&self) -> (f64, Vec<f64>, Vec<f64>) {
        let Scaling::Soc { eta, wbar } = self else {
            unreachable!("expansion requested for a diagonal block")
        };
        let d = wbar.len();
        let w0 = wbar[0];
        let omega = wbar[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut f = vec![0.0; d];
        if omega > 0.0 {
            for i in 1..d {
                f[i] = wbar[i] / omega;
            }
        } else if d > 1 {
            f[1] = 1.0;
        }
        // W / eta restricted to span{e0, f} is [[a, b], [b, c]] with det 1;
        // it acts as the identity on the orthogonal complement.
        let a = 2.0 * w0 * w0 - 1.0;
        let b = 2.0 * w0 * omega;
        let c = 2.0 * omega * omega + 1.0;
        let mid = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let big = mid + rad;
        let small = 1.0 / big;
        let (q0, q1) = if b != 0.0 {
            let (p0, p1) = (b, big - a);
            let n = (p0 * p0 + p1 * p1).sqrt();
            (p0 / n, p1 / n)
        } else if a >= c {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let rp = (big * big - 1.0).max(0.0).sqrt();
        let rm = (1.0 - small * small).max(0.0).sqrt();
        let mut u = vec![0.0; d];
        let mut v = vec![0.0; d];
        u[0] = rp * q0;
        v[0] = rm * -q1;
        for i in 1..d {
            u[i] = rp * q1 * f[i];
            v[i] = rm * q0 * f[i];
        }
        (*eta, u, v)
    }
}

/// `x0^2 - ||x1||^2`.
pub(crate) fn soc_residual(x: &[f64]) -> f64 {
    let t: f64 = x[1..].iter().map(|v| v * v).sum();
    (x[0] - t.sqrt()) * (x[0] + t.sqrt())
}

/// Jordan product `u o v` on one block.
pub(crate) fn jordan_product(cone: Cone, u: &[f64], v: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Nonneg(_) => {
            for i in 0..u.len() {
                out[i] = u[i] * v[i];
            }
        }
        Cone::Soc(_) => {
            out[0] = u.iter().zip(v).map(|(a, b)| a * b).sum();
            for i in 1..u.len() {
                out[i] = u[0] * v[i] + v[0] * u[i];
            }
        }
    }
}

/// Solves `lambda o out = v` on one block.
pub(crate) fn jordan_div(cone: Cone, lambda: &[f64], v: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Nonneg(_) => {
            for i in 0..v.len() {
                out[i] = v[i] / lambda[i];
            }
        }
        Cone::Soc(_) => {
            let rho = soc_residual(lambda);
            let l1v1: f64 = lambda[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
            let u0 = (lambda[0] * v[0] - l1v1) / rho;
            out[0] = u0;
            for i in 1..v.len() {
                out[i] = (v[i] - u0 * lambda[i]) / lambda[0];
            }
        }
    }
}

/// Adds `alpha e` (the cone identity) to one block.
pub(crate) fn add_identity(cone: Cone, x: &mut [f64], alpha: f64) {
    match cone {
        Cone::Nonneg(_) => x.iter_mut().for_each(|v| *v += alpha),
        Cone::Soc(_) => x[0] += alpha,
    }
}

/// Smallest `alpha` such that `x + alpha e` lies in the closed cone
/// (negative when `x` is strictly interior).
pub(crate) fn interior_margin(cone: Cone, x: &[f64]) -> f64 {
    match cone {
        Cone::Nonneg(_) => x.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max),
        Cone::Soc(_) => x[1..].iter().map(|v| v * v).sum::<f64>().sqrt() - x[0],
    }
}

/// Largest step `alpha >= 0` keeping `x + alpha dx` in the cone; `x` interior.
pub(crate) fn max_step(cone: Cone, x: &[f64], dx: &[f64]) -> f64 {
    match cone {
        Cone::Nonneg(_) => x
            .iter()
            .zip(dx)
            .filter(|(_, &d)| d < 0.0)
            .map(|(&v, &d)| -v / d)
            .fold(f64::INFINITY, f64::min),
        Cone::Soc(_) => {
            let a = dx[0] * dx[0] - dx[1..].iter().map(|v| v * v).sum::<f64>();
            let b = x[0] * dx[0] - x[1..].iter().zip(&dx[1..]).map(|(p, q)| p * q).sum::<f64>();
            let c = soc_residual(x).max(0.0);
            let mut best = f64::INFINITY;
            if dx[0] < 0.0 {
                best = -x[0] / dx[0];
            }
            // Roots of a t^2 + 2 b t + c.
            if a == 0.0 {
                if b < 0.0 {
                    best = best.min(-c / (2.0 * b));
                }
            } else {
                let disc = b * b - a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let q = -(b + b.signum() * sq);
                    let mut roots = Vec::with_capacity(2);
                    if q != 0.0 {
                        roots.push(q / a);
                        roots.push(c / q);
                    } else {
                        roots.push(0.0);
                    }
                    for r in roots {
                        if r >= 0.0 {
                            best = best.min(r);
                        }
                    }
                }
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn nt_scaling_maps_z_to_s() {
        let cone = Cone::Soc(4);
        let s = [3.0, 1.0, -0.5, 0.7];
        let z = [2.0, -0.3, 0.4, 1.1];
        let w = Scaling::nt(cone, &s, &z);
        let mut wz = [0.0; 4];
        let mut ws = [0.0; 4];
        w.apply(&z, &mut wz);
        w.apply_inv(&s, &mut ws);
        assert!(approx(&wz, &ws, 1e-12));
        let mut w2z = [0.0; 4];
        w.apply(&wz, &mut w2z);
        assert!(approx(&w2z, &s, 1e-12));
    }

    #[test]
    fn dense_and_expanded_w2_agree() {
        let cone = Cone::Soc(5);
        let s = [4.0, 1.0, -2.0, 0.5, 1.5];
        let z = [1.0, 0.2, 0.1, -0.6, 0.3];
        let w = Scaling::nt(cone, &s, &z);
        let dense = w.soc_w2_dense();
        let (eta, u, v) = w.soc_expansion();
        assert!(v.iter().map(|x| x * x).sum::<f64>() < 1.0);
        for i in 0..5 {
            for j in 0..5 {
                let id = if i == j { 1.0 } else { 0.0 };
                let e = eta * eta * (id + u[i] * u[j] - v[i] * v[j]);
                assert!((e - dense[i * 5 + j]).abs() < 1e-10 * (1.0 + e.abs()));
            }
        }
    }

    #[test]
    fn jordan_division_inverts_product() {
        let cone = Cone::Soc(3);
        let l = [2.0, 0.5, -1.0];
        let v = [0.3, -0.2, 0.9];
        let mut u = [0.0; 3];
        jordan_div(cone, &l, &v, &mut u);
        let mut back = [0.0; 3];
        jordan_product(cone, &l, &u, &mut back);
        assert!(approx(&back, &v, 1e-12));
    }

    #[test]
    fn soc_step_hits_boundary() {
        let cone = Cone::Soc(2);
        let x = [1.0, 0.0];
        let dx = [0.0, 1.0];
        assert!((max_step(cone, &x, &dx) - 1.0).abs() < 1e-12);
        let dx = [1.0, 0.5];
        assert_eq!(max_step(cone, &x, &dx), f64::INFINITY);
        let dx = [-1.0, 0.0];
        assert!((max_step(cone, &x, &dx) - 1.0).abs() < 1e-12);
    }
}
