//! Sparse left-looking LU of the simplex basis with product-form updates.
//!
//! Columns are factored in order of increasing nonzero count, which puts
//! logical (slack) columns first and keeps fill small for the nearly
//! triangular bases produced by the simplex method.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Basis positions whose columns could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, same length as `positions`.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Factor {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    l_cols: Vec<Vec<(usize, f64)>>,
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
}

impl Factor {
    /// Factors the basis whose column at position `p` is `cols[p]` (sparse, by row).
    pub fn new(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| cols[p].len());

        let mut f = Factor {
            m,
            prow: Vec::with_capacity(m),
            pcol: Vec::with_capacity(m),
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
            etas: Vec::new(),
        };
        let mut pivoted = vec![false; m];
        // Pivot index of each pivoted row.
        let mut pivot_of = vec![usize::MAX; m];
        let mut x = vec![0.0; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; m];
        let mut failed = Vec::new();
        let mut pending = BinaryHeap::new();

        for &pos in &order {
            let mut scale: f64 = 0.0;
            for &(i, v) in &cols[pos] {
                if !mark[i] {
                    mark[i] = true;
                    touched.push(i);
                    if pivoted[i] {
                        pending.push(Reverse(pivot_of[i]));
                    }
                }
                x[i] += v;
                scale = scale.max(v.abs());
            }
            // Sparse forward solve with L: earlier pivots in increasing order,
            // visiting only those reachable from the column's pattern.
            let mut ucol = Vec::new();
            while let Some(Reverse(kk)) = pending.pop() {
                let r = f.prow[kk];
                let v = x[r];
                if v == 0.0 {
                    continue;
                }
                ucol.push((kk, v));
                for &(i, l) in &f.l_cols[kk] {
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                        if pivoted[i] {
                            pending.push(Reverse(pivot_of[i]));
                        }
                    }
                    x[i] -= l * v;
                }
                x[r] = 0.0;
            }
            let mut best = usize::MAX;
            let mut best_abs = 0.0;
            for &i in &touched {
                if !pivoted[i] && x[i].abs() > best_abs {
                    best_abs = x[i].abs();
                    best = i;
                }
            }
            if best == usize::MAX || best_abs <= SINGULAR_TOL * scale.max(1.0) {
                failed.push(pos);
                for &i in &touched {
                    x[i] = 0.0;
                    mark[i] = false;
                }
                touched.clear();
                continue;
            }
            let piv = x[best];
            let mut lcol = Vec::new();
            for &i in &touched {
                if x[i] != 0.0 && i != best && !pivoted[i] {
                    lcol.push((i, x[i] / piv));
                }
                x[i] = 0.0;
                mark[i] = false;
            }
            touched.clear();
            pivoted[best] = true;
            pivot_of[best] = f.prow.len();
            f.prow.push(best);
            f.pcol.push(pos);
            f.l_cols.push(lcol);
            f.u_cols.push(ucol);
            f.u_diag.push(piv);
        }

        if failed.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&i| !pivoted[i]).collect();
            Err(Singular {
                positions: failed,
                rows,
            })
        }
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = b` where `b` is indexed by row; returns `x` indexed by position.
    pub fn ftran(&self, b: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = b.to_vec();
        let mut t = vec![0.0; m];
        for kk in 0..m {
            let v = y[self.prow[kk]];
            t[kk] = v;
            if v != 0.0 {
                for &(i, l) in &self.l_cols[kk] {
                    y[i] -= l * v;
                }
            }
        }
        let mut out = vec![0.0; m];
        for jj in (0..m).rev() {
            let z = t[jj] / self.u_diag[jj];
            if z != 0.0 {
                for &(kk, u) in &self.u_cols[jj] {
                    t[kk] -= u * z;
                }
            }
            out[self.pcol[jj]] = z;
        }
        for eta in &self.etas {
            let vr = out[eta.pos] / eta.pivot;
            out[eta.pos] = vr;
            if vr != 0.0 {
                for &(i, a) in &eta.entries {
                    out[i] -= a * vr;
                }
            }
        }
        out
    }

    /// Solves `B' y = c` where `c` is indexed by position; returns `y` indexed by row.
    pub fn btran(&self, c: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut w = c.to_vec();
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.entries.iter().map(|&(i, a)| a * w[i]).sum();
            w[eta.pos] = (w[eta.pos] - s) / eta.pivot;
        }
        let mut r = vec![0.0; m];
        for jj in 0..m {
            let mut v = w[self.pcol[jj]];
            for &(kk, u) in &self.u_cols[jj] {
                v -= u * r[kk];
            }
            r[jj] = v / self.u_diag[jj];
        }
        let mut out = vec![0.0; m];
        for kk in (0..m).rev() {
            let mut v = r[kk];
            for &(i, l) in &self.l_cols[kk] {
                v -= l * out[i];
            }
            out[self.prow[kk]] = v;
        }
        out
    }

    /// Records the replacement of the column at `pos` by a column whose
    /// FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            entries,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m)
            .map(|j| (0..m).filter(|&i| a[i][j] != 0.0).map(|i| (i, a[i][j])).collect())
            .collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn ftran_btran_solve_basis_systems() {
        let a = vec![
            vec![2.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 3.0],
            vec![4.0, 0.0, 0.0, 1.0],
            vec![0.0, 5.0, 1.0, 0.0],
        ];
        let f = Factor::new(4, &dense_cols(&a)).unwrap();
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let x = f.ftran(&b);
        let r = matvec(&a, &x);
        for i in 0..4 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
        let y = f.btran(&b);
        let at: Vec<Vec<f64>> = (0..4).map(|j| (0..4).map(|i| a[i][j]).collect()).collect();
        let r = matvec(&at, &y);
        for i in 0..4 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_updates_track_column_replacement() {
        let mut a = vec![
            vec![1.0, 2.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ];
        let mut f = Factor::new(3, &dense_cols(&a)).unwrap();
        let newcol = vec![1.0, 1.0, 1.0];
        let alpha = f.ftran(&newcol);
        f.update(1, &alpha);
        for i in 0..3 {
            a[i][1] = newcol[i];
        }
        let b = vec![0.5, -1.0, 2.0];
        let x = f.ftran(&b);
        let r = matvec(&a, &x);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
        let y = f.btran(&b);
        let at: Vec<Vec<f64>> = (0..3).map(|j| (0..3).map(|i| a[i][j]).collect()).collect();
        let r = matvec(&at, &y);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_basis_is_reported() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let err = Factor::new(2, &dense_cols(&a)).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
