//! Sparse LDL' factorization of symmetric quasidefinite KKT matrices.
//!
//! The matrix pattern is fixed at analysis time: a minimum-degree ordering,
//! the elimination tree and column counts are computed once, and each
//! numeric factorization only rescatters values. Pivots whose sign disagrees
//! with the expected inertia are replaced by a small signed value (dynamic
//! regularization); callers recover accuracy with iterative refinement.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Ldl {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    ap: Vec<usize>,
    ai: Vec<usize>,
    ax: Vec<f64>,
    /// Position in `ax` of each input entry.
    map: Vec<usize>,
    etree: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    dinv: Vec<f64>,
    /// Expected pivot sign per permuted index.
    sign: Vec<f64>,
    pub dyn_eps: f64,
    pub dyn_delta: f64,
    pub regularized_pivots: usize,
}

impl Ldl {
    /// `entries` lists the upper-triangle pattern `(row, col)` with
    /// `row <= col`; duplicates are summed. `signs[i]` is the expected sign of
    /// pivot `i` in the original indexing.
    pub fn analyze(n: usize, entries: &[(usize, usize)], signs: &[f64]) -> Self {
        let perm = min_degree(n, entries);
        let mut pinv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }
        // Permuted upper-triangular pattern in CSC, plus diagonals for all.
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 0..n {
            cols[j].push(j);
        }
        for &(r, c) in entries {
            let (a, b) = (pinv[r], pinv[c]);
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            cols[j].push(i);
        }
        let mut ap = vec![0; n + 1];
        let mut ai = Vec::new();
        for j in 0..n {
            cols[j].sort_unstable();
            cols[j].dedup();
            ai.extend_from_slice(&cols[j]);
            ap[j + 1] = ai.len();
        }
        let map = entries
            .iter()
            .map(|&(r, c)| {
                let (a, b) = (pinv[r], pinv[c]);
                let (i, j) = if a <= b { (a, b) } else { (b, a) };
                ap[j] + ai[ap[j]..ap[j + 1]].binary_search(&i).expect("entry in pattern")
            })
            .collect();

        let mut etree = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut work = vec![NONE; n];
        for j in 0..n {
            work[j] = j;
            for &i0 in &ai[ap[j]..ap[j + 1]] {
                let mut i = i0;
                if i == j {
                    continue;
                }
                while work[i] != j {
                    if etree[i] == NONE {
                        etree[i] = j;
                    }
                    lnz[i] += 1;
                    work[i] = j;
                    i = etree[i];
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        let nnz_l = lp[n];
        let sign = perm.iter().map(|&old| signs[old]).collect();
        Ldl {
            n,
            perm,
            ax: vec![0.0; ai.len()],
            ap,
            ai,
            map,
            etree,
            lp,
            li: vec![0; nnz_l],
            lx: vec![0.0; nnz_l],
            d: vec![0.0; n],
            dinv: vec![0.0; n],
            sign,
            dyn_eps: 1e-13,
            dyn_delta: 1e-7,
            regularized_pivots: 0,
        }
    }

    #[cfg(test)]
    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    /// Numeric factorization; `vals[k]` belongs to `entries[k]` of [`Ldl::analyze`].
    pub fn factor(&mut self, vals: &[f64]) {
        let n = self.n;
        self.ax.iter_mut().for_each(|v| *v = 0.0);
        for (k, &p) in self.map.iter().enumerate() {
            self.ax[p] += vals[k];
        }
        self.regularized_pivots = 0;
        let mut y_vals = vec![0.0; n];
        let mut y_mark = vec![false; n];
        let mut y_idx = vec![0usize; n];
        let mut elim = vec![0usize; n];
        let mut next = self.lp[..n].to_vec();

        for k in 0..n {
            let mut nnz_y = 0;
            self.d[k] = 0.0;
            for p in self.ap[k]..self.ap[k + 1] {
                let b = self.ai[p];
                if b == k {
                    self.d[k] = self.ax[p];
                    continue;
                }
                y_vals[b] = self.ax[p];
                if y_mark[b] {
                    continue;
                }
                y_mark[b] = true;
                elim[0] = b;
                let mut ne = 1;
                let mut nx = self.etree[b];
                while nx != NONE && nx < k {
                    if y_mark[nx] {
                        break;
                    }
                    y_mark[nx] = true;
                    elim[ne] = nx;
                    ne += 1;
                    nx = self.etree[nx];
                }
                while ne > 0 {
                    ne -= 1;
                    y_idx[nnz_y] = elim[ne];
                    nnz_y += 1;
                }
            }
            for i in (0..nnz_y).rev() {
                let c = y_idx[i];
                let tmp = next[c];
                let yc = y_vals[c];
                for j in self.lp[c]..tmp {
                    y_vals[self.li[j]] -= self.lx[j] * yc;
                }
                self.li[tmp] = k;
                let l = yc * self.dinv[c];
                self.lx[tmp] = l;
                self.d[k] -= yc * l;
                next[c] += 1;
                y_vals[c] = 0.0;
                y_mark[c] = false;
            }
            if self.d[k] * self.sign[k] <= self.dyn_eps {
                self.d[k] = self.sign[k] * self.dyn_delta;
                self.regularized_pivots += 1;
            }
            self.dinv[k] = 1.0 / self.d[k];
        }
    }

    /// Solves with the factored matrix; `b` is in the original indexing.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            let xi = x[i];
            if xi != 0.0 {
                for j in self.lp[i]..self.lp[i + 1] {
                    x[self.li[j]] -= self.lx[j] * xi;
                }
            }
        }
        for i in 0..n {
            x[i] *= self.dinv[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            for j in self.lp[i]..self.lp[i + 1] {
                v -= self.lx[j] * x[self.li[j]];
            }
            x[i] = v;
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[self.perm[i]] = x[i];
        }
        out
    }

}

/// Minimum-degree ordering on the graph of off-diagonal entries.
/// Ties are broken by index so the result is deterministic.
pub(crate) fn min_degree(n: usize, entries: &[(usize, usize)]) -> Vec<usize> {
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for &(r, c) in entries {
        if r != c {
            adj[r].insert(c);
            adj[c].insert(r);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|i| Reverse((adj[i].len(), i))).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((deg, v))) = heap.pop() {
        if done[v] || deg != adj[v].len() {
            continue;
        }
        done[v] = true;
        order.push(v);
        let mut nbrs: Vec<usize> = adj[v].drain().collect();
        nbrs.sort_unstable();
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        for (ia, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[ia + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        for &a in &nbrs {
            heap.push(Reverse((adj[a].len(), a)));
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(n: usize, entries: &[(usize, usize)], vals: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (&(r, c), &v) in entries.iter().zip(vals) {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    #[test]
    fn solves_quasidefinite_system() {
        // [[4, 1, 2], [1, 3, 0], [2, 0, -5]] with a repeated entry.
        let entries = vec![(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (0, 2)];
        let vals = vec![4.0, 3.0, -5.0, 1.0, 1.5, 0.5];
        let mut f = Ldl::analyze(3, &entries, &[1.0, 1.0, -1.0]);
        f.factor(&vals);
        assert_eq!(f.regularized_pivots, 0);
        let b = vec![1.0, -2.0, 0.5];
        let x = f.solve(&b);
        let r = dense_mul(3, &entries, &vals, &x);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn arrow_matrix_orders_hub_last() {
        let n = 6;
        let mut entries: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        for i in 1..n {
            entries.push((0, i));
        }
        let order = min_degree(n, &entries);
        assert!(order.iter().position(|&v| v == 0).unwrap() >= n - 2);
        let mut vals = vec![10.0; n];
        vals.extend(std::iter::repeat_n(1.0, n - 1));
        let mut f = Ldl::analyze(n, &entries, &vec![1.0; n]);
        f.factor(&vals);
        assert_eq!(f.nnz_l(), n - 1);
        let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let x = f.solve(&b);
        let r = dense_mul(n, &entries, &vals, &x);
        for i in 0..n {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }
}
