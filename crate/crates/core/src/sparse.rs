//! Sparse symmetric storage and an LDLᵀ factorization.
//!
//! The factorization follows the classic up-looking scheme: a symbolic pass
//! builds a fill-reducing ordering, the elimination tree and column counts,
//! and a numeric pass computes `L` row by row. The symbolic analysis is
//! shareable: any matrix whose pattern is a subset of the analyzed pattern can
//! be factored with it, which is what outage variants of a network need.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Symmetric matrix in compressed-column form with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsc {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymCsc {
    /// Assembles from triplets `(i, j, v)`, each describing a symmetric pair.
    /// Duplicates are summed. Diagonal triplets add once.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            cols[j].push((i, v));
            if i != j {
                cols[i].push((j, v));
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for mut col in cols {
            col.sort_by_key(|&(i, _)| i);
            let mut iter = col.into_iter().peekable();
            while let Some((i, mut v)) = iter.next() {
                while let Some(&(k, w)) = iter.peek() {
                    if k != i {
                        break;
                    }
                    v += w;
                    iter.next();
                }
                row_idx.push(i);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of column `j` as `(row, value)`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[range.clone()].binary_search(&i) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate().take(self.n) {
            for (i, v) in self.column(j) {
                y[i] += v * xj;
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                dense[i][j] = v;
            }
        }
        dense
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }
}

/// Ordering, elimination tree and column layout for a sparsity pattern.
#[derive(Debug, Clone)]
pub struct SymbolicLdl {
    n: usize,
    /// `perm[k]` is the original index eliminated at step `k`.
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    parent: Vec<Option<usize>>,
    col_ptr: Vec<usize>,
}

impl SymbolicLdl {
    pub fn analyze(a: &SymCsc) -> Self {
        let n = a.n;
        let perm = minimum_degree(a);
        let mut inv_perm = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            inv_perm[p] = k;
        }

        let mut parent = vec![None; n];
        let mut flag = vec![usize::MAX; n];
        let mut counts = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (row, _) in a.column(perm[k]) {
                let mut i = inv_perm[row];
                if i >= k {
                    continue;
                }
                while flag[i] != k {
                    if parent[i].is_none() {
                        parent[i] = Some(k);
                    }
                    counts[i] += 1;
                    flag[i] = k;
                    i = parent[i].expect("set above");
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for c in counts {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        Self {
            n,
            perm,
            inv_perm,
            parent,
            col_ptr,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entries in the strictly lower factor.
    pub fn factor_nnz(&self) -> usize {
        self.col_ptr[self.n]
    }
}

/// Numeric LDLᵀ factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    symbolic: Arc<SymbolicLdl>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    diag: Vec<f64>,
}

/// Pivots below this fraction of the largest diagonal entry are treated as
/// zero.
const PIVOT_TOL: f64 = 1e-12;

impl LdlFactor {
    /// Factors `a` with a fresh symbolic analysis.
    pub fn new(a: &SymCsc) -> Result<Self> {
        Self::with_symbolic(Arc::new(SymbolicLdl::analyze(a)), a)
    }

    /// Factors `a` reusing `symbolic`. The pattern of `a` must be contained in
    /// the analyzed pattern.
    pub fn with_symbolic(symbolic: Arc<SymbolicLdl>, a: &SymCsc) -> Result<Self> {
        let n = symbolic.n;
        if a.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.n,
            });
        }
        let nnz = symbolic.factor_nnz();
        let mut l_idx = vec![0usize; nnz];
        let mut l_val = vec![0.0; nnz];
        let mut diag = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];
        let mut fill = vec![0usize; n];

        let scale = (0..n).map(|j| a.get(j, j).abs()).fold(0.0, f64::max);
        let tol = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);

        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (row, v) in a.column(symbolic.perm[k]) {
                let mut i = symbolic.inv_perm[row];
                if i > k {
                    continue;
                }
                y[i] += v;
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = symbolic.parent[i].ok_or_else(|| {
                        Error::Singular("matrix pattern exceeds symbolic analysis".into())
                    })?;
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            diag[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = symbolic.col_ptr[i];
                let end = start + fill[i];
                if end >= symbolic.col_ptr[i + 1] {
                    return Err(Error::Singular(
                        "matrix pattern exceeds symbolic analysis".into(),
                    ));
                }
                for p in start..end {
                    y[l_idx[p]] -= l_val[p] * yi;
                }
                let l_ki = yi / diag[i];
                diag[k] -= l_ki * yi;
                l_idx[end] = k;
                l_val[end] = l_ki;
                fill[i] += 1;
            }
            if !(diag[k] > tol) {
                return Err(Error::Singular(format!(
                    "non-positive pivot {:e} at original index {}",
                    diag[k], symbolic.perm[k]
                )));
            }
        }
        Ok(Self {
            symbolic,
            l_idx,
            l_val,
            diag,
        })
    }

    pub fn symbolic(&self) -> &Arc<SymbolicLdl> {
        &self.symbolic
    }

    pub fn dim(&self) -> usize {
        self.symbolic.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let sym = &*self.symbolic;
        let n = sym.n;
        assert_eq!(b.len(), n, "right-hand side has wrong length");
        let mut x: Vec<f64> = sym.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in sym.col_ptr[j]..sym.col_ptr[j + 1] {
                x[self.l_idx[p]] -= self.l_val[p] * xj;
            }
        }
        for (xj, d) in x.iter_mut().zip(&self.diag) {
            *xj /= d;
        }
        for j in (0..n).rev() {
            let mut xj = x[j];
            for p in sym.col_ptr[j]..sym.col_ptr[j + 1] {
                xj -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = xj;
        }
        let mut out = vec![0.0; n];
        for (k, &p) in sym.perm.iter().enumerate() {
            out[p] = x[k];
        }
        out
    }
}

/// Greedy minimum-degree ordering on the explicit elimination graph. Ties go
/// to the lowest index, so the ordering is deterministic.
fn minimum_degree(a: &SymCsc) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|j| a.column(j).map(|(i, _)| i).filter(|&i| i != j).collect())
        .collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);

    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let neighbors: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &u in &neighbors {
            queue.remove(&(adj[u].len(), u));
            adj[u].remove(&v);
        }
        for (idx, &u) in neighbors.iter().enumerate() {
            for &w in &neighbors[idx + 1..] {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        for &u in &neighbors {
            queue.insert((adj[u].len(), u));
        }
    }
    order
}

/// Cholesky solve for a small dense symmetric positive definite system.
pub fn dense_spd_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) {
            return Err(Error::Singular(format!("dense pivot {d:e} at {j}")));
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i][k] * y[k];
        }
        y[i] /= l[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k][i] * y[k];
        }
        y[i] /= l[i][i];
    }
    Ok(y)
}
