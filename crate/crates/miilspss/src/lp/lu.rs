//! Sparse LU factorization of simplex basis matrices (Gilbert-Peierls
//! left-looking elimination with partial pivoting), plus the forward and
//! transposed solves the simplex needs.

/// LU factors of a square sparse matrix given by columns.
///
/// Column `k` of the input is pivotal on original row `prow[k]`. `L` is
/// unit lower triangular (entries stored by original row), `U` upper
/// triangular in pivot-position space.
#[derive(Debug)]
pub struct LuFactors {
    m: usize,
    /// L column `k`: `(orig_row, value)` with `pinv[orig_row] > k`.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// U column `k`: `(position, value)` with `position < k`.
    u_cols: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    /// Original row pivotal at position `k`.
    prow: Vec<usize>,
    /// Position of each original row.
    pinv: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
#[error("basis matrix is singular at column {column}")]
pub struct Singular {
    pub column: usize,
}

const UNSET: usize = usize::MAX;

impl LuFactors {
    /// Factorizes the matrix whose `k`-th column is `cols[k]`, given as
    /// `(row, value)` pairs. Rows may appear in any order; duplicates are
    /// not allowed.
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        assert_eq!(cols.len(), m);
        let mut lu = LuFactors {
            m,
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            prow: Vec::with_capacity(m),
            pinv: vec![UNSET; m],
        };
        // Dense workspace indexed by original row.
        let mut x = vec![0.0; m];
        let mut marked = vec![false; m];
        let mut topo: Vec<usize> = Vec::with_capacity(m);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for (k, col_k) in cols.iter().enumerate() {
            // Symbolic: reachable rows of L^{-1} a_k via DFS over already
            // assembled L columns, in reverse topological finish order.
            topo.clear();
            for &(row, _) in col_k {
                if marked[row] {
                    continue;
                }
                stack.push((row, 0));
                marked[row] = true;
                while let Some((node, child)) = stack.pop() {
                    let children: &[(usize, f64)] = if lu.pinv[node] != UNSET {
                        &lu.l_cols[lu.pinv[node]]
                    } else {
                        &[]
                    };
                    if child < children.len() {
                        stack.push((node, child + 1));
                        let next = children[child].0;
                        if !marked[next] {
                            marked[next] = true;
                            stack.push((next, 0));
                        }
                    } else {
                        topo.push(node);
                    }
                }
            }
            // Numeric: x = L^{-1} a_k over the reach set.
            for &(row, val) in col_k {
                x[row] = val;
            }
            for &row in topo.iter().rev() {
                let p = lu.pinv[row];
                if p == UNSET {
                    continue;
                }
                let v = x[row];
                if v != 0.0 {
                    for &(r, lv) in &lu.l_cols[p] {
                        x[r] -= lv * v;
                    }
                }
            }
            // Partial pivoting over not-yet-pivotal rows.
            let mut pivot_row = UNSET;
            let mut pivot_abs = 0.0;
            for &row in &topo {
                if lu.pinv[row] == UNSET && x[row].abs() > pivot_abs {
                    pivot_abs = x[row].abs();
                    pivot_row = row;
                }
            }
            if pivot_row == UNSET || pivot_abs < 1e-12 {
                for &row in &topo {
                    x[row] = 0.0;
                    marked[row] = false;
                }
                return Err(Singular { column: k });
            }
            let pivot = x[pivot_row];
            let mut ucol = Vec::new();
            let mut lcol = Vec::new();
            for &row in &topo {
                let v = x[row];
                x[row] = 0.0;
                marked[row] = false;
                if v == 0.0 {
                    continue;
                }
                let p = lu.pinv[row];
                if p != UNSET {
                    ucol.push((p, v));
                } else if row != pivot_row {
                    lcol.push((row, v / pivot));
                }
            }
            lu.pinv[pivot_row] = k;
            lu.prow.push(pivot_row);
            lu.diag.push(pivot);
            lu.u_cols.push(ucol);
            lu.l_cols.push(lcol);
        }
        Ok(lu)
    }

    /// Solves `B x = rhs`. `rhs` is indexed by original row and is
    /// consumed as workspace; the result is in basis-position space.
    pub fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.m);
        for k in 0..self.m {
            let v = rhs[self.prow[k]];
            if v != 0.0 {
                for &(row, lv) in &self.l_cols[k] {
                    rhs[row] -= lv * v;
                }
            }
        }
        for k in 0..self.m {
            out[k] = rhs[self.prow[k]];
            rhs[self.prow[k]] = 0.0;
        }
        for k in (0..self.m).rev() {
            let xk = out[k] / self.diag[k];
            out[k] = xk;
            if xk != 0.0 {
                for &(p, uv) in &self.u_cols[k] {
                    out[p] -= uv * xk;
                }
            }
        }
    }

    /// Solves `B^T z = c`. `c` is in basis-position space; the result is
    /// indexed by original row.
    pub fn btran(&self, c: &[f64], out: &mut [f64]) {
        debug_assert_eq!(c.len(), self.m);
        let mut w = vec![0.0; self.m];
        for k in 0..self.m {
            let mut v = c[k];
            for &(p, uv) in &self.u_cols[k] {
                v -= uv * w[p];
            }
            w[k] = v / self.diag[k];
        }
        for v in out.iter_mut() {
            *v = 0.0;
        }
        for k in (0..self.m).rev() {
            let mut v = w[k];
            for &(row, lv) in &self.l_cols[k] {
                v -= lv * out[row];
            }
            out[self.prow[k]] = v;
        }
    }
}
