//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Every solve uses reduced row echelon form with the column order supplied by the
//! caller; free variables are set to zero, so results are canonical for a given basis
//! ordering.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Scalar::zero(); cols]; rows] }
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<Scalar>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols));
        Matrix { rows: data.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r][c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        self.data[r][c] += v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r]
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero();
                for (a, b) in row.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place(self.cols, &mut []).len()
    }

    /// Reduces the first `pivot_cols` columns to RREF, applying the same row operations to
    /// `extra` (one vector per augmented column, indexed by row). Returns the pivot columns
    /// in row order.
    fn rref_in_place(&mut self, pivot_cols: usize, extra: &mut [Vec<Scalar>]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.data[i][c].is_zero()) else {
                continue;
            };
            self.data.swap(r, p);
            for e in extra.iter_mut() {
                e.swap(r, p);
            }
            let inv = self.data[r][c].inv().expect("nonzero pivot");
            if !inv.is_one() {
                for v in self.data[r][c..].iter_mut() {
                    if !v.is_zero() {
                        *v = &*v * &inv;
                    }
                }
                for e in extra.iter_mut() {
                    if !e[r].is_zero() {
                        e[r] = &e[r] * &inv;
                    }
                }
            }
            let pivot_row = self.data[r].clone();
            for i in 0..self.rows {
                if i == r || self.data[i][c].is_zero() {
                    continue;
                }
                let f = self.data[i][c].clone();
                for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                    if !pv.is_zero() {
                        let t = &f * pv;
                        self.data[i][j] -= &t;
                    }
                }
                for e in extra.iter_mut() {
                    if !e[r].is_zero() {
                        let t = &f * &e[r];
                        e[i] -= &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Pivot columns of the RREF: the greedy maximal independent set of columns.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.rref_in_place(self.cols, &mut [])
    }

    /// Basis of the null space, one vector per free column in increasing column order.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols, &mut []);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m.data[row][free];
            }
            out.push(v);
        }
        out
    }
}

/// Outcome of solving `A x = b` for one right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Solved(Vec<Scalar>),
    /// Inconsistent; carries the reduced right-hand side entries on zero rows.
    Inconsistent(Vec<(usize, Scalar)>),
}

/// Solves `A x = b_j` for every `b_j` in `rhs` at once (each `b_j` indexed by row).
/// The returned solutions set every free variable to zero.
pub fn solve_many(a: &Matrix, rhs: &[Vec<Scalar>]) -> Vec<Solution> {
    let mut m = a.clone();
    let mut extra: Vec<Vec<Scalar>> = rhs.to_vec();
    for e in &extra {
        assert_eq!(e.len(), a.rows);
    }
    let pivots = m.rref_in_place(a.cols, &mut extra);
    extra
        .into_iter()
        .map(|b| {
            let bad: Vec<(usize, Scalar)> =
                (pivots.len()..a.rows).filter(|&i| !b[i].is_zero()).map(|i| (i, b[i].clone())).collect();
            if !bad.is_empty() {
                return Solution::Inconsistent(bad);
            }
            let mut x = vec![Scalar::zero(); a.cols];
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = b[row].clone();
            }
            Solution::Solved(x)
        })
        .collect()
}

pub fn solve(a: &Matrix, b: &[Scalar]) -> Solution {
    solve_many(a, &[b.to_vec()]).pop().expect("one solution")
}

/// Solves `Σ_j x_j cols[j] = rhs` over keyed rows.
///
/// Rows are split into connected blocks through shared columns and each block is solved
/// on its own; blocks whose right-hand side vanishes get the zero solution. On failure the
/// keys of the inconsistent blocks' nonzero right-hand side rows are returned.
pub fn solve_sparse<K: Ord + Clone>(
    cols: &[BTreeMap<K, Scalar>],
    rhs: &BTreeMap<K, Scalar>,
) -> std::result::Result<Vec<Scalar>, Vec<K>> {
    let mut index: BTreeMap<&K, usize> = BTreeMap::new();
    let mut keys: Vec<&K> = Vec::new();
    for k in rhs.keys().chain(cols.iter().flat_map(|c| c.keys())) {
        if !index.contains_key(k) {
            index.insert(k, keys.len());
            keys.push(k);
        }
    }
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for c in cols {
        let mut it = c.keys().map(|k| index[k]);
        if let Some(first) = it.next() {
            for r in it {
                let (a, b) = (find(&mut parent, first), find(&mut parent, r));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut block_rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in 0..keys.len() {
        let root = find(&mut parent, r);
        block_rows.entry(root).or_default().push(r);
    }
    let mut block_cols: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (j, c) in cols.iter().enumerate() {
        if let Some(k) = c.keys().next() {
            let root = find(&mut parent, index[k]);
            block_cols.entry(root).or_default().push(j);
        }
    }
    let mut x = vec![Scalar::zero(); cols.len()];
    let mut bad = Vec::new();
    for (root, rows) in &block_rows {
        if rows.iter().all(|&r| rhs.get(keys[r]).is_none_or(Scalar::is_zero)) {
            continue;
        }
        let bcols = block_cols.get(root).cloned().unwrap_or_default();
        let local: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut mat = Matrix::zeros(rows.len(), bcols.len());
        for (jj, &j) in bcols.iter().enumerate() {
            for (k, v) in &cols[j] {
                mat.set(local[&index[k]], jj, v.clone());
            }
        }
        let b: Vec<Scalar> = rows.iter().map(|&r| rhs.get(keys[r]).cloned().unwrap_or_else(Scalar::zero)).collect();
        match solve(&mat, &b) {
            Solution::Solved(sol) => {
                for (jj, &j) in bcols.iter().enumerate() {
                    x[j] = sol[jj].clone();
                }
            }
            Solution::Inconsistent(_) => bad.extend(
                rows.iter().filter(|&&r| rhs.get(keys[r]).is_some_and(|v| !v.is_zero())).map(|&r| keys[r].clone()),
            ),
        }
    }
    if bad.is_empty() {
        Ok(x)
    } else {
        Err(bad)
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn sparse_blocks() {
        let mut c0 = BTreeMap::new();
        c0.insert("a", s(2));
        let mut c1 = BTreeMap::new();
        c1.insert("b", s(1));
        c1.insert("c", s(1));
        let mut rhs = BTreeMap::new();
        rhs.insert("a", s(4));
        assert_eq!(solve_sparse(&[c0.clone(), c1.clone()], &rhs), Ok(vec![s(2), s(0)]));
        rhs.insert("b", s(1));
        assert_eq!(solve_sparse(&[c0, c1], &rhs), Err(vec!["b"]));
    }

    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solves_with_free_variables_zero() {
        let a = Matrix::from_rows(3, vec![vec![s(1), s(1), s(0)], vec![s(0), s(0), s(2)]]);
        match solve(&a, &[s(3), s(4)]) {
            Solution::Solved(x) => assert_eq!(x, vec![s(3), s(0), s(2)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn detects_inconsistency() {
        let a = Matrix::from_rows(2, vec![vec![s(1), s(2)], vec![s(2), s(4)]]);
        assert!(matches!(solve(&a, &[s(1), s(3)]), Solution::Inconsistent(_)));
    }

    #[test]
    fn complex_pivots() {
        let i = Scalar::i();
        let a = Matrix::from_rows(2, vec![vec![i.clone(), s(1)], vec![s(1), i.clone()]]);
        // det = i*i - 1 = -2.
        assert_eq!(a.rank(), 2);
        match solve(&a, &[s(1), s(0)]) {
            Solution::Solved(x) => assert_eq!(a.mul_vec(&x), vec![s(1), s(0)]),
            other => panic!("{other:?}"),
        }
    }
}
