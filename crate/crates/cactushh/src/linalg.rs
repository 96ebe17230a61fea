//! Sparse exact linear algebra: matrices over a [`Field`] and Gaussian
//! elimination for ranks, kernels, solving, and coset membership.
//!
//! Matrices are stored column-major with sorted, zero-free columns. The
//! elimination kernel is a plain fraction-exact row reduction with
//! first-pivot tie-breaking, which keeps every downstream computation
//! deterministic.

use crate::field::Field;

/// Sorted sparse vector: `(index, coefficient)` pairs with no zeros.
pub type SparseVec<F> = Vec<(usize, <F as Field>::Elem)>;

/// Normalize a list of (index, coeff) pairs: sort, merge, drop zeros.
pub fn normalize_vec<F: Field>(field: &F, mut v: Vec<(usize, F::Elem)>) -> SparseVec<F> {
    v.sort_by_key(|(i, _)| *i);
    let mut out: Vec<(usize, F::Elem)> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = field.add(acc, &c),
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !field.is_zero(c));
    out
}

pub fn vec_add<F: Field>(field: &F, a: &SparseVec<F>, b: &SparseVec<F>) -> SparseVec<F> {
    let mut v = a.clone();
    v.extend(b.iter().cloned());
    normalize_vec(field, v)
}

pub fn vec_scale<F: Field>(field: &F, c: &F::Elem, a: &SparseVec<F>) -> SparseVec<F> {
    if field.is_zero(c) {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, field.mul(c, x))).collect()
}

pub fn vec_sub<F: Field>(field: &F, a: &SparseVec<F>, b: &SparseVec<F>) -> SparseVec<F> {
    let minus = field.neg(&field.one());
    vec_add(field, a, &vec_scale(field, &minus, b))
}

/// Sparse matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F: Field> {
    rows: usize,
    cols: usize,
    /// `columns[j]` is the j-th column, sorted by row index, no zeros.
    columns: Vec<SparseVec<F>>,
}

impl<F: Field> Mat<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for j in 0..n {
            m.columns[j].push((j, field.one()));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn from_columns(field: &F, rows: usize, columns: Vec<Vec<(usize, F::Elem)>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|c| {
                let c = normalize_vec(field, c);
                debug_assert!(c.iter().all(|(i, _)| *i < rows));
                c
            })
            .collect();
        Mat { rows, cols, columns }
    }

    /// Build from an entry list of `(row, col, coeff)` triplets.
    pub fn from_triplets(field: &F, rows: usize, cols: usize, entries: Vec<(usize, usize, F::Elem)>) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            columns[c].push((r, v));
        }
        Mat::from_columns(field, rows, columns)
    }

    pub fn column(&self, j: usize) -> &SparseVec<F> {
        &self.columns[j]
    }

    pub fn set_column(&mut self, field: &F, j: usize, v: Vec<(usize, F::Elem)>) {
        self.columns[j] = normalize_vec(field, v);
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Apply to a sparse vector (matrix-vector product).
    pub fn apply(&self, field: &F, v: &SparseVec<F>) -> SparseVec<F> {
        let mut acc: Vec<(usize, F::Elem)> = Vec::new();
        for (j, c) in v {
            for (i, a) in &self.columns[*j] {
                acc.push((*i, field.mul(a, c)));
            }
        }
        normalize_vec(field, acc)
    }

    /// `self * other` (composition: `other` first, then `self`).
    pub fn mul_mat(&self, field: &F, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let columns = other.columns.iter().map(|c| self.apply(field, c)).collect();
        Mat { rows: self.rows, cols: other.cols, columns }
    }

    pub fn add(&self, field: &F, other: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| vec_add(field, a, b))
            .collect();
        Mat { rows: self.rows, cols: self.cols, columns }
    }

    pub fn sub(&self, field: &F, other: &Mat<F>) -> Mat<F> {
        self.add(field, &other.scale(field, &field.neg(&field.one())))
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Mat<F> {
        let columns = self.columns.iter().map(|col| vec_scale(field, c, col)).collect();
        Mat { rows: self.rows, cols: self.cols, columns }
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut columns: Vec<SparseVec<F>> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                columns[*i].push((j, v.clone()));
            }
        }
        // pushes happen in increasing j per row, already sorted
        Mat { rows: self.cols, cols: self.rows, columns }
    }

    pub fn entry(&self, field: &F, i: usize, j: usize) -> F::Elem {
        self.columns[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| field.zero())
    }

    /// First column where the two matrices differ, with both columns.
    pub fn first_difference(&self, other: &Mat<F>) -> Option<usize> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some(0);
        }
        (0..self.cols).find(|&j| self.columns[j] != other.columns[j])
    }
}

/// Result of a row reduction: reduced rows in echelon form plus pivots.
pub struct Rref<F: Field> {
    pub rank: usize,
    /// Pivot column of each reduced row, strictly increasing.
    pub pivot_cols: Vec<usize>,
    /// The reduced rows (each starts with coefficient 1 at its pivot).
    pub rows: Vec<SparseVec<F>>,
    pub ncols: usize,
}

impl<F: Field> Rref<F> {
    /// Reduce `v` modulo the row space: the normal form of the coset.
    pub fn reduce(&self, field: &F, v: &SparseVec<F>) -> SparseVec<F> {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivot_cols) {
            if let Some(pos) = v.iter().position(|(i, _)| *i == p) {
                let c = v[pos].1.clone();
                v = vec_sub(field, &v, &vec_scale(field, &c, row));
            }
        }
        v
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, field: &F, v: &SparseVec<F>) -> bool {
        self.reduce(field, v).is_empty()
    }
}

/// Reduced row echelon form of a list of sparse rows.
///
/// Deterministic: scans columns left to right and always picks the first
/// available row as pivot.
pub fn rref_rows<F: Field>(field: &F, rows: Vec<SparseVec<F>>, ncols: usize) -> Rref<F> {
    let mut work: Vec<SparseVec<F>> = rows.into_iter().map(|r| normalize_vec(field, r)).collect();
    let mut reduced: Vec<SparseVec<F>> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();

    loop {
        // first row with the leftmost leading index
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .min_by_key(|(i, r)| (r[0].0, *i))
            .map(|(i, _)| i);
        let Some(idx) = best else { break };
        let mut pivot_row = work.swap_remove(idx);
        let p = pivot_row[0].0;
        let lead = pivot_row[0].1.clone();
        let inv = field.inv(&lead).expect("nonzero leading coefficient");
        pivot_row = vec_scale(field, &inv, &pivot_row);
        // eliminate p from remaining work rows
        for r in work.iter_mut() {
            if let Some(pos) = r.iter().position(|(i, _)| *i == p) {
                let c = r[pos].1.clone();
                *r = vec_sub(field, r, &vec_scale(field, &c, &pivot_row));
            }
        }
        // and from previously reduced rows (full reduction)
        for r in reduced.iter_mut() {
            if let Some(pos) = r.iter().position(|(i, _)| *i == p) {
                let c = r[pos].1.clone();
                *r = vec_sub(field, r, &vec_scale(field, &c, &pivot_row));
            }
        }
        reduced.push(pivot_row);
        pivot_cols.push(p);
    }

    // sort rows by pivot column for a canonical result
    let mut order: Vec<usize> = (0..reduced.len()).collect();
    order.sort_by_key(|&i| pivot_cols[i]);
    let rows: Vec<_> = order.iter().map(|&i| reduced[i].clone()).collect();
    let pivot_cols: Vec<_> = order.iter().map(|&i| pivot_cols[i]).collect();
    Rref { rank: rows.len(), pivot_cols, rows, ncols }
}

/// RREF of the rows of a matrix (row space of `m`).
pub fn rref_of_rows<F: Field>(field: &F, m: &Mat<F>) -> Rref<F> {
    let t = m.transpose();
    let rows: Vec<SparseVec<F>> = (0..t.cols()).map(|j| t.column(j).clone()).collect();
    rref_rows(field, rows, m.cols())
}

/// RREF of the columns of `m`, i.e. a canonical basis of the column space.
pub fn column_space<F: Field>(field: &F, m: &Mat<F>) -> Rref<F> {
    let rows: Vec<SparseVec<F>> = (0..m.cols()).map(|j| m.column(j).clone()).collect();
    rref_rows(field, rows, m.rows())
}

pub fn rank<F: Field>(field: &F, m: &Mat<F>) -> usize {
    column_space(field, m).rank
}

/// Canonical kernel basis of `m` (null space), via RREF of the rows.
pub fn kernel_basis<F: Field>(field: &F, m: &Mat<F>) -> Vec<SparseVec<F>> {
    let r = rref_of_rows(field, m);
    let pivot_set: std::collections::BTreeSet<usize> = r.pivot_cols.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..m.cols() {
        if pivot_set.contains(&free) {
            continue;
        }
        // x_free = 1, pivots solve the reduced system
        let mut v: Vec<(usize, F::Elem)> = vec![(free, field.one())];
        for (row, &p) in r.rows.iter().zip(&r.pivot_cols) {
            if let Some((_, c)) = row.iter().find(|(i, _)| *i == free) {
                v.push((p, field.neg(c)));
            }
        }
        basis.push(normalize_vec(field, v));
    }
    basis
}

/// Solve `m x = b`; returns a particular solution if one exists.
///
/// Echelonizes the columns of `m` while tracking the combination that
/// produced each echelon vector, then reduces `b` against them.
pub fn solve<F: Field>(field: &F, m: &Mat<F>, b: &SparseVec<F>) -> Option<SparseVec<F>> {
    let mut rows: Vec<(SparseVec<F>, SparseVec<F>)> = (0..m.cols())
        .map(|j| (m.column(j).clone(), vec![(j, field.one())]))
        .collect();
    let mut reduced: Vec<(SparseVec<F>, SparseVec<F>)> = Vec::new();
    loop {
        let best = rows
            .iter()
            .enumerate()
            .filter(|(_, (r, _))| !r.is_empty())
            .min_by_key(|(i, (r, _))| (r[0].0, *i))
            .map(|(i, _)| i);
        let Some(idx) = best else { break };
        let (mut r, mut t) = rows.swap_remove(idx);
        let p = r[0].0;
        let inv = field.inv(&r[0].1).unwrap();
        r = vec_scale(field, &inv, &r);
        t = vec_scale(field, &inv, &t);
        for (r2, t2) in rows.iter_mut().chain(reduced.iter_mut()) {
            if let Some(pos) = r2.iter().position(|(i, _)| *i == p) {
                let c = r2[pos].1.clone();
                *r2 = vec_sub(field, r2, &vec_scale(field, &c, &r));
                *t2 = vec_sub(field, t2, &vec_scale(field, &c, &t));
            }
        }
        reduced.push((r, t));
    }
    let mut residual = b.clone();
    let mut combo: SparseVec<F> = Vec::new();
    for (r, t) in &reduced {
        let p = r[0].0;
        if let Some(pos) = residual.iter().position(|(i, _)| *i == p) {
            let c = residual[pos].1.clone();
            residual = vec_sub(field, &residual, &vec_scale(field, &c, r));
            combo = vec_add(field, &combo, &vec_scale(field, &c, t));
        }
    }
    if residual.is_empty() {
        Some(combo)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, PrimeField, Rationals};

    fn q(n: i64) -> num_rational::BigRational {
        Rationals.from_i64(n)
    }

    #[test]
    fn rank_and_kernel() {
        let f = Rationals;
        // [[1,2,3],[2,4,6]] has rank 1, kernel dim 2
        let m = Mat::from_triplets(
            &f,
            2,
            3,
            vec![(0, 0, q(1)), (0, 1, q(2)), (0, 2, q(3)), (1, 0, q(2)), (1, 1, q(4)), (1, 2, q(6))],
        );
        assert_eq!(rank(&f, &m), 1);
        let ker = kernel_basis(&f, &m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(&f, v).is_empty());
        }
    }

    #[test]
    fn solve_membership() {
        let f = Rationals;
        let m = Mat::from_triplets(&f, 3, 2, vec![(0, 0, q(1)), (1, 0, q(1)), (1, 1, q(1)), (2, 1, q(2))]);
        // b = col0 + 3*col1
        let b = vec![(0, q(1)), (1, q(4)), (2, q(6))];
        let x = solve(&f, &m, &b).expect("solvable");
        assert_eq!(m.apply(&f, &x), normalize_vec(&f, b));
        // unsolvable target
        let b2 = vec![(0, q(1)), (2, q(1))];
        assert!(solve(&f, &m, &b2).is_none());
    }

    #[test]
    fn transpose_mul_prime_field() {
        let f = PrimeField::new(7).unwrap();
        let a = Mat::from_triplets(&f, 2, 2, vec![(0, 0, 3), (0, 1, 5), (1, 1, 2)]);
        let b = Mat::from_triplets(&f, 2, 2, vec![(0, 0, 4), (1, 0, 1), (1, 1, 6)]);
        let ab = a.mul_mat(&f, &b);
        // [[3,5],[0,2]] * [[4,0],[1,6]] = [[17,30],[2,12]] = [[3,2],[2,5]] mod 7
        assert_eq!(ab.entry(&f, 0, 0), 3);
        assert_eq!(ab.entry(&f, 0, 1), 2);
        assert_eq!(ab.entry(&f, 1, 0), 2);
        assert_eq!(ab.entry(&f, 1, 1), 5);
        assert_eq!(a.transpose().entry(&f, 1, 0), 5);
    }

    #[test]
    fn rref_coset_reduction() {
        let f = Rationals;
        let rows = vec![vec![(0, q(1)), (1, q(1))], vec![(1, q(2))]];
        let r = rref_rows(&f, rows, 3);
        assert_eq!(r.rank, 2);
        assert!(r.contains(&f, &vec![(0, q(3)), (1, q(5))]));
        let red = r.reduce(&f, &vec![(0, q(1)), (2, q(1))]);
        assert_eq!(red, vec![(2, q(1))]);
    }
}
