//! Sparse Gaussian elimination over F_p.
//!
//! Vectors are canonical sorted `(index, scalar)` lists with no zero entries;
//! matrices hold one such list per row. Elimination runs in two phases: a
//! fill-in-avoiding phase that always pivots on the sparsest remaining column,
//! then a cheap canonicalization of the surviving independent rows into the
//! (unique) reduced row-echelon form, so downstream consumers see canonical
//! output while the heavy arithmetic benefits from the sparsity heuristic.

use crate::fp::Fp;
use crate::{Error, Result};

/// Sorted sparse vector: strictly increasing indices, values in `1..p`.
pub type SparseVec = Vec<(usize, u32)>;

/// Scales `v` by the nonzero scalar `c`.
pub fn vec_scale(fp: Fp, v: &SparseVec, c: u32) -> SparseVec {
    v.iter().map(|&(i, a)| (i, fp.mul(a, c))).collect()
}

/// Computes `u + c·v` as sparse vectors.
pub fn vec_axpy(fp: Fp, u: &SparseVec, c: u32, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::with_capacity(u.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < v.len() {
        let ui = u.get(i).copied();
        let vj = v.get(j).copied();
        match (ui, vj) {
            (Some((iu, a)), Some((iv, b))) if iu == iv => {
                let s = fp.add(a, fp.mul(c, b));
                if s != 0 {
                    out.push((iu, s));
                }
                i += 1;
                j += 1;
            }
            (Some((iu, a)), Some((iv, _))) if iu < iv => {
                out.push((iu, a));
                i += 1;
            }
            (Some(_), Some((iv, b))) => {
                let s = fp.mul(c, b);
                if s != 0 {
                    out.push((iv, s));
                }
                j += 1;
            }
            (Some((iu, a)), None) => {
                out.push((iu, a));
                i += 1;
            }
            (None, Some((iv, b))) => {
                let s = fp.mul(c, b);
                if s != 0 {
                    out.push((iv, s));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn vec_get(v: &SparseVec, idx: usize) -> u32 {
    match v.binary_search_by_key(&idx, |&(i, _)| i) {
        Ok(k) => v[k].1,
        Err(_) => 0,
    }
}

/// A sparse matrix over F_p with explicit shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions,
    /// explicit zeros, and out-of-range indices are rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: &[(usize, usize, u32)],
        fp: Fp,
    ) -> Result<SparseMatrix> {
        let mut m = SparseMatrix::zero(rows, cols);
        for &(r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfRange(r, c));
            }
            if v % fp.p() == 0 {
                return Err(Error::ZeroEntry(r, c));
            }
            m.data[r].push((c, v % fp.p()));
        }
        for (r, row) in m.data.iter_mut().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(Error::DuplicateEntry(r, pair[0].0));
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from per-row sparse vectors (already canonical).
    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> SparseMatrix {
        SparseMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut data = vec![SparseVec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for &(c, v) in row {
                data[c].push((r, v));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Matrix–vector product `M v` (v indexed by columns).
    pub fn apply(&self, fp: Fp, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = 0u32;
            for &(c, a) in row {
                acc = fp.add(acc, fp.mul(a, vec_get(v, c)));
            }
            if acc != 0 {
                out.push((r, acc));
            }
        }
        out
    }

    /// Row-vector–matrix product `u M` (u indexed by rows).
    pub fn apply_left(&self, fp: Fp, u: &SparseVec) -> SparseVec {
        let mut dense = vec![0u32; self.cols];
        for &(r, a) in u {
            for &(c, b) in &self.data[r] {
                dense[c] = fp.add(dense[c], fp.mul(a, b));
            }
        }
        dense
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v != 0)
            .collect()
    }
}

/// Result of Gaussian elimination: the canonical reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// RREF rows, sorted by pivot column; exactly `rank` rows.
    pub matrix: SparseMatrix,
    /// Pivot columns in increasing order.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Eliminates `m`, pivoting on the sparsest live column at each step, then
/// canonicalizes to reduced row-echelon form.
pub fn row_reduce(m: &SparseMatrix, fp: Fp) -> Reduction {
    let mut work: Vec<SparseVec> = m.data.clone();
    let mut is_pivot_row = vec![false; work.len()];

    loop {
        // Count live-column occupancy over non-pivot rows.
        let mut count = vec![0usize; m.cols];
        for (r, row) in work.iter().enumerate() {
            if is_pivot_row[r] {
                continue;
            }
            for &(c, _) in row {
                count[c] += 1;
            }
        }
        let Some(col) = (0..m.cols).filter(|&c| count[c] > 0).min_by_key(|&c| (count[c], c))
        else {
            break;
        };
        // Sparsest candidate row wins; ties go to the lowest index.
        let prow = (0..work.len())
            .filter(|&r| !is_pivot_row[r] && vec_get(&work[r], col) != 0)
            .min_by_key(|&r| (work[r].len(), r))
            .expect("column count was positive");
        let inv = fp.inv(vec_get(&work[prow], col));
        work[prow] = vec_scale(fp, &work[prow], inv);
        let pivot_row = work[prow].clone();
        for (r, row) in work.iter_mut().enumerate() {
            if r == prow {
                continue;
            }
            let a = vec_get(row, col);
            if a != 0 {
                *row = vec_axpy(fp, row, fp.neg(a), &pivot_row);
            }
        }
        is_pivot_row[prow] = true;
    }

    // Canonicalization: the surviving rows are independent and span the row
    // space; a leftmost-pivot Jordan pass over just those rows yields the
    // unique RREF.
    let mut rows: Vec<SparseVec> = work
        .into_iter()
        .zip(is_pivot_row)
        .filter(|(_, p)| *p)
        .map(|(r, _)| r)
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..m.cols {
        let Some(r) = (next..rows.len()).find(|&r| vec_get(&rows[r], col) != 0) else {
            continue;
        };
        rows.swap(next, r);
        let inv = fp.inv(vec_get(&rows[next], col));
        rows[next] = vec_scale(fp, &rows[next], inv);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next {
                continue;
            }
            let a = vec_get(row, col);
            if a != 0 {
                *row = vec_axpy(fp, row, fp.neg(a), &pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    Reduction { rank: pivots.len(), matrix: SparseMatrix::from_rows(m.cols, rows), pivots }
}

pub fn rank(m: &SparseMatrix, fp: Fp) -> usize {
    row_reduce(m, fp).rank
}

/// Solve `Σ x_j · columns[j] = target` in F_p^rows. Returns None when the
/// target is outside the column span; free variables are set to zero, so the
/// solution is unique exactly when the columns are linearly independent.
pub fn solve_columns(
    fp: Fp,
    rows: usize,
    columns: &[SparseVec],
    target: &SparseVec,
) -> Option<Vec<u32>> {
    let n = columns.len();
    let mut triplets = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        for &(r, v) in col {
            triplets.push((r, c, v));
        }
    }
    for &(r, v) in target {
        triplets.push((r, n, v));
    }
    let m = SparseMatrix::from_triplets(rows, n + 1, &triplets, fp).ok()?;
    let red = row_reduce(&m, fp);
    let mut x = vec![0u32; n];
    for (row_i, &pc) in red.pivots.iter().enumerate() {
        if pc == n {
            return None;
        }
        x[pc] = vec_get(red.matrix.row(row_i), n);
    }
    Some(x)
}

/// Basis of the right kernel `{v : M v = 0}`, one canonical vector per free
/// column, ordered by free column index.
pub fn kernel_basis(m: &SparseMatrix, fp: Fp) -> Vec<SparseVec> {
    let red = row_reduce(m, fp);
    let mut is_pivot = vec![false; m.cols];
    for &c in &red.pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = SparseVec::new();
        for (r, &pc) in red.pivots.iter().enumerate() {
            let a = vec_get(red.matrix.row(r), free);
            if a != 0 {
                v.push((pc, fp.neg(a)));
            }
        }
        v.push((free, 1));
        v.sort_by_key(|&(i, _)| i);
        basis.push(v);
    }
    basis
}

/// Incremental echelon reducer: rows with distinct leading indices, leading
/// coefficient 1.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Fully reduces `v` against the stored rows.
    pub fn reduce(&self, fp: Fp, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        loop {
            let Some(&(lead, coef)) = cur.first() else {
                return cur;
            };
            match self.rows.iter().find(|r| r[0].0 == lead) {
                Some(row) => cur = vec_axpy(fp, &cur, fp.neg(coef), row),
                None => return cur,
            }
        }
    }

    /// Reduces and, if the residue is nonzero, inserts it (normalized to a
    /// leading 1). Returns the inserted residue, or None if `v` was dependent.
    pub fn insert(&mut self, fp: Fp, v: &SparseVec) -> Option<SparseVec> {
        let r = self.reduce(fp, v);
        let &(_, lead_coef) = r.first()?;
        let normalized = vec_scale(fp, &r, fp.inv(lead_coef));
        self.rows.push(normalized.clone());
        self.rows.sort_by_key(|r| r[0].0);
        Some(normalized)
    }
}

/// A presented subquotient span(Z)/span(B) of an ambient coordinate space.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ambient: usize,
    pub cycle_rank: usize,
    pub boundary_rank: usize,
    /// Canonical representatives of a basis of the quotient: each is the
    /// echelon residue of the first cycle generator producing a new class.
    pub reps: Vec<SparseVec>,
}

impl Subquotient {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// Forms span(Z)/span(B), verifying span(B) ⊆ span(Z).
pub fn subquotient(
    ambient: usize,
    cycles: &[SparseVec],
    boundaries: &[SparseVec],
    fp: Fp,
) -> Result<Subquotient> {
    let mut ez = Echelon::new();
    for z in cycles {
        ez.insert(fp, z);
    }
    for (i, b) in boundaries.iter().enumerate() {
        if !ez.reduce(fp, b).is_empty() {
            return Err(Error::NotInSpan(i));
        }
    }
    let mut eb = Echelon::new();
    for b in boundaries {
        eb.insert(fp, b);
    }
    let boundary_rank = eb.rank();
    let mut reps = Vec::new();
    let mut combined = eb;
    for z in cycles {
        if let Some(residue) = combined.insert(fp, z) {
            reps.push(residue);
        }
    }
    debug_assert_eq!(ez.rank(), boundary_rank + reps.len());
    Ok(Subquotient { ambient, cycle_rank: ez.rank(), boundary_rank, reps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn singular_two_by_two_over_f3() {
        // det [[1,2],[2,1]] = -3 ≡ 0 mod 3, so the rank drops to 1.
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1)], f(3))
            .unwrap();
        let red = row_reduce(&m, f(3));
        assert_eq!(red.rank, 1);
        assert_eq!(red.pivots, vec![0]);
        assert_eq!(red.matrix.row(0), &vec![(0, 1), (1, 2)]);
        // Same matrix over F_5 is invertible.
        let m5 = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1)], f(5))
            .unwrap();
        assert_eq!(rank(&m5, f(5)), 2);
    }

    #[test]
    fn kernel_of_row_vector_over_f2() {
        let m = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1), (0, 1, 1)], f(2)).unwrap();
        assert_eq!(kernel_basis(&m, f(2)), vec![vec![(0, 1), (1, 1)]]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1)], f(3))
            .unwrap();
        let ker = kernel_basis(&m, f(3));
        assert_eq!(ker, vec![vec![(0, 1), (1, 1)]]);
        for v in &ker {
            assert!(m.apply(f(3), v).is_empty());
        }
    }

    #[test]
    fn constructor_validation() {
        let e = SparseMatrix::from_triplets(1, 1, &[(0, 0, 1), (0, 0, 1)], f(2));
        assert_eq!(e.unwrap_err(), Error::DuplicateEntry(0, 0));
        let e = SparseMatrix::from_triplets(1, 1, &[(0, 1, 1)], f(2));
        assert_eq!(e.unwrap_err(), Error::IndexOutOfRange(0, 1));
        let e = SparseMatrix::from_triplets(1, 1, &[(0, 0, 2)], f(2));
        assert_eq!(e.unwrap_err(), Error::ZeroEntry(0, 0));
    }

    #[test]
    fn rref_is_canonical() {
        // Rows in scrambled order, dependent row included.
        let m = SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2), (0, 1, 2), (0, 2, 4), (1, 1, 1), (1, 2, 3), (2, 0, 1), (2, 1, 1), (2, 2, 2)],
            f(5),
        )
        .unwrap();
        let red = row_reduce(&m, f(5));
        assert_eq!(red.rank, 2);
        assert_eq!(red.pivots, vec![0, 1]);
        // Unique RREF: x0 + 4·x2, x1 + 3·x2.
        assert_eq!(red.matrix.row(0), &vec![(0, 1), (2, 4)]);
        assert_eq!(red.matrix.row(1), &vec![(1, 1), (2, 3)]);
    }

    #[test]
    fn subquotient_basics() {
        let fp = f(2);
        let e0 = vec![(0, 1)];
        let e1 = vec![(1, 1)];
        let sum = vec![(0, 1), (1, 1)];
        let sq = subquotient(3, &[e0.clone(), e1.clone()], &[sum], fp).unwrap();
        assert_eq!(sq.dim(), 1);
        assert_eq!(sq.cycle_rank, 2);
        assert_eq!(sq.boundary_rank, 1);
        assert_eq!(sq.reps, vec![vec![(1, 1)]]);
        let err = subquotient(3, &[e0], &[e1], fp).unwrap_err();
        assert_eq!(err, Error::NotInSpan(0));
    }

    #[test]
    fn solving_in_a_column_span() {
        let fp = f(5);
        let cols = vec![vec![(0, 1), (1, 2)], vec![(1, 1), (2, 3)]];
        // target = 2·c0 + 4·c1
        let target = vec![(0, 2), (1, 3), (2, 2)];
        assert_eq!(solve_columns(fp, 3, &cols, &target), Some(vec![2, 4]));
        assert_eq!(solve_columns(fp, 3, &cols, &vec![(0, 1), (2, 1)]), None);
        assert_eq!(solve_columns(fp, 3, &[], &vec![]), Some(vec![]));
        assert_eq!(solve_columns(fp, 3, &[], &vec![(1, 1)]), None);
    }

    #[test]
    fn transpose_and_left_apply() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1), (0, 2, 2), (1, 1, 1)], f(3)).unwrap();
        let t = m.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.cols(), 2);
        assert_eq!(m.apply_left(f(3), &vec![(0, 1), (1, 2)]), vec![(0, 1), (1, 2), (2, 2)]);
        assert_eq!(t.apply(f(3), &vec![(0, 1), (1, 2)]), vec![(0, 1), (1, 2), (2, 2)]);
    }
}
