//! Linear algebra over the two-element field.
//!
//! Boundary matrices are stored column-compressed with sorted row indices.
//! Rank is computed by left-to-right column reduction on the lowest nonzero
//! ("low") entry. A [`Reduction`] keeps its reduced pivot columns so further
//! vectors can be tested against the column space afterwards.

use std::collections::HashMap;

/// Sparse matrix over F2 in compressed-column form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            rows: size,
            col_ptr: (0..=size).collect(),
            row_idx: (0..size as u32).collect(),
        }
    }

    /// Builds a matrix from columns given as row-index lists. Repeated
    /// indices cancel in pairs.
    pub fn from_columns<C: AsRef<[u32]>>(rows: usize, columns: &[C]) -> Self {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        let mut scratch = Vec::new();
        for col in columns {
            scratch.clear();
            scratch.extend_from_slice(col.as_ref());
            normalize_mod2(&mut scratch);
            debug_assert!(scratch.iter().all(|&r| (r as usize) < rows));
            row_idx.extend_from_slice(&scratch);
            col_ptr.push(row_idx.len());
        }
        Self {
            rows,
            col_ptr,
            row_idx,
        }
    }

    /// Builds from raw compressed-column arrays whose columns are already
    /// sorted and free of duplicates.
    pub(crate) fn from_raw(rows: usize, col_ptr: Vec<usize>, row_idx: Vec<u32>) -> Self {
        Self {
            rows,
            col_ptr,
            row_idx,
        }
    }

    /// Dense constructor, rows of booleans.
    pub fn from_dense(rows: &[Vec<bool>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let columns: Vec<Vec<u32>> = (0..ncols)
            .map(|j| (0..nrows).filter(|&i| rows[i][j]).map(|i| i as u32).collect())
            .collect();
        Self::from_columns(nrows, &columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.column(j).binary_search(&(i as u32)).is_ok()
    }

    /// `self * other` over F2.
    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols(), other.rows(), "shape mismatch in product");
        let columns: Vec<Vec<u32>> = (0..other.cols())
            .map(|j| {
                let mut acc = Vec::new();
                for &k in other.column(j) {
                    acc.extend_from_slice(self.column(k as usize));
                }
                acc
            })
            .collect();
        F2Matrix::from_columns(self.rows, &columns)
    }

    pub fn is_zero(&self) -> bool {
        self.row_idx.is_empty()
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.col_ptr.len() * std::mem::size_of::<usize>() + self.row_idx.len() * 4
    }

    /// Rank over F2.
    pub fn rank(&self) -> usize {
        Reduction::new(self.rows).reduce_matrix(self, &[])
    }
}

/// Sorts and cancels repeated indices in pairs.
fn normalize_mod2(v: &mut Vec<u32>) {
    v.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < v.len() {
        if i + 1 < v.len() && v[i] == v[i + 1] {
            i += 2;
        } else {
            v[out] = v[i];
            out += 1;
            i += 1;
        }
    }
    v.truncate(out);
}

/// Symmetric difference of two sorted index lists into `out`.
fn xor_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Column reduction state: for each pivot row, the reduced column owning it.
#[derive(Debug, Clone, Default)]
pub struct Reduction {
    rows: usize,
    pivot_of_row: HashMap<u32, usize>,
    reduced: Vec<Vec<u32>>,
}

impl Reduction {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            pivot_of_row: HashMap::new(),
            reduced: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Row indices owned as pivots.
    pub fn pivot_rows(&self) -> impl Iterator<Item = u32> + '_ {
        self.reduced.iter().map(|c| *c.last().unwrap())
    }

    /// Reduces `col` against the stored pivots. Returns the remainder; empty
    /// means the column lies in the span.
    pub fn reduce(&self, col: &[u32]) -> Vec<u32> {
        let mut cur: Vec<u32> = col.to_vec();
        let mut scratch = Vec::new();
        while let Some(&low) = cur.last() {
            match self.pivot_of_row.get(&low) {
                Some(&p) => {
                    xor_into(&cur, &self.reduced[p], &mut scratch);
                    std::mem::swap(&mut cur, &mut scratch);
                }
                None => break,
            }
        }
        cur
    }

    /// Reduces `col` and, if independent, stores it as a new pivot column.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, col: &[u32]) -> bool {
        let cur = self.reduce(col);
        match cur.last() {
            Some(&low) => {
                debug_assert!((low as usize) < self.rows);
                self.pivot_of_row.insert(low, self.reduced.len());
                self.reduced.push(cur);
                true
            }
            None => false,
        }
    }

    /// Inserts every column of `m` except those listed in `skip` (sorted).
    /// Returns the rank contributed.
    pub fn reduce_matrix(&mut self, m: &F2Matrix, skip: &[u32]) -> usize {
        let before = self.rank();
        let mut skip = skip.iter().peekable();
        for j in 0..m.cols() {
            if skip.peek().is_some_and(|&&s| s as usize == j) {
                skip.next();
                continue;
            }
            self.insert(m.column(j));
        }
        self.rank() - before
    }
}

/// Dense packed-bit Gaussian elimination. Independent of the sparse path; used
/// for small matrices and as a cross-check.
pub fn dense_rank(m: &F2Matrix) -> usize {
    let words = m.rows().div_ceil(64);
    let mut cols: Vec<Vec<u64>> = (0..m.cols())
        .map(|j| {
            let mut bits = vec![0u64; words];
            for &r in m.column(j) {
                bits[r as usize / 64] ^= 1 << (r % 64);
            }
            bits
        })
        .collect();
    let mut rank = 0;
    for row in 0..m.rows() {
        let (w, b) = (row / 64, row % 64);
        let Some(p) = (rank..cols.len()).find(|&j| cols[j][w] >> b & 1 == 1) else {
            continue;
        };
        cols.swap(rank, p);
        let pivot = cols[rank].clone();
        for col in cols.iter_mut().skip(rank + 1) {
            if col[w] >> b & 1 == 1 {
                for (x, y) in col.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_ranks() {
        assert_eq!(F2Matrix::zeros(4, 7).rank(), 0);
        assert_eq!(F2Matrix::zeros(0, 0).rank(), 0);
        assert_eq!(F2Matrix::identity(9).rank(), 9);
    }

    #[test]
    fn duplicate_entries_cancel() {
        let m = F2Matrix::from_columns(3, &[vec![0, 0, 1], vec![2, 1, 2]]);
        assert_eq!(m.column(0), &[1]);
        assert_eq!(m.column(1), &[1]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn reduction_detects_span() {
        let mut red = Reduction::new(4);
        assert!(red.insert(&[0, 1]));
        assert!(red.insert(&[1, 2]));
        assert!(!red.insert(&[0, 2]));
        assert!(red.reduce(&[0, 2]).is_empty());
        assert!(!red.reduce(&[3]).is_empty());
    }

    #[test]
    fn product() {
        let a = F2Matrix::from_dense(&[vec![true, true], vec![false, true]]);
        let sq = a.mul(&a);
        assert_eq!(sq, F2Matrix::identity(2));
    }

    fn arb_matrix() -> impl Strategy<Value = F2Matrix> {
        (1usize..20, 1usize..20).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0..r as u32, 0..6), c)
                .prop_map(move |cols| F2Matrix::from_columns(r, &cols))
        })
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), dense_rank(&m));
        }
    }
}
