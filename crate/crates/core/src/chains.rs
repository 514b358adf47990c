//! The cellular chain complex of `cell(n, w)` over F2.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{F2Matrix, Reduction};
use crate::symbols::{enumerate_keys, ComplexParams, Symbol};

/// Default memory budget: 4 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// Resource limits for building a complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub memory_bytes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            memory_bytes: DEFAULT_MEMORY_BUDGET,
        }
    }
}

/// Estimated peak bytes for dimension `d`: sorted keys, the boundary matrix
/// and headroom for fill-in during reduction.
pub fn estimate_bytes(params: &ComplexParams, d: usize) -> u64 {
    let cells = params.cell_count(d);
    let faces_per_cell = mean_face_count(params, d);
    let nnz = (cells as f64 * faces_per_cell) as u64;
    cells * (8 + 8 + 8) + nnz * 4 * 4
}

fn mean_face_count(params: &ComplexParams, d: usize) -> f64 {
    // average over compositions of sum_b (2^k_b - 2), weighted equally since
    // each composition carries n! cells
    let n = params.n;
    if d >= n {
        return 0.0;
    }
    let mut total = 0f64;
    let mut count = 0f64;
    let mut stack = vec![(n, n - d, 0f64)];
    while let Some((rest, parts, acc)) = stack.pop() {
        if parts == 0 {
            if rest == 0 {
                total += acc;
                count += 1.0;
            }
            continue;
        }
        for k in 1..=params.w.min(rest) {
            stack.push((rest - k, parts - 1, acc + ((1u64 << k) - 2) as f64));
        }
    }
    if count == 0.0 {
        0.0
    } else {
        total / count
    }
}

/// A chain of fixed dimension over F2, as a sorted list of cell indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainVector {
    pub dimension: usize,
    pub support: Vec<u32>,
}

impl ChainVector {
    pub fn new(dimension: usize, mut support: Vec<u32>) -> Self {
        support.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(support.len());
        for idx in support {
            if out.last() == Some(&idx) {
                out.pop();
            } else {
                out.push(idx);
            }
        }
        Self {
            dimension,
            support: out,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }
}

/// Cells per dimension and boundary matrices of `cell(n, w)` over F2.
pub struct ChainComplexF2 {
    params: ComplexParams,
    cells: Vec<Vec<u64>>,
    /// `boundaries[d]` is the boundary from dimension `d` to `d - 1`; entry 0 is empty.
    boundaries: Vec<F2Matrix>,
    reductions: OnceLock<Vec<Reduction>>,
}

impl std::fmt::Debug for ChainComplexF2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChainComplexF2")
            .field("params", &self.params)
            .field("cell_counts", &self.cell_counts())
            .finish()
    }
}

impl ChainComplexF2 {
    /// Builds the complex with the default budget.
    pub fn build(params: ComplexParams) -> Result<Self> {
        Self::build_with_budget(params, Budget::default())
    }

    pub fn build_with_budget(params: ComplexParams, budget: Budget) -> Result<Self> {
        let params = ComplexParams::new(params.n, params.w)?;
        let top = params.top_dimension();
        let mut total = 0u64;
        for d in 0..=top {
            let estimated = estimate_bytes(&params, d);
            total += estimated;
            if total > budget.memory_bytes {
                return Err(Error::ResourceLimit {
                    dimension: d,
                    cells: params.cell_count(d),
                    estimated_bytes: total,
                    budget_bytes: budget.memory_bytes,
                });
            }
        }

        let cells: Vec<Vec<u64>> = (0..=top).map(|d| enumerate_keys(&params, d)).collect();
        let mut boundaries = vec![F2Matrix::zeros(0, cells[0].len())];
        for d in 1..=top {
            boundaries.push(boundary_matrix(params.n, &cells[d], &cells[d - 1]));
        }
        let complex = Self {
            params,
            cells,
            boundaries,
            reductions: OnceLock::new(),
        };
        if let Some(d) = complex.first_nonzero_square() {
            return Err(Error::Construction(format!(
                "boundary squares to a nonzero map from dimension {d} in {params}"
            )));
        }
        Ok(complex)
    }

    pub fn params(&self) -> ComplexParams {
        self.params
    }

    pub fn top_dimension(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn cell(&self, d: usize, index: usize) -> Symbol {
        Symbol::from_key(self.cells[d][index], self.params.n)
    }

    pub fn cells(&self, d: usize) -> impl Iterator<Item = Symbol> + '_ {
        self.cells
            .get(d)
            .into_iter()
            .flatten()
            .map(|&k| Symbol::from_key(k, self.params.n))
    }

    pub fn index_of(&self, s: &Symbol) -> Option<u32> {
        if s.n() != self.params.n {
            return None;
        }
        let d = s.dimension();
        self.cells.get(d)?.binary_search(&s.key()).ok().map(|i| i as u32)
    }

    /// Boundary from dimension `d`; `None` above the top dimension.
    pub fn boundary(&self, d: usize) -> Option<&F2Matrix> {
        self.boundaries.get(d)
    }

    /// Applies the boundary operator to a chain.
    pub fn boundary_of(&self, v: &ChainVector) -> ChainVector {
        if v.dimension == 0 || v.dimension > self.top_dimension() {
            return ChainVector::new(v.dimension.saturating_sub(1), Vec::new());
        }
        let m = &self.boundaries[v.dimension];
        let mut acc = Vec::new();
        for &j in &v.support {
            acc.extend_from_slice(m.column(j as usize));
        }
        ChainVector::new(v.dimension - 1, acc)
    }

    /// Chain from a list of symbols, coefficients reduced mod 2.
    pub fn chain_from_symbols(&self, symbols: &[Symbol]) -> Result<ChainVector> {
        let dim = symbols.first().map_or(0, |s| s.dimension());
        let mut support = Vec::with_capacity(symbols.len());
        for s in symbols {
            if s.dimension() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "symbol {s} has dimension {}, expected {dim}",
                    s.dimension()
                )));
            }
            let idx = self.index_of(s).ok_or_else(|| {
                Error::InvalidParams(format!("{s} is not a cell of {}", self.params))
            })?;
            support.push(idx);
        }
        Ok(ChainVector::new(dim, support))
    }

    /// Lowest `d` with a nonzero composite of boundaries out of `d`.
    pub fn first_nonzero_square(&self) -> Option<usize> {
        (2..=self.top_dimension()).find(|&d| {
            let outer = &self.boundaries[d - 1];
            let inner = &self.boundaries[d];
            (0..inner.cols()).into_par_iter().any(|j| {
                let mut acc = Vec::new();
                for &k in inner.column(j) {
                    acc.extend_from_slice(outer.column(k as usize));
                }
                acc.sort_unstable();
                acc.chunks(2).any(|c| c.len() == 1 || c[0] != c[1])
            })
        })
    }

    /// Column reductions of every boundary, computed once. Reductions run
    /// from the top dimension down; a column whose cell is the pivot row of a
    /// reduced column one dimension up is skipped since it reduces to zero.
    fn reductions(&self) -> &[Reduction] {
        self.reductions.get_or_init(|| {
            let top = self.top_dimension();
            let mut out: Vec<Reduction> = (0..=top + 1)
                .map(|d| Reduction::new(self.cells.get(d.wrapping_sub(1)).map_or(0, Vec::len)))
                .collect();
            out[0] = Reduction::new(0);
            let mut cleared: Vec<u32> = Vec::new();
            for d in (1..=top).rev() {
                let mut red = Reduction::new(self.cells[d - 1].len());
                red.reduce_matrix(&self.boundaries[d], &cleared);
                cleared = red.pivot_rows().collect();
                cleared.sort_unstable();
                out[d] = red;
            }
            out
        })
    }

    /// Rank of the boundary out of dimension `d` (zero outside `1..=top`).
    pub fn boundary_rank(&self, d: usize) -> usize {
        if d == 0 || d > self.top_dimension() {
            0
        } else {
            self.reductions()[d].rank()
        }
    }

    /// Betti numbers over F2, which equal the rational ones here since the
    /// integral homology is free.
    pub fn betti(&self) -> Vec<usize> {
        (0..=self.top_dimension())
            .map(|d| self.cells[d].len() - self.boundary_rank(d) - self.boundary_rank(d + 1))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.cell_counts())
    }

    /// Whether the given cycles are linearly independent in homology.
    pub fn classes_independent(&self, cycles: &[ChainVector]) -> Result<bool> {
        let Some(first) = cycles.first() else {
            return Ok(true);
        };
        let d = first.dimension;
        for (index, c) in cycles.iter().enumerate() {
            if c.dimension != d {
                return Err(Error::ChainDimension {
                    index,
                    expected: d,
                    found: c.dimension,
                });
            }
            if d > self.top_dimension()
                || c.support.iter().any(|&i| i as usize >= self.cells[d].len())
            {
                return Err(Error::InvalidParams(format!(
                    "chain vector {index} has indices outside dimension {d}"
                )));
            }
            if !self.boundary_of(c).is_zero() {
                return Err(Error::NotACycle { index });
            }
        }
        let empty = Reduction::new(self.cells[d].len());
        let base = self.reductions().get(d + 1).unwrap_or(&empty);
        let mut extra = Reduction::new(self.cells[d].len());
        for c in cycles {
            let rem = base_then_extra(base, &extra, &c.support);
            if rem.is_empty() {
                return Ok(false);
            }
            extra.insert(&rem);
        }
        Ok(true)
    }
}

/// Reduces against `base`, then `extra`, alternating until neither owns the low.
fn base_then_extra(base: &Reduction, extra: &Reduction, col: &[u32]) -> Vec<u32> {
    let mut cur = col.to_vec();
    loop {
        let a = base.reduce(&cur);
        let b = extra.reduce(&a);
        if b == cur || b.is_empty() {
            return b;
        }
        cur = b;
    }
}

pub(crate) fn alternating_sum(xs: &[usize]) -> i64 {
    xs.iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

fn boundary_matrix(n: usize, cols: &[u64], rows: &[u64]) -> F2Matrix {
    let columns: Vec<Vec<u32>> = cols
        .par_iter()
        .map(|&key| {
            let mut col = Vec::new();
            Symbol::from_key(key, n).for_each_face(|face| {
                let idx = rows
                    .binary_search(&face.key())
                    .expect("face of a cell lies in the complex");
                col.push(idx as u32);
            });
            col.sort_unstable();
            // each deshuffle yields a distinct face; cancel defensively if not
            let mut out: Vec<u32> = Vec::with_capacity(col.len());
            for idx in col {
                if out.last() == Some(&idx) {
                    out.pop();
                } else {
                    out.push(idx);
                }
            }
            out
        })
        .collect();
    let mut col_ptr = Vec::with_capacity(columns.len() + 1);
    col_ptr.push(0);
    let mut row_idx = Vec::with_capacity(columns.iter().map(Vec::len).sum());
    for c in &columns {
        row_idx.extend_from_slice(c);
        col_ptr.push(row_idx.len());
    }
    F2Matrix::from_raw(rows.len(), col_ptr, row_idx)
}

/// Betti numbers of `cell(n, w)` with the default budget.
pub fn betti(params: ComplexParams) -> Result<Vec<usize>> {
    Ok(ChainComplexF2::build(params)?.betti())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::dense_rank;

    fn complex(n: usize, w: usize) -> ChainComplexF2 {
        ChainComplexF2::build(ComplexParams::new(n, w).unwrap()).unwrap()
    }

    fn chain(c: &ChainComplexF2, syms: &[&str]) -> ChainVector {
        let syms: Vec<Symbol> = syms.iter().map(|s| s.parse().unwrap()).collect();
        c.chain_from_symbols(&syms).unwrap()
    }

    #[test]
    fn cell_counts_small() {
        assert_eq!(complex(3, 2).cell_counts(), vec![6, 12]);
        assert_eq!(complex(3, 3).cell_counts(), vec![6, 12, 6]);
        let one = complex(1, 1);
        assert_eq!(one.cell_counts(), vec![1]);
        assert_eq!(one.cell(0, 0).to_string(), "1");
    }

    #[test]
    fn betti_small() {
        assert_eq!(complex(3, 3).betti(), vec![1, 3, 2]);
        assert_eq!(complex(3, 2).betti(), vec![1, 7]);
        assert_eq!(complex(1, 4).betti(), vec![1]);
        assert_eq!(complex(3, 2).euler_characteristic(), -6);
    }

    #[test]
    fn rank_of_first_boundary() {
        let c = complex(3, 2);
        let d1 = c.boundary(1).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (6, 12));
        assert_eq!(d1.rank(), 5);
        assert_eq!(dense_rank(d1), 5);
    }

    #[test]
    fn independence_examples() {
        let c = complex(3, 2);
        let a = chain(&c, &["31|2", "13|2"]);
        let b = chain(&c, &["21|3", "12|3"]);
        assert!(c.classes_independent(&[a.clone(), b]).unwrap());
        assert!(!c.classes_independent(&[a.clone(), a]).unwrap());

        let c3 = complex(3, 3);
        let top = c3.cell(2, 0);
        let bd = c3.boundary_of(&c3.chain_from_symbols(&[top]).unwrap());
        assert!(!bd.is_zero());
        assert!(!c3.classes_independent(&[bd]).unwrap());
    }

    #[test]
    fn non_cycle_is_rejected() {
        let c = complex(3, 2);
        let v = chain(&c, &["21|3"]);
        assert_eq!(
            c.classes_independent(&[v]),
            Err(Error::NotACycle { index: 0 })
        );
    }

    #[test]
    fn budget_is_enforced() {
        let p = ComplexParams::new(6, 3).unwrap();
        let err = ChainComplexF2::build_with_budget(p, Budget { memory_bytes: 1000 }).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { dimension: 0, cells: 720, .. }));
    }
}
