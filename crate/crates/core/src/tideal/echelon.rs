//! Incremental sparse row echelon form over an exact field.
//!
//! The pivot of a row is its least column. Rows are reduced against the
//! current pivots on insertion, so a stored row never contains a column that
//! was already a pivot when it was inserted; [`Echelon::finalize`] completes
//! the back substitution to reduced row echelon form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::scalar::Field;

const NO_PIVOT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow<E> {
    pub cols: Vec<u32>,
    pub vals: Vec<E>,
}

impl<E> SparseRow<E> {
    pub fn empty() -> Self {
        SparseRow {
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &E)> {
        self.cols.iter().copied().zip(self.vals.iter())
    }
}

/// Scratch space for reductions: a dense accumulator plus a min-heap of the
/// touched columns.
pub struct Workspace<E> {
    dense: Vec<E>,
    queued: Vec<bool>,
    heap: BinaryHeap<Reverse<u32>>,
}

impl<E: Clone> Workspace<E> {
    pub fn new(zero: E, ncols: usize) -> Self {
        Workspace {
            dense: vec![zero; ncols],
            queued: vec![false; ncols],
            heap: BinaryHeap::new(),
        }
    }
}

pub struct Echelon<F: Field> {
    field: F,
    ncols: usize,
    pivot_row: Vec<u32>,
    rows: Vec<SparseRow<F::Elem>>,
    finalized: bool,
    work: Workspace<F::Elem>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, ncols: usize) -> Self {
        let zero = field.zero();
        Echelon {
            ncols,
            pivot_row: vec![NO_PIVOT; ncols],
            rows: Vec::new(),
            finalized: true,
            work: Workspace::new(zero, ncols),
            field,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow<F::Elem>] {
        &self.rows
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.pivot_row[col as usize] != NO_PIVOT
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    /// Reduces `input` against the pivots and returns the residue (only
    /// non-pivot columns, ascending). `skip_pivot` leaves one column
    /// untouched, as needed when back-substituting a stored row.
    fn reduce_in(
        field: &F,
        pivot_row: &[u32],
        rows: &[SparseRow<F::Elem>],
        work: &mut Workspace<F::Elem>,
        input: impl IntoIterator<Item = (u32, F::Elem)>,
        skip_pivot: Option<u32>,
    ) -> SparseRow<F::Elem> {
        for (c, v) in input {
            let slot = &mut work.dense[c as usize];
            *slot = field.add(slot, &v);
            if !work.queued[c as usize] {
                work.queued[c as usize] = true;
                work.heap.push(Reverse(c));
            }
        }
        let mut out = SparseRow::empty();
        while let Some(Reverse(c)) = work.heap.pop() {
            let ci = c as usize;
            work.queued[ci] = false;
            if field.is_zero(&work.dense[ci]) {
                continue;
            }
            let v = std::mem::replace(&mut work.dense[ci], field.zero());
            let p = pivot_row[ci];
            if p == NO_PIVOT || Some(c) == skip_pivot {
                out.cols.push(c);
                out.vals.push(v);
                continue;
            }
            let prow = &rows[p as usize];
            for (c2, v2) in prow.cols[1..].iter().zip(&prow.vals[1..]) {
                let i2 = *c2 as usize;
                field.sub_mul_assign(&mut work.dense[i2], &v, v2);
                if !work.queued[i2] {
                    work.queued[i2] = true;
                    work.heap.push(Reverse(*c2));
                }
            }
        }
        out
    }

    pub fn reduce(&mut self, input: impl IntoIterator<Item = (u32, F::Elem)>) -> SparseRow<F::Elem> {
        Self::reduce_in(&self.field, &self.pivot_row, &self.rows, &mut self.work, input, None)
    }

    /// Reduction with caller-owned scratch space, usable through a shared
    /// reference.
    pub fn reduce_with(
        &self,
        work: &mut Workspace<F::Elem>,
        input: impl IntoIterator<Item = (u32, F::Elem)>,
    ) -> SparseRow<F::Elem> {
        Self::reduce_in(&self.field, &self.pivot_row, &self.rows, work, input, None)
    }

    pub fn workspace(&self) -> Workspace<F::Elem> {
        Workspace::new(self.field.zero(), self.ncols)
    }

    /// Reduces and stores the row if independent. Returns whether the rank
    /// grew.
    pub fn insert(&mut self, input: impl IntoIterator<Item = (u32, F::Elem)>) -> bool {
        let mut residue = self.reduce(input);
        if residue.is_empty() {
            return false;
        }
        let inv = self
            .field
            .inv(&residue.vals[0])
            .expect("leading residue entry is nonzero");
        for v in residue.vals.iter_mut() {
            *v = self.field.mul(v, &inv);
        }
        self.pivot_row[residue.cols[0] as usize] = self.rows.len() as u32;
        self.rows.push(residue);
        self.finalized = false;
        true
    }

    /// Back substitution: afterwards every stored row has a unit pivot and no
    /// other pivot column, and rows are sorted by pivot.
    pub fn finalize(&mut self) {
        if self.finalized {
            return;
        }
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&r| Reverse(self.rows[r].cols[0]));
        // descending pivot order: every row a reduction touches is final
        for r in order {
            let row = std::mem::replace(&mut self.rows[r], SparseRow::empty());
            let pivot = row.cols[0];
            let reduced = Self::reduce_in(
                &self.field,
                &self.pivot_row,
                &self.rows,
                &mut self.work,
                row.cols.into_iter().zip(row.vals),
                Some(pivot),
            );
            debug_assert_eq!(reduced.cols.first(), Some(&pivot));
            self.rows[r] = reduced;
        }
        self.rows.sort_unstable_by_key(|r| r.cols[0]);
        for (i, row) in self.rows.iter().enumerate() {
            self.pivot_row[row.cols[0] as usize] = i as u32;
        }
        self.finalized = true;
    }

    /// Rebuilds from rows already in reduced echelon form (cache loading).
    pub fn from_reduced_rows(field: F, ncols: usize, rows: Vec<SparseRow<F::Elem>>) -> Self {
        let mut e = Echelon::new(field, ncols);
        for (i, row) in rows.iter().enumerate() {
            e.pivot_row[row.cols[0] as usize] = i as u32;
        }
        e.rows = rows;
        e.finalized = true;
        e
    }
}

/// Rank of a list of sparse rows, each given as `(column, value)` pairs.
pub fn rank_of<F: Field>(field: F, ncols: usize, rows: &[Vec<(u32, F::Elem)>]) -> usize {
    let mut e = Echelon::new(field, ncols);
    for row in rows {
        e.insert(row.iter().cloned());
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rational, RationalField};
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn small_rational_system() {
        let mut e = Echelon::new(RationalField, 4);
        assert!(e.insert(vec![(1, q(1)), (2, q(1))]));
        assert!(e.insert(vec![(0, q(2)), (1, q(2))]));
        assert!(!e.insert(vec![(0, q(1)), (2, q(-1))]));
        assert!(e.insert(vec![(2, q(3)), (3, q(1))]));
        e.finalize();
        assert_eq!(e.rank(), 3);
        // x0 = -1/3 x3, x1 = 1/3 x3, x2 = -1/3 x3
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(e.rows()[0].cols, vec![0, 3]);
        assert_eq!(e.rows()[0].vals, vec![q(1), third.clone()]);
        assert_eq!(e.rows()[1].vals, vec![q(1), -third.clone()]);
        let res = e.reduce(vec![(0, q(3))]);
        assert_eq!(res.cols, vec![3]);
        assert_eq!(res.vals, vec![q(-1)]);
    }

    fn dense_rank_mod(p: u64, rows: &[Vec<u64>]) -> usize {
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(pr) = (rank..m.len()).find(|&r| !m[r][c].is_multiple_of(p)) else {
                continue;
            };
            m.swap(rank, pr);
            let inv = PrimeField::new(p as u32).inv(&((m[rank][c] % p) as u32)).unwrap() as u64;
            for v in m[rank].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_multiple_of(p) {
                    let f = m[r][c] % p;
                    let pivot_row = m[rank].clone();
                    for (v, w) in m[r].iter_mut().zip(&pivot_row) {
                        *v = (*v + p * p - f * w % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn matches_dense_rank_and_is_reduced(
            rows in prop::collection::vec(prop::collection::vec(0u64..4, 8), 1..12)
        ) {
            let field = PrimeField::new(7);
            let mut e = Echelon::new(field, 8);
            for r in &rows {
                e.insert(r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c as u32, *v as u32)));
            }
            e.finalize();
            prop_assert_eq!(e.rank(), dense_rank_mod(7, &rows));
            for row in e.rows() {
                prop_assert_eq!(row.vals[0], 1);
                for &c in &row.cols[1..] {
                    prop_assert!(!e.is_pivot(c));
                }
            }
            // residues of the inputs vanish; residues are idempotent
            for r in &rows {
                let input: Vec<(u32, u32)> = r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c as u32, *v as u32)).collect();
                prop_assert!(e.reduce(input).is_empty());
            }
            let probe: Vec<(u32, u32)> = (0..8).map(|c| (c, c * 3 % 7)).filter(|e| e.1 != 0).collect();
            let once = e.reduce(probe);
            let twice = e.reduce(once.cols.iter().copied().zip(once.vals.iter().copied()).collect::<Vec<_>>());
            prop_assert_eq!(once, twice);
        }
    }
}
