//! Sparse exact rank computation.
//!
//! Matrices reduced through the regular representation of a finite quotient
//! are block-permutation shaped: a handful of nonzeros per row regardless of
//! size. Elimination with a Markowitz-style pivot rule (fewest-nonzero row,
//! then fewest-nonzero column) keeps fill-in manageable, and field arithmetic
//! stays exact (rationals over Q, modular words over F_ell).

use super::field::FieldCtx;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

/// Sparse integer matrix; per-row sorted (col, value) pairs, zero values absent.
#[derive(Debug, Clone)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: vec![Vec::new(); rows] }
    }

    /// Adds v at (r, c), merging with an existing entry.
    pub fn add_entry(&mut self, r: usize, c: usize, v: i64) {
        if v == 0 {
            return;
        }
        let row = &mut self.entries[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => {
                row[i].1 += v;
                if row[i].1 == 0 {
                    row.remove(i);
                }
            }
            Err(i) => row.insert(i, (c, v)),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(|r| r.len()).sum()
    }

    pub fn to_dense(&self) -> super::dense::IntMatrix {
        let mut m = super::dense::IntMatrix::zeros(self.rows, self.cols);
        for (r, row) in self.entries.iter().enumerate() {
            for &(c, v) in row {
                m.set(r, c, BigInt::from(v));
            }
        }
        m
    }

    /// Exact integer product, for verifying that boundary maps compose to zero.
    pub fn mul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = SparseIntMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.entries.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
            for &(k, v) in row {
                for &(c, w) in &other.entries[k] {
                    *acc.entry(c).or_insert(0) += v * w;
                }
            }
            out.entries[r] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.is_empty())
    }
}

/// Sparse rank over an arbitrary field context by structured elimination.
pub fn sparse_rank<F: FieldCtx>(f: &F, m: &SparseIntMatrix) -> usize {
    // materialize rows in field elements
    let mut rows: Vec<Vec<(usize, F::Elem)>> = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(c, v)| (c, f.from_i64(v)))
                .filter(|(_, v)| !f.is_zero(v))
                .collect()
        })
        .collect();
    let ncols = m.cols;
    let mut col_count = vec![0usize; ncols];
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_count[c] += 1;
            col_rows[c].push(r);
        }
    }
    let mut row_alive = vec![true; rows.len()];
    let mut col_alive = vec![true; ncols];

    // bucket queue of candidate pivot rows keyed by nnz (lazy entries)
    let max_len = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_len + 2];
    for (r, row) in rows.iter().enumerate() {
        if !row.is_empty() {
            buckets[row.len()].push(r);
        }
    }
    let grow = |buckets: &mut Vec<Vec<usize>>, len: usize| {
        if len >= buckets.len() {
            buckets.resize(len + 1, Vec::new());
        }
    };

    let mut rank = 0usize;
    let mut cursor = 1usize;
    loop {
        // next pivot row: smallest current nnz (lazy bucket check)
        let mut pivot_row = None;
        while cursor < buckets.len() {
            if let Some(r) = buckets[cursor].pop() {
                if row_alive[r] && rows[r].len() == cursor && !rows[r].is_empty() {
                    pivot_row = Some(r);
                    break;
                }
                continue;
            }
            cursor += 1;
        }
        let Some(pr) = pivot_row else { break };

        // pivot column: fewest alive rows among this row's columns
        let (pc, _) = rows[pr]
            .iter()
            .map(|&(c, _)| (c, col_count[c]))
            .min_by_key(|&(_, cnt)| cnt)
            .unwrap();
        debug_assert!(col_alive[pc]);

        let pivot_val = rows[pr]
            .iter()
            .find(|&&(c, _)| c == pc)
            .map(|(_, v)| v.clone())
            .unwrap();
        let pivot_inv = f.inv(&pivot_val);

        // rows to update: alive rows (other than pivot) containing pc;
        // col_rows may hold duplicates from lazy updates, so dedup first
        let mut targets: Vec<usize> =
            col_rows[pc].iter().copied().filter(|&r| r != pr && row_alive[r]).collect();
        targets.sort_unstable();
        targets.dedup();
        targets.retain(|&r| rows[r].binary_search_by_key(&pc, |e| e.0).is_ok());

        // retire pivot row and column
        row_alive[pr] = false;
        col_alive[pc] = false;
        for &(c, _) in &rows[pr] {
            col_count[c] -= 1;
        }
        let pivot_entries: Vec<(usize, F::Elem)> = std::mem::take(&mut rows[pr]);

        for r in targets {
            let lead_idx = rows[r].binary_search_by_key(&pc, |e| e.0).unwrap();
            let lead = rows[r][lead_idx].1.clone();
            let factor = f.mul(&lead, &pivot_inv);
            // row_r -= factor * pivot_row (sorted merge)
            let old = std::mem::take(&mut rows[r]);
            let mut merged: Vec<(usize, F::Elem)> = Vec::with_capacity(old.len() + pivot_entries.len());
            let mut i = 0;
            let mut j = 0;
            while i < old.len() || j < pivot_entries.len() {
                let next = match (old.get(i), pivot_entries.get(j)) {
                    (Some(&(ca, _)), Some(&(cb, _))) => {
                        if ca < cb {
                            let e = old[i].clone();
                            i += 1;
                            Some(e)
                        } else if cb < ca {
                            let t = f.mul(&factor, &pivot_entries[j].1);
                            let e = (cb, f.neg(&t));
                            j += 1;
                            Some(e)
                        } else {
                            let t = f.mul(&factor, &pivot_entries[j].1);
                            let e = (ca, f.sub(&old[i].1, &t));
                            i += 1;
                            j += 1;
                            Some(e)
                        }
                    }
                    (Some(_), None) => {
                        let e = old[i].clone();
                        i += 1;
                        Some(e)
                    }
                    (None, Some(&(cb, _))) => {
                        let t = f.mul(&factor, &pivot_entries[j].1);
                        let e = (cb, f.neg(&t));
                        j += 1;
                        Some(e)
                    }
                    (None, None) => None,
                };
                if let Some((c, v)) = next {
                    if !f.is_zero(&v) {
                        merged.push((c, v));
                    }
                }
            }
            // bookkeeping: column counts for removed/added entries
            let mut oi = old.iter().peekable();
            let mut mi = merged.iter().peekable();
            loop {
                match (oi.peek(), mi.peek()) {
                    (Some(&&(ca, _)), Some(&&(cb, _))) => {
                        if ca < cb {
                            col_count[ca] -= 1;
                            oi.next();
                        } else if cb < ca {
                            col_count[cb] += 1;
                            col_rows[cb].push(r);
                            mi.next();
                        } else {
                            oi.next();
                            mi.next();
                        }
                    }
                    (Some(&&(ca, _)), None) => {
                        col_count[ca] -= 1;
                        oi.next();
                    }
                    (None, Some(&&(cb, _))) => {
                        col_count[cb] += 1;
                        col_rows[cb].push(r);
                        mi.next();
                    }
                    (None, None) => break,
                }
            }
            rows[r] = merged;
            if rows[r].is_empty() {
                row_alive[r] = false;
            } else {
                let len = rows[r].len();
                grow(&mut buckets, len);
                buckets[len].push(r);
                if len < cursor {
                    cursor = len;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over Q of a sparse integer matrix.
pub fn rank_q_sparse(m: &SparseIntMatrix) -> usize {
    sparse_rank(&super::field::QCtx, m)
}

/// Rank over F_ell of a sparse integer matrix.
pub fn rank_fp_sparse(m: &SparseIntMatrix, ell: u64) -> usize {
    sparse_rank(&super::field::FpCtx::new(ell), m)
}

/// Exact divisibility check helper for tests: content of the matrix.
pub fn content(m: &SparseIntMatrix) -> BigInt {
    let mut g = BigInt::zero();
    for row in &m.entries {
        for &(_, v) in row {
            g = g.gcd(&BigInt::from(v));
        }
    }
    g
}
