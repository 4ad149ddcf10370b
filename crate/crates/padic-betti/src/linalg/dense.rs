//! Exact dense integer linear algebra: fraction-free rank, determinants,
//! and Smith normal form over Z.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::FpCtx;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        debug_assert!(rows.iter().all(|x| x.len() == c));
        let data = rows.into_iter().flatten().map(BigInt::from).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * other.get(k, j);
                    out.data[i * other.cols + j] += t;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        out
    }
}

/// Rank over Q by fraction-free (Bareiss) elimination. Division-exact: every
/// division is by the previous pivot and leaves an integer.
pub fn rank_q(m: &IntMatrix) -> usize {
    let mut a = m.data.clone();
    let (rows, cols) = (m.rows, m.cols);
    let at = |a: &Vec<BigInt>, r: usize, c: usize| a[r * cols + c].clone();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut row = 0;
    let mut col = 0;
    while row < rows && col < cols {
        // find a pivot in the submatrix, preferring small magnitude to slow growth
        let mut pivot: Option<(usize, usize)> = None;
        for r in row..rows {
            for c in col..cols {
                if !a[r * cols + c].is_zero() {
                    match &pivot {
                        Some((pr, pc)) if a[pr * cols + pc].magnitude() <= a[r * cols + c].magnitude() => {}
                        _ => pivot = Some((r, c)),
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        if pr != row {
            for c in 0..cols {
                a.swap(pr * cols + c, row * cols + c);
            }
        }
        if pc != col {
            for r in 0..rows {
                a.swap(r * cols + pc, r * cols + col);
            }
        }
        let piv = at(&a, row, col);
        for r in (row + 1)..rows {
            let lead = at(&a, r, col);
            for c in (col + 1)..cols {
                let t = &piv * &a[r * cols + c] - &lead * &a[row * cols + c];
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero());
                a[r * cols + c] = q;
            }
            a[r * cols + col] = BigInt::zero();
        }
        prev = piv;
        rank += 1;
        row += 1;
        col += 1;
    }
    rank
}

/// Determinant by Bareiss elimination.
pub fn det(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.data.clone();
    let mut prev = BigInt::one();
    let mut sign = 1i8;
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let swap = (k + 1..n).find(|&r| !a[r * n + k].is_zero());
            let Some(sr) = swap else { return BigInt::zero() };
            for c in 0..n {
                a.swap(sr * n + c, k * n + c);
            }
            sign = -sign;
        }
        let piv = a[k * n + k].clone();
        for r in (k + 1)..n {
            for c in (k + 1)..n {
                let t = &piv * &a[r * n + c] - &a[r * n + k] * &a[k * n + c];
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero());
                a[r * n + c] = q;
            }
            a[r * n + k] = BigInt::zero();
        }
        prev = piv;
    }
    let d = a[(n - 1) * n + (n - 1)].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Smith normal form over Z. Returns the nonzero invariant factors
/// d_1 | d_2 | ... as positive integers.
///
/// Pivot selection always takes a minimal-magnitude nonzero entry of the
/// remaining submatrix, which keeps intermediate growth tame in practice.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigUint> {
    let mut a = m.data.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut t = 0usize;
    let mut divisors: Vec<BigInt> = Vec::new();
    'outer: while t < rows && t < cols {
        // minimal |nonzero| pivot in the submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !a[r * cols + c].is_zero() {
                    match &pivot {
                        Some((pr, pc))
                            if a[pr * cols + pc].magnitude() <= a[r * cols + c].magnitude() => {}
                        _ => pivot = Some((r, c)),
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        if pr != t {
            for c in 0..cols {
                a.swap(pr * cols + c, t * cols + c);
            }
        }
        if pc != t {
            for r in 0..rows {
                a.swap(r * cols + pc, r * cols + t);
            }
        }
        // reduce column and row by the pivot; restart pivot search on leftovers
        let piv = a[t * cols + t].clone();
        let mut dirty = false;
        for r in (t + 1)..rows {
            if a[r * cols + t].is_zero() {
                continue;
            }
            let q = div_round(&a[r * cols + t], &piv);
            if !q.is_zero() {
                for c in t..cols {
                    let s = &q * &a[t * cols + c];
                    a[r * cols + c] -= s;
                }
            }
            if !a[r * cols + t].is_zero() {
                dirty = true;
            }
        }
        for c in (t + 1)..cols {
            if a[t * cols + c].is_zero() {
                continue;
            }
            let q = div_round(&a[t * cols + c], &piv);
            if !q.is_zero() {
                for r in t..rows {
                    let s = &q * &a[r * cols + t];
                    a[r * cols + c] -= s;
                }
            }
            if !a[t * cols + c].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue 'outer;
        }
        // pivot now alone in its row and column; enforce divisibility chain
        for r in (t + 1)..rows {
            for c in (t + 1)..cols {
                if !(&a[r * cols + c] % &piv).is_zero() {
                    // fold row r into row t and re-reduce
                    for cc in t..cols {
                        let v = a[r * cols + cc].clone();
                        a[t * cols + cc] += v;
                    }
                    continue 'outer;
                }
            }
        }
        divisors.push(piv);
        t += 1;
    }
    divisors.iter().map(|d| d.magnitude().clone()).collect()
}

/// Rounded division: quotient minimizing |a - q*b|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r: BigInt = &r * 2;
    if two_r.magnitude() > b.magnitude() || (two_r.magnitude() == b.magnitude() && !r.is_zero()) {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Dense matrix over F_ell.
#[derive(Debug, Clone)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FpCtx,
    pub data: Vec<u64>,
}

impl FpMatrix {
    pub fn from_int(m: &IntMatrix, ell: u64) -> Self {
        let field = FpCtx::new(ell);
        let p = BigInt::from(ell);
        let data = m
            .data
            .iter()
            .map(|x| {
                let r = x.mod_floor(&p);
                u64::try_from(r.magnitude().clone()).unwrap()
            })
            .collect();
        FpMatrix { rows: m.rows, cols: m.cols, field, data }
    }
}

/// Rank over F_ell by Gaussian elimination.
pub fn rank_fp(m: &FpMatrix) -> usize {
    let mut data = m.data.clone();
    super::field::dense_rank(&m.field, m.rows, m.cols, &mut data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_rank() {
        assert_eq!(rank_q(&IntMatrix::from_rows(vec![vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank_q(&IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]])), 2);
        assert_eq!(rank_q(&IntMatrix::zeros(3, 2)), 0);
        let m = IntMatrix::from_rows(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(rank_q(&m), 2);
    }

    #[test]
    fn rank_can_drop_mod_ell() {
        let m = IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(rank_fp(&FpMatrix::from_int(&m, 2)), 0);
        assert_eq!(rank_fp(&FpMatrix::from_int(&m, 7)), 2);
    }

    #[test]
    fn determinant() {
        let m = IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(det(&m), BigInt::from(-8));
        let s = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(det(&s), BigInt::from(-1));
        assert_eq!(det(&IntMatrix::identity(4)), BigInt::one());
    }

    #[test]
    fn snf_examples() {
        let d = smith_normal_form(&IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(d, vec![BigUint::from(1u32), BigUint::from(6u32)]);
        let d = smith_normal_form(&IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]));
        assert_eq!(d, vec![BigUint::from(2u32), BigUint::from(4u32)]);
        let d = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(d.is_empty());
        // relation matrix of Z/2 + Z/2 + Z
        let m = IntMatrix::from_rows(vec![vec![2, 0, 0], vec![0, 2, 0]]);
        assert_eq!(smith_normal_form(&m), vec![BigUint::from(2u32), BigUint::from(2u32)]);
    }

    #[test]
    fn snf_divisibility_chain() {
        let m = IntMatrix::from_rows(vec![vec![4, 6, 2], vec![10, 4, 8], vec![6, 12, 14]]);
        let d = smith_normal_form(&m);
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn rounded_division() {
        use num_bigint::BigInt;
        assert_eq!(div_round(&BigInt::from(7), &BigInt::from(3)), BigInt::from(2));
        assert_eq!(div_round(&BigInt::from(-7), &BigInt::from(3)), BigInt::from(-2));
        assert_eq!(div_round(&BigInt::from(5), &BigInt::from(4)), BigInt::from(1));
    }
}
