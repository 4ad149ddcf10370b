//! Truncated p-adic matrix arithmetic: residues mod p^N with a convergent
//! matrix logarithm and exponential on the appropriate neighborhoods of the
//! identity (1 + pM for odd p, 1 + 4M for p = 2).
//!
//! Series are truncated once every remaining term vanishes mod p^N; the
//! computation runs at a raised internal precision so the exact divisions by
//! j (log) and j! (exp) never lose requested digits.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::padic::{p_pow, require_prime};
use crate::{Error, Result};

use super::dense::IntMatrix;

/// Square matrix of residues mod p^precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicMatrix {
    pub p: u64,
    pub precision: u32,
    pub n: usize,
    pub data: Vec<BigUint>,
}

impl PAdicMatrix {
    pub fn modulus(&self) -> BigUint {
        p_pow(self.p, self.precision)
    }

    pub fn from_int(m: &IntMatrix, p: u64, precision: u32) -> Result<Self> {
        require_prime(p)?;
        if m.rows != m.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} is not square", m.rows, m.cols)));
        }
        let md = BigInt::from(p_pow(p, precision));
        let data = m.data.iter().map(|x| x.mod_floor(&md).to_biguint().unwrap()).collect();
        Ok(PAdicMatrix { p, precision, n: m.rows, data })
    }

    pub fn identity(p: u64, precision: u32, n: usize) -> Self {
        let mut data = vec![BigUint::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigUint::one();
        }
        PAdicMatrix { p, precision, n, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigUint {
        &self.data[r * self.n + c]
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, precision: u32) -> Self {
        debug_assert!(precision <= self.precision);
        let md = p_pow(self.p, precision);
        let data = self.data.iter().map(|x| x % &md).collect();
        PAdicMatrix { p: self.p, precision, n: self.n, data }
    }

    pub fn mul(&self, other: &PAdicMatrix) -> Self {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.precision, other.precision);
        let n = self.n;
        let md = self.modulus();
        let mut data = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a * other.get(k, j);
                    data[i * n + j] = (&data[i * n + j] + t) % &md;
                }
            }
        }
        PAdicMatrix { p: self.p, precision: self.precision, n, data }
    }

    pub fn sub(&self, other: &PAdicMatrix) -> Self {
        debug_assert_eq!(self.n, other.n);
        let md = self.modulus();
        let md_int = BigInt::from(md.clone());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                (BigInt::from(a.clone()) - BigInt::from(b.clone()))
                    .mod_floor(&md_int)
                    .to_biguint()
                    .unwrap()
            })
            .collect();
        PAdicMatrix { p: self.p, precision: self.precision, n: self.n, data }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = PAdicMatrix::identity(self.p, self.precision, self.n);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Minimal valuation over the entries, capped at the precision.
    pub fn min_valuation(&self) -> u32 {
        let mut best = self.precision;
        for x in &self.data {
            if x.is_zero() {
                continue;
            }
            let mut v = 0u32;
            let mut rest = x.clone();
            let p = BigUint::from(self.p);
            while v < best {
                let (q, r) = rest.div_rem(&p);
                if r.is_zero() {
                    v += 1;
                    rest = q;
                } else {
                    break;
                }
            }
            best = best.min(v);
        }
        best
    }

    /// Determinant as a residue mod p^precision (exact integer determinant of
    /// the canonical lifts, reduced).
    pub fn det_mod(&self) -> BigUint {
        let lift = IntMatrix {
            rows: self.n,
            cols: self.n,
            data: self.data.iter().map(|x| BigInt::from(x.clone())).collect(),
        };
        let d = super::dense::det(&lift);
        let md = BigInt::from(self.modulus());
        d.mod_floor(&md).to_biguint().unwrap()
    }
}

fn domain_width(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// Checks A = I mod p (mod 4 for p = 2) and returns B = A - I at the working precision.
fn log_domain_check(a: &PAdicMatrix) -> Result<PAdicMatrix> {
    let w = domain_width(a.p);
    let b = a.sub(&PAdicMatrix::identity(a.p, a.precision, a.n));
    if b.min_valuation() < w {
        return Err(Error::LogDomain(p_pow(a.p, w).to_u64().unwrap()));
    }
    Ok(b)
}

fn floor_log(p: u64, mut j: u64) -> u32 {
    let mut l = 0;
    while j >= p {
        j /= p;
        l += 1;
    }
    l
}

/// Exact division of every entry by p^a * u (u a unit mod the modulus), where
/// entries are known to be divisible by p^a. Result valid mod p^(precision-a),
/// returned at that precision.
fn divide_entries(m: &PAdicMatrix, a: u32, u: &BigUint) -> PAdicMatrix {
    let pa = p_pow(m.p, a);
    let new_prec = m.precision - a;
    let md = p_pow(m.p, new_prec);
    let u_inv = mod_inverse(u, &md);
    let data = m
        .data
        .iter()
        .map(|x| {
            let (q, r) = x.div_rem(&pa);
            debug_assert!(r.is_zero(), "entry not divisible by p^{}", a);
            (q % &md) * &u_inv % &md
        })
        .collect();
    PAdicMatrix { p: m.p, precision: new_prec, n: m.n, data }
}

fn mod_inverse(u: &BigUint, md: &BigUint) -> BigUint {
    let e = extended_gcd(&BigInt::from(u.clone()), &BigInt::from(md.clone()));
    e.mod_floor(&BigInt::from(md.clone())).to_biguint().unwrap()
}

fn extended_gcd(a: &BigInt, m: &BigInt) -> BigInt {
    // returns x with a*x = 1 mod m
    let (mut old_r, mut r) = (a.clone(), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp);
    }
    debug_assert!(old_r.magnitude() == &BigUint::one(), "not a unit");
    old_s
}

/// Matrix logarithm log(A) = sum (-1)^(j-1) (A-I)^j / j, valid for
/// A = I mod p (odd p) or mod 4 (p = 2). Result entries are residues mod p^N.
pub fn padic_log(a: &PAdicMatrix, precision: u32) -> Result<PAdicMatrix> {
    if precision < 1 {
        return Err(Error::ZeroPrecision);
    }
    let p = a.p;
    let w = domain_width(p);
    // truncation index: first j with j*w - floor(log_p j) >= N ends the series
    let mut j_max = 1u64;
    while (j_max as i64) * (w as i64) - (floor_log(p, j_max) as i64) < precision as i64 {
        j_max += 1;
    }
    let guard = floor_log(p, j_max) + 1;
    let work = precision + guard * 2;
    let a_work = if a.precision >= work {
        a.truncate(work)
    } else {
        return Err(Error::Hypothesis(format!(
            "input precision {} too low: matrix log at precision {} needs input mod p^{}",
            a.precision, precision, work
        )));
    };
    let b = log_domain_check(&a_work)?;
    let md = p_pow(p, precision);
    let mut acc = vec![BigInt::zero(); a.n * a.n];
    let mut power = PAdicMatrix::identity(p, work, a.n);
    for j in 1..=j_max {
        power = power.mul(&b);
        let v = floor_log(p, j);
        let vj = {
            let mut t = j;
            let mut v = 0u32;
            while t % p == 0 {
                t /= p;
                v += 1;
            }
            (v, t)
        };
        let _ = v;
        let (vp_j, unit) = vj;
        let term = divide_entries(&power, vp_j, &BigUint::from(unit));
        let sign = if j % 2 == 1 { 1 } else { -1 };
        for (i, x) in term.data.iter().enumerate() {
            let t = BigInt::from(x % &md);
            if sign > 0 {
                acc[i] += t;
            } else {
                acc[i] -= t;
            }
        }
    }
    let md_int = BigInt::from(md.clone());
    let data = acc.into_iter().map(|x| x.mod_floor(&md_int).to_biguint().unwrap()).collect();
    Ok(PAdicMatrix { p, precision, n: a.n, data })
}

/// Matrix exponential exp(B) = sum B^j / j!, valid for B = 0 mod p (odd p)
/// or mod 4 (p = 2).
pub fn padic_exp(b: &PAdicMatrix, precision: u32) -> Result<PAdicMatrix> {
    if precision < 1 {
        return Err(Error::ZeroPrecision);
    }
    let p = b.p;
    let w = domain_width(p);
    if b.min_valuation() < w {
        return Err(Error::ExpDomain(p_pow(p, w).to_u64().unwrap()));
    }
    // lower bound for term valuation: j*w - (j-1)/(p-1), increasing in j
    let term_bound = |j: u64| (j as i64) * (w as i64) - ((j as i64 - 1) / (p as i64 - 1));
    let mut j_max = 1u64;
    while term_bound(j_max) < precision as i64 {
        j_max += 1;
    }
    // guard: enough digits to divide by j! exactly
    let vp_fact = |j: u64| {
        let mut v = 0u64;
        let mut pk = p;
        while pk <= j {
            v += j / pk;
            match pk.checked_mul(p) {
                Some(next) => pk = next,
                None => break,
            }
        }
        v as u32
    };
    let guard = vp_fact(j_max) + 1;
    let work = precision + guard;
    let b_work = if b.precision >= work {
        b.truncate(work)
    } else {
        return Err(Error::Hypothesis(format!(
            "input precision {} too low: matrix exp at precision {} needs input mod p^{}",
            b.precision, precision, work
        )));
    };
    let md = p_pow(p, precision);
    let md_int = BigInt::from(md.clone());
    let mut acc = vec![BigInt::zero(); b.n * b.n];
    for i in 0..b.n {
        acc[i * b.n + i] = BigInt::one();
    }
    let mut power = PAdicMatrix::identity(p, work, b.n);
    let mut factorial = BigUint::one();
    for j in 1..=j_max {
        power = power.mul(&b_work);
        factorial *= BigUint::from(j);
        let vp_j = vp_fact(j);
        let unit = (&factorial / p_pow(p, vp_j)) % p_pow(p, work);
        let term = divide_entries(&power, vp_j, &unit);
        for (i, x) in term.data.iter().enumerate() {
            acc[i] += BigInt::from(x % &md);
        }
    }
    let data = acc.into_iter().map(|x| x.mod_floor(&md_int).to_biguint().unwrap()).collect();
    Ok(PAdicMatrix { p, precision, n: b.n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(p: u64, prec: u32, rows: Vec<Vec<i64>>) -> PAdicMatrix {
        PAdicMatrix::from_int(&IntMatrix::from_rows(rows), p, prec).unwrap()
    }

    #[test]
    fn log_of_unipotent() {
        // E nilpotent: log(I + 5E) = 5E exactly.
        let a = mat(5, 10, vec![vec![1, 5], vec![0, 1]]);
        let l = padic_log(&a, 4).unwrap();
        assert_eq!(l, mat(5, 4, vec![vec![0, 5], vec![0, 0]]));
    }

    #[test]
    fn scalar_log_series() {
        // log(1+5) mod 125 = 5 - 25/2 + 0 = 55 (2^{-1} = 63 mod 125).
        let a = mat(5, 9, vec![vec![6]]);
        let l = padic_log(&a, 3).unwrap();
        assert_eq!(l.data[0], BigUint::from(55u32));
    }

    #[test]
    fn exp_log_roundtrip() {
        for (p, rows) in [
            (5u64, vec![vec![1 + 5, 10], vec![5, 1 - 5]]),
            (3u64, vec![vec![1 + 3, 3], vec![6, 1 + 9]]),
            (2u64, vec![vec![1 + 4, 4], vec![8, 1 + 12]]),
        ] {
            let prec = 5u32;
            let a = mat(p, 16, rows);
            let l = padic_log(&a, 10).unwrap();
            let e = padic_exp(&l, prec).unwrap();
            assert_eq!(e, a.truncate(prec), "exp(log A) != A for p={}", p);
        }
    }

    #[test]
    fn log_of_power_is_multiple() {
        let p = 7u64;
        let a = mat(p, 14, vec![vec![8, 7], vec![14, 1]]);
        let l1 = padic_log(&a, 6).unwrap();
        for m in 2u64..=3 {
            let am = a.pow(m);
            let lm = padic_log(&am, 6).unwrap();
            // lm = m * l1 entrywise mod 7^6
            let md = p_pow(p, 6);
            for (x, y) in lm.data.iter().zip(&l1.data) {
                assert_eq!(x.clone(), y * BigUint::from(m) % &md);
            }
        }
    }

    #[test]
    fn log_rejects_bad_domain() {
        let a = mat(5, 8, vec![vec![2]]);
        assert!(matches!(padic_log(&a, 2), Err(Error::LogDomain(5))));
        let a2 = mat(2, 8, vec![vec![3]]);
        assert!(matches!(padic_log(&a2, 2), Err(Error::LogDomain(4))));
    }

    #[test]
    fn det_mod_small() {
        let a = mat(5, 4, vec![vec![26, 5], vec![5, 1]]);
        // det = 26 - 25 = 1
        assert_eq!(a.det_mod(), BigUint::one());
    }

    #[test]
    fn min_valuation_reports_floor() {
        let a = mat(3, 5, vec![vec![9, 27], vec![0, 81]]);
        assert_eq!(a.min_valuation(), 2);
        let z = mat(3, 5, vec![vec![0]]);
        assert_eq!(z.min_valuation(), 5);
    }
}
