//! Minimal field-context abstraction so elimination code can run over Q,
//! prime fields, and small extension fields without duplication.
//!
//! A context owns whatever data the field needs (a modulus, a defining
//! polynomial); elements are plain data. This keeps prime-field elements at
//! one machine word.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait FieldCtx {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

/// The rational field.
#[derive(Debug, Clone, Copy)]
pub struct QCtx;

impl FieldCtx for QCtx {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        debug_assert!(!a.is_zero());
        a.recip()
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
}

/// The prime field F_ell for a u64 prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpCtx {
    pub p: u64,
}

impl FpCtx {
    pub fn new(p: u64) -> Self {
        debug_assert!(crate::padic::is_prime(p));
        FpCtx { p }
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

impl FieldCtx for FpCtx {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        self.pow(*a, self.p - 2)
    }
    fn from_i64(&self, x: i64) -> u64 {
        self.reduce_i64(x)
    }
}

/// Quotient field base[x]/(h) for an irreducible monic h over the base.
/// Elements are coefficient vectors of length deg(h), lowest degree first.
#[derive(Debug, Clone)]
pub struct ExtCtx<F: FieldCtx> {
    pub base: F,
    /// Monic modulus, full coefficient list including leading 1.
    pub modulus: Vec<F::Elem>,
}

impl<F: FieldCtx> ExtCtx<F> {
    pub fn new(base: F, modulus: Vec<F::Elem>) -> Self {
        debug_assert!(modulus.len() >= 2);
        debug_assert!(modulus.last().map(|c| c == &base.one()).unwrap_or(false));
        ExtCtx { base, modulus }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// The class of x, a root of the modulus.
    pub fn gen(&self) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        if self.degree() >= 2 {
            v[1] = self.base.one();
        } else {
            // degree-1 modulus x - c: the generator is the constant c
            v[0] = self.base.neg(&self.modulus[0]);
        }
        v
    }

    pub fn from_base(&self, c: F::Elem) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = c;
        v
    }

    pub fn pow(&self, a: &Vec<F::Elem>, mut e: u64) -> Vec<F::Elem> {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    fn poly_rem(&self, mut v: Vec<F::Elem>) -> Vec<F::Elem> {
        let d = self.degree();
        while v.len() > d {
            let lead = v.pop().unwrap();
            if !self.base.is_zero(&lead) {
                let k = v.len() - d;
                for i in 0..d {
                    let t = self.base.mul(&lead, &self.modulus[i]);
                    v[k + i] = self.base.sub(&v[k + i], &t);
                }
            }
        }
        v.resize(d, self.base.zero());
        v
    }
}

impl<F: FieldCtx> FieldCtx for ExtCtx<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Vec<F::Elem> {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Vec<F::Elem> {
        self.from_base(self.base.one())
    }
    fn is_zero(&self, a: &Vec<F::Elem>) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }
    fn add(&self, a: &Vec<F::Elem>, b: &Vec<F::Elem>) -> Vec<F::Elem> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<F::Elem>, b: &Vec<F::Elem>) -> Vec<F::Elem> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn mul(&self, a: &Vec<F::Elem>, b: &Vec<F::Elem>) -> Vec<F::Elem> {
        let d = self.degree();
        let mut prod = vec![self.base.zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                let t = self.base.mul(x, y);
                prod[i + j] = self.base.add(&prod[i + j], &t);
            }
        }
        self.poly_rem(prod)
    }
    fn neg(&self, a: &Vec<F::Elem>) -> Vec<F::Elem> {
        a.iter().map(|c| self.base.neg(c)).collect()
    }
    fn inv(&self, a: &Vec<F::Elem>) -> Vec<F::Elem> {
        // Extended Euclid on (a, modulus) over the base field.
        debug_assert!(!self.is_zero(a));
        let trim = |v: &[F::Elem]| {
            let mut v = v.to_vec();
            while v.len() > 1 && self.base.is_zero(v.last().unwrap()) {
                v.pop();
            }
            v
        };
        let mut r0 = self.modulus.clone();
        let mut r1 = trim(a);
        let mut s0: Vec<F::Elem> = vec![self.base.zero()];
        let mut s1: Vec<F::Elem> = vec![self.base.one()];
        while !(r1.len() == 1 && self.base.is_zero(&r1[0])) {
            // divide r0 by r1
            let mut q = vec![self.base.zero(); r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            let lead_inv = self.base.inv(r1.last().unwrap());
            while rem.len() >= r1.len() && !(rem.len() == 1 && self.base.is_zero(&rem[0])) {
                let shift = rem.len() - r1.len();
                let c = self.base.mul(rem.last().unwrap(), &lead_inv);
                if !self.base.is_zero(&c) {
                    q[shift] = self.base.add(&q[shift], &c);
                    for (i, m) in r1.iter().enumerate() {
                        let t = self.base.mul(&c, m);
                        rem[shift + i] = self.base.sub(&rem[shift + i], &t);
                    }
                }
                rem = trim(&rem);
                if rem.len() < r1.len() {
                    break;
                }
                if rem.iter().all(|c| self.base.is_zero(c)) {
                    rem = vec![self.base.zero()];
                    break;
                }
            }
            // s_new = s0 - q*s1
            let mut qs1 = vec![self.base.zero(); q.len() + s1.len() - 1];
            for (i, x) in q.iter().enumerate() {
                if self.base.is_zero(x) {
                    continue;
                }
                for (j, y) in s1.iter().enumerate() {
                    let t = self.base.mul(x, y);
                    qs1[i + j] = self.base.add(&qs1[i + j], &t);
                }
            }
            let len = s0.len().max(qs1.len());
            let mut s_new = vec![self.base.zero(); len];
            for (i, c) in s0.iter().enumerate() {
                s_new[i] = c.clone();
            }
            for (i, c) in qs1.iter().enumerate() {
                s_new[i] = self.base.sub(&s_new[i], c);
            }
            r0 = r1;
            r1 = trim(&rem);
            s0 = s1;
            s1 = trim(&s_new);
        }
        // r0 is now the gcd, a nonzero constant since the modulus is irreducible.
        debug_assert!(r0.len() == 1);
        let c = self.base.inv(&r0[0]);
        let mut out = vec![self.base.zero(); self.degree()];
        for (i, s) in s0.iter().enumerate() {
            debug_assert!(i < self.degree());
            out[i] = self.base.mul(s, &c);
        }
        out
    }
    fn from_i64(&self, x: i64) -> Vec<F::Elem> {
        self.from_base(self.base.from_i64(x))
    }
}

/// Dense rank by Gaussian elimination over any field context.
pub fn dense_rank<F: FieldCtx>(f: &F, rows: usize, cols: usize, data: &mut [F::Elem]) -> usize {
    debug_assert_eq!(data.len(), rows * cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).find(|&r| !f.is_zero(&data[r * cols + col]));
        let Some(pr) = pivot else { continue };
        if pr != rank {
            for c in 0..cols {
                data.swap(pr * cols + c, rank * cols + c);
            }
        }
        let inv = f.inv(&data[rank * cols + col]);
        for r in (rank + 1)..rows {
            let factor = f.mul(&data[r * cols + col], &inv);
            if f.is_zero(&factor) {
                continue;
            }
            for c in col..cols {
                let t = f.mul(&factor, &data[rank * cols + c]);
                data[r * cols + c] = f.sub(&data[r * cols + c], &t);
            }
        }
        rank += 1;
    }
    rank
}
