//! p-adic valuations, prime-to-p parts, and finite-evidence p-adic limits.
//!
//! A limit extracted from finitely many terms is never a proof. The detector
//! below reports exactly what the data witnesses: a residue mod p^m supported
//! by agreement of the last `window` terms, unbounded archimedean growth, or
//! an admission that the data is insufficient.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    // This base set is deterministic for all u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// p^k as a BigUint.
pub fn p_pow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// p-adic valuation of a nonzero integer.
pub fn vp(x: &BigInt, p: u64) -> Result<u32> {
    require_prime(p)?;
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut v = 0u32;
    let mut rest = x.clone();
    loop {
        let (q, r) = rest.div_rem(&p);
        if r.is_zero() {
            v += 1;
            rest = q;
        } else {
            return Ok(v);
        }
    }
}

/// The prime-to-p part x * p^{-vp(x)}. Sign is preserved.
pub fn p_prime_part(x: &BigInt, p: u64) -> Result<BigInt> {
    let v = vp(x, p)?;
    Ok(x / BigInt::from(p).pow(v))
}

/// Convergence status of a finite-evidence p-adic limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxStatus {
    Converged,
    GrowthDetected,
    InsufficientData,
}

/// A p-adic integer known modulo p^precision, together with how that
/// knowledge was obtained. `residue` is canonical in [0, p^precision) and
/// present exactly when the status is `Converged`. Growth-detected carries
/// no residue claim: it is evidence for divergence to p-adic zero of the
/// normalized tail, never a proven statement about the sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicApprox {
    pub p: u64,
    pub precision: u32,
    pub residue: Option<BigUint>,
    pub status: ApproxStatus,
}

impl PAdicApprox {
    pub fn converged(p: u64, precision: u32, residue: BigUint) -> Self {
        debug_assert!(precision >= 1);
        debug_assert!(residue < p_pow(p, precision));
        PAdicApprox { p, precision, residue: Some(residue), status: ApproxStatus::Converged }
    }

    pub fn growth_detected(p: u64) -> Self {
        PAdicApprox { p, precision: 0, residue: None, status: ApproxStatus::GrowthDetected }
    }

    pub fn insufficient(p: u64) -> Self {
        PAdicApprox { p, precision: 0, residue: None, status: ApproxStatus::InsufficientData }
    }

    /// Exact known integer value as a converged approximation at full precision.
    pub fn exact(p: u64, precision: u32, value: &BigInt) -> Self {
        let m = BigInt::from(p_pow(p, precision));
        let r = value.mod_floor(&m).to_biguint().expect("canonical residue");
        Self::converged(p, precision, r)
    }

    pub fn is_converged(&self) -> bool {
        self.status == ApproxStatus::Converged
    }

    pub fn modulus(&self) -> BigUint {
        p_pow(self.p, self.precision)
    }

    /// Two approximations agree when both converged and their residues match
    /// modulo p^min(precisions).
    pub fn agrees_with(&self, other: &PAdicApprox) -> bool {
        if self.p != other.p || !self.is_converged() || !other.is_converged() {
            return false;
        }
        let m = p_pow(self.p, self.precision.min(other.precision));
        self.residue.as_ref().unwrap() % &m == other.residue.as_ref().unwrap() % &m
    }

    /// Checks the residue against an exact integer at this approximation's precision.
    pub fn equals_integer(&self, value: &BigInt) -> bool {
        if !self.is_converged() {
            return false;
        }
        let m = BigInt::from(self.modulus());
        BigInt::from(self.residue.clone().unwrap()) == value.mod_floor(&m)
    }

    fn binop(&self, other: &PAdicApprox, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<PAdicApprox> {
        if self.p != other.p {
            return Err(Error::Hypothesis(format!("mixed primes {} and {}", self.p, other.p)));
        }
        if !self.is_converged() || !other.is_converged() {
            return Err(Error::Hypothesis("arithmetic on non-converged approximation".into()));
        }
        let prec = self.precision.min(other.precision);
        let m = BigInt::from(p_pow(self.p, prec));
        let a = BigInt::from(self.residue.clone().unwrap());
        let b = BigInt::from(other.residue.clone().unwrap());
        let r = f(&a, &b).mod_floor(&m).to_biguint().unwrap();
        Ok(PAdicApprox::converged(self.p, prec, r))
    }

    pub fn add(&self, other: &PAdicApprox) -> Result<PAdicApprox> {
        self.binop(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PAdicApprox) -> Result<PAdicApprox> {
        self.binop(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &PAdicApprox) -> Result<PAdicApprox> {
        self.binop(other, |a, b| a * b)
    }
}

/// Extracts the p-adic limit witnessed by the last `window` terms of `seq`.
///
/// Finds the largest m <= precision such that the last `window` terms agree
/// mod p^m; if m >= 1 the result is converged at precision m with the
/// canonical residue. Otherwise, strictly growing archimedean size across the
/// whole window (with no agreement even mod p) is reported as growth-detected,
/// and anything else as insufficient-data.
pub fn padic_limit(seq: &[BigInt], p: u64, precision: u32, window: usize) -> Result<PAdicApprox> {
    require_prime(p)?;
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if window < 2 {
        return Err(Error::WindowTooSmall(window));
    }
    if precision < 1 {
        return Err(Error::ZeroPrecision);
    }
    if seq.len() < window {
        return Ok(PAdicApprox::insufficient(p));
    }
    let tail = &seq[seq.len() - window..];
    let last = tail.last().unwrap();
    let agree_mod = |m: u32| {
        let md = BigInt::from(p_pow(p, m));
        tail.iter().all(|x| (x - last).mod_floor(&md).is_zero())
    };
    for m in (1..=precision).rev() {
        if agree_mod(m) {
            let md = BigInt::from(p_pow(p, m));
            let r = last.mod_floor(&md).to_biguint().unwrap();
            return Ok(PAdicApprox::converged(p, m, r));
        }
    }
    let strictly_growing = tail.windows(2).all(|w| w[0].abs() < w[1].abs());
    if strictly_growing {
        Ok(PAdicApprox::growth_detected(p))
    } else {
        Ok(PAdicApprox::insufficient(p))
    }
}

/// The p-adic index of a subgroup, approximated along a tower.
///
/// `is_open` is witnessed by the index sequence being constant across the
/// last window; in that case `exact` holds the literal index. A non-open
/// (or undecided) subgroup gets the p-adic limit of the sequence, which for
/// genuine towers is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicIndex {
    pub value: PAdicApprox,
    pub is_open: bool,
    pub exact: Option<BigUint>,
}

pub fn padic_index_from_tower(
    indices: &[BigUint],
    p: u64,
    precision: u32,
    window: usize,
) -> Result<PAdicIndex> {
    require_prime(p)?;
    if indices.is_empty() {
        return Err(Error::EmptySequence);
    }
    if window < 2 {
        return Err(Error::WindowTooSmall(window));
    }
    if indices.len() >= window {
        let tail = &indices[indices.len() - window..];
        let last = tail.last().unwrap();
        if tail.iter().all(|x| x == last) {
            let value = PAdicApprox::exact(p, precision, &BigInt::from(last.clone()));
            return Ok(PAdicIndex { value, is_open: true, exact: Some(last.clone()) });
        }
    }
    let seq: Vec<BigInt> = indices.iter().cloned().map(BigInt::from).collect();
    let value = padic_limit(&seq, p, precision, window)?;
    Ok(PAdicIndex { value, is_open: false, exact: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1));
        assert!(!is_prime(561));
        assert!(!is_prime(25));
    }

    #[test]
    fn valuation_and_prime_part() {
        assert_eq!(vp(&bi(12), 2).unwrap(), 2);
        assert_eq!(vp(&bi(12), 3).unwrap(), 1);
        assert_eq!(vp(&bi(12), 5).unwrap(), 0);
        assert_eq!(vp(&bi(-40), 2).unwrap(), 3);
        assert!(matches!(vp(&bi(0), 2), Err(Error::ZeroValuation)));
        assert!(matches!(vp(&bi(4), 4), Err(Error::NotPrime(4))));
        assert_eq!(p_prime_part(&bi(12), 2).unwrap(), bi(3));
        assert_eq!(p_prime_part(&bi(-12), 2).unwrap(), bi(-3));
        assert_eq!(p_prime_part(&bi(7), 2).unwrap(), bi(7));
    }

    #[test]
    fn limit_converges_on_cauchy_tail() {
        // 1, 1+5, 1+25, 1+125: last two agree mod 25, not mod 125.
        let seq = vec![bi(1), bi(6), bi(26), bi(126)];
        let a = padic_limit(&seq, 5, 2, 2).unwrap();
        assert_eq!(a.status, ApproxStatus::Converged);
        assert_eq!(a.precision, 2);
        assert_eq!(a.residue, Some(BigUint::from(1u32)));
        // Requesting more precision than witnessed caps at the witnessed amount.
        let b = padic_limit(&seq, 5, 6, 2).unwrap();
        assert_eq!(b.precision, 2);
        assert_eq!(b.residue, Some(BigUint::from(1u32)));
    }

    #[test]
    fn limit_of_p_powers_is_zero() {
        let seq = vec![bi(3), bi(9), bi(27), bi(81)];
        let a = padic_limit(&seq, 3, 3, 2).unwrap();
        assert_eq!(a.status, ApproxStatus::Converged);
        assert_eq!(a.precision, 3);
        assert_eq!(a.residue, Some(BigUint::zero()));
    }

    #[test]
    fn growth_is_reported_not_resolved() {
        // Strictly growing, no agreement even mod 3 across the window.
        let seq = vec![bi(1), bi(2), bi(4), bi(8), bi(16)];
        let a = padic_limit(&seq, 3, 2, 3).unwrap();
        assert_eq!(a.status, ApproxStatus::GrowthDetected);
        assert_eq!(a.residue, None);
    }

    #[test]
    fn short_or_flat_data_is_insufficient() {
        let a = padic_limit(&[bi(7)], 5, 2, 2).unwrap();
        assert_eq!(a.status, ApproxStatus::InsufficientData);
        // Not growing, not agreeing mod 5: 1, 2, 1 repeats.
        let b = padic_limit(&[bi(1), bi(2), bi(1)], 5, 2, 3).unwrap();
        assert_eq!(b.status, ApproxStatus::InsufficientData);
    }

    #[test]
    fn constant_tail_gives_full_precision() {
        let seq = vec![bi(1), bi(2), bi(4), bi(4)];
        let a = padic_limit(&seq, 3, 2, 2).unwrap();
        assert_eq!(a.precision, 2);
        assert_eq!(a.residue, Some(BigUint::from(4u32)));
    }

    #[test]
    fn negative_terms_get_canonical_residues() {
        let seq = vec![bi(-2), bi(-2), bi(-2)];
        let a = padic_limit(&seq, 5, 2, 2).unwrap();
        assert_eq!(a.residue, Some(BigUint::from(23u32)));
    }

    #[test]
    fn prepend_stability() {
        // The verdict depends only on the last window terms.
        let seq = vec![bi(999), bi(5), bi(26), bi(126)];
        let a = padic_limit(&seq, 5, 2, 2).unwrap();
        assert_eq!(a.precision, 2);
        assert_eq!(a.residue, Some(BigUint::from(1u32)));
    }

    #[test]
    fn open_index_is_exact() {
        let idx = padic_index_from_tower(
            &[6u32, 6, 6, 6].map(BigUint::from),
            3,
            3,
            2,
        )
        .unwrap();
        assert!(idx.is_open);
        assert_eq!(idx.exact, Some(BigUint::from(6u32)));
        assert!(idx.value.equals_integer(&bi(6)));
    }

    #[test]
    fn closed_index_limits_to_zero() {
        let idx = padic_index_from_tower(
            &[3u32, 9, 27, 81].map(BigUint::from),
            3,
            3,
            2,
        )
        .unwrap();
        assert!(!idx.is_open);
        assert_eq!(idx.exact, None);
        assert!(idx.value.equals_integer(&bi(0)));
        assert_eq!(idx.value.precision, 3);
    }

    #[test]
    fn approx_arithmetic_at_min_precision() {
        let a = PAdicApprox::converged(5, 3, BigUint::from(26u32));
        let b = PAdicApprox::converged(5, 2, BigUint::from(7u32));
        let s = a.add(&b).unwrap();
        assert_eq!(s.precision, 2);
        assert_eq!(s.residue, Some(BigUint::from(8u32)));
        let m = a.mul(&b).unwrap();
        assert_eq!(m.residue, Some(BigUint::from((26u32 * 7) % 25)));
    }
}
