//! Torsion growth for groups Z^N x| Z twisted by an integer matrix A, along
//! the tower of subgroups Z^N x| p^n Z.
//!
//! The abelianization of the n-th subgroup is Z^N/(A^{p^n} - 1) (+) Z, so its
//! torsion cardinality is |det(A^{p^n} - 1)| up to sign, and the prime-to-p
//! parts converge p-adically. Two independent routes are provided: the exact
//! determinant sequence with a p-adic limit, and a closed form through the
//! p-adic matrix logarithm.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complexes::{from_presentation, ChainComplexSpec};
use crate::cyclic::QPoly;
use crate::linalg::dense::{det, smith_normal_form, IntMatrix};
use crate::linalg::padic_mat::{padic_log, PAdicMatrix};
use crate::padic::{p_prime_part, padic_limit, require_prime, vp, PAdicApprox};
use crate::words::Word;
use crate::{Error, Result};

/// Characteristic polynomial det(tI - A), monic, coefficient i at t^i.
/// Faddeev-LeVerrier: every division is exact over Z.
pub fn charpoly(a: &IntMatrix) -> Result<Vec<BigInt>> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", a.rows, a.cols)));
    }
    let n = a.rows;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m);
        let mut tr = BigInt::zero();
        for i in 0..n {
            tr += am.get(i, i);
        }
        let (c, r) = (-tr).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "LeVerrier division must be exact");
        coeffs[n - k] = c.clone();
        m = am;
        for i in 0..n {
            let d = m.get(i, i) + &c;
            m.set(i, i, d);
        }
    }
    Ok(coeffs)
}

fn euler_phi(mut d: u64) -> u64 {
    let mut phi = 1u64;
    let mut q = 2u64;
    while q * q <= d {
        if d % q == 0 {
            d /= q;
            phi *= q - 1;
            while d % q == 0 {
                d /= q;
                phi *= q;
            }
        }
        q += 1;
    }
    if d > 1 {
        phi *= d - 1;
    }
    phi
}

/// The d-th cyclotomic polynomial, computed by exact division of t^d - 1 by
/// the cyclotomic polynomials of the proper divisors.
pub fn cyclotomic(d: u64) -> QPoly {
    let mut coeffs = vec![BigInt::zero(); d as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[d as usize] = BigInt::one();
    let mut num = QPoly::from_int_coeffs(&coeffs);
    for e in 1..d {
        if d % e == 0 {
            let (q, r) = num.div_rem(&cyclotomic(e));
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    num
}

/// Certificate for condition (A1): no eigenvalue of A is a root of unity.
#[derive(Debug, Clone)]
pub struct A1Certificate {
    pub holds: bool,
    pub charpoly: Vec<BigInt>,
    /// Orders d with phi(d) <= N whose cyclotomic polynomial was tested.
    pub checked_orders: Vec<u64>,
    pub failing_order: Option<u64>,
}

/// A has an eigenvalue that is a primitive d-th root of unity iff
/// Phi_d divides the characteristic polynomial; phi(d) <= N bounds the
/// candidates, so the check below is complete.
pub fn check_a1(a: &IntMatrix) -> Result<A1Certificate> {
    let cp = charpoly(a)?;
    let f = QPoly::from_int_coeffs(&cp);
    let n = f.degree() as u64;
    let mut checked_orders = Vec::new();
    let mut failing_order = None;
    // phi(d) >= sqrt(d/2), so phi(d) <= n forces d <= 2n^2
    for d in 1..=(2 * n * n).max(2) {
        if euler_phi(d) > n {
            continue;
        }
        checked_orders.push(d);
        if f.gcd(&cyclotomic(d)).degree() > 0 {
            failing_order = Some(d);
            break;
        }
    }
    Ok(A1Certificate { holds: failing_order.is_none(), charpoly: cp, checked_orders, failing_order })
}

fn int_pow(a: &IntMatrix, mut e: u64) -> IntMatrix {
    let mut acc = IntMatrix::identity(a.rows);
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b);
        }
    }
    acc
}

/// Sign of the torsion limit: sign det(A - 1) for odd p, sign det(A^2 - 1)
/// for p = 2. A vanishing determinant violates (A1).
pub fn epsilon_sign(a: &IntMatrix, p: u64) -> Result<i8> {
    require_prime(p)?;
    let i = IntMatrix::identity(a.rows);
    let m = if p == 2 { int_pow(a, 2).sub(&i) } else { a.sub(&i) };
    let d = det(&m);
    if d.is_zero() {
        return Err(Error::FabCondition {
            which: 1,
            detail: "det(A^k - 1) = 0: some eigenvalue is a root of unity".into(),
        });
    }
    Ok(if d.is_negative() { -1 } else { 1 })
}

/// Input precision that lets padic_log produce `precision` output digits.
fn log_input_precision(p: u64, precision: u32) -> u32 {
    let w: i64 = if p == 2 { 2 } else { 1 };
    let mut j_max = 1u64;
    let floor_log = |mut j: u64| -> i64 {
        let mut l = 0i64;
        while j >= p {
            j /= p;
            l += 1;
        }
        l
    };
    while (j_max as i64) * w - floor_log(j_max) < precision as i64 {
        j_max += 1;
    }
    precision + 2 * (floor_log(j_max) as u32 + 1)
}

/// Closed form for the p-adic torsion limit: epsilon * (prime-to-p part of
/// det log A), as a residue mod p^precision. Retries at higher working
/// precision while the determinant's valuation is still out of view.
pub fn torsion_closed_form(a: &IntMatrix, p: u64, precision: u32) -> Result<PAdicApprox> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let eps = epsilon_sign(a, p)?;
    let mut extra = 4u32;
    loop {
        let out_prec = precision + extra;
        let in_prec = log_input_precision(p, out_prec);
        let am = PAdicMatrix::from_int(a, p, in_prec)?;
        let l = padic_log(&am, out_prec)?;
        let d = BigInt::from(l.det_mod());
        if !d.is_zero() {
            let v = vp(&d, p)?;
            if v + precision <= out_prec {
                let unit = p_prime_part(&d, p)?;
                let md = BigInt::from(p).pow(precision);
                let value = (BigInt::from(eps) * unit).mod_floor(&md);
                return Ok(PAdicApprox::exact(p, precision, &value));
            }
        }
        if extra >= 64 {
            return Err(Error::PrecisionExhausted(out_prec));
        }
        extra *= 2;
    }
}

/// The exact torsion sequence t_n = |det(A^{p^n} - 1)| stripped of its
/// p-part, for n = 0..=n_max, with its p-adic limit.
#[derive(Debug, Clone)]
pub struct TorsionSequence {
    pub values: Vec<BigInt>,
    pub signs: Vec<i8>,
    pub limit: PAdicApprox,
}

pub fn torsion_approx(
    a: &IntMatrix,
    p: u64,
    n_max: u32,
    precision: u32,
    window: usize,
) -> Result<TorsionSequence> {
    require_prime(p)?;
    let cert = check_a1(a)?;
    if !cert.holds {
        return Err(Error::FabCondition {
            which: 1,
            detail: format!(
                "eigenvalue of order {} is a root of unity",
                cert.failing_order.unwrap_or(0)
            ),
        });
    }
    let ident = IntMatrix::identity(a.rows);
    let mut values = Vec::with_capacity(n_max as usize + 1);
    let mut signs = Vec::with_capacity(n_max as usize + 1);
    let mut cur = a.clone();
    for _ in 0..=n_max {
        let d = det(&cur.sub(&ident));
        debug_assert!(!d.is_zero(), "(A1) certified above");
        signs.push(if d.is_negative() { -1 } else { 1 });
        values.push(p_prime_part(&d.abs(), p)?);
        cur = int_pow(&cur, p);
    }
    // sign stability: from n = 1 on, the sign equals epsilon
    let eps = epsilon_sign(a, p)?;
    let start = if p == 2 { 1 } else { 0 };
    for (n, &s) in signs.iter().enumerate().skip(start) {
        if s != eps {
            return Err(Error::FabCondition {
                which: 3,
                detail: format!("sign of det(A^{{p^{}}} - 1) is {}, expected {}", n, s, eps),
            });
        }
    }
    let limit = padic_limit(&values, p, precision, window)?;
    Ok(TorsionSequence { values, signs, limit })
}

/// Valuation of (A^{p^n} - 1)/p^n - log A for n = 0..=n_max, all mod
/// p^precision. Convergence of the difference quotients to the logarithm
/// demands valuation >= n (capped at the working precision).
pub fn log_limit_check(a: &IntMatrix, p: u64, n_max: u32, precision: u32) -> Result<Vec<u32>> {
    require_prime(p)?;
    let in_prec = log_input_precision(p, precision);
    let am = PAdicMatrix::from_int(a, p, in_prec)?;
    let l = padic_log(&am, precision)?;
    let ident = IntMatrix::identity(a.rows);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut cur = a.clone();
    for n in 0..=n_max {
        let diff = cur.sub(&ident);
        let pn = BigInt::from(p).pow(n);
        let mut scaled = IntMatrix::zeros(a.rows, a.cols);
        for r in 0..a.rows {
            for c in 0..a.cols {
                let (q, rem) = diff.get(r, c).div_rem(&pn);
                if !rem.is_zero() {
                    return Err(Error::Hypothesis(format!(
                        "A^{{p^{}}} - 1 is not divisible by p^{}",
                        n, n
                    )));
                }
                scaled.set(r, c, q);
            }
        }
        let dm = PAdicMatrix::from_int(&scaled, p, precision)?;
        let v = dm.sub(&l).min_valuation();
        if v < n.min(precision) {
            return Err(Error::FabCondition {
                which: 4,
                detail: format!(
                    "difference quotient at level {} has valuation {}, expected >= {}",
                    n,
                    v,
                    n.min(precision)
                ),
            });
        }
        out.push(v);
        cur = int_pow(&cur, p);
    }
    Ok(out)
}

/// Torsion of Z^N/(A^{p^n} - 1) stripped of p: the product of the
/// prime-to-p parts of the nonzero Smith invariant factors. Independent of
/// the determinant route.
pub fn h1_torsion_exact(a: &IntMatrix, p: u64, n: u32) -> Result<BigUint> {
    require_prime(p)?;
    let mut cur = a.clone();
    for _ in 0..n {
        cur = int_pow(&cur, p);
    }
    let m = cur.sub(&IntMatrix::identity(a.rows));
    let inv = smith_normal_form(&m);
    let mut t = BigUint::one();
    for f in &inv {
        if f.is_zero() {
            return Err(Error::FabCondition {
                which: 1,
                detail: "A^{p^n} - 1 is singular: some eigenvalue is a root of unity".into(),
            });
        }
        let u = p_prime_part(&BigInt::from(f.clone()), p)?;
        t *= u.to_biguint().expect("positive by construction");
    }
    Ok(t)
}

/// The worked 2x2 family: A_p = [[1 + p^2, p], [p, 1]], determinant 1,
/// congruent to the identity mod p.
pub fn fab_example_matrix(p: u64) -> IntMatrix {
    let p = p as i64;
    IntMatrix::from_rows(vec![vec![1 + p * p, p], vec![p, 1]])
}

/// Presentation complex of Z^N x| Z twisted by A: generators x_1..x_N, s;
/// relators [x_i, x_j] for i < j and s x_k s^{-1} (column_k A)^{-1}.
pub fn fab_presentation(a: &IntMatrix) -> Result<ChainComplexSpec> {
    if a.rows != a.cols || a.rows == 0 {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square and nonempty", a.rows, a.cols)));
    }
    let n = a.rows;
    let s = Word::generator(n);
    let column_word = |k: usize| -> Result<Word> {
        let mut w = Word::identity();
        for j in 0..n {
            let e = a.get(j, k).to_i64().ok_or_else(|| {
                Error::Hypothesis("matrix entry exceeds i64 in presentation".into())
            })?;
            let g = Word::generator(j);
            let (base, reps) = if e >= 0 { (g, e) } else { (g.inverse(), -e) };
            for _ in 0..reps {
                w = w.mul(&base);
            }
        }
        Ok(w)
    };
    let mut relators = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let xi = Word::generator(i);
            let xj = Word::generator(j);
            relators.push(xi.mul(&xj).mul(&xi.inverse()).mul(&xj.inverse()));
        }
    }
    for k in 0..n {
        let xk = Word::generator(k);
        relators.push(s.mul(&xk).mul(&s.inverse()).mul(&column_word(k)?.inverse()));
    }
    from_presentation(n + 1, &relators)
}

/// Square root of x in Z/p^precision by Newton iteration from a seed root
/// mod p. Requires p odd and x a unit square.
pub fn hensel_sqrt(x: &BigUint, seed: u64, p: u64, precision: u32) -> Result<BigUint> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::Hypothesis("Newton square roots need p odd".into()));
    }
    let md = BigUint::from(p).pow(precision);
    let xi = BigInt::from(x.clone());
    let mdi = BigInt::from(md.clone());
    let mut r = BigInt::from(seed);
    debug_assert!(
        (&r * &r - &xi).mod_floor(&BigInt::from(p)).is_zero(),
        "seed must be a square root mod p"
    );
    for _ in 0..precision.ilog2() + 2 {
        let inv = mod_inverse(&r, &mdi)?;
        r = ((&r + &xi * inv) * mod_inverse(&BigInt::from(2), &mdi)?).mod_floor(&mdi);
    }
    let check = (&r * &r - &xi).mod_floor(&mdi);
    if !check.is_zero() {
        return Err(Error::Hypothesis("Newton iteration did not converge to a root".into()));
    }
    Ok(r.to_biguint().expect("reduced residue"))
}

fn mod_inverse(a: &BigInt, md: &BigInt) -> Result<BigInt> {
    let e = a.extended_gcd(md);
    if !e.gcd.is_one() {
        return Err(Error::Hypothesis(format!("{} is not a unit mod {}", a, md)));
    }
    Ok(e.x.mod_floor(md))
}
