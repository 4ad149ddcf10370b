//! Infinite cyclic covers and knot complements: Betti numbers from root
//! counts of invariant factors inside the group of (m p^infinity)-th roots
//! of unity.
//!
//! All counting happens over Q via exact polynomial gcds; t^K - 1 for huge K
//! is never materialized (t^K is computed modulo the target polynomial).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::complexes::GaeMatrix;
use crate::padic::require_prime;
use crate::{Error, Result};

// ---- polynomials over Q ----

/// Dense polynomial over Q; coefficient i belongs to t^i; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn monomial(c: BigRational, exp: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); exp + 1];
        coeffs[exp] = c;
        QPoly { coeffs }
    }

    pub fn from_int_coeffs(c: &[BigInt]) -> Self {
        let coeffs = c.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        QPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        QPoly { coeffs }.trimmed()
    }

    pub fn neg(&self) -> Self {
        QPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QPoly { coeffs }.trimmed()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        QPoly { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// (quotient, remainder) with deg r < deg divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.degree() < divisor.degree() {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead_inv = BigRational::one() / divisor.leading().clone();
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] * &lead_inv;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                let delta = &q * c;
                rem[i - dd + j] -= delta;
            }
            quot[i - dd] = q;
        }
        (QPoly { coeffs: quot }.trimmed(), QPoly { coeffs: rem }.trimmed())
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = BigRational::one() / self.leading().clone();
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        QPoly { coeffs }.trimmed()
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// f / gcd(f, f'): same roots, squarefree.
    pub fn radical(&self) -> Self {
        assert!(!self.is_zero());
        let g = self.gcd(&self.derivative());
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q.monic()
    }

    /// t^e mod self, with e arbitrary size.
    pub fn modpow_t(&self, e: &BigUint) -> Self {
        assert!(!self.is_zero() && self.degree() >= 1);
        let mut result = QPoly::one();
        let mut base = QPoly::monomial(BigRational::one(), 1).rem(self);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(self);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(self);
            }
        }
        result
    }

    /// Evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigRational {
        let xr = BigRational::from_integer(x.clone());
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &xr + c;
        }
        acc
    }

    /// Order of vanishing at t = 0.
    pub fn t_valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Strips the t^a unit factor (for factor classes over Q[t, 1/t]).
    pub fn strip_t_power(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let v = self.t_valuation();
        QPoly { coeffs: self.coeffs[v..].to_vec() }
    }
}

/// deg gcd(f, t^K - 1) without building t^K - 1: gcd(f, (t^K mod f) - 1).
fn common_root_count(f: &QPoly, order: &BigUint) -> usize {
    if f.is_zero() || f.degree() == 0 {
        return 0;
    }
    let g = f.modpow_t(order).sub(&QPoly::one());
    // gcd(f, 0) = f covers the case t^K = 1 mod f
    f.gcd(&g).degree()
}

// ---- root counts in mu(m p^infinity) ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCountResult {
    /// Number of distinct roots lying in mu(m p^infinity).
    pub count: usize,
    /// First level n0 at which the count is already final.
    pub stabilized_at: u32,
    /// m * p^n0: every counted root has this order (as a divisor).
    pub witness_order: BigUint,
}

/// Counts distinct roots of f inside mu(m p^infinity) = {z : z^{m p^n} = 1}.
///
/// A primitive (m' p^a)-th root of unity has minimal polynomial of degree
/// phi(m' p^a) >= phi(p^a), so phi(p^a) <= deg radical(f) bounds the p-part
/// of any root's order; counting at that level is final. (Scanning until two
/// consecutive counts agree is not sound: orders can skip levels, e.g. a
/// polynomial with roots of orders p and p^3 only.)
pub fn count_roots_mu(f: &[BigInt], m: u64, p: u64) -> Result<RootCountResult> {
    require_prime(p)?;
    if m == 0 || num_integer::gcd(m, p) != 1 {
        return Err(Error::Hypothesis(format!("m = {} must be positive and coprime to p = {}", m, p)));
    }
    let fq = QPoly::from_int_coeffs(f);
    if fq.is_zero() {
        return Err(Error::Hypothesis("zero polynomial has no meaningful root count".into()));
    }
    count_roots_mu_q(&fq, m, p)
}

pub fn count_roots_mu_q(fq: &QPoly, m: u64, p: u64) -> Result<RootCountResult> {
    let rad = fq.radical();
    if rad.degree() == 0 {
        return Ok(RootCountResult { count: 0, stabilized_at: 0, witness_order: BigUint::from(m) });
    }
    let deg = rad.degree() as u64;
    // largest a with phi(p^a) <= deg
    let mut a_max: u32 = 0;
    let mut phi = p - 1; // phi(p^{a_max+1})
    while phi <= deg {
        a_max += 1;
        if a_max > 40 {
            return Err(Error::Hypothesis(
                "root-of-unity order bound exceeds p^40; degree too large".into(),
            ));
        }
        phi = match phi.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    let count_at = |n: u32| -> usize {
        let order = BigUint::from(m) * BigUint::from(p).pow(n);
        common_root_count(&rad, &order)
    };
    let final_count = count_at(a_max);
    let mut stabilized_at = a_max;
    for n in 0..a_max {
        if count_at(n) == final_count {
            stabilized_at = n;
            break;
        }
    }
    Ok(RootCountResult {
        count: final_count,
        stabilized_at,
        witness_order: BigUint::from(m) * BigUint::from(p).pow(stabilized_at),
    })
}

/// b_1 of a knot complement's (m p^infinity)-cover system:
/// 1 + sum over knot polynomials of their root counts. Every supplied
/// polynomial must satisfy |f(1)| = 1, as genuine knot polynomials do.
pub fn knot_b1(deltas: &[Vec<BigInt>], m: u64, p: u64) -> Result<(usize, Vec<RootCountResult>)> {
    let mut counts = Vec::with_capacity(deltas.len());
    let mut total = 1usize;
    for d in deltas {
        let fq = QPoly::from_int_coeffs(d);
        if fq.is_zero() {
            return Err(Error::Hypothesis("zero polynomial is not a knot polynomial".into()));
        }
        let at_one = fq.eval_int(&BigInt::one());
        if at_one.abs() != BigRational::one() {
            return Err(Error::Hypothesis(format!(
                "knot polynomial must satisfy |f(1)| = 1, got {}",
                at_one
            )));
        }
        let r = count_roots_mu(d, m, p)?;
        total += r.count;
        counts.push(r);
    }
    Ok((total, counts))
}

// ---- Laurent matrices over Q[t, 1/t] ----

/// Laurent polynomial: poly * t^min_exp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub poly: QPoly,
    pub min_exp: i64,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { poly: QPoly::zero(), min_exp: 0 }
    }

    pub fn term(c: BigRational, exp: i64) -> Self {
        LaurentPoly { poly: QPoly::monomial(c, 0), min_exp: exp }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn normalized(mut self) -> Self {
        if self.poly.is_zero() {
            self.min_exp = 0;
            return self;
        }
        let v = self.poly.t_valuation();
        if v > 0 {
            self.poly = QPoly { coeffs: self.poly.coeffs[v..].to_vec() };
            self.min_exp += v as i64;
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let base = self.min_exp.min(other.min_exp);
        let a = QPoly::monomial(BigRational::one(), (self.min_exp - base) as usize).mul(&self.poly);
        let b =
            QPoly::monomial(BigRational::one(), (other.min_exp - base) as usize).mul(&other.poly);
        LaurentPoly { poly: a.add(&b), min_exp: base }.normalized()
    }

    pub fn mul(&self, other: &Self) -> Self {
        LaurentPoly { poly: self.poly.mul(&other.poly), min_exp: self.min_exp + other.min_exp }
            .normalized()
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { poly: self.poly.neg(), min_exp: self.min_exp }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LaurentMatrix { rows, cols, entries: vec![LaurentPoly::zero(); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: LaurentPoly) {
        self.entries[r * self.cols + c] = e;
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

/// Specializes a group-algebra matrix along a character sending generator i
/// to t^{weights[i]}.
pub fn laurent_from_gae(mat: &GaeMatrix, weights: &[i64]) -> LaurentMatrix {
    let mut out = LaurentMatrix::zeros(mat.rows, mat.cols);
    for r in 0..mat.rows {
        for c in 0..mat.cols {
            let mut acc = LaurentPoly::zero();
            for (w, &coef) in mat.get(r, c).iter() {
                let ev = w.exponent_vector(weights.len());
                let e: i64 = ev.iter().zip(weights).map(|(a, b)| a * b).sum();
                acc = acc.add(&LaurentPoly::term(
                    BigRational::from_integer(BigInt::from(coef)),
                    e,
                ));
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Smith normal form over Q[t]: returns monic nonzero invariant factors.
fn poly_smith(mut m: Vec<Vec<QPoly>>) -> Vec<QPoly> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut factors = Vec::new();
    let mut t = 0usize;
    'outer: while t < rows.min(cols) {
        // smallest-degree nonzero entry in the submatrix
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() {
                    let d = m[i][j].degree();
                    if best.map_or(true, |(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        // reduce column and row by the pivot until clean
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].div_rem(&m[t][t]);
                for j in t..cols {
                    let delta = q.mul(&m[t][j]);
                    m[i][j] = m[i][j].sub(&delta);
                }
                debug_assert_eq!(m[i][t], r);
                if !r.is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].div_rem(&m[t][t]);
                for i in t..rows {
                    let delta = q.mul(&m[i][t]);
                    m[i][j] = m[i][j].sub(&delta);
                }
                debug_assert_eq!(m[t][j], r);
                if !r.is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        // divisibility: pivot must divide every remaining entry
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !m[i][j].is_zero() && !m[i][j].rem(&m[t][t]).is_zero() {
                    // fold the offending row into the pivot row and restart
                    for jj in t..cols {
                        let add = m[i][jj].clone();
                        m[t][jj] = m[t][jj].add(&add);
                    }
                    continue 'outer;
                }
            }
        }
        factors.push(m[t][t].monic());
        t += 1;
    }
    factors
}

/// Invariant factors over Q[t, 1/t]: monic, t-power units stripped.
pub fn laurent_invariant_factors(m: &LaurentMatrix) -> Vec<QPoly> {
    if m.rows == 0 || m.cols == 0 {
        return Vec::new();
    }
    let shift = m.entries.iter().filter(|e| !e.is_zero()).map(|e| e.min_exp).min().unwrap_or(0);
    let grid: Vec<Vec<QPoly>> = (0..m.rows)
        .map(|r| {
            (0..m.cols)
                .map(|c| {
                    let e = m.get(r, c);
                    if e.is_zero() {
                        QPoly::zero()
                    } else {
                        QPoly::monomial(BigRational::one(), (e.min_exp - shift) as usize)
                            .mul(&e.poly)
                    }
                })
                .collect()
        })
        .collect();
    poly_smith(grid).into_iter().map(|f| f.strip_t_power().monic()).collect()
}

/// Certificate for a cyclic-cover Betti computation: the invariant factors
/// of the two boundary matrices and their root counts.
#[derive(Debug, Clone)]
pub struct CyclicCertificate {
    pub down_factors: Vec<QPoly>,
    pub up_factors: Vec<QPoly>,
    pub down_counts: Vec<RootCountResult>,
    pub up_counts: Vec<RootCountResult>,
}

impl CyclicCertificate {
    pub fn total_count(&self) -> usize {
        self.down_counts.iter().chain(&self.up_counts).map(|r| r.count).sum()
    }
}

/// The limit Betti number of degree j for an infinite cyclic cover system:
/// the sum of root counts over the invariant factors of A_j (down) and
/// A_{j+1} (up). When both matrices are present they must compose to zero.
pub fn cyclic_cover_bj(
    down: Option<&LaurentMatrix>,
    up: Option<&LaurentMatrix>,
    m: u64,
    p: u64,
) -> Result<(usize, CyclicCertificate)> {
    if let (Some(d), Some(u)) = (down, up) {
        if u.cols != d.rows {
            return Err(Error::ShapeMismatch(format!(
                "composition shape: up is {}x{}, down is {}x{}",
                u.rows, u.cols, d.rows, d.cols
            )));
        }
        if !u.mul(d).is_zero() {
            return Err(Error::Hypothesis(
                "boundary matrices must compose to zero over Q[t, 1/t]".into(),
            ));
        }
    }
    let down_factors = down.map(laurent_invariant_factors).unwrap_or_default();
    let up_factors = up.map(laurent_invariant_factors).unwrap_or_default();
    let mut down_counts = Vec::new();
    for f in &down_factors {
        down_counts.push(count_roots_mu_q(f, m, p)?);
    }
    let mut up_counts = Vec::new();
    for f in &up_factors {
        up_counts.push(count_roots_mu_q(f, m, p)?);
    }
    let cert = CyclicCertificate { down_factors, up_factors, down_counts, up_counts };
    Ok((cert.total_count(), cert))
}

/// Betti number of the finite quotient at level n of the cyclic system:
/// (m p^n)(e_j - u - v) + sum of level-n root counts of all factors.
pub fn cyclic_cover_level_formula(
    e_j: usize,
    cert: &CyclicCertificate,
    m: u64,
    p: u64,
    n: u32,
) -> BigInt {
    let order = BigInt::from(m) * BigInt::from(p).pow(n);
    let u = cert.down_factors.len() as i64;
    let v = cert.up_factors.len() as i64;
    let k = BigUint::from(m) * BigUint::from(p).pow(n);
    let mut counts = 0usize;
    for f in cert.down_factors.iter().chain(&cert.up_factors) {
        counts += common_root_count(&f.radical(), &k);
    }
    order * BigInt::from(e_j as i64 - u - v) + BigInt::from(counts)
}

/// Parses polynomials like "t^2-t+1", "3t^4 + 2", "-t".
pub fn parse_int_poly(s: &str) -> Result<Vec<BigInt>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let bytes = compact.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        if i >= bytes.len() {
            return Err(Error::Parse(format!("dangling sign in {:?}", s)));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff = if start == i {
            BigInt::one()
        } else {
            compact[start..i].parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?
        };
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        let exp = if i < bytes.len() && bytes[i] == b't' {
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let es = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if es == i {
                    return Err(Error::Parse(format!("missing exponent in {:?}", s)));
                }
                compact[es..i].parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?
            } else {
                1
            }
        } else {
            if start == i {
                return Err(Error::Parse(format!("unexpected character at {:?}", &compact[i..])));
            }
            0
        };
        terms.push((sign * coeff, exp));
    }
    let deg = terms.iter().map(|&(_, e)| e).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (c, e) in terms {
        coeffs[e] += c;
    }
    while coeffs.last().map_or(false, |c| c.is_zero()) {
        coeffs.pop();
    }
    Ok(coeffs)
}
