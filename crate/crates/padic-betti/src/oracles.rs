//! Independent recomputation oracles. Each pair of routes shares no
//! elimination code: minor gcds against the Smith reduction, textbook
//! rational Gauss against fraction-free ranks, an explicitly built covering
//! complex against the regular-representation reduction, and character
//! blocks over cyclotomic fields against direct kernels.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexes::{from_presentation, GaeMatrix, GroupAlgebraElement, ChainComplexSpec};
use crate::engine::{betti_at_level, torsion_at_level, FieldSpec};
use crate::fab::cyclotomic;
use crate::groups::{cyclic_table, FiniteQuotient};
use crate::linalg::dense::{rank_q, smith_normal_form, IntMatrix};
use crate::linalg::field::{dense_rank, ExtCtx, FieldCtx, QCtx};
use crate::linalg::sparse::rank_q_sparse;
use crate::words::Word;
use crate::{Error, Result};

// ---- determinants and minors, cofactor route ----

fn minor_det(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let mut acc = BigInt::zero();
    let sub_rows = &rows[1..];
    for (k, &c) in cols.iter().enumerate() {
        let e = m.get(rows[0], c);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> =
            cols.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
        let t = e * minor_det(m, sub_rows, &rest);
        if k % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - (k - i) {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Smith invariant factors via minor gcds: s_k = d_k / d_{k-1} where d_k is
/// the gcd of all k x k minors. Exponential in the size; capped at 5 x 5.
pub fn oracle_snf_minor_gcd(m: &IntMatrix) -> Result<Vec<BigUint>> {
    if m.rows > 5 || m.cols > 5 {
        return Err(Error::Hypothesis("minor-gcd oracle is capped at 5x5".into()));
    }
    if m.rows == 0 || m.cols == 0 {
        return Ok(Vec::new());
    }
    let mut factors = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=m.rows.min(m.cols) {
        let mut g = BigInt::zero();
        let mut rs: Vec<usize> = (0..k).collect();
        loop {
            let mut cs: Vec<usize> = (0..k).collect();
            loop {
                g = g.gcd(&minor_det(m, &rs, &cs));
                if !next_combination(&mut cs, m.cols) {
                    break;
                }
            }
            if !next_combination(&mut rs, m.rows) {
                break;
            }
        }
        if g.is_zero() {
            break;
        }
        let (q, r) = g.div_rem(&prev);
        debug_assert!(r.is_zero(), "minor gcds form a divisibility chain");
        factors.push(q.magnitude().clone());
        prev = g;
    }
    Ok(factors)
}

// ---- textbook rational Gauss ----

/// Row-reduction rank over Q with explicit fractions; no pivoting tricks.
pub fn oracle_rank_gauss(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows)
        .map(|r| (0..m.cols).map(|c| BigRational::from_integer(m.get(r, c).clone())).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..m.cols {
        let Some(pr) = (rank..m.rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, pr);
        let inv = BigRational::one() / a[rank][col].clone();
        for c in col..m.cols {
            let v = &a[rank][c] * &inv;
            a[rank][c] = v;
        }
        for r in 0..m.rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..m.cols {
                    let s = &a[rank][c] * &f;
                    a[r][c] -= s;
                }
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    rank
}

// ---- explicit covering complex ----

/// Unfolds a boundary matrix over the cover with deck group Q by placing one
/// cell copy per group element: the lift of cell m at sheet s meets the lift
/// of cell i at sheet s * image(w). Built without the regular-representation
/// machinery.
pub fn oracle_cover_boundary(mat: &GaeMatrix, q: &FiniteQuotient) -> IntMatrix {
    let n = q.order;
    let mut out = IntMatrix::zeros(mat.rows * n, mat.cols * n);
    for mcell in 0..mat.rows {
        for icell in 0..mat.cols {
            for (w, &coef) in mat.get(mcell, icell).iter() {
                let g = q.word_image(w);
                for s in 0..n {
                    let t = q.mul(s, g);
                    let r = mcell * n + s;
                    let c = icell * n + t;
                    let v = out.get(r, c) + BigInt::from(coef);
                    out.set(r, c, v);
                }
            }
        }
    }
    out
}

/// Betti number of the cover in degree j over Q, via the explicit covering
/// complex and rational Gauss. |Q| is capped to keep the dense route honest.
pub fn oracle_cover_betti(c: &ChainComplexSpec, q: &FiniteQuotient, j: usize) -> Result<usize> {
    c.validate()?;
    if q.order > 24 {
        return Err(Error::Hypothesis("cover oracle is capped at |Q| = 24".into()));
    }
    if j > c.max_computable_degree() {
        return Err(Error::DegreeOutOfRange { degree: j, dim: c.max_computable_degree() });
    }
    let dim = c.ranks[j] * q.order;
    let up = match c.boundaries.get(j) {
        Some(b) => oracle_rank_gauss(&oracle_cover_boundary(b, q)),
        None => 0,
    };
    let down =
        if j >= 1 { oracle_rank_gauss(&oracle_cover_boundary(&c.boundaries[j - 1], q)) } else { 0 };
    Ok(dim - up - down)
}

/// Torsion of H^j of the cover away from p, via the explicit covering
/// complex and the minor-free Smith reduction.
pub fn oracle_cover_torsion(
    c: &ChainComplexSpec,
    q: &FiniteQuotient,
    p: u64,
    j: usize,
) -> Result<BigUint> {
    c.validate()?;
    if q.order > 24 {
        return Err(Error::Hypothesis("cover oracle is capped at |Q| = 24".into()));
    }
    if j == 0 {
        return Ok(BigUint::one());
    }
    if j > c.max_computable_degree() {
        return Err(Error::DegreeOutOfRange { degree: j, dim: c.max_computable_degree() });
    }
    let b = oracle_cover_boundary(&c.boundaries[j - 1], q);
    let mut t = BigUint::one();
    for f in smith_normal_form(&b) {
        if !f.is_zero() {
            let u = crate::padic::p_prime_part(&BigInt::from(f), p)?;
            t *= u.magnitude();
        }
    }
    Ok(t)
}

// ---- character blocks over cyclotomic fields ----

fn divisors(k: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=k).filter(|d| k % d == 0).collect();
    out.sort_unstable();
    out
}

/// Nullity over Q of the Z/k unfolding of a one-variable matrix, computed
/// blockwise: Q[Z/k] splits into cyclotomic fields Q(zeta_d) for d | k, each
/// contributing phi(d) copies of the nullity at a primitive d-th root.
pub fn oracle_character_kernel(mat: &GaeMatrix, k: u64) -> Result<usize> {
    if k == 0 {
        return Err(Error::Hypothesis("need a positive cyclic order".into()));
    }
    if mat.max_generator() > 1 {
        return Err(Error::Hypothesis("character oracle handles one variable".into()));
    }
    let mut total = 0usize;
    for d in divisors(k) {
        let phi = cyclotomic(d);
        let deg = phi.degree();
        let ctx = ExtCtx::new(QCtx, phi.coeffs.clone());
        let zeta = ctx.gen();
        // zeta^e for e in 0..d
        let mut zpow = Vec::with_capacity(d as usize);
        zpow.push(ctx.one());
        for e in 1..d {
            zpow.push(ctx.mul(&zpow[e as usize - 1], &zeta));
        }
        let mut data = Vec::with_capacity(mat.rows * mat.cols);
        for r in 0..mat.rows {
            for c in 0..mat.cols {
                let mut acc = ctx.zero();
                for (w, &coef) in mat.get(r, c).iter() {
                    let e = w.exponent_vector(1)[0].rem_euclid(d as i64) as usize;
                    let term = ctx.mul(&ctx.from_i64(coef), &zpow[e]);
                    acc = ctx.add(&acc, &term);
                }
                data.push(acc);
            }
        }
        let rank = dense_rank(&ctx, mat.rows, mat.cols, &mut data);
        total += deg * (mat.cols - rank);
    }
    Ok(total)
}

// ---- randomized cross-validation ----

#[derive(Debug, Clone)]
pub struct OraclePair {
    pub name: &'static str,
    pub instances: usize,
    pub agreements: usize,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub seed: u64,
    pub pairs: Vec<OraclePair>,
}

impl OracleReport {
    pub fn all_agree(&self) -> bool {
        self.pairs.iter().all(|p| p.agreements == p.instances)
    }
}

fn random_int_matrix(rng: &mut ChaCha8Rng, max_dim: usize, max_abs: i64) -> IntMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let mut m = IntMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, BigInt::from(rng.gen_range(-max_abs..=max_abs)));
        }
    }
    m
}

fn random_one_var_gae(rng: &mut ChaCha8Rng) -> GaeMatrix {
    let rows = rng.gen_range(1..=2);
    let cols = rng.gen_range(1..=3);
    let mut m = GaeMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut e = GroupAlgebraElement::zero();
            for _ in 0..rng.gen_range(0..=3) {
                let exp: i64 = rng.gen_range(-2..=2);
                let coef: i64 = rng.gen_range(-2..=2);
                let mut w = Word::identity();
                let g = Word::generator(0);
                let step = if exp >= 0 { g.clone() } else { g.inverse() };
                for _ in 0..exp.abs() {
                    w = w.mul(&step);
                }
                e.add_term(w, coef);
            }
            m.set(r, c, e);
        }
    }
    m
}

fn random_word(rng: &mut ChaCha8Rng, gens: usize, len: usize) -> Word {
    let mut w = Word::identity();
    for _ in 0..len {
        let g = Word::generator(rng.gen_range(0..gens));
        if rng.gen_bool(0.5) {
            w = w.mul(&g);
        } else {
            w = w.mul(&g.inverse());
        }
    }
    w
}

/// Cross-validates every oracle pair on `per_pair` random instances.
pub fn run_self_check(seed: u64, per_pair: usize) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();

    // Smith reduction vs minor gcds
    let mut ok = 0;
    for _ in 0..per_pair {
        let m = random_int_matrix(&mut rng, 4, 4);
        if smith_normal_form(&m) == oracle_snf_minor_gcd(&m)? {
            ok += 1;
        }
    }
    pairs.push(OraclePair { name: "smith-vs-minor-gcd", instances: per_pair, agreements: ok });

    // fraction-free ranks vs rational Gauss, dense and sparse
    let mut ok = 0;
    for _ in 0..per_pair {
        let m = random_int_matrix(&mut rng, 5, 6);
        let reference = oracle_rank_gauss(&m);
        let mut sparse = crate::linalg::sparse::SparseIntMatrix::zeros(m.rows, m.cols);
        for r in 0..m.rows {
            for c in 0..m.cols {
                if !m.get(r, c).is_zero() {
                    sparse.add_entry(r, c, m.get(r, c).try_into().expect("small entry"));
                }
            }
        }
        if rank_q(&m) == reference && rank_q_sparse(&sparse) == reference {
            ok += 1;
        }
    }
    pairs.push(OraclePair { name: "rank-vs-rational-gauss", instances: per_pair, agreements: ok });

    // regular-representation reduction vs cyclotomic character blocks
    let mut ok = 0;
    for _ in 0..per_pair {
        let mat = random_one_var_gae(&mut rng);
        let k = rng.gen_range(1..=10u64);
        let q = cyclic_table(k);
        let reduced = crate::complexes::reduce_matrix(&mat, &q)?;
        let direct = mat.cols * k as usize - rank_q_sparse(&reduced);
        if direct == oracle_character_kernel(&mat, k)? {
            ok += 1;
        }
    }
    pairs.push(OraclePair { name: "reduce-vs-characters", instances: per_pair, agreements: ok });

    // engine invariants vs the explicit covering complex
    let mut ok = 0;
    let mut done = 0;
    while done < per_pair {
        let len = rng.gen_range(1..=4);
        let rel = random_word(&mut rng, 2, len);
        let Ok(c) = from_presentation(2, &[rel]) else { continue };
        let k = rng.gen_range(2..=8u64);
        let mut q = cyclic_table(k);
        q.generator_images = vec![1, rng.gen_range(0..k as usize)];
        done += 1;
        let b = betti_at_level(&c, &q, FieldSpec::Q, 1)?;
        let t = torsion_at_level(&c, &q, 7, 2)?;
        if b == oracle_cover_betti(&c, &q, 1)? && t == oracle_cover_torsion(&c, &q, 7, 2)? {
            ok += 1;
        }
    }
    pairs.push(OraclePair { name: "engine-vs-cover", instances: per_pair, agreements: ok });

    Ok(OracleReport { seed, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::surface;

    #[test]
    fn minor_gcd_matches_smith_on_known_matrix() {
        let m = IntMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith_normal_form(&m);
        let o = oracle_snf_minor_gcd(&m).unwrap();
        assert_eq!(s, o);
        assert_eq!(o[0], BigUint::from(2u32));
    }

    #[test]
    fn gauss_rank_on_singular_matrix() {
        let m = IntMatrix::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(oracle_rank_gauss(&m), 1);
        assert_eq!(rank_q(&m), 1);
    }

    #[test]
    fn genus_two_double_cover_has_b1_six() {
        // chi of the double cover is 2 * (2 - 4) = -4, so b1 = 6
        let c = surface(2);
        let mut q = cyclic_table(2);
        q.generator_images = vec![1, 0, 0, 0];
        assert_eq!(oracle_cover_betti(&c, &q, 1).unwrap(), 6);
        assert_eq!(betti_at_level(&c, &q, FieldSpec::Q, 1).unwrap(), 6);
    }

    #[test]
    fn character_kernel_on_t_minus_one() {
        let mut m = GaeMatrix::zeros(1, 1);
        m.set(0, 0, GroupAlgebraElement::generator_minus_one(0));
        // only the trivial character kills t - 1
        for k in 1..=6 {
            assert_eq!(oracle_character_kernel(&m, k).unwrap(), 1, "k = {}", k);
        }
    }

    #[test]
    fn self_check_agrees_everywhere() {
        let rep = run_self_check(0xC0FFEE, 12).unwrap();
        assert!(rep.all_agree(), "{:?}", rep.pairs);
        assert_eq!(rep.pairs.len(), 4);
    }
}
