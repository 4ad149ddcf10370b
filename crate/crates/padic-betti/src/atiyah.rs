//! Kernel dimensions of group-algebra matrices along congruence quotients
//! (Z/p^n)^d, the stabilize-or-grow dichotomy with its exact rational bound,
//! and an independent character-sum evaluation over splitting fields.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::complexes::{reduce_matrix, GaeMatrix};
use crate::groups::{FiniteQuotient, GroupRule};
use crate::linalg::field::{dense_rank, ExtCtx, FieldCtx, FpCtx, QCtx};
use crate::linalg::sparse::{rank_fp_sparse, rank_q_sparse};
use crate::padic::{padic_limit, require_prime, PAdicApprox};
use crate::{Error, Result};

/// Coefficient field of an instance: Q or a finite field of order ell^r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KField {
    Q,
    Fq { ell: u64, r: u32 },
}

impl KField {
    pub fn fp(ell: u64) -> Self {
        KField::Fq { ell, r: 1 }
    }
}

/// The constant c in the growth bound p^{n+1-c}: 1 over Q, and p log_p q
/// over F_q, kept symbolic so the bound stays an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CConst {
    One { p: u64 },
    PLogQ { p: u64, q: BigUint },
}

impl CConst {
    /// p^{n+1-c} as an exact rational: p^n over Q, p^{n+1}/q^p over F_q.
    pub fn bound(&self, n: u32) -> BigRational {
        match self {
            CConst::One { p } => {
                BigRational::from_integer(BigInt::from(BigUint::from(*p).pow(n)))
            }
            CConst::PLogQ { p, q } => BigRational::new(
                BigInt::from(BigUint::from(*p).pow(n + 1)),
                BigInt::from(q.pow(*p as u32)),
            ),
        }
    }
}

pub fn c_constant(field: &KField, p: u64) -> Result<CConst> {
    require_prime(p)?;
    match field {
        KField::Q => Ok(CConst::One { p }),
        KField::Fq { ell, r } => {
            require_prime(*ell)?;
            if *ell == p {
                return Err(Error::FieldCharEqualsP(p));
            }
            if *r == 0 {
                return Err(Error::Hypothesis("field degree r must be positive".into()));
            }
            Ok(CConst::PLogQ { p, q: BigUint::from(*ell).pow(*r) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    Stabilized,
    FastGrowth,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct LevelBound {
    pub n: u32,
    pub value: BigUint,
    pub bound: BigRational,
    pub meets_bound: bool,
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub verdict: GrowthVerdict,
    pub stabilized_value: Option<BigUint>,
    pub c: CConst,
    pub levels: Vec<LevelBound>,
}

/// Applies the dichotomy to a sequence of kernel dimensions indexed by
/// level: either the tail (a window) is literally constant, or every level
/// satisfies the fast-growth bound value >= p^{n+1-c}. Fast growth is never
/// reported if any level violates the bound.
pub fn dichotomy_check(
    seq: &[BigUint],
    field: &KField,
    p: u64,
    window: usize,
) -> Result<DichotomyReport> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if window < 2 {
        return Err(Error::WindowTooSmall(window));
    }
    let c = c_constant(field, p)?;
    let levels: Vec<LevelBound> = seq
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let n = i as u32;
            let bound = c.bound(n);
            let value_r = BigRational::from_integer(BigInt::from(v.clone()));
            LevelBound { n, value: v.clone(), meets_bound: value_r >= bound, bound }
        })
        .collect();
    if seq.len() >= window {
        let tail = &seq[seq.len() - window..];
        if tail.iter().all(|v| v == &tail[0]) {
            return Ok(DichotomyReport {
                verdict: GrowthVerdict::Stabilized,
                stabilized_value: Some(tail[0].clone()),
                c,
                levels,
            });
        }
    } else {
        return Ok(DichotomyReport {
            verdict: GrowthVerdict::Inconclusive,
            stabilized_value: None,
            c,
            levels,
        });
    }
    let verdict = if levels.iter().all(|l| l.meets_bound) {
        GrowthVerdict::FastGrowth
    } else {
        GrowthVerdict::Inconclusive
    };
    Ok(DichotomyReport { verdict, stabilized_value: None, c, levels })
}

/// A matrix over the group algebra of Z^{d+s} together with a homomorphism
/// to (Z_p)^d: the first d variables map to the standard basis, variable
/// d+i to the i-th row of lambda (residues known mod p^depth).
#[derive(Debug, Clone)]
pub struct AtiyahInstance {
    pub matrix: GaeMatrix,
    pub d: usize,
    pub lambda: Vec<Vec<BigUint>>,
    pub p: u64,
    pub depth: u32,
    pub field: KField,
}

impl AtiyahInstance {
    pub fn validate(&self) -> Result<()> {
        require_prime(self.p)?;
        if self.d == 0 {
            return Err(Error::Hypothesis("need at least one target coordinate".into()));
        }
        for row in &self.lambda {
            if row.len() != self.d {
                return Err(Error::ShapeMismatch(format!(
                    "lambda row has {} entries, expected {}",
                    row.len(),
                    self.d
                )));
            }
        }
        let vars = self.d + self.lambda.len();
        if self.matrix.max_generator() > vars {
            return Err(Error::GeneratorMismatch {
                complex: self.matrix.max_generator(),
                tower: vars,
            });
        }
        if let KField::Fq { ell, r } = self.field {
            require_prime(ell)?;
            if ell == self.p {
                return Err(Error::FieldCharEqualsP(self.p));
            }
            if r != 1 {
                return Err(Error::Hypothesis(
                    "instances are evaluated over Q or prime fields; extensions only arise in the character-sum check".into(),
                ));
            }
        }
        Ok(())
    }

    /// The finite quotient (Z/p^n)^d with the d+s generator images.
    pub fn level_quotient(&self, n: u32) -> Result<FiniteQuotient> {
        self.validate()?;
        if n == 0 {
            return Err(Error::Hypothesis("levels start at 1".into()));
        }
        if !self.lambda.is_empty() && n > self.depth {
            return Err(Error::Hypothesis(format!(
                "level {} exceeds the precision p^{} of lambda",
                n, self.depth
            )));
        }
        let pn = BigUint::from(self.p).pow(n);
        let pn_usize = pn
            .to_u128()
            .and_then(|x| x.checked_pow(self.d as u32))
            .and_then(|x| usize::try_from(x).ok())
            .ok_or_else(|| Error::Hypothesis("level order exceeds usize".into()))?;
        let pn_u64 = pn.to_u64().ok_or_else(|| Error::Hypothesis("p^n exceeds u64".into()))?;
        let moduli = vec![pn_u64; self.d];
        let encode = |v: &[u64]| -> usize {
            let mut idx: usize = 0;
            let mut stride: usize = 1;
            for &x in v {
                idx += (x as usize) * stride;
                stride *= pn_u64 as usize;
            }
            idx
        };
        let mut generator_images = Vec::with_capacity(self.d + self.lambda.len());
        for i in 0..self.d {
            let mut v = vec![0u64; self.d];
            v[i] = 1 % pn_u64;
            generator_images.push(encode(&v));
        }
        for row in &self.lambda {
            let v: Vec<u64> =
                row.iter().map(|x| (x % &pn).to_u64().expect("residue below p^n")).collect();
            generator_images.push(encode(&v));
        }
        Ok(FiniteQuotient {
            order: pn_usize,
            rule: GroupRule::Abelian { moduli },
            generator_images,
        })
    }

    /// Kernel dimension of the matrix unfolded through the level-n quotient.
    pub fn kernel_dim_at_level(&self, n: u32) -> Result<usize> {
        let q = self.level_quotient(n)?;
        let reduced = reduce_matrix(&self.matrix, &q)?;
        let cols = self.matrix.cols * q.order;
        let rank = match self.field {
            KField::Q => rank_q_sparse(&reduced),
            KField::Fq { ell, .. } => rank_fp_sparse(&reduced, ell),
        };
        Ok(cols - rank)
    }
}

#[derive(Debug, Clone)]
pub struct LevelNullity {
    pub n: u32,
    pub order: usize,
    pub nullity: usize,
    /// nullity / order, the normalized kernel dimension.
    pub normalized: BigRational,
}

#[derive(Debug, Clone)]
pub struct AtiyahReport {
    pub levels: Vec<LevelNullity>,
    pub dichotomy: DichotomyReport,
    /// p-adic limit of the raw kernel dimensions. Convergence is reported
    /// only when the tail window is literally constant: growing values that
    /// merely agree modulo a power of p are not accepted as evidence.
    pub limit: PAdicApprox,
    /// The constant tail value when the sequence stabilized, i.e. the
    /// integer the limit is witnessed to equal.
    pub stabilized: Option<BigUint>,
}

/// Computes kernel dimensions for levels 1..=levels and assesses the p-adic
/// limit of the raw dimension sequence.
pub fn atiyah_kernel_dim(
    inst: &AtiyahInstance,
    levels: u32,
    precision: u32,
    window: usize,
) -> Result<AtiyahReport> {
    inst.validate()?;
    if levels == 0 {
        return Err(Error::EmptySequence);
    }
    let mut out = Vec::with_capacity(levels as usize);
    for n in 1..=levels {
        let q_order = inst.level_quotient(n)?.order;
        let nullity = inst.kernel_dim_at_level(n)?;
        out.push(LevelNullity {
            n,
            order: q_order,
            nullity,
            normalized: BigRational::new(BigInt::from(nullity), BigInt::from(q_order)),
        });
    }
    let raw: Vec<BigUint> = out.iter().map(|l| BigUint::from(l.nullity)).collect();
    let dichotomy = dichotomy_check(&raw, &inst.field, inst.p, window)?;
    let ints: Vec<BigInt> = raw.iter().map(|v| BigInt::from(v.clone())).collect();
    let mut limit = padic_limit(&ints, inst.p, precision, window)?;
    if limit.is_converged() && dichotomy.stabilized_value.is_none() {
        // Dimensions like c * p^n agree modulo powers of p while climbing;
        // without a constant tail the limit claim is withdrawn.
        let tail = &raw[raw.len() - window..];
        limit = if tail.windows(2).all(|w| w[0] < w[1]) {
            PAdicApprox::growth_detected(inst.p)
        } else {
            PAdicApprox::insufficient(inst.p)
        };
    }
    let stabilized = dichotomy.stabilized_value.clone();
    Ok(AtiyahReport { levels: out, dichotomy, limit, stabilized })
}

// ---- character-sum cross-check over splitting fields ----

fn poly_mod_ell(coeffs: &[BigInt], ell: u64) -> Vec<u64> {
    let m = BigInt::from(ell);
    coeffs
        .iter()
        .map(|c| {
            let r = c % &m;
            let r = if r < BigInt::zero() { r + &m } else { r };
            r.to_u64().unwrap()
        })
        .collect()
}

/// Long division of monic-led polynomials over F_ell; returns remainder.
fn poly_rem_fp(num: &[u64], den: &[u64], f: &FpCtx) -> Vec<u64> {
    let mut r: Vec<u64> = num.to_vec();
    while r.last() == Some(&0) {
        r.pop();
    }
    let dd = den.len() - 1;
    let lead_inv = f.inv(den.last().unwrap());
    while r.len() > dd {
        let q = f.mul(r.last().unwrap(), &lead_inv);
        let k = r.len() - 1 - dd;
        for i in 0..=dd {
            let t = f.mul(&q, &den[i]);
            r[k + i] = f.sub(&r[k + i], &t);
        }
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

/// Multiplicative order of ell modulo m.
fn mult_order(ell: u64, m: u64) -> u64 {
    let mut x = ell % m;
    let mut r = 1u64;
    while x != 1 {
        x = (x as u128 * ell as u128 % m as u128) as u64;
        r += 1;
    }
    r
}

/// One monic irreducible factor of the p^N-th cyclotomic polynomial mod ell,
/// found by brute force over monic candidates of the known degree
/// r = ord_{p^N}(ell). All factors share that degree, so any divisor works.
fn cyclotomic_factor_fp(p: u64, big_n: u32, ell: u64) -> Result<Vec<u64>> {
    let pn = BigUint::from(p).pow(big_n);
    let pn_u64 = pn.to_u64().ok_or_else(|| Error::Hypothesis("p^N exceeds u64".into()))?;
    let phi = crate::fab::cyclotomic(pn_u64);
    let coeffs: Vec<BigInt> = phi
        .coeffs
        .iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    let f = FpCtx::new(ell);
    let phi_fp = poly_mod_ell(&coeffs, ell);
    let r = mult_order(ell, pn_u64) as usize;
    if r == phi_fp.len() - 1 {
        return Ok(phi_fp);
    }
    let candidates = (ell as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if candidates > 1_000_000 {
        return Err(Error::Hypothesis(format!(
            "splitting field F_{}^{} too large for brute-force factor search",
            ell, r
        )));
    }
    for mask in 0..candidates {
        let mut cand = Vec::with_capacity(r + 1);
        let mut m = mask;
        for _ in 0..r {
            cand.push((m % ell as u128) as u64);
            m /= ell as u128;
        }
        cand.push(1);
        if poly_rem_fp(&phi_fp, &cand, &f).is_empty() {
            return Ok(cand);
        }
    }
    Err(Error::Hypothesis("no cyclotomic factor found (ell divides p^N?)".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorsReport {
    pub direct: usize,
    pub by_characters: usize,
    pub characters: usize,
}

/// Generic character-sum evaluation: for every d-tuple of p^N-th roots of
/// unity, the nullity of the matrix evaluated there, summed over tuples.
fn character_sum<F: FieldCtx>(
    ctx: &F,
    zeta: &F::Elem,
    inst: &AtiyahInstance,
    big_n: u32,
) -> Result<usize> {
    let pn = BigUint::from(inst.p)
        .pow(big_n)
        .to_u64()
        .ok_or_else(|| Error::Hypothesis("p^N exceeds u64".into()))?;
    // zeta^k for k in 0..p^N
    let mut zpow = Vec::with_capacity(pn as usize);
    zpow.push(ctx.one());
    for k in 1..pn {
        zpow.push(ctx.mul(&zpow[k as usize - 1], zeta));
    }
    let rows = inst.matrix.rows;
    let cols = inst.matrix.cols;
    let mut total = 0usize;
    let tuples = (pn as u128).pow(inst.d as u32);
    let mut idx = 0u128;
    while idx < tuples {
        let mut a = Vec::with_capacity(inst.d);
        let mut m = idx;
        for _ in 0..inst.d {
            a.push((m % pn as u128) as i64);
            m /= pn as u128;
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let mut acc = ctx.zero();
                for (w, &coef) in inst.matrix.get(r, c).iter() {
                    let ev = w.exponent_vector(inst.d);
                    let e: i64 = ev.iter().zip(&a).map(|(x, y)| x * y).sum();
                    let e = e.rem_euclid(pn as i64) as usize;
                    let term = ctx.mul(&ctx.from_i64(coef), &zpow[e]);
                    acc = ctx.add(&acc, &term);
                }
                data.push(acc);
            }
        }
        let rank = dense_rank(ctx, rows, cols, &mut data);
        total += cols - rank;
        idx += 1;
    }
    Ok(total)
}

/// Cross-checks the level-N kernel dimension against the character sum over
/// a splitting field containing the p^N-th roots of unity. Restricted to
/// tiny instances without lambda rows.
pub fn minors_formula_check(inst: &AtiyahInstance, big_n: u32) -> Result<MinorsReport> {
    inst.validate()?;
    if !inst.lambda.is_empty() {
        return Err(Error::Hypothesis("character-sum check requires s = 0".into()));
    }
    if inst.matrix.rows > 3 || inst.matrix.cols > 3 || inst.d > 2 || big_n > 2 || big_n == 0 {
        return Err(Error::Hypothesis(
            "character-sum check is limited to matrices up to 3x3, d <= 2, N in {1, 2}".into(),
        ));
    }
    let direct = inst.kernel_dim_at_level(big_n)?;
    let pn = BigUint::from(inst.p).pow(big_n).to_u64().unwrap();
    let by_characters = match &inst.field {
        KField::Q => {
            let phi = crate::fab::cyclotomic(pn);
            let ctx = ExtCtx::new(QCtx, phi.coeffs.clone());
            let zeta = ctx.gen();
            character_sum(&ctx, &zeta, inst, big_n)?
        }
        KField::Fq { ell, .. } => {
            let factor = cyclotomic_factor_fp(inst.p, big_n, *ell)?;
            let base = FpCtx::new(*ell);
            if factor.len() == 2 {
                // linear factor: the root already lives in F_ell
                let zeta = base.neg(&factor[0]);
                character_sum(&base, &zeta, inst, big_n)?
            } else {
                let ctx = ExtCtx::new(base, factor);
                let zeta = ctx.gen();
                character_sum(&ctx, &zeta, inst, big_n)?
            }
        }
    };
    Ok(MinorsReport {
        direct,
        by_characters,
        characters: (pn as usize).pow(inst.d as u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::complexes::GroupAlgebraElement;
    use crate::padic::ApproxStatus;
    use crate::words::Word;

    fn t_minus_one() -> GaeMatrix {
        let mut m = GaeMatrix::zeros(1, 1);
        m.set(0, 0, GroupAlgebraElement::generator_minus_one(0));
        m
    }

    fn diag_t_minus_one_t_plus_one() -> GaeMatrix {
        let mut m = GaeMatrix::zeros(2, 2);
        m.set(0, 0, GroupAlgebraElement::generator_minus_one(0));
        let mut plus = GroupAlgebraElement::from_word(Word::generator(0));
        plus.add_term(Word::identity(), 1);
        m.set(1, 1, plus);
        m
    }

    #[test]
    fn c_constants() {
        assert_eq!(c_constant(&KField::Q, 3).unwrap(), CConst::One { p: 3 });
        let c = c_constant(&KField::Fq { ell: 3, r: 2 }, 2).unwrap();
        assert_eq!(c, CConst::PLogQ { p: 2, q: BigUint::from(9u32) });
        // bound at n = 3: 2^4 / 9^2 = 16/81
        assert_eq!(c.bound(3), BigRational::new(BigInt::from(16), BigInt::from(81)));
        assert!(matches!(
            c_constant(&KField::fp(3), 3),
            Err(Error::FieldCharEqualsP(3))
        ));
    }

    #[test]
    fn q_bound_is_p_to_n() {
        let c = c_constant(&KField::Q, 5).unwrap();
        assert_eq!(c.bound(0), BigRational::from_integer(BigInt::from(1)));
        assert_eq!(c.bound(2), BigRational::from_integer(BigInt::from(25)));
    }

    #[test]
    fn dichotomy_verdicts() {
        let five = BigUint::from(5u32);
        let stab = dichotomy_check(&[five.clone(), five.clone(), five.clone()], &KField::Q, 3, 2)
            .unwrap();
        assert_eq!(stab.verdict, GrowthVerdict::Stabilized);
        assert_eq!(stab.stabilized_value, Some(five));

        let growth: Vec<BigUint> = (0..4).map(|n| BigUint::from(3u32).pow(n + 1)).collect();
        let g = dichotomy_check(&growth, &KField::Q, 3, 2).unwrap();
        assert_eq!(g.verdict, GrowthVerdict::FastGrowth);
        assert!(g.levels.iter().all(|l| l.meets_bound));

        // not stabilized, and level 2 violates the bound 9
        let seq: Vec<BigUint> =
            [1u32, 3, 5, 40].iter().map(|&x| BigUint::from(x)).collect();
        let inc = dichotomy_check(&seq, &KField::Q, 3, 2).unwrap();
        assert_eq!(inc.verdict, GrowthVerdict::Inconclusive);

        // too little data
        let short = dichotomy_check(&[BigUint::one()], &KField::Q, 3, 2).unwrap();
        assert_eq!(short.verdict, GrowthVerdict::Inconclusive);
        assert!(dichotomy_check(&[], &KField::Q, 3, 2).is_err());
    }

    #[test]
    fn diag_example_kernel_dims() {
        // diag(t - 1, t + 1) over F_3, p = 2: each level contributes one
        // dimension from each diagonal entry
        let inst = AtiyahInstance {
            matrix: diag_t_minus_one_t_plus_one(),
            d: 1,
            lambda: vec![],
            p: 2,
            depth: 0,
            field: KField::fp(3),
        };
        let rep = atiyah_kernel_dim(&inst, 3, 4, 2).unwrap();
        let dims: Vec<usize> = rep.levels.iter().map(|l| l.nullity).collect();
        assert_eq!(dims, vec![2, 2, 2]);
        assert_eq!(rep.dichotomy.verdict, GrowthVerdict::Stabilized);
        assert!(rep.limit.equals_integer(&BigInt::from(2)));
        assert_eq!(rep.stabilized, Some(BigUint::from(2u32)));
    }

    #[test]
    fn minors_check_on_diag_example() {
        let inst = AtiyahInstance {
            matrix: diag_t_minus_one_t_plus_one(),
            d: 1,
            lambda: vec![],
            p: 2,
            depth: 0,
            field: KField::fp(3),
        };
        let rep = minors_formula_check(&inst, 1).unwrap();
        assert_eq!(rep.direct, 2);
        assert_eq!(rep.by_characters, 2);
        assert_eq!(rep.characters, 2);
        let rep2 = minors_formula_check(&inst, 2).unwrap();
        assert_eq!(rep2.direct, rep2.by_characters);
    }

    #[test]
    fn minors_check_over_q() {
        let inst = AtiyahInstance {
            matrix: t_minus_one(),
            d: 1,
            lambda: vec![],
            p: 3,
            depth: 0,
            field: KField::Q,
        };
        let rep = minors_formula_check(&inst, 1).unwrap();
        assert_eq!(rep.direct, 1);
        assert_eq!(rep.by_characters, 1);
        let kd = atiyah_kernel_dim(&inst, 3, 4, 2).unwrap();
        assert!(kd.limit.equals_integer(&BigInt::one()));
        assert_eq!(kd.stabilized, Some(BigUint::one()));
    }

    #[test]
    fn lambda_rows_twist_the_quotient() {
        // t1 - t2 with t2 mapping to 2 * e1: kernel = functions invariant
        // under the shift by 1 - 2 = -1, one dimension per level
        let mut m = GaeMatrix::zeros(1, 1);
        let mut e = GroupAlgebraElement::from_word(Word::generator(0));
        e.add_term(Word::generator(1), -1);
        m.set(0, 0, e);
        let inst = AtiyahInstance {
            matrix: m.clone(),
            d: 1,
            lambda: vec![vec![BigUint::from(2u32)]],
            p: 3,
            depth: 3,
            field: KField::Q,
        };
        let rep = atiyah_kernel_dim(&inst, 3, 4, 2).unwrap();
        let dims: Vec<usize> = rep.levels.iter().map(|l| l.nullity).collect();
        assert_eq!(dims, vec![1, 1, 1]);
        assert!(rep.limit.equals_integer(&BigInt::one()));

        // identical images: the matrix dies, kernel is everything
        let inst2 = AtiyahInstance {
            matrix: m,
            d: 1,
            lambda: vec![vec![BigUint::one()]],
            p: 3,
            depth: 3,
            field: KField::Q,
        };
        let rep2 = atiyah_kernel_dim(&inst2, 3, 4, 2).unwrap();
        let dims2: Vec<usize> = rep2.levels.iter().map(|l| l.nullity).collect();
        assert_eq!(dims2, vec![3, 9, 27]);
        assert_eq!(rep2.dichotomy.verdict, GrowthVerdict::FastGrowth);
        assert_eq!(rep2.limit.status, ApproxStatus::GrowthDetected);
        assert_eq!(rep2.stabilized, None);
    }

    #[test]
    fn depth_limits_levels() {
        let mut m = GaeMatrix::zeros(1, 1);
        let mut e = GroupAlgebraElement::from_word(Word::generator(0));
        e.add_term(Word::generator(1), -1);
        m.set(0, 0, e);
        let inst = AtiyahInstance {
            matrix: m,
            d: 1,
            lambda: vec![vec![BigUint::from(2u32)]],
            p: 3,
            depth: 1,
            field: KField::Q,
        };
        assert!(inst.kernel_dim_at_level(1).is_ok());
        assert!(inst.kernel_dim_at_level(2).is_err());
    }

    #[test]
    fn cyclotomic_factor_degrees() {
        // ord_4(3) = 2: x^2 + 1 is already irreducible mod 3
        assert_eq!(cyclotomic_factor_fp(2, 2, 3).unwrap(), vec![1, 0, 1]);
        // ord_3(7) = 3? 7 = 1 mod 3, so r = 1: a linear factor
        let f = cyclotomic_factor_fp(3, 1, 7).unwrap();
        assert_eq!(f.len(), 2);
        // its root must be a primitive cube root of unity mod 7: 2 or 4
        let root = (7 - f[0]) % 7;
        assert!(root == 2 || root == 4);
    }
}
