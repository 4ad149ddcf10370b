//! Chain complexes of based free modules over a free-group algebra, with
//! boundary entries written as integer combinations of free words.
//!
//! `boundaries[k]` is the boundary map from degree k+1 to degree k, with one
//! row per (k+1)-cell and one column per k-cell. Words are never rewritten
//! using relations of any quotient: the quotient happens in `reduce_matrix`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::groups::FiniteQuotient;
use crate::linalg::SparseIntMatrix;
use crate::words::Word;
use crate::{Error, Result};

/// An element of the integral group algebra of a free group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    terms: BTreeMap<Word, i64>,
}

impl GroupAlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, 1);
        GroupAlgebraElement { terms }
    }

    /// g - 1 for the 0-based generator index.
    pub fn generator_minus_one(gen: usize) -> Self {
        let mut e = Self::from_word(Word::generator(gen));
        e.add_term(Word::identity(), -1);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(w).or_insert(0);
        *entry += c;
        if *entry == 0 {
            let dead: Vec<Word> =
                self.terms.iter().filter(|(_, &v)| v == 0).map(|(k, _)| k.clone()).collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupAlgebraElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        GroupAlgebraElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                out.add_term(u.mul(v), a * b);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &i64)> {
        self.terms.iter()
    }

    pub fn shift_generators(&self, shift: usize) -> Self {
        GroupAlgebraElement {
            terms: self.terms.iter().map(|(w, &c)| (w.shift_generators(shift), c)).collect(),
        }
    }

    pub fn max_generator(&self) -> usize {
        self.terms.keys().map(|w| w.max_generator()).max().unwrap_or(0)
    }
}

/// Fox derivative with respect to the 0-based generator index:
/// d(uv) = du + u dv, d(g) = 1, d(g^-1) = -g^-1.
pub fn fox_derivative(w: &Word, gen: usize) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::zero();
    let mut prefix = Word::identity();
    for &l in w.letters() {
        let idx = l.unsigned_abs() as usize - 1;
        if l > 0 {
            if idx == gen {
                out.add_term(prefix.clone(), 1);
            }
            prefix = prefix.mul(&Word::generator(idx));
        } else {
            prefix = prefix.mul(&Word::generator(idx).inverse());
            if idx == gen {
                out.add_term(prefix.clone(), -1);
            }
        }
    }
    out
}

/// Dense matrix over the group algebra (boundary matrices are tiny).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaeMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<GroupAlgebraElement>,
}

impl GaeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GaeMatrix { rows, cols, entries: vec![GroupAlgebraElement::zero(); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &GroupAlgebraElement {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: GroupAlgebraElement) {
        self.entries[r * self.cols + c] = e;
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = GroupAlgebraElement::zero();
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

    pub fn max_generator(&self) -> usize {
        self.entries.iter().map(|e| e.max_generator()).max().unwrap_or(0)
    }

    pub fn shift_generators(&self, shift: usize) -> Self {
        GaeMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.shift_generators(shift)).collect(),
        }
    }
}

/// A finite complex of based free modules over the group algebra of a free
/// group on `num_gens` generators. `boundaries[k]` maps degree k+1 to degree
/// k and has shape (ranks[k+1], ranks[k]).
///
/// `complete` marks the full cellular complex of a space (every degree up to
/// the top is meaningful); a truncated resolution must set it to false, and
/// then only degrees strictly below the top are computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplexSpec {
    pub num_gens: usize,
    pub ranks: Vec<usize>,
    pub boundaries: Vec<GaeMatrix>,
    pub complete: bool,
}

impl ChainComplexSpec {
    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn max_computable_degree(&self) -> usize {
        if self.complete {
            self.top_degree()
        } else {
            self.top_degree().saturating_sub(1)
        }
    }

    /// Shape bookkeeping and generator-range checks.
    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() {
            return Err(Error::ShapeMismatch("a complex needs at least one rank".into()));
        }
        if self.boundaries.len() + 1 != self.ranks.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} ranks need {} boundary matrices, got {}",
                self.ranks.len(),
                self.ranks.len() - 1,
                self.boundaries.len()
            )));
        }
        for (k, b) in self.boundaries.iter().enumerate() {
            if b.rows != self.ranks[k + 1] || b.cols != self.ranks[k] {
                return Err(Error::ShapeMismatch(format!(
                    "boundary {} has shape {}x{}, expected {}x{}",
                    k,
                    b.rows,
                    b.cols,
                    self.ranks[k + 1],
                    self.ranks[k]
                )));
            }
            if b.max_generator() > self.num_gens {
                return Err(Error::ShapeMismatch(format!(
                    "boundary {} uses generator {} but the complex has {}",
                    k,
                    b.max_generator(),
                    self.num_gens
                )));
            }
        }
        Ok(())
    }

    /// Euler characteristic of the underlying finite complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(j, &e)| if j % 2 == 0 { e as i64 } else { -(e as i64) })
            .sum()
    }
}

/// The matrix of the right regular representation applied entrywise: block
/// (i, m) is sum of coeff * P(image of word), where P(g) delta_q = delta_{q g^-1}.
pub fn reduce_matrix(mat: &GaeMatrix, q: &FiniteQuotient) -> Result<SparseIntMatrix> {
    if mat.max_generator() > q.generator_images.len() {
        return Err(Error::GeneratorMismatch {
            complex: mat.max_generator(),
            tower: q.generator_images.len(),
        });
    }
    let ord = q.order;
    let mut out = SparseIntMatrix::zeros(mat.rows * ord, mat.cols * ord);
    for i in 0..mat.rows {
        for m in 0..mat.cols {
            for (w, &c) in mat.get(i, m).iter() {
                let gi = q.inv(q.word_image(w));
                for x in 0..ord {
                    out.add_entry(i * ord + q.mul(x, gi), m * ord + x, c);
                }
            }
        }
    }
    Ok(out)
}

// ---- builders ----

/// Circle: one 0-cell, one 1-cell, boundary t - 1.
pub fn circle() -> ChainComplexSpec {
    let mut b = GaeMatrix::zeros(1, 1);
    b.set(0, 0, GroupAlgebraElement::generator_minus_one(0));
    ChainComplexSpec { num_gens: 1, ranks: vec![1, 1], boundaries: vec![b], complete: true }
}

/// Sphere of dimension n >= 2: one 0-cell and one n-cell, trivial group.
pub fn cw_sphere(n: usize) -> ChainComplexSpec {
    assert!(n >= 2, "use circle() for n = 1");
    let mut ranks = vec![0usize; n + 1];
    ranks[0] = 1;
    ranks[n] = 1;
    let boundaries = (0..n).map(|k| GaeMatrix::zeros(ranks[k + 1], ranks[k])).collect();
    ChainComplexSpec { num_gens: 0, ranks, boundaries, complete: true }
}

/// Wedge of two based complexes (both must have a single 0-cell). The second
/// factor's generators are shifted past the first's.
pub fn wedge(x: &ChainComplexSpec, y: &ChainComplexSpec) -> Result<ChainComplexSpec> {
    x.validate()?;
    y.validate()?;
    if x.ranks[0] != 1 || y.ranks[0] != 1 {
        return Err(Error::ShapeMismatch("wedge factors need a single 0-cell".into()));
    }
    let top = x.top_degree().max(y.top_degree());
    let rx = |k: usize| x.ranks.get(k).copied().unwrap_or(0);
    let ry = |k: usize| y.ranks.get(k).copied().unwrap_or(0);
    let mut ranks = vec![1usize];
    for k in 1..=top {
        ranks.push(rx(k) + ry(k));
    }
    let yshift = x.num_gens;
    let mut boundaries = Vec::new();
    for k in 0..top {
        let mut b = GaeMatrix::zeros(ranks[k + 1], ranks[k]);
        let (xb, yb) = (x.boundaries.get(k), y.boundaries.get(k));
        // degree-(k+1) rows: x cells first, then y cells
        if let Some(xb) = xb {
            for r in 0..xb.rows {
                for c in 0..xb.cols {
                    b.set(r, c, xb.get(r, c).clone());
                }
            }
        }
        if let Some(yb) = yb {
            let roff = rx(k + 1);
            let coff = if k == 0 { 0 } else { rx(k) };
            for r in 0..yb.rows {
                for c in 0..yb.cols {
                    b.set(roff + r, coff + c, yb.get(r, c).shift_generators(yshift));
                }
            }
        }
        boundaries.push(b);
    }
    Ok(ChainComplexSpec {
        num_gens: x.num_gens + y.num_gens,
        ranks,
        boundaries,
        complete: x.complete && y.complete,
    })
}

/// Position bookkeeping for the product basis: degree-k cells are triples
/// (i, a, b) with i + j = k, a < e_i(x), b < e_j(y), ordered by i then a then b.
fn product_offset(x: &ChainComplexSpec, y: &ChainComplexSpec, k: usize, i: usize) -> usize {
    let mut off = 0;
    for i2 in 0..i {
        if k >= i2 && k - i2 <= y.top_degree() {
            off += x.ranks.get(i2).copied().unwrap_or(0) * y.ranks[k - i2];
        }
    }
    off
}

/// Tensor-product complex; the second factor's generators are shifted.
/// Boundary uses the Koszul sign: d(a x b) = da x b + (-1)^deg(a) a x db.
pub fn product(x: &ChainComplexSpec, y: &ChainComplexSpec) -> Result<ChainComplexSpec> {
    x.validate()?;
    y.validate()?;
    let top = x.top_degree() + y.top_degree();
    let mut ranks = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut e = 0usize;
        for i in 0..=k.min(x.top_degree()) {
            let j = k - i;
            if j <= y.top_degree() {
                e += x.ranks[i] * y.ranks[j];
            }
        }
        ranks.push(e);
    }
    let yshift = x.num_gens;
    let mut boundaries = Vec::new();
    for k in 0..top {
        // map from degree k+1 to degree k
        let mut b = GaeMatrix::zeros(ranks[k + 1], ranks[k]);
        for i in 0..=(k + 1).min(x.top_degree()) {
            let j = k + 1 - i;
            if j > y.top_degree() {
                continue;
            }
            let (ei, ej) = (x.ranks[i], y.ranks[j]);
            let row_base = product_offset(x, y, k + 1, i);
            for a in 0..ei {
                for bb in 0..ej {
                    let row = row_base + a * ej + bb;
                    if i >= 1 {
                        let xb = &x.boundaries[i - 1];
                        let col_base = product_offset(x, y, k, i - 1);
                        for a2 in 0..x.ranks[i - 1] {
                            let e = xb.get(a, a2);
                            if !e.is_zero() {
                                let col = col_base + a2 * ej + bb;
                                let acc = b.get(row, col).add(e);
                                b.set(row, col, acc);
                            }
                        }
                    }
                    if j >= 1 {
                        let yb = &y.boundaries[j - 1];
                        let col_base = product_offset(x, y, k, i);
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        for b2 in 0..y.ranks[j - 1] {
                            let e = yb.get(bb, b2);
                            if !e.is_zero() {
                                let col = col_base + a * y.ranks[j - 1] + b2;
                                let acc =
                                    b.get(row, col).add(&e.shift_generators(yshift).scale(sign));
                                b.set(row, col, acc);
                            }
                        }
                    }
                }
            }
        }
        boundaries.push(b);
    }
    Ok(ChainComplexSpec {
        num_gens: x.num_gens + y.num_gens,
        ranks,
        boundaries,
        complete: x.complete && y.complete,
    })
}

/// d-torus as an iterated product of circles.
pub fn torus(d: usize) -> ChainComplexSpec {
    assert!(d >= 1);
    let mut c = circle();
    for _ in 1..d {
        c = product(&c, &circle()).expect("circle factors are valid");
    }
    c
}

/// Presentation 2-complex: one 0-cell, a 1-cell per generator, a 2-cell per
/// relator with Fox-derivative boundary.
pub fn from_presentation(num_gens: usize, relators: &[Word]) -> Result<ChainComplexSpec> {
    for w in relators {
        if w.max_generator() > num_gens {
            return Err(Error::ShapeMismatch(format!(
                "relator uses generator {} of {}",
                w.max_generator(),
                num_gens
            )));
        }
    }
    let mut a1 = GaeMatrix::zeros(num_gens, 1);
    for i in 0..num_gens {
        a1.set(i, 0, GroupAlgebraElement::generator_minus_one(i));
    }
    let mut ranks = vec![1, num_gens];
    let mut boundaries = vec![a1];
    if !relators.is_empty() {
        let mut a2 = GaeMatrix::zeros(relators.len(), num_gens);
        for (k, w) in relators.iter().enumerate() {
            for i in 0..num_gens {
                a2.set(k, i, fox_derivative(w, i));
            }
        }
        ranks.push(relators.len());
        boundaries.push(a2);
    }
    let c = ChainComplexSpec { num_gens, ranks, boundaries, complete: true };
    c.validate()?;
    Ok(c)
}

/// Wedge of r circles (the free group F_r).
pub fn wedge_of_circles(r: usize) -> ChainComplexSpec {
    from_presentation(r, &[]).expect("no relators")
}

/// Closed orientable surface of genus g >= 1 via the standard one-relator
/// presentation.
pub fn surface(genus: usize) -> ChainComplexSpec {
    assert!(genus >= 1);
    let mut rel = Word::identity();
    for i in 0..genus {
        let a = Word::generator(2 * i);
        let b = Word::generator(2 * i + 1);
        let comm = a.mul(&b).mul(&a.inverse()).mul(&b.inverse());
        rel = rel.mul(&comm);
    }
    from_presentation(2 * genus, &[rel]).expect("surface relator is valid")
}

// ---- serialization ----

fn default_generator_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            let c = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                c.to_string()
            } else {
                format!("{}{}", c, i / 26)
            }
        })
        .collect()
}

fn word_to_string(w: &Word, names: &[String]) -> String {
    let mut out = String::new();
    for (k, &l) in w.letters().iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let name = &names[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.push_str(name);
        } else {
            let _ = write!(out, "{}", name.to_uppercase());
        }
    }
    out
}

fn word_from_string(s: &str, names: &[String]) -> Result<Word> {
    let mut letters: Vec<i32> = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let mut matched = false;
        for (i, name) in names.iter().enumerate() {
            if tok == name {
                letters.push(i as i32 + 1);
                matched = true;
                break;
            }
            if tok == name.to_uppercase() && tok != name {
                letters.push(-(i as i32 + 1));
                matched = true;
                break;
            }
        }
        if !matched {
            return Err(Error::Parse(format!("unknown generator token {:?}", tok)));
        }
    }
    Ok(Word::from_letters(letters))
}

/// Canonical JSON for a complex:
/// {"boundaries": [[[ [word, coeff], ... ]]], "generators": [...], "ranks": [...]}.
pub fn complex_to_json(c: &ChainComplexSpec) -> Value {
    let names = default_generator_names(c.num_gens);
    let boundaries: Vec<Value> = c
        .boundaries
        .iter()
        .map(|b| {
            let rows: Vec<Value> = (0..b.rows)
                .map(|r| {
                    let row: Vec<Value> = (0..b.cols)
                        .map(|col| {
                            let terms: Vec<Value> = b
                                .get(r, col)
                                .iter()
                                .map(|(w, &cf)| json!([word_to_string(w, &names), cf]))
                                .collect();
                            Value::Array(terms)
                        })
                        .collect();
                    Value::Array(row)
                })
                .collect();
            Value::Array(rows)
        })
        .collect();
    let mut obj = serde_json::Map::new();
    obj.insert("boundaries".into(), Value::Array(boundaries));
    if !c.complete {
        obj.insert("complete".into(), Value::Bool(false));
    }
    obj.insert("generators".into(), json!(names));
    obj.insert("ranks".into(), json!(c.ranks));
    Value::Object(obj)
}

pub fn complex_from_json(v: &Value) -> Result<ChainComplexSpec> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("complex must be a JSON object".into()))?;
    let ranks: Vec<usize> = obj
        .get("ranks")
        .and_then(|r| r.as_array())
        .ok_or_else(|| Error::Parse("missing ranks".into()))?
        .iter()
        .map(|x| {
            x.as_u64().map(|u| u as usize).ok_or_else(|| Error::Parse("rank must be an integer".into()))
        })
        .collect::<Result<_>>()?;
    let names: Vec<String> = obj
        .get("generators")
        .and_then(|g| g.as_array())
        .ok_or_else(|| Error::Parse("missing generators".into()))?
        .iter()
        .map(|x| {
            x.as_str().map(String::from).ok_or_else(|| Error::Parse("generator name must be a string".into()))
        })
        .collect::<Result<_>>()?;
    let complete = obj.get("complete").and_then(|b| b.as_bool()).unwrap_or(true);
    let bnds = obj
        .get("boundaries")
        .and_then(|b| b.as_array())
        .ok_or_else(|| Error::Parse("missing boundaries".into()))?;
    if bnds.len() + 1 != ranks.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} ranks need {} boundaries, file has {}",
            ranks.len(),
            ranks.len() - 1,
            bnds.len()
        )));
    }
    let mut boundaries = Vec::new();
    for (k, bv) in bnds.iter().enumerate() {
        let rows =
            bv.as_array().ok_or_else(|| Error::Parse("boundary must be an array of rows".into()))?;
        if rows.len() != ranks[k + 1] {
            return Err(Error::ShapeMismatch(format!(
                "boundary {} has {} rows, expected {}",
                k,
                rows.len(),
                ranks[k + 1]
            )));
        }
        let mut mat = GaeMatrix::zeros(ranks[k + 1], ranks[k]);
        for (r, rowv) in rows.iter().enumerate() {
            let row = rowv.as_array().ok_or_else(|| Error::Parse("row must be an array".into()))?;
            if row.len() != ranks[k] {
                return Err(Error::ShapeMismatch(format!(
                    "boundary {} row {} has {} entries, expected {}",
                    k,
                    r,
                    row.len(),
                    ranks[k]
                )));
            }
            for (cidx, entv) in row.iter().enumerate() {
                let terms =
                    entv.as_array().ok_or_else(|| Error::Parse("entry must be an array".into()))?;
                let mut e = GroupAlgebraElement::zero();
                for t in terms {
                    let pair = t
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::Parse("term must be [word, coeff]".into()))?;
                    let ws =
                        pair[0].as_str().ok_or_else(|| Error::Parse("word must be a string".into()))?;
                    let cf =
                        pair[1].as_i64().ok_or_else(|| Error::Parse("coeff must be an integer".into()))?;
                    e.add_term(word_from_string(ws, &names)?, cf);
                }
                mat.set(r, cidx, e);
            }
        }
        boundaries.push(mat);
    }
    let c = ChainComplexSpec { num_gens: names.len(), ranks, boundaries, complete };
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{tower_abelian, AbelianImage, GroupRule};
    use crate::linalg::{rank_q, IntMatrix};

    fn trivial_quotient(gens: usize) -> FiniteQuotient {
        FiniteQuotient {
            order: 1,
            rule: GroupRule::Abelian { moduli: vec![1] },
            generator_images: vec![0; gens],
        }
    }

    #[test]
    fn fox_derivative_basics() {
        let x = Word::generator(0);
        // d(x^2)/dx = 1 + x
        let d = fox_derivative(&x.mul(&x), 0);
        let mut want = GroupAlgebraElement::one();
        want.add_term(x.clone(), 1);
        assert_eq!(d, want);
        // d(x^-1)/dx = -x^-1
        let d = fox_derivative(&x.inverse(), 0);
        let mut want = GroupAlgebraElement::zero();
        want.add_term(x.inverse(), -1);
        assert_eq!(d, want);
    }

    #[test]
    fn fox_fundamental_identity() {
        // sum_i dw/dg_i (g_i - 1) = w - 1 for a sample relator
        let a = Word::generator(0);
        let b = Word::generator(1);
        let w = a.mul(&b).mul(&a.inverse()).mul(&b.inverse()).mul(&a);
        let mut lhs = GroupAlgebraElement::zero();
        for i in 0..2 {
            lhs = lhs.add(&fox_derivative(&w, i).mul(&GroupAlgebraElement::generator_minus_one(i)));
        }
        let mut rhs = GroupAlgebraElement::from_word(w);
        rhs.add_term(Word::identity(), -1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduce_of_identity_and_augmentation() {
        let mut m = GaeMatrix::zeros(1, 1);
        m.set(0, 0, GroupAlgebraElement::one());
        let t = tower_abelian(1, 3, 1, 1, &[AbelianImage::new(0, vec![1])]).unwrap();
        let q = &t.levels[0];
        let red = reduce_matrix(&m, q).unwrap().to_dense();
        assert_eq!(red, IntMatrix::identity(3));

        let mut tm1 = GaeMatrix::zeros(1, 1);
        tm1.set(0, 0, GroupAlgebraElement::generator_minus_one(0));
        let red = reduce_matrix(&tm1, q).unwrap();
        // circulant with zero row sums has rank 2
        assert_eq!(rank_q(&red.to_dense()), 2);
        let red0 = reduce_matrix(&tm1, &trivial_quotient(1)).unwrap();
        assert!(red0.to_dense().is_zero());
    }

    #[test]
    fn reduce_is_multiplicative() {
        let t = tower_abelian(1, 3, 2, 1, &[AbelianImage::new(0, vec![1, 0]), AbelianImage::new(0, vec![2, 1])])
            .unwrap();
        let q = &t.levels[0];
        let mut a = GaeMatrix::zeros(1, 1);
        let mut e1 = GroupAlgebraElement::from_word(Word::from_letters([1, 2]));
        e1.add_term(Word::generator(0).inverse(), -3);
        a.set(0, 0, e1);
        let mut b = GaeMatrix::zeros(1, 1);
        let mut e2 = GroupAlgebraElement::from_word(Word::from_letters([-2, 1]));
        e2.add_term(Word::identity(), 2);
        b.set(0, 0, e2);
        let lhs = reduce_matrix(&a.mul(&b), q).unwrap().to_dense();
        let rhs = reduce_matrix(&a, q).unwrap().to_dense().mul(&reduce_matrix(&b, q).unwrap().to_dense());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn torus_ranks_are_binomial() {
        let t3 = torus(3);
        assert_eq!(t3.ranks, vec![1, 3, 3, 1]);
        assert_eq!(t3.num_gens, 3);
        t3.validate().unwrap();
        assert_eq!(t3.euler_characteristic(), 0);
    }

    #[test]
    fn product_composition_vanishes_on_abelian_quotients() {
        let t2 = torus(2);
        let tow = tower_abelian(1, 3, 2, 1, &[AbelianImage::new(0, vec![1, 0]), AbelianImage::new(0, vec![0, 1])])
            .unwrap();
        let q = &tow.levels[0];
        let a2 = reduce_matrix(&t2.boundaries[1], q).unwrap();
        let a1 = reduce_matrix(&t2.boundaries[0], q).unwrap();
        assert!(a2.mul(&a1).is_zero());
    }

    #[test]
    fn wedge_and_product_shapes_for_mixed_complex() {
        let s3 = cw_sphere(3);
        let w = wedge(&circle(), &s3).unwrap();
        assert_eq!(w.ranks, vec![1, 1, 0, 1]);
        let x = product(&circle(), &w).unwrap();
        assert_eq!(x.ranks, vec![1, 2, 1, 1, 1]);
        assert_eq!(x.num_gens, 2);
        x.validate().unwrap();
    }

    #[test]
    fn surface_presentation_shape() {
        let s = surface(2);
        assert_eq!(s.ranks, vec![1, 4, 1]);
        // relator [a,b][c,d] has Fox derivative d/da = 1 - a b a^-1
        let d = s.boundaries[1].get(0, 0);
        let a = Word::generator(0);
        let b = Word::generator(1);
        let mut want = GroupAlgebraElement::one();
        want.add_term(a.mul(&b).mul(&a.inverse()), -1);
        assert_eq!(d, &want);
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let c = torus(2);
        let v = complex_to_json(&c);
        let s1 = serde_json::to_string(&v).unwrap();
        let c2 = complex_from_json(&serde_json::from_str(&s1).unwrap()).unwrap();
        assert_eq!(c, c2);
        let s2 = serde_json::to_string(&complex_to_json(&c2)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn json_word_parsing() {
        let names = vec!["a".to_string(), "b".to_string()];
        let w = word_from_string("a b A", &names).unwrap();
        assert_eq!(w.letters(), &[1, 2, -1]);
        assert!(word_from_string("a q", &names).is_err());
        assert_eq!(word_to_string(&w, &names), "a b A");
    }
}
