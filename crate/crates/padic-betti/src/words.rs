//! Freely reduced words in a finitely generated free group.
//!
//! A letter is a nonzero i32: +k is the k-th generator (1-based), -k its
//! inverse. Words are kept freely reduced at all times; reduction is the
//! only rewriting ever applied, so distinct group elements of a quotient
//! may be represented by many words.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    /// The generator with 0-based index i.
    pub fn generator(i: usize) -> Self {
        Word { letters: vec![i as i32 + 1] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, letter: i32) {
        debug_assert!(letter != 0);
        if self.letters.last() == Some(&-letter) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Signed exponent sum of each of `n` generators.
    pub fn exponent_vector(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for &l in &self.letters {
            let idx = (l.unsigned_abs() as usize) - 1;
            debug_assert!(idx < n);
            v[idx] += if l > 0 { 1 } else { -1 };
        }
        v
    }

    /// Renames generators by adding `shift` to every index (for disjoint unions).
    pub fn shift_generators(&self, shift: usize) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .map(|&l| if l > 0 { l + shift as i32 } else { l - shift as i32 })
                .collect(),
        }
    }

    /// Largest generator index used, as a 0-based bound (None for the identity).
    /// Number of generators this word touches (1 + largest 0-based index).
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        // a b b^-1 a^-1 a = a
        let w = Word::from_letters([1, 2, -2, -1, 1]);
        assert_eq!(w, Word::generator(0));
        let v = Word::from_letters([1, -1]);
        assert!(v.is_identity());
    }

    #[test]
    fn inverse_and_product() {
        let w = Word::from_letters([1, 2, -1]);
        assert!(w.mul(&w.inverse()).is_identity());
        let u = Word::generator(0).mul(&Word::generator(1));
        assert_eq!(u, Word::from_letters([1, 2]));
    }

    #[test]
    fn exponent_vectors() {
        let w = Word::from_letters([1, 2, 1, -2, 1]);
        assert_eq!(w.exponent_vector(2), vec![3, 0]);
    }
}
