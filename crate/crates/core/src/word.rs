//! Freely reduced words over the deck-group generators.
//!
//! The fundamental group of a finite graph relative to a spanning tree is
//! free on the complement edges.  A [`Word`] is a reduced string in those
//! generators and acts on the universal cover by permuting tiles (copies of
//! the lifted spanning tree).

use std::fmt;

/// A letter is `+(g+1)` for generator `g` and `-(g+1)` for its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// The single-letter word for generator `g` (0-based), or its inverse.
    pub fn generator(g: usize, inverse: bool) -> Self {
        let l = (g as i32) + 1;
        Word {
            letters: vec![if inverse { -l } else { l }],
        }
    }

    /// Builds a word from raw letters, cancelling adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = i32>>(letters: I) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Generator index and inversion flag of a letter.
    pub fn decode(letter: i32) -> (usize, bool) {
        ((letter.unsigned_abs() as usize) - 1, letter < 0)
    }

    /// `self * other`, reduced.
    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Writes `self = c * r * c^-1` with `r` cyclically reduced and returns
    /// `(c, r)`.  For the identity, both parts are empty.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let mut core = self.letters.clone();
        let mut conj = Vec::new();
        while core.len() >= 2 && core.first().copied() == core.last().map(|l| -l) {
            conj.push(core[0]);
            core = core[1..core.len() - 1].to_vec();
        }
        (Word { letters: conj }, Word { letters: core })
    }

    /// True when no initial letter cancels against the final letter.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => a != -b,
            _ => true,
        }
    }

    /// Parses letters `a`..`z` (generators 0..25) with uppercase inverses.
    pub fn parse(text: &str) -> Result<Word, String> {
        let mut letters = Vec::new();
        for ch in text.chars() {
            if ch.is_whitespace() {
                continue;
            }
            let (g, inv) = match ch {
                'a'..='z' => (ch as usize - 'a' as usize, false),
                'A'..='Z' => (ch as usize - 'A' as usize, true),
                _ => return Err(format!("bad word character {ch:?}")),
            };
            let l = (g as i32) + 1;
            letters.push(if inv { -l } else { l });
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            let (g, inv) = Word::decode(l);
            let base = b'a' + (g as u8 % 26);
            let ch = if inv {
                (base - b'a' + b'A') as char
            } else {
                base as char
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_inverse() {
        let w = Word::parse("abA").unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.mul(&w.inverse()).is_identity());
        assert_eq!(Word::parse("aA").unwrap(), Word::identity());
        assert_eq!(Word::parse("abBA").unwrap(), Word::identity());
    }

    #[test]
    fn cyclic_reduction_splits_conjugator() {
        let w = Word::parse("abaBA").unwrap(); // ab a (ab)^-1... actually ab * a * B A
        let (c, r) = w.cyclic_reduction();
        assert_eq!(c.mul(&r).mul(&c.inverse()), w);
        assert!(r.is_cyclically_reduced());
        assert_eq!(c, Word::parse("ab").unwrap());
        assert_eq!(r, Word::parse("a").unwrap());
    }

    #[test]
    fn powers() {
        let a = Word::parse("ab").unwrap();
        assert_eq!(a.pow(3), Word::parse("ababab").unwrap());
        assert_eq!(a.pow(-1), Word::parse("BA").unwrap());
        assert_eq!(a.pow(0), Word::identity());
    }
}
