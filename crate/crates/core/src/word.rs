//! Words over the alphabet `{X, Y}` and their cyclic normal form.
//!
//! Letters are packed into a `u128`, most significant letter first, so that
//! comparing two words of equal length as integers is the lexicographic order
//! with `X < Y`.

use std::fmt;

/// Longest word that fits the packed representation.
pub const MAX_WORD_LEN: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
}

impl Letter {
    fn bit(self) -> u128 {
        match self {
            Letter::X => 0,
            Letter::Y => 1,
        }
    }

    pub fn swap(self) -> Letter {
        match self {
            Letter::X => Letter::Y,
            Letter::Y => Letter::X,
        }
    }
}

/// A linear word (not reduced modulo rotation).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    len: u8,
    bits: u128,
}

#[inline]
fn mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    /// Panics if `letters` is longer than [`MAX_WORD_LEN`].
    pub fn from_letters(letters: &[Letter]) -> Word {
        assert!(letters.len() <= MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        let bits = letters.iter().fold(0u128, |acc, l| (acc << 1) | l.bit());
        Word { len: letters.len() as u8, bits }
    }

    /// `X^i Y^j`.
    pub fn sorted(i: usize, j: usize) -> Word {
        assert!(i + j <= MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        Word { len: (i + j) as u8, bits: mask(j) }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, k: usize) -> Letter {
        debug_assert!(k < self.len());
        if (self.bits >> (self.len() - 1 - k)) & 1 == 1 {
            Letter::Y
        } else {
            Letter::X
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len()).map(move |k| self.letter(k))
    }

    pub fn to_vec(&self) -> Vec<Letter> {
        self.letters().collect()
    }

    pub fn y_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn x_count(&self) -> usize {
        self.len() - self.y_count()
    }

    /// Left rotation: the letter at index `s` moves to the front.
    pub fn rotate(&self, s: usize) -> Word {
        let len = self.len();
        if len == 0 {
            return *self;
        }
        let s = s % len;
        if s == 0 {
            return *self;
        }
        let bits = ((self.bits << s) | (self.bits >> (len - s))) & mask(len);
        Word { len: self.len, bits }
    }

    /// Drops the final letter.
    pub fn drop_last(&self) -> Word {
        debug_assert!(self.len > 0);
        Word { len: self.len - 1, bits: self.bits >> 1 }
    }

    /// Letters `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        debug_assert!(start <= end && end <= self.len());
        let len = end - start;
        let bits = (self.bits >> (self.len() - end)) & mask(len);
        Word { len: len as u8, bits }
    }

    /// Concatenation; panics past [`MAX_WORD_LEN`].
    pub fn concat(&self, other: &Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        let bits = if other.len() == 128 { other.bits } else { (self.bits << other.len()) | other.bits };
        Word { len: len as u8, bits }
    }

    pub fn push(&self, l: Letter) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        Word { len: self.len + 1, bits: (self.bits << 1) | l.bit() }
    }

    /// `true` for words of the shape `X^i Y^j`.
    pub fn is_sorted(&self) -> bool {
        self.bits == mask(self.y_count())
    }

    /// Index of the first adjacent `YX` pair.
    pub fn first_yx(&self) -> Option<usize> {
        (0..self.len().saturating_sub(1))
            .find(|&k| self.letter(k) == Letter::Y && self.letter(k + 1) == Letter::X)
    }

    /// Swaps letters `k` and `k + 1`.
    pub fn swap_adjacent(&self, k: usize) -> Word {
        let a = self.len() - 1 - k;
        let b = a - 1;
        let x = ((self.bits >> a) ^ (self.bits >> b)) & 1;
        Word { len: self.len, bits: self.bits ^ ((x << a) | (x << b)) }
    }

    /// Exchanges the roles of `X` and `Y`.
    pub fn swap_letters(&self) -> Word {
        Word { len: self.len, bits: !self.bits & mask(self.len()) }
    }

    /// Lexicographically least rotation.
    pub fn min_rotation(&self) -> Word {
        (1..self.len()).map(|s| self.rotate(s)).fold(*self, |best, w| best.min(w))
    }

    pub fn power(&self, e: usize) -> Word {
        (0..e).fold(Word::EMPTY, |acc, _| acc.concat(self))
    }
}

fn fmt_letters(w: &Word, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let letters = w.to_vec();
    let mut parts = Vec::new();
    let mut k = 0;
    while k < letters.len() {
        let l = letters[k];
        let mut run = 1;
        while k + run < letters.len() && letters[k + run] == l {
            run += 1;
        }
        let name = match l {
            Letter::X => "X",
            Letter::Y => "Y",
        };
        if run == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{name}^{run}"));
        }
        k += run;
    }
    f.write_str(&parts.join("*"))
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Word(")?;
        fmt_letters(self, f)?;
        f.write_str(")")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(self, f)
    }
}

/// A cyclic word: the symbol inside one trace, stored as its least rotation.
///
/// Ordering is by length first, then lexicographic with `X < Y`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceWord(Word);

impl TraceWord {
    pub fn new(word: Word) -> Self {
        TraceWord(word.min_rotation())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Self::new(Word::from_letters(letters))
    }

    /// `tr(X^i Y^j)`.
    pub fn sorted(i: usize, j: usize) -> Self {
        TraceWord(Word::sorted(i, j))
    }

    pub fn word(&self) -> Word {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `(#X, #Y)`.
    pub fn double_degree(&self) -> (usize, usize) {
        (self.0.x_count(), self.0.y_count())
    }

    /// `#X - #Y`.
    pub fn weight(&self) -> i64 {
        self.0.x_count() as i64 - self.0.y_count() as i64
    }

    /// `true` iff the canonical form is `X^i Y^j`.
    pub fn is_sorted(&self) -> bool {
        self.0.is_sorted()
    }

    pub fn swap_letters(&self) -> Self {
        TraceWord::new(self.0.swap_letters())
    }
}

/// Canonical cyclic representative of a letter sequence.
pub fn canonicalize(letters: &[Letter]) -> TraceWord {
    TraceWord::from_letters(letters)
}

impl fmt::Debug for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr({})", self.0)
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr({})", self.0)
    }
}
