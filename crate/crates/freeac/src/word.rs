//! Words in the free monoid on `d` letters and their abelianizations.
//!
//! Letters are `1..=d` with `d <= 9`, so a word serializes as a digit string and
//! the empty word as `""`. The basis order everywhere is graded-lexicographic:
//! shorter words first, ties broken by the digit string.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A word in the free monoid on letters `1..=d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    d: usize,
    letters: Vec<u8>,
}

impl Word {
    pub fn empty(d: usize) -> Result<Word> {
        check_alphabet(d)?;
        Ok(Word { d, letters: Vec::new() })
    }

    pub fn new(d: usize, letters: &[usize]) -> Result<Word> {
        check_alphabet(d)?;
        let mut ls = Vec::with_capacity(letters.len());
        for &l in letters {
            if l < 1 || l > d {
                return Err(Error::BadLetter { letter: l, d });
            }
            ls.push(l as u8);
        }
        Ok(Word { d, letters: ls })
    }

    /// Parse from a digit string, e.g. `"121"`; `""` is the empty word.
    pub fn parse(d: usize, s: &str) -> Result<Word> {
        check_alphabet(d)?;
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let l = ch
                .to_digit(10)
                .ok_or_else(|| Error::InvalidParameter(format!("bad word character '{ch}'")))?
                as usize;
            if l < 1 || l > d {
                return Err(Error::BadLetter { letter: l, d });
            }
            letters.push(l as u8);
        }
        Ok(Word { d, letters })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters as `1..=d` values.
    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().map(|&l| l as usize)
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { d: self.d, letters }
    }

    /// Prepend a single letter: `j · self`.
    pub fn prepend(&self, j: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(j as u8);
        letters.extend_from_slice(&self.letters);
        Word { d: self.d, letters }
    }

    /// Append a single letter: `self · j`.
    pub fn append(&self, j: usize) -> Word {
        let mut letters = self.letters.clone();
        letters.push(j as u8);
        Word { d: self.d, letters }
    }

    /// The reversed word; an involution.
    pub fn transpose(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { d: self.d, letters }
    }

    /// Letter-counting map into `N^d`; a monoid morphism onto addition.
    pub fn abelianize(&self) -> MultiIndex {
        let mut counts = vec![0u32; self.d];
        for &l in &self.letters {
            counts[l as usize - 1] += 1;
        }
        MultiIndex { counts }
    }

    /// All splits `self = prefix · suffix` with a non-empty prefix, as
    /// `(prefix, suffix)` pairs. Used by convolution recursions.
    pub fn proper_prefix_splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (1..=self.len()).map(move |k| {
            (
                Word { d: self.d, letters: self.letters[..k].to_vec() },
                Word { d: self.d, letters: self.letters[k..].to_vec() },
            )
        })
    }

    /// All splits `self = prefix · suffix` including the trivial ones.
    pub fn splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.len()).map(move |k| {
            (
                Word { d: self.d, letters: self.letters[..k].to_vec() },
                Word { d: self.d, letters: self.letters[k..].to_vec() },
            )
        })
    }

    fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        if self.letters.len() < prefix.letters.len() {
            return None;
        }
        if self.letters[..prefix.letters.len()] == prefix.letters[..] {
            Some(Word { d: self.d, letters: self.letters[prefix.letters.len()..].to_vec() })
        } else {
            None
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Graded-lexicographic order (length first, then digits).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn check_alphabet(d: usize) -> Result<()> {
    if d < 1 || d > 9 {
        return Err(Error::BadAlphabet(d));
    }
    Ok(())
}

/// All words of length `<= n_max` in graded-lex order; the empty word comes first.
pub fn enumerate_words(d: usize, n_max: usize) -> Result<Vec<Word>> {
    check_alphabet(d)?;
    let mut count = 1usize;
    let mut level = 1usize;
    for _ in 0..n_max {
        level *= d;
        count += level;
    }
    let mut words = Vec::with_capacity(count);
    words.push(Word::empty(d)?);
    let mut start = 0usize;
    for _ in 0..n_max {
        let end = words.len();
        for k in start..end {
            for j in 1..=d {
                let w = words[k].append(j);
                words.push(w);
            }
        }
        start = end;
    }
    Ok(words)
}

/// A point of `N^d`: the abelianized degree data of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    counts: Vec<u32>,
}

impl MultiIndex {
    pub fn zero(d: usize) -> MultiIndex {
        MultiIndex { counts: vec![0; d] }
    }

    pub fn new(counts: Vec<u32>) -> MultiIndex {
        MultiIndex { counts }
    }

    pub fn d(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total degree `|n|`.
    pub fn degree(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex { counts }
    }

    /// Componentwise difference `self - other`, or `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut counts = Vec::with_capacity(self.counts.len());
        for (a, b) in self.counts.iter().zip(&other.counts) {
            if a < b {
                return None;
            }
            counts.push(a - b);
        }
        Some(MultiIndex { counts })
    }

    pub fn bump(&self, j: usize) -> MultiIndex {
        let mut counts = self.counts.clone();
        counts[j - 1] += 1;
        MultiIndex { counts }
    }

    /// `self - e_j` or `None` if the `j`-th entry is zero.
    pub fn lower(&self, j: usize) -> Option<MultiIndex> {
        if self.counts[j - 1] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[j - 1] -= 1;
        Some(MultiIndex { counts })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<MultiIndex> {
        let counts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidParameter(format!("bad multi-index \"{s}\": {e}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(MultiIndex { counts })
    }
}

/// Graded-lexicographic order on multi-indices.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.counts.cmp(&other.counts))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices with `|n| <= n_max` in graded-lex order.
pub fn enumerate_multi_indices(d: usize, n_max: usize) -> Vec<MultiIndex> {
    let mut all = Vec::new();
    for deg in 0..=n_max {
        let mut cur = vec![0u32; d];
        fill(&mut all, &mut cur, 0, deg as u32, d);
    }
    return all;

    fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, left: u32, d: usize) {
        if pos == d - 1 {
            cur[pos] = left;
            out.push(MultiIndex { counts: cur.clone() });
            cur[pos] = 0;
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            fill(out, cur, pos + 1, left - k, d);
        }
        cur[pos] = 0;
    }
}

/// Outcome of cancelling `(L^α)^* L^β` in a row isometry: the product collapses to
/// `L^γ` when `β = αγ`, to `(L^γ)^*` when `α = βγ`, and to `0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cancellation {
    /// `β = α · γ`; the product is `L^γ`.
    RightRemainder(Word),
    /// `α = β · γ`; the product is `(L^γ)^*`.
    LeftRemainder(Word),
    Zero,
}

/// Prefix cancellation of `(L^α)^* L^β`. For `α = β` this is
/// `RightRemainder(∅)`, i.e. the identity.
pub fn cancel(alpha: &Word, beta: &Word) -> Cancellation {
    if let Some(g) = beta.strip_prefix(alpha) {
        Cancellation::RightRemainder(g)
    } else if let Some(g) = alpha.strip_prefix(beta) {
        Cancellation::LeftRemainder(g)
    } else {
        Cancellation::Zero
    }
}

/// The multinomial `|n|!/n!`, exactly. Equals the number of words that
/// abelianize to `n`. Guarded at `|n| <= 20` so the arithmetic stays exact.
pub fn multinomial(n: &MultiIndex) -> Result<u64> {
    let total = n.degree();
    if total > 20 {
        return Err(Error::MultinomialOverflow(total));
    }
    // Product of binomials C(s_k, n_k) over running sums s_k; each factor exact.
    let mut acc: u128 = 1;
    let mut running = 0u64;
    for &nk in n.counts() {
        running += nk as u64;
        acc *= binomial(running, nk as u64);
    }
    Ok(acc as u64)
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
