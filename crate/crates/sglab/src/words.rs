//! Words over the standard surface-group generators, free and cyclic
//! reduction, and Dehn's algorithm for the word problem.
//!
//! The presentation `⟨a_1,b_1,…,a_g,b_g | [a_1,b_1]⋯[a_g,b_g]⟩` with `g ≥ 2`
//! satisfies the small-cancellation condition C′(1/8): pieces of the relator
//! have length < 4g/8 < 2g, so any word representing the identity contains
//! more than half of a cyclic rotation of `r^{±1}` (Greendlinger), and greedy
//! replacement of such subwords terminates with the empty word exactly on the
//! kernel of `F_{2g} → Γ_g`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::{Error, Result};

/// One generator or inverse generator. Generators are indexed `0..2g`:
/// even indices are `a`-type, odd are `b`-type, so `gen = 2k` is `a_{k+1}`
/// and `gen = 2k+1` is `b_{k+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u8, inv: bool) -> Self {
        Letter { gen, inv }
    }

    /// `a_i` for 1-based `i`.
    pub fn a(i: usize) -> Self {
        Letter::new((2 * (i - 1)) as u8, false)
    }

    /// `b_i` for 1-based `i`.
    pub fn b(i: usize) -> Self {
        Letter::new((2 * (i - 1) + 1) as u8, false)
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }

    /// Index of this signed letter in `0..4g` (generator, then its inverse).
    pub fn signed_index(self) -> usize {
        2 * self.gen as usize + usize::from(self.inv)
    }
}

/// A word over the generators of `Γ_g` (equivalently of the free group
/// `F_{2g}`). Not automatically reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    genus: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(genus: usize, letters: Vec<Letter>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::Precondition(format!("genus {genus} < 2")));
        }
        for l in &letters {
            if (l.gen as usize) >= 2 * genus {
                return Err(Error::Parse(format!(
                    "letter index {} out of range for genus {genus}",
                    l.gen
                )));
            }
        }
        Ok(Word { genus, letters })
    }

    pub fn empty(genus: usize) -> Self {
        Word { genus, letters: Vec::new() }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Concatenation (no reduction).
    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word { genus: self.genus, letters })
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Word { genus: self.genus, letters }
    }

    /// True if no adjacent inverse pair.
    pub fn is_freely_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].is_inverse_of(w[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && (self.letters.len() < 2
                || !self.letters[0].is_inverse_of(*self.letters.last().unwrap()))
    }

    /// Parse whitespace-separated tokens like `a1 B1 a2 b2`; uppercase means
    /// inverse. The tokens `1` and `e` denote the empty word, as does an
    /// empty string.
    pub fn parse(genus: usize, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" || tok == "e" {
                continue;
            }
            let mut chars = tok.chars();
            let head = chars
                .next()
                .ok_or_else(|| Error::Parse("empty token".into()))?;
            let idx: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad token `{tok}`")))?;
            if idx == 0 || idx > genus {
                return Err(Error::Parse(format!(
                    "generator index {idx} out of range for genus {genus}"
                )));
            }
            let (base, inv) = match head {
                'a' => (Letter::a(idx), false),
                'b' => (Letter::b(idx), false),
                'A' => (Letter::a(idx), true),
                'B' => (Letter::b(idx), true),
                _ => return Err(Error::Parse(format!("bad token `{tok}`"))),
            };
            letters.push(if inv { base.inverse() } else { base });
        }
        Word::new(genus, letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let idx = l.gen as usize / 2 + 1;
            let c = match (l.gen % 2 == 0, l.inv) {
                (true, false) => 'a',
                (true, true) => 'A',
                (false, false) => 'b',
                (false, true) => 'B',
            };
            write!(f, "{c}{idx}")?;
        }
        Ok(())
    }
}

/// The defining relator `[a_1,b_1]⋯[a_g,b_g]`, length `4g`.
pub fn relator(genus: usize) -> Word {
    let mut letters = Vec::with_capacity(4 * genus);
    for i in 1..=genus {
        letters.push(Letter::a(i));
        letters.push(Letter::b(i));
        letters.push(Letter::a(i).inverse());
        letters.push(Letter::b(i).inverse());
    }
    Word { genus, letters }
}

/// All `2·2g` signed letters for genus `g`, in `signed_index` order.
pub fn signed_letters(genus: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(4 * genus);
    for gen in 0..2 * genus as u8 {
        out.push(Letter::new(gen, false));
        out.push(Letter::new(gen, true));
    }
    out
}

/// Free reduction: cancel adjacent inverse pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if stack.last().is_some_and(|&t| t.is_inverse_of(l)) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word { genus: w.genus, letters: stack }
}

/// Cyclic reduction of a freely reduced word: returns `(core, conjugator)`
/// with `w = conjugator · core · conjugator⁻¹` in the free group and `core`
/// cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    debug_assert!(w.is_freely_reduced());
    let mut lo = 0usize;
    let mut hi = w.letters.len();
    while hi - lo >= 2 && w.letters[lo].is_inverse_of(w.letters[hi - 1]) {
        lo += 1;
        hi -= 1;
    }
    let core = Word { genus: w.genus, letters: w.letters[lo..hi].to_vec() };
    let conj = Word { genus: w.genus, letters: w.letters[..lo].to_vec() };
    (core, conj)
}

/// Precomputed rotations of the relator and its inverse for one genus.
struct DehnTable {
    genus: usize,
    /// All `8g` cyclic rotations of `r` and `r⁻¹`, each of length `4g`.
    rotations: Vec<Vec<Letter>>,
}

impl DehnTable {
    fn build(genus: usize) -> Self {
        let r = relator(genus);
        let mut rotations = Vec::with_capacity(8 * genus);
        for base in [r.clone(), r.inverse()] {
            for s in 0..base.letters.len() {
                let mut rot = base.letters[s..].to_vec();
                rot.extend_from_slice(&base.letters[..s]);
                rotations.push(rot);
            }
        }
        DehnTable { genus, rotations }
    }
}

static DEHN_TABLES: Lazy<RwLock<HashMap<usize, Arc<DehnTable>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn dehn_table(genus: usize) -> Arc<DehnTable> {
    if let Some(t) = DEHN_TABLES.read().unwrap().get(&genus) {
        return t.clone();
    }
    let t = Arc::new(DehnTable::build(genus));
    DEHN_TABLES
        .write()
        .unwrap()
        .entry(genus)
        .or_insert_with(|| t.clone())
        .clone()
}

/// Longest match of `w[i..]` against a prefix of `rot`, capped at `max_len`.
fn prefix_match(w: &[Letter], i: usize, rot: &[Letter], max_len: usize) -> usize {
    let cap = max_len.min(w.len() - i);
    let mut l = 0;
    while l < cap && w[i + l] == rot[l] {
        l += 1;
    }
    l
}

/// One Dehn replacement step on a freely reduced word: find the leftmost
/// longest subword of length `> 2g` matching a prefix of a relator rotation,
/// and splice in the inverse of the complementary piece. Returns `None` if no
/// such subword exists.
fn dehn_step(table: &DehnTable, w: &Word) -> Option<Word> {
    let g = table.genus;
    let half = 2 * g;
    let n = w.letters.len();
    if n <= half {
        return None;
    }
    // Longest-first, then leftmost, then lowest rotation index: deterministic.
    for want in (half + 1..=(4 * g).min(n)).rev() {
        for i in 0..=n - want {
            for rot in &table.rotations {
                if prefix_match(&w.letters, i, rot, want) >= want {
                    let mut letters = w.letters[..i].to_vec();
                    // rot = s·t with s the matched piece; s ≡ t⁻¹ in Γ.
                    letters.extend(rot[want..].iter().rev().map(|l| l.inverse()));
                    letters.extend_from_slice(&w.letters[i + want..]);
                    return Some(free_reduce(&Word { genus: w.genus, letters }));
                }
            }
        }
    }
    None
}

/// Dehn's algorithm: free-reduce, then repeatedly replace any subword longer
/// than half a relator rotation by the shorter complement. The result is
/// empty iff `w ≡ 1` in `Γ_g`.
pub fn dehn_reduce(w: &Word) -> Word {
    let table = dehn_table(w.genus);
    let mut cur = free_reduce(w);
    while let Some(next) = dehn_step(&table, &cur) {
        cur = next;
    }
    cur
}

/// True iff `w ≡ 1` in `Γ_g`.
pub fn is_trivial(w: &Word) -> bool {
    dehn_reduce(w).is_empty()
}

/// Word problem: `u ≡ v` in `Γ_g`.
pub fn are_equal(u: &Word, v: &Word) -> Result<bool> {
    if u.genus != v.genus {
        return Err(Error::GenusMismatch(u.genus, v.genus));
    }
    let uv = u.concat(&v.inverse())?;
    Ok(is_trivial(&uv))
}

/// All splice moves on a freely reduced word that do not increase length:
/// replace a matched piece of length `L ∈ [2g, 4g]` of some rotation by the
/// complement's inverse (length `4g − L ≤ L`). Used by the canonicalization
/// saturation in [`crate::canon`].
pub(crate) fn length_nonincreasing_moves(w: &Word) -> Vec<Word> {
    let table = dehn_table(w.genus);
    let g = w.genus;
    let n = w.letters.len();
    let mut out = Vec::new();
    for i in 0..n {
        for rot in &table.rotations {
            let max = prefix_match(&w.letters, i, rot, 4 * g);
            for want in 2 * g..=max {
                let mut letters = w.letters[..i].to_vec();
                letters.extend(rot[want..].iter().rev().map(|l| l.inverse()));
                letters.extend_from_slice(&w.letters[i + want..]);
                out.push(free_reduce(&Word { genus: w.genus, letters }));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(2, text).unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        let cases = ["a1 B1 a2 b2", "", "A1 A1 A1", "b2 B1"];
        for c in cases {
            let word = w(c);
            assert_eq!(word.to_string(), c.trim());
            let again = Word::parse(2, &word.to_string()).unwrap();
            assert_eq!(word, again);
        }
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        assert!(Word::parse(2, "c1").is_err());
        assert!(Word::parse(2, "a3").is_err());
        assert!(Word::parse(2, "a0").is_err());
        assert!(Word::parse(2, "a").is_err());
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&w("a1 A1")).is_empty());
        assert_eq!(free_reduce(&w("a1 b1 B1 a2")), w("a1 a2"));
        assert!(free_reduce(&Word::empty(2)).is_empty());
        // idempotent
        let x = free_reduce(&w("a1 a2 A2 A1 b1"));
        assert_eq!(free_reduce(&x), x);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = cyclic_reduce(&w("b1 a1 B1"));
        assert_eq!(core, w("a1"));
        assert_eq!(conj, w("b1"));

        let (core, conj) = cyclic_reduce(&w("a1 b1"));
        assert_eq!(core, w("a1 b1"));
        assert!(conj.is_empty());

        let (core, conj) = cyclic_reduce(&w("b1 a1 a1 B1"));
        assert_eq!(core, w("a1 a1"));
        assert_eq!(conj, w("b1"));
    }

    #[test]
    fn relator_shape() {
        let r = relator(2);
        assert_eq!(r.to_string(), "a1 b1 A1 B1 a2 b2 A2 B2");
        assert_eq!(relator(3).len(), 12);
    }

    #[test]
    fn dehn_kills_relator_and_powers() {
        let r = relator(2);
        assert!(dehn_reduce(&r).is_empty());
        assert!(dehn_reduce(&r.inverse()).is_empty());
        assert!(dehn_reduce(&r.pow(2)).is_empty());
        assert!(dehn_reduce(&r.pow(3)).is_empty());
        let r3 = relator(3);
        assert!(dehn_reduce(&r3.pow(2)).is_empty());
    }

    #[test]
    fn dehn_keeps_nontrivial_words() {
        assert_eq!(dehn_reduce(&w("a1")), w("a1"));
        assert!(!dehn_reduce(&w("a1 b1 A1 B1")).is_empty()); // genus-2: half the relator
        // conjugate of the relator is trivial
        let c = w("b2 a1").concat(&relator(2)).unwrap().concat(&w("A1 B2")).unwrap();
        assert!(dehn_reduce(&c).is_empty());
    }

    #[test]
    fn dehn_idempotent_and_nonincreasing() {
        for text in ["a1 b1 A1 B1 a2 b2 A2", "a1 a1 b2 A1", "B2 A2 B1 A1 b1 a1"] {
            let x = free_reduce(&w(text));
            let y = dehn_reduce(&x);
            assert!(y.len() <= x.len());
            assert_eq!(dehn_reduce(&y), y);
        }
    }

    #[test]
    fn are_equal_examples() {
        let r = relator(2);
        let ra1 = r.concat(&w("a1")).unwrap();
        assert!(are_equal(&ra1, &w("a1")).unwrap());
        assert!(!are_equal(&w("a1"), &w("b1")).unwrap());
        assert!(are_equal(&Word::empty(2), &Word::empty(2)).unwrap());
    }

    #[test]
    fn genus_mismatch_rejected() {
        let u = Word::parse(2, "a1").unwrap();
        let v = Word::parse(3, "a1").unwrap();
        assert!(are_equal(&u, &v).is_err());
    }
}
