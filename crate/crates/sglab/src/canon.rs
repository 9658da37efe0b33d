//! Canonical representatives of elements of `Γ_g` and the Cayley-ball table.
//!
//! A Dehn-reduced word in the surface-group presentation is geodesic, and any
//! two geodesic spellings of the same element are connected by moves that
//! exchange half a relator rotation for the complementary half. Canonical
//! form = ShortLex-least word in the saturation of a Dehn-reduced word under
//! these length-nonincreasing moves. The Cayley ball deduplicates
//! independently (numeric fingerprint pre-filter + `are_equal`), which the
//! tests use to cross-validate the saturation.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::hyperbolic::FuchsianGroup;
use crate::words::{are_equal, dehn_reduce, signed_letters, Word};
use crate::{Error, Result};

/// ShortLex: length first, then lexicographic on letters.
pub fn shortlex_cmp(a: &Word, b: &Word) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.letters().cmp(b.letters()))
}

/// The ShortLex-least geodesic spelling of the element represented by `w`.
pub fn canonical_word(w: &Word) -> Word {
    let mut cur = dehn_reduce(w);
    'restart: loop {
        let mut best = cur.clone();
        let mut seen: HashSet<Word> = HashSet::new();
        seen.insert(cur.clone());
        let mut queue: VecDeque<Word> = VecDeque::new();
        queue.push_back(cur.clone());
        while let Some(u) = queue.pop_front() {
            for v in crate::words::length_nonincreasing_moves(&u) {
                if v.len() < cur.len() {
                    // A shorter spelling exists; Dehn-reduce and start over.
                    cur = dehn_reduce(&v);
                    continue 'restart;
                }
                if seen.insert(v.clone()) {
                    if shortlex_cmp(&v, &best) == Ordering::Less {
                        best = v.clone();
                    }
                    queue.push_back(v);
                }
            }
        }
        return best;
    }
}

/// An element of `Γ_g`, stored by its canonical word. Equality and hashing
/// are plain word equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    word: Word,
}

impl GroupElement {
    pub fn identity(genus: usize) -> Self {
        GroupElement { word: Word::empty(genus) }
    }

    pub fn new(w: &Word) -> Self {
        GroupElement { word: canonical_word(w) }
    }

    /// Wrap a word that is already canonical (debug-checked).
    pub fn from_canonical(w: Word) -> Self {
        debug_assert_eq!(canonical_word(&w), w);
        GroupElement { word: w }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn genus(&self) -> usize {
        self.word.genus()
    }

    /// Geodesic length `|γ|`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(&self.word.inverse())
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement::new(&self.word.concat(&other.word)?))
    }

    pub fn pow(&self, k: usize) -> GroupElement {
        GroupElement::new(&self.word.pow(k))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(&self.word, &other.word)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", self.word)
        }
    }
}

/// BFS ball of radius `R` about the identity in `Cay(Γ_g)`.
pub struct Ball {
    genus: usize,
    layers: Vec<Vec<GroupElement>>,
    index: HashMap<Word, usize>,
}

impl Ball {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn radius(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[Vec<GroupElement>] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.layers.iter().flatten()
    }

    /// Geodesic length of `w`'s element, if within the ball.
    pub fn layer_of(&self, w: &Word) -> Option<usize> {
        self.index.get(&canonical_word(w)).copied()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.layer_of(w).is_some()
    }
}

/// Default cap on ball size.
pub const BALL_SIZE_CAP: usize = 400_000;

/// Build the radius-`R` Cayley ball. Deduplication compares candidates
/// against fingerprint-near classes via `are_equal`; the numeric fingerprint
/// never decides equality by itself.
pub fn cayley_ball(genus: usize, radius: usize, cap: Option<usize>) -> Result<Ball> {
    let cap = cap.unwrap_or(BALL_SIZE_CAP);
    let fg = FuchsianGroup::new(genus)?;
    let letters = signed_letters(genus);

    let mut layers: Vec<Vec<GroupElement>> = vec![vec![GroupElement::identity(genus)]];
    let mut index: HashMap<Word, usize> = HashMap::new();
    index.insert(Word::empty(genus), 0);
    // Fingerprint bucket → canonical words of known classes.
    let mut buckets: HashMap<(i64, i64), Vec<Word>> = HashMap::new();
    buckets
        .entry(fg.fingerprint(&Word::empty(genus)))
        .or_default()
        .push(Word::empty(genus));
    let mut total = 1usize;

    for r in 0..radius {
        let mut next: Vec<GroupElement> = Vec::new();
        let frontier: Vec<Word> = layers[r].iter().map(|e| e.word().clone()).collect();
        for w in frontier {
            for &l in &letters {
                if w.letters().last().is_some_and(|&t| t.is_inverse_of(l)) {
                    continue; // length-(r−1) neighbor, already known
                }
                let mut cand_letters = w.letters().to_vec();
                cand_letters.push(l);
                let cand = Word::new(genus, cand_letters)?;
                let fp = fg.fingerprint(&cand);
                let mut known = false;
                'search: for dx in -1..=1i64 {
                    for dy in -1..=1i64 {
                        if let Some(reps) = buckets.get(&(fp.0 + dx, fp.1 + dy)) {
                            for rep in reps {
                                if are_equal(&cand, rep)? {
                                    known = true;
                                    break 'search;
                                }
                            }
                        }
                    }
                }
                if known {
                    continue;
                }
                total += 1;
                if total > cap {
                    return Err(Error::ResourceLimit(format!(
                        "cayley ball exceeds cap {cap} at radius {}",
                        r + 1
                    )));
                }
                let canon = canonical_word(&cand);
                debug_assert_eq!(canon.len(), r + 1, "BFS layer must equal geodesic length");
                buckets.entry(fp).or_default().push(canon.clone());
                index.insert(canon.clone(), r + 1);
                next.push(GroupElement::from_canonical(canon));
            }
        }
        next.sort();
        layers.push(next);
    }
    Ok(Ball { genus, layers, index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{relator, Letter};

    fn w(text: &str) -> Word {
        Word::parse(2, text).unwrap()
    }

    #[test]
    fn canonical_basics() {
        assert_eq!(canonical_word(&w("a1")), w("a1"));
        assert!(canonical_word(&relator(2)).is_empty());
        // Canonical form is a class invariant under relator insertion.
        let x = w("a1 b2 A1");
        let y = x.concat(&relator(2)).unwrap();
        assert_eq!(canonical_word(&x), canonical_word(&y));
        // Idempotent.
        let c = canonical_word(&w("B2 A2 b1 a1 b1"));
        assert_eq!(canonical_word(&c), c);
    }

    #[test]
    fn canonical_separates_unequal() {
        assert_ne!(canonical_word(&w("a1")), canonical_word(&w("b1")));
        assert_ne!(canonical_word(&w("a1 b1")), canonical_word(&w("b1 a1")));
    }

    #[test]
    fn canonical_matches_word_problem_on_random_words() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let letters = signed_letters(2);
        for _ in 0..60 {
            let len = rng.gen_range(0..=8);
            let u = Word::new(
                2,
                (0..len).map(|_| *letters.choose(&mut rng).unwrap()).collect(),
            )
            .unwrap();
            let len2 = rng.gen_range(0..=8);
            let v = Word::new(
                2,
                (0..len2).map(|_| *letters.choose(&mut rng).unwrap()).collect(),
            )
            .unwrap();
            assert!(are_equal(&u, &canonical_word(&u)).unwrap());
            assert_eq!(
                canonical_word(&u) == canonical_word(&v),
                are_equal(&u, &v).unwrap()
            );
        }
    }

    #[test]
    fn group_element_arithmetic() {
        let a = GroupElement::new(&w("a1"));
        let e = a.mul(&a.inverse()).unwrap();
        assert!(e.is_identity());
        assert_eq!(a.pow(3).len(), 3);
        assert_eq!(GroupElement::new(&relator(2)), GroupElement::identity(2));
    }

    #[test]
    fn ball_layer_sizes_small() {
        let ball = cayley_ball(2, 2, None).unwrap();
        assert_eq!(ball.layer_sizes(), vec![1, 8, 56]);
        assert_eq!(ball.len(), 65);
    }

    #[test]
    fn ball_radius_zero_and_one() {
        assert_eq!(cayley_ball(2, 0, None).unwrap().len(), 1);
        assert_eq!(cayley_ball(2, 1, None).unwrap().len(), 9);
    }

    #[test]
    fn ball_oracle_pairwise_inequality_radius_2() {
        // Oracle: every pair of distinct freely reduced words of length ≤ 2
        // is inequal in Γ (shortest relator has length 8), so the ball must
        // have exactly 65 classes.
        let mut words = vec![Word::empty(2)];
        for l in signed_letters(2) {
            words.push(Word::new(2, vec![l]).unwrap());
            for l2 in signed_letters(2) {
                if !l2.is_inverse_of(l) {
                    words.push(Word::new(2, vec![l, l2]).unwrap());
                }
            }
        }
        assert_eq!(words.len(), 65);
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                assert!(!are_equal(&words[i], &words[j]).unwrap());
            }
        }
    }

    #[test]
    fn ball_layers_are_canonical_lengths() {
        let ball = cayley_ball(2, 3, None).unwrap();
        for (r, layer) in ball.layers().iter().enumerate() {
            assert!(!layer.is_empty());
            for e in layer {
                assert_eq!(e.len(), r);
                assert_eq!(canonical_word(e.word()), *e.word());
            }
        }
        // Lookup round-trip, including via a non-canonical spelling.
        let x = w("a1 b1 A1").concat(&relator(2)).unwrap();
        assert_eq!(ball.layer_of(&x), Some(3));
    }

    #[test]
    fn ball_genus_three() {
        let ball = cayley_ball(3, 2, None).unwrap();
        assert_eq!(ball.layer_sizes(), vec![1, 12, 12 * 11]);
    }

    #[test]
    fn ball_cap_enforced() {
        assert!(matches!(
            cayley_ball(2, 3, Some(10)),
            Err(Error::ResourceLimit(_))
        ));
    }
}
