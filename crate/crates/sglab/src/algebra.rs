//! The group algebra `C[Γ_g]` with exact coefficients.
//!
//! Coefficients are complex pairs of big rationals; keys are canonical group
//! elements, so algebra equality is literal map equality. The trace is the
//! identity coefficient, and `norm_lower_bound` turns even moments
//! `τ(x^{2p}) = ‖x^p‖₂²` into certified lower bounds for `‖λ(x)‖`.

use std::collections::HashMap;

use num_traits::Zero;

use crate::canon::GroupElement;
use crate::power::omega;
use crate::words::{signed_letters, Word};
use crate::{Error, Rat, Result};

/// Exact complex coefficient: a pair of big rationals.
pub type CRat = num_complex::Complex<Rat>;

pub fn crat_real(r: Rat) -> CRat {
    CRat::new(r, Rat::zero())
}

pub fn crat_int(k: i64) -> CRat {
    crat_real(crate::rat(k))
}

fn crat_abs2(c: &CRat) -> Rat {
    &c.re * &c.re + &c.im * &c.im
}

fn crat_abs_f64(c: &CRat) -> f64 {
    crate::symrep::rat_to_f64(&crat_abs2(c)).sqrt()
}

/// Cap on the number of stored terms during products and powers.
pub const SUPPORT_CAP: usize = 200_000;

/// An element of `C[Γ_g]`: finitely many terms `α_γ·γ`, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElement {
    genus: usize,
    terms: HashMap<GroupElement, CRat>,
}

impl AlgebraElement {
    pub fn zero(genus: usize) -> Self {
        AlgebraElement { genus, terms: HashMap::new() }
    }

    pub fn identity(genus: usize) -> Self {
        Self::from_word(&Word::empty(genus), crat_int(1)).unwrap()
    }

    pub fn from_word(w: &Word, coeff: CRat) -> Result<Self> {
        let mut x = AlgebraElement::zero(w.genus());
        x.add_term(GroupElement::new(w), coeff);
        Ok(x)
    }

    /// `x = ∑ (generators + inverses)`, the element of the strong-convergence demo.
    pub fn generator_sum(genus: usize) -> Result<Self> {
        let mut x = AlgebraElement::zero(genus);
        for l in signed_letters(genus) {
            let w = Word::new(genus, vec![l])?;
            x.add_term(GroupElement::new(&w), crat_int(1));
        }
        Ok(x)
    }

    fn add_term(&mut self, g: GroupElement, c: CRat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g);
        match entry {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn terms(&self) -> &HashMap<GroupElement, CRat> {
        &self.terms
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    /// `|x|`: maximum word length over the support.
    pub fn support_length(&self) -> usize {
        self.terms.keys().map(|g| g.len()).max().unwrap_or(0)
    }

    pub fn coeff(&self, g: &GroupElement) -> CRat {
        self.terms.get(g).cloned().unwrap_or_else(CRat::zero)
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = AlgebraElement::zero(self.genus);
        for (g, a) in &self.terms {
            out.add_term(g.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    /// Exact convolution on canonical keys.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let mut out = AlgebraElement::zero(self.genus);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(g.mul(h)?, a.clone() * b.clone());
                if out.terms.len() > SUPPORT_CAP {
                    return Err(Error::ResourceLimit(format!(
                        "product support exceeds cap {SUPPORT_CAP}"
                    )));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, p: usize) -> Result<Self> {
        let mut out = AlgebraElement::identity(self.genus);
        for _ in 0..p {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// The involution: conjugate coefficients, invert group elements.
    pub fn star(&self) -> Self {
        let mut out = AlgebraElement::zero(self.genus);
        for (g, c) in &self.terms {
            out.add_term(g.inverse(), c.conj());
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.star() == *self
    }

    /// The canonical trace `τ(x) = ⟨δ_e, x δ_e⟩`: the identity coefficient.
    pub fn tau(&self) -> CRat {
        self.coeff(&GroupElement::identity(self.genus))
    }

    /// `∑|α_γ|`: the trivial C*-norm upper bound.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(crat_abs_f64).sum()
    }

    /// `(∑|α_γ|²)^{1/2}`, exact under the square root.
    pub fn l2_norm_sq(&self) -> Rat {
        self.terms.values().map(crat_abs2).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        crate::symrep::rat_to_f64(&self.l2_norm_sq()).sqrt()
    }

    /// Exact moments `τ(x^p)` for `p = 0..=cap`.
    pub fn moments(&self, cap: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(cap + 1);
        let mut xp = AlgebraElement::identity(self.genus);
        values.push(xp.tau());
        for _ in 1..=cap {
            xp = xp.multiply(self)?;
            values.push(xp.tau());
        }
        Ok(MomentSequence { values })
    }

    /// `max_{1 ≤ p ≤ cap} τ(x^{2p})^{1/2p}` for self-adjoint `x`, computed as
    /// `‖x^p‖₂^{1/p}` so only powers up to `cap` are expanded. Always a lower
    /// bound for `‖λ(x)‖`, nondecreasing in `cap`.
    pub fn norm_lower_bound(&self, cap: usize) -> Result<f64> {
        if !self.is_self_adjoint() {
            return Err(Error::Precondition("norm_lower_bound needs x = x*".into()));
        }
        let mut best = 0.0f64;
        let mut xp = self.clone();
        for p in 1..=cap.max(1) {
            // τ(x^{2p}) = ⟨x^p, x^p⟩ since (x^p)* = x^p.
            let m2p = crate::symrep::rat_to_f64(&xp.l2_norm_sq());
            best = best.max(m2p.powf(1.0 / (2 * p) as f64));
            if p < cap {
                xp = xp.multiply(self)?;
            }
        }
        Ok(best)
    }

    /// `u₁(x) = ∑_γ α_γ (ω(γ) − 1)`; real part is exact, and the identity
    /// term contributes `−α_id` since `ω(1) = 0`.
    pub fn u1(&self) -> Result<CRat> {
        let mut acc = CRat::zero();
        for (g, c) in &self.terms {
            let w = omega(g.word())?;
            let factor = crate::rat(w as i64) - crate::rat(1);
            acc += c.clone() * crat_real(factor);
        }
        Ok(acc)
    }

    /// JSON: list of `[word, re_num, re_den, im_num, im_den]` (decimal strings).
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries: Vec<(String, &CRat)> =
            self.terms.iter().map(|(g, c)| (g.to_string(), c)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        serde_json::json!({
            "genus": self.genus,
            "terms": entries
                .into_iter()
                .map(|(w, c)| {
                    serde_json::json!([
                        w,
                        c.re.numer().to_string(),
                        c.re.denom().to_string(),
                        c.im.numer().to_string(),
                        c.im.denom().to_string(),
                    ])
                })
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("algebra element JSON: {m}"));
        let genus = v["genus"].as_u64().ok_or_else(|| bad("genus"))? as usize;
        let mut x = AlgebraElement::zero(genus);
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let arr = t.as_array().filter(|a| a.len() == 5).ok_or_else(|| bad("term"))?;
            let word_str = arr[0].as_str().ok_or_else(|| bad("word"))?;
            let word = if word_str == "e" {
                Word::empty(genus)
            } else {
                Word::parse(genus, word_str)?
            };
            let int = |i: usize| -> Result<crate::Int> {
                arr[i]
                    .as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("coefficient"))
            };
            let c = CRat::new(Rat::new(int(1)?, int(2)?), Rat::new(int(3)?, int(4)?));
            x.add_term(GroupElement::new(&word), c);
        }
        Ok(x)
    }
}

/// Exact trace moments `τ(x^p)`, `p = 0..=P`.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    pub values: Vec<CRat>,
}

impl MomentSequence {
    pub fn value(&self, p: usize) -> &CRat {
        &self.values[p]
    }
}
