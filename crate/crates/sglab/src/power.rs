//! Proper-power detection and the divisor-counting functional `ω(γ)`.
//!
//! The search is geometric: if `core = γ₀^k` then the Fuchsian matrix of
//! `γ₀` is the positive-trace `k`-th root of the matrix of `core` (same
//! axis, `1/k` of the translation length), and `γ₀·o` is a tile center. We
//! take the candidate root matrix, tile-walk to the nearest center, and
//! confirm the candidate exactly with the word problem. Candidate `k` are
//! bounded through the translation length (`ℓ(γ₀^k) = k·ℓ(γ₀)` and `ℓ` is
//! bounded below by the systole of the tiling).

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64 as C;
use once_cell::sync::Lazy;

use crate::canon::{cayley_ball, GroupElement};
use crate::hyperbolic::FuchsianGroup;
use crate::words::{are_equal, cyclic_reduce, dehn_reduce, Word};
use crate::{Error, Result};

/// Measured lower bound for translation lengths (systole) per genus,
/// computed once from a radius-2 sweep and shrunk by a safety factor.
static SYSTOLE: Lazy<RwLock<HashMap<usize, f64>>> = Lazy::new(|| RwLock::new(HashMap::new()));

fn systole_estimate(genus: usize) -> Result<f64> {
    if let Some(&s) = SYSTOLE.read().unwrap().get(&genus) {
        return Ok(s);
    }
    let fg = FuchsianGroup::new(genus)?;
    let ball = cayley_ball(genus, 2, None)?;
    let mut min = f64::INFINITY;
    for e in ball.elements() {
        if e.is_identity() {
            continue;
        }
        let l = fg.translation_length(e.word());
        if l > 1e-6 {
            min = min.min(l);
        }
    }
    let s = min * 0.5; // safety margin; only used to cap candidate k
    SYSTOLE.write().unwrap().insert(genus, s);
    Ok(s)
}

/// Result of a proper-power search, including the extended-radius diagnostic.
#[derive(Clone, Debug)]
pub struct ProperPowerReport {
    /// `(root, k)` with maximal `k ≥ 2` and `|root| ≤ search_radius`, if any.
    pub result: Option<(GroupElement, u32)>,
    /// Whether searching with radius `2|w|` instead would change the answer.
    pub extended_radius_differs: bool,
}

fn root_search(w: &Word, radius: usize) -> Result<Option<(GroupElement, u32)>> {
    let genus = w.genus();
    let red = dehn_reduce(w);
    if red.is_empty() {
        return Err(Error::Precondition("proper-power test needs w ≢ 1".into()));
    }
    let (core, conj) = cyclic_reduce(&red);
    let fg = FuchsianGroup::new(genus)?;
    let m = fg.word_matrix(&core);
    let ell = m.translation_length();
    let sys = systole_estimate(genus)?;
    let k_max = ((ell / sys).floor() as u32).min(core.len() as u32);
    for k in (2..=k_max).rev() {
        let root_mat = m.kth_root(k)?;
        let cand = fg.walk_to_point(root_mat.apply(C::new(0.0, 0.0)));
        if are_equal(&cand.pow(k as usize), &core)? {
            // Translation-length cross-check: ℓ(core) = k·ℓ(candidate).
            let lc = fg.translation_length(&cand);
            debug_assert!((ell - k as f64 * lc).abs() < 1e-6 * (1.0 + ell));
            let root = GroupElement::new(&conj.concat(&cand)?.concat(&conj.inverse())?);
            if root.len() <= radius {
                return Ok(Some((root, k)));
            }
        }
    }
    Ok(None)
}

/// If `w ≡ γ₀^k` for some `k ≥ 2` with `|γ₀| ≤ search_radius`, return the
/// pair with maximal `k` (so the root is a non-power); else `None`.
pub fn is_proper_power(w: &Word, search_radius: usize) -> Result<Option<(GroupElement, u32)>> {
    Ok(is_proper_power_report(w, search_radius)?.result)
}

/// Same as [`is_proper_power`], also reporting whether the extended radius
/// `2|w|` would change the answer (it never should; see module docs).
pub fn is_proper_power_report(w: &Word, search_radius: usize) -> Result<ProperPowerReport> {
    let result = root_search(w, search_radius)?;
    let extended = root_search(w, 2 * w.len().max(1))?;
    let differs = match (&result, &extended) {
        (Some(a), Some(b)) => a != b,
        (None, None) => false,
        _ => true,
    };
    Ok(ProperPowerReport { result, extended_radius_differs: differs })
}

/// `ω(γ)`: 0 for the identity, else the number of divisors of the maximal
/// `k` with `γ = γ₀^k` (so 1 for non-powers).
pub fn omega(w: &Word) -> Result<u32> {
    let red = dehn_reduce(w);
    if red.is_empty() {
        return Ok(0);
    }
    let k = match root_search(&red, 2 * red.len())? {
        Some((_, k)) => k,
        None => 1,
    };
    Ok((1..=k).filter(|d| k % d == 0).count() as u32)
}
