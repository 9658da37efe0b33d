//! Verification laboratory for random permutation representations of surface groups.
//!
//! The crate is organised around the objects a genus-`g` surface group
//! `Γ_g = ⟨a_1, b_1, …, a_g, b_g | [a_1,b_1]⋯[a_g,b_g]⟩` drags along:
//! words and their canonical forms ([`words`], [`canon`]), the group algebra
//! `C[Γ]` ([`algebra`]), representation data of `S_n` ([`symrep`]), the space
//! `Hom(Γ_g, S_n)` ([`homs`]), resolutions of cycle graphs and the expansion of
//! `E[fix_γ]` ([`resolutions`], [`sncalc`], [`expansion`]), and the Fuchsian
//! embedding of the Cayley graph in the Poincaré disk ([`hyperbolic`]).
//!
//! Everything that can be exact is exact (big rationals); floating point shows
//! up only in the hyperbolic geometry and in norm estimates, and numeric
//! results never override exact ones.

pub mod algebra;
pub mod canon;
pub mod error;
pub mod expansion;
pub mod graphs;
pub mod homs;
pub mod hyperbolic;
pub mod perm;
pub mod power;
pub mod ratfn;
pub mod resolutions;
pub mod sncalc;
pub mod symrep;
pub mod words;

pub use error::{Error, Result};

/// Exact rational scalar used throughout.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;

/// Convenience: `Rat` from an `i64`.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Convenience: `Rat` from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}
