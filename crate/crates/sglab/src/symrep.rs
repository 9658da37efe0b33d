//! Partitions, Young-diagram data, Murnaghan–Nakayama characters, and the
//! Witten zeta function `ζ(s; S_n) = Σ_λ d_λ^{−s}`.
//!
//! Characters are exact `i128` integers computed by the MN border-strip
//! recursion on beta-numbers and memoized globally on `(shape, class
//! suffix)`; dimensions use the hook-length formula in big integers.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::{Error, Int, Rat, Result};

/// Hard cap on the size of symmetric groups we touch.
pub const N_CAP: usize = 40;

/// A partition `λ ⊢ n`: weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.iter().any(|&p| p == 0) {
            return Err(Error::Precondition(format!(
                "not weakly decreasing positive parts: {parts:?}"
            )));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition { parts: Vec::new() }
    }

    pub fn single_row(n: usize) -> Partition {
        if n == 0 {
            Partition::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    /// `b_λ`: boxes outside the first row.
    pub fn b_row(&self) -> usize {
        self.n() - self.parts.first().copied().unwrap_or(0)
    }

    /// `b_{λ^∨}`: boxes outside the first column.
    pub fn b_col(&self) -> usize {
        self.n() - self.rows()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0);
        let parts = (0..cols)
            .map(|c| self.parts.iter().filter(|&&p| p > c).count())
            .collect();
        Partition { parts }
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other
            .parts
            .iter()
            .enumerate()
            .all(|(i, &p)| self.parts.get(i).copied().unwrap_or(0) >= p)
    }

    /// Hook length of the cell `(r, c)` (0-based).
    fn hook(&self, r: usize, c: usize) -> usize {
        let arm = self.parts[r] - c - 1;
        let leg = self.parts.iter().skip(r + 1).filter(|&&p| p > c).count();
        arm + leg + 1
    }

    /// Dimension of the irreducible `S_n`-representation, hook-length formula.
    pub fn dim(&self) -> Int {
        let n = self.n();
        let mut num = factorial(n);
        for r in 0..self.parts.len() {
            for c in 0..self.parts[r] {
                let (q, rem) = num.div_rem(&Int::from(self.hook(r, c)));
                debug_assert!(rem.is_zero() || !num.is_zero());
                num = q;
            }
        }
        num
    }

    /// `λ⁺(n)`: `λ` placed under a first row completing `n` boxes.
    /// Requires `n ≥ |λ| + λ₁`.
    pub fn plus_n(&self, n: usize) -> Result<Partition> {
        let b = self.n();
        let first = self.parts.first().copied().unwrap_or(0);
        if n < b + first {
            return Err(Error::Precondition(format!(
                "λ⁺({n}) undefined for λ = {self} (needs n ≥ {})",
                b + first
            )));
        }
        let mut parts = vec![n - b];
        parts.extend_from_slice(&self.parts);
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> Int {
    (1..=n).fold(Int::one(), |acc, k| acc * Int::from(k))
}

/// All partitions of `n`, reverse-lexicographic: `(n)` first, `(1ⁿ)` last.
pub fn partitions_of(n: usize) -> Result<Vec<Partition>> {
    if n > N_CAP {
        return Err(Error::ResourceLimit(format!("partitions_of({n}) exceeds cap {N_CAP}")));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(remaining: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(remaining)).rev() {
            cur.push(p);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n.max(1), &mut cur, &mut out);
    if n == 0 {
        out = vec![Partition::empty()];
    }
    Ok(out)
}

/// Independent recurrence for `p(n)` (Euler's pentagonal number theorem);
/// used as an oracle for `partitions_of`.
pub fn partition_count(n: usize) -> u64 {
    let mut p = vec![0i64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc = 0i64;
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > m && g2 as usize > m {
                break;
            }
            let sign = if k % 2 == 0 { -1 } else { 1 };
            if g1 as usize <= m {
                acc += sign * p[m - g1 as usize];
            }
            if g2 as usize <= m {
                acc += sign * p[m - g2 as usize];
            }
            k += 1;
        }
        p[m] = acc;
    }
    p[n] as u64
}

/// Size of the conjugacy class of cycle type `μ ⊢ n`: `n! / z_μ`.
pub fn class_size(mu: &Partition) -> Int {
    let n = mu.n();
    let mut z = Int::one();
    let mut mult: HashMap<usize, usize> = HashMap::new();
    for &k in mu.parts() {
        *mult.entry(k).or_insert(0) += 1;
    }
    for (k, m) in mult {
        for _ in 0..m {
            z *= Int::from(k);
        }
        z *= factorial(m);
    }
    factorial(n) / z
}

type MnKey = (Vec<u8>, Vec<u8>);
static MN_CACHE: Lazy<RwLock<HashMap<MnKey, i128>>> = Lazy::new(|| RwLock::new(HashMap::new()));

fn beta_to_parts(mut beta: Vec<usize>) -> Vec<usize> {
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let m = beta.len();
    let mut parts: Vec<usize> = beta
        .into_iter()
        .enumerate()
        .map(|(i, b)| b - (m - 1 - i))
        .collect();
    while parts.last() == Some(&0) {
        parts.pop();
    }
    parts
}

fn mn_rec(lambda: &[usize], mu: &[usize]) -> i128 {
    if mu.is_empty() {
        return 1; // lambda must be empty too when sizes match
    }
    let key: MnKey = (
        lambda.iter().map(|&p| p as u8).collect(),
        mu.iter().map(|&p| p as u8).collect(),
    );
    if let Some(&v) = MN_CACHE.read().unwrap().get(&key) {
        return v;
    }
    let t = mu[0];
    let rest = &mu[1..];
    // Beta numbers: λ_i + (m − 1 − i).
    let m = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + (m - 1 - i)).collect();
    let mut total: i128 = 0;
    for (i, &b) in beta.iter().enumerate() {
        if b < t || beta.contains(&(b - t)) {
            continue;
        }
        // Height of the strip = #beta numbers strictly between b−t and b.
        let between = beta.iter().filter(|&&x| x > b - t && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut nb = beta.clone();
        nb[i] = b - t;
        let sub = beta_to_parts(nb);
        total += sign as i128 * mn_rec(&sub, rest);
    }
    MN_CACHE.write().unwrap().insert(key, total);
    total
}

/// Murnaghan–Nakayama character value `χ_λ(μ)`, exact.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<i128> {
    if lambda.n() != mu.n() {
        return Err(Error::Precondition(format!(
            "|λ| = {} but |μ| = {}",
            lambda.n(),
            mu.n()
        )));
    }
    Ok(mn_rec(lambda.parts(), mu.parts()))
}

/// Full character table of `S_n` with classes and their sizes.
pub struct CharacterTable {
    pub n: usize,
    pub irreps: Vec<Partition>,
    pub classes: Vec<Partition>,
    /// `chi[l][c] = χ_{irreps[l]}(classes[c])`.
    pub chi: Vec<Vec<i128>>,
    pub dims: Vec<Int>,
    pub class_sizes: Vec<Int>,
}

impl CharacterTable {
    pub fn build(n: usize) -> Result<CharacterTable> {
        let irreps = partitions_of(n)?;
        let classes = irreps.clone();
        let dims: Vec<Int> = irreps.iter().map(|l| l.dim()).collect();
        let class_sizes: Vec<Int> = classes.iter().map(class_size).collect();
        use rayon::prelude::*;
        let chi: Vec<Vec<i128>> = irreps
            .par_iter()
            .map(|l| {
                classes
                    .iter()
                    .map(|c| mn_rec(l.parts(), c.parts()))
                    .collect()
            })
            .collect();
        Ok(CharacterTable { n, irreps, classes, chi, dims, class_sizes })
    }

    pub fn class_index(&self, mu: &Partition) -> Option<usize> {
        self.classes.iter().position(|c| c == mu)
    }
}

/// Exact `ζ(s; S_n)` for integer `s ≥ 1`.
pub fn witten_zeta(s: u32, n: usize) -> Result<Rat> {
    let mut acc = Rat::zero();
    for l in partitions_of(n)? {
        let d = l.dim();
        let mut den = Int::one();
        for _ in 0..s {
            den *= &d;
        }
        acc += Rat::new(Int::one(), den);
    }
    Ok(acc)
}

/// `ζ(s; S_n)` for real `s`, compensated (Kahan) summation.
pub fn witten_zeta_real(s: f64, n: usize) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in partitions_of(n)? {
        let d = l.dim().to_f64().ok_or_else(|| {
            Error::ResourceLimit("dimension exceeds f64 range".into())
        })?;
        let term = d.powf(-s);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Result of the zeta-tail inequality check (Prop. 4.1 shape).
#[derive(Clone, Debug)]
pub struct ZetaTail {
    pub tail: Rat,
    pub tail_f64: f64,
    /// Smallest κ making `tail ≤ (κ b^{2s}/(n−b²)^s)^b` hold at this (s,n,b).
    pub kappa_required: f64,
}

/// Exact tail `Σ_{b_λ ≥ b, b_{λ^∨} ≥ b} d_λ^{−s}` and the κ it demands.
pub fn zeta_tail(s: u32, n: usize, b: usize) -> Result<ZetaTail> {
    if b * b > n / 3 {
        return Err(Error::Precondition(format!("zeta_tail needs b² ≤ n/3, got b={b}, n={n}")));
    }
    let mut tail = Rat::zero();
    for l in partitions_of(n)? {
        if l.b_row() >= b && l.b_col() >= b {
            let d = l.dim();
            let mut den = Int::one();
            for _ in 0..s {
                den *= &d;
            }
            tail += Rat::new(Int::one(), den);
        }
    }
    let tail_f64 = rat_to_f64(&tail);
    let kappa_required = if b == 0 || tail_f64 == 0.0 {
        0.0
    } else {
        tail_f64.powf(1.0 / b as f64) * ((n - b * b) as f64).powi(s as i32)
            / (b as f64).powi(2 * s as i32)
    };
    Ok(ZetaTail { tail, tail_f64, kappa_required })
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 can overflow for huge numerator/denominator pairs;
    // go through a scaled division.
    r.to_f64().unwrap_or_else(|| {
        let num = r.numer();
        let den = r.denom();
        let shift = (den.bits() as i64 - 60).max(0) as u64;
        let den_s = den >> shift;
        let num_s = num >> shift;
        num_s.to_f64().unwrap_or(f64::NAN) / den_s.to_f64().unwrap_or(f64::NAN)
    })
}

/// Number of standard Young tableaux of the skew shape `λ/μ`.
pub fn skew_tableaux_count(lambda: &Partition, mu: &Partition) -> Result<Int> {
    if !lambda.contains(mu) {
        return Err(Error::Precondition(format!("{mu} ⊄ {lambda}")));
    }
    // Count linear extensions by peeling outer corners down to μ.
    fn rec(
        shape: &[usize],
        mu: &[usize],
        memo: &mut HashMap<Vec<usize>, Int>,
    ) -> Int {
        let key = shape.to_vec();
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let total_mu: usize = mu.iter().sum();
        let total: usize = shape.iter().sum();
        if total == total_mu {
            return Int::one();
        }
        let mut acc = Int::zero();
        for i in 0..shape.len() {
            let below = shape.get(i + 1).copied().unwrap_or(0);
            let floor = mu.get(i).copied().unwrap_or(0);
            if shape[i] > below.max(floor) {
                let mut next = shape.to_vec();
                next[i] -= 1;
                while next.last() == Some(&0) {
                    next.pop();
                }
                acc += rec(&next, mu, memo);
            }
        }
        memo.insert(key, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    Ok(rec(lambda.parts(), mu.parts(), &mut memo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partitions_small() {
        let p3 = partitions_of(3).unwrap();
        assert_eq!(p3, vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        assert_eq!(partitions_of(0).unwrap(), vec![Partition::empty()]);
        assert_eq!(partitions_of(10).unwrap().len(), 42);
        assert!(partitions_of(41).is_err());
    }

    #[test]
    fn partition_count_oracle() {
        for n in 0..=30 {
            assert_eq!(
                partitions_of(n).unwrap().len() as u64,
                partition_count(n),
                "p({n})"
            );
        }
    }

    #[test]
    fn conjugate_involution_and_b_stats() {
        for n in 0..=9 {
            for l in partitions_of(n).unwrap() {
                assert_eq!(l.conjugate().conjugate(), l);
                assert_eq!(l.b_row(), l.conjugate().b_col());
            }
        }
        assert_eq!(p(&[3, 2]).conjugate(), p(&[2, 2, 1]));
        assert_eq!(p(&[3, 2]).b_row(), 2);
        assert_eq!(p(&[3, 2]).b_col(), 3);
    }

    #[test]
    fn dims() {
        assert_eq!(p(&[2, 1]).dim(), Int::from(2));
        assert_eq!(p(&[5]).dim(), Int::from(1));
        assert_eq!(p(&[1, 1, 1, 1]).dim(), Int::from(1));
        assert_eq!(p(&[3, 2]).dim(), Int::from(5));
        // d_λ = d_{λ^∨} for all λ ⊢ n ≤ 12.
        for n in 1..=12 {
            for l in partitions_of(n).unwrap() {
                assert_eq!(l.dim(), l.conjugate().dim());
            }
        }
    }

    #[test]
    fn burnside() {
        for n in 1..=10 {
            let sum: Int = partitions_of(n)
                .unwrap()
                .iter()
                .map(|l| {
                    let d = l.dim();
                    &d * &d
                })
                .sum();
            assert_eq!(sum, factorial(n), "n = {n}");
        }
    }

    #[test]
    fn mn_hand_values() {
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[2, 1])).unwrap(), 0);
        // Trivial and sign characters.
        for n in 1..=8 {
            for mu in partitions_of(n).unwrap() {
                assert_eq!(mn_character(&Partition::single_row(n), &mu).unwrap(), 1);
                let sign = if (n - mu.rows()) % 2 == 0 { 1 } else { -1 };
                let ones = Partition::new(vec![1; n]).unwrap();
                assert_eq!(mn_character(&ones, &mu).unwrap(), sign);
            }
        }
    }

    #[test]
    fn mn_identity_class_is_dim() {
        for n in 1..=8 {
            let id = Partition::new(vec![1; n]).unwrap();
            for l in partitions_of(n).unwrap() {
                assert_eq!(
                    Int::from(mn_character(&l, &id).unwrap()),
                    l.dim(),
                    "λ = {l}"
                );
            }
        }
    }

    #[test]
    fn conjugate_character_is_sign_twist() {
        for n in 1..=8 {
            for l in partitions_of(n).unwrap() {
                for mu in partitions_of(n).unwrap() {
                    let sign = if (n - mu.rows()) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(
                        mn_character(&l.conjugate(), &mu).unwrap(),
                        sign * mn_character(&l, &mu).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn column_orthogonality() {
        for n in 1..=8 {
            let t = CharacterTable::build(n).unwrap();
            for ci in 0..t.classes.len() {
                for cj in 0..t.classes.len() {
                    let dot: i128 = (0..t.irreps.len())
                        .map(|l| t.chi[l][ci] * t.chi[l][cj])
                        .sum();
                    if ci == cj {
                        let centralizer = factorial(n) / &t.class_sizes[ci];
                        assert_eq!(Int::from(dot), centralizer);
                    } else {
                        assert_eq!(dot, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn class_sizes_sum() {
        for n in 1..=9 {
            let total: Int = partitions_of(n).unwrap().iter().map(class_size).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(witten_zeta(2, 3).unwrap(), crate::ratio(9, 4));
        assert_eq!(witten_zeta(2, 1).unwrap(), crate::rat(1));
        assert_eq!(witten_zeta(5, 1).unwrap(), crate::rat(1));
        // n = 4 pinned exactly: dims 1,3,2,3,1 give 2 + 1/9 + 1/4 + 1/9.
        assert_eq!(witten_zeta(2, 4).unwrap(), crate::ratio(89, 36));
        // ζ(2;S_n) − 2 → 0 at rate O(n⁻²): smallest nontrivial dim is n−1.
        for n in 5..=30 {
            let z = rat_to_f64(&witten_zeta(2, n).unwrap());
            assert!(z > 2.0 && z <= 2.3, "ζ(2;S_{n}) = {z}");
            let excess = (z - 2.0) * (n as f64).powi(2);
            assert!(excess > 2.0 && excess < 8.0, "n={n}: scaled excess {excess}");
        }
        // Real-s agrees with exact within float tolerance.
        let exact = rat_to_f64(&witten_zeta(2, 10).unwrap());
        let real = witten_zeta_real(2.0, 10).unwrap();
        assert!((exact - real).abs() < 1e-12);
    }

    #[test]
    fn zeta_tail_values() {
        // b = 1 excludes exactly (n) and (1ⁿ).
        for n in 4..=12 {
            let t = zeta_tail(2, n, 1).unwrap();
            let z = witten_zeta(2, n).unwrap();
            assert_eq!(t.tail, z - crate::rat(2));
        }
        let t = zeta_tail(2, 27, 3).unwrap();
        assert!(t.tail >= Rat::zero().clone());
        assert!(t.kappa_required.is_finite());
        assert!(zeta_tail(2, 9, 2).is_err()); // b² > n/3
    }

    #[test]
    fn skew_counts() {
        assert_eq!(skew_tableaux_count(&p(&[2, 1]), &p(&[1])).unwrap(), Int::from(2));
        assert_eq!(skew_tableaux_count(&p(&[2, 1]), &p(&[2, 1])).unwrap(), Int::one());
        // Hook shapes: straight-shape count equals the SYT count d_λ.
        for n in 1..=8 {
            for l in partitions_of(n).unwrap() {
                assert_eq!(skew_tableaux_count(&l, &Partition::empty()).unwrap(), l.dim());
            }
        }
        // |Tab(λ/μ)| ≤ k! for μ ⊂_k λ, |λ| ≤ 8.
        for n in 1..=8 {
            for l in partitions_of(n).unwrap() {
                for m in 0..n {
                    for mu in partitions_of(m).unwrap() {
                        if l.contains(&mu) {
                            let k = n - m;
                            assert!(
                                skew_tableaux_count(&l, &mu).unwrap() <= factorial(k),
                                "λ={l}, μ={mu}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn plus_n() {
        assert_eq!(p(&[1]).plus_n(4).unwrap(), p(&[3, 1]));
        assert_eq!(p(&[2]).plus_n(5).unwrap(), p(&[3, 2]));
        assert_eq!(Partition::empty().plus_n(3).unwrap(), p(&[3]));
        assert!(p(&[2]).plus_n(3).is_err());
    }
}
