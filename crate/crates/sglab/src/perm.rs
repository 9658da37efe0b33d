//! Permutations of `{0,…,n−1}` and the structure the Hom samplers need:
//! cycle types, deterministic conjugators, and exactly-uniform centralizer
//! elements.

use rand::prelude::*;

use crate::symrep::Partition;
use crate::{Error, Result};

/// A permutation, stored as its image table: `σ(i) = map[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    map: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { map: (0..n).collect() }
    }

    pub fn new(map: Vec<usize>) -> Result<Perm> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::Precondition(format!("not a permutation: {map:?}")));
            }
            seen[v] = true;
        }
        Ok(Perm { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Function composition: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { map: other.map.iter().map(|&i| self.map[i]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Perm { map: inv }
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, b: &Perm) -> Perm {
        self.compose(b).compose(&self.inverse()).compose(&b.inverse())
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &Perm) -> Perm {
        self.compose(other).compose(&self.inverse())
    }

    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|&(i, &v)| i == v).count()
    }

    /// Cycles, each starting at its smallest point, longest first.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.map[start];
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.map[cur];
            }
            cycles.push(cyc);
        }
        cycles.sort_by_key(|c| std::cmp::Reverse(c.len()));
        cycles
    }

    pub fn cycle_type(&self) -> Partition {
        let parts: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        Partition::new(parts).expect("cycle lengths sorted descending")
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Perm {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Perm { map }
    }

    /// Canonical permutation with the given cycle type: consecutive blocks.
    pub fn from_cycle_type(mu: &Partition) -> Perm {
        let n = mu.n();
        let mut map = vec![0; n];
        let mut start = 0;
        for &len in mu.parts() {
            for j in 0..len {
                map[start + j] = start + (j + 1) % len;
            }
            start += len;
        }
        Perm { map }
    }
}

impl std::fmt::Display for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for cyc in self.cycles() {
            if cyc.len() > 1 {
                write!(f, "(")?;
                for (i, v) in cyc.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", v + 1)?;
                }
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

/// A permutation `b` with `b · p · b⁻¹ = q`; errors if the cycle types differ.
pub fn conjugator_between(p: &Perm, q: &Perm) -> Result<Perm> {
    if p.cycle_type() != q.cycle_type() {
        return Err(Error::Precondition(format!(
            "cycle types differ: {} vs {}",
            p.cycle_type(),
            q.cycle_type()
        )));
    }
    let pc = p.cycles();
    let qc = q.cycles();
    let mut map = vec![0; p.degree()];
    for (cp, cq) in pc.iter().zip(qc.iter()) {
        for (x, y) in cp.iter().zip(cq.iter()) {
            map[*x] = *y;
        }
    }
    Ok(Perm { map })
}

/// Exactly uniform element of the centralizer of `p`: independently for each
/// cycle length, a uniform permutation of the same-length cycles and a
/// uniform rotation of each.
pub fn centralizer_sample<R: Rng + ?Sized>(p: &Perm, rng: &mut R) -> Perm {
    let mut by_len: std::collections::BTreeMap<usize, Vec<Vec<usize>>> = Default::default();
    for cyc in p.cycles() {
        by_len.entry(cyc.len()).or_default().push(cyc);
    }
    let mut map = vec![0; p.degree()];
    for (len, group) in by_len {
        let mut perm_of_cycles: Vec<usize> = (0..group.len()).collect();
        perm_of_cycles.shuffle(rng);
        for (i, cyc) in group.iter().enumerate() {
            let target = &group[perm_of_cycles[i]];
            let rot = rng.gen_range(0..len);
            for (j, &x) in cyc.iter().enumerate() {
                map[x] = target[(j + rot) % len];
            }
        }
    }
    Perm { map }
}

/// `|Z(p)| = ∏_ℓ ℓ^{m_ℓ} m_ℓ!` for cycle type with multiplicities `m_ℓ`.
pub fn centralizer_order(mu: &Partition) -> crate::Int {
    use num_traits::One;
    let mut mult: std::collections::HashMap<usize, usize> = Default::default();
    for &k in mu.parts() {
        *mult.entry(k).or_insert(0) += 1;
    }
    let mut z = crate::Int::one();
    for (k, m) in mult {
        for _ in 0..m {
            z *= crate::Int::from(k);
        }
        z *= crate::symrep::factorial(m);
    }
    z
}
