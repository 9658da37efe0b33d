//! The elementary `S_n` integration formula, partition operators, Cassidy
//! projectors, and the two routes to `Θ_λ(Y)`.
//!
//! The numeric route enumerates tuples of permutations obeying a labeled
//! graph `Y` and averages a character over them. The symbolic route expands
//! the projection formula into partition operators, groups index labelings by
//! the set partition they induce, and integrates letter by letter — the
//! result is an exact rational function of `n`. The two routes are entirely
//! independent and are cross-checked against each other in the tests.

use std::collections::HashMap;
use std::sync::RwLock;

use itertools::Itertools;
use num_traits::Zero;
use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::expansion::hook_dim_poly;
use crate::graphs::LabeledGraph;
use crate::perm::Perm;
use crate::ratfn::{Poly, RationalFn};
use crate::symrep::{factorial, mn_character, Partition};
use crate::{rat, Error, Int, Rat, Result};

/// A set partition of `{0, …, m−1}`, stored in restricted-growth form:
/// `assign[i]` is the block of `i`, and blocks are numbered by first
/// appearance.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetPartition {
    assign: Vec<usize>,
}

impl SetPartition {
    /// Canonicalizes an arbitrary block-id assignment.
    pub fn from_assignment(raw: &[usize]) -> SetPartition {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let assign = raw
            .iter()
            .map(|&r| {
                let next = relabel.len();
                *relabel.entry(r).or_insert(next)
            })
            .collect();
        SetPartition { assign }
    }

    /// The partition induced by value equality.
    pub fn from_values<T: std::hash::Hash + Eq>(values: &[T]) -> SetPartition {
        let mut relabel: HashMap<&T, usize> = HashMap::new();
        let assign = values
            .iter()
            .map(|v| {
                let next = relabel.len();
                *relabel.entry(v).or_insert(next)
            })
            .collect();
        SetPartition { assign }
    }

    pub fn from_blocks(m: usize, blocks: &[Vec<usize>]) -> Result<SetPartition> {
        let mut raw = vec![usize::MAX; m];
        for (id, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Precondition("empty block".into()));
            }
            for &x in block {
                if x >= m || raw[x] != usize::MAX {
                    return Err(Error::Precondition(format!(
                        "blocks do not partition [{m}]: {blocks:?}"
                    )));
                }
                raw[x] = id;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::Precondition(format!(
                "blocks do not cover [{m}]: {blocks:?}"
            )));
        }
        Ok(SetPartition::from_assignment(&raw))
    }

    pub fn ground_size(&self) -> usize {
        self.assign.len()
    }

    /// `|π|`, the number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.assign.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.assign[i]
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.assign[i] == self.assign[j]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.assign.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }

    /// Whether every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &SetPartition) -> bool {
        debug_assert_eq!(self.ground_size(), coarser.ground_size());
        let m = self.assign.len();
        (0..m).all(|i| {
            (i + 1..m).all(|j| !self.same_block(i, j) || coarser.same_block(i, j))
        })
    }

    /// All set partitions of `[m]`, in restricted-growth order.
    pub fn all(m: usize) -> Result<Vec<SetPartition>> {
        if m > 10 {
            return Err(Error::ResourceLimit(format!(
                "set partitions of ground size {m} (cap 10)"
            )));
        }
        let mut out = Vec::new();
        let mut assign = vec![0; m];
        fn rec(assign: &mut Vec<usize>, i: usize, max_used: usize, out: &mut Vec<SetPartition>) {
            if i == assign.len() {
                out.push(SetPartition { assign: assign.clone() });
                return;
            }
            for b in 0..=max_used {
                assign[i] = b;
                rec(assign, i + 1, max_used.max(b + 1), out);
            }
        }
        if m == 0 {
            out.push(SetPartition { assign });
        } else {
            rec(&mut assign, 0, 0, &mut out);
        }
        Ok(out)
    }
}

impl std::fmt::Display for SetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for block in self.blocks() {
            write!(f, "{{{}}}", block.iter().map(|x| x.to_string()).join(" "))?;
        }
        Ok(())
    }
}

/// `ι(σ)`: the matching of two rows of `b` elements given by `σ ∈ S_b`,
/// with blocks `{i, b + σ(i)}` in `[2b]`.
pub fn iota(sigma: &Perm) -> SetPartition {
    let b = sigma.degree();
    let mut raw = vec![0; 2 * b];
    for i in 0..b {
        raw[i] = i;
        raw[b + sigma.apply(i)] = i;
    }
    SetPartition::from_assignment(&raw)
}

/// `SubPerm(b)`: set partitions of `[2b]` whose blocks hold at most one
/// element of each row — equivalently, partitions refining some `ι(σ)`.
pub fn subperm(b: usize) -> Result<Vec<SetPartition>> {
    if b > 4 {
        return Err(Error::ResourceLimit(format!("subperm({b}) (cap b ≤ 4)")));
    }
    Ok(SetPartition::all(2 * b)?
        .into_iter()
        .filter(|pi| {
            pi.blocks().iter().all(|block| {
                block.iter().filter(|&&x| x < b).count() <= 1
                    && block.iter().filter(|&&x| x >= b).count() <= 1
            })
        })
        .collect())
}

fn all_perms(b: usize) -> Vec<Perm> {
    if b == 0 {
        return vec![Perm::identity(0)];
    }
    (0..b)
        .permutations(b)
        .map(|map| Perm::new(map).expect("permutation of 0..b"))
        .collect()
}

/// `(n)_k` as an exact rational (zero when `k > n`).
fn falling(n: usize, k: usize) -> Rat {
    let mut p = rat(1);
    for j in 0..k {
        p *= rat(n as i64 - j as i64);
    }
    p
}

/// `∏_{j=from}^{to−1} (x − j)` as a polynomial; `falling_range(0, k) = (n)_k`.
fn falling_range(from: usize, to: usize) -> Poly {
    let mut p = Poly::one();
    for j in from..to {
        p = p.mul(&Poly::new(vec![rat(-(j as i64)), rat(1)]));
    }
    p
}

/// `∫ g_{i₁j₁} ⋯ g_{i_k j_k} dg` over uniform `g ∈ S_n`: `1/(n)_{|θ|}` when
/// the maps `ℓ ↦ i_ℓ` and `ℓ ↦ j_ℓ` induce the same partition `θ` of `[k]`,
/// and `0` otherwise.
pub fn integrate_entries(pairs: &[(usize, usize)], n: usize) -> Rat {
    let i_part = SetPartition::from_values(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let j_part = SetPartition::from_values(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    if i_part != j_part || i_part.num_blocks() > n {
        return Rat::zero();
    }
    rat(1) / falling(n, i_part.num_blocks())
}

/// The same integral as a rational function of `n`.
pub fn integrate_entries_symbolic(pairs: &[(usize, usize)]) -> RationalFn {
    let i_part = SetPartition::from_values(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let j_part = SetPartition::from_values(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    if i_part != j_part {
        return RationalFn::zero();
    }
    RationalFn::new(Poly::one(), Poly::pochhammer(i_part.num_blocks()))
        .expect("pochhammer denominator is nonzero")
}

const TENSOR_DIM_CAP: usize = 216;

fn tensor_dim(n: usize, b: usize) -> Result<usize> {
    let dim = n.pow(b as u32);
    if dim > TENSOR_DIM_CAP {
        return Err(Error::ResourceLimit(format!(
            "tensor space dimension {n}^{b} (cap {TENSOR_DIM_CAP})"
        )));
    }
    Ok(dim)
}

fn decode_index(mut code: usize, n: usize, b: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(b);
    for _ in 0..b {
        idx.push(code % n);
        code /= n;
    }
    idx
}

/// The endomorphism `P_π` of `([n])^{⊗b}`: the `(R, I)` entry is `1` exactly
/// when the concatenated tuple `(I, R)` takes equal values precisely on the
/// blocks of `π`.
pub struct PartitionOperator {
    pi: SetPartition,
    n: usize,
    b: usize,
}

impl PartitionOperator {
    pub fn new(pi: SetPartition, n: usize) -> Result<PartitionOperator> {
        if pi.ground_size() % 2 != 0 {
            return Err(Error::Precondition(format!(
                "partition operator needs an even ground set, got {}",
                pi.ground_size()
            )));
        }
        let b = pi.ground_size() / 2;
        tensor_dim(n, b)?;
        Ok(PartitionOperator { pi, n, b })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn entry(&self, i_idx: &[usize], r_idx: &[usize]) -> bool {
        let concat: Vec<usize> = i_idx.iter().chain(r_idx.iter()).copied().collect();
        SetPartition::from_values(&concat) == self.pi
    }

    /// Dense 0/1 matrix; `matrix[R][I]` with indices encoded base `n`.
    pub fn matrix(&self) -> Vec<Vec<Rat>> {
        let dim = self.n.pow(self.b as u32);
        let mut m = vec![vec![Rat::zero(); dim]; dim];
        for r in 0..dim {
            let r_idx = decode_index(r, self.n, self.b);
            for (i, cell) in m[r].iter_mut().enumerate() {
                let i_idx = decode_index(i, self.n, self.b);
                if self.entry(&i_idx, &r_idx) {
                    *cell = rat(1);
                }
            }
        }
        m
    }
}

/// `Σ_{τ ∈ S_b, π ≤ ι(τ)} χ_λ(τ)`, the character weight of `π` in the
/// projection formula.
fn char_sum(pi: &SetPartition, lambda: &Partition) -> Result<i128> {
    let b = lambda.n();
    let mut sum = 0i128;
    for tau in all_perms(b) {
        if pi.refines(&iota(&tau)) {
            sum += mn_character(lambda, &tau.cycle_type())?;
        }
    }
    Ok(sum)
}

/// The orthogonal projection of `([n])^{⊗b}` onto `d_λ` copies of the
/// irreducible `V^{λ⁺(n)}`, with exact rational entries.
pub struct CassidyProjector {
    lambda: Partition,
    n: usize,
    matrix: Vec<Vec<Rat>>,
}

pub fn cassidy_projector(lambda: &Partition, n: usize) -> Result<CassidyProjector> {
    let b = lambda.n();
    if n < 2 * b {
        return Err(Error::Precondition(format!(
            "projector for λ = {lambda} needs n ≥ {}, got {n}",
            2 * b
        )));
    }
    let dim = tensor_dim(n, b)?;
    let d_plus = Rat::from_integer(lambda.plus_n(n)?.dim());
    let sign_b = if b % 2 == 0 { rat(1) } else { rat(-1) };

    // Coefficient of each P_π, keyed by the restricted-growth form of π.
    let mut coeff: HashMap<SetPartition, Rat> = HashMap::new();
    for pi in subperm(b)? {
        let cs = char_sum(&pi, lambda)?;
        if cs == 0 {
            continue;
        }
        let sign_pi = if pi.num_blocks() % 2 == 0 { rat(1) } else { rat(-1) };
        let c = &sign_b * sign_pi * &d_plus * rat(cs as i64) / falling(n, pi.num_blocks());
        coeff.insert(pi, c);
    }

    let mut matrix = vec![vec![Rat::zero(); dim]; dim];
    for r in 0..dim {
        let r_idx = decode_index(r, n, b);
        for i in 0..dim {
            let mut concat = decode_index(i, n, b);
            concat.extend_from_slice(&r_idx);
            if let Some(c) = coeff.get(&SetPartition::from_values(&concat)) {
                matrix[r][i] = c.clone();
            }
        }
    }
    Ok(CassidyProjector { lambda: lambda.clone(), n, matrix })
}

impl CassidyProjector {
    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.matrix
    }

    pub fn trace(&self) -> Rat {
        (0..self.dim()).map(|i| self.matrix[i][i].clone()).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (0..r).all(|i| self.matrix[r][i] == self.matrix[i][r]))
    }

    pub fn is_idempotent(&self) -> bool {
        let dim = self.dim();
        for r in 0..dim {
            for i in 0..dim {
                let entry: Rat =
                    (0..dim).map(|k| &self.matrix[r][k] * &self.matrix[k][i]).sum();
                if entry != self.matrix[r][i] {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the matrix commutes with `ρ_b(σ)`, i.e. is unchanged under
    /// relabeling both tensor indices by `σ`.
    pub fn commutes_with(&self, sigma: &Perm) -> Result<bool> {
        if sigma.degree() != self.n {
            return Err(Error::Precondition(format!(
                "σ acts on {} points, projector lives over [{}]",
                sigma.degree(),
                self.n
            )));
        }
        let b = self.lambda.n();
        let relabel = |code: usize| -> usize {
            decode_index(code, self.n, b)
                .iter()
                .rev()
                .fold(0, |acc, &digit| acc * self.n + sigma.apply(digit))
        };
        let dim = self.dim();
        Ok((0..dim).all(|r| {
            (0..dim).all(|i| self.matrix[relabel(r)][relabel(i)] == self.matrix[r][i])
        }))
    }

    /// CSV dump (one row per line, exact rational entries).
    pub fn to_csv(&self) -> String {
        self.matrix
            .iter()
            .map(|row| row.iter().map(|e| e.to_string()).join(","))
            .join("\n")
    }
}

/// Whether the tuple `(g_1, …, g_{2g})` obeys `Y`: every `f`-labeled edge
/// `s → t` is realized as `g_f(s) = t`.
pub fn obey_indicator(y: &LabeledGraph, perms: &[Perm]) -> Result<bool> {
    if perms.len() != 2 * y.genus() {
        return Err(Error::Precondition(format!(
            "expected {} permutations, got {}",
            2 * y.genus(),
            perms.len()
        )));
    }
    if let Some(p) = perms.iter().find(|p| p.degree() < y.v()) {
        return Err(Error::Precondition(format!(
            "permutation degree {} below vertex count {}",
            p.degree(),
            y.v()
        )));
    }
    Ok(y.edges().iter().all(|e| perms[e.label].apply(e.source) == e.target))
}

/// All permutations of `[n]` extending the partial map given by the edges of
/// one letter; empty when the constraints conflict.
pub(crate) fn letter_completions(n: usize, edges: &[(usize, usize)]) -> Vec<Perm> {
    let mut forced = vec![usize::MAX; n];
    let mut hit = vec![false; n];
    for &(s, t) in edges {
        if forced[s] != usize::MAX || hit[t] {
            return Vec::new();
        }
        forced[s] = t;
        hit[t] = true;
    }
    let free_sources: Vec<usize> = (0..n).filter(|&s| forced[s] == usize::MAX).collect();
    let free_targets: Vec<usize> = (0..n).filter(|&t| !hit[t]).collect();
    free_targets
        .iter()
        .copied()
        .permutations(free_targets.len())
        .map(|assignment| {
            let mut map = forced.clone();
            for (&s, t) in free_sources.iter().zip(assignment) {
                map[s] = t;
            }
            Perm::new(map).expect("completion of a partial injection")
        })
        .collect()
}

const THETA_NUMERIC_N_CAP: usize = 5;

/// Cycle-type histograms of `[g_a,g_b][g_c,g_d]` over obeying tuples, cached
/// per `(Y, n)`.
static THETA_HIST: Lazy<RwLock<HashMap<(String, usize), HashMap<Vec<usize>, u64>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

pub(crate) fn letter_edges(y: &LabeledGraph, label: usize) -> Vec<(usize, usize)> {
    y.edges().iter().filter(|e| e.label == label).map(|e| (e.source, e.target)).collect()
}

fn commutator_histogram(first: &[Perm], second: &[Perm]) -> HashMap<Perm, u64> {
    let mut hist: HashMap<Perm, u64> = HashMap::new();
    for ga in first {
        for gb in second {
            *hist.entry(ga.commutator(gb)).or_insert(0) += 1;
        }
    }
    hist
}

/// `Θ_λ(Y)` for `λ ⊢ n`, by direct enumeration of obeying tuples:
/// `Θ_λ(Y) = (∏_f (n)_{e_f}) ∫ 1{g_f obey Y} χ_λ([g_a,g_b][g_c,g_d])`.
pub fn theta_numeric(lambda: &Partition, y: &LabeledGraph) -> Result<Rat> {
    let n = lambda.n();
    if y.genus() != 2 {
        return Err(Error::Precondition(format!("Θ enumeration is genus-2 only, got {}", y.genus())));
    }
    if n > THETA_NUMERIC_N_CAP {
        return Err(Error::ResourceLimit(format!(
            "numeric Θ at n = {n} (cap {THETA_NUMERIC_N_CAP})"
        )));
    }
    if y.v() > n {
        return Err(Error::Precondition(format!(
            "Y has {} vertices but lives in [{}]",
            y.v(),
            n
        )));
    }

    let key = (y.to_json().to_string(), n);
    let cached = THETA_HIST.read().unwrap().get(&key).cloned();
    let hist = match cached {
        Some(h) => h,
        None => {
            let completions: Vec<Vec<Perm>> =
                (0..4).map(|label| letter_completions(n, &letter_edges(y, label))).collect();
            let left = commutator_histogram(&completions[0], &completions[1]);
            let right = commutator_histogram(&completions[2], &completions[3]);
            let mut hist: HashMap<Vec<usize>, u64> = HashMap::new();
            for (c1, m1) in &left {
                for (c2, m2) in &right {
                    let ty = c1.compose(c2).cycle_type().parts().to_vec();
                    *hist.entry(ty).or_insert(0) += m1 * m2;
                }
            }
            THETA_HIST.write().unwrap().insert(key, hist.clone());
            hist
        }
    };

    let mut num = Int::zero();
    for (ty, count) in &hist {
        let mu = Partition::new(ty.clone())?;
        num += Int::from(*count) * Int::from(mn_character(lambda, &mu)?);
    }
    let mut den = Int::from(1);
    for e in y.label_counts() {
        den *= factorial(n - e);
    }
    Ok(Rat::new(num, den))
}

const THETA_SYMBOLIC_B_CAP: usize = 3;
const THETA_SYMBOLIC_V_CAP: usize = 6;
const THETA_DFS_NODE_CAP: u64 = 200_000_000;

/// One letter's matrix-entry slots: `(domain, range)` pairs over the ground
/// set `Y⁽⁰⁾` followed by the index blocks of a trace expansion.
type LetterPairs = [Vec<(usize, usize)>; 4];

/// A trace expansion to integrate: ground-set layout, entry pairs per
/// letter, and the slots tied to each exactly-`π` pattern.
struct TraceLayout {
    v: usize,
    total: usize,
    pairs: LetterPairs,
    /// `pattern_slots[p][pos]` = ground slot at position `pos` of pattern `p`.
    pattern_slots: Vec<Vec<usize>>,
}

struct ThetaDfs<'a> {
    v: usize,
    total: usize,
    patterns: &'a [&'a SetPartition],
    /// `slot → (pattern, position)` for pattern-constrained slots.
    pat_of: Vec<Option<(usize, usize)>>,
    /// Per pattern, its ground slots in ascending order.
    pat_slots: Vec<Vec<usize>>,
    pairs: &'a LetterPairs,
    /// `slot → (letter, pair index)` of pairs completed when `slot` is set.
    completes_at: Vec<Vec<(usize, usize)>>,
    assign: Vec<usize>,
    complete: [Vec<usize>; 4],
    nodes: u64,
    profiles: HashMap<(usize, [usize; 4]), u64>,
}

impl ThetaDfs<'_> {
    fn consistent(&self, f: usize, pidx: usize, qidx: usize) -> bool {
        let (x, y) = self.pairs[f][pidx];
        let (x2, y2) = self.pairs[f][qidx];
        (self.assign[x] == self.assign[x2]) == (self.assign[y] == self.assign[y2])
    }

    fn go(&mut self, slot: usize, nblocks: usize) -> Result<()> {
        if slot == self.total {
            let u = nblocks - self.v;
            let mut theta_sizes = [0usize; 4];
            for (f, size) in theta_sizes.iter_mut().enumerate() {
                let mut seen: Vec<usize> =
                    self.pairs[f].iter().map(|&(x, _)| self.assign[x]).collect();
                seen.sort_unstable();
                seen.dedup();
                *size = seen.len();
            }
            *self.profiles.entry((u, theta_sizes)).or_insert(0) += 1;
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > THETA_DFS_NODE_CAP {
            return Err(Error::ResourceLimit(format!(
                "symbolic Θ labeling search exceeded {THETA_DFS_NODE_CAP} nodes"
            )));
        }
        let completing = self.completes_at[slot].clone();
        'blocks: for beta in 0..=nblocks {
            self.assign[slot] = beta;
            // Pattern-constrained slots must realize their π exactly.
            if let Some((pid, pos)) = self.pat_of[slot] {
                for &prev in &self.pat_slots[pid] {
                    if prev >= slot {
                        break;
                    }
                    let (_, prev_pos) = self.pat_of[prev].expect("pattern slot");
                    if (self.assign[prev] == beta)
                        != self.patterns[pid].same_block(prev_pos, pos)
                    {
                        continue 'blocks;
                    }
                }
            }
            // Each letter's entries must come from a well-defined injection:
            // equal domains ⟺ equal ranges, pairwise.
            let mut pushed = 0;
            let mut ok = true;
            'pairs: for &(f, pidx) in &completing {
                for &qidx in &self.complete[f] {
                    if !self.consistent(f, pidx, qidx) {
                        ok = false;
                        break 'pairs;
                    }
                }
                self.complete[f].push(pidx);
                pushed += 1;
            }
            if ok {
                self.go(slot + 1, nblocks + usize::from(beta == nblocks))?;
            }
            for &(f, _) in completing.iter().take(pushed) {
                self.complete[f].pop();
            }
        }
        Ok(())
    }
}

/// The sum over ground-set partitions `p` compatible with the given exact
/// patterns of `(#labelings inducing p) × ∫(summand)`, as a polynomial over
/// the common denominator `∏_{f active} (n)_{v+2b}`.
fn patterns_numerator(
    layout: &TraceLayout,
    patterns: &[&SetPartition],
    b: usize,
) -> Result<Poly> {
    let v = layout.v;
    let total = layout.total;
    let mut pat_of = vec![None; total];
    let mut pat_slots = Vec::new();
    for (pid, slots) in layout.pattern_slots.iter().enumerate() {
        for (pos, &slot) in slots.iter().enumerate() {
            pat_of[slot] = Some((pid, pos));
        }
        let mut sorted = slots.clone();
        sorted.sort_unstable();
        pat_slots.push(sorted);
    }

    let mut completes_at = vec![Vec::new(); total];
    let mut complete: [Vec<usize>; 4] = Default::default();
    for (f, letter) in layout.pairs.iter().enumerate() {
        for (pidx, &(x, y)) in letter.iter().enumerate() {
            let last = x.max(y);
            if last < v {
                // Both endpoints are fixed vertex labels: consistency against
                // the other vertex-only pairs must hold outright.
                for &qidx in &complete[f] {
                    let (x2, y2) = letter[qidx];
                    if (x == x2) != (y == y2) {
                        return Ok(Poly::zero());
                    }
                }
                complete[f].push(pidx);
            } else {
                completes_at[last].push((f, pidx));
            }
        }
    }

    let mut assign = vec![0; total];
    for (i, a) in assign.iter_mut().enumerate().take(v) {
        *a = i;
    }
    let mut dfs = ThetaDfs {
        v,
        total,
        patterns,
        pat_of,
        pat_slots,
        pairs: &layout.pairs,
        completes_at,
        assign,
        complete,
        nodes: 0,
        profiles: HashMap::new(),
    };
    dfs.go(v, v)?;

    // Weight of a profile: (#labelings) / ∏_f (n)_{|θ_f|}, i.e.
    // (n−v)_u × ∏_f [(n)_{v+2b} / (n)_{|θ_f|}] over the common denominator.
    let m = v + 2 * b;
    let active: Vec<usize> =
        (0..4).filter(|&f| !layout.pairs[f].is_empty()).collect();
    let mut num = Poly::zero();
    for ((u, sizes), count) in &dfs.profiles {
        let mut term = falling_range(v, v + u).scale(&rat(*count as i64));
        for &f in &active {
            term = term.mul(&falling_range(sizes[f], m));
        }
        num = num.add(&term);
    }
    Ok(num)
}

/// Per-π data entering a trace expansion of `Tr(p_λ ρ_b(·))`.
struct PiTerm {
    pi: SetPartition,
    /// `(−1)^b (−1)^{|π|} Σ_{τ: π≤ι(τ)} χ_λ(τ)`.
    weight: i128,
}

fn pi_terms(lambda: &Partition) -> Result<Vec<PiTerm>> {
    let b = lambda.n();
    let sign_b = if b % 2 == 0 { 1i128 } else { -1 };
    let mut terms = Vec::new();
    for pi in subperm(b)? {
        let cs = char_sum(&pi, lambda)?;
        if cs == 0 {
            continue;
        }
        let sign_pi = if pi.num_blocks() % 2 == 0 { 1i128 } else { -1 };
        terms.push(PiTerm { pi, weight: sign_b * sign_pi * cs });
    }
    Ok(terms)
}

/// Integrates a trace layout against every tuple of `SubPerm(b)` patterns,
/// returning `Σ_{π-tuple} (∏ weights) × S / [(n)_{2b}^k ∏_{f active} (n)_{v+2b}]`
/// as an exact rational function (k = number of patterns).
fn integrate_layout(layout: &TraceLayout, lambda: &Partition) -> Result<RationalFn> {
    let b = lambda.n();
    let k = layout.pattern_slots.len();
    let terms = pi_terms(lambda)?;
    let mut tuples: Vec<Vec<&PiTerm>> = vec![Vec::new()];
    for _ in 0..k {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                terms.iter().map(move |pt| {
                    let mut t2 = t.clone();
                    t2.push(pt);
                    t2
                })
            })
            .collect();
    }
    let parts: Vec<Result<Poly>> = tuples
        .par_iter()
        .map(|tuple| {
            let patterns: Vec<&SetPartition> = tuple.iter().map(|pt| &pt.pi).collect();
            let mut term = patterns_numerator(layout, &patterns, b)?;
            for pt in tuple {
                // Divide by (n)_{|π|} inside the shared (n)_{2b} factor.
                term = term
                    .mul(&falling_range(pt.pi.num_blocks(), 2 * b))
                    .scale(&rat(pt.weight as i64));
            }
            Ok(term)
        })
        .collect();
    let mut num = Poly::zero();
    for t in parts {
        num = num.add(&t?);
    }
    let active = (0..4).filter(|&f| !layout.pairs[f].is_empty()).count();
    let den = Poly::pochhammer(2 * b)
        .pow(k)
        .mul(&Poly::pochhammer(layout.v + 2 * b).pow(active));
    Ok(RationalFn::new(num, den)?)
}

/// `Θ_{λ⁺(n)}(Y)` for `λ ⊢ b` as an exact rational function of `n`.
///
/// Letters of the relator that `Y` does not constrain are integrated out in
/// closed form first (a uniform commutator averages to `Σ_μ Π_μ/d_μ²`, which
/// `p_λ` sees as the scalar `1/d_{λ⁺(n)}²`; a uniform conjugation averages to
/// a central operator). This routes `Y` to the shortest trace expansion:
/// a single commutator chain when only `{a₁,b₁}` (or `{a₂,b₂}`) appear, and a
/// product of two plain character traces when a single letter appears. The
/// remaining expansion is integrated entry by entry via the set-partition
/// grouping of index labelings.
pub fn theta_symbolic(lambda: &Partition, y: &LabeledGraph) -> Result<RationalFn> {
    let b = lambda.n();
    let v = y.v();
    if y.genus() != 2 {
        return Err(Error::Precondition(format!(
            "symbolic Θ is genus-2 only, got {}",
            y.genus()
        )));
    }
    if b > THETA_SYMBOLIC_B_CAP {
        return Err(Error::ResourceLimit(format!(
            "symbolic Θ for |λ| = {b} (cap {THETA_SYMBOLIC_B_CAP})"
        )));
    }
    if v > THETA_SYMBOLIC_V_CAP {
        return Err(Error::ResourceLimit(format!(
            "symbolic Θ for v = {v} (cap {THETA_SYMBOLIC_V_CAP})"
        )));
    }
    if !y.is_folded() {
        // Conflicting edge constraints: no tuple obeys Y.
        return Ok(RationalFn::zero());
    }

    let counts = y.label_counts();
    let used: Vec<usize> = (0..4).filter(|&f| counts[f] > 0).collect();
    let hook = hook_dim_poly(lambda)?;
    let d_lambda = Rat::from_integer(lambda.dim());
    let node = |k: usize, i: usize| v + k * b + i;

    let (core, hook_power) = if used.len() <= 1 {
        // Single constrained letter x: Θ = (n)_{e_x}/(d_λ² d_{λ⁺(n)}³)
        // × ∫ 1{obey} Tr(p_λρ_b(g_x)) Tr(p_λρ_b(g_x⁻¹)); each trace carries a
        // d_{λ⁺(n)} prefactor, leaving one net hook in the denominator.
        let x = used.first().copied().unwrap_or(0);
        let mut pairs: LetterPairs = Default::default();
        pairs[x].extend(letter_edges(y, x));
        for i in 0..b {
            pairs[x].push((node(0, i), node(1, i))); // (g)_{IJ}
            pairs[x].push((node(3, i), node(2, i))); // (g⁻¹)_{I'J'} = (g)_{J'I'}
        }
        let layout = TraceLayout {
            v,
            total: v + 4 * b,
            pairs,
            pattern_slots: vec![
                (0..b).map(|i| node(0, i)).chain((0..b).map(|i| node(1, i))).collect(),
                (0..b).map(|i| node(2, i)).chain((0..b).map(|i| node(3, i))).collect(),
            ],
        };
        (integrate_layout(&layout, lambda)?, 1usize)
    } else if used.iter().all(|&f| f < 2) || used.iter().all(|&f| f >= 2) {
        // One commutator constrained: the other integrates to 1/d_{λ⁺(n)}²,
        // leaving Θ = (∏(n)_{e_f})/(d_λ d_{λ⁺(n)}²) × ∫ Tr(p_λρ_b([g_x,g_y])).
        let (x, yy) = if used[0] < 2 { (0, 1) } else { (2, 3) };
        let mut pairs: LetterPairs = Default::default();
        pairs[x].extend(letter_edges(y, x));
        pairs[yy].extend(letter_edges(y, yy));
        for i in 0..b {
            let [ii, j, k, l, m] = [0, 1, 2, 3, 4].map(|blk| node(blk, i));
            pairs[x].extend([(ii, j), (l, k)]);
            pairs[yy].extend([(j, k), (m, l)]);
        }
        let layout = TraceLayout {
            v,
            total: v + 5 * b,
            pairs,
            pattern_slots: vec![(0..b)
                .map(|i| node(0, i))
                .chain((0..b).map(|i| node(4, i)))
                .collect()],
        };
        (integrate_layout(&layout, lambda)?, 1usize)
    } else {
        // Letters from both commutators: full trace expansion of
        // Tr(p_λ ρ_b([g_a,g_b][g_c,g_d])) over nine index blocks.
        let mut pairs: LetterPairs = Default::default();
        for (f, letter) in pairs.iter_mut().enumerate() {
            letter.extend(letter_edges(y, f));
        }
        // Oriented so that, with graph edges pinning letters, the chain's
        // word is conjugate-inverse to [g_a,g_b][g_c,g_d]; the trace of
        // p_λρ_b(·) is invariant under both operations.
        for i in 0..b {
            let [ii, j, k, l, m, nn, o, q, r] =
                [0, 1, 2, 3, 4, 5, 6, 7, 8].map(|blk| node(blk, i));
            pairs[0].extend([(j, ii), (k, l)]);
            pairs[1].extend([(k, j), (l, m)]);
            pairs[2].extend([(nn, m), (o, q)]);
            pairs[3].extend([(o, nn), (q, r)]);
        }
        let layout = TraceLayout {
            v,
            total: v + 9 * b,
            pairs,
            pattern_slots: vec![(0..b)
                .map(|i| node(0, i))
                .chain((0..b).map(|i| node(8, i)))
                .collect()],
        };
        // Tr(p_λ ρ_b(·)) carries one hook prefactor and nothing cancels it.
        let core = integrate_layout(&layout, lambda)?;
        let with_hook = core.mul(&RationalFn::from_poly(hook.clone()));
        let mut theta = with_hook;
        for &e in &counts {
            theta = theta.mul(&RationalFn::from_poly(Poly::pochhammer(e)));
        }
        theta = theta.mul(&RationalFn::constant(rat(1) / d_lambda));
        return Ok(theta.reduced());
    };

    // Shared assembly for the reduced routes: the trace prefactors cancel all
    // but `hook_power` hooks into the denominator, and each trace carries a
    // 1/d_λ normalization.
    let d_norm = if used.len() <= 1 { &d_lambda * &d_lambda } else { d_lambda.clone() };
    let mut theta = core;
    for &e in &counts {
        theta = theta.mul(&RationalFn::from_poly(Poly::pochhammer(e)));
    }
    theta = theta
        .div(&RationalFn::from_poly(hook.pow(hook_power)))?
        .mul(&RationalFn::constant(rat(1) / d_norm));
    Ok(theta.reduced())
}
