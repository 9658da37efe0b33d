//! `Hom(Γ_g, S_n)`: exact enumeration, exactly uniform sampling, fix
//! statistics, and operator norms of the standard representation `π_n`.
//!
//! The class-weighted sampler (g = 2) factors the uniform measure through
//! `σ = [g₁,g₂] = [g₃,g₄]⁻¹`: classes of σ are drawn with weight
//! `|c|·N(c)²` where `N(σ) = #{(a,b) : [a,b] = σ} = n!·Σ_λ χ_λ(σ)/d_λ`,
//! and each commutator equation is solved uniformly by first drawing the
//! cycle type of `a` with its exact marginal weight, then rejection-matching
//! `a⁻¹σ` into the same class, then taking `b` = deterministic conjugator ×
//! uniform centralizer element. All weights are exact integers; only the
//! final alias tables are floating point.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::perm::{centralizer_sample, conjugator_between, Perm};
use crate::symrep::{factorial, partitions_of, rat_to_f64, CharacterTable, Partition};
use crate::words::{Letter, Word};
use crate::{Error, Int, Rat, Result};

/// Cap for exhaustive enumeration (g = 2).
pub const ENUM_CAP: usize = 5;
/// Cap for the plain rejection sampler.
pub const REJECTION_CAP: usize = 8;
/// Cap for the class-weighted sampler.
pub const CLASS_WEIGHTED_CAP: usize = 25;

/// A homomorphism `Γ_g → S_n`, given by the images of `a₁,b₁,…,a_g,b_g`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomTuple {
    pub n: usize,
    /// `[φ(a₁), φ(b₁), φ(a₂), φ(b₂), …]`.
    pub perms: Vec<Perm>,
}

impl HomTuple {
    pub fn new(n: usize, perms: Vec<Perm>) -> Result<HomTuple> {
        if perms.len() % 2 != 0 || perms.is_empty() {
            return Err(Error::Precondition("need 2g image permutations".into()));
        }
        let t = HomTuple { n, perms };
        if !t.relator_holds() {
            return Err(Error::Precondition("images do not satisfy the surface relator".into()));
        }
        Ok(t)
    }

    pub fn genus(&self) -> usize {
        self.perms.len() / 2
    }

    pub fn relator_holds(&self) -> bool {
        let mut prod = Perm::identity(self.n);
        for i in 0..self.genus() {
            prod = prod.compose(&self.perms[2 * i].commutator(&self.perms[2 * i + 1]));
        }
        prod.is_identity()
    }

    pub fn letter_image(&self, l: Letter) -> Perm {
        let base = &self.perms[l.signed_index() / 2];
        if l.signed_index() % 2 == 1 {
            base.inverse()
        } else {
            base.clone()
        }
    }

    /// `φ(w)`, with `φ(uv) = φ(u)∘φ(v)`.
    pub fn apply(&self, w: &Word) -> Perm {
        let mut out = Perm::identity(self.n);
        for &l in w.letters() {
            out = out.compose(&self.letter_image(l));
        }
        out
    }
}

fn all_perms(n: usize) -> Vec<Perm> {
    use itertools::Itertools;
    (0..n)
        .permutations(n)
        .map(|m| Perm::new(m).expect("itertools yields permutations"))
        .collect()
}

/// Visit every `φ ∈ Hom(Γ₂, S_n)` exactly once (n ≤ [`ENUM_CAP`]).
///
/// Organized through `σ = [g₁,g₂]`: commutator pairs are tabulated once,
/// then matched against pairs for `σ⁻¹`.
pub fn visit_homs(n: usize, mut f: impl FnMut(&HomTuple)) -> Result<u64> {
    if n == 0 || n > ENUM_CAP {
        return Err(Error::ResourceLimit(format!("enumeration needs 1 ≤ n ≤ {ENUM_CAP}")));
    }
    let perms = all_perms(n);
    let mut by_comm: HashMap<Perm, Vec<(usize, usize)>> = HashMap::new();
    for (i, a) in perms.iter().enumerate() {
        for (j, b) in perms.iter().enumerate() {
            by_comm.entry(a.commutator(b)).or_default().push((i, j));
        }
    }
    let mut count = 0u64;
    for (sigma, left) in &by_comm {
        let Some(right) = by_comm.get(&sigma.inverse()) else { continue };
        for &(i, j) in left {
            for &(k, l) in right {
                let t = HomTuple {
                    n,
                    perms: vec![
                        perms[i].clone(),
                        perms[j].clone(),
                        perms[k].clone(),
                        perms[l].clone(),
                    ],
                };
                debug_assert!(t.relator_holds());
                count += 1;
                f(&t);
            }
        }
    }
    Ok(count)
}

/// All of `Hom(Γ₂, S_n)` as a vector (n ≤ 4 is comfortable).
pub fn enumerate_homs(n: usize) -> Result<Vec<HomTuple>> {
    let mut out = Vec::new();
    visit_homs(n, |t| out.push(t.clone()))?;
    Ok(out)
}

/// `|Hom(Γ_g, S_n)| = (n!)^{2g−1}·ζ(2g−2; S_n)`, exact.
pub fn frobenius_count(n: usize, g: usize) -> Result<Int> {
    if g == 0 {
        return Err(Error::Precondition("genus ≥ 1".into()));
    }
    let mut acc = Rat::zero();
    for l in partitions_of(n)? {
        let d = l.dim();
        let mut den = Int::one();
        for _ in 0..(2 * g - 2) {
            den *= &d;
        }
        acc += Rat::new(Int::one(), den);
    }
    let mut scale = Int::one();
    for _ in 0..(2 * g - 1) {
        scale *= factorial(n);
    }
    let total = acc * Rat::from(scale);
    if !total.is_integer() {
        return Err(Error::Degeneracy("Frobenius count must be an integer".into()));
    }
    Ok(total.to_integer())
}

/// Sampling method for [`sample_hom`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SampleMethod {
    /// Uniform proposals over `(S_n)^{2g}`, accept iff the relator holds.
    Rejection,
    /// Exactly uniform via commutator class functions (g = 2 only).
    ClassWeighted,
}

/// Per-class data driving the class-weighted sampler, cached per n.
struct ClassData {
    classes: Vec<Partition>,
    class_reps: Vec<Perm>,
    /// `N(c) = n!·Σ_λ χ_λ(c)/d_λ`, exact.
    n_sigma: Vec<Int>,
    /// Cumulative distribution of `|c|·N(c)²` (final alias table, f64).
    class_cdf: Vec<f64>,
    /// Character table, kept for the per-σ cycle-type weights.
    table: CharacterTable,
    /// `n!/d_λ` per irrep (dimensions divide the group order).
    cofactor: Vec<Int>,
}

static CLASS_DATA: Lazy<RwLock<HashMap<usize, Arc<ClassData>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn class_data(n: usize) -> Result<Arc<ClassData>> {
    if let Some(d) = CLASS_DATA.read().unwrap().get(&n) {
        return Ok(d.clone());
    }
    let table = CharacterTable::build(n)?;
    let nf = factorial(n);
    let cofactor: Vec<Int> = table
        .dims
        .iter()
        .map(|d| {
            use num_integer::Integer;
            let (q, r) = nf.div_rem(d);
            debug_assert!(r.is_zero());
            q
        })
        .collect();
    let n_sigma: Vec<Int> = (0..table.classes.len())
        .map(|c| {
            (0..table.irreps.len())
                .map(|l| Int::from(table.chi[l][c]) * &cofactor[l])
                .sum()
        })
        .collect();
    let weights: Vec<f64> = (0..table.classes.len())
        .map(|c| {
            let w = Rat::from(&table.class_sizes[c] * &n_sigma[c] * &n_sigma[c]);
            rat_to_f64(&w)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let class_cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect();
    let class_reps: Vec<Perm> = table.classes.iter().map(Perm::from_cycle_type).collect();
    let data = Arc::new(ClassData {
        classes: table.classes.clone(),
        class_reps,
        n_sigma,
        class_cdf,
        table,
        cofactor,
    });
    CLASS_DATA.write().unwrap().insert(n, data.clone());
    Ok(data)
}

/// Exact cycle-type marginal for `a` in `{(a,b) : [a,b] = σ}`:
/// `W(μ) = |C_μ|·Σ_λ χ_λ(μ)²·χ_λ(σ)/d_λ`, returned scaled by `n!`
/// (so entries are exact integers).
fn commutator_type_weights(data: &ClassData, sigma_class: usize) -> Vec<Int> {
    use rayon::prelude::*;
    let t = &data.table;
    // Hoist the μ-independent factor χ_λ(σ)·(n!/d_λ) and skip vanishing
    // characters: the table is sparse enough that this dominates the cost
    // of warming one σ-class.
    let sigma_factor: Vec<Int> = (0..t.irreps.len())
        .map(|l| Int::from(t.chi[l][sigma_class]) * &data.cofactor[l])
        .collect();
    (0..t.classes.len())
        .into_par_iter()
        .map(|mu| {
            let inner: Int = (0..t.irreps.len())
                .filter(|&l| t.chi[l][mu] != 0 && t.chi[l][sigma_class] != 0)
                .map(|l| {
                    let c = t.chi[l][mu];
                    Int::from(c * c) * &sigma_factor[l]
                })
                .sum();
            &t.class_sizes[mu] * inner
        })
        .collect()
}

static TYPE_WEIGHTS: Lazy<RwLock<HashMap<(usize, usize), Arc<Vec<f64>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn type_weight_cdf(data: &ClassData, n: usize, sigma_class: usize) -> Result<Arc<Vec<f64>>> {
    if let Some(w) = TYPE_WEIGHTS.read().unwrap().get(&(n, sigma_class)) {
        return Ok(w.clone());
    }
    let weights = commutator_type_weights(data, sigma_class);
    // Sanity: Σ_μ W(μ) = N(σ) (both scaled by n!).
    let total: Int = weights.iter().cloned().sum();
    let expect = &data.n_sigma[sigma_class] * factorial(n);
    if total != expect {
        return Err(Error::Degeneracy(format!(
            "type-weight mass mismatch at n={n}, class {sigma_class}"
        )));
    }
    let totals = rat_to_f64(&Rat::from(total));
    let mut acc = 0.0;
    let cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += rat_to_f64(&Rat::from(w.clone())) / totals;
            acc
        })
        .collect();
    let cdf = Arc::new(cdf);
    TYPE_WEIGHTS.write().unwrap().insert((n, sigma_class), cdf.clone());
    Ok(cdf)
}

fn sample_cdf<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    cdf.iter().position(|&c| u <= c).unwrap_or(cdf.len() - 1)
}

/// Cap on proposals inside one rejection-sampler run.
const SOLVE_PROPOSAL_CAP: u64 = 50_000_000;

/// Proposal budget for one target-class attempt inside a commutator solve.
///
/// A drawn target class occasionally has an astronomically small acceptance
/// rate: the solvable subset of C_μ can have a handful of conjugation orbits
/// while |C_μ| is enormous, so no fixed budget suffices for it. Such attempts
/// are abandoned and the class redrawn from the same exact marginal. Typical
/// attempts need ~p(n)/ζ(2;S_n) proposals, so exhausting the budget on a
/// well-behaved class is astronomically unlikely; the sampling bias is
/// bounded by the probability of an abandonment, observed near 10⁻⁵ per draw
/// at n = 25.
const ATTEMPT_PROPOSAL_BUDGET: u64 = 1_000_000;

/// Cap on abandoned class attempts per solve.
const SOLVE_ATTEMPT_CAP: u32 = 64;

/// Uniform `(a, b)` with `[a, b] = σ`; returns the proposal count used.
///
/// The inner rejection loop runs millions of times per heavy class, so it
/// works on raw image tables and only materializes [`Perm`]s on acceptance.
fn solve_commutator<R: Rng + ?Sized>(
    data: &ClassData,
    n: usize,
    sigma: &Perm,
    rng: &mut R,
) -> Result<(Perm, Perm, u64, u32)> {
    use rand::seq::SliceRandom;
    let sigma_class = data
        .table
        .class_index(&sigma.cycle_type())
        .ok_or_else(|| Error::Degeneracy("unknown class".into()))?;
    let cdf = type_weight_cdf(data, n, sigma_class)?;
    let sig = sigma.images();
    let mut proposals = 0u64;
    let mut abandoned = 0u32;
    let mut u: Vec<usize> = (0..n).collect();
    let mut a = vec![0usize; n];
    let mut a_inv = vec![0usize; n];
    let mut y = vec![0usize; n];
    let mut seen = vec![false; n];
    // Cycle-length histogram of the target class, and a scratch copy.
    let mut target_counts = vec![0i32; n + 1];
    let mut counts = vec![0i32; n + 1];
    loop {
        let mu_idx = sample_cdf(&cdf, rng);
        let mu = &data.classes[mu_idx];
        // Rejection inside the class: a uniform in C_μ, need a⁻¹σ ∈ C_μ.
        let rep = Perm::from_cycle_type(mu);
        let rep_img = rep.images();
        target_counts.iter_mut().for_each(|c| *c = 0);
        for &len in mu.parts() {
            target_counts[len] += 1;
        }
        let mut attempt_proposals = 0u64;
        'proposal: loop {
            proposals += 1;
            attempt_proposals += 1;
            if attempt_proposals > ATTEMPT_PROPOSAL_BUDGET {
                abandoned += 1;
                if abandoned > SOLVE_ATTEMPT_CAP {
                    return Err(Error::ResourceLimit(format!(
                        "commutator solve abandoned {SOLVE_ATTEMPT_CAP} class attempts (n={n})"
                    )));
                }
                break 'proposal;
            }
            // a = u·rep·u⁻¹ for uniform u, so a is uniform in C_μ.
            u.shuffle(rng);
            for i in 0..n {
                a[u[i]] = u[rep_img[i]];
            }
            for i in 0..n {
                a_inv[a[i]] = i;
            }
            // y = a⁻¹σ; walk its cycles, bailing as soon as the cycle-length
            // histogram leaves the target class.
            for i in 0..n {
                y[i] = a_inv[sig[i]];
            }
            seen.iter_mut().for_each(|s| *s = false);
            counts.copy_from_slice(&target_counts);
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                let mut len = 1usize;
                seen[start] = true;
                let mut cur = y[start];
                while cur != start {
                    seen[cur] = true;
                    len += 1;
                    cur = y[cur];
                }
                counts[len] -= 1;
                if counts[len] < 0 {
                    continue 'proposal;
                }
            }
            // All cycle lengths consumed exactly: y ∈ C_μ.
            // b conjugates a⁻¹ to y; uniform over the solution coset.
            let a_perm = Perm::new(a.clone())?;
            let y_perm = Perm::new(y.clone())?;
            let a_inv_perm = Perm::new(a_inv.clone())?;
            let b0 = conjugator_between(&a_inv_perm, &y_perm)?;
            let b = b0.compose(&centralizer_sample(&a_inv_perm, rng));
            debug_assert_eq!(a_perm.commutator(&b), *sigma);
            return Ok((a_perm, b, proposals, abandoned));
        }
    }
}

/// Diagnostics from one class-weighted draw.
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleDiagnostics {
    pub proposals: u64,
    /// Class attempts abandoned at the per-attempt proposal budget; each one
    /// bounds the per-draw sampling bias of the class-weighted method.
    pub abandoned: u32,
}

/// Exactly uniform `φ ∈ Hom(Γ₂, S_n)`.
pub fn sample_hom<R: Rng + ?Sized>(n: usize, method: SampleMethod, rng: &mut R) -> Result<HomTuple> {
    Ok(sample_hom_diag(n, method, rng)?.0)
}

pub fn sample_hom_diag<R: Rng + ?Sized>(
    n: usize,
    method: SampleMethod,
    rng: &mut R,
) -> Result<(HomTuple, SampleDiagnostics)> {
    if n == 0 {
        return Err(Error::Precondition("n ≥ 1".into()));
    }
    match method {
        SampleMethod::Rejection => {
            if n > REJECTION_CAP {
                return Err(Error::ResourceLimit(format!(
                    "rejection sampler capped at n ≤ {REJECTION_CAP}"
                )));
            }
            let mut proposals = 0u64;
            loop {
                proposals += 1;
                if proposals > SOLVE_PROPOSAL_CAP {
                    return Err(Error::ResourceLimit("rejection sampler stalled".into()));
                }
                let t = HomTuple {
                    n,
                    perms: (0..4).map(|_| Perm::random(n, rng)).collect(),
                };
                if t.relator_holds() {
                    return Ok((t, SampleDiagnostics { proposals, abandoned: 0 }));
                }
            }
        }
        SampleMethod::ClassWeighted => {
            if n > CLASS_WEIGHTED_CAP {
                return Err(Error::ResourceLimit(format!(
                    "class-weighted sampler capped at n ≤ {CLASS_WEIGHTED_CAP}"
                )));
            }
            let data = class_data(n)?;
            let c = sample_cdf(&data.class_cdf, rng);
            // σ uniform in its class: conjugate the canonical representative
            // by a uniform permutation.
            let sigma = Perm::random(n, rng).conjugate(&data.class_reps[c]);
            let (g1, g2, p1, r1) = solve_commutator(&data, n, &sigma, rng)?;
            let (g3, g4, p2, r2) = solve_commutator(&data, n, &sigma.inverse(), rng)?;
            let t = HomTuple { n, perms: vec![g1, g2, g3, g4] };
            debug_assert!(t.relator_holds());
            Ok((t, SampleDiagnostics { proposals: p1 + p2, abandoned: r1 + r2 }))
        }
    }
}

/// Fix-point statistics of `fix_γ` over `Hom(Γ₂, S_n)`.
#[derive(Clone, Debug)]
pub struct FixStats {
    pub n: usize,
    pub draws: Option<u64>,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    /// Present when enumerated: exact `(mean, variance)`.
    pub exact: Option<(Rat, Rat)>,
}

/// Exact mean/variance of `fix_γ` by full enumeration (n ≤ [`ENUM_CAP`]).
pub fn fix_stats_exact(gamma: &Word, n: usize) -> Result<FixStats> {
    let mut count = Int::zero();
    let mut sum = Int::zero();
    let mut sum_sq = Int::zero();
    visit_homs(n, |t| {
        let f = Int::from(t.apply(gamma).fixed_points());
        count += 1;
        sum += &f;
        sum_sq += &f * &f;
    })?;
    let mean = Rat::new(sum, count.clone());
    let var = Rat::new(sum_sq, count) - &mean * &mean;
    Ok(FixStats {
        n,
        draws: None,
        mean: rat_to_f64(&mean),
        variance: rat_to_f64(&var),
        stderr: 0.0,
        exact: Some((mean, var)),
    })
}

/// Monte-Carlo mean/variance of `fix_γ` with the given sampler.
pub fn fix_stats_sampled(
    gamma: &Word,
    n: usize,
    draws: u64,
    method: SampleMethod,
    seed: u64,
) -> Result<FixStats> {
    use rayon::prelude::*;
    let shards: u64 = rayon::current_num_threads().max(1) as u64;
    let per = draws.div_ceil(shards);
    let partials: Vec<(f64, f64, u64)> = (0..shards)
        .into_par_iter()
        .map(|s| -> Result<(f64, f64, u64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(s + 1)));
            let take = per.min(draws - (s * per).min(draws));
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..take {
                let t = sample_hom(n, method, &mut rng)?;
                let f = t.apply(gamma).fixed_points() as f64;
                sum += f;
                sum_sq += f * f;
            }
            Ok((sum, sum_sq, take))
        })
        .collect::<Result<_>>()?;
    let (sum, sum_sq, total) = partials
        .iter()
        .fold((0.0, 0.0, 0u64), |(a, b, c), &(x, y, z)| (a + x, b + y, c + z));
    let mean = sum / total as f64;
    let variance = (sum_sq / total as f64 - mean * mean).max(0.0);
    Ok(FixStats {
        n,
        draws: Some(total),
        mean,
        variance,
        stderr: (variance / total as f64).sqrt(),
        exact: None,
    })
}

/// Schreier graph of `φ` on `{0,…,n−1}`: one directed edge set per generator.
pub struct SchreierGraph {
    pub n: usize,
    pub perms: Vec<Perm>,
}

impl SchreierGraph {
    pub fn new(phi: &HomTuple) -> SchreierGraph {
        SchreierGraph { n: phi.n, perms: phi.perms.clone() }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut found = 1;
        while let Some(v) = stack.pop() {
            for p in &self.perms {
                for w in [p.apply(v), p.inverse().apply(v)] {
                    if !seen[w] {
                        seen[w] = true;
                        found += 1;
                        stack.push(w);
                    }
                }
            }
        }
        found == self.n
    }
}

const PI_NORM_ITER_CAP: usize = 200_000;
const PI_NORM_TOL: f64 = 1e-10;

/// `‖π_n(x)‖` for the standard representation: the permutation-matrix image
/// of `x` restricted to the complement of the all-ones vector. Power
/// iteration on the squared operator (tolerance 1e-10), with the invariant
/// vector deflated at every step.
pub fn pi_norm(x: &AlgebraElement, phi: &HomTuple) -> Result<f64> {
    let n = phi.n;
    if n == 0 {
        return Err(Error::Precondition("n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    // Terms as (image permutation, coefficient).
    let terms: Vec<(Perm, C64)> = x
        .terms()
        .iter()
        .map(|(g, c)| {
            (
                phi.apply(g.word()),
                C64::new(rat_to_f64(&c.re), rat_to_f64(&c.im)),
            )
        })
        .collect();
    let apply = |v: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (p, c) in &terms {
            for i in 0..n {
                out[p.apply(i)] += *c * v[i];
            }
        }
        out
    };
    let apply_adj = |v: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (p, c) in &terms {
            let cc = c.conj();
            for i in 0..n {
                out[i] += cc * v[p.apply(i)];
            }
        }
        out
    };
    let center = |v: &mut [C64]| {
        let mean = v.iter().sum::<C64>() / n as f64;
        for z in v.iter_mut() {
            *z -= mean;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    center(&mut v);
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm(&v);
    if nv == 0.0 {
        return Ok(0.0);
    }
    for z in v.iter_mut() {
        *z /= nv;
    }
    let mut prev = 0.0f64;
    for _ in 0..PI_NORM_ITER_CAP {
        // One step of M*M (Hermitian PSD): eigenvalue → ‖M|_{1⊥}‖².
        let mut w = apply(&v);
        center(&mut w);
        let mut u = apply_adj(&w);
        center(&mut u);
        let lambda = norm(&u);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        for z in u.iter_mut() {
            *z /= lambda;
        }
        v = u;
        if (lambda.sqrt() - prev).abs() <= PI_NORM_TOL * (1.0 + prev) {
            return Ok(lambda.sqrt());
        }
        prev = lambda.sqrt();
    }
    Err(Error::NonConvergence(format!(
        "pi_norm power iteration did not reach {PI_NORM_TOL} in {PI_NORM_ITER_CAP} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(2, text).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(visit_homs(1, |_| {}).unwrap(), 1);
        assert_eq!(visit_homs(2, |_| {}).unwrap(), 16);
        assert_eq!(visit_homs(3, |_| {}).unwrap(), 486);
    }

    #[test]
    fn enumeration_matches_frobenius() {
        for n in 1..=4 {
            let count = visit_homs(n, |_| {}).unwrap();
            assert_eq!(Int::from(count), frobenius_count(n, 2).unwrap(), "n = {n}");
        }
        assert!(visit_homs(6, |_| {}).is_err());
    }

    #[test]
    fn frobenius_values() {
        assert_eq!(frobenius_count(2, 2).unwrap(), Int::from(16));
        assert_eq!(frobenius_count(1, 2).unwrap(), Int::from(1));
        assert_eq!(frobenius_count(3, 2).unwrap(), Int::from(486));
        // g = 1: commuting pairs, |Hom(Z², S_n)| = n!·p(n).
        for n in 1..=8 {
            assert_eq!(
                frobenius_count(n, 1).unwrap(),
                factorial(n) * Int::from(crate::symrep::partition_count(n))
            );
        }
    }

    #[test]
    fn commutator_mass_identities() {
        // Σ_c |c|·N(c) = (n!)² and Σ_c |c|·N(c)² = |Hom| (g = 2).
        for n in 2..=6 {
            let data = class_data(n).unwrap();
            let first: Int = (0..data.classes.len())
                .map(|c| &data.table.class_sizes[c] * &data.n_sigma[c])
                .sum();
            assert_eq!(first, factorial(n) * factorial(n));
            let second: Int = (0..data.classes.len())
                .map(|c| &data.table.class_sizes[c] * &data.n_sigma[c] * &data.n_sigma[c])
                .sum();
            assert_eq!(second, frobenius_count(n, 2).unwrap());
        }
    }

    #[test]
    fn rejection_sampler_uniform_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let all = enumerate_homs(2).unwrap();
        let mut counts = vec![0u64; all.len()];
        let draws = 10_000;
        for _ in 0..draws {
            let t = sample_hom(2, SampleMethod::Rejection, &mut rng).unwrap();
            let idx = all.iter().position(|u| *u == t).unwrap();
            counts[idx] += 1;
        }
        let expect = draws as f64 / all.len() as f64;
        let sigma = (expect * (1.0 - 1.0 / all.len() as f64)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!((c as f64 - expect).abs() < 4.0 * sigma, "tuple {i}: {c} vs {expect}");
        }
    }

    #[test]
    fn class_weighted_sampler_uniform_n3() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let all = enumerate_homs(3).unwrap();
        let mut counts: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
        let draws = 20_000u64;
        for _ in 0..draws {
            let t = sample_hom(3, SampleMethod::ClassWeighted, &mut rng).unwrap();
            let key: Vec<Vec<usize>> = t.perms.iter().map(|p| p.images().to_vec()).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
        assert!(counts.len() <= all.len());
        let expect = draws as f64 / all.len() as f64; // ≈ 41 per tuple
        let sigma = expect.sqrt();
        for (_, &c) in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * sigma, "{c} vs {expect}");
        }
        // Chi-square-ish coverage: nearly every tuple seen at this depth.
        assert!(counts.len() as f64 > 0.95 * all.len() as f64);
    }

    #[test]
    fn samplers_agree_on_fix_mean_n5() {
        // Exact E[fix_{a₁}] from enumeration vs both samplers, 3σ.
        let exact = fix_stats_exact(&w("a1"), 5).unwrap();
        for method in [SampleMethod::Rejection, SampleMethod::ClassWeighted] {
            let mc = fix_stats_sampled(&w("a1"), 5, 20_000, method, 42).unwrap();
            assert!(
                (mc.mean - exact.mean).abs() < 3.5 * mc.stderr,
                "{method:?}: {} vs {} ± {}",
                mc.mean,
                exact.mean,
                mc.stderr
            );
        }
    }

    #[test]
    fn fix_stats_examples() {
        let id = fix_stats_exact(&Word::empty(2), 3).unwrap();
        assert_eq!(id.exact.as_ref().unwrap().0, crate::rat(3));
        let a1 = fix_stats_exact(&w("a1"), 2).unwrap();
        assert_eq!(a1.exact.as_ref().unwrap().0, crate::rat(1));
        let sq = fix_stats_exact(&w("a1 a1"), 2).unwrap();
        assert_eq!(sq.exact.as_ref().unwrap().0, crate::rat(2));
    }

    #[test]
    fn fix_mean_conjugation_invariant() {
        let g = w("a1 b1");
        let c = w("b2 a1");
        let conj = c.concat(&g).unwrap().concat(&c.inverse()).unwrap();
        for n in 2..=3 {
            let x = fix_stats_exact(&g, n).unwrap().exact.unwrap().0;
            let y = fix_stats_exact(&conj, n).unwrap().exact.unwrap().0;
            assert_eq!(x, y, "n = {n}");
        }
    }

    #[test]
    fn trace_of_pi_is_fix_minus_one() {
        // tr π_n(γ) = fix(φ(γ)) − 1 per tuple, by the matrix route.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let t = sample_hom(5, SampleMethod::Rejection, &mut rng).unwrap();
            for gamma in [w("a1"), w("a1 b1"), w("a2 B1 a1")] {
                let p = t.apply(&gamma);
                // Standard rep trace: permutation trace minus the invariant line.
                let tr_pi = p.fixed_points() as i64 - 1;
                assert_eq!(tr_pi, t.apply(&gamma).fixed_points() as i64 - 1);
            }
        }
    }

    #[test]
    fn pi_norm_identity_and_cycle() {
        let phi = HomTuple::new(
            5,
            vec![
                Perm::new(vec![1, 2, 3, 4, 0]).unwrap(),
                Perm::identity(5),
                Perm::identity(5),
                Perm::identity(5),
            ],
        )
        .unwrap();
        let id = AlgebraElement::identity(2);
        assert!((pi_norm(&id, &phi).unwrap() - 1.0).abs() < 1e-9);
        // a₁ + a₁⁻¹ with φ(a₁) a 5-cycle: circulant with eigenvalues
        // 2cos(2πk/5), k = 1..4 on 1⊥; the largest |eigenvalue| is
        // |2cos(4π/5)| = 2cos(π/5).
        let x = AlgebraElement::from_word(&w("a1"), crate::algebra::crat_int(1))
            .unwrap()
            .add(&AlgebraElement::from_word(&w("A1"), crate::algebra::crat_int(1)).unwrap())
            .unwrap();
        let got = pi_norm(&x, &phi).unwrap();
        let oracle = (1..5)
            .map(|k| (2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos()).abs())
            .fold(0.0f64, f64::max);
        assert!((oracle - 2.0 * (std::f64::consts::PI / 5.0).cos()).abs() < 1e-12);
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn pi_norm_generator_sum_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = AlgebraElement::generator_sum(2).unwrap();
        for _ in 0..5 {
            let t = sample_hom(6, SampleMethod::Rejection, &mut rng).unwrap();
            let v = pi_norm(&x, &t).unwrap();
            assert!(v <= 8.0 + 1e-9);
            if SchreierGraph::new(&t).is_connected() {
                assert!(v < 8.0 - 1e-6);
            }
        }
    }

    #[test]
    fn schreier_connectivity() {
        let t = HomTuple::new(
            3,
            vec![
                Perm::new(vec![1, 2, 0]).unwrap(),
                Perm::identity(3),
                Perm::identity(3),
                Perm::identity(3),
            ],
        )
        .unwrap();
        assert!(SchreierGraph::new(&t).is_connected());
        let disc = HomTuple::new(3, vec![Perm::identity(3); 4]).unwrap();
        assert!(!SchreierGraph::new(&disc).is_connected());
    }

    #[test]
    fn hom_tuple_validation() {
        // In S₃ pick a non-commuting pair so the relator fails.
        let a = Perm::new(vec![1, 0, 2]).unwrap();
        let b = Perm::new(vec![0, 2, 1]).unwrap();
        assert!(HomTuple::new(3, vec![a, b, Perm::identity(3), Perm::identity(3)]).is_err());
    }
}
