//! Fuchsian embedding of `Cay(Γ_g)` in the Poincaré disk.
//!
//! The dual tiling is by regular `4g`-gons with interior angle `2π/4g`
//! (so `4g` polygons meet at each tiling vertex). Tile centers form the orbit
//! `Γ·o` with `o = 0`; the cells are Dirichlet–Voronoi cells of the orbit,
//! which is what the tile-walk routines exploit. Generators are side-pairing
//! translations: the outgoing edge of the base tile labeled `x` points at
//! angle `α(x)`, with the clockwise slot order `a_1, b_1⁻¹, a_1⁻¹, b_1, a_2, …`.
//!
//! All predicates here are numeric with tolerance `1e-9`; exact combinatorial
//! confirmation (Dehn's algorithm, BFS) always has the last word.

use num_complex::Complex64 as C;

use crate::canon::{canonical_word, GroupElement};
use crate::words::{are_equal, free_reduce, signed_letters, Letter, Word};
use crate::{Error, Result};

pub const GEOM_TOL: f64 = 1e-9;

/// A Möbius transformation `z ↦ (az+b)/(cz+d)` preserving the unit disk.
#[derive(Clone, Copy, Debug)]
pub struct Mobius {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius { a: C::new(1.0, 0.0), b: C::new(0.0, 0.0), c: C::new(0.0, 0.0), d: C::new(1.0, 0.0) }
    }

    /// Rotation about the origin by angle `theta`.
    pub fn rotation(theta: f64) -> Self {
        let h = C::from_polar(1.0, theta / 2.0);
        Mobius { a: h, b: C::new(0.0, 0.0), c: C::new(0.0, 0.0), d: h.conj() }
    }

    /// Hyperbolic translation by distance `dist` along the positive real axis.
    pub fn translation_x(dist: f64) -> Self {
        let ch = (dist / 2.0).cosh();
        let sh = (dist / 2.0).sinh();
        Mobius { a: C::new(ch, 0.0), b: C::new(sh, 0.0), c: C::new(sh, 0.0), d: C::new(ch, 0.0) }
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    /// Rescale so `det = 1` (unique up to sign).
    pub fn normalized(&self) -> Self {
        let s = self.det().sqrt();
        Mobius { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        Mobius { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det }
    }

    pub fn apply(&self, z: C) -> C {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn trace(&self) -> C {
        let m = self.normalized();
        m.a + m.d
    }

    /// Max-entry distance to the identity in the normalized, sign-reduced
    /// representative (Möbius maps are matrices up to sign).
    pub fn dist_to_identity(&self) -> f64 {
        let m = self.normalized();
        let dist = |s: f64| {
            let one = C::new(s, 0.0);
            (m.a - one)
                .norm()
                .max((m.d - one).norm())
                .max(m.b.norm())
                .max(m.c.norm())
        };
        dist(1.0).min(dist(-1.0))
    }

    /// Translation length `2·arccosh(|tr|/2)` of a hyperbolic element.
    pub fn translation_length(&self) -> f64 {
        let t = self.trace().norm() / 2.0;
        if t <= 1.0 {
            0.0
        } else {
            2.0 * t.acosh()
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        // Disk-preserving maps have real trace after normalization.
        self.trace().re.abs() > 2.0 + GEOM_TOL
    }

    /// Boundary fixed points `(repelling, attracting)` of a hyperbolic map.
    pub fn axis_endpoints(&self) -> Result<(C, C)> {
        if !self.is_hyperbolic() {
            return Err(Error::Precondition(format!(
                "not a hyperbolic isometry (|tr| = {:.6})",
                self.trace().norm()
            )));
        }
        let m = self.normalized();
        // Fixed points of (az+b)/(cz+d): c z² + (d−a) z − b = 0.
        let disc = ((m.d - m.a) * (m.d - m.a) + 4.0 * m.b * m.c).sqrt();
        let z1 = ((m.a - m.d) + disc) / (2.0 * m.c);
        let z2 = ((m.a - m.d) - disc) / (2.0 * m.c);
        // Attracting fixed point has |derivative| = 1/|cz+d|² < 1.
        let d1 = (m.c * z1 + m.d).norm();
        if d1 > 1.0 {
            Ok((z2, z1))
        } else {
            Ok((z1, z2))
        }
    }

    /// Real `k`-th root of a hyperbolic map: same axis, `1/k`-th of the
    /// translation length.
    pub fn kth_root(&self, k: u32) -> Result<Mobius> {
        if !self.is_hyperbolic() {
            return Err(Error::Precondition("k-th root needs a hyperbolic map".into()));
        }
        let mut m = self.normalized();
        if m.trace().re < 0.0 {
            // Same Möbius map, positive trace.
            m = Mobius { a: -m.a, b: -m.b, c: -m.c, d: -m.d };
        }
        let tr = m.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let l1 = (tr + disc) / 2.0;
        let l2 = (tr - disc) / 2.0;
        // Eigenvector for eigenvalue l: (b, l − a) (or (l − d, c)).
        let pick = |l: C| -> (C, C) {
            let v1 = (m.b, l - m.a);
            let v2 = (l - m.d, m.c);
            if v1.0.norm() + v1.1.norm() > v2.0.norm() + v2.1.norm() {
                v1
            } else {
                v2
            }
        };
        let (p1, q1) = pick(l1);
        let (p2, q2) = pick(l2);
        let r1 = l1.powf(1.0 / k as f64);
        let r2 = l2.powf(1.0 / k as f64);
        // M^{1/k} = V diag(r1, r2) V⁻¹ with V = [[p1,p2],[q1,q2]].
        let det = p1 * q2 - p2 * q1;
        Ok(Mobius {
            a: (r1 * p1 * q2 - r2 * p2 * q1) / det,
            b: (r2 - r1) * p1 * p2 / det,
            c: (r1 - r2) * q1 * q2 / det,
            d: (r2 * p1 * q2 - r1 * p2 * q1) / det,
        })
    }
}

/// Hyperbolic distance between two points of the open unit disk.
pub fn hyp_dist(z: C, w: C) -> f64 {
    let num = 2.0 * (z - w).norm_sqr();
    let den = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr());
    (1.0 + num / den).acosh()
}

/// A complete geodesic of the disk, stored via its ideal endpoints.
#[derive(Clone, Copy, Debug)]
pub struct Geodesic {
    pub u: C,
    pub v: C,
}

impl Geodesic {
    /// The geodesic through two distinct interior or boundary points.
    pub fn through(z0: C, z1: C) -> Result<Geodesic> {
        // Cross product test for collinearity with the origin.
        let cross = z0.re * z1.im - z0.im * z1.re;
        if cross.abs() < 1e-13 * (z0.norm() * z1.norm()).max(1e-30) || z0.norm() < 1e-13 || z1.norm() < 1e-13 {
            // Diameter through both points.
            let dir = if z1.norm() > z0.norm() { z1 } else { z0 };
            if dir.norm() < 1e-13 {
                return Err(Error::Degeneracy("geodesic through coincident points".into()));
            }
            let u = dir / dir.norm();
            return Ok(Geodesic { u: -u, v: u });
        }
        // Orthocircle center c: Re(c·conj(z)) = (1+|z|²)/2 for both points.
        let rhs0 = (1.0 + z0.norm_sqr()) / 2.0;
        let rhs1 = (1.0 + z1.norm_sqr()) / 2.0;
        let det = z0.re * z1.im - z0.im * z1.re;
        let cx = (rhs0 * z1.im - rhs1 * z0.im) / det;
        let cy = (z0.re * rhs1 - z1.re * rhs0) / det;
        let c = C::new(cx, cy);
        let _r = (c.norm_sqr() - 1.0).sqrt();
        // Ideal endpoints: intersection of the orthocircle with the unit
        // circle; they are the two points where |z|=1 and |z−c|=r.
        // Solve: z = c/|c|² ± t·i·c/|c| scaled — use the chord construction.
        let d = c.norm();
        let x = 1.0 / d; // distance from origin to chord midpoint, along c
        let half = (1.0 - x * x).sqrt();
        let dir = c / d;
        let perp = C::new(-dir.im, dir.re);
        let u = dir * x - perp * half;
        let v = dir * x + perp * half;
        Ok(Geodesic { u, v })
    }

    /// Point on the geodesic with signed hyperbolic arclength parameter `t`
    /// measured from the point closest to the origin, oriented `u → v`.
    pub fn point(&self, t: f64) -> C {
        // Map the standard geodesic (−1, 1) onto this one by a rotation-like
        // Möbius map fixing the parametrization: w(t) = tanh(t/2) on (−1,1).
        let m = self.to_standard().inverse();
        m.apply(C::new((t / 2.0).tanh(), 0.0))
    }

    /// A Möbius map sending this geodesic to the real diameter, `u ↦ −1`,
    /// `v ↦ 1`.
    pub fn to_standard(&self) -> Mobius {
        // First rotate so that the midpoint direction is convenient: use the
        // map z ↦ (z−p)/(1−conj(p)z) with p the closest point to the origin,
        // then rotate v to 1.
        let p = self.closest_to_origin();
        let t1 = Mobius {
            a: C::new(1.0, 0.0),
            b: -p,
            c: -p.conj(),
            d: C::new(1.0, 0.0),
        };
        let v_img = t1.apply(self.v);
        let rot = Mobius::rotation(-v_img.arg());
        rot.compose(&t1)
    }

    fn closest_to_origin(&self) -> C {
        // For a diameter this is 0; otherwise it is c·(1 − r/|c|) along c.
        let cross = self.u.re * self.v.im - self.u.im * self.v.re;
        let mid = (self.u + self.v) / 2.0;
        if cross.abs() < 1e-12 || mid.norm() < 1e-12 {
            return C::new(0.0, 0.0);
        }
        // Orthocircle center again.
        let rhs = 1.0;
        let det = self.u.re * self.v.im - self.u.im * self.v.re;
        let cx = (rhs * self.v.im - rhs * self.u.im) / det;
        let cy = (self.u.re * rhs - self.v.re * rhs) / det;
        let c = C::new(cx, cy);
        let d = c.norm();
        let r = (d * d - 1.0).sqrt();
        c / d * (d - r)
    }

    /// Foot of the perpendicular from `z` and the distance `d(z, geodesic)`.
    pub fn foot(&self, z: C) -> (C, f64) {
        let m = self.to_standard();
        let w = m.apply(z);
        // Over the standard geodesic (−1,1), minimizing the distance from w
        // to x ∈ (−1,1) gives w.re·x² − (1+|w|²)·x + w.re = 0.
        let s = 1.0 + w.norm_sqr();
        let x = if w.re.abs() < 1e-14 {
            0.0
        } else {
            // The root inside (−1,1).
            let disc = (s * s - 4.0 * w.re * w.re).sqrt();
            let x1 = (s - disc) / (2.0 * w.re);
            let x2 = (s + disc) / (2.0 * w.re);
            if x1.abs() < 1.0 {
                x1
            } else {
                x2
            }
        };
        let foot_std = C::new(x, 0.0);
        (m.inverse().apply(foot_std), hyp_dist(w, foot_std))
    }
}

/// Sample `n+1` points along the geodesic arc from `z0` to `z1`, inclusive.
pub fn sample_arc(z0: C, z1: C, n: usize) -> Result<Vec<C>> {
    let geo = Geodesic::through(z0, z1)?;
    let m = geo.to_standard();
    let w0 = m.apply(z0);
    let w1 = m.apply(z1);
    let t0 = 2.0 * w0.re.atanh();
    let t1 = 2.0 * w1.re.atanh();
    let inv = m.inverse();
    Ok((0..=n)
        .map(|i| {
            let t = t0 + (t1 - t0) * (i as f64) / (n as f64);
            inv.apply(C::new((t / 2.0).tanh(), 0.0))
        })
        .collect())
}

/// The Fuchsian representation of `Γ_g`: side-pairing generators of the
/// regular `4g`-gon tiling.
pub struct FuchsianGroup {
    genus: usize,
    /// Matrix per signed letter, indexed by `Letter::signed_index`.
    letter_mats: Vec<Mobius>,
    /// Distance between adjacent tile centers.
    pub tile_step: f64,
    /// Outgoing-edge angle per signed letter.
    angles: Vec<f64>,
}

impl FuchsianGroup {
    pub fn new(genus: usize) -> Result<FuchsianGroup> {
        if genus < 2 {
            return Err(Error::Precondition("genus must be ≥ 2".into()));
        }
        let g = genus;
        // Inradius r of the {4g,4g} tile: cosh r = cot(π/4g); centers of
        // adjacent tiles are 2r apart.
        let t = std::f64::consts::PI / (4.0 * g as f64);
        let step = 2.0 * (t.cos() / t.sin()).acosh();
        // Clockwise slot order a_1, b_1⁻¹, a_1⁻¹, b_1, a_2, …
        let mut angles = vec![0.0; 4 * g];
        for i in 0..g {
            let base = |slot: usize| -2.0 * std::f64::consts::PI * (4 * i + slot) as f64 / (4.0 * g as f64);
            angles[Letter::a(i + 1).signed_index()] = base(0);
            angles[Letter::b(i + 1).inverse().signed_index()] = base(1);
            angles[Letter::a(i + 1).inverse().signed_index()] = base(2);
            angles[Letter::b(i + 1).signed_index()] = base(3);
        }
        // g_x = R(α(x)) · T_step · R(π − α(x⁻¹)): maps o to the x-neighbor
        // center and the frame of outgoing edges at o to the frame at that
        // neighbor.
        let mut letter_mats = vec![Mobius::identity(); 4 * g];
        for l in signed_letters(g) {
            let ax = angles[l.signed_index()];
            let axinv = angles[l.inverse().signed_index()];
            let m = Mobius::rotation(ax)
                .compose(&Mobius::translation_x(step))
                .compose(&Mobius::rotation(std::f64::consts::PI - axinv));
            letter_mats[l.signed_index()] = m;
        }
        Ok(FuchsianGroup { genus: g, letter_mats, tile_step: step, angles })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letter_matrix(&self, l: Letter) -> &Mobius {
        &self.letter_mats[l.signed_index()]
    }

    pub fn edge_angle(&self, l: Letter) -> f64 {
        self.angles[l.signed_index()]
    }

    pub fn word_matrix(&self, w: &Word) -> Mobius {
        let mut m = Mobius::identity();
        for &l in w.letters() {
            m = m.compose(self.letter_matrix(l));
        }
        m
    }

    /// Tile center `w·o`.
    pub fn point(&self, w: &Word) -> C {
        self.word_matrix(w).apply(C::new(0.0, 0.0))
    }

    /// Numeric fingerprint of a word's tile center, rounded to `10⁻⁶`.
    /// Used only as a dedup pre-filter; never decides equality alone.
    pub fn fingerprint(&self, w: &Word) -> (i64, i64) {
        let z = self.point(w);
        ((z.re / 1e-6).round() as i64, (z.im / 1e-6).round() as i64)
    }

    pub fn translation_length(&self, w: &Word) -> f64 {
        self.word_matrix(w).translation_length()
    }

    /// Greedy Voronoi walk: the group element whose tile contains `target`,
    /// together with the walk word. Tiles are Dirichlet cells of the orbit,
    /// so whenever the current tile does not contain `target`, some neighbor
    /// center is strictly closer; greedy descent terminates at the right
    /// tile.
    pub fn walk_to_point(&self, target: C) -> Word {
        let letters = signed_letters(self.genus);
        let mut cur = Mobius::identity();
        let mut path: Vec<Letter> = Vec::new();
        let mut cur_d = hyp_dist(C::new(0.0, 0.0), target);
        loop {
            let mut best: Option<(f64, Letter, Mobius)> = None;
            for &l in &letters {
                let cand = cur.compose(self.letter_matrix(l));
                let d = hyp_dist(cand.apply(C::new(0.0, 0.0)), target);
                if d < cur_d - 1e-12 && best.as_ref().map_or(true, |(bd, _, _)| d < *bd) {
                    best = Some((d, l, cand));
                }
            }
            match best {
                Some((d, l, cand)) => {
                    cur = cand;
                    cur_d = d;
                    path.push(l);
                }
                None => break,
            }
        }
        free_reduce(&Word::new(self.genus, path).expect("letters in range"))
    }
}

/// The `Π`-path of a nontrivial `γ`: `o → x → γ·x → γ·o` with `x` the foot of
/// the perpendicular from `o` onto the axis of `γ`.
#[derive(Clone, Debug)]
pub struct PiPath {
    pub o: C,
    pub x: C,
    pub gamma_x: C,
    pub gamma_o: C,
    pub axis: Geodesic,
    pub translation_length: f64,
}

pub fn pi_path(fg: &FuchsianGroup, gamma: &Word) -> Result<PiPath> {
    let m = fg.word_matrix(gamma);
    let (u, v) = m.axis_endpoints()?;
    let axis = Geodesic { u, v };
    let o = C::new(0.0, 0.0);
    let (x, _) = axis.foot(o);
    Ok(PiPath {
        o,
        x,
        gamma_x: m.apply(x),
        gamma_o: m.apply(o),
        axis,
        translation_length: m.translation_length(),
    })
}

/// Report of [`verify_pi_close`]: measured two-sided neighborhood radius and
/// the corner witnesses on `[o, γ·o]`.
#[derive(Clone, Debug)]
pub struct PiCloseReport {
    pub c1: f64,
    pub z1: C,
    pub z2: C,
    /// `d(x, z1)` and `d(γ·x, z2)`.
    pub corner_dists: (f64, f64),
    /// Arclength positions of `z1`, `z2` from `o` along `[o, γ·o]`.
    pub order_ok: bool,
}

/// Sample `Π_γ` and `[o, γ·o]` and measure how far each is from the other
/// (Lemma "c₁-neighborhood"), plus the ordered corner witnesses.
pub fn verify_pi_close(fg: &FuchsianGroup, gamma: &Word, samples: usize) -> Result<PiCloseReport> {
    let pp = pi_path(fg, gamma)?;
    let mut pi_pts = Vec::new();
    for (a, b) in [(pp.o, pp.x), (pp.x, pp.gamma_x), (pp.gamma_x, pp.gamma_o)] {
        if hyp_dist(a, b) > 1e-9 {
            pi_pts.extend(sample_arc(a, b, samples)?);
        } else {
            pi_pts.push(a);
        }
    }
    let arc_pts = sample_arc(pp.o, pp.gamma_o, 3 * samples)?;
    let one_sided = |from: &[C], to: &[C]| -> f64 {
        from.iter()
            .map(|&p| {
                to.iter()
                    .map(|&q| hyp_dist(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    let c1 = one_sided(&pi_pts, &arc_pts).max(one_sided(&arc_pts, &pi_pts));
    let nearest = |target: C| -> (usize, C, f64) {
        let mut best = (0usize, arc_pts[0], f64::INFINITY);
        for (i, &q) in arc_pts.iter().enumerate() {
            let d = hyp_dist(target, q);
            if d < best.2 {
                best = (i, q, d);
            }
        }
        best
    };
    let (i1, z1, d1) = nearest(pp.x);
    let (i2, z2, d2) = nearest(pp.gamma_x);
    Ok(PiCloseReport { c1, z1, z2, corner_dists: (d1, d2), order_ok: i2 >= i1 })
}

/// Tiles crossed by the geodesic arc `o → γ·o` and the corresponding
/// generator word (Birman–Series geodesic edge path).
#[derive(Clone, Debug)]
pub struct GeodesicEdgePath {
    /// Group elements of the tiles visited, starting at the identity.
    pub tiles: Vec<GroupElement>,
    /// The geodesic word `(h_1⁻¹h_2)(h_2⁻¹h_3)⋯`.
    pub word: Word,
}

pub fn geodesic_edge_path(fg: &FuchsianGroup, gamma: &Word) -> Result<GeodesicEdgePath> {
    let target_mat = fg.word_matrix(gamma);
    let o = C::new(0.0, 0.0);
    let end0 = target_mat.apply(o);
    if hyp_dist(o, end0) < 1e-9 {
        return Err(Error::Precondition("geodesic edge path needs γ ≠ 1".into()));
    }
    let letters = signed_letters(fg.genus());
    'retry: for retry in 0..4 {
        // Deterministic perturbation: push the endpoint left of the travel
        // direction by ε, growing with each retry.
        let end = if retry == 0 {
            end0
        } else {
            let dir = (end0 - o) / (end0 - o).norm();
            let left = C::new(-dir.im, dir.re);
            end0 + left * (1e-7 * retry as f64)
        };
        let total = hyp_dist(o, end);
        let nsteps = ((total / 0.05).ceil() as usize).max(8);
        let pts = sample_arc(o, end, nsteps)?;
        let mut cur = Mobius::identity();
        let mut cur_word: Vec<Letter> = Vec::new();
        let mut tiles = vec![GroupElement::identity(fg.genus())];
        let mut word_letters: Vec<Letter> = Vec::new();
        for &z in &pts {
            // Greedy descent to the containing tile, recording each wall
            // crossed.
            loop {
                let here = hyp_dist(cur.apply(o), z);
                let mut best: Option<(f64, Letter, Mobius)> = None;
                for &l in &letters {
                    let cand = cur.compose(fg.letter_matrix(l));
                    let d = hyp_dist(cand.apply(o), z);
                    if d < here - 1e-12 && best.as_ref().map_or(true, |(bd, _, _)| d < *bd) {
                        best = Some((d, l, cand));
                    }
                }
                let Some((best_d, l, cand)) = best else { break };
                // Degeneracy: ambiguous nearest tile (within 1e-9) means the
                // arc passes too close to a tiling vertex or edge.
                let ambiguous = letters
                    .iter()
                    .filter(|&&l2| l2 != l)
                    .any(|&l2| {
                        let d2 = hyp_dist(cur.compose(fg.letter_matrix(l2)).apply(o), z);
                        (d2 - best_d).abs() < GEOM_TOL
                    });
                if ambiguous && (here - best_d).abs() < GEOM_TOL {
                    continue 'retry;
                }
                cur = cand;
                cur_word.push(l);
                word_letters.push(l);
                let elt_word = free_reduce(&Word::new(fg.genus(), cur_word.clone())?);
                tiles.push(GroupElement::new(&elt_word));
            }
        }
        let word = free_reduce(&Word::new(fg.genus(), word_letters)?);
        // The walk must land on the tile of γ.
        let final_word = Word::new(fg.genus(), cur_word)?;
        if !are_equal(&final_word, gamma)? {
            return Err(Error::Degeneracy(
                "edge path did not terminate at the target tile".into(),
            ));
        }
        return Ok(GeodesicEdgePath { tiles, word });
    }
    Err(Error::Degeneracy(
        "unresolved tiling degeneracy after 3 perturbation retries".into(),
    ))
}

/// Check the Lambert-quadrilateral formula `sinh d(z, L₁) = sinh d₁ · cosh d₂`
/// on a `(d₁, d₂)` grid, returning the maximal absolute error.
pub fn fact_sinh_cosh_max_error(grid: &[f64]) -> f64 {
    // L = real diameter, L₁ = imaginary-axis geodesic through y₁ = 0,
    // y₂ at distance d₁ along L, z at distance d₂ along the perpendicular L₂.
    let l1 = Geodesic { u: C::new(0.0, -1.0), v: C::new(0.0, 1.0) };
    let mut max_err: f64 = 0.0;
    for &d1 in grid {
        let shift = Mobius::translation_x(d1);
        for &d2 in grid {
            let z = shift.apply(C::new(0.0, (d2 / 2.0).tanh()));
            let (_, dist) = l1.foot(z);
            let err = (dist.sinh() - d1.sinh() * d2.cosh()).abs();
            max_err = max_err.max(err);
        }
    }
    max_err
}

/// Output of [`decompose_power`]: the five-factor witness of Lemma 5.6.
#[derive(Clone, Debug)]
pub struct PowerDecomposition {
    /// Cut positions `1 ≤ t₁ ≤ t₂ ≤ t₃ ≤ t₄ ≤ p+1` (letter boundaries of `w`).
    pub t: [usize; 4],
    /// Correction words `u₁..u₄` (canonical).
    pub u: [Word; 4],
    pub b: Word,
    pub h: Word,
    pub max_u_len: usize,
    /// `max|uᵢ| / (d + log p)`.
    pub c3: f64,
    /// Whether the first-choice correction radius sufficed (`false` means the
    /// radius was enlarged once).
    pub radius_enlarged: bool,
}

/// Decompose a word `w = s₁⋯s_p` over an alphabet `S ⊂ Γ` that represents a
/// `k`-th power `γ = γ₀^k` into the Lemma 5.6 shape `b·h·h·h^{k−2}·b⁻¹`,
/// locating the cut points geometrically (axis + tile walk) and verifying the
/// five-factor identity exactly via the word problem.
pub fn decompose_power(
    fg: &FuchsianGroup,
    s_letters: &[Word],
    k: u32,
    root: &Word,
) -> Result<PowerDecomposition> {
    let genus = fg.genus();
    let p = s_letters.len();
    if p == 0 || k < 2 {
        return Err(Error::Precondition("need a nonempty word and k ≥ 2".into()));
    }
    let d_max = s_letters
        .iter()
        .map(|s| canonical_word(s).len())
        .max()
        .unwrap();
    // γ and its prefixes at letter boundaries (positions 1..=p+1; position
    // j holds the value of w_[1,j)).
    let mut prefixes: Vec<Word> = Vec::with_capacity(p + 1);
    let mut acc = Word::empty(genus);
    prefixes.push(acc.clone());
    for s in s_letters {
        acc = free_reduce(&acc.concat(s)?);
        prefixes.push(acc.clone());
    }
    let gamma = prefixes[p].clone();
    if !are_equal(&gamma, &root.pow(k as usize))? {
        return Err(Error::Precondition("w does not represent root^k".into()));
    }

    // Axis/tile recipe: x = foot of the perpendicular from o to axis(γ);
    // b = tile containing x; h = b⁻¹ γ₀ b.
    let m = fg.word_matrix(&gamma);
    let (u_fix, v_fix) = m.axis_endpoints()?;
    let axis = Geodesic { u: u_fix, v: v_fix };
    let (x, _) = axis.foot(C::new(0.0, 0.0));
    let b = fg.walk_to_point(x);
    let h = canonical_word(&free_reduce(
        &b.inverse().concat(root)?.concat(&b)?,
    ));
    debug_assert!(are_equal(
        &b.concat(&h.pow(k as usize))?.concat(&b.inverse())?,
        &gamma
    )?);

    // Cut points: nearest letter-boundary prefix (in the hyperbolic metric)
    // to each target b·h^j, j = 0, 1, 2, k, scanned in order.
    let targets: Vec<Word> = [0usize, 1, 2, k as usize]
        .iter()
        .map(|&j| free_reduce(&b.concat(&h.pow(j)).unwrap()))
        .collect();
    let prefix_pts: Vec<C> = prefixes.iter().map(|w| fg.point(w)).collect();
    let mut t = [1usize; 4];
    let mut prev = 0usize; // index into prefixes (0-based)
    for (i, tgt) in targets.iter().enumerate() {
        let tz = fg.point(tgt);
        let mut best = (prev, f64::INFINITY);
        for (j, &pz) in prefix_pts.iter().enumerate().skip(prev) {
            let d = hyp_dist(pz, tz);
            if d < best.1 - 1e-12 {
                best = (j, d);
            }
        }
        prev = best.0;
        t[i] = best.0 + 1; // 1-based position
    }

    // Correction words u_i = prefix(t_i)⁻¹ · target_i, exact.
    let mut u: Vec<Word> = Vec::with_capacity(4);
    for (i, tgt) in targets.iter().enumerate() {
        let pref = &prefixes[t[i] - 1];
        u.push(canonical_word(&free_reduce(&pref.inverse().concat(tgt)?)));
    }
    let max_u_len = u.iter().map(|w| w.len()).max().unwrap();
    let budget = (2.0 * (d_max as f64 + (p as f64).ln().max(1.0))).ceil() as usize + 4;
    let radius_enlarged = max_u_len > budget;
    if max_u_len > 2 * budget {
        return Err(Error::ResourceLimit(format!(
            "correction word length {max_u_len} exceeds enlarged radius {}",
            2 * budget
        )));
    }

    // Re-verify the five-factor identity through the word problem.
    let sub = |lo: usize, hi: usize| -> Result<Word> {
        let mut acc = Word::empty(genus);
        for s in &s_letters[lo - 1..hi - 1] {
            acc = free_reduce(&acc.concat(s)?);
        }
        Ok(acc)
    };
    let part1 = sub(1, t[0])?.concat(&u[0])?;
    let part2 = u[0].inverse().concat(&sub(t[0], t[1])?)?.concat(&u[1])?;
    let part3 = u[1].inverse().concat(&sub(t[1], t[2])?)?.concat(&u[2])?;
    let part4 = u[2].inverse().concat(&sub(t[2], t[3])?)?.concat(&u[3])?;
    let part5 = u[3].inverse().concat(&sub(t[3], p + 1)?)?;
    let ok = are_equal(&part1, &b)?
        && are_equal(&part2, &h)?
        && are_equal(&part3, &h)?
        && are_equal(&part4, &h.pow(k as usize - 2))?
        && are_equal(&part5, &b.inverse())?;
    if !ok {
        return Err(Error::Degeneracy("five-factor identity failed".into()));
    }
    let c3 = max_u_len as f64 / (d_max as f64 + (p as f64).ln().max(1.0));
    Ok(PowerDecomposition {
        t,
        u: [u[0].clone(), u[1].clone(), u[2].clone(), u[3].clone()],
        b,
        h,
        max_u_len,
        c3,
        radius_enlarged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::relator;

    fn fg() -> FuchsianGroup {
        FuchsianGroup::new(2).unwrap()
    }

    #[test]
    fn relator_is_identity() {
        let f = fg();
        let m = f.word_matrix(&relator(2));
        assert!(
            m.dist_to_identity() < GEOM_TOL,
            "relator distance {}",
            m.dist_to_identity()
        );
        let m3 = FuchsianGroup::new(3).unwrap().word_matrix(&relator(3));
        assert!(m3.dist_to_identity() < GEOM_TOL);
    }

    #[test]
    fn generators_have_equal_translation_length() {
        let f = fg();
        let base = f.letter_matrix(Letter::a(1)).translation_length();
        for l in signed_letters(2) {
            let len = f.letter_matrix(l).translation_length();
            assert!((len - base).abs() < 1e-9, "length {len} vs {base}");
            // o is generally not on a generator's axis, so ℓ ≤ d(o, x·o).
            assert!(len > 0.1 && len <= f.tile_step + 1e-9);
        }
    }

    #[test]
    fn inverse_letters_are_matrix_inverses() {
        let f = fg();
        for l in signed_letters(2) {
            let m = f.letter_matrix(l).compose(f.letter_matrix(l.inverse()));
            assert!(m.dist_to_identity() < 1e-10);
        }
    }

    #[test]
    fn distinct_short_words_have_distinct_points() {
        let f = fg();
        let a = f.point(&Word::parse(2, "a1").unwrap());
        let b = f.point(&Word::parse(2, "b1").unwrap());
        assert!(hyp_dist(a, b) > 1.0);
        assert!((hyp_dist(C::new(0.0, 0.0), a) - f.tile_step).abs() < 1e-9);
    }

    #[test]
    fn axis_and_roots() {
        let f = fg();
        let a1 = *f.letter_matrix(Letter::a(1));
        let sq = a1.compose(&a1);
        assert!((sq.translation_length() - 2.0 * a1.translation_length()).abs() < 1e-9);
        let root = sq.kth_root(2).unwrap();
        assert!(root.compose(&root).compose(&sq.inverse()).dist_to_identity() < 1e-8);
        // Axis endpoints of a1² agree with those of a1.
        let (u1, v1) = a1.axis_endpoints().unwrap();
        let (u2, v2) = sq.axis_endpoints().unwrap();
        assert!((u1 - u2).norm() < 1e-8 && (v1 - v2).norm() < 1e-8);
        assert!((u1.norm() - 1.0).abs() < 1e-9);
        assert!((v1.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn walk_reaches_simple_tiles() {
        let f = fg();
        let w = Word::parse(2, "a1 b2").unwrap();
        let target = f.point(&w);
        let found = f.walk_to_point(target);
        assert!(are_equal(&found, &w).unwrap());
        assert!(f.walk_to_point(C::new(0.0, 0.0)).is_empty());
    }

    #[test]
    fn geodesic_foot_is_perpendicular_ish() {
        // Foot of i/2 on the real diameter is 0.
        let geo = Geodesic { u: C::new(-1.0, 0.0), v: C::new(1.0, 0.0) };
        let (foot, d) = geo.foot(C::new(0.0, 0.5));
        assert!(foot.norm() < 1e-9);
        assert!((d - hyp_dist(C::new(0.0, 0.0), C::new(0.0, 0.5))).abs() < 1e-9);
    }

    #[test]
    fn sinh_cosh_formula_holds() {
        let grid: Vec<f64> = (1..=8).map(|i| i as f64 * 0.25).collect();
        assert!(fact_sinh_cosh_max_error(&grid) < 1e-9);
    }

    #[test]
    fn pi_path_corners() {
        let f = fg();
        let w = Word::parse(2, "a1 b1").unwrap();
        let pp = pi_path(&f, &w).unwrap();
        let d = hyp_dist(pp.x, pp.gamma_x);
        assert!((d - pp.translation_length).abs() < 1e-8);
        // Perpendicularity: foot of o really is the closest axis point.
        let (_, dist) = pp.axis.foot(pp.o);
        assert!(dist <= hyp_dist(pp.o, pp.gamma_x) + 1e-9);
    }

    #[test]
    fn edge_path_for_generator() {
        let f = fg();
        let w = Word::parse(2, "a1").unwrap();
        let path = geodesic_edge_path(&f, &w).unwrap();
        assert_eq!(path.word, w);
        assert_eq!(path.tiles.len(), 2);
    }
}
