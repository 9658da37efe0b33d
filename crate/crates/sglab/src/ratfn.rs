//! Dense polynomials and rational functions over `Q`, with exact Laurent
//! expansion at `n → ∞` (power-series division on reversed coefficients).

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::{Error, Rat, Result};

/// Polynomial with exact rational coefficients, ascending powers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::new(vec![c])
    }

    pub fn x() -> Poly {
        Poly::new(vec![Rat::zero(), Rat::one()])
    }

    /// Falling factorial `(n)_k = n(n−1)⋯(n−k+1)` as a polynomial in n.
    pub fn pochhammer(k: usize) -> Poly {
        let mut p = Poly::one();
        for i in 0..k {
            p = p.mul(&Poly::new(vec![-crate::rat(i as i64), Rat::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::symrep::rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * crate::rat(i as i64))
                .collect(),
        )
    }

    /// Exact division; errors on a nonzero remainder.
    pub fn div_exact(&self, other: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(other)?;
        if !r.is_zero() {
            return Err(Error::Degeneracy("polynomial division has remainder".into()));
        }
        Ok(q)
    }

    pub fn div_rem(&self, other: &Poly) -> Result<(Poly, Poly)> {
        if other.is_zero() {
            return Err(Error::Precondition("division by zero polynomial".into()));
        }
        let d = other.coeffs.len();
        let lead = other.coeffs.last().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(d - 1)];
        while rem.len() >= d && !rem.is_empty() {
            let last = rem.last().unwrap().clone();
            if last.is_zero() {
                rem.pop();
                continue;
            }
            let shift = rem.len() - d;
            let factor = last / lead.clone();
            for (i, b) in other.coeffs.iter().enumerate() {
                let idx = shift + i;
                let v = rem[idx].clone() - b * &factor;
                rem[idx] = v;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            quot[shift] = factor;
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic gcd (Euclid).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}·")?;
                    }
                    if i == 1 {
                        write!(f, "n")?;
                    } else {
                        write!(f, "n^{i}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// Rational function `num/den`; not automatically reduced.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::Precondition("zero denominator".into()));
        }
        Ok(RationalFn { num, den })
    }

    pub fn zero() -> RationalFn {
        RationalFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> RationalFn {
        RationalFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rat) -> RationalFn {
        RationalFn::from_poly(Poly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    pub fn div(&self, other: &RationalFn) -> Result<RationalFn> {
        if other.is_zero() {
            return Err(Error::Precondition("division by zero rational function".into()));
        }
        Ok(RationalFn {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        })
    }

    /// Cancel the gcd of numerator and denominator (monic-normalized gcd).
    pub fn reduced(&self) -> RationalFn {
        if self.num.is_zero() {
            return RationalFn::zero();
        }
        let g = self.num.gcd(&self.den);
        if g.degree() == Some(0) {
            return self.clone();
        }
        RationalFn {
            num: self.num.div_exact(&g).expect("gcd divides"),
            den: self.den.div_exact(&g).expect("gcd divides"),
        }
    }

    /// Exact value at integer/rational `n`; errors at a pole.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Degeneracy(format!("pole at {x}")));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Laurent expansion at `n = ∞`: returns `(e, [c₀, c₁, …])` with
    /// `R(n) = c₀·nᵉ + c₁·nᵉ⁻¹ + ⋯`, `c₀ ≠ 0` (unless R = 0), `count` terms.
    pub fn laurent_at_infinity(&self, count: usize) -> Result<(i64, Vec<Rat>)> {
        if self.num.is_zero() {
            return Ok((0, vec![Rat::zero(); count]));
        }
        let p = self.num.degree().unwrap() as i64;
        let q = self.den.degree().unwrap() as i64;
        // Reversed coefficients: power series in t = 1/n.
        let rev = |poly: &Poly| -> Vec<Rat> {
            let mut v: Vec<Rat> = poly.coeffs().to_vec();
            v.reverse();
            v
        };
        let a = rev(&self.num);
        let b = rev(&self.den);
        debug_assert!(!b[0].is_zero());
        let mut c: Vec<Rat> = Vec::with_capacity(count);
        for k in 0..count {
            let mut acc = a.get(k).cloned().unwrap_or_else(Rat::zero);
            for j in 0..k {
                if let Some(bj) = b.get(k - j) {
                    acc -= c[j].clone() * bj;
                }
            }
            c.push(acc / b[0].clone());
        }
        Ok((p - q, c))
    }

    /// Coefficient of `n^k` in the Laurent expansion at infinity
    /// (`k` may be negative). Exact.
    pub fn laurent_coeff(&self, k: i64) -> Result<Rat> {
        if self.num.is_zero() {
            return Ok(Rat::zero());
        }
        let p = self.num.degree().unwrap() as i64;
        let q = self.den.degree().unwrap() as i64;
        let e = p - q;
        if k > e {
            return Ok(Rat::zero());
        }
        let idx = (e - k) as usize;
        let (_, coeffs) = self.laurent_at_infinity(idx + 1)?;
        Ok(coeffs[idx].clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ser = |p: &Poly| -> Vec<[String; 2]> {
            p.coeffs()
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect()
        };
        serde_json::json!({ "num": ser(&self.num), "den": ser(&self.den) })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<RationalFn> {
        let bad = || Error::Parse("rational function JSON".into());
        let de = |key: &str| -> Result<Poly> {
            let arr = v[key].as_array().ok_or_else(bad)?;
            let mut coeffs = Vec::new();
            for c in arr {
                let pair = c.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let num: crate::Int =
                    pair[0].as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let den: crate::Int =
                    pair[1].as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                coeffs.push(Rat::new(num, den));
            }
            Ok(Poly::new(coeffs))
        };
        RationalFn::new(de("num")?, de("den")?)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
