//! Sparse multivariate Laurent polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::mono::{Mono, Var, NV};
use super::rat::Rat;

/// Terms are kept sorted ascending in graded-lex order with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: Vec<(Mono, Rat)>,
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for LaurentPoly {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.terms.len().cmp(&o.terms.len()).then_with(|| self.terms.cmp(&o.terms))
    }
}

fn merge_sorted(mut v: Vec<(Mono, Rat)>) -> Vec<(Mono, Rat)> {
    v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => {
                *lc = &*lc + &c;
            }
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::ONE)
    }

    pub fn constant(c: Rat) -> Self {
        Self::term(Mono::ONE, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Rat::int(n))
    }

    pub fn term(m: Mono, c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(m, c)] }
        }
    }

    pub fn mono(m: Mono) -> Self {
        Self::term(m, Rat::ONE)
    }

    pub fn var(v: Var) -> Self {
        Self::mono(Mono::var(v, 1))
    }

    pub fn var_pow(v: Var, k: i32) -> Self {
        Self::mono(Mono::var(v, k))
    }

    /// Build from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(v: Vec<(Mono, Rat)>) -> Self {
        LaurentPoly { terms: merge_sorted(v) }
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Mono, Rat)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value when the polynomial has no non-unit monomials.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::ZERO),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn as_term(&self) -> Option<(Mono, Rat)> {
        (self.terms.len() == 1).then(|| self.terms[0].clone())
    }

    pub fn leading(&self) -> Option<&(Mono, Rat)> {
        self.terms.last()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        // multiplication by a monomial preserves the order
        LaurentPoly { terms: self.terms.iter().map(|(x, c)| (x.mul(m), c.clone())).collect() }
    }

    pub fn mul_term(&self, m: &Mono, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(x, y)| (x.mul(m), y * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Apply a map on monomials that may not preserve the order.
    pub fn map_monos(&self, f: impl Fn(&Mono) -> Mono) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (f(m), c.clone())).collect())
    }

    /// Adams operation: every generator x ↦ xⁿ.
    pub fn psi(&self, n: u32) -> Self {
        // scaling exponents by a positive integer preserves graded-lex order
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (m.pow(n as i32), c.clone())).collect() }
    }

    /// Componentwise minimum of all exponents (the monomial content).
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.iter();
        let first = match it.next() {
            Some((m, _)) => *m,
            None => return Mono::ONE,
        };
        it.fold(first, |acc, (m, _)| Mono::min(&acc, m))
    }

    pub fn max_exp(&self, v: Var) -> i32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn min_exp(&self, v: Var) -> i32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).min().unwrap_or(0)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) != 0)
    }

    /// Rational content: positive gcd of numerators over lcm of denominators,
    /// signed so that dividing by it makes the leading coefficient positive.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::ONE;
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            g = g.gcd(&c.numer());
            l = l.lcm(&c.denom());
        }
        let mut r = Rat::from(g) / Rat::from(l);
        if self.leading().unwrap().1.signum() < 0 {
            r = -r;
        }
        r
    }

    /// Split off the monomial content and rational content:
    /// `self = c · m · p` with `p` primitive, nonnegative exponents, no monomial factor,
    /// and positive leading coefficient.
    pub fn normalize(&self) -> (Rat, Mono, LaurentPoly) {
        let m = self.min_mono();
        let c = self.content();
        let ci = c.recip();
        let mi = m.inv();
        let p = LaurentPoly {
            terms: self.terms.iter().map(|(x, y)| (x.mul(&mi), y * &ci)).collect(),
        };
        (c, m, p)
    }

    /// Exact division; `None` when `f` does not divide `self`.
    pub fn div_exact(&self, f: &LaurentPoly) -> Option<LaurentPoly> {
        assert!(!f.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some((m, c)) = f.as_term() {
            return Some(self.mul_term(&m.inv(), &c.recip()));
        }
        let fm = f.min_mono();
        let sm = self.min_mono();
        let fmi = fm.inv();
        let smi = sm.inv();
        let fp: Vec<(Mono, Rat)> = f.terms.iter().map(|(m, c)| (m.mul(&fmi), c.clone())).collect();
        let (lm, lc) = fp.last().unwrap().clone();
        let lci = lc.recip();
        let mut rem: BTreeMap<Mono, Rat> =
            self.terms.iter().map(|(m, c)| (m.mul(&smi), c.clone())).collect();
        let mut quot: Vec<(Mono, Rat)> = Vec::new();
        // quick reject: the number of quotient terms is bounded by a degree argument
        while let Some((&rm, rc)) = rem.iter().next_back() {
            if !rm.dominates(&lm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc * &lci;
            for (m, c) in &fp {
                let key = m.mul(&qm);
                let delta = c * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let v = &*e.get() - &delta;
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        let shift = sm.mul(&fmi);
        Some(Self::from_terms(quot.into_iter().map(|(m, c)| (m.mul(&shift), c)).collect()))
    }

    /// Coefficients grouped by the exponent of `v`, with `v` removed.
    pub fn split_by(&self, v: Var) -> BTreeMap<i32, LaurentPoly> {
        let mut groups: BTreeMap<i32, Vec<(Mono, Rat)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.exp(v);
            groups.entry(k).or_default().push((m.with_exp(v, 0), c.clone()));
        }
        groups.into_iter().map(|(k, t)| (k, LaurentPoly::from_terms(t))).collect()
    }

    /// Substitute a Laurent monomial (with coefficient) for each listed variable.
    pub fn subst_monomial(&self, images: &[(Var, Mono, Rat)]) -> LaurentPoly {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut nm = *m;
            for (v, _, _) in images {
                nm = nm.with_exp(*v, 0);
            }
            let mut nc = c.clone();
            for (v, im, ic) in images {
                let k = m.exp(*v);
                if k != 0 {
                    nm = nm.mul(&im.pow(k));
                    if !ic.is_one() {
                        nc = &nc * &ic.pow(k);
                    }
                }
            }
            out.push((nm, nc));
        }
        Self::from_terms(out)
    }

    /// Evaluate every generator at a rational value (nonzero where negative powers occur).
    pub fn eval_rat(&self, vals: &[Rat; NV]) -> Rat {
        let mut acc = Rat::ZERO;
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e != 0 {
                    t = &t * &vals[i].pow(e as i32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    pub fn max_abs_coeff_is_small(&self) -> bool {
        self.terms.iter().all(|(_, c)| matches!(c, Rat::Small(..)))
    }

    pub fn has_negative_coeff(&self) -> bool {
        self.terms.iter().any(|(_, c)| c.numer().is_negative())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &o.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LaurentPoly { terms: out }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || o.is_zero() {
            return LaurentPoly::zero();
        }
        if let Some((m, c)) = o.as_term() {
            return self.mul_term(&m, &c);
        }
        if let Some((m, c)) = self.as_term() {
            return o.mul_term(&m, &c);
        }
        let mut v = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                v.push((m1.mul(m2), c1 * c2));
            }
        }
        LaurentPoly { terms: merge_sorted(v) }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, o: LaurentPoly) -> LaurentPoly {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical text: terms in descending graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.signum() < 0;
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
