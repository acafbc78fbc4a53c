//! Fractions with a factored denominator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::factor::{factorize, Factor};
use super::mono::{Mono, Var};
use super::poly::LaurentPoly;
use super::rat::Rat;
use crate::Error;

/// `num / ∏ fᵢ^{eᵢ}`; all units and contents live in the numerator.
#[derive(Clone, Default)]
pub struct ScalarFraction {
    num: LaurentPoly,
    den: BTreeMap<Factor, u32>,
}

impl ScalarFraction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(LaurentPoly::int(n))
    }

    pub fn rat(r: Rat) -> Self {
        Self::from_poly(LaurentPoly::constant(r))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        ScalarFraction { num: p, den: BTreeMap::new() }
    }

    pub fn mono(m: Mono) -> Self {
        Self::from_poly(LaurentPoly::mono(m))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(LaurentPoly::var(v))
    }

    pub fn var_pow(v: Var, k: i32) -> Self {
        Self::from_poly(LaurentPoly::var_pow(v, k))
    }

    /// `num / den` for polynomials; fails when `den` is zero.
    pub fn new(num: LaurentPoly, den: &LaurentPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_poly(num).div_by_poly(den))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &BTreeMap<Factor, u32> {
        &self.den
    }

    pub fn den_expanded(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for (f, e) in &self.den {
            acc = &acc * &f.expand().pow(*e);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    /// Multiply by `1/p` for a nonzero polynomial `p`.
    pub fn div_by_poly(&self, p: &LaurentPoly) -> Self {
        let (c, m, fs) = factorize(p);
        let mut den = self.den.clone();
        for (f, e) in fs {
            *den.entry(f).or_insert(0) += e;
        }
        ScalarFraction { num: self.num.mul_term(&m.inv(), &c.recip()), den }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        ScalarFraction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        ScalarFraction { num: self.num.mul_mono(m), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        ScalarFraction { num: &self.num * p, den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ScalarFraction::from_poly(self.den_expanded()).div_by_poly(&self.num))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, Error> {
        Ok(self * &o.recip()?)
    }

    pub fn pow(&self, k: i32) -> Result<Self, Error> {
        if k < 0 {
            return self.recip()?.pow(-k);
        }
        let mut den = BTreeMap::new();
        for (f, e) in &self.den {
            den.insert(f.clone(), e * k as u32);
        }
        Ok(ScalarFraction { num: self.num.pow(k as u32), den })
    }

    /// Cancel denominator factors that divide the numerator exactly.
    pub fn reduce(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let mut num = self.num.clone();
        let mut den = BTreeMap::new();
        for (f, &e) in &self.den {
            let fp = f.expand();
            let mut left = e;
            while left > 0 {
                match num.div_exact(&fp) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                den.insert(f.clone(), left);
            }
        }
        ScalarFraction { num, den }
    }

    /// Adams operation ψₙ: every generator x ↦ xⁿ.
    pub fn psi(&self, n: u32) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return self.clone();
        }
        let mut num = self.num.psi(n);
        let mut den = BTreeMap::new();
        for (f, &e) in &self.den {
            let (c, m, fs) = f.psi(n);
            for _ in 0..e {
                num = num.mul_term(&m.inv(), &c.recip());
            }
            for (g, k) in fs {
                *den.entry(g).or_insert(0) += k * e;
            }
        }
        ScalarFraction { num, den }
    }

    /// Image under a ring homomorphism sending each listed generator to a
    /// coefficient times a Laurent monomial. Unlisted generators are fixed.
    pub fn subst_monomial(&self, images: &[(Var, Mono, Rat)]) -> Result<Self, Error> {
        let mut out = ScalarFraction::from_poly(self.num.subst_monomial(images));
        for (f, &e) in &self.den {
            let img = f.expand().subst_monomial(images);
            if img.is_zero() {
                return Err(Error::VanishingDenominator(f.expand().to_string()));
            }
            for _ in 0..e {
                out = out.div_by_poly(&img);
            }
        }
        Ok(out)
    }

    /// Image under a general substitution of fractions for generators.
    pub fn substitute(&self, assignment: &BTreeMap<Var, ScalarFraction>) -> Result<Self, Error> {
        let mut mono_images = Vec::new();
        let mut all_mono = true;
        for (v, f) in assignment {
            match f.as_poly().and_then(|p| p.as_term()) {
                Some((m, c)) => mono_images.push((*v, m, c)),
                None => {
                    all_mono = false;
                    break;
                }
            }
        }
        if all_mono {
            return self.subst_monomial(&mono_images);
        }
        let eval = |p: &LaurentPoly| -> Result<ScalarFraction, Error> {
            let mut acc = ScalarFraction::zero();
            for (m, c) in p.terms() {
                let mut t = ScalarFraction::rat(c.clone());
                let mut rest = *m;
                for (v, k) in m.vars() {
                    if let Some(img) = assignment.get(&v) {
                        t = &t * &img.pow(k)?;
                        rest = rest.with_exp(v, 0);
                    }
                }
                acc = &acc + &t.mul_mono(&rest);
            }
            Ok(acc)
        };
        let mut out = eval(&self.num)?;
        for (f, &e) in &self.den {
            let img = eval(&f.expand())?;
            if img.is_zero() {
                return Err(Error::VanishingDenominator(f.expand().to_string()));
            }
            for _ in 0..e {
                out = out.checked_div(&img)?;
            }
        }
        Ok(out)
    }

    /// True when no denominator factor involves `v`.
    pub fn den_free_of(&self, v: Var) -> bool {
        self.den.keys().all(|f| f.is_z_free(v))
    }

    pub fn involves(&self, v: Var) -> bool {
        self.num.involves(v) || !self.den_free_of(v)
    }

    /// Evaluate at rational values of all generators (for randomized testing).
    pub fn eval_rat(&self, vals: &[Rat; super::mono::NV]) -> Option<Rat> {
        let d = self.den_expanded().eval_rat(vals);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval_rat(vals) / &d)
    }

    fn lcm_parts(a: &Self, b: &Self) -> (LaurentPoly, LaurentPoly, BTreeMap<Factor, u32>) {
        if a.den == b.den {
            return (a.num.clone(), b.num.clone(), a.den.clone());
        }
        let mut l = a.den.clone();
        for (f, &e) in &b.den {
            let x = l.entry(f.clone()).or_insert(0);
            if *x < e {
                *x = e;
            }
        }
        let cof = |s: &Self| {
            let mut p = s.num.clone();
            for (f, &e) in &l {
                let have = s.den.get(f).copied().unwrap_or(0);
                if e > have {
                    p = &p * &f.expand().pow(e - have);
                }
            }
            p
        };
        (cof(a), cof(b), l)
    }
}

impl PartialEq for ScalarFraction {
    /// Cross-multiplicative equality, independent of reduction state.
    fn eq(&self, o: &Self) -> bool {
        let (x, y, _) = Self::lcm_parts(self, o);
        x == y
    }
}
impl Eq for ScalarFraction {}

impl<'a> Add<&'a ScalarFraction> for &'a ScalarFraction {
    type Output = ScalarFraction;
    fn add(self, o: &ScalarFraction) -> ScalarFraction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (x, y, den) = ScalarFraction::lcm_parts(self, o);
        let num = &x + &y;
        if num.is_zero() {
            return ScalarFraction::zero();
        }
        ScalarFraction { num, den }
    }
}

impl<'a> Sub<&'a ScalarFraction> for &'a ScalarFraction {
    type Output = ScalarFraction;
    fn sub(self, o: &ScalarFraction) -> ScalarFraction {
        self + &(-o)
    }
}

impl Neg for &ScalarFraction {
    type Output = ScalarFraction;
    fn neg(self) -> ScalarFraction {
        ScalarFraction { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a ScalarFraction> for &'a ScalarFraction {
    type Output = ScalarFraction;
    fn mul(self, o: &ScalarFraction) -> ScalarFraction {
        if self.is_zero() || o.is_zero() {
            return ScalarFraction::zero();
        }
        let mut den = self.den.clone();
        for (f, &e) in &o.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        ScalarFraction { num: &self.num * &o.num, den }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<ScalarFraction> for ScalarFraction {
            type Output = ScalarFraction;
            fn $m(self, o: ScalarFraction) -> ScalarFraction {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for ScalarFraction {
    type Output = ScalarFraction;
    fn neg(self) -> ScalarFraction {
        -&self
    }
}

impl From<LaurentPoly> for ScalarFraction {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for ScalarFraction {
    /// Canonical text `num` or `(num)/(f1)^e1*(f2)`; factors in their stored order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() || self.num.is_zero() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (fac, e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "({})", fac.expand())?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ScalarFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
