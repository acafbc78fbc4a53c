//! Truncated Laurent series in z with z-free fraction coefficients, used to
//! expand rational functions in nonnegative powers of z.

use crate::exactalg::factor::{moebius, totient, Factor};
use crate::exactalg::{LaurentPoly, Mono, Rat, ScalarFraction, Var};
use crate::Error;

/// `∑ c[i] z^{lo+i}`, exact up to z-degree `top` inclusive.
#[derive(Clone, Debug)]
pub struct ZSeries {
    pub lo: i32,
    pub top: i32,
    pub c: Vec<ScalarFraction>,
}

impl ZSeries {
    pub fn zero(top: i32) -> Self {
        ZSeries { lo: 0, top, c: Vec::new() }
    }

    pub fn constant(x: ScalarFraction, top: i32) -> Self {
        let mut s = ZSeries { lo: 0, top, c: vec![x] };
        s.trim();
        s
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn trim(&mut self) {
        let keep = (self.top - self.lo + 1).max(0) as usize;
        self.c.truncate(keep);
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
    }

    pub fn coeff(&self, d: i32) -> ScalarFraction {
        let i = d - self.lo;
        if i < 0 {
            return ScalarFraction::zero();
        }
        self.c.get(i as usize).cloned().unwrap_or_default()
    }

    /// Polynomial in z (coefficients may involve other generators).
    pub fn from_poly(p: &LaurentPoly, top: i32) -> Self {
        let parts = p.split_by(Var::Z);
        let Some((&lo, _)) = parts.iter().next() else {
            return Self::zero(top);
        };
        let hi = *parts.keys().last().unwrap();
        let mut c = vec![ScalarFraction::zero(); (hi - lo + 1) as usize];
        for (k, v) in parts {
            c[(k - lo) as usize] = ScalarFraction::from_poly(v);
        }
        let mut s = ZSeries { lo, top, c };
        s.trim();
        s
    }

    pub fn mul(&self, o: &Self, top: i32) -> Self {
        let lo = self.lo + o.lo;
        let n = (top - lo + 1).max(0) as usize;
        let mut c = vec![ScalarFraction::zero(); n.min(self.c.len() + o.c.len())];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= c.len() {
                    break;
                }
                if !b.is_zero() {
                    c[i + j] = &c[i + j] + &(a * b);
                }
            }
        }
        let mut s = ZSeries { lo, top, c };
        s.trim();
        s
    }

    pub fn scale(&self, x: &ScalarFraction) -> Self {
        let mut s = ZSeries { lo: self.lo, top: self.top, c: self.c.iter().map(|c| c * x).collect() };
        s.trim();
        s
    }

    /// Multiplicative inverse; the lowest coefficient must be nonzero.
    pub fn inverse(&self, top: i32) -> Result<Self, Error> {
        let a0 = self.c.first().ok_or(Error::DivisionByZero)?;
        let inv0 = a0.recip()?.reduce();
        let lo = -self.lo;
        let n = (top - lo + 1).max(0) as usize;
        let mut b: Vec<ScalarFraction> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut s = ScalarFraction::zero();
            for i in 1..=k.min(self.c.len() - 1) {
                if !self.c[i].is_zero() && !b[k - i].is_zero() {
                    s = &s + &(&self.c[i] * &b[k - i]);
                }
            }
            b.push((-&(&s * &inv0)).reduce());
        }
        let mut s = ZSeries { lo, top, c: b };
        s.trim();
        Ok(s)
    }

    /// Geometric series `1/(1 − m)` for a monomial `m` of positive z-degree.
    fn geometric(coef: &ScalarFraction, zdeg: i32, top: i32) -> Self {
        debug_assert!(zdeg > 0);
        let mut c = vec![ScalarFraction::zero(); (top + 1).max(0) as usize];
        let mut p = ScalarFraction::one();
        let mut k = 0;
        while k * zdeg <= top {
            c[(k * zdeg) as usize] = p.clone();
            p = &p * coef;
            k += 1;
        }
        let mut s = ZSeries { lo: 0, top, c };
        s.trim();
        s
    }

    /// `1/Φ_d(M)` for a monomial M with positive z-degree.
    fn inv_cyclo_pos(d: u32, base: &Mono, top: i32) -> Self {
        let e = base.exp(Var::Z);
        let coef = base.with_exp(Var::Z, 0);
        // Φ_d(M) = ∏_{k|d} (M^k − 1)^{μ(d/k)}
        let mut acc = ZSeries::constant(ScalarFraction::one(), top);
        for k in crate::exactalg::factor::divisors(d) {
            let mu = moebius(d / k);
            if mu == 0 {
                continue;
            }
            let mk = ScalarFraction::mono(coef.pow(k as i32));
            let factor = if mu > 0 {
                // 1/(M^k − 1) = −1/(1 − M^k)
                ZSeries::geometric(&mk, e * k as i32, top).scale(&ScalarFraction::int(-1))
            } else {
                // (M^k − 1)
                let mut c = vec![ScalarFraction::zero(); (e * k as i32 + 1) as usize];
                c[0] = ScalarFraction::int(-1);
                c[(e * k as i32) as usize] = mk;
                let mut s = ZSeries { lo: 0, top, c };
                s.trim();
                s
            };
            acc = acc.mul(&factor, top);
        }
        acc
    }

    /// Lowest z-exponent contributed by `1/f` after expansion.
    fn inv_factor_lo(f: &Factor) -> i32 {
        match f {
            Factor::Cyclo { d, base } => {
                let e = base.exp(Var::Z);
                if e < 0 {
                    -e * totient(*d) as i32
                } else {
                    0
                }
            }
            Factor::Poly(p) => -p.min_exp(Var::Z),
        }
    }

    /// Expansion of `1/f` for a factor involving z, exact to degree `top`.
    fn inv_factor(f: &Factor, top: i32) -> Result<Self, Error> {
        match f {
            Factor::Cyclo { d, base } => {
                let e = base.exp(Var::Z);
                if e > 0 {
                    return Ok(Self::inv_cyclo_pos(*d, base, top));
                }
                // Φ_d(M) = s·M^{φ(d)}·Φ_d(M⁻¹), s = −1 for d = 1
                let phi = totient(*d) as i32;
                let inv = base.inv();
                let shift = inv.pow(phi);
                let sign = if *d == 1 { -1 } else { 1 };
                let zs = shift.exp(Var::Z);
                let head = ScalarFraction::mono(shift.with_exp(Var::Z, 0)).scale(&Rat::int(sign));
                let tail = Self::inv_cyclo_pos(*d, &inv, top - zs);
                let mut s = tail.scale(&head);
                s.lo += zs;
                s.top = top;
                s.trim();
                Ok(s)
            }
            Factor::Poly(p) => ZSeries::from_poly(p, i32::MAX / 4).inverse(top),
        }
    }

    /// Lower bound for the z-order of the expansion of `f`.
    pub fn lowest_degree(f: &ScalarFraction) -> i32 {
        let mut lo = if f.num().is_zero() { 0 } else { f.num().min_exp(Var::Z) };
        for (fac, &e) in f.den_factors() {
            if !fac.is_z_free(Var::Z) {
                lo += Self::inv_factor_lo(fac) * e as i32;
            }
        }
        lo
    }

    /// Expand a fraction in nonnegative and negative powers of z, exact to
    /// degree `top`. Denominator factors free of z stay in the coefficients.
    pub fn expand(f: &ScalarFraction, top: i32) -> Result<Self, Error> {
        let mut scalar_den: Vec<(Factor, u32)> = Vec::new();
        let mut zfactors: Vec<(&Factor, u32)> = Vec::new();
        for (fac, &e) in f.den_factors() {
            if fac.is_z_free(Var::Z) {
                scalar_den.push((fac.clone(), e));
            } else {
                zfactors.push((fac, e));
            }
        }
        let num_lo = if f.num().is_zero() { 0 } else { f.num().min_exp(Var::Z) };
        let mut total_lo = num_lo;
        for (fac, e) in &zfactors {
            total_lo += Self::inv_factor_lo(fac) * *e as i32;
        }
        if top < total_lo || f.is_zero() {
            return Ok(Self::zero(top));
        }
        let num = ZSeries::from_poly(f.num(), top - (total_lo - num_lo));
        let mut acc = num;
        for (fac, e) in &zfactors {
            let own = Self::inv_factor_lo(fac);
            for _ in 0..*e {
                let s = Self::inv_factor(fac, top - (total_lo - own))?;
                acc = acc.mul(&s, top);
            }
        }
        acc.top = top;
        if !scalar_den.is_empty() {
            let mut den = LaurentPoly::one();
            for (fac, e) in &scalar_den {
                den = &den * &fac.expand().pow(*e);
            }
            let inv = ScalarFraction::new(LaurentPoly::one(), &den)?;
            acc = acc.scale(&inv);
        }
        for x in acc.c.iter_mut() {
            *x = x.reduce();
        }
        acc.trim();
        Ok(acc)
    }

    /// Coefficients in degrees `0..=top`; fails if a negative degree survives.
    pub fn nonnegative(&self) -> Result<Vec<ScalarFraction>, Error> {
        let mut out = vec![ScalarFraction::zero(); (self.top + 1).max(0) as usize];
        for (i, x) in self.c.iter().enumerate() {
            let d = self.lo + i as i32;
            if x.is_zero() {
                continue;
            }
            if d < 0 {
                return Err(Error::Invalid(format!("expansion has a term of z-degree {d}")));
            }
            if d <= self.top {
                out[d as usize] = x.clone();
            }
        }
        Ok(out)
    }
}
