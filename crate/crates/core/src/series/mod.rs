//! Truncated Γ-graded series in `w^γ z^d` with fraction coefficients.

mod gamma;
pub mod zexp;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gamma::GammaExponent;

use crate::exactalg::factor::moebius;
use crate::exactalg::{Mono, Rat, ScalarFraction};
use crate::Error;

/// Default number of top z-degrees that must vanish for a polynomiality certificate.
pub const DEFAULT_TAIL_WINDOW: u32 = 5;

static DROPPED_BY_RESCALE: AtomicU64 = AtomicU64::new(0);

/// Count of terms dropped by z-overflow in [`GradedSeries::rescale_w`].
pub fn rescale_overflow_count() -> u64 {
    DROPPED_BY_RESCALE.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trunc {
    pub r_max: u32,
    pub z_max: u32,
}

/// Coefficients grouped by γ, then by z-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    trunc: Trunc,
    terms: BTreeMap<GammaExponent, BTreeMap<u32, ScalarFraction>>,
}

impl GradedSeries {
    pub fn zero(trunc: Trunc) -> Self {
        GradedSeries { trunc, terms: BTreeMap::new() }
    }

    pub fn one(trunc: Trunc) -> Self {
        let mut s = Self::zero(trunc);
        s.insert(GammaExponent::zero(), 0, ScalarFraction::one());
        s
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn in_range(&self, g: &GammaExponent, d: u32) -> bool {
        g.rank() <= self.trunc.r_max && d <= self.trunc.z_max
    }

    /// Adds `c` at `(γ, d)`; terms outside the truncation are dropped.
    pub fn add_term(&mut self, g: GammaExponent, d: u32, c: ScalarFraction) {
        if c.is_zero() || !self.in_range(&g, d) {
            return;
        }
        let row = self.terms.entry(g.clone()).or_default();
        let v = match row.remove(&d) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            row.insert(d, v);
        } else if row.is_empty() {
            self.terms.remove(&g);
        }
    }

    /// Sets the coefficient at `(γ, d)` (no-op for zero or out of range).
    pub fn insert(&mut self, g: GammaExponent, d: u32, c: ScalarFraction) {
        if c.is_zero() || !self.in_range(&g, d) {
            return;
        }
        self.terms.entry(g).or_default().insert(d, c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GammaExponent, u32, &ScalarFraction)> {
        self.terms.iter().flat_map(|(g, row)| row.iter().map(move |(d, c)| (g, *d, c)))
    }

    pub fn gammas(&self) -> impl Iterator<Item = &GammaExponent> {
        self.terms.keys()
    }

    pub fn row(&self, g: &GammaExponent) -> Option<&BTreeMap<u32, ScalarFraction>> {
        self.terms.get(g)
    }

    pub fn len(&self) -> usize {
        self.terms.values().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> ScalarFraction {
        self.terms.get(&GammaExponent::zero()).and_then(|r| r.get(&0)).cloned().unwrap_or_default()
    }

    /// Stored coefficient or zero; queries outside the truncation are errors.
    pub fn coefficient(&self, g: &GammaExponent, d: i64) -> Result<ScalarFraction, Error> {
        if g.rank() > self.trunc.r_max || d < 0 || d > self.trunc.z_max as i64 {
            return Err(Error::OutOfTruncation(format!(
                "w-rank {} z-degree {d} with r_max={} z_max={}",
                g.rank(),
                self.trunc.r_max,
                self.trunc.z_max
            )));
        }
        Ok(self.terms.get(g).and_then(|r| r.get(&(d as u32))).cloned().unwrap_or_default())
    }

    fn check(&self, o: &Self) -> Result<(), Error> {
        if self.trunc != o.trunc {
            return Err(Error::TruncationMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut out = self.clone();
        for (g, d, c) in o.iter() {
            out.add_term(g.clone(), d, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, Error> {
        self.add(&o.neg())
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarFraction) -> ScalarFraction) -> Self {
        let mut out = Self::zero(self.trunc);
        for (g, d, c) in self.iter() {
            out.insert(g.clone(), d, f(c));
        }
        out
    }

    pub fn scale(&self, x: &ScalarFraction) -> Self {
        self.map_coeffs(|c| (c * x).reduce())
    }

    pub fn reduce(&self) -> Self {
        self.map_coeffs(|c| c.reduce())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let t = self.trunc;
        let pairs: Vec<(&GammaExponent, &BTreeMap<u32, ScalarFraction>, &GammaExponent, &BTreeMap<u32, ScalarFraction>)> =
            self.terms
                .iter()
                .flat_map(|(ga, ra)| {
                    o.terms.iter().filter(move |(gb, _)| ga.rank() + gb.rank() <= t.r_max).map(move |(gb, rb)| (ga, ra, gb, rb))
                })
                .collect();
        let parts: Vec<(GammaExponent, BTreeMap<u32, ScalarFraction>)> = pairs
            .par_iter()
            .map(|(ga, ra, gb, rb)| {
                let mut row: BTreeMap<u32, ScalarFraction> = BTreeMap::new();
                for (da, ca) in ra.iter() {
                    for (db, cb) in rb.iter() {
                        let d = da + db;
                        if d > t.z_max {
                            break;
                        }
                        let p = ca * cb;
                        let e = row.entry(d).or_default();
                        *e = &*e + &p;
                    }
                }
                (ga.add(gb), row)
            })
            .collect();
        let mut acc: BTreeMap<GammaExponent, BTreeMap<u32, ScalarFraction>> = BTreeMap::new();
        for (g, row) in parts {
            let dst = acc.entry(g).or_default();
            for (d, c) in row {
                let e = dst.entry(d).or_default();
                *e = &*e + &c;
            }
        }
        Ok(Self::from_rows(t, acc, true))
    }

    fn from_rows(trunc: Trunc, rows: BTreeMap<GammaExponent, BTreeMap<u32, ScalarFraction>>, reduce: bool) -> Self {
        let reduced: Vec<(GammaExponent, BTreeMap<u32, ScalarFraction>)> = rows
            .into_par_iter()
            .map(|(g, row)| {
                let row: BTreeMap<u32, ScalarFraction> = row
                    .into_iter()
                    .map(|(d, c)| (d, if reduce { c.reduce() } else { c }))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                (g, row)
            })
            .filter(|(_, r)| !r.is_empty())
            .collect();
        GradedSeries { trunc, terms: reduced.into_iter().collect() }
    }

    /// Inverse of a series whose constant term is a nonzero fraction.
    pub fn invert_unit(&self) -> Result<Self, Error> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::BadConstantTerm("a unit".into()));
        }
        let inv0 = c0.recip()?.reduce();
        // A = c0·(1 − B) and 1/A = inv0·X with X = 1 + B·X
        let bterms: Vec<(GammaExponent, u32, ScalarFraction, u32)> = self
            .scale(&inv0)
            .iter()
            .filter(|(g, d, _)| !(g.rank() == 0 && *d == 0))
            .map(|(g, d, c)| (g.clone(), d, -c, Self::weight(g, d)))
            .collect();
        let t = self.trunc;
        let mut levels: BTreeMap<u32, Vec<(GammaExponent, u32, ScalarFraction)>> = BTreeMap::new();
        levels.insert(0, vec![(GammaExponent::zero(), 0, ScalarFraction::one())]);
        let mut out = Self::one(t);
        for w in 1..=(t.r_max + t.z_max) {
            let lvl = Self::finish_level(Self::level_products(&bterms, &levels, w, t), &Rat::ONE);
            for (g, d, c) in &lvl {
                out.insert(g.clone(), *d, c.clone());
            }
            levels.insert(w, lvl);
        }
        Ok(out.scale(&inv0))
    }

    /// Adams operation: `(γ, d, c) ↦ (nγ, nd, ψₙ c)`, overflow dropped.
    pub fn adams(&self, n: u32) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return self.clone();
        }
        let mut out = Self::zero(self.trunc);
        for (g, d, c) in self.iter() {
            if g.rank() * n > self.trunc.r_max || d * n > self.trunc.z_max {
                continue;
            }
            out.insert(g.scale(n), d * n, c.psi(n));
        }
        out
    }

    fn weight(g: &GammaExponent, d: u32) -> u32 {
        g.rank() + d
    }

    /// Ordinary exponential of a series with zero constant term, via the
    /// recursion `w·E_w = ∑ wt(s)·B_s·E_{w−wt(s)}` in the grading rank + zdeg.
    pub fn exp(&self) -> Result<Self, Error> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm("zero".into()));
        }
        let t = self.trunc;
        let bterms: Vec<(GammaExponent, u32, ScalarFraction, u32)> =
            self.iter().map(|(g, d, c)| (g.clone(), d, c.scale(&Rat::int(Self::weight(g, d) as i64)), Self::weight(g, d))).collect();
        let mut levels: BTreeMap<u32, Vec<(GammaExponent, u32, ScalarFraction)>> = BTreeMap::new();
        levels.insert(0, vec![(GammaExponent::zero(), 0, ScalarFraction::one())]);
        let mut out = Self::one(t);
        for w in 1..=(t.r_max + t.z_max) {
            let acc = Self::level_products(&bterms, &levels, w, t);
            let inv_w = Rat::new(1, w as i64);
            let lvl = Self::finish_level(acc, &inv_w);
            for (g, d, c) in &lvl {
                out.insert(g.clone(), *d, c.clone());
            }
            levels.insert(w, lvl);
        }
        Ok(out)
    }

    fn level_products(
        bterms: &[(GammaExponent, u32, ScalarFraction, u32)],
        levels: &BTreeMap<u32, Vec<(GammaExponent, u32, ScalarFraction)>>,
        w: u32,
        t: Trunc,
    ) -> BTreeMap<(GammaExponent, u32), ScalarFraction> {
        let mut acc: BTreeMap<(GammaExponent, u32), ScalarFraction> = BTreeMap::new();
        let jobs: Vec<_> = bterms.iter().filter(|b| b.3 <= w).filter_map(|b| levels.get(&(w - b.3)).map(|l| (b, l))).collect();
        let partial: Vec<Vec<((GammaExponent, u32), ScalarFraction)>> = jobs
            .par_iter()
            .map(|((gb, db, cb, _), prev)| {
                let mut v = Vec::new();
                for (gx, dx, cx) in prev.iter() {
                    let d = db + dx;
                    if gb.rank() + gx.rank() > t.r_max || d > t.z_max {
                        continue;
                    }
                    v.push(((gb.add(gx), d), cb * cx));
                }
                v
            })
            .collect();
        for v in partial {
            for (k, c) in v {
                let e = acc.entry(k).or_default();
                *e = &*e + &c;
            }
        }
        acc
    }

    fn finish_level(acc: BTreeMap<(GammaExponent, u32), ScalarFraction>, factor: &Rat) -> Vec<(GammaExponent, u32, ScalarFraction)> {
        acc.into_iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|((g, d), c)| (g, d, c.scale(factor).reduce()))
            .filter(|x| !x.2.is_zero())
            .collect()
    }

    /// Ordinary logarithm of a series with constant term 1, via
    /// `w·L_w = w·A_w − ∑_{u≠0} wt(s)·L_s·A_u`.
    pub fn log(&self) -> Result<Self, Error> {
        if self.constant_term() != ScalarFraction::one() {
            return Err(Error::BadConstantTerm("one".into()));
        }
        let t = self.trunc;
        let aterms: Vec<(GammaExponent, u32, ScalarFraction, u32)> = self
            .iter()
            .filter(|(g, d, _)| !(g.rank() == 0 && *d == 0))
            .map(|(g, d, c)| (g.clone(), d, c.clone(), Self::weight(g, d)))
            .collect();
        // levels hold wt(s)·L_s
        let mut levels: BTreeMap<u32, Vec<(GammaExponent, u32, ScalarFraction)>> = BTreeMap::new();
        let mut out = Self::zero(t);
        for w in 1..=(t.r_max + t.z_max) {
            let mut acc: BTreeMap<(GammaExponent, u32), ScalarFraction> =
                Self::level_products(&aterms, &levels, w, t).into_iter().map(|(k, c)| (k, -c)).collect();
            for (g, d, c, wa) in &aterms {
                if *wa == w {
                    let e = acc.entry((g.clone(), *d)).or_default();
                    *e = &*e + &c.scale(&Rat::int(w as i64));
                }
            }
            let weighted = Self::finish_level(acc, &Rat::ONE);
            let inv_w = Rat::new(1, w as i64);
            for (g, d, c) in &weighted {
                out.insert(g.clone(), *d, c.scale(&inv_w).reduce());
            }
            levels.insert(w, weighted);
        }
        Ok(out)
    }

    /// Plethystic exponential `exp(∑ ψₙ(A)/n)`.
    pub fn pleth_exp(&self) -> Result<Self, Error> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm("zero".into()));
        }
        let mut sum = Self::zero(self.trunc);
        let max_w = self.trunc.r_max + self.trunc.z_max;
        for n in 1..=max_w.max(1) {
            let a = self.adams(n);
            if a.is_zero() {
                continue;
            }
            sum = sum.add(&a.scale(&ScalarFraction::rat(Rat::new(1, n as i64))))?;
        }
        sum.exp()
    }

    /// Plethystic logarithm `∑ μ(n)/n · ψₙ(log A)`.
    pub fn pleth_log(&self) -> Result<Self, Error> {
        let l = self.log()?;
        let mut sum = Self::zero(self.trunc);
        let max_w = self.trunc.r_max + self.trunc.z_max;
        for n in 1..=max_w.max(1) {
            let mu = moebius(n);
            if mu == 0 {
                continue;
            }
            let a = l.adams(n);
            if a.is_zero() {
                continue;
            }
            sum = sum.add(&a.scale(&ScalarFraction::rat(Rat::new(mu as i64, n as i64))))?;
        }
        Ok(sum)
    }

    /// `Exp(A · Log f)`.
    pub fn power_structure(&self, a: &ScalarFraction) -> Result<Self, Error> {
        self.pleth_log()?.scale(a).pleth_exp()
    }

    /// Multiplies the coefficient at w^γ by `c^{rk γ}` and shifts its z-degree by `k·rk γ`.
    pub fn rescale_w(&self, c: &Mono, coef: &Rat, k: i32) -> Self {
        let mut out = Self::zero(self.trunc);
        for (g, d, x) in self.iter() {
            let r = g.rank() as i32;
            let nd = d as i64 + (k * r) as i64;
            if nd < 0 || nd > self.trunc.z_max as i64 {
                DROPPED_BY_RESCALE.fetch_add(1, Ordering::Relaxed);
                continue;
            }
            out.insert(g.clone(), nd as u32, x.mul_mono(&c.pow(r)).scale(&coef.pow(r)));
        }
        out
    }

    pub fn filter(&self, pred: impl Fn(&GammaExponent, u32) -> bool) -> Self {
        let mut out = Self::zero(self.trunc);
        for (g, d, c) in self.iter() {
            if pred(g, d) {
                out.insert(g.clone(), d, c.clone());
            }
        }
        out
    }

    /// Multiplies by the polynomial `∑ cᵢ zⁱ` (truncating).
    pub fn mul_zpoly(&self, p: &[(u32, Rat)]) -> Self {
        let mut out = Self::zero(self.trunc);
        for (g, d, c) in self.iter() {
            for (k, a) in p {
                out.add_term(g.clone(), d + k, c.scale(a));
            }
        }
        out.reduce()
    }

    /// Sum of z-coefficients per γ, after checking that the top `window + 1`
    /// z-degrees vanish.
    pub fn eval_z_one(&self, window: u32) -> Result<BTreeMap<GammaExponent, ScalarFraction>, Error> {
        let lo = self.trunc.z_max.saturating_sub(window);
        let mut out = BTreeMap::new();
        for (g, row) in &self.terms {
            if row.range(lo..).next().is_some() {
                return Err(Error::Certificate(format!("{g}")));
            }
            let mut s = ScalarFraction::zero();
            for c in row.values() {
                s = &s + c;
            }
            out.insert(g.clone(), s.reduce());
        }
        Ok(out)
    }

    /// Truncates to a smaller window (coefficients are unaffected).
    pub fn retruncate(&self, trunc: Trunc) -> Self {
        let mut out = Self::zero(trunc);
        for (g, d, c) in self.iter() {
            out.insert(g.clone(), d, c.clone());
        }
        out
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            trunc: self.trunc,
            terms: self.iter().map(|(g, d, c)| TermJson { gamma: g.clone(), zdeg: d, coeff: c.reduce().to_string() }).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self, Error> {
        let mut s = Self::zero(j.trunc);
        for t in &j.terms {
            let c: ScalarFraction = t.coeff.parse()?;
            if !s.in_range(&t.gamma, t.zdeg) {
                return Err(Error::OutOfTruncation(format!("{} z^{}", t.gamma, t.zdeg)));
            }
            s.add_term(t.gamma.clone(), t.zdeg, c);
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub gamma: GammaExponent,
    pub zdeg: u32,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub trunc: Trunc,
    pub terms: Vec<TermJson>,
}
