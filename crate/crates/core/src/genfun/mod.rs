//! Universal generating functions, their DT kernels, and the z=1 comparison.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactalg::{LaurentPoly, Mono, Rat, ScalarFraction, Var, MAX_GENUS};
use crate::partition::{enumerate_partitions, Partition};
use crate::series::zexp::ZSeries;
use crate::series::{GammaExponent, GradedSeries, Trunc};
use crate::symfunc::hhl_modified_macdonald;
use crate::Error;

/// Largest partition length accepted by [`f_mu`].
pub const MAX_F_LENGTH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenFunParams {
    pub g: u32,
    /// Point ids of the support D.
    pub points: Vec<u32>,
    pub delta: u32,
    pub trunc: Trunc,
    /// Number of flag slots per point used when enumerating exponents.
    pub flags: u32,
}

impl GenFunParams {
    pub fn new(g: u32, points: Vec<u32>, delta: u32, trunc: Trunc) -> Result<Self, Error> {
        if g as usize > MAX_GENUS {
            return Err(Error::Resource(format!("genus {g} exceeds {MAX_GENUS}")));
        }
        if trunc.r_max == 0 && trunc.z_max == 0 {
            return Err(Error::Invalid("empty truncation".into()));
        }
        let mut pts = points;
        pts.sort_unstable();
        pts.dedup();
        Ok(GenFunParams { g, points: pts, delta, trunc, flags: trunc.r_max.max(1) })
    }

    /// Genus 0 lies outside the range where the comparison theorem is asserted.
    pub fn experimental(&self) -> bool {
        self.g == 0
    }

    /// All exponents over the support up to the rank bound.
    pub fn gammas(&self) -> Vec<GammaExponent> {
        (0..=self.trunc.r_max).flat_map(|r| GammaExponent::all_of_rank(r, &self.points, self.flags)).collect()
    }
}

/// Which generating function a per-partition term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Univ,
    Hlv,
    Sch,
}

fn q() -> Mono {
    Mono::var(Var::Qh, 2)
}

fn zm(k: i32) -> Mono {
    Mono::var(Var::Z, k)
}

fn alpha(i: u32) -> Mono {
    Mono::var(Var::Alpha(i as u8), 1)
}

/// The 2g roots `α₁…α_g, qα₁⁻¹…qα_g⁻¹`.
pub fn alpha_roots(g: u32) -> Vec<Mono> {
    let mut v: Vec<Mono> = (1..=g).map(alpha).collect();
    v.extend((1..=g).map(|i| q().mul(&alpha(i).inv())));
    v
}

/// `∏ (1 − αᵢ·x)` over the 2g roots, for a monomial argument x.
pub fn l_univ_at(g: u32, x: &Mono) -> LaurentPoly {
    let mut acc = LaurentPoly::one();
    for a in alpha_roots(g) {
        acc = &acc * &LaurentPoly::from_terms(vec![(Mono::ONE, Rat::ONE), (a.mul(x), Rat::int(-1))]);
    }
    acc
}

/// `L(z) = ∏ (1 − αᵢ z)`.
pub fn l_univ(g: u32) -> LaurentPoly {
    l_univ_at(g, &zm(1))
}

fn binom(a: Mono, ca: i64, b: Mono, cb: i64) -> LaurentPoly {
    LaurentPoly::from_terms(vec![(a, Rat::int(ca)), (b, Rat::int(cb))])
}

/// `N_μ(u; z, q) = ∏_□ (z^a − u q^{1+l})(z^{a+1} − u⁻¹ q^l)` for a monomial u.
pub fn n_mu(mu: &Partition, u: &Mono) -> LaurentPoly {
    let mut acc = LaurentPoly::one();
    for c in mu.cells() {
        let (a, l) = (c.arm as i32, c.leg as i32);
        acc = &acc * &binom(zm(a), 1, u.mul(&q().pow(1 + l)), -1);
        acc = &acc * &binom(zm(a + 1), 1, u.inv().mul(&q().pow(l)), -1);
    }
    acc
}

fn signed_qh(power: i64) -> ScalarFraction {
    // (−qh)^power
    let s = if power % 2 == 0 { 1 } else { -1 };
    ScalarFraction::mono(Mono::var(Var::Qh, power as i32)).scale(&Rat::int(s))
}

/// The symmetrized rational function evaluated at `zᵢ(μ) = q^{−ℓ+i} z^{μᵢ}`.
pub fn f_mu(mu: &Partition, g: u32) -> Result<ScalarFraction, Error> {
    let n = mu.len();
    if n > MAX_F_LENGTH {
        return Err(Error::Resource(format!("partition length {n} exceeds {MAX_F_LENGTH}")));
    }
    if n == 0 {
        return Ok(ScalarFraction::one());
    }
    let zs: Vec<Mono> = (1..=n).map(|i| q().pow(i as i32 - n as i32).mul(&zm(mu.part(i) as i32))).collect();
    let one = Mono::ONE;
    let ainv: Vec<Mono> = (1..=g).map(|k| alpha(k).inv()).collect();

    let mut prefactor = ScalarFraction::one();
    for zi in &zs {
        for a in &ainv {
            let num = binom(one, 1, *a, -1);
            let den = binom(one, 1, a.mul(zi), -1);
            prefactor = &prefactor * &ScalarFraction::new(num, &den)?;
        }
    }

    // sum over permutations of the evaluated summand
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = ScalarFraction::zero();
    loop {
        let x: Vec<Mono> = perm.iter().map(|&p| zs[p]).collect();
        let mut term = ScalarFraction::one();
        for i in 0..n {
            for j in 0..i {
                let ratio = x[i].div(&x[j]);
                term = term.div_by_poly(&binom(one, 1, ratio, -1));
                for a in &ainv {
                    let num = binom(one, 1, a.mul(&ratio), -1);
                    let den = binom(one, 1, q().mul(a).mul(&ratio), -1);
                    term = (&term * &ScalarFraction::from_poly(num)).div_by_poly(&den);
                }
                if i > j + 1 {
                    term = term.mul_poly(&binom(one, 1, q().mul(&ratio), -1));
                }
            }
            if i >= 1 {
                term = term.mul_poly(&binom(one, 1, x[i], -1));
            }
        }
        total = &total + &term;
        if !next_perm(&mut perm) {
            break;
        }
    }
    Ok((&prefactor * &total.reduce()).reduce())
}

fn next_perm(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The part of a per-partition term that does not involve the w-variables,
/// as a list of simple factors whose product is the term.
pub fn mu_scalar_factors(family: Family, mu: &Partition, g: u32, delta: u32) -> Result<Vec<ScalarFraction>, Error> {
    let size = mu.size() as i64;
    let pair = mu.pairing(mu) as i64;
    let d = delta as i64;
    let mut out = Vec::new();
    match family {
        Family::Univ => {
            out.push(signed_qh((2 * g as i64 + d) * pair));
            out.push(ScalarFraction::mono(zm((2 * d * mu.conjugate().n() as i64) as i32)));
            for c in mu.cells() {
                let (a, l) = (c.arm as i32, c.leg as i32);
                let arg = zm(2 * a + 1).mul(&q().pow(-l - 1));
                out.push(ScalarFraction::from_poly(l_univ_at(g, &arg)));
                out.push(ScalarFraction::new(LaurentPoly::one(), &binom(zm(2 * a + 2), 1, q().pow(l), -1))?);
                out.push(ScalarFraction::new(LaurentPoly::one(), &binom(zm(2 * a), 1, q().pow(l + 1), -1))?);
            }
        }
        Family::Hlv | Family::Sch => {
            if family == Family::Hlv {
                let s = if (d * size) % 2 == 0 { 1 } else { -1 };
                out.push(ScalarFraction::mono(q().pow((d * mu.n() as i64) as i32)).scale(&Rat::int(s)));
            } else {
                out.push(signed_qh(d * pair));
                out.push(f_mu(mu, g)?);
            }
            out.push(ScalarFraction::mono(zm((d * mu.conjugate().n() as i64) as i32)));
            for c in mu.cells() {
                let (a, l) = (c.arm as i32, c.leg as i32);
                for i in 1..=g {
                    let u = alpha(i).inv();
                    out.push(ScalarFraction::from_poly(binom(zm(a), 1, u.mul(&q().pow(1 + l)), -1)));
                    out.push(ScalarFraction::from_poly(binom(zm(a + 1), 1, u.inv().mul(&q().pow(l)), -1)));
                }
                out.push(ScalarFraction::new(LaurentPoly::one(), &binom(zm(a), 1, q().pow(1 + l), -1))?);
                out.push(ScalarFraction::new(LaurentPoly::one(), &binom(zm(a + 1), 1, q().pow(l), -1))?);
            }
        }
    }
    Ok(out)
}

/// Product of [`mu_scalar_factors`] as a single fraction.
pub fn mu_scalar(family: Family, mu: &Partition, g: u32, delta: u32) -> Result<ScalarFraction, Error> {
    let mut acc = ScalarFraction::one();
    for f in mu_scalar_factors(family, mu, g, delta)? {
        acc = &acc * &f;
    }
    Ok(acc.reduce())
}

/// Coefficient of `w^γ` in `∏_x H̃_μ(w_{x,•}; ·, q)`, a polynomial in z and qh.
pub fn h_coefficient(family: Family, mu: &Partition, gamma: &GammaExponent, points: &[u32]) -> Result<LaurentPoly, Error> {
    let first = match family {
        Family::Univ => zm(2),
        _ => zm(1),
    };
    h_coefficient_at(mu, gamma, points, &first, &q())
}

/// Coefficient of `w^γ` in `∏_x H̃_μ(w_{x,•}; first, second)`.
pub fn h_coefficient_at(mu: &Partition, gamma: &GammaExponent, points: &[u32], first: &Mono, second: &Mono) -> Result<LaurentPoly, Error> {
    if gamma.rank() != mu.size() || !gamma.lies_over(points) && !(points.is_empty() && gamma.parts().is_empty()) {
        return Ok(LaurentPoly::zero());
    }
    let h = hhl_modified_macdonald(mu)?;
    let mut acc = LaurentPoly::one();
    for &x in points {
        let c = h.m_coefficient(&gamma.point_vector(x));
        if c.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        acc = &acc * &c.eval(first, second);
    }
    Ok(acc)
}

/// Full per-partition coefficient at `w^γ` as a rational function of z.
pub fn mu_term(family: Family, mu: &Partition, g: u32, delta: u32, gamma: &GammaExponent, points: &[u32]) -> Result<ScalarFraction, Error> {
    let h = h_coefficient(family, mu, gamma, points)?;
    Ok(mu_scalar(family, mu, g, delta)?.mul_poly(&h).reduce())
}

fn expand_scalar(factors: &[ScalarFraction], top: i32) -> Result<ZSeries, Error> {
    let los: Vec<i32> = factors.iter().map(ZSeries::lowest_degree).collect();
    let total: i32 = los.iter().sum();
    let mut acc = ZSeries::constant(ScalarFraction::one(), top);
    for (f, own) in factors.iter().zip(&los) {
        acc = acc.mul(&ZSeries::expand(f, top - (total - own))?, top);
    }
    Ok(acc)
}

/// Per-partition data of a generating function: the w-free factors and the
/// two arguments at which the Macdonald polynomials are evaluated.
pub struct TermShape {
    pub factors: Vec<ScalarFraction>,
    pub first: Mono,
    pub second: Mono,
}

fn shape_of(family: Family, mu: &Partition, g: u32, delta: u32) -> Result<TermShape, Error> {
    let first = if family == Family::Univ { zm(2) } else { zm(1) };
    Ok(TermShape { factors: mu_scalar_factors(family, mu, g, delta)?, first, second: q() })
}

fn mu_rows(shape: &TermShape, mu: &Partition, p: &GenFunParams, gammas: &[GammaExponent]) -> Result<Vec<(GammaExponent, Vec<ScalarFraction>)>, Error> {
    let top = p.trunc.z_max as i32;
    let scalar = expand_scalar(&shape.factors, top)?;
    let mut out = Vec::new();
    for gmm in gammas.iter().filter(|gm| gm.rank() == mu.size()) {
        let h = h_coefficient_at(mu, gmm, &p.points, &shape.first, &shape.second)?;
        if h.is_zero() {
            continue;
        }
        let prod = scalar.mul(&ZSeries::from_poly(&h, top), top);
        let coeffs: Vec<ScalarFraction> = prod.nonnegative()?.into_iter().map(|c| c.reduce()).collect();
        out.push((gmm.clone(), coeffs));
    }
    Ok(out)
}

fn assemble(p: &GenFunParams, parts: Vec<Vec<(GammaExponent, Vec<ScalarFraction>)>>) -> GradedSeries {
    let mut s = GradedSeries::zero(p.trunc);
    for part in parts {
        for (g, coeffs) in part {
            for (d, c) in coeffs.into_iter().enumerate() {
                s.add_term(g.clone(), d as u32, c);
            }
        }
    }
    s.reduce()
}

/// Generating function `∑_μ (term shape of μ)·∏_x H̃_μ`, truncated and
/// expanded in nonnegative powers of z.
pub fn omega_with(p: &GenFunParams, shape: impl Fn(&Partition) -> Result<TermShape, Error> + Sync) -> Result<GradedSeries, Error> {
    let gammas = p.gammas();
    let mus: Vec<Partition> = enumerate_partitions(p.trunc.r_max);
    let parts = mus.par_iter().map(|mu| mu_rows(&shape(mu)?, mu, p, &gammas)).collect::<Result<Vec<_>, Error>>()?;
    Ok(assemble(p, parts))
}

/// One generating function, truncated and expanded in nonnegative powers of z.
pub fn omega(family: Family, p: &GenFunParams) -> Result<GradedSeries, Error> {
    omega_with(p, |mu| shape_of(family, mu, p.g, p.delta))
}

/// The single-partition summand of a generating function.
pub fn omega_term(family: Family, p: &GenFunParams, mu: &Partition) -> Result<GradedSeries, Error> {
    if mu.size() > p.trunc.r_max {
        return Err(Error::OutOfTruncation(format!("|μ|={} exceeds r_max={}", mu.size(), p.trunc.r_max)));
    }
    let rows = mu_rows(&shape_of(family, mu, p.g, p.delta)?, mu, p, &p.gammas())?;
    Ok(assemble(p, vec![rows]))
}

pub fn omega_univ(p: &GenFunParams) -> Result<GradedSeries, Error> {
    omega(Family::Univ, p)
}

pub fn omega_hlv(p: &GenFunParams) -> Result<GradedSeries, Error> {
    omega(Family::Hlv, p)
}

pub fn omega_sch(p: &GenFunParams) -> Result<GradedSeries, Error> {
    omega(Family::Sch, p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernels {
    /// `(1 − z²) Log Ω^univ`.
    pub h_univ: GradedSeries,
    /// `(1 − z) Log Ω^Sch`.
    pub h_sch: GradedSeries,
}

fn kernel_memo() -> &'static Mutex<HashMap<GenFunParams, Arc<Kernels>>> {
    static M: OnceLock<Mutex<HashMap<GenFunParams, Arc<Kernels>>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn dt_kernels_uncached(p: &GenFunParams) -> Result<Kernels, Error> {
    let (u, s) = rayon::join(|| omega_univ(p), || omega_sch(p));
    let h_univ = u?.pleth_log()?.mul_zpoly(&[(0, Rat::ONE), (2, Rat::int(-1))]);
    let h_sch = s?.pleth_log()?.mul_zpoly(&[(0, Rat::ONE), (1, Rat::int(-1))]);
    Ok(Kernels { h_univ, h_sch })
}

/// Both kernels, memoized per parameter set.
pub fn dt_kernels(p: &GenFunParams) -> Result<Arc<Kernels>, Error> {
    if let Some(k) = kernel_memo().lock().unwrap().get(p) {
        return Ok(k.clone());
    }
    let k = Arc::new(dt_kernels_uncached(p)?);
    kernel_memo().lock().unwrap().insert(p.clone(), k.clone());
    Ok(k)
}

/// Seeds the in-process memo (used when kernels are loaded from disk).
pub fn install_kernels(p: &GenFunParams, k: Kernels) -> Arc<Kernels> {
    let k = Arc::new(k);
    kernel_memo().lock().unwrap().insert(p.clone(), k.clone());
    k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Equal,
    Unequal,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GammaReport {
    pub gamma: GammaExponent,
    pub status: Status,
    pub univ: Option<String>,
    pub sch: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MellitReport {
    pub params: GenFunParams,
    pub window: u32,
    pub experimental: bool,
    pub entries: Vec<GammaReport>,
}

impl MellitReport {
    pub fn all_equal(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Equal)
    }

    pub fn any_unequal(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Unequal)
    }
}

fn z_one_row(s: &GradedSeries, g: &GammaExponent, window: u32) -> Option<ScalarFraction> {
    let lo = s.trunc().z_max.saturating_sub(window);
    match s.row(g) {
        None => Some(ScalarFraction::zero()),
        Some(row) => {
            if row.range(lo..).next().is_some() {
                return None;
            }
            let mut acc = ScalarFraction::zero();
            for c in row.values() {
                acc = &acc + c;
            }
            Some(acc.reduce())
        }
    }
}

/// Compares both kernels at z=1 for every exponent up to the rank bound.
pub fn check_mellit(p: &GenFunParams, window: u32) -> Result<MellitReport, Error> {
    let k = dt_kernels(p)?;
    Ok(compare_kernels(p, &k, window))
}

pub fn compare_kernels(p: &GenFunParams, k: &Kernels, window: u32) -> MellitReport {
    let mut entries = Vec::new();
    for g in p.gammas() {
        if g.rank() == 0 {
            continue;
        }
        let a = z_one_row(&k.h_univ, &g, window);
        let b = z_one_row(&k.h_sch, &g, window);
        let status = match (&a, &b) {
            (Some(x), Some(y)) if x == y => Status::Equal,
            (Some(_), Some(_)) => Status::Unequal,
            _ => Status::Inconclusive,
        };
        entries.push(GammaReport {
            gamma: g,
            status,
            univ: a.map(|x| x.to_string()),
            sch: b.map(|x| x.to_string()),
        });
    }
    MellitReport { params: p.clone(), window, experimental: p.experimental(), entries }
}

/// z=1 values of the univ kernel, keyed by γ.
pub fn kernel_at_one(k: &GradedSeries, window: u32) -> Result<BTreeMap<GammaExponent, ScalarFraction>, Error> {
    k.eval_z_one(window)
}
