//! Numerical shadows of the moduli problem: divisors, normal forms, weights,
//! Euler characteristics, and the drivers that read stack classes off the
//! DT kernels.

mod drivers;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exactalg::Rat;
use crate::series::GammaExponent;
use crate::Error;

pub use drivers::*;

/// Pole orders at one point: `n` for 𝒟 and `n_fixed` for 𝒟′.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointOrder {
    pub n: u32,
    pub n_fixed: u32,
}

/// The pair of divisors `𝒟′ ≤ 𝒟`, keyed by point id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<u32, PointOrder>", into = "BTreeMap<u32, PointOrder>")]
pub struct DivisorSpec {
    points: BTreeMap<u32, PointOrder>,
}

impl TryFrom<BTreeMap<u32, PointOrder>> for DivisorSpec {
    type Error = Error;
    fn try_from(points: BTreeMap<u32, PointOrder>) -> Result<Self, Error> {
        DivisorSpec::new(points)
    }
}

impl From<DivisorSpec> for BTreeMap<u32, PointOrder> {
    fn from(d: DivisorSpec) -> Self {
        d.points
    }
}

impl DivisorSpec {
    pub fn new(points: BTreeMap<u32, PointOrder>) -> Result<Self, Error> {
        for (x, o) in &points {
            if o.n == 0 {
                return Err(Error::Invalid(format!("pole order at point {x} must be positive")));
            }
            if o.n_fixed > o.n {
                return Err(Error::Invalid(format!("fixed order {} exceeds pole order {} at point {x}", o.n_fixed, o.n)));
            }
        }
        Ok(DivisorSpec { points })
    }

    /// `𝒟′ = 𝒟` with the given pole orders.
    pub fn full(orders: &[(u32, u32)]) -> Result<Self, Error> {
        Self::new(orders.iter().map(|&(x, n)| (x, PointOrder { n, n_fixed: n })).collect())
    }

    /// Parses entries of the form `x:n` or `x:n:n′`.
    pub fn parse(entries: &[&str]) -> Result<Self, Error> {
        let mut points = BTreeMap::new();
        for e in entries {
            let fields: Vec<&str> = e.split(':').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::Parse(format!("divisor entry `{e}` is not x:n or x:n:n'")));
            }
            let num = |s: &str| s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad number `{s}` in divisor entry `{e}`")));
            let x = num(fields[0])?;
            let n = num(fields[1])?;
            let n_fixed = if fields.len() == 3 { num(fields[2])? } else { n };
            if points.insert(x, PointOrder { n, n_fixed }).is_some() {
                return Err(Error::Parse(format!("point {x} listed twice")));
            }
        }
        Self::new(points)
    }

    pub fn orders(&self) -> &BTreeMap<u32, PointOrder> {
        &self.points
    }

    pub fn n(&self, x: u32) -> u32 {
        self.points.get(&x).map_or(0, |o| o.n)
    }

    pub fn n_fixed(&self, x: u32) -> u32 {
        self.points.get(&x).map_or(0, |o| o.n_fixed)
    }

    /// Support D of 𝒟.
    pub fn support(&self) -> Vec<u32> {
        self.points.keys().copied().collect()
    }

    /// Support D′ of 𝒟′.
    pub fn fixed_support(&self) -> Vec<u32> {
        self.points.iter().filter(|(_, o)| o.n_fixed > 0).map(|(x, _)| *x).collect()
    }

    pub fn degree(&self) -> u32 {
        self.points.values().map(|o| o.n).sum()
    }

    pub fn fixed_degree(&self) -> u32 {
        self.points.values().map(|o| o.n_fixed).sum()
    }

    pub fn is_fully_fixed(&self) -> bool {
        self.points.values().all(|o| o.n_fixed == o.n)
    }

    /// `deg 𝒟 − |D′|`, which is `deg 𝒟 − |D|` when 𝒟′ = 𝒟.
    pub fn delta(&self) -> u32 {
        self.degree() - self.fixed_support().len() as u32
    }
}

#[derive(Serialize, Deserialize)]
pub struct FlagEntry<T> {
    x: u32,
    j: u32,
    value: T,
}

fn to_entries<T: Clone>(m: &BTreeMap<(u32, u32), T>) -> Vec<FlagEntry<T>> {
    m.iter().map(|(&(x, j), v)| FlagEntry { x, j, value: v.clone() }).collect()
}

fn from_entries<T>(v: Vec<FlagEntry<T>>) -> Result<BTreeMap<(u32, u32), T>, Error> {
    let mut m = BTreeMap::new();
    for e in v {
        if e.j == 0 {
            return Err(Error::Invalid("flag indices start at 1".into()));
        }
        if m.insert((e.x, e.j), e.value).is_some() {
            return Err(Error::Invalid(format!("entry ({},{}) listed twice", e.x, e.j)));
        }
    }
    Ok(m)
}

/// Polar parts per `(point, flag)`, deepest pole coefficient first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FlagEntry<Vec<Rat>>>", into = "Vec<FlagEntry<Vec<Rat>>>")]
pub struct NormalForm {
    pub entries: BTreeMap<(u32, u32), Vec<Rat>>,
}

impl NormalForm {
    pub fn new(entries: impl IntoIterator<Item = ((u32, u32), Vec<Rat>)>) -> Self {
        NormalForm { entries: entries.into_iter().collect() }
    }

    /// Checks that every vector has length `n′_x`.
    pub fn validate(&self, divisor: &DivisorSpec) -> Result<(), Error> {
        for (&(x, j), v) in &self.entries {
            let want = divisor.n_fixed(x) as usize;
            if v.len() != want {
                return Err(Error::Invalid(format!("normal form at ({x},{j}) has {} coefficients, expected {want}", v.len())));
            }
        }
        Ok(())
    }

    fn entry(&self, x: u32, j: u32) -> Result<&Vec<Rat>, Error> {
        self.entries.get(&(x, j)).ok_or_else(|| Error::Invalid(format!("normal form has no entry at ({x},{j})")))
    }

    /// Coefficient of the deepest pole.
    pub fn top(&self, x: u32, j: u32) -> Result<Rat, Error> {
        self.entry(x, j)?.first().cloned().ok_or_else(|| Error::Invalid(format!("normal form at ({x},{j}) is empty")))
    }

    /// Order-1 coefficient; defined only when the full polar part is fixed.
    pub fn residue(&self, x: u32, j: u32, divisor: &DivisorSpec) -> Result<Rat, Error> {
        let v = self.entry(x, j)?;
        if divisor.n_fixed(x) != divisor.n(x) || v.len() != divisor.n(x) as usize {
            return Err(Error::Invalid(format!("residue at ({x},{j}) is undefined for a partially fixed normal form")));
        }
        Ok(v.last().cloned().unwrap_or(Rat::ZERO))
    }
}

impl TryFrom<Vec<FlagEntry<Vec<Rat>>>> for NormalForm {
    type Error = Error;
    fn try_from(v: Vec<FlagEntry<Vec<Rat>>>) -> Result<Self, Error> {
        Ok(NormalForm { entries: from_entries(v)? })
    }
}

impl From<NormalForm> for Vec<FlagEntry<Vec<Rat>>> {
    fn from(n: NormalForm) -> Self {
        to_entries(&n.entries)
    }
}

/// Parabolic weights per `(point, flag)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FlagEntry<Rat>>", into = "Vec<FlagEntry<Rat>>")]
pub struct Weights {
    pub entries: BTreeMap<(u32, u32), Rat>,
}

impl Weights {
    pub fn new(entries: impl IntoIterator<Item = ((u32, u32), Rat)>) -> Self {
        Weights { entries: entries.into_iter().collect() }
    }

    pub fn get(&self, x: u32, j: u32) -> Option<&Rat> {
        self.entries.get(&(x, j))
    }

    /// Nondecreasing in the flag index and within `n′_x` of the first weight.
    pub fn validate(&self, divisor: &DivisorSpec) -> Result<(), Error> {
        let mut by_point: BTreeMap<u32, Vec<(u32, &Rat)>> = BTreeMap::new();
        for (&(x, j), s) in &self.entries {
            by_point.entry(x).or_default().push((j, s));
        }
        for (x, v) in by_point {
            let bound = Rat::int(divisor.n_fixed(x) as i64);
            for w in v.windows(2) {
                if w[1].1 < w[0].1 {
                    return Err(Error::Invalid(format!("weights at point {x} decrease between flags {} and {}", w[0].0, w[1].0)));
                }
            }
            if let Some(first) = self.get(x, 1) {
                let cap = first + &bound;
                if let Some((j, _)) = v.iter().find(|(_, s)| **s > cap) {
                    return Err(Error::Invalid(format!("weight ({x},{j}) exceeds the first weight plus {bound}")));
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<FlagEntry<Rat>>> for Weights {
    type Error = Error;
    fn try_from(v: Vec<FlagEntry<Rat>>) -> Result<Self, Error> {
        Ok(Weights { entries: from_entries(v)? })
    }
}

impl From<Weights> for Vec<FlagEntry<Rat>> {
    fn from(w: Weights) -> Self {
        to_entries(&w.entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    /// All ε-connections with fully fixed normal forms (ε ≠ 0).
    Full,
    /// σ-semistable locus with fully fixed normal forms.
    SemistableFull,
    /// σ-semistable locus with partially fixed normal forms, 𝒟′ < 𝒟.
    SemistablePartial,
    /// Connections on HN-nonpositive bundles with partially fixed normal forms.
    NonpositiveGraded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackQuery {
    pub g: u32,
    pub divisor: DivisorSpec,
    pub gamma: GammaExponent,
    pub d: i64,
    pub eps: Rat,
    #[serde(default)]
    pub zeta: NormalForm,
    #[serde(default)]
    pub sigma: Option<Weights>,
    pub kind: QueryKind,
}

impl StackQuery {
    /// Checks the invariants that do not depend on truncation.
    pub fn validate(&self) -> Result<(), Error> {
        self.zeta.validate(&self.divisor)?;
        if let Some(s) = &self.sigma {
            s.validate(&self.divisor)?;
        }
        let over = match self.kind {
            QueryKind::Full | QueryKind::SemistableFull => self.divisor.support(),
            _ => self.divisor.fixed_support(),
        };
        if self.gamma.rank() > 0 && !self.gamma.lies_over(&over) {
            return Err(Error::Invalid(format!("class {} does not lie over the points {over:?}", self.gamma)));
        }
        match self.kind {
            QueryKind::Full => {
                if self.eps.is_zero() {
                    return Err(Error::Invalid("kind `full` needs ε ≠ 0".into()));
                }
                if !self.divisor.is_fully_fixed() {
                    return Err(Error::Invalid("kind `full` needs fully fixed normal forms".into()));
                }
            }
            QueryKind::SemistableFull => {
                if !self.divisor.is_fully_fixed() {
                    return Err(Error::Invalid("kind `semistable-full` needs fully fixed normal forms".into()));
                }
                if self.sigma.is_none() {
                    return Err(Error::Invalid("semistable queries need weights".into()));
                }
            }
            QueryKind::SemistablePartial => {
                if self.divisor.is_fully_fixed() {
                    return Err(Error::Invalid("kind `semistable-partial` needs 𝒟′ < 𝒟".into()));
                }
                if self.sigma.is_none() {
                    return Err(Error::Invalid("semistable queries need weights".into()));
                }
            }
            QueryKind::NonpositiveGraded => {
                if self.d > 0 {
                    return Err(Error::Invalid("nonpositive-graded queries need d ≤ 0".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPredicates {
    pub full_at: BTreeSet<u32>,
    pub nonresonant_at: BTreeSet<u32>,
    pub admissible: bool,
}

fn flags_at(gamma: &GammaExponent, x: u32) -> Vec<(u32, u32)> {
    gamma.parts().range((x, 0)..=(x, u32::MAX)).map(|(k, m)| (k.1, *m)).collect()
}

/// Fullness and non-resonance per point, and membership in `Γ_{𝒟′,ζ}`.
pub fn class_predicates(gamma: &GammaExponent, divisor: &DivisorSpec, zeta: &NormalForm) -> Result<ClassPredicates, Error> {
    let mut full_at = BTreeSet::new();
    let mut nonresonant_at = BTreeSet::new();
    for x in gamma.points() {
        let flags = flags_at(gamma, x);
        if flags.iter().all(|&(_, m)| m <= 1) {
            full_at.insert(x);
        }
        let mut tops = Vec::new();
        if divisor.n_fixed(x) > 0 && flags.len() > 1 {
            for &(j, _) in &flags {
                tops.push(zeta.top(x, j)?);
            }
        }
        let distinct: BTreeSet<&Rat> = tops.iter().collect();
        if distinct.len() == tops.len() {
            nonresonant_at.insert(x);
        }
    }
    let admissible = divisor
        .orders()
        .iter()
        .filter(|(_, o)| o.n_fixed >= 2)
        .all(|(x, _)| !gamma.points().contains(x) || full_at.contains(x) && nonresonant_at.contains(x));
    Ok(ClassPredicates { full_at, nonresonant_at, admissible })
}

/// `γ⋆ζ = ∑ r_{x,j} res ζ_{x,j}`.
pub fn star_zeta(gamma: &GammaExponent, zeta: &NormalForm, divisor: &DivisorSpec) -> Result<Rat, Error> {
    let mut acc = Rat::ZERO;
    for (&(x, j), &m) in gamma.parts() {
        acc = &acc + &(&Rat::int(m as i64) * &zeta.residue(x, j, divisor)?);
    }
    Ok(acc)
}

/// `γ⋆σ = ∑ r_{x,j} σ_{x,j}`.
pub fn star_sigma(gamma: &GammaExponent, sigma: &Weights) -> Result<Rat, Error> {
    let mut acc = Rat::ZERO;
    for (&(x, j), &m) in gamma.parts() {
        let s = sigma.get(x, j).ok_or_else(|| Error::Invalid(format!("no weight at ({x},{j})")))?;
        acc = &acc + &(&Rat::int(m as i64) * s);
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiMode {
    Full,
    Partial,
}

fn cross_sum(gamma: &GammaExponent, x: u32) -> i64 {
    let m: Vec<i64> = flags_at(gamma, x).iter().map(|&(_, m)| m as i64).collect();
    let total: i64 = m.iter().sum();
    let squares: i64 = m.iter().map(|v| v * v).sum();
    (total * total - squares) / 2
}

/// The quadratic form governing the dimension of the moduli stacks.
pub fn chi(gamma: &GammaExponent, g: u32, divisor: &DivisorSpec, mode: ChiMode) -> i64 {
    let r = gamma.rank() as i64;
    let g = g as i64;
    match mode {
        ChiMode::Full => {
            let delta = divisor.degree() as i64 - divisor.support().len() as i64;
            let cross: i64 = divisor.orders().iter().map(|(x, o)| o.n as i64 * cross_sum(gamma, *x)).sum();
            (2 * g - 2) * r * r - delta * r + 2 * cross
        }
        ChiMode::Partial => {
            let excess = (divisor.degree() - divisor.fixed_degree()) as i64;
            let fixed: Vec<(u32, i64)> = divisor.orders().iter().filter(|(_, o)| o.n_fixed > 0).map(|(x, o)| (*x, o.n_fixed as i64)).collect();
            let linear: i64 = fixed.iter().map(|(_, nf)| 1 - nf).sum();
            let cross: i64 = fixed.iter().map(|(x, nf)| nf * cross_sum(gamma, *x)).sum();
            (2 * g - 2 + excess) * r * r + r * linear + 2 * cross
        }
    }
}

/// `β(γ) = (g−1)r² + ∑_y n_y ∑_{i<j} r_{y,i} r_{y,j}`.
pub fn beta(gamma: &GammaExponent, g: u32, divisor: &DivisorSpec) -> i64 {
    let r = gamma.rank() as i64;
    let cross: i64 = divisor.orders().iter().map(|(x, o)| o.n as i64 * cross_sum(gamma, *x)).sum();
    (g as i64 - 1) * r * r + cross
}

/// Euler characteristic of the sheaf of parabolic homomorphisms from a
/// bundle of class `(γ₁, d₁)` to one of class `(γ₂, d₂)`.
pub fn euler_pairing(gamma1: &GammaExponent, d1: i64, gamma2: &GammaExponent, d2: i64, g: u32, divisor: &DivisorSpec) -> i64 {
    let (r1, r2) = (gamma1.rank() as i64, gamma2.rank() as i64);
    let mut flag_term = 0i64;
    for (x, o) in divisor.orders() {
        if o.n_fixed == 0 {
            continue;
        }
        let a = flags_at(gamma1, *x);
        let b = flags_at(gamma2, *x);
        for &(i, mi) in &a {
            for &(j, mj) in &b {
                if i < j {
                    flag_term += o.n_fixed as i64 * mi as i64 * mj as i64;
                }
            }
        }
    }
    (1 - g as i64) * r1 * r2 + r1 * d2 - r2 * d1 - flag_term
}

/// Class of the twist `E(𝒟′ − 𝒟)`.
pub fn twist(gamma: &GammaExponent, d: i64, divisor: &DivisorSpec) -> (GammaExponent, i64) {
    let excess = (divisor.degree() - divisor.fixed_degree()) as i64;
    (gamma.clone(), d - excess * gamma.rank() as i64)
}

/// Added to the analytic stabilization bound.
pub const STABILIZATION_MARGIN: i64 = 1;

fn ceil_i64(x: &Rat) -> i64 {
    x.ceil().to_i64().unwrap_or(i64::MAX)
}

fn floor_i64(x: &Rat) -> i64 {
    x.floor().to_i64().unwrap_or(i64::MAX)
}

/// Smallest twist N from which the graded formulas are known to stabilize.
pub fn stabilization_bound(q: &StackQuery) -> Result<i64, Error> {
    let r = q.gamma.rank() as i64;
    if r == 0 {
        return Ok(STABILIZATION_MARGIN);
    }
    let spread = (2 * q.g as i64 - 2 + q.divisor.degree() as i64).max(0);
    let uses_zeta = !q.eps.is_zero() && matches!(q.kind, QueryKind::Full | QueryKind::SemistableFull);
    if uses_zeta {
        let mut norm = Rat::ZERO;
        for x in q.gamma.points() {
            let mut best = Rat::ZERO;
            for (j, _) in flags_at(&q.gamma, x) {
                best = best.max(q.zeta.residue(x, j, &q.divisor)?.abs());
            }
            norm = &norm + &best;
        }
        let b = &(&norm / &q.eps.abs()) + &Rat::new((r - 1) * spread, 2);
        return Ok(ceil_i64(&b).max(0) + STABILIZATION_MARGIN);
    }
    // weight-based bound: need (d − N r)/r + (r−1)l/2 < −2|σ|
    let mut sigma_norm = Rat::ZERO;
    if let Some(s) = &q.sigma {
        for x in q.gamma.points() {
            let mut best = Rat::ZERO;
            for (j, _) in flags_at(&q.gamma, x) {
                if let Some(v) = s.get(x, j) {
                    best = best.max(v.abs());
                }
            }
            sigma_norm = &sigma_norm + &best;
        }
    }
    let two_sigma = &Rat::int(2) * &sigma_norm;
    let l = Rat::int(spread).max(two_sigma.clone());
    let b = &(&Rat::new(q.d, r) + &(&Rat::new(r - 1, 2) * &l)) + &two_sigma;
    Ok((floor_i64(&b) + 1).max(0) + STABILIZATION_MARGIN)
}
