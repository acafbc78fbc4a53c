//! Parabolic-type exponents: a rank and flag multiplicities per point.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// `w^γ` with `γ = (r, (r_{x,j}))`; zero multiplicities are not stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GammaExponent {
    r: u32,
    parts: BTreeMap<(u32, u32), u32>,
}

impl GammaExponent {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(point, flag, multiplicity)` triples; flags count from 1.
    pub fn new(r: u32, parts: impl IntoIterator<Item = (u32, u32, u32)>) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (x, j, m) in parts {
            if j == 0 {
                return Err(Error::Invalid("flag indices start at 1".into()));
            }
            if m > 0 {
                *map.entry((x, j)).or_insert(0) += m;
            }
        }
        let g = GammaExponent { r, parts: map };
        for x in g.points() {
            if g.point_sum(x) != r {
                return Err(Error::Invalid(format!("multiplicities at point {x} do not sum to the rank {r}")));
            }
        }
        Ok(g)
    }

    /// Rank-`r` exponent with all of the rank on one flag at each point.
    pub fn single_flag(r: u32, points: &[u32]) -> Self {
        if r == 0 {
            return Self::zero();
        }
        GammaExponent { r, parts: points.iter().map(|&x| ((x, 1), r)).collect() }
    }

    /// Builds from per-point multiplicity vectors (index 0 is flag 1).
    pub fn from_vectors(r: u32, per_point: &[(u32, Vec<u32>)]) -> Result<Self, Error> {
        let it = per_point.iter().flat_map(|(x, v)| v.iter().enumerate().map(move |(j, &m)| (*x, j as u32 + 1, m)));
        Self::new(r, it)
    }

    pub fn rank(&self) -> u32 {
        self.r
    }

    pub fn parts(&self) -> &BTreeMap<(u32, u32), u32> {
        &self.parts
    }

    pub fn mult(&self, x: u32, j: u32) -> u32 {
        self.parts.get(&(x, j)).copied().unwrap_or(0)
    }

    pub fn points(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.parts.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn point_sum(&self, x: u32) -> u32 {
        self.parts.range((x, 0)..=(x, u32::MAX)).map(|(_, m)| *m).sum()
    }

    /// Multiplicities at `x` as a weak composition, flags `1..=max flag`.
    pub fn point_vector(&self, x: u32) -> Vec<u32> {
        let entries: Vec<_> = self.parts.range((x, 0)..=(x, u32::MAX)).collect();
        let top = entries.last().map(|(k, _)| k.1).unwrap_or(0);
        (1..=top).map(|j| self.mult(x, j)).collect()
    }

    pub fn max_flag(&self) -> u32 {
        self.parts.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// True when the exponent is supported exactly on `points` (or is zero).
    pub fn lies_over(&self, points: &[u32]) -> bool {
        if self.r == 0 {
            return self.parts.is_empty();
        }
        let mut p = self.points();
        let mut q = points.to_vec();
        q.sort_unstable();
        q.dedup();
        p.sort_unstable();
        p == q && p.iter().all(|&x| self.point_sum(x) == self.r)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut parts = self.parts.clone();
        for (k, m) in &o.parts {
            *parts.entry(*k).or_insert(0) += m;
        }
        GammaExponent { r: self.r + o.r, parts }
    }

    pub fn scale(&self, n: u32) -> Self {
        if n == 0 {
            return Self::zero();
        }
        GammaExponent { r: self.r * n, parts: self.parts.iter().map(|(k, m)| (*k, m * n)).collect() }
    }

    /// `self − o` when every component is at least that of `o`.
    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        if o.r > self.r {
            return None;
        }
        let mut parts = self.parts.clone();
        for (k, m) in &o.parts {
            let e = parts.get_mut(k)?;
            if *e < *m {
                return None;
            }
            *e -= m;
            if *e == 0 {
                parts.remove(k);
            }
        }
        Some(GammaExponent { r: self.r - o.r, parts })
    }

    /// Representative with multiplicities at each point sorted decreasingly
    /// onto flags `1, 2, …`.
    pub fn canonical(&self) -> Self {
        let mut parts = BTreeMap::new();
        for x in self.points() {
            let mut v: Vec<u32> = self.parts.range((x, 0)..=(x, u32::MAX)).map(|(_, m)| *m).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            for (j, m) in v.into_iter().enumerate() {
                parts.insert((x, j as u32 + 1), m);
            }
        }
        GammaExponent { r: self.r, parts }
    }

    /// All exponents `0 ≤ β ≤ self` (in the monoid order), including 0 and self.
    pub fn sub_exponents(&self) -> Vec<Self> {
        let mut out = Vec::new();
        let pts = self.points();
        if pts.is_empty() {
            return (0..=self.r).map(|r| GammaExponent { r, parts: BTreeMap::new() }).collect();
        }
        for r in 0..=self.r {
            let mut acc: Vec<BTreeMap<(u32, u32), u32>> = vec![BTreeMap::new()];
            for &x in &pts {
                let slots: Vec<((u32, u32), u32)> =
                    self.parts.range((x, 0)..=(x, u32::MAX)).map(|(k, m)| (*k, *m)).collect();
                let choices = bounded_compositions(r, &slots.iter().map(|s| s.1).collect::<Vec<_>>());
                let mut next = Vec::new();
                for a in &acc {
                    for c in &choices {
                        let mut m = a.clone();
                        for (i, &v) in c.iter().enumerate() {
                            if v > 0 {
                                m.insert(slots[i].0, v);
                            }
                        }
                        next.push(m);
                    }
                }
                acc = next;
            }
            out.extend(acc.into_iter().map(|parts| GammaExponent { r, parts }));
        }
        out
    }

    /// All exponents over `points` with rank `r` using flags `1..=flags`.
    pub fn all_of_rank(r: u32, points: &[u32], flags: u32) -> Vec<Self> {
        if r == 0 {
            return vec![Self::zero()];
        }
        let bounds = vec![r; flags as usize];
        let comps = bounded_compositions(r, &bounds);
        let mut acc: Vec<BTreeMap<(u32, u32), u32>> = vec![BTreeMap::new()];
        for &x in points {
            let mut next = Vec::new();
            for a in &acc {
                for c in &comps {
                    let mut m = a.clone();
                    for (j, &v) in c.iter().enumerate() {
                        if v > 0 {
                            m.insert((x, j as u32 + 1), v);
                        }
                    }
                    next.push(m);
                }
            }
            acc = next;
        }
        acc.into_iter().map(|parts| GammaExponent { r, parts }).collect()
    }
}

/// Weak compositions of `n` with entry `i` at most `bounds[i]`.
fn bounded_compositions(n: u32, bounds: &[u32]) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, bounds: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == bounds.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u32 = bounds[i + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for v in lo..=left.min(bounds[i]) {
            cur.push(v);
            rec(i + 1, left - v, bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, bounds, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for GammaExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={}", self.r)?;
        for x in self.points() {
            write!(f, " x{x}:{:?}", self.point_vector(x))?;
        }
        Ok(())
    }
}

impl fmt::Debug for GammaExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct GammaJson {
    r: u32,
    parts: Vec<[u32; 3]>,
}

impl Serialize for GammaExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GammaJson { r: self.r, parts: self.parts.iter().map(|(k, m)| [k.0, k.1, *m]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GammaExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = GammaJson::deserialize(d)?;
        GammaExponent::new(j.r, j.parts.into_iter().map(|[x, jj, m]| (x, jj, m))).map_err(serde::de::Error::custom)
    }
}
