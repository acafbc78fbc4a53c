//! Integer partitions and Young-diagram statistics.
//!
//! Cells are indexed `(row, column)` from 1 in the English convention.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Weakly decreasing positive parts; the empty list is the empty partition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

/// Arm and leg of one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
    pub arm: u32,
    pub leg: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellStats {
    pub cells: Vec<Cell>,
    pub n: u64,
    pub size: u32,
    pub self_pairing: u64,
}

impl Partition {
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Validates and builds; trailing zeros are dropped.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, Error> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::Invalid(format!("not a partition: {parts:?}")));
        }
        Ok(Partition(parts))
    }

    /// Sorts arbitrary positive parts into a partition.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Part `i` counted from 1; zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let w = self.part(1);
        Partition((1..=w).map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32).collect())
    }

    /// `n(μ) = ∑ (i−1) μᵢ`.
    pub fn n(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, &p)| i as u64 * p as u64).sum()
    }

    /// `⟨μ,ν⟩ = ∑ μ′ᵢ ν′ᵢ`.
    pub fn pairing(&self, o: &Partition) -> u64 {
        let a = self.conjugate();
        let b = o.conjugate();
        a.0.iter().zip(b.0.iter()).map(|(&x, &y)| x as u64 * y as u64).sum()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let c = self.conjugate();
        let mut out = Vec::with_capacity(self.size() as usize);
        for (i, &p) in self.0.iter().enumerate() {
            for j in 1..=p {
                let row = i as u32 + 1;
                out.push(Cell { row, col: j, arm: p - j, leg: c.part(j as usize) - row });
            }
        }
        out
    }

    pub fn cell_stats(&self) -> CellStats {
        CellStats {
            cells: self.cells(),
            n: self.n(),
            size: self.size(),
            self_pairing: self.pairing(self),
        }
    }

    /// All partitions of exactly `m`, in reverse lexicographic order.
    pub fn of_size(m: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if left == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=left.min(max)).rev() {
                cur.push(p);
                rec(left - p, p, cur, out);
                cur.pop();
            }
        }
        rec(m, m, &mut cur, &mut out);
        out
    }
}

/// All partitions of every size `0..=n`, by size then reverse lexicographic.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    (0..=n).flat_map(Partition::of_size).collect()
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Partition::new(v).map_err(serde::de::Error::custom)
    }
}
