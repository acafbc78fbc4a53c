//! Modified Macdonald polynomials in the monomial basis, by filling enumeration.
//!
//! `H̃_μ(w; z, q) = ∑_σ z^{inv σ} q^{maj σ} w^σ` over fillings of the French
//! diagram of μ, so that the ∇-eigenvalue is `z^{n(μ′)} q^{n(μ)}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::exactalg::{LaurentPoly, Mono, Rat};
use crate::partition::Partition;
use crate::Error;

/// Default bound on `|μ|` for filling enumeration.
pub const DEFAULT_SIZE_BOUND: u32 = 8;

/// Polynomial in two parameters with integer coefficients, keyed by
/// `(first exponent, second exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bivariate(pub BTreeMap<(u32, u32), i64>);

impl Bivariate {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Substitute monomials for the two parameters.
    pub fn eval(&self, first: &Mono, second: &Mono) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.0
                .iter()
                .map(|(&(a, b), &c)| (first.pow(a as i32).mul(&second.pow(b as i32)), Rat::int(c)))
                .collect(),
        )
    }

    pub fn eval_int(&self, first: i64, second: i64) -> i64 {
        self.0.iter().map(|(&(a, b), &c)| c * first.pow(a) * second.pow(b)).sum()
    }

    pub fn swap(&self) -> Bivariate {
        Bivariate(self.0.iter().map(|(&(a, b), &c)| ((b, a), c)).collect())
    }

    pub fn has_negative(&self) -> bool {
        self.0.values().any(|&c| c < 0)
    }
}

/// `∑_λ c_λ · m_λ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymFunc {
    pub terms: BTreeMap<Partition, Bivariate>,
}

impl SymFunc {
    /// Coefficient of the monomial `w^κ` for a weak composition κ.
    pub fn m_coefficient(&self, kappa: &[u32]) -> Bivariate {
        let lam = Partition::from_unsorted(kappa.to_vec());
        self.terms.get(&lam).cloned().unwrap_or_default()
    }

    /// Exchange the two parameters.
    pub fn swap_params(&self) -> SymFunc {
        SymFunc { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.swap())).collect() }
    }
}

struct Diagram {
    /// Cells as (row from 1 at the bottom, column from 1).
    cells: Vec<(u32, u32)>,
    /// For each cell, index of the cell directly below.
    below: Vec<Option<usize>>,
    arm: Vec<u32>,
    leg: Vec<u32>,
    /// Inversion candidates `(u, v)` with u before v in reading order.
    attacking: Vec<(usize, usize)>,
}

impl Diagram {
    fn new(mu: &Partition) -> Diagram {
        // reading order: top row first, left to right
        let mut cells = Vec::new();
        for row in (1..=mu.len() as u32).rev() {
            for col in 1..=mu.part(row as usize) {
                cells.push((row, col));
            }
        }
        let idx = |r: u32, c: u32| cells.iter().position(|&x| x == (r, c));
        let conj = mu.conjugate();
        let mut below = Vec::new();
        let mut arm = Vec::new();
        let mut leg = Vec::new();
        for &(r, c) in &cells {
            below.push(if r > 1 { idx(r - 1, c) } else { None });
            arm.push(mu.part(r as usize) - c);
            leg.push(conj.part(c as usize) - r);
        }
        let mut attacking = Vec::new();
        for (a, &(ra, ca)) in cells.iter().enumerate() {
            for (b, &(rb, cb)) in cells.iter().enumerate().skip(a + 1) {
                let same_row = ra == rb;
                let next_row = ra == rb + 1 && cb < ca;
                if same_row || next_row {
                    attacking.push((a, b));
                }
            }
        }
        Diagram { cells, below, arm, leg, attacking }
    }

    fn stats(&self, fill: &[u8]) -> (u32, u32) {
        let mut inv = 0i64;
        let mut maj = 0u32;
        for (u, b) in self.below.iter().enumerate() {
            if let Some(v) = *b {
                if fill[u] > fill[v] {
                    maj += self.leg[u] + 1;
                    inv -= self.arm[u] as i64;
                }
            }
        }
        for &(u, v) in &self.attacking {
            if fill[u] > fill[v] {
                inv += 1;
            }
        }
        debug_assert!(inv >= 0);
        (inv as u32, maj)
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
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

fn compute(mu: &Partition) -> SymFunc {
    let n = mu.size();
    let mut terms = BTreeMap::new();
    if n == 0 {
        let mut one = BTreeMap::new();
        one.insert((0, 0), 1);
        terms.insert(Partition::empty(), Bivariate(one));
        return SymFunc { terms };
    }
    let dia = Diagram::new(mu);
    debug_assert_eq!(dia.cells.len(), n as usize);
    for lam in Partition::of_size(n) {
        let mut fill: Vec<u8> = Vec::with_capacity(n as usize);
        for (i, &p) in lam.parts().iter().enumerate() {
            fill.extend(std::iter::repeat(i as u8 + 1).take(p as usize));
        }
        let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        loop {
            *acc.entry(dia.stats(&fill)).or_insert(0) += 1;
            if !next_permutation(&mut fill) {
                break;
            }
        }
        terms.insert(lam, Bivariate(acc));
    }
    SymFunc { terms }
}

fn memo() -> &'static Mutex<HashMap<Partition, Arc<SymFunc>>> {
    static M: OnceLock<Mutex<HashMap<Partition, Arc<SymFunc>>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `H̃_μ(w; first, second)` with `first` paired to the inversion statistic.
pub fn hhl_modified_macdonald(mu: &Partition) -> Result<Arc<SymFunc>, Error> {
    hhl_modified_macdonald_bounded(mu, DEFAULT_SIZE_BOUND)
}

pub fn hhl_modified_macdonald_bounded(mu: &Partition, bound: u32) -> Result<Arc<SymFunc>, Error> {
    if mu.size() > bound {
        return Err(Error::Resource(format!("|μ|={} exceeds the bound {bound}", mu.size())));
    }
    if let Some(h) = memo().lock().unwrap().get(mu) {
        return Ok(h.clone());
    }
    let h = Arc::new(compute(mu));
    memo().lock().unwrap().insert(mu.clone(), h.clone());
    Ok(h)
}
