//! Normalized denominator factors.
//!
//! Binomials `M₁ ± M₂` are split into cyclotomic pieces Φ_d(P) of a primitive
//! monomial P; everything else is kept as a primitive polynomial.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::mono::Mono;
use super::poly::LaurentPoly;
use super::rat::Rat;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Factor {
    /// Φ_d(base) where `base` is primitive and `base > 1` in graded-lex order.
    Cyclo { d: u32, base: Mono },
    /// Primitive polynomial: nonnegative exponents, no monomial factor, positive leading coefficient.
    Poly(LaurentPoly),
}

fn cyclo_table() -> &'static Mutex<HashMap<u32, Vec<i64>>> {
    static T: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn moebius(n: u32) -> i32 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

/// Coefficients of the d-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic(d: u32) -> Vec<i64> {
    if let Some(v) = cyclo_table().lock().unwrap().get(&d) {
        return v.clone();
    }
    // x^d − 1 divided by Φ_k for all proper divisors k
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for k in divisors(d) {
        if k == d {
            continue;
        }
        let den = cyclotomic(k);
        num = div_monic(&num, &den);
    }
    cyclo_table().lock().unwrap().insert(d, num.clone());
    num
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let n = num.len() - 1;
    let m = den.len() - 1;
    let mut rem = num.to_vec();
    let mut q = vec![0i64; n - m + 1];
    for i in (0..=n - m).rev() {
        let c = rem[i + m];
        q[i] = c;
        for j in 0..=m {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Euler's totient (degree of Φ_d).
pub fn totient(d: u32) -> u32 {
    (1..=d).filter(|k| num_integer::gcd(*k, d) == 1).count() as u32
}

impl Factor {
    pub fn expand(&self) -> LaurentPoly {
        match self {
            Factor::Cyclo { d, base } => {
                let c = cyclotomic(*d);
                LaurentPoly::from_terms(
                    c.iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0)
                        .map(|(k, &x)| (base.pow(k as i32), Rat::int(x)))
                        .collect(),
                )
            }
            Factor::Poly(p) => p.clone(),
        }
    }

    pub fn is_z_free(&self, z: super::mono::Var) -> bool {
        match self {
            Factor::Cyclo { base, .. } => base.exp(z) == 0,
            Factor::Poly(p) => !p.involves(z),
        }
    }

    /// Image under every generator x ↦ xⁿ, as a product of normalized factors
    /// times a unit.
    pub fn psi(&self, n: u32) -> (Rat, Mono, Vec<(Factor, u32)>) {
        match self {
            Factor::Cyclo { d, base } => {
                // Φ_d(x^n) = ∏_{k|d} (x^{kn} − 1)^{μ(d/k)} = ∏_j Φ_j(x)^{e_j}
                let mut out = Vec::new();
                for j in divisors(d * n) {
                    let e: i32 = divisors(*d)
                        .into_iter()
                        .filter(|k| (k * n) % j == 0)
                        .map(|k| moebius(d / k))
                        .sum();
                    debug_assert!(e >= 0);
                    if e > 0 {
                        out.push((Factor::Cyclo { d: j, base: *base }, e as u32));
                    }
                }
                (Rat::ONE, Mono::ONE, out)
            }
            Factor::Poly(p) => factorize(&p.psi(n)),
        }
    }
}

/// Write a nonzero polynomial as `c · m · ∏ fᵢ^{eᵢ}` with normalized factors.
pub fn factorize(p: &LaurentPoly) -> (Rat, Mono, Vec<(Factor, u32)>) {
    assert!(!p.is_zero(), "factorize of zero");
    let t = p.terms();
    if t.len() == 1 {
        return (t[0].1.clone(), t[0].0, Vec::new());
    }
    if t.len() == 2 {
        let (m1, c1) = &t[0];
        let (m2, c2) = &t[1];
        let ratio = c2 / c1;
        let n = m2.div(m1);
        let k = n.exponent_gcd();
        let base = n.root(k);
        if ratio == Rat::int(-1) {
            // c1·m1·(1 − P^k) = −c1·m1·∏_{d|k} Φ_d(P)
            let fs = divisors(k).into_iter().map(|d| (Factor::Cyclo { d, base }, 1)).collect();
            return (-c1, *m1, fs);
        }
        if ratio == Rat::ONE {
            // 1 + P^k = ∏_{d | 2k, d ∤ k} Φ_d(P)
            let fs = divisors(2 * k)
                .into_iter()
                .filter(|d| k % d != 0)
                .map(|d| (Factor::Cyclo { d, base }, 1))
                .collect();
            return (c1.clone(), *m1, fs);
        }
    }
    let (c, m, q) = p.normalize();
    (c, m, vec![(Factor::Poly(q), 1)])
}
