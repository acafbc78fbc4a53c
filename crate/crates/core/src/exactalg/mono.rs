//! Laurent monomials over the fixed generator list.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest genus whose α-generators fit in a monomial.
pub const MAX_GENUS: usize = 7;
/// Number of exponent slots.
pub const NV: usize = 5 + MAX_GENUS;

/// A generator of the coefficient ring.
///
/// Slot order is the canonical generator order `qh, a1..a7, z, uh, vh, th`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Qh,
    Alpha(u8),
    Z,
    Uh,
    Vh,
    Th,
}

impl Var {
    pub fn slot(self) -> usize {
        match self {
            Var::Qh => 0,
            Var::Alpha(i) => {
                assert!((1..=MAX_GENUS as u8).contains(&i), "alpha index {i} out of range");
                i as usize
            }
            Var::Z => MAX_GENUS + 1,
            Var::Uh => MAX_GENUS + 2,
            Var::Vh => MAX_GENUS + 3,
            Var::Th => MAX_GENUS + 4,
        }
    }

    pub fn from_slot(s: usize) -> Var {
        match s {
            0 => Var::Qh,
            s if s <= MAX_GENUS => Var::Alpha(s as u8),
            s if s == MAX_GENUS + 1 => Var::Z,
            s if s == MAX_GENUS + 2 => Var::Uh,
            s if s == MAX_GENUS + 3 => Var::Vh,
            s if s == MAX_GENUS + 4 => Var::Th,
            _ => panic!("slot {s} out of range"),
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::Qh => "qh".into(),
            Var::Alpha(i) => format!("a{i}"),
            Var::Z => "z".into(),
            Var::Uh => "uh".into(),
            Var::Vh => "vh".into(),
            Var::Th => "th".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "qh" => Some(Var::Qh),
            "z" => Some(Var::Z),
            "uh" => Some(Var::Uh),
            "vh" => Some(Var::Vh),
            "th" => Some(Var::Th),
            _ => {
                let i: u8 = s.strip_prefix('a')?.parse().ok()?;
                (1..=MAX_GENUS as u8).contains(&i).then_some(Var::Alpha(i))
            }
        }
    }
}

/// Exponent vector with cached total degree.
///
/// The derived ordering compares total degree first and then exponents
/// lexicographically in slot order, which is the graded-lex monomial order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    deg: i32,
    e: [i16; NV],
}

fn checked(x: i32) -> i16 {
    i16::try_from(x).expect("monomial exponent overflow")
}

impl Mono {
    pub const ONE: Mono = Mono { deg: 0, e: [0; NV] };

    pub fn from_exps(e: [i16; NV]) -> Mono {
        let deg = e.iter().map(|&x| x as i32).sum();
        Mono { deg, e }
    }

    pub fn var(v: Var, k: i32) -> Mono {
        let mut e = [0i16; NV];
        e[v.slot()] = checked(k);
        Mono::from_exps(e)
    }

    pub fn exps(&self) -> &[i16; NV] {
        &self.e
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.e[v.slot()] as i32
    }

    pub fn degree(&self) -> i32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut e = [0i16; NV];
        for i in 0..NV {
            e[i] = checked(self.e[i] as i32 + o.e[i] as i32);
        }
        Mono { deg: self.deg + o.deg, e }
    }

    pub fn div(&self, o: &Mono) -> Mono {
        self.mul(&o.inv())
    }

    pub fn inv(&self) -> Mono {
        let mut e = [0i16; NV];
        for i in 0..NV {
            e[i] = -self.e[i];
        }
        Mono { deg: -self.deg, e }
    }

    pub fn pow(&self, k: i32) -> Mono {
        let mut e = [0i16; NV];
        for i in 0..NV {
            e[i] = checked(self.e[i] as i32 * k);
        }
        Mono { deg: self.deg * k, e }
    }

    /// True when every exponent of `self` is at least that of `o`.
    pub fn dominates(&self, o: &Mono) -> bool {
        (0..NV).all(|i| self.e[i] >= o.e[i])
    }

    pub fn min(&self, o: &Mono) -> Mono {
        let mut e = [0i16; NV];
        for i in 0..NV {
            e[i] = self.e[i].min(o.e[i]);
        }
        Mono::from_exps(e)
    }

    pub fn with_exp(&self, v: Var, k: i32) -> Mono {
        let mut e = self.e;
        e[v.slot()] = checked(k);
        Mono::from_exps(e)
    }

    /// Gcd of the absolute exponents (0 for the unit monomial).
    pub fn exponent_gcd(&self) -> u32 {
        self.e.iter().fold(0u32, |g, &x| num_integer::gcd(g, x.unsigned_abs() as u32))
    }

    /// Divide every exponent by `k` (caller guarantees divisibility).
    pub fn root(&self, k: u32) -> Mono {
        let mut e = [0i16; NV];
        for i in 0..NV {
            debug_assert!(self.e[i] as i32 % k as i32 == 0);
            e[i] = self.e[i] / k as i16;
        }
        Mono::from_exps(e)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        (0..NV).filter(|&i| self.e[i] != 0).map(|i| (Var::from_slot(i), self.e[i] as i32))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, k) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{}", v.name())?;
            } else {
                write!(f, "{}^{}", v.name(), k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
