//! E-polynomial and virtual Poincaré specializations of universal values.

use serde::{Deserialize, Serialize};

use crate::exactalg::{LaurentPoly, Mono, Rat, ScalarFraction, Var, MAX_GENUS};
use crate::genfun::{omega_with, GenFunParams, TermShape};
use crate::partition::Partition;
use crate::series::GradedSeries;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// `q ↦ uv`, `αᵢ ↦ u`.
    E,
    /// `E` followed by `u = v = t`.
    P,
}

impl Target {
    /// Images of the generators in terms of the half-power generators.
    pub fn images(self) -> Vec<(Var, Mono, Rat)> {
        let (uh, vh) = match self {
            Target::E => (Mono::var(Var::Uh, 1), Mono::var(Var::Vh, 1)),
            Target::P => (Mono::var(Var::Th, 1), Mono::var(Var::Th, 1)),
        };
        let mut out = vec![(Var::Qh, uh.mul(&vh), Rat::ONE)];
        for i in 1..=MAX_GENUS as u8 {
            out.push((Var::Alpha(i), uh.pow(2), Rat::ONE));
        }
        if self == Target::P {
            out.push((Var::Uh, Mono::var(Var::Th, 1), Rat::ONE));
            out.push((Var::Vh, Mono::var(Var::Th, 1), Rat::ONE));
        }
        out
    }

    /// Image of `q^{1/2}`.
    pub fn half_q(self) -> Mono {
        match self {
            Target::E => Mono::var(Var::Uh, 1).mul(&Mono::var(Var::Vh, 1)),
            Target::P => Mono::var(Var::Th, 2),
        }
    }
}

/// Image of a universal value, written in `uh, vh` (E) or `th` (P).
pub fn specialize_value(x: &ScalarFraction, target: Target) -> Result<ScalarFraction, Error> {
    Ok(x.subst_monomial(&target.images())?.reduce())
}

pub fn specialize_series(s: &GradedSeries, target: Target) -> Result<GradedSeries, Error> {
    let images = target.images();
    let mut out = GradedSeries::zero(s.trunc());
    for (g, d, c) in s.iter() {
        out.insert(g.clone(), d, c.subst_monomial(&images)?.reduce());
    }
    Ok(out)
}

const HALF_VARS: [Var; 3] = [Var::Uh, Var::Vh, Var::Th];

fn check_even(p: &LaurentPoly, what: &str) -> Result<(), Error> {
    for (m, _) in p.terms() {
        for v in HALF_VARS {
            if m.exp(v) % 2 != 0 {
                return Err(Error::FractionalPower(format!("{what} has odd {} exponent in {m:?}", v.name())));
            }
        }
    }
    Ok(())
}

fn halve(m: &Mono) -> Mono {
    let mut out = *m;
    for v in HALF_VARS {
        out = out.with_exp(v, m.exp(v) / 2);
    }
    out
}

/// Rewrites a specialized value in `u = uh², v = vh², t = th²`; fails on
/// odd powers of the half generators.
pub fn halved(x: &ScalarFraction) -> Result<ScalarFraction, Error> {
    let x = x.reduce();
    let den = x.den_expanded();
    check_even(x.num(), "numerator")?;
    check_even(&den, "denominator")?;
    ScalarFraction::new(x.num().map_monos(halve), &den.map_monos(halve))
}

/// Text of a specialized value in the variables `u, v` or `t`.
pub fn display(x: &ScalarFraction) -> Result<String, Error> {
    Ok(halved(x)?.to_string().replace("uh", "u").replace("vh", "v").replace("th", "t"))
}

/// Numerator and denominator text of a specialized value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalText {
    pub num: String,
    pub den: String,
}

pub fn rational_text(x: &ScalarFraction) -> Result<RationalText, Error> {
    let h = halved(x)?;
    let rename = |s: String| s.replace("uh", "u").replace("vh", "v").replace("th", "t");
    Ok(RationalText {
        num: rename(ScalarFraction::from_poly(h.num().clone()).to_string()),
        den: rename(ScalarFraction::from_poly(h.den_expanded()).to_string()),
    })
}

fn sf(s: &str) -> Result<ScalarFraction, Error> {
    s.parse()
}

fn e_shape(mu: &Partition, g: u32, delta: u32) -> Result<TermShape, Error> {
    let d = delta as i64;
    let pair = mu.pairing(mu) as i64;
    let e = (2 * g as i64 + d) * pair;
    let mut factors = vec![ScalarFraction::mono(Mono::var(Var::Uh, e as i32).mul(&Mono::var(Var::Vh, e as i32))).scale(&Rat::int(if e % 2 == 0 { 1 } else { -1 }))];
    factors.push(ScalarFraction::mono(Mono::var(Var::Z, (2 * d * mu.conjugate().n() as i64) as i32)));
    for c in mu.cells() {
        let (a, l) = (c.arm as i64, c.leg as i64);
        factors.push(sf(&format!(
            "(1 - z^{}*uh^{}*vh^{})^{g}*(1 - z^{}*uh^{}*vh^{})^{g}",
            2 * a + 1,
            -2 * l,
            -2 * l - 2,
            2 * a + 1,
            -2 * l - 2,
            -2 * l
        ))?);
        factors.push(sf(&format!(
            "1/((z^{} - uh^{}*vh^{})*(z^{} - uh^{}*vh^{}))",
            2 * a + 2,
            2 * l,
            2 * l,
            2 * a,
            2 * l + 2,
            2 * l + 2
        ))?);
    }
    let uv = Mono::var(Var::Uh, 2).mul(&Mono::var(Var::Vh, 2));
    Ok(TermShape { factors, first: Mono::var(Var::Z, 2), second: uv })
}

fn p_shape(mu: &Partition, g: u32, delta: u32) -> Result<TermShape, Error> {
    let d = delta as i64;
    let mut factors = vec![ScalarFraction::mono(Mono::var(Var::Th, (2 * d * mu.size() as i64) as i32))];
    for c in mu.cells() {
        let (a, l) = (c.arm as i64, c.leg as i64);
        factors.push(sf(&format!("(-th^{}*z^{})^{d}", 4 * l, 2 * a))?);
        factors.push(sf(&format!("(th^{} - z^{})^{}", 4 * l + 2, 2 * a + 1, 2 * g))?);
        factors.push(sf(&format!("1/((th^{} - z^{})*(th^{} - z^{}))", 4 * l + 4, 2 * a, 4 * l, 2 * a + 2))?);
    }
    Ok(TermShape { factors, first: Mono::var(Var::Z, 2), second: Mono::var(Var::Th, 4) })
}

/// Specialized universal generating function, built from its closed form.
pub fn omega_specialized(p: &GenFunParams, target: Target) -> Result<GradedSeries, Error> {
    match target {
        Target::E => omega_with(p, |mu| e_shape(mu, p.g, p.delta)),
        Target::P => omega_with(p, |mu| p_shape(mu, p.g, p.delta)),
    }
}

/// `(1 − z²) Log` of the specialized generating function.
pub fn kernel_specialized(p: &GenFunParams, target: Target) -> Result<GradedSeries, Error> {
    Ok(omega_specialized(p, target)?.pleth_log()?.mul_zpoly(&[(0, Rat::ONE), (2, Rat::int(-1))]))
}
