//! Stack classes read off the DT kernels.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::*;
use crate::exactalg::{Mono, ScalarFraction, Var};
use crate::genfun::{dt_kernels, omega_sch, omega_term, Family, GenFunParams};
use crate::partition::Partition;
use crate::series::{GradedSeries, Trunc};
use crate::specialize::{kernel_specialized, specialize_value, Target};

/// How far in z the kernels are expanded, and the vanishing-tail window
/// used to certify their values at z = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub z_max: u32,
    pub window: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { z_max: 40, window: 5 }
    }
}

/// Which kernel a query reads and which filters apply to its summands.
struct Setup {
    points: Vec<u32>,
    delta: u32,
    chi_mode: ChiMode,
    with_q: bool,
    zeta_filter: bool,
    /// Weights and the target slope τ.
    sigma_filter: Option<(Weights, Rat)>,
}

fn setup(q: &StackQuery) -> Result<Setup, Error> {
    let r = Rat::int(q.gamma.rank().max(1) as i64);
    let tau = |s: &Weights| -> Result<Rat, Error> { Ok(&(&Rat::int(q.d) + &star_sigma(&q.gamma, s)?) / &r) };
    let full_support = |sigma: Option<(Weights, Rat)>| Setup {
        points: q.divisor.support(),
        delta: q.divisor.delta(),
        chi_mode: ChiMode::Full,
        with_q: true,
        zeta_filter: true,
        sigma_filter: sigma,
    };
    Ok(match q.kind {
        QueryKind::Full => full_support(None),
        QueryKind::SemistableFull => {
            let s = q.sigma.clone().ok_or_else(|| Error::Invalid("semistable queries need weights".into()))?;
            let t = tau(&s)?;
            full_support(Some((s, t)))
        }
        QueryKind::SemistablePartial => {
            let s = q.sigma.clone().ok_or_else(|| Error::Invalid("semistable queries need weights".into()))?;
            let t = tau(&s)?;
            Setup {
                points: q.divisor.fixed_support(),
                delta: q.divisor.delta(),
                chi_mode: ChiMode::Partial,
                with_q: false,
                zeta_filter: false,
                sigma_filter: Some((s, t)),
            }
        }
        QueryKind::NonpositiveGraded if q.divisor.is_fully_fixed() => full_support(None),
        QueryKind::NonpositiveGraded => Setup {
            points: q.divisor.fixed_support(),
            delta: q.divisor.delta(),
            chi_mode: ChiMode::Partial,
            with_q: false,
            zeta_filter: false,
            sigma_filter: None,
        },
    })
}

fn check_admissible(q: &StackQuery) -> Result<(), Error> {
    if !class_predicates(&q.gamma, &q.divisor, &q.zeta)?.admissible {
        return Err(Error::Inadmissible(format!("{} is outside Γ_(𝒟′,ζ)", q.gamma)));
    }
    Ok(())
}

/// `εd + γ⋆ζ`, which must vanish for a nonempty fully fixed stack.
fn degree_defect(q: &StackQuery) -> Result<Rat, Error> {
    Ok(&(&q.eps * &Rat::int(q.d)) + &star_zeta(&q.gamma, &q.zeta, &q.divisor)?)
}

fn kernel_params(q: &StackQuery, s: &Setup, z_max: u32) -> Result<GenFunParams, Error> {
    GenFunParams::new(q.g, s.points.clone(), s.delta, Trunc { r_max: q.gamma.rank(), z_max })
}

/// Kernel parameters a query reads, if it reads any.
pub fn query_kernel_params(q: &StackQuery, budget: Budget) -> Result<Option<GenFunParams>, Error> {
    if q.gamma.rank() == 0 {
        return Ok(None);
    }
    let s = setup(q)?;
    Ok(Some(kernel_params(q, &s, budget.z_max)?))
}

/// The `(−q^{1/2})^χ` prefactor and the multiplier inside `Exp`, for a
/// given image of `q^{1/2}`.
fn outer_factors(q: &StackQuery, s: &Setup, half_q: &Mono) -> (ScalarFraction, ScalarFraction) {
    let chi = chi(&q.gamma, q.g, &q.divisor, s.chi_mode);
    let sign = if chi.rem_euclid(2) == 0 { 1 } else { -1 };
    let pre = ScalarFraction::mono(half_q.pow(chi as i32)).scale(&Rat::int(sign));
    let mult = if s.with_q { ScalarFraction::mono(half_q.pow(2)) } else { ScalarFraction::one() };
    (pre, mult)
}

fn in_eps_lattice(x: &Rat, eps: &Rat) -> bool {
    if eps.is_zero() {
        x.is_zero()
    } else {
        (x / eps).is_integer()
    }
}

/// Coefficient at `w^{γ′}` of `pre · Exp(mult · values|filtered)`, with the
/// values given at z = 1.
fn conn_from_values(q: &StackQuery, s: &Setup, values: &BTreeMap<GammaExponent, ScalarFraction>, half_q: &Mono) -> Result<ScalarFraction, Error> {
    let (pre, mult) = outer_factors(q, s, half_q);
    let mut a = GradedSeries::zero(Trunc { r_max: q.gamma.rank(), z_max: 0 });
    for gm in q.gamma.sub_exponents().into_iter().filter(|g| g.rank() > 0) {
        if s.zeta_filter && !in_eps_lattice(&star_zeta(&gm, &q.zeta, &q.divisor)?, &q.eps) {
            continue;
        }
        if let Some((w, tau)) = &s.sigma_filter {
            if !(&star_sigma(&gm, w)? - &(tau * &Rat::int(gm.rank() as i64))).is_integer() {
                continue;
            }
        }
        if let Some(v) = values.get(&gm.canonical()) {
            a.insert(gm, 0, (v * &mult).reduce());
        }
    }
    let c = a.pleth_exp()?.coefficient(&q.gamma, 0)?;
    Ok((&pre * &c).reduce())
}

/// Checks shared by the z = 1 drivers; `Some` short-circuits the answer.
fn conn_preamble(q: &StackQuery) -> Result<Option<ScalarFraction>, Error> {
    q.validate()?;
    if q.kind == QueryKind::NonpositiveGraded {
        return Err(Error::Invalid("nonpositive-graded queries are answered by graded_class".into()));
    }
    if q.gamma.rank() == 0 {
        return Ok(Some(ScalarFraction::one()));
    }
    check_admissible(q)?;
    if q.kind == QueryKind::Full && !degree_defect(q)?.is_zero() {
        return Ok(Some(ScalarFraction::zero()));
    }
    Ok(None)
}

/// Motivic class of the stack of ε-connections described by the query.
pub fn conn_class(q: &StackQuery, budget: Budget) -> Result<ScalarFraction, Error> {
    if let Some(v) = conn_preamble(q)? {
        return Ok(v);
    }
    let s = setup(q)?;
    let k = dt_kernels(&kernel_params(q, &s, budget.z_max)?)?;
    let values = k.h_univ.eval_z_one(budget.window)?;
    conn_from_values(q, &s, &values, &Mono::var(Var::Qh, 1))
}

/// E-polynomial or virtual Poincaré polynomial of the stack, by
/// specializing the universal class.
pub fn e_p_conn(q: &StackQuery, target: Target, budget: Budget) -> Result<ScalarFraction, Error> {
    specialize_value(&conn_class(q, budget)?, target)
}

/// The same value computed from the specialized kernel directly.
pub fn e_p_conn_direct(q: &StackQuery, target: Target, budget: Budget) -> Result<ScalarFraction, Error> {
    if let Some(v) = conn_preamble(q)? {
        return Ok(v);
    }
    let s = setup(q)?;
    let kernel = kernel_specialized(&kernel_params(q, &s, budget.z_max)?, target)?;
    let values = kernel.eval_z_one(budget.window)?;
    conn_from_values(q, &s, &values, &target.half_q())
}

/// Coefficient at `w^{γ′}z^{−d′+N rk γ′}` of the z-graded formula at twist N.
pub fn graded_class(q: &StackQuery, n: i64, budget: Budget) -> Result<ScalarFraction, Error> {
    q.validate()?;
    if n < 0 {
        return Err(Error::Invalid("twist N must be nonnegative".into()));
    }
    let r = q.gamma.rank() as i64;
    let shift = if q.kind == QueryKind::NonpositiveGraded { 0 } else { n };
    let top = -q.d + shift * r;
    if r == 0 {
        return Ok(if top == 0 { ScalarFraction::one() } else { ScalarFraction::zero() });
    }
    check_admissible(q)?;
    if q.kind == QueryKind::Full && !degree_defect(q)?.is_zero() {
        return Ok(ScalarFraction::zero());
    }
    if top < 0 {
        return Ok(ScalarFraction::zero());
    }
    if top > budget.z_max as i64 {
        return Err(Error::OutOfTruncation(format!("z-degree {top} exceeds the budget z_max={}", budget.z_max)));
    }
    let s = setup(q)?;
    let params = kernel_params(q, &s, budget.z_max)?;
    let (pre, mult) = outer_factors(q, &s, &Mono::var(Var::Qh, 1));
    if q.kind == QueryKind::NonpositiveGraded && !q.divisor.is_fully_fixed() {
        let c = omega_sch(&params)?.coefficient(&q.gamma, top)?;
        return Ok((&pre * &c).reduce());
    }
    let k = dt_kernels(&params)?;
    let trunc = Trunc { r_max: q.gamma.rank(), z_max: top as u32 };
    let mut a = GradedSeries::zero(trunc);
    for gm in q.gamma.sub_exponents().into_iter().filter(|g| g.rank() > 0) {
        let rk = Rat::int(gm.rank() as i64);
        let zs = if s.zeta_filter { Some(star_zeta(&gm, &q.zeta, &q.divisor)?) } else { None };
        let ss = match &s.sigma_filter {
            Some((w, tau)) => Some((star_sigma(&gm, w)?, tau)),
            None => None,
        };
        let Some(row) = k.h_sch.row(&gm.canonical()) else { continue };
        // running partial sums give Log Ω = kernel / (1 − z)
        let mut log = ScalarFraction::zero();
        for kz in 0..=top {
            if let Some(v) = row.get(&(kz as u32)) {
                log = (&log + v).reduce();
            }
            let kr = Rat::int(kz);
            if let Some(z) = &zs {
                // −εk + γ⋆ζ = −εN rk γ
                if &(-&(&q.eps * &kr)) + z != -&(&(&q.eps * &Rat::int(shift)) * &rk) {
                    continue;
                }
            }
            if let Some((sg, tau)) = &ss {
                // −k + γ⋆σ = (τ − N) rk γ
                if &(-&kr) + sg != &(*tau - &Rat::int(shift)) * &rk {
                    continue;
                }
            }
            if !log.is_zero() {
                a.insert(gm.clone(), kz as u32, (&log * &mult).reduce());
            }
        }
    }
    let c = a.pleth_exp()?.coefficient(&q.gamma, top)?;
    Ok((&pre * &c).reduce())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StableValue {
    pub value: ScalarFraction,
    /// First N at which two consecutive twists agreed.
    pub witness: i64,
    pub bound: i64,
}

/// Evaluates [`graded_class`] from the stabilization bound upward until two
/// consecutive twists agree.
pub fn graded_class_stable(q: &StackQuery, budget: Budget) -> Result<StableValue, Error> {
    q.validate()?;
    let bound = stabilization_bound(q)?;
    let r = q.gamma.rank() as i64;
    if q.kind == QueryKind::NonpositiveGraded || r == 0 {
        return Ok(StableValue { value: graded_class(q, bound, budget)?, witness: bound, bound });
    }
    let fits = |n: i64| -q.d + n * r <= budget.z_max as i64;
    let mut n = bound;
    let mut prev = graded_class(q, n, budget)?;
    while fits(n + 1) {
        let next = graded_class(q, n + 1, budget)?;
        if next == prev {
            return Ok(StableValue { value: prev, witness: n, bound });
        }
        prev = next;
        n += 1;
    }
    Err(Error::OutOfTruncation(format!("no two consecutive twists agreed before z_max={}", budget.z_max)))
}

/// Classes of nilpotent pairs of type μ, as the single-μ summand of Ω^Sch
/// with the `(−q^{1/2})^{|μ|²δ}` weight removed.
pub fn nilpotent_pair_class(g: u32, delta: u32, mu: &Partition, points: &[u32], trunc: Trunc) -> Result<GradedSeries, Error> {
    let p = GenFunParams::new(g, points.to_vec(), delta, trunc)?;
    let r = mu.size() as i32;
    let e = r * r * delta as i32;
    let sign = if (delta as i32 * r) % 2 == 0 { 1 } else { -1 };
    Ok(omega_term(Family::Sch, &p, mu)?.scale(&ScalarFraction::var_pow(Var::Qh, -e).scale(&Rat::int(sign))))
}

/// `d(1^r, n, g) = 2r²(g−1) + 2n·C(r,2) + 2`.
pub fn ddp_degree(r: u32, n: u32, g: u32) -> i64 {
    let (r, n, g) = (r as i64, n as i64, g as i64);
    2 * r * r * (g - 1) + n * r * (r - 1) + 2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DdpResult {
    pub g: u32,
    pub n: u32,
    pub r: u32,
    pub sigma: Vec<Rat>,
    /// Poincaré polynomial of the stack times `t² − 1`, in `th` with `t = th²`.
    #[serde(skip)]
    pub h: ScalarFraction,
    pub h_text: String,
    pub d_val: i64,
    pub palindromic: bool,
    pub attempts: u32,
}

const WEIGHT_PRIMES: [i64; 8] = [7, 11, 13, 17, 19, 23, 29, 31];

/// Whether no nonempty proper subset of the weights has the average slope.
pub fn weights_generic(sigma: &[Rat]) -> bool {
    let r = sigma.len();
    let total = sigma.iter().fold(Rat::ZERO, |a, s| &a + s);
    let tau = &total / &Rat::int(r as i64);
    (1..(1u64 << r) - 1).all(|mask| {
        let mut sum = Rat::ZERO;
        let mut size = 0i64;
        for (i, s) in sigma.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum = &sum + s;
                size += 1;
            }
        }
        !(&(&tau * &Rat::int(size)) - &sum).is_integer()
    })
}

fn draw_weights(rng: &mut ChaCha8Rng, r: u32) -> Vec<Rat> {
    let mut v: Vec<Rat> = (0..r as usize).map(|i| Rat::new(rng.gen_range(1..WEIGHT_PRIMES[i]), WEIGHT_PRIMES[i])).collect();
    v.sort();
    v
}

/// `P(t) = t^{2d} P(1/t)` for `t = th²`.
pub fn is_palindromic(h: &ScalarFraction, d: i64) -> Result<bool, Error> {
    let flipped = h.subst_monomial(&[(Var::Th, Mono::var(Var::Th, -1), Rat::ONE)])?.mul_mono(&Mono::var(Var::Th, 4 * d as i32));
    Ok(flipped.reduce() == h.reduce())
}

/// Poincaré data of semistable connections of class `(r, 1^r)` with one
/// pole of order n, for random generic weights.
pub fn ddp_poincare(g: u32, n: u32, r: u32, budget: Budget, seed: u64) -> Result<DdpResult, Error> {
    if r == 0 || r as usize > WEIGHT_PRIMES.len() {
        return Err(Error::Invalid(format!("rank {r} outside 1..={}", WEIGHT_PRIMES.len())));
    }
    let p = 0u32;
    let divisor = DivisorSpec::full(&[(p, n)])?;
    let gamma = GammaExponent::from_vectors(r, &[(p, vec![1; r as usize])])?;
    let zeta = NormalForm::new((1..=r).map(|j| {
        let mut v = vec![Rat::ZERO; n as usize];
        if n >= 2 {
            v[0] = Rat::int(j as i64);
        }
        ((p, j), v)
    }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=3 {
        let sigma = draw_weights(&mut rng, r);
        if !weights_generic(&sigma) {
            continue;
        }
        let weights = Weights::new(sigma.iter().enumerate().map(|(i, s)| ((p, i as u32 + 1), s.clone())));
        let q = StackQuery {
            g,
            divisor: divisor.clone(),
            gamma: gamma.clone(),
            d: 0,
            eps: Rat::ONE,
            zeta: zeta.clone(),
            sigma: Some(weights),
            kind: QueryKind::SemistableFull,
        };
        let value = e_p_conn(&q, Target::P, budget)?;
        let h = (&value * &"th^4 - 1".parse::<ScalarFraction>()?).reduce();
        let d_val = ddp_degree(r, n, g);
        return Ok(DdpResult {
            g,
            n,
            r,
            sigma,
            h_text: crate::specialize::display(&h)?,
            palindromic: is_palindromic(&h, d_val)?,
            h,
            d_val,
            attempts: attempt,
        });
    }
    Err(Error::Genericity("three weight draws in a row were not generic".into()))
}
