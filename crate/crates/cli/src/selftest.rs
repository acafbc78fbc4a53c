//! Invariant suite behind `irrmot selftest`.

use irrmot_core::exactalg::{Mono, Rat, ScalarFraction, Var};
use irrmot_core::genfun::{compare_kernels, l_univ_at, omega_univ, GenFunParams};
use irrmot_core::moduli::{self, Budget, ChiMode, DivisorSpec, NormalForm, QueryKind, StackQuery};
use irrmot_core::series::{GammaExponent, Trunc};
use irrmot_core::specialize::{omega_specialized, specialize_series, Target};
use irrmot_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cache::KernelCache;

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

const KERNEL_CASES: [(u32, u32, u32); 5] = [(1, 0, 0), (1, 1, 1), (1, 2, 1), (2, 0, 0), (2, 1, 1)];

fn kernel_params(rmax: u32, b: Budget) -> Result<Vec<GenFunParams>, Error> {
    KERNEL_CASES.iter().map(|&(g, delta, npts)| GenFunParams::new(g, (0..npts).collect(), delta, Trunc { r_max: rmax, z_max: b.z_max })).collect()
}

fn flags(r: u32, v: &[u32]) -> GammaExponent {
    GammaExponent::from_vectors(r, &[(0, v.to_vec())]).expect("valid flag vector")
}

fn query(g: u32, n: u32, gamma: GammaExponent, d: i64, residues: &[Rat]) -> StackQuery {
    let zeta = NormalForm::new(residues.iter().enumerate().map(|(i, res)| {
        let j = i as u32 + 1;
        let mut v = vec![Rat::ZERO; n as usize];
        if n >= 2 {
            v[0] = Rat::int(j as i64);
        }
        let last = n as usize - 1;
        v[last] = &v[last] + res;
        ((0, j), v)
    }));
    StackQuery { g, divisor: DivisorSpec::full(&[(0, n)]).expect("valid divisor"), gamma, d, eps: Rat::ONE, zeta, sigma: None, kind: QueryKind::Full }
}

fn queries() -> Vec<StackQuery> {
    vec![
        query(1, 1, flags(1, &[1]), 0, &[Rat::ZERO]),
        query(2, 2, flags(1, &[1]), 0, &[Rat::ZERO]),
        query(1, 1, flags(2, &[1, 1]), 0, &[Rat::ZERO, Rat::ZERO]),
        query(1, 1, flags(2, &[2]), 0, &[Rat::ZERO]),
        query(1, 2, flags(2, &[1, 1]), 0, &[Rat::ZERO, Rat::ZERO]),
    ]
}

fn preload(cache: &KernelCache, q: &StackQuery, b: Budget) -> Result<(), Error> {
    if let Some(p) = moduli::query_kernel_params(q, b)? {
        cache.load(&p)?;
    }
    Ok(())
}

fn mellit(cache: &KernelCache, rmax: u32, b: Budget) -> Result<(), String> {
    for p in kernel_params(rmax, b).map_err(|e| e.to_string())? {
        let (k, _) = cache.load(&p).map_err(|e| e.to_string())?;
        let rep = compare_kernels(&p, &k, b.window);
        if !rep.all_equal() {
            return Err(format!("kernels differ or are uncertified for g={} δ={} points={:?}", p.g, p.delta, p.points));
        }
    }
    Ok(())
}

fn substitution(b: Budget) -> Result<(), String> {
    for p in kernel_params(2, Budget { z_max: b.z_max.min(10), ..b }).map_err(|e| e.to_string())? {
        let univ = omega_univ(&p).map_err(|e| e.to_string())?;
        for t in [Target::E, Target::P] {
            let direct = omega_specialized(&p, t).map_err(|e| e.to_string())?.reduce();
            let subst = specialize_series(&univ, t).map_err(|e| e.to_string())?.reduce();
            if direct != subst {
                return Err(format!("{t:?} closed form differs for g={} δ={}", p.g, p.delta));
            }
        }
    }
    Ok(())
}

fn rank_one(cache: &KernelCache, b: Budget) -> Result<(), String> {
    for g in 1..=2u32 {
        for n in 1..=2u32 {
            let q = query(g, n, flags(1, &[1]), 0, &[Rat::ZERO]);
            preload(cache, &q, b).map_err(|e| e.to_string())?;
            let got = moduli::conn_class(&q, b).map_err(|e| e.to_string())?;
            let l1 = ScalarFraction::from_poly(l_univ_at(g, &Mono::ONE));
            let want = l1.mul_mono(&Mono::var(Var::Qh, 2 * g as i32)).checked_div(&"qh^2 - 1".parse().expect("literal")).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("rank one g={g} n={n}: {got}"));
            }
        }
    }
    Ok(())
}

fn graded_limit(cache: &KernelCache, b: Budget) -> Result<(), String> {
    for q in queries() {
        preload(cache, &q, b).map_err(|e| e.to_string())?;
        let s = moduli::graded_class_stable(&q, b).map_err(|e| e.to_string())?;
        if s.value != moduli::conn_class(&q, b).map_err(|e| e.to_string())? {
            return Err(format!("graded limit differs for rank {} g={}", q.gamma.rank(), q.g));
        }
    }
    Ok(())
}

fn routes(cache: &KernelCache, b: Budget) -> Result<(), String> {
    for q in queries() {
        preload(cache, &q, b).map_err(|e| e.to_string())?;
        for t in [Target::E, Target::P] {
            let a = moduli::e_p_conn(&q, t, b).map_err(|e| e.to_string())?;
            let d = moduli::e_p_conn_direct(&q, t, b).map_err(|e| e.to_string())?;
            if a != d {
                return Err(format!("{t:?} routes differ for rank {} g={}", q.gamma.rank(), q.g));
            }
        }
    }
    Ok(())
}

fn random_gamma(rng: &mut ChaCha8Rng, points: &[u32]) -> GammaExponent {
    let r = rng.gen_range(1..=4u32);
    let per: Vec<(u32, Vec<u32>)> = points
        .iter()
        .map(|&x| {
            let a = rng.gen_range(0..=r);
            let c = rng.gen_range(0..=r - a);
            (x, vec![a, c, r - a - c])
        })
        .collect();
    GammaExponent::from_vectors(r, &per).expect("valid flag vectors")
}

fn euler_char(cases: u32) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..cases {
        let npts = rng.gen_range(1..=2u32);
        let entries: Vec<String> = (0..npts)
            .map(|x| {
                let n = rng.gen_range(1..=3u32);
                format!("{x}:{n}:{}", rng.gen_range(0..=n))
            })
            .collect();
        let refs: Vec<&str> = entries.iter().map(String::as_str).collect();
        let div = DivisorSpec::parse(&refs).map_err(|e| e.to_string())?;
        let pts = div.support();
        let (g1, g2) = (random_gamma(&mut rng, &pts), random_gamma(&mut rng, &pts));
        let g = rng.gen_range(0..4u32);
        let (d1, d2) = (rng.gen_range(-5..5i64), rng.gen_range(-5..5i64));
        let (t1, td1) = moduli::twist(&g1, d1, &div);
        let lhs = -moduli::euler_pairing(&g2, d2, &t1, td1, g, &div) - moduli::euler_pairing(&g1, d1, &g2, d2, g, &div);
        let chi = |x: &GammaExponent| moduli::chi(x, g, &div, ChiMode::Partial);
        if 2 * lhs != chi(&g1.add(&g2)) - chi(&g1) - chi(&g2) {
            return Err(format!("pairing identity fails for divisor {entries:?}"));
        }
    }
    Ok(())
}

fn lambda_ring() -> Result<(), String> {
    let p = GenFunParams::new(1, vec![0], 1, Trunc { r_max: 2, z_max: 6 }).map_err(|e| e.to_string())?;
    let omega = omega_univ(&p).map_err(|e| e.to_string())?;
    let log = omega.pleth_log().map_err(|e| e.to_string())?;
    if log.pleth_exp().map_err(|e| e.to_string())?.reduce() != omega.reduce() {
        return Err("Exp(Log Ω) ≠ Ω".into());
    }
    let lhs = omega.mul(&omega).map_err(|e| e.to_string())?.adams(2).reduce();
    let rhs = omega.adams(2).mul(&omega.adams(2)).map_err(|e| e.to_string())?.reduce();
    if lhs != rhs {
        return Err("ψ₂ is not multiplicative".into());
    }
    let two = log.add(&log).map_err(|e| e.to_string())?;
    let sq = omega.mul(&omega).map_err(|e| e.to_string())?;
    if two.pleth_exp().map_err(|e| e.to_string())?.reduce() != sq.reduce() {
        return Err("Exp is not additive-to-multiplicative".into());
    }
    Ok(())
}

pub fn run(cache: &KernelCache, rmax: u32, b: Budget) -> Result<Report, Error> {
    let results: Vec<(&str, Result<(), String>)> = vec![
        ("kernels-agree-at-z-one", mellit(cache, rmax, b)),
        ("closed-forms-match-substitution", substitution(b)),
        ("rank-one-matches-jacobian", rank_one(cache, b)),
        ("graded-limit-equals-class", graded_limit(cache, b)),
        ("specialization-routes-agree", routes(cache, b)),
        ("euler-pairing-identity", euler_char(500)),
        ("lambda-ring-identities", lambda_ring()),
    ];
    let checks: Vec<Check> = results.into_iter().map(|(name, r)| Check { name: name.into(), pass: r.is_ok(), detail: r.err() }).collect();
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(Report { checks, all_pass })
}
