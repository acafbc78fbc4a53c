use irrmot_core::exactalg::{LaurentPoly, Mono, Rat, ScalarFraction, Var};
use irrmot_core::genfun::{l_univ, omega_univ, GenFunParams};
use irrmot_core::moduli::*;
use irrmot_core::series::{GammaExponent, GradedSeries, Trunc};
use irrmot_core::specialize::*;
use irrmot_core::Error;
use proptest::prelude::*;

fn f(s: &str) -> ScalarFraction {
    s.parse().unwrap()
}

fn flags(r: u32, v: &[u32]) -> GammaExponent {
    GammaExponent::from_vectors(r, &[(0, v.to_vec())]).unwrap()
}

fn swap_uv(x: &ScalarFraction) -> ScalarFraction {
    x.subst_monomial(&[(Var::Uh, Mono::var(Var::Vh, 1), Rat::ONE), (Var::Vh, Mono::var(Var::Uh, 1), Rat::ONE)]).unwrap().reduce()
}

#[test]
fn generator_images() {
    assert_eq!(specialize_value(&f("qh^2"), Target::E).unwrap(), f("uh^2*vh^2"));
    assert_eq!(display(&specialize_value(&f("qh^2"), Target::E).unwrap()).unwrap(), "u*v");
    assert_eq!(specialize_value(&f("qh^2"), Target::P).unwrap(), f("th^4"));
    for g in 0..=3u32 {
        let e = specialize_value(&ScalarFraction::from_poly(l_univ(g)), Target::E).unwrap();
        assert_eq!(e, f(&format!("(1 - uh^2*z)^{g}*(1 - vh^2*z)^{g}")), "g={g}");
        let p = specialize_value(&ScalarFraction::from_poly(l_univ(g)), Target::P).unwrap();
        assert_eq!(p, f(&format!("(1 - th^2*z)^{}", 2 * g)), "g={g}");
    }
    assert_eq!(specialize_value(&f("(1 - uh^2*z)*(1 - vh^2*z)"), Target::P).unwrap(), f("(1 - th^2*z)^2"));
}

#[test]
fn odd_half_powers_are_rejected() {
    let e = specialize_value(&f("qh"), Target::E).unwrap();
    assert!(matches!(halved(&e), Err(Error::FractionalPower(_))));
    let ok = specialize_value(&f("qh^2/(1 - qh^2)"), Target::P).unwrap();
    assert_eq!(halved(&ok).unwrap(), f("th^2/(1 - th^2)"));
}

fn route_cases() -> Vec<GenFunParams> {
    [(1, 0, 0), (1, 1, 1), (2, 1, 1), (1, 2, 1)]
        .into_iter()
        .map(|(g, delta, npts)| GenFunParams::new(g, (0..npts).collect(), delta, Trunc { r_max: 2, z_max: 10 }).unwrap())
        .collect()
}

#[test]
fn closed_forms_match_substitution() {
    for p in route_cases() {
        let univ = omega_univ(&p).unwrap();
        for t in [Target::E, Target::P] {
            let direct = omega_specialized(&p, t).unwrap();
            assert_eq!(direct.constant_term(), ScalarFraction::one());
            assert_eq!(direct.reduce(), specialize_series(&univ, t).unwrap().reduce(), "{p:?} {t:?}");
        }
    }
}

#[test]
fn poincare_single_cell_term() {
    for g in 1..=2u32 {
        let p = GenFunParams::new(g, vec![], 0, Trunc { r_max: 1, z_max: 12 }).unwrap();
        let s = omega_specialized(&p, Target::P).unwrap();
        let expected = f(&format!("(th^2 - z)^{}/((th^4 - 1)*(1 - z^2))", 2 * g));
        let series = irrmot_core::series::zexp::ZSeries::expand(&expected, 12).unwrap().nonnegative().unwrap();
        let r1 = GammaExponent::single_flag(1, &[]);
        for (d, c) in series.iter().enumerate() {
            assert_eq!(&s.coefficient(&r1, d as i64).unwrap(), c, "g={g} d={d}");
        }
    }
}

fn small_queries() -> Vec<StackQuery> {
    let mk = |g: u32, n: u32, gamma: GammaExponent, tops: bool| StackQuery {
        g,
        divisor: DivisorSpec::full(&[(0, n)]).unwrap(),
        d: 0,
        eps: Rat::ONE,
        zeta: NormalForm::new((1..=gamma.rank()).map(|j| {
            let mut v = vec![Rat::ZERO; n as usize];
            if tops && n >= 2 {
                v[0] = Rat::int(j as i64);
            }
            ((0, j), v)
        })),
        gamma,
        sigma: None,
        kind: QueryKind::Full,
    };
    vec![
        mk(1, 1, flags(1, &[1]), false),
        mk(2, 2, flags(1, &[1]), true),
        mk(1, 1, flags(2, &[1, 1]), false),
        mk(1, 1, flags(2, &[2]), false),
        mk(1, 2, flags(2, &[1, 1]), true),
    ]
}

#[test]
fn specialized_classes_two_routes() {
    for q in small_queries() {
        for t in [Target::E, Target::P] {
            let a = e_p_conn(&q, t, Budget::default()).unwrap();
            let b = e_p_conn_direct(&q, t, Budget::default()).unwrap();
            assert_eq!(a, b, "{q:?} {t:?}");
            halved(&a).unwrap();
        }
    }
}

#[test]
fn e_classes_are_symmetric_in_u_and_v() {
    for q in small_queries() {
        let e = e_p_conn(&q, Target::E, Budget::default()).unwrap();
        assert_eq!(swap_uv(&e), e, "{q:?}");
    }
}

#[test]
fn rank_one_poincare_value() {
    for g in 1..=3u32 {
        for n in 1..=3u32 {
            let q = StackQuery {
                g,
                divisor: DivisorSpec::full(&[(0, n)]).unwrap(),
                gamma: flags(1, &[1]),
                d: 0,
                eps: Rat::ONE,
                zeta: NormalForm::new([((0, 1), vec![Rat::ZERO; n as usize])]),
                sigma: None,
                kind: QueryKind::Full,
            };
            let p = e_p_conn(&q, Target::P, Budget::default()).unwrap();
            assert_eq!(p, f(&format!("th^{}*(1 - th^2)^{}/(th^4 - 1)", 4 * g, 2 * g)), "g={g} n={n}");
        }
    }
}

#[test]
fn empty_class_specializes_to_zero() {
    let q = StackQuery {
        g: 1,
        divisor: DivisorSpec::full(&[(0, 1)]).unwrap(),
        gamma: flags(1, &[1]),
        d: 1,
        eps: Rat::ONE,
        zeta: NormalForm::new([((0, 1), vec![Rat::ZERO])]),
        sigma: None,
        kind: QueryKind::Full,
    };
    assert!(e_p_conn(&q, Target::E, Budget::default()).unwrap().is_zero());
}

fn arb_coeff() -> impl Strategy<Value = ScalarFraction> {
    (-3i64..=3, 0i32..3, -1i32..2).prop_map(|(c, qe, ae)| {
        ScalarFraction::from_poly(LaurentPoly::term(Mono::var(Var::Qh, qe).mul(&Mono::var(Var::Alpha(1), ae)), Rat::int(c)))
    })
}

fn arb_series() -> impl Strategy<Value = GradedSeries> {
    prop::collection::vec((1u32..=2, 0u32..=2, arb_coeff()), 1..5).prop_map(|terms| {
        let mut s = GradedSeries::zero(Trunc { r_max: 2, z_max: 2 });
        for (r, d, c) in terms {
            s.add_term(GammaExponent::single_flag(r, &[]), d, c);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn specialization_commutes_with_operations(a in arb_series(), b in arb_series(), n in 1u32..4) {
        for t in [Target::E, Target::P] {
            let sp = |s: &GradedSeries| specialize_series(s, t).unwrap().reduce();
            prop_assert_eq!(sp(&a.mul(&b).unwrap()), sp(&a).mul(&sp(&b)).unwrap().reduce());
            prop_assert_eq!(sp(&a.adams(n)), sp(&a).adams(n).reduce());
            prop_assert_eq!(sp(&a.pleth_exp().unwrap()), sp(&a).pleth_exp().unwrap().reduce());
            let one_plus = GradedSeries::one(a.trunc()).add(&a).unwrap();
            prop_assert_eq!(sp(&one_plus.pleth_log().unwrap()), sp(&one_plus).pleth_log().unwrap().reduce());
            let keep = |g: &GammaExponent, d: u32| (g.rank() + d) % 2 == 0;
            prop_assert_eq!(sp(&a.filter(keep)), sp(&a).filter(keep).reduce());
        }
    }
}
