use irrmot_core::exactalg::{Mono, Rat, ScalarFraction, Var};
use irrmot_core::series::zexp::ZSeries;
use irrmot_core::series::{GammaExponent, GradedSeries, Trunc};
use proptest::prelude::*;

fn f(s: &str) -> ScalarFraction {
    s.parse().unwrap()
}

fn w(r: u32) -> GammaExponent {
    GammaExponent::single_flag(r, &[])
}

fn tr(r_max: u32, z_max: u32) -> Trunc {
    Trunc { r_max, z_max }
}

fn mono_series(t: Trunc, terms: &[(u32, u32, &str)]) -> GradedSeries {
    let mut s = GradedSeries::zero(t);
    for (r, d, c) in terms {
        s.add_term(w(*r), *d, f(c));
    }
    s
}

#[test]
fn arithmetic_examples() {
    let t = tr(2, 3);
    let a = mono_series(t, &[(0, 0, "1"), (1, 0, "1")]);
    let b = mono_series(t, &[(0, 0, "1"), (1, 0, "-1")]);
    assert_eq!(a.mul(&b).unwrap(), mono_series(t, &[(0, 0, "1"), (2, 0, "-1")]));
    let c = mono_series(t, &[(2, 0, "1")]);
    assert!(c.mul(&c).unwrap().is_zero());
    let x = mono_series(t, &[(1, 1, "qh")]);
    let y = mono_series(t, &[(2, 0, "a1")]);
    assert_eq!(x.add(&y).unwrap().len(), 2);
    assert!(x.mul(&GradedSeries::one(tr(2, 4))).is_err());
}

#[test]
fn invert_examples() {
    let t = tr(1, 6);
    let a = mono_series(t, &[(0, 0, "1"), (0, 1, "-1")]);
    let inv = a.invert_unit().unwrap();
    for d in 0..=6 {
        assert_eq!(inv.coefficient(&w(0), d).unwrap(), ScalarFraction::one());
    }
    let b = mono_series(t, &[(0, 0, "1"), (0, 1, "-qh^2")]);
    let inv = b.invert_unit().unwrap();
    for d in 0..=6 {
        assert_eq!(inv.coefficient(&w(0), d).unwrap(), f(&format!("qh^{}", 2 * d)));
    }
    let c = mono_series(t, &[(0, 0, "2-qh"), (1, 0, "a1"), (0, 2, "z")]);
    assert_eq!(c.mul(&c.invert_unit().unwrap()).unwrap(), GradedSeries::one(t));
    assert!(mono_series(t, &[(1, 0, "1")]).invert_unit().is_err());
}

#[test]
fn adams_examples() {
    let t = tr(3, 2);
    let a = mono_series(t, &[(1, 0, "qh")]);
    assert_eq!(a.adams(2), mono_series(t, &[(2, 0, "qh^2")]));
    assert_eq!(a.adams(1), a);
}

#[test]
fn exp_log_examples() {
    let t = tr(4, 0);
    let e = mono_series(t, &[(1, 0, "1")]).pleth_exp().unwrap();
    for r in 0..=4 {
        assert_eq!(e.coefficient(&w(r), 0).unwrap(), ScalarFraction::one());
    }
    let eq = mono_series(t, &[(1, 0, "qh^2")]).pleth_exp().unwrap();
    for r in 0..=4 {
        assert_eq!(eq.coefficient(&w(r), 0).unwrap(), f(&format!("qh^{}", 2 * r)));
    }
    assert_eq!(GradedSeries::zero(t).pleth_exp().unwrap(), GradedSeries::one(t));
    assert_eq!(e.pleth_log().unwrap(), mono_series(t, &[(1, 0, "1")]));
    assert!(GradedSeries::one(t).pleth_log().unwrap().is_zero());
    assert!(GradedSeries::one(t).pleth_exp().is_err());
    assert!(mono_series(t, &[(0, 0, "2")]).pleth_log().is_err());
}

#[test]
fn power_structure_examples() {
    let t = tr(4, 0);
    let geo = mono_series(t, &[(1, 0, "1")]).pleth_exp().unwrap();
    assert_eq!(geo.power_structure(&ScalarFraction::one()).unwrap(), geo);
    let p = geo.power_structure(&f("qh^2")).unwrap();
    assert_eq!(p, mono_series(t, &[(1, 0, "qh^2")]).pleth_exp().unwrap());
    let pp = p.power_structure(&f("a1")).unwrap();
    assert_eq!(pp, geo.power_structure(&f("qh^2*a1")).unwrap());
}

#[test]
fn rescale_filter_and_queries() {
    let t = tr(2, 6);
    let a = mono_series(t, &[(0, 0, "1"), (1, 1, "a1"), (2, 0, "qh")]);
    let r = a.rescale_w(&Mono::var(Var::Qh, -1), &Rat::ONE, 0);
    assert_eq!(r, mono_series(t, &[(0, 0, "1"), (1, 1, "a1/qh"), (2, 0, "qh^-1")]));
    let s = a.rescale_w(&Mono::ONE, &Rat::ONE, 2);
    assert_eq!(s, mono_series(t, &[(0, 0, "1"), (1, 3, "a1"), (2, 4, "qh")]));
    assert_eq!(a.rescale_w(&Mono::ONE, &Rat::ONE, 0), a);
    assert_eq!(a.filter(|_, _| true), a);
    let e = mono_series(tr(3, 0), &[(1, 0, "1")]).pleth_exp().unwrap();
    assert_eq!(e.filter(|g, d| g.rank() == 0 && d == 0), GradedSeries::one(tr(3, 0)));
    assert!(a.coefficient(&w(3), 0).is_err());
    assert!(a.coefficient(&w(1), 7).is_err());
    assert!(a.coefficient(&w(1), -1).is_err());
}

#[test]
fn eval_z_one_examples() {
    let t = tr(1, 10);
    let a = mono_series(t, &[(0, 0, "1"), (1, 0, "1"), (1, 1, "1"), (1, 2, "1")]);
    let v = a.eval_z_one(5).unwrap();
    assert_eq!(v[&w(0)], ScalarFraction::one());
    assert_eq!(v[&w(1)], ScalarFraction::int(3));
    let mut geo = GradedSeries::zero(t);
    for d in 0..=10 {
        geo.add_term(w(1), d, ScalarFraction::one());
    }
    assert!(geo.eval_z_one(5).is_err());
}

#[test]
fn z_expansion_of_factors() {
    // 1/((z^2 - qh^2)(1 - qh^4)) in nonnegative powers of z
    let x = f("1/((z^2-qh^2)*(1-qh^4))");
    let s = ZSeries::expand(&x, 8).unwrap();
    let c = s.nonnegative().unwrap();
    for d in 0..=8 {
        let expect = if d % 2 == 0 { f(&format!("-qh^{}/(1-qh^4)", -2 - d)) } else { ScalarFraction::zero() };
        assert_eq!(c[d as usize], expect, "d={d}");
    }
    let y = f("(1-a1*z)/(1-a1^-1*qh^2*z+z^3)");
    let s = ZSeries::expand(&y, 6).unwrap();
    let back = s.mul(&ZSeries::from_poly(f("1-a1^-1*qh^2*z+z^3").num(), 6), 6);
    assert_eq!(back.nonnegative().unwrap()[0], ScalarFraction::one());
    assert_eq!(back.nonnegative().unwrap()[1], f("-a1"));
    for d in 2..=6 {
        assert!(back.coeff(d).is_zero());
    }
}

#[test]
fn json_roundtrip() {
    let t = tr(2, 3);
    let g = GammaExponent::new(2, [(0, 1, 1), (0, 2, 1)]).unwrap();
    let mut a = GradedSeries::zero(t);
    a.add_term(g, 1, f("(qh-1)/(1+qh^2)"));
    a.add_term(GammaExponent::zero(), 0, ScalarFraction::one());
    let j = serde_json::to_string(&a.to_json()).unwrap();
    let back = GradedSeries::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back, a);
    assert!(j.contains("\"parts\":[[0,1,1],[0,2,1]]"));
}

fn coeff_strategy() -> impl Strategy<Value = ScalarFraction> {
    prop_oneof![
        Just(f("1")),
        Just(f("-1")),
        Just(f("qh")),
        Just(f("a1")),
        Just(f("1/(1-qh^2)")),
        Just(f("2*qh-a1^-1")),
        Just(f("1/2")),
    ]
}

fn gamma_strategy() -> impl Strategy<Value = GammaExponent> {
    prop_oneof![
        Just(GammaExponent::new(1, [(0, 1, 1)]).unwrap()),
        Just(GammaExponent::new(1, [(0, 2, 1)]).unwrap()),
        Just(GammaExponent::new(2, [(0, 1, 1), (0, 2, 1)]).unwrap()),
        Just(GammaExponent::new(2, [(0, 1, 2)]).unwrap()),
        Just(GammaExponent::new(3, [(0, 1, 2), (0, 2, 1)]).unwrap()),
    ]
}

fn series_strategy(t: Trunc) -> impl Strategy<Value = GradedSeries> {
    prop::collection::vec((gamma_strategy(), 0u32..=t.z_max, coeff_strategy()), 0..4).prop_map(move |v| {
        let mut s = GradedSeries::zero(t);
        for (g, d, c) in v {
            s.add_term(g, d, c);
        }
        s
    })
}

const T3: Trunc = Trunc { r_max: 3, z_max: 2 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_log_roundtrip(a in series_strategy(T3)) {
        prop_assert_eq!(a.pleth_exp().unwrap().pleth_log().unwrap(), a.clone());
        let u = a.pleth_exp().unwrap();
        prop_assert_eq!(u.pleth_log().unwrap().pleth_exp().unwrap(), u);
    }

    #[test]
    fn exp_is_additive(a in series_strategy(T3), b in series_strategy(T3)) {
        let lhs = a.add(&b).unwrap().pleth_exp().unwrap();
        let rhs = a.pleth_exp().unwrap().mul(&b.pleth_exp().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn adams_is_a_ring_map(a in series_strategy(T3), b in series_strategy(T3), n in 1u32..=3) {
        let one = GradedSeries::one(T3);
        let a1 = a.add(&one).unwrap();
        prop_assert_eq!(a1.mul(&b).unwrap().adams(n), a1.adams(n).mul(&b.adams(n)).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().adams(n), a.adams(n).add(&b.adams(n)).unwrap());
        prop_assert_eq!(a.adams(2).adams(3), a.adams(6));
    }

    #[test]
    fn filter_rescale_linear(a in series_strategy(T3), b in series_strategy(T3)) {
        let p = |g: &GammaExponent, d: u32| (g.mult(0, 1) + d) % 2 == 0;
        prop_assert_eq!(a.add(&b).unwrap().filter(p), a.filter(p).add(&b.filter(p)).unwrap());
        let m = Mono::var(Var::Qh, -1);
        prop_assert_eq!(
            a.add(&b).unwrap().rescale_w(&m, &Rat::int(-1), 0),
            a.rescale_w(&m, &Rat::int(-1), 0).add(&b.rescale_w(&m, &Rat::int(-1), 0)).unwrap()
        );
    }

    #[test]
    fn coefficient_of_product_is_convolution(a in series_strategy(T3), b in series_strategy(T3)) {
        let one = GradedSeries::one(T3);
        let a = a.add(&one).unwrap();
        let p = a.mul(&b).unwrap();
        let targets: Vec<GammaExponent> = (0..=3).flat_map(|r| GammaExponent::all_of_rank(r, &[0], 2)).collect();
        for g in &targets {
            for d in 0..=2u32 {
                let mut s = ScalarFraction::zero();
                for (ga, da, ca) in a.iter() {
                    for (gb, db, cb) in b.iter() {
                        if &ga.add(gb) == g && da + db == d {
                            s = &s + &(ca * cb);
                        }
                    }
                }
                prop_assert_eq!(p.coefficient(g, d as i64).unwrap(), s);
            }
        }
    }

    #[test]
    fn exp_respects_summand_closed_filters(a in series_strategy(T3), b in series_strategy(T3)) {
        // flag-2-free exponents are closed under taking summands
        let keep = |g: &GammaExponent, _d: u32| g.mult(0, 2) == 0;
        let merged = a.filter(keep).add(&b.filter(|g, d| !keep(g, d))).unwrap();
        let ea = a.pleth_exp().unwrap().filter(keep);
        let em = merged.pleth_exp().unwrap().filter(keep);
        prop_assert_eq!(ea, em);
    }
}
