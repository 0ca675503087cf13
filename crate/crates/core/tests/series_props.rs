use proptest::prelude::*;
use weyl_q::series::{rat, LogSeries, ParamPoly, Parity, Rat};

const ORDER: usize = 6;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn param_poly() -> impl Strategy<Value = ParamPoly> {
    prop::collection::vec(small_rat(), 0..3).prop_map(ParamPoly::from_coeffs)
}

fn coeffs(even: bool) -> impl Strategy<Value = Vec<ParamPoly>> {
    prop::collection::vec(param_poly(), ORDER + 1).prop_map(move |mut v| {
        if even {
            for (k, c) in v.iter_mut().enumerate() {
                if k % 2 == 1 {
                    *c = ParamPoly::zero();
                }
            }
        }
        v
    })
}

fn series(even: bool, log: bool) -> impl Strategy<Value = LogSeries> {
    (coeffs(even), coeffs(even)).prop_map(move |(a, b)| {
        let b = if log { b } else { vec![ParamPoly::zero(); ORDER + 1] };
        let parity = if even { Parity::EvenOnly } else { Parity::Unrestricted };
        LogSeries::from_parts(ORDER, a, b, parity).unwrap()
    })
}

fn unit() -> impl Strategy<Value = LogSeries> {
    (series(false, false), small_rat().prop_filter("nonzero", |c| *c != rat(0, 1))).prop_map(
        |(s, c)| {
            let mut a = s.a_coeffs().to_vec();
            a[0] = ParamPoly::constant(c);
            LogSeries::from_parts(ORDER, a, s.b_coeffs().to_vec(), s.parity()).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_commutes_and_associates(a in series(false, true), b in series(false, true), c in series(false, true)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn mul_ring_axioms(a in series(false, true), b in series(false, false), c in series(false, false)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c)).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()));
    }

    #[test]
    fn leibniz(a in series(false, true), b in series(false, false)) {
        let lhs = a.mul(&b).unwrap().apply_xdx();
        let rhs = a.apply_xdx().mul(&b).unwrap().add(&a.mul(&b.apply_xdx()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parity_preserved(a in series(true, true), b in series(true, false), u in unit()) {
        prop_assert_eq!(a.add(&b).parity(), Parity::EvenOnly);
        prop_assert_eq!(a.mul(&b).unwrap().parity(), Parity::EvenOnly);
        prop_assert_eq!(a.apply_xdx().parity(), Parity::EvenOnly);
        prop_assert!(a.mul(&b).unwrap().is_even_valued());
        let even_unit = LogSeries::from_parts(
            ORDER,
            u.a_coeffs().iter().enumerate().map(|(k, c)| if k % 2 == 1 { ParamPoly::zero() } else { c.clone() }).collect(),
            vec![ParamPoly::zero(); ORDER + 1],
            Parity::EvenOnly,
        ).unwrap();
        let r = even_unit.reciprocal().unwrap();
        prop_assert_eq!(r.parity(), Parity::EvenOnly);
        prop_assert!(r.is_even_valued());
    }

    #[test]
    fn reciprocal_round_trip(u in unit()) {
        let prod = u.mul(&u.reciprocal().unwrap()).unwrap();
        prop_assert!(prod.agrees_with(&LogSeries::one(ORDER)));
    }

    #[test]
    fn double_log_rejected(a in series(false, true), b in series(false, true)) {
        prop_assume!(a.has_log() && b.has_log());
        prop_assert!(a.mul(&b).is_err());
    }
}

#[test]
fn spec_examples() {
    let one_plus = LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(1, 1)]);
    let one_minus = LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(-1, 1)]);
    assert_eq!(one_plus.add(&one_minus), LogSeries::constant(4, ParamPoly::constant(rat(2, 1))));
    assert_eq!(
        one_plus.mul(&one_minus).unwrap(),
        LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(-1, 1)])
    );
    let w = LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(-1, 4)]);
    assert_eq!(w.reciprocal().unwrap().mul(&w).unwrap(), LogSeries::one(4));
    let half = LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(-1, 2)]);
    assert_eq!(
        half.reciprocal().unwrap(),
        LogSeries::from_rats(4, &[rat(1, 1), rat(0, 1), rat(1, 2), rat(0, 1), rat(1, 4)])
    );
    let l = LogSeries::log_monomial(6, 4, ParamPoly::one());
    assert_eq!(
        l.apply_xdx(),
        LogSeries::log_monomial(6, 4, ParamPoly::constant(rat(4, 1)))
            .add(&LogSeries::monomial(6, 4, ParamPoly::one()))
    );
    let mu_x2 = LogSeries::monomial(4, 2, ParamPoly::mu());
    assert_eq!(LogSeries::one(4).add(&mu_x2).a(2), ParamPoly::mu());
    assert!(LogSeries::from_rats(4, &[rat(0, 1), rat(1, 1)]).reciprocal().is_err());
}
