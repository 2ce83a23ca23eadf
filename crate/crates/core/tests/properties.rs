use proptest::prelude::*;

use incidence_core::anchored::{anchored_incident, anchored_through_pair, lifted_contains, LiftedCircle};
use incidence_core::dual::{dual_incidence, dual_on_plane, encode_power, plane_to_power};
use incidence_core::engine::{count, CountOptions};
use incidence_core::generators::{gen, GenKind, GenSpec};
use incidence_core::kernel::{format_rational, isolate_union, parse_rational, rat, resultant, Poly, Rational, UniPoly, Vec2, Vec3};
use incidence_core::tangency::{common_circle, is_tangent, power, Circle2, DirectedPoint};

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=50).prop_map(|(n, d)| rat(n, d))
}

fn vec2() -> impl Strategy<Value = Vec2> {
    (rational(), rational()).prop_map(|(x, y)| Vec2::new(x, y))
}

fn directed() -> impl Strategy<Value = DirectedPoint> {
    (vec2(), rational()).prop_map(|(p, u)| DirectedPoint::new(p, u))
}

/// A directed point together with a circle tangent to it at a signed
/// offset `t` along its normal.
fn tangent_pair() -> impl Strategy<Value = (DirectedPoint, Circle2)> {
    (directed(), rational().prop_filter("nonzero", |t| *t != rat(0, 1))).prop_map(|(dp, t)| {
        let n = dp.normal();
        let c = Circle2::new(&dp.p + &n.scale(&t), &t * &t * n.norm2()).unwrap();
        (dp, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_text_round_trip(q in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn three_tangency_views_agree(dp in directed(), c in (vec2(), rational()).prop_filter_map("r2 > 0", |(w, r)| Circle2::new(w, &r * &r).ok())) {
        let a = is_tangent(&dp, &c);
        prop_assert_eq!(a, dual_incidence(&dp, &c));
        prop_assert_eq!(a, lifted_contains(&LiftedCircle::new(c), &dp.as_space_point()));
    }

    #[test]
    fn planted_tangency_seen_by_all_views((dp, c) in tangent_pair()) {
        prop_assert!(is_tangent(&dp, &c));
        prop_assert!(dual_incidence(&dp, &c));
        prop_assert!(lifted_contains(&LiftedCircle::new(c), &dp.as_space_point()));
    }

    #[test]
    fn common_circle_is_tangent_to_both(a in directed(), b in directed()) {
        prop_assume!(a != b);
        if let Some(c) = common_circle(&a, &b).unwrap() {
            prop_assert!(is_tangent(&a, &c) && is_tangent(&b, &c));
        }
    }

    #[test]
    fn power_plane_round_trip(a in rational(), b in rational(), d in rational(), w in vec2(), r in rational()) {
        let pp = plane_to_power(a, b, d);
        prop_assert_eq!(encode_power(&pp.w(), &pp.rho()), pp.clone());
        let c = Circle2::new(w, &r * &r + rat(1, 1)).unwrap();
        prop_assert_eq!(dual_on_plane(&c, &pp), power(&pp.w(), &c) == pp.rho());
    }

    #[test]
    fn sturm_counts_distinct_integer_roots(roots in proptest::collection::vec(-30i64..=30, 1..8)) {
        let mut p = UniPoly::one();
        for r in &roots {
            p = &p * &UniPoly::from_ints(&[-r, 1]);
        }
        let mut distinct = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(p.real_root_count().unwrap(), distinct.len());
        let iv = p.isolate_real_roots().unwrap();
        prop_assert_eq!(iv.len(), distinct.len());
    }

    #[test]
    fn union_isolation_counts_shared_roots_once(a in proptest::collection::vec(-9i64..=9, 1..5), b in proptest::collection::vec(-9i64..=9, 1..5)) {
        let poly = |rs: &[i64]| rs.iter().fold(UniPoly::one(), |p, r| &p * &UniPoly::from_ints(&[-r, 1]));
        let mut all: Vec<i64> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        all.dedup();
        let iv = isolate_union(&[poly(&a), poly(&b)]).unwrap();
        prop_assert_eq!(iv.len(), all.len());
        for w in iv.windows(2) {
            prop_assert!(w[0].1 <= w[1].0);
        }
    }

    #[test]
    fn resultant_vanishes_on_shared_roots(r in -6i64..=6, s in -6i64..=6, k in 1i64..=5) {
        // p = (x - y)(x - r), q = (x - k y)(x - s); at y = 0 both have root 0
        let x = Poly::<2>::var(0);
        let y = Poly::<2>::var(1);
        let c = |v: i64| Poly::<2>::constant(rat(v, 1));
        let p = &(&x - &y) * &(&x - &c(r));
        let q = &(&x - &y.scale(&rat(k, 1))) * &(&x - &c(s));
        let res = resultant(&p, &q, 0).unwrap();
        prop_assert_eq!(res.eval(&[rat(0, 1), rat(0, 1)]), rat(0, 1));
    }

    #[test]
    fn anchored_pair_circle_is_incident(a in (-9i64..=9, -9i64..=9, -9i64..=9), b in (-9i64..=9, -9i64..=9, -9i64..=9)) {
        let p = Vec3::new(rat(a.0, 7), rat(a.1, 7), rat(a.2, 7));
        let q = Vec3::new(rat(b.0, 7), rat(b.1, 7), rat(b.2, 7));
        prop_assume!(!p.is_zero() && !q.is_zero() && !p.cross(&q).is_zero());
        if let Some(g) = anchored_through_pair(&p, &q).unwrap() {
            prop_assert!(anchored_incident(&p, &g) && anchored_incident(&q, &g));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn engine_modes_agree(seed in 0u64..1000, kind in prop::sample::select(GenKind::ALL.to_vec()), m in 1usize..60, n in 1usize..60) {
        let (m, n) = if kind == GenKind::Pencil { (m.min(n), m.max(n)) } else { (m, n) };
        let g = gen(&GenSpec::new(kind, m, n, seed).with_density(0.3)).unwrap();
        let e = count(&g.instance, &CountOptions::exact()).unwrap();
        let p = count(&g.instance, &CountOptions::prefilter()).unwrap();
        prop_assert_eq!(&e.per_point, &p.per_point);
        prop_assert_eq!(e.total, p.total);
        prop_assert!(e.histograms_consistent());
        prop_assert!(e.total as usize >= g.planted_count());
    }
}
