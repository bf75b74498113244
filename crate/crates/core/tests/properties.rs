use hierarch::golden::GoldenNumber;
use hierarch::sliding_block::{BlockMap, SlidingBlockCode};
use hierarch::symbolic::{subwindows, Window};
use hierarch::tiling_line::{tiling_metric, LineTiling, TileSpec};
use hierarch::{Alphabet, Dimension, Pattern, PeriodicConfig, Symbol};
use num_traits::Zero;
use proptest::prelude::*;

fn golden() -> impl Strategy<Value = GoldenNumber> {
    (-50i64..50, 1i64..12, -50i64..50, 1i64..12).prop_map(|(a, b, c, d)| GoldenNumber::from_fracs(a, b, c, d))
}

fn config_1d() -> impl Strategy<Value = PeriodicConfig> {
    prop::collection::vec(0u16..2, 1..7).prop_map(|v| PeriodicConfig::new(Pattern::word(v.into_iter().map(Symbol).collect())))
}

fn config_2d() -> impl Strategy<Value = PeriodicConfig> {
    (1usize..4, 1usize..4)
        .prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(0u16..3, w * h)))
        .prop_map(|(w, h, v)| PeriodicConfig::new(Pattern::block(w, h, v.into_iter().map(Symbol).collect()).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn golden_field_laws(a in golden(), b in golden()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a.clone());
        }
        prop_assert_eq!(a.to_string().parse::<GoldenNumber>().unwrap(), a.clone());
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 {
            prop_assert_eq!(a < b, fa < fb);
        }
        prop_assert_eq!(&a * &GoldenNumber::tau() * GoldenNumber::tau(), &(&a * &GoldenNumber::tau()) + &a);
    }

    #[test]
    fn shifts_compose(c in config_2d(), i in -5i64..5, j in -5i64..5, k in -5i64..5, l in -5i64..5) {
        let once = c.shift([i + k, j + l]);
        let twice = c.shift([i, j]).shift([k, l]);
        prop_assert!(once.same_config(&twice));
    }

    #[test]
    fn projections_restrict(c in config_2d(), x in -4i64..4, y in -4i64..4, n in 0usize..3, m in 0usize..3) {
        let (small, big) = (n.min(m), n.max(m));
        prop_assert_eq!(c.project([x, y], big).restrict(small), c.project([x, y], small));
    }

    #[test]
    fn subwindows_of_projection(c in config_1d(), n in 0usize..3) {
        let w = c.project([0, 0], n + 1);
        let subs = subwindows(w.pattern(), n).unwrap();
        prop_assert!(subs.contains(&c.project([0, 0], n)));
    }

    #[test]
    fn sliding_codes_commute_with_shifts(c in config_1d(), table in prop::collection::vec(0u16..2, 8), s in -6i64..6) {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let domain: Vec<Window> = (0..8u16)
            .map(|i| Window::new(1, Pattern::word((0..3).map(|b| Symbol((i >> (2 - b)) & 1)).collect())).unwrap())
            .collect();
        let map = BlockMap::from_fn(a.clone(), a, Dimension::One, 1, domain, |w| {
            let idx = (0..3).fold(0usize, |acc, k| acc * 2 + w.pattern().get(k, 0).index());
            Symbol(table[idx])
        }).unwrap();
        let code = SlidingBlockCode::new(map);
        let lhs = code.apply_periodic(&c.shift([s, 0])).unwrap();
        let rhs = code.apply_periodic(&c).unwrap().shift([s, 0]);
        prop_assert!(lhs.same_config(&rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boundary_gaps_are_tile_lengths(seed in 0u64..1000, unit in any::<bool>()) {
        let spec = if unit { TileSpec::unit() } else { TileSpec::golden() };
        let x = LineTiling::sample(&spec, seed);
        let pts = x.boundary_points(&GoldenNumber::integer(25)).unwrap();
        for gap in pts.gaps() {
            prop_assert!(gap == *spec.a() || gap == *spec.b());
        }
    }

    #[test]
    fn translation_round_trips(seed in 0u64..1000, p in -40i64..40, q in 1i64..9, r in -20i64..20) {
        let x = LineTiling::sample(&TileSpec::golden(), seed);
        let a = GoldenNumber::from_fracs(p, q, r, q);
        let back = x.translate(&a).unwrap().translate(&-a.clone()).unwrap();
        prop_assert!(x.same_tiling(&back));
        let moved = x.boundary_points(&GoldenNumber::integer(10)).unwrap();
        let reach = GoldenNumber::integer(11) + a.abs();
        let shifted = x.translate(&a).unwrap().boundary_points(&reach).unwrap();
        for pt in moved.points() {
            prop_assert!(shifted.points().contains(&(pt + &a)));
        }
    }

    #[test]
    fn metric_is_symmetric(s1 in 0u64..500, s2 in 0u64..500) {
        let x = LineTiling::sample(&TileSpec::golden(), s1);
        let y = LineTiling::sample(&TileSpec::golden(), s2);
        prop_assert_eq!(tiling_metric(&x, &y).unwrap(), tiling_metric(&y, &x).unwrap());
    }
}
