mod common;

use common::{alphabet, brute_fraction, naive_hom, random_bccq, random_pattern, with_expr};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treemeasure::analytic::PathLangSpec;
use treemeasure::boolexpr::BoolExpr;
use treemeasure::measure::{bccq_measure, pattern_measure, pattern_positive};
use treemeasure::pattern::{verify_hom, EdgeKind};
use treemeasure::registry::Registry;
use treemeasure::{Budget, DepthMode, EngineConfig, Rational, Symbol};

fn paper() -> EngineConfig {
    EngineConfig {
        mode: DepthMode::Paper,
        ..EngineConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_identity(seed in any::<u64>()) {
        let c = random_bccq(seed);
        let cfg = EngineConfig::default();
        let m = bccq_measure(&c, &cfg).unwrap().value;
        let neg = bccq_measure(&with_expr(&c, BoolExpr::not(c.expr.clone())), &cfg).unwrap().value;
        prop_assert_eq!(neg, Rational::one() - m);
    }

    #[test]
    fn extra_constraints_never_raise_the_measure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ab = alphabet(&["a", "b"]);
        let p = random_pattern(&mut rng, &ab, 3);
        let mut q = p.clone();
        if rng.random_bool(0.5) {
            let v = q.add_vertex("extra", Some(Symbol(rng.random_range(0..2))), rng.random_bool(0.3)).unwrap();
            q.add_edge(EdgeKind::ALL[rng.random_range(0..4)], rng.random_range(0..v), v).unwrap();
        } else {
            let n = q.vertex_count();
            q.add_edge(EdgeKind::ALL[rng.random_range(0..4)], rng.random_range(0..n), rng.random_range(0..n)).unwrap();
        }
        let cfg = EngineConfig::default();
        let mp = pattern_measure(&p, &cfg).unwrap().value;
        let mq = pattern_measure(&q, &cfg).unwrap().value;
        prop_assert!(mq <= mp, "{} > {}", mq, mp);
    }

    #[test]
    fn finite_prefixes_approximate_from_below(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ab = alphabet(&["a", "b"]);
        let p = random_pattern(&mut rng, &ab, 4);
        let m = pattern_measure(&p, &EngineConfig::default()).unwrap().value;
        for h in 0..=2 {
            let f = brute_fraction(&ab, h, |t| naive_hom(&p, t));
            prop_assert!(f <= m, "height {}: {} > {}", h, f, m);
        }
    }

    #[test]
    fn positivity_matches_measure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pattern(&mut rng, &alphabet(&["a", "b", "c"]), 4);
        let m = pattern_measure(&p, &EngineConfig::default()).unwrap().value;
        let model = pattern_positive(&p, &Budget::default()).unwrap();
        prop_assert_eq!(model.is_some(), !m.is_zero());
        if let Some(model) = model {
            prop_assert!(verify_hom(&p, &model.tree, &model.witness));
            prop_assert!(naive_hom(&p, &model.tree));
        }
    }

    #[test]
    fn depth_modes_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pattern(&mut rng, &alphabet(&["a", "b"]), 4);
        let minimal = pattern_measure(&p, &EngineConfig::default()).unwrap();
        let paper = pattern_measure(&p, &paper()).unwrap();
        prop_assert_eq!(&minimal.value, &paper.value);
        prop_assert!(minimal.determining_depth <= paper.determining_depth);
    }

    #[test]
    fn root_label_fraction_is_the_allowed_ratio(size in 1usize..6, mask in 1u32..64) {
        let names: Vec<String> = (0..size).map(|i| format!("s{i}")).collect();
        let subset: Vec<&str> = names.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, n)| n.as_str()).collect();
        prop_assume!(!subset.is_empty());
        let text = format!("alphabet {}\nsubset {}\n", names.join(" "), subset.join(" "));
        let spec = PathLangSpec::parse(&text).unwrap();
        let c = Registry::with_builtins().load("path", &text, None).unwrap().count(0, &Budget::default()).unwrap();
        prop_assert_eq!(Rational::new(c.satisfying.into(), c.total.into()), spec.ratio());
    }
}

#[test]
fn combined_measures_stay_in_the_unit_interval() {
    let cfg = EngineConfig::default();
    for seed in 0..40 {
        let v = bccq_measure(&random_bccq(seed), &cfg).unwrap().value;
        assert!(v >= Rational::zero() && v <= Rational::one(), "seed {seed}: {v}");
    }
}
