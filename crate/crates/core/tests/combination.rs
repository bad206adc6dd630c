use dsfusion::dempster::{
    belief, combine_many, combine_pair, combine_powerset, lift_to_powerset, project,
};
use dsfusion::model::{MassFunction, PowersetMass, Rule};
use proptest::prelude::*;

/// Random singleton+Θ mass over `k` hypotheses, built from positive raw
/// weights normalized by their sum.
fn mass_strategy(k: usize) -> impl Strategy<Value = MassFunction> {
    prop::collection::vec(0.0f64..1.0, k + 1).prop_filter_map("degenerate", move |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-6).then(|| {
            let v: Vec<f64> = raw.iter().map(|r| r / total).collect();
            MassFunction::new(v[..k].to_vec(), v[k]).unwrap()
        })
    })
}

fn frame_and_pair() -> impl Strategy<Value = (MassFunction, MassFunction)> {
    prop::sample::select(vec![2usize, 3, 5, 9])
        .prop_flat_map(|k| (mass_strategy(k), mass_strategy(k)))
}

fn assert_close(a: &MassFunction, b: &MassFunction, tol: f64) {
    assert_eq!(a.frame_size(), b.frame_size());
    for k in 0..a.frame_size() {
        assert!(
            (a.singleton(k) - b.singleton(k)).abs() <= tol,
            "θ{k}: {} vs {}",
            a.singleton(k),
            b.singleton(k)
        );
    }
    assert!((a.theta() - b.theta()).abs() <= tol);
    assert!((a.empty() - b.empty()).abs() <= tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn vacuous_is_neutral_exactly((m, _) in frame_and_pair()) {
        let v = MassFunction::vacuous(m.frame_size());
        prop_assert_eq!(combine_pair(&v, &m, Rule::Normalized).unwrap(), m.clone());
        prop_assert_eq!(combine_pair(&m, &v, Rule::Normalized).unwrap(), m.clone());
        prop_assert_eq!(combine_pair(&v, &m, Rule::Unnormalized).unwrap(), m);
    }

    #[test]
    fn fast_path_matches_powerset((m1, m2) in frame_and_pair()) {
        for rule in [Rule::Normalized, Rule::Unnormalized] {
            let fast = combine_pair(&m1, &m2, rule).unwrap();
            let general =
                combine_powerset(&lift_to_powerset(&m1), &lift_to_powerset(&m2), rule).unwrap();
            assert_close(&fast, &project(&general).unwrap(), 1e-12);
        }
    }

    #[test]
    fn commutative((m1, m2) in frame_and_pair()) {
        for rule in [Rule::Normalized, Rule::Unnormalized] {
            assert_close(
                &combine_pair(&m1, &m2, rule).unwrap(),
                &combine_pair(&m2, &m1, rule).unwrap(),
                1e-12,
            );
        }
    }

    #[test]
    fn conserves_mass((m1, m2) in frame_and_pair()) {
        for rule in [Rule::Normalized, Rule::Unnormalized] {
            let m = combine_pair(&m1, &m2, rule).unwrap();
            prop_assert!((m.total() - 1.0).abs() <= 1e-9);
            prop_assert!(m.singletons().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn normalized_is_renormalized_unnormalized((m1, m2) in frame_and_pair()) {
        let norm = combine_pair(&m1, &m2, Rule::Normalized).unwrap();
        let un = combine_pair(&m1, &m2, Rule::Unnormalized).unwrap();
        let scale = 1.0 - un.empty();
        for k in 0..norm.frame_size() {
            prop_assert!((norm.singleton(k) - un.singleton(k) / scale).abs() <= 1e-12);
        }
        prop_assert!((norm.theta() - un.theta() / scale).abs() <= 1e-12);
        prop_assert_eq!(norm.empty(), 0.0);
    }

    #[test]
    fn lift_project_round_trip((m, _) in frame_and_pair()) {
        prop_assert_eq!(project(&lift_to_powerset(&m)).unwrap(), m);
    }

    #[test]
    fn belief_of_frame_is_one((m, _) in frame_and_pair()) {
        let p = lift_to_powerset(&m);
        prop_assert!((belief(&p, p.full()).unwrap() - 1.0).abs() <= 1e-9);
    }
}

fn masses_strategy() -> impl Strategy<Value = Vec<MassFunction>> {
    (prop::sample::select(vec![2usize, 3, 5]), 3usize..=5)
        .prop_flat_map(|(k, count)| prop::collection::vec(mass_strategy(k), count))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn fold_order_is_irrelevant(masses in masses_strategy(), seed in any::<u64>()) {
        let base = combine_many(&masses, Rule::Normalized).unwrap();
        let mut permuted = masses.clone();
        // deterministic Fisher-Yates driven by the seed
        let mut state = seed | 1;
        for i in (1..permuted.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            permuted.swap(i, (state % (i as u64 + 1)) as usize);
        }
        assert_close(&base, &combine_many(&permuted, Rule::Normalized).unwrap(), 1e-10);
        permuted.reverse();
        assert_close(&base, &combine_many(&permuted, Rule::Normalized).unwrap(), 1e-10);
    }

    #[test]
    fn triple_matches_powerset_oracle(masses in prop::collection::vec(mass_strategy(3), 3)) {
        let fast = combine_many(&masses, Rule::Normalized).unwrap();
        let lifted: Vec<PowersetMass> = masses.iter().map(lift_to_powerset).collect();
        let ab = combine_powerset(&lifted[0], &lifted[1], Rule::Normalized).unwrap();
        let abc = combine_powerset(&ab, &lifted[2], Rule::Normalized).unwrap();
        assert_close(&fast, &project(&abc).unwrap(), 1e-12);
    }
}

/// Random general BBA over a frame of `size` elements.
fn powerset_strategy(size: usize) -> impl Strategy<Value = PowersetMass> {
    let full = (1u32 << size) - 1;
    prop::collection::vec((1u32..=full, 0.01f64..1.0), 1..6).prop_map(move |entries| {
        let total: f64 = entries.iter().map(|(_, v)| v).sum();
        PowersetMass::new(
            size,
            entries.into_iter().map(|(m, v)| (m, v / total)),
            Rule::Normalized,
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn powerset_rule_conserves_and_commutes(
        (a, b) in (2usize..=5).prop_flat_map(|s| (powerset_strategy(s), powerset_strategy(s)))
    ) {
        let un = combine_powerset(&a, &b, Rule::Unnormalized).unwrap();
        prop_assert!((un.total() - 1.0).abs() <= 1e-9);
        let ba = combine_powerset(&b, &a, Rule::Unnormalized).unwrap();
        for (mask, v) in un.focal_elements() {
            prop_assert!((v - ba.mass(mask)).abs() <= 1e-12);
        }
        if un.mass(0) < 1.0 - 1e-9 {
            let norm = combine_powerset(&a, &b, Rule::Normalized).unwrap();
            prop_assert!((norm.total() - 1.0).abs() <= 1e-9);
            prop_assert_eq!(norm.mass(0), 0.0);
        }
    }

    #[test]
    fn belief_is_monotone(m in powerset_strategy(4), a in 1u32..16, b in 1u32..16) {
        let union = a | b;
        prop_assert!(belief(&m, a).unwrap() <= belief(&m, union).unwrap() + 1e-12);
    }
}
