//! Property suites for the comparison measure, the permutation operators and
//! the penalty objective.

use proptest::prelude::*;
use rostering_core::ga::indirect::{
    order_crossover, swap_mutation, uniform_order_crossover, NursePermutation,
};
use rostering_core::problem::ExtendedCost;
use rostering_core::rng::rng_from_seed;
use rostering_core::stats::{
    compute_e, midranks_ascending, pair_d, rank_instance, wilcoxon_signed_rank, Alpha, TrialSet,
};

fn extended_cost_strategy() -> impl Strategy<Value = ExtendedCost> {
    prop_oneof![
        3 => (0u32..50).prop_map(ExtendedCost::Feasible),
        1 => Just(ExtendedCost::Infeasible),
    ]
}

fn trial_set_strategy(name: &'static str) -> impl Strategy<Value = TrialSet> {
    prop::collection::vec(extended_cost_strategy(), 1..=10)
        .prop_map(move |costs| TrialSet::new(name, "p", costs))
}

fn alpha_strategy() -> impl Strategy<Value = Alpha> {
    (0u32..=10).prop_map(|k| Alpha::new(f64::from(k) / 10.0).unwrap())
}

/// Multiplies every feasible cost by a positive constant.
fn scale(set: &TrialSet, factor: u32) -> TrialSet {
    TrialSet::new(
        set.algorithm.clone(),
        set.instance.clone(),
        set.costs
            .iter()
            .map(|c| match c {
                ExtendedCost::Feasible(v) => ExtendedCost::Feasible(v * factor),
                ExtendedCost::Infeasible => ExtendedCost::Infeasible,
            })
            .collect(),
    )
}

proptest! {
    #[test]
    fn pair_d_is_antisymmetric_and_bounded(
        a in extended_cost_strategy(),
        b in extended_cost_strategy(),
        alpha in alpha_strategy(),
    ) {
        let d = pair_d(a, b, alpha);
        prop_assert_eq!(d, -pair_d(b, a, alpha));
        prop_assert!(d.abs() <= 1.0);
    }

    #[test]
    fn e_is_bounded_antisymmetric_and_matches_pair_counting(
        a in trial_set_strategy("a"),
        b in trial_set_strategy("b"),
        alpha in alpha_strategy(),
    ) {
        let e = compute_e(&a, &b, alpha).unwrap();
        prop_assert!((-1.0..=1.0).contains(&e));
        prop_assert_eq!(e, -compute_e(&b, &a, alpha).unwrap());

        // Independent oracle at alpha = 1: win/loss counting straight off the
        // ExtendedCost order.
        let mut wins = 0i64;
        let mut losses = 0i64;
        for &x in &a.costs {
            for &y in &b.costs {
                match x.cmp(&y) {
                    std::cmp::Ordering::Less => wins += 1,
                    std::cmp::Ordering::Greater => losses += 1,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        let oracle = (wins - losses) as f64 / (a.costs.len() * b.costs.len()) as f64;
        prop_assert_eq!(compute_e(&a, &b, Alpha::ONE).unwrap(), oracle);
    }

    #[test]
    fn e_and_ranks_are_invariant_under_positive_cost_scaling(
        a in trial_set_strategy("a"),
        b in trial_set_strategy("b"),
        c in trial_set_strategy("c"),
        alpha in alpha_strategy(),
        factor in 1u32..=9,
    ) {
        let (sa, sb, sc) = (scale(&a, factor), scale(&b, factor), scale(&c, factor));
        prop_assert_eq!(
            compute_e(&a, &b, alpha).unwrap(),
            compute_e(&sa, &sb, alpha).unwrap()
        );
        prop_assert_eq!(
            pair_d(a.costs[0], b.costs[0], alpha),
            pair_d(sa.costs[0], sb.costs[0], alpha)
        );
        let ranks = rank_instance(&[a, b, c], alpha).unwrap();
        let scaled_ranks = rank_instance(&[sa, sb, sc], alpha).unwrap();
        prop_assert_eq!(ranks, scaled_ranks);
    }

    #[test]
    fn midranks_always_sum_to_triangular_number(keys in prop::collection::vec(-20i64..20, 1..=12)) {
        let ranks = midranks_ascending(&keys);
        let n = keys.len() as f64;
        let sum: f64 = ranks.iter().sum();
        prop_assert!((sum - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn rank_vectors_sum_to_triangular_number(
        sets in prop::collection::vec(
            prop::collection::vec(extended_cost_strategy(), 1..=6),
            2..=6,
        ),
        alpha in alpha_strategy(),
    ) {
        let sets: Vec<TrialSet> = sets
            .into_iter()
            .enumerate()
            .map(|(i, costs)| TrialSet::new(format!("alg{i}"), "p", costs))
            .collect();
        let k = sets.len() as f64;
        let ranks = rank_instance(&sets, alpha).unwrap();
        let sum: f64 = ranks.iter().sum();
        prop_assert!((sum - k * (k + 1.0) / 2.0).abs() < 1e-9);
        prop_assert!(ranks.iter().all(|&r| (1.0..=k).contains(&r)));
    }

    #[test]
    fn wilcoxon_rank_sums_are_conserved(values in prop::collection::vec(-5.0f64..5.0, 1..=40)) {
        let out = wilcoxon_signed_rank(&values).unwrap();
        let n = out.n_effective as f64;
        let t_plus = out.statistic("T+").unwrap();
        let t_minus = out.statistic("T-").unwrap();
        prop_assert!((t_plus + t_minus - n * (n + 1.0) / 2.0).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&out.p_value));
    }

    #[test]
    fn permutation_operators_preserve_validity(seed in 0u64..5_000, n in 1usize..=15) {
        let mut rng = rng_from_seed(seed);
        let a = NursePermutation::random(n, &mut rng);
        let b = NursePermutation::random(n, &mut rng);
        let ox = order_crossover(&a, &b, &mut rng);
        prop_assert!(ox.is_valid());
        let ux = uniform_order_crossover(&a, &b, 0.8, &mut rng);
        prop_assert!(ux.is_valid());
        let mutated = swap_mutation(&ox, 0.9, &mut rng);
        prop_assert!(mutated.is_valid());
    }
}

mod penalty_consistency {
    use proptest::prelude::*;
    use rand::Rng;
    use rostering_core::instances::{generate_instance, GeneratorConfig};
    use rostering_core::problem::{
        is_feasible, penalty_fitness, roster_cost, Roster,
    };
    use rostering_core::rng::rng_from_seed;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Feasibility holds exactly when the penalty collapses to the cost,
        /// for every positive weight.
        #[test]
        fn penalty_equals_cost_iff_feasible(seed in 0u64..500, w in 1u32..1000) {
            let inst = generate_instance(&GeneratorConfig::tiny(seed)).unwrap();
            let mut rng = rng_from_seed(seed ^ 0xabcd);
            let assignment: Vec<usize> = (0..inst.nurse_count())
                .map(|i| {
                    let set = inst.feasible_set(i);
                    set[rng.gen_range(0..set.len())]
                })
                .collect();
            let roster = Roster::new(assignment);
            let fitness = penalty_fitness(&inst, &roster, f64::from(w));
            let cost = f64::from(roster_cost(&inst, &roster));
            if is_feasible(&inst, &roster) {
                prop_assert_eq!(fitness, cost);
            } else {
                prop_assert!(fitness > cost);
            }
        }

        /// The penalty is monotone nondecreasing in the weight.
        #[test]
        fn penalty_is_monotone_in_weight(seed in 0u64..200) {
            let inst = generate_instance(&GeneratorConfig::tiny(seed)).unwrap();
            let mut rng = rng_from_seed(seed.wrapping_mul(31));
            let assignment: Vec<usize> = (0..inst.nurse_count())
                .map(|i| {
                    let set = inst.feasible_set(i);
                    set[rng.gen_range(0..set.len())]
                })
                .collect();
            let roster = Roster::new(assignment);
            let mut last = f64::NEG_INFINITY;
            for w in [0.0, 0.5, 1.0, 10.0, 200.0, 1e5] {
                let fitness = penalty_fitness(&inst, &roster, w);
                prop_assert!(fitness >= last);
                last = fitness;
            }
        }
    }
}
