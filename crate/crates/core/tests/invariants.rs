mod common;

use choicetree::choice::{ChoiceContext, ChoiceFunction, ChoiceRule, RuleKind};
use choicetree::generate::{
    equivalent_rewrite, random_consistent_tree, random_gamble_instance, random_world, GenConfig,
};
use choicetree::io::{parse_tree_file, report, TreeDocument};
use choicetree::laws::{check_property_instance, PropertyId, PropertyInstance};
use choicetree::model::{
    check_a_consistency, combine_on_partition, gamble_set_sum, Gamble, GambleSet, PossibilitySpace, RewardId,
};
use choicetree::solve::{back_opt, norm_opt};
use choicetree::tree::{
    count_nfd, gamb, gambles_of_nfd, nfd, subtree_at, tree_for_gambles, validate, Node, NodeId,
};
use common::*;
use proptest::prelude::*;

fn small() -> GenConfig {
    GenConfig {
        max_depth: 3,
        omega_max: 5,
        nfd_ceiling: 200,
        ..GenConfig::default()
    }
}

/// A gamble on `n` states, a labelling of states into blocks, and a permutation.
fn partitioned_gamble() -> impl Strategy<Value = (Vec<u32>, Vec<usize>, Vec<usize>)> {
    (1usize..=6).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u32..4, n),
            proptest::collection::vec(0usize..3, n),
            Just((0..3).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

fn consistent_set(seed: u64) -> (choicetree::generate::World, GambleSet, choicetree::model::Event) {
    let g = random_gamble_instance(PropertyId::P1, &GenConfig::default(), seed).unwrap();
    match g.instance {
        PropertyInstance::Conditioning { set, a } => (g.world, set, a),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn combining_ignores_part_order((values, blocks, perm) in partitioned_gamble()) {
        let n = values.len();
        let space = PossibilitySpace::numbered(n).unwrap();
        let g = Gamble::new(values.iter().map(|&r| RewardId(r)).collect());
        let mut parts = Vec::new();
        for b in perm {
            let states: Vec<usize> = (0..n).filter(|&s| blocks[s] == b).collect();
            if !states.is_empty() {
                let e = space.event_from_states(states).unwrap();
                parts.push((e, g.restrict(&e)));
            }
        }
        let forward = combine_on_partition(&parts).unwrap();
        parts.reverse();
        prop_assert_eq!(&combine_on_partition(&parts).unwrap(), &forward);
        prop_assert_eq!(forward, g);
    }

    #[test]
    fn sums_of_singletons_are_singletons((values, blocks, _) in partitioned_gamble(), shift in 0u32..4) {
        let n = values.len();
        let space = PossibilitySpace::numbered(n).unwrap();
        let mut events = Vec::new();
        let mut sets = Vec::new();
        for b in 0..3 {
            let states: Vec<usize> = (0..n).filter(|&s| blocks[s] == b).collect();
            if !states.is_empty() {
                events.push(space.event_from_states(states).unwrap());
                let v = values.iter().map(|&r| RewardId((r + shift * b as u32) % 6)).collect();
                sets.push(GambleSet::singleton(Gamble::new(v)));
            }
        }
        prop_assert_eq!(gamble_set_sum(&events, &sets).unwrap().len(), 1);
    }

    #[test]
    fn consistency_is_memberwise(n in 1usize..=5, raw_set in proptest::collection::vec(proptest::collection::vec(0u32..4, 5), 1..4), bits in 1u64..32) {
        let space = PossibilitySpace::numbered(n).unwrap();
        let mask = bits & ((1 << n) - 1);
        prop_assume!(mask != 0);
        let a = space.event_from_states((0..n).filter(|s| mask & (1 << s) != 0)).unwrap();
        let set: GambleSet = raw_set.iter().map(|v| Gamble::new(v[..n].iter().map(|&r| RewardId(r)).collect())).collect();
        let whole = check_a_consistency(&set, &a).unwrap().is_consistent();
        let each = set.iter().all(|g| check_a_consistency(&GambleSet::singleton(g.clone()), &a).unwrap().is_consistent());
        prop_assert_eq!(whole, each);
    }

    #[test]
    fn constructed_tree_realizes_a_consistent_set(seed in any::<u64>()) {
        let (_, set, a) = consistent_set(seed);
        let t = tree_for_gambles(&set, &a).unwrap();
        prop_assert!(validate(&t).is_ok());
        prop_assert_eq!(t.root_event(), &a);
        prop_assert_eq!(gamb(&t).unwrap(), set);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamb_is_the_union_over_decisions(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        let g = gamb(&p.tree).unwrap();
        prop_assert_eq!(&gambles_of_nfd(&p.tree, 10_000).unwrap(), &g);
        prop_assert!(g.len() as u128 <= count_nfd(p.tree.root()));
        if strategy_count(&p.tree) <= 50_000 {
            prop_assert_eq!(raw_set(&g), oracle_gambles(&p.tree));
        }
    }

    #[test]
    fn nfd_counts_follow_node_kind(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        for id in p.tree.node_ids() {
            let sub = subtree_at(&p.tree, &id).unwrap();
            let count = nfd(&sub).unwrap().len() as u128;
            let children: Vec<u128> = (0..sub.root().child_count())
                .map(|i| nfd(&subtree_at(&sub, &NodeId(vec![i])).unwrap()).unwrap().len() as u128)
                .collect();
            match sub.root() {
                Node::Leaf(_) => prop_assert_eq!(count, 1),
                Node::Decision(_) => prop_assert_eq!(count, children.iter().sum::<u128>()),
                Node::Chance(_) => prop_assert_eq!(count, children.iter().product::<u128>()),
            }
        }
    }

    #[test]
    fn subtrees_compose_and_stay_valid(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        for k in p.tree.node_ids() {
            let sk = subtree_at(&p.tree, &k).unwrap();
            prop_assert!(validate(&sk).is_ok());
            for l in sk.node_ids() {
                let nested = subtree_at(&sk, &l).unwrap();
                let direct = subtree_at(&p.tree, &k.join(&l)).unwrap();
                prop_assert_eq!(nested, direct);
            }
        }
    }

    #[test]
    fn rules_select_nonempty_subsets_like_the_oracle(seed in any::<u64>()) {
        let (world, set, a) = consistent_set(seed);
        let raws = raw_set(&set);
        for kind in RuleKind::ALL {
            let rule = ChoiceRule::new(kind, world.context.clone()).unwrap();
            let chosen = rule.select(&set, &a).unwrap();
            prop_assert!(!chosen.is_empty() && chosen.is_subset(&set));
            prop_assert_eq!(raw_set(&chosen), oracle_select(kind, &world.context, &raws, &a), "{}", kind);
        }
        let max = ChoiceRule::new(RuleKind::Maximality, world.context.clone()).unwrap().select(&set, &a).unwrap();
        let eadm = ChoiceRule::new(RuleKind::EAdmissibility, world.context.clone()).unwrap().select(&set, &a).unwrap();
        prop_assert!(eadm.is_subset(&max));
    }

    #[test]
    fn one_distribution_makes_credal_rules_agree(seed in any::<u64>()) {
        let (world, set, a) = consistent_set(seed);
        let p = world.context.probability.clone().unwrap();
        let ctx = ChoiceContext::new(world.context.utilities.clone()).with_probability(p.clone()).with_credal(vec![p]);
        let eu = ChoiceRule::new(RuleKind::EuMax, ctx.clone()).unwrap().select(&set, &a).unwrap();
        for kind in [RuleKind::Maximality, RuleKind::EAdmissibility, RuleKind::GammaMaximin] {
            let got = ChoiceRule::new(kind, ctx.clone()).unwrap().select(&set, &a).unwrap();
            prop_assert_eq!(&got, &eu, "{}", kind);
        }
    }

    #[test]
    fn selection_ignores_input_order(seed in any::<u64>(), order in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle()) {
        let (world, set, a) = consistent_set(seed);
        let members: Vec<Gamble> = set.iter().cloned().collect();
        let shuffled: GambleSet = order.iter().filter(|&&i| i < members.len()).map(|&i| members[i].clone()).collect();
        for kind in RuleKind::ALL {
            let rule = ChoiceRule::new(kind, world.context.clone()).unwrap();
            prop_assert_eq!(rule.select(&shuffled, &a).unwrap(), rule.select(&set, &a).unwrap());
        }
    }

    #[test]
    fn conditioning_holds_for_eu_and_dominance(seed in any::<u64>()) {
        let g = random_gamble_instance(PropertyId::P1, &GenConfig::default(), seed).unwrap();
        for kind in [RuleKind::EuMax, RuleKind::PointwiseDominance] {
            let rule = ChoiceRule::new(kind, g.world.context.clone()).unwrap();
            prop_assert!(check_property_instance(PropertyId::P1, &rule, &g.instance).unwrap().holds());
        }
        for prop in [PropertyId::P2, PropertyId::P3] {
            let g = random_gamble_instance(prop, &GenConfig::default(), seed).unwrap();
            let rule = ChoiceRule::new(RuleKind::EuMax, g.world.context.clone()).unwrap();
            prop_assert!(check_property_instance(prop, &rule, &g.instance).unwrap().holds());
        }
    }

    #[test]
    fn normal_form_solution_selects_from_gamb(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        for kind in RuleKind::ALL {
            let rule = ChoiceRule::new(kind, p.world.context.clone()).unwrap();
            let solved = norm_opt(&p.tree, &rule).unwrap();
            let direct = rule.select(&gamb(&p.tree).unwrap(), p.tree.root_event()).unwrap();
            prop_assert_eq!(&solved.solution.gambles(&p.tree).unwrap(), &direct);
            // plan reduction: members are exactly the decisions inducing a selected gamble
            for plan in nfd(&p.tree).unwrap() {
                let selected = direct.contains(&plan.gamble(&p.tree).unwrap());
                prop_assert_eq!(solved.solution.contains(&plan), selected);
            }
        }
    }

    #[test]
    fn equivalent_trees_get_equal_solutions(seed in any::<u64>(), steps in 1usize..12) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        let t2 = equivalent_rewrite(&p.tree, steps, seed ^ 0xABCD);
        prop_assume!(count_nfd(t2.root()) <= 10_000);
        for kind in RuleKind::ALL {
            let rule = ChoiceRule::new(kind, p.world.context.clone()).unwrap();
            prop_assert_eq!(
                norm_opt(&p.tree, &rule).unwrap().induced_gambles,
                norm_opt(&t2, &rule).unwrap().induced_gambles
            );
        }
    }

    #[test]
    fn backward_members_survive_in_subtrees(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        for kind in RuleKind::ALL {
            let rule = ChoiceRule::new(kind, p.world.context.clone()).unwrap();
            let root = back_opt(&p.tree, &rule).unwrap();
            for m in root.solution.iter() {
                for node in m.nodes() {
                    let sub = back_opt(&subtree_at(&p.tree, &node).unwrap(), &rule).unwrap();
                    prop_assert!(sub.solution.contains(&m.restrict(&node).unwrap()));
                }
            }
        }
    }

    #[test]
    fn backward_matches_normal_for_rules_with_the_backward_laws(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        for kind in [RuleKind::EuMax, RuleKind::PointwiseDominance, RuleKind::Maximality, RuleKind::EAdmissibility] {
            let rule = ChoiceRule::new(kind, p.world.context.clone()).unwrap();
            prop_assert_eq!(back_opt(&p.tree, &rule).unwrap().solution, norm_opt(&p.tree, &rule).unwrap().solution, "{}", kind);
        }
    }

    #[test]
    fn generation_is_deterministic_and_valid(seed in any::<u64>()) {
        let a = random_consistent_tree(&small(), seed).unwrap();
        prop_assert_eq!(&a, &random_consistent_tree(&small(), seed).unwrap());
        prop_assert!(validate(&a.tree).is_ok());
        prop_assert_eq!(random_world(&small(), seed).unwrap(), random_world(&small(), seed).unwrap());
        for prop in PropertyId::ALL {
            let g = random_gamble_instance(prop, &small(), seed).unwrap();
            prop_assert!(g.instance.check_preconditions(prop).is_ok());
        }
    }

    #[test]
    fn rewrites_keep_gambles_and_event(seed in any::<u64>(), steps in 0usize..15) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        let t = equivalent_rewrite(&p.tree, steps, seed);
        prop_assert!(validate(&t).is_ok());
        prop_assert_eq!(t.root_event(), p.tree.root_event());
        prop_assert_eq!(gamb(&t).unwrap(), gamb(&p.tree).unwrap());
    }

    #[test]
    fn generated_documents_round_trip(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        let doc = TreeDocument::from_tree(&p.world.space, &p.world.context.utilities, &p.tree).unwrap();
        let text = doc.serialize();
        let parsed = parse_tree_file(&text).unwrap();
        prop_assert_eq!(parsed.serialize(), text);
        let back = parsed.resolve().unwrap();
        prop_assert_eq!(back.tree, p.tree.clone());
        prop_assert_eq!(back.utilities, p.world.context.utilities.clone());
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let p = random_consistent_tree(&small(), seed).unwrap();
        let rule = ChoiceRule::new(RuleKind::Maximality, p.world.context.clone()).unwrap();
        let once = report::render(&report::solve_report(&p.tree, &p.world.context.utilities, &norm_opt(&p.tree, &rule).unwrap()));
        let twice = report::render(&report::solve_report(&p.tree, &p.world.context.utilities, &norm_opt(&p.tree, &rule).unwrap()));
        prop_assert_eq!(once, twice);
    }
}
