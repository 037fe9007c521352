use crate::choice::ChoiceFunction;
use crate::model::GambleSet;
use crate::solve::{norm_opt_with_limit, SolveError};
use crate::tree::{restrict_solution, subtree_at, DecisionTree, NodeId, NormalFormSolution};

/// Comparison at one node `N` reached by the root solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeVerdict {
    pub node: NodeId,
    /// `norm_opt(st_N(T))`.
    pub expected: NormalFormSolution,
    /// `st_N(norm_opt(T))`.
    pub actual: NormalFormSolution,
    pub expected_gambles: GambleSet,
    pub actual_gambles: GambleSet,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectnessReport {
    /// Whether inclusion (rather than equality) was tested.
    pub weak: bool,
    pub root_solution: NormalFormSolution,
    pub nodes: Vec<NodeVerdict>,
}

impl PerfectnessReport {
    pub fn perfect(&self) -> bool {
        self.nodes.iter().all(|n| n.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &NodeVerdict> {
        self.nodes.iter().filter(|n| !n.holds)
    }
}

/// Checks `st_N(norm_opt(T)) = norm_opt(st_N(T))` at every node lying in at
/// least one member of `norm_opt(T)`.
pub fn check_subtree_perfectness<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<PerfectnessReport, SolveError> {
    check(tree, rule, limit, false)
}

/// Checks `st_N(norm_opt(T)) ⊆ norm_opt(st_N(T))` at the same nodes.
pub fn check_weak_subtree_perfectness<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<PerfectnessReport, SolveError> {
    check(tree, rule, limit, true)
}

fn check<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
    weak: bool,
) -> Result<PerfectnessReport, SolveError> {
    let root_solution = norm_opt_with_limit(tree, rule, limit)?.solution;
    let mut nodes = Vec::new();
    for id in tree.node_ids() {
        if !root_solution.reaches(&id) {
            continue;
        }
        let sub = subtree_at(tree, &id)?;
        let expected = norm_opt_with_limit(&sub, rule, limit)?.solution;
        let actual = restrict_solution(tree, &root_solution, &id)?;
        let holds = if weak {
            actual.is_subset(&expected)
        } else {
            actual == expected
        };
        nodes.push(NodeVerdict {
            expected_gambles: expected.gambles(&sub)?,
            actual_gambles: actual.gambles(&sub)?,
            node: id,
            expected,
            actual,
            holds,
        });
    }
    Ok(PerfectnessReport {
        weak,
        root_solution,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::{ChoiceContext, ChoiceError, ChoiceRule, MassFunction, RuleKind};
    use crate::model::{Event, Gamble, PossibilitySpace, RewardId, RewardTable};
    use crate::scalar::Scalar;
    use crate::tree::Node;
    use num_rational::BigRational;

    type Q = BigRational;

    fn leaf(i: u32) -> Node {
        Node::leaf(RewardId(i))
    }

    fn counterexample() -> (DecisionTree, ChoiceContext<Q>) {
        let space = PossibilitySpace::new(["a1", "a2"]).unwrap();
        let a = space.event_from_states([0]).unwrap();
        let n = Node::decision(vec![leaf(0), Node::chance(vec![(a, leaf(1)), (!a, leaf(2))])]);
        let table = RewardTable::new([
            ("X", Q::from_ratio(-1, 1)),
            ("Y1", Q::from_ratio(-2, 1)),
            ("Y2", Q::from_ratio(2, 1)),
            ("Z", Q::from_ratio(0, 1)),
        ])
        .unwrap();
        (
            DecisionTree::new(Node::decision(vec![n, leaf(3)]), space.full()),
            ChoiceContext::new(table),
        )
    }

    #[test]
    fn dominance_is_not_subtree_perfect_but_weakly_so() {
        let (tree, ctx) = counterexample();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ctx).unwrap();
        let strong = check_subtree_perfectness(&tree, &rule, 100).unwrap();
        assert!(!strong.perfect());
        let bad: Vec<_> = strong.violations().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].node, NodeId(vec![0]));
        assert_eq!(bad[0].expected.len(), 2);
        assert_eq!(bad[0].actual.len(), 1);
        let y = Gamble::new(vec![RewardId(1), RewardId(2)]);
        assert_eq!(bad[0].actual_gambles, GambleSet::singleton(y));
        assert!(check_weak_subtree_perfectness(&tree, &rule, 100).unwrap().perfect());
    }

    #[test]
    fn expected_utility_is_subtree_perfect() {
        let (tree, ctx) = counterexample();
        let p = MassFunction::new(vec![Q::from_ratio(2, 3), Q::from_ratio(1, 3)]).unwrap();
        let rule = ChoiceRule::new(RuleKind::EuMax, ctx.with_probability(p)).unwrap();
        assert!(check_subtree_perfectness(&tree, &rule, 100).unwrap().perfect());
    }

    /// Keeps everything from sets of three or more, otherwise the gambles with
    /// the largest reward index sum. Breaks preservation (P9).
    struct Pathological;

    impl ChoiceFunction for Pathological {
        fn select(&self, set: &GambleSet, _: &Event) -> Result<GambleSet, ChoiceError> {
            if set.len() >= 3 {
                return Ok(set.clone());
            }
            let score = |g: &Gamble| g.values().iter().map(|r| r.0).sum::<u32>();
            let best = set.iter().map(score).max().ok_or(ChoiceError::EmptySet)?;
            Ok(set.iter().filter(|g| score(g) == best).cloned().collect())
        }

        fn name(&self) -> String {
            "pathological".into()
        }
    }

    #[test]
    fn weak_violation_for_rule_without_preservation() {
        let space = PossibilitySpace::numbered(1).unwrap();
        let tree = DecisionTree::new(
            Node::decision(vec![Node::decision(vec![leaf(0), leaf(1)]), leaf(2)]),
            space.full(),
        );
        let report = check_weak_subtree_perfectness(&tree, &Pathological, 100).unwrap();
        let bad: Vec<_> = report.violations().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].node, NodeId(vec![0]));
        assert_eq!(bad[0].actual.len(), 2);
        assert_eq!(bad[0].expected.len(), 1);
    }

    #[test]
    fn single_leaf_is_perfect() {
        let space = PossibilitySpace::numbered(1).unwrap();
        let tree = DecisionTree::new(leaf(0), space.full());
        let (_, ctx) = counterexample();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ctx).unwrap();
        let r = check_subtree_perfectness(&tree, &rule, 10).unwrap();
        assert!(r.perfect());
        assert_eq!(r.nodes.len(), 1);
    }
}
