//! Normal form and backward induction solvers.

mod extensive;

pub use extensive::{
    check_normal_extensive_equivalence, check_solution_extensive_equivalence, extract_extensive, ArcMark,
    EquivalenceCheck, ExtensiveSolution,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::choice::{ChoiceError, ChoiceFunction};
use crate::model::{Event, Gamble, GambleSet};
use crate::tree::{
    count_nfd, nfd_with_limit, validate, DecisionTree, Node, NormalFormDecision, NormalFormSolution, TreeError,
    DEFAULT_ENUMERATION_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error("choice function `{0}` returned an empty set or a gamble outside its input")]
    InvalidSelection(String),
    #[error("solution is empty")]
    EmptySolution,
    #[error("unknown method `{0}`; expected `normal` or `backward`")]
    UnknownMethod(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Normal,
    Backward,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Normal => "normal",
            Method::Backward => "backward",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normal" => Ok(Method::Normal),
            "backward" => Ok(Method::Backward),
            other => Err(SolveError::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decision_nodes: usize,
    pub chance_nodes: usize,
    pub leaves: usize,
    /// `|nfd(T)|`, saturating.
    pub nfd_count: u128,
    /// Largest candidate set handed to the choice function.
    pub largest_candidate_set: usize,
    pub choice_calls: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub solution: NormalFormSolution,
    /// Union of the gambles induced by the members of `solution`.
    pub induced_gambles: GambleSet,
    pub method: Method,
    pub stats: SolveStats,
}

fn base_stats(tree: &DecisionTree) -> SolveStats {
    let (decision_nodes, chance_nodes, leaves) = tree.node_counts();
    SolveStats {
        decision_nodes,
        chance_nodes,
        leaves,
        nfd_count: count_nfd(tree.root()),
        ..SolveStats::default()
    }
}

/// Applies `rule` to the gambles of `candidates` and keeps every candidate
/// whose gamble is selected.
fn select_candidates<C: ChoiceFunction + ?Sized>(
    candidates: Vec<(NormalFormDecision, Gamble)>,
    event: &Event,
    rule: &C,
    stats: &mut SolveStats,
) -> Result<Vec<(NormalFormDecision, Gamble)>, SolveError> {
    let gambles: GambleSet = candidates.iter().map(|(_, g)| g.clone()).collect();
    stats.choice_calls += 1;
    stats.largest_candidate_set = stats.largest_candidate_set.max(candidates.len());
    let chosen = rule.select(&gambles, event)?;
    if chosen.is_empty() || !chosen.is_subset(&gambles) {
        return Err(SolveError::InvalidSelection(rule.name()));
    }
    Ok(candidates.into_iter().filter(|(_, g)| chosen.contains(g)).collect())
}

fn finish(
    kept: Vec<(NormalFormDecision, Gamble)>,
    method: Method,
    stats: SolveStats,
) -> SolveReport {
    let induced_gambles = kept.iter().map(|(_, g)| g.clone()).collect();
    SolveReport {
        solution: kept.into_iter().map(|(p, _)| p).collect(),
        induced_gambles,
        method,
        stats,
    }
}

/// `norm_opt(T)`: every normal form decision whose gamble is selected from
/// `gamb(T)` given `ev(T)`.
pub fn norm_opt<C: ChoiceFunction + ?Sized>(tree: &DecisionTree, rule: &C) -> Result<SolveReport, SolveError> {
    norm_opt_with_limit(tree, rule, DEFAULT_ENUMERATION_LIMIT)
}

pub fn norm_opt_with_limit<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<SolveReport, SolveError> {
    validate(tree)?;
    let mut stats = base_stats(tree);
    let candidates = nfd_with_limit(tree, limit)?
        .into_iter()
        .map(|p| {
            let g = p.gamble(tree)?;
            Ok((p, g))
        })
        .collect::<Result<Vec<_>, TreeError>>()?;
    let kept = select_candidates(candidates, tree.root_event(), rule, &mut stats)?;
    Ok(finish(kept, Method::Normal, stats))
}

/// `back_opt(T)`: solve subtrees first, glue the survivors, and apply the
/// normal form operator to the glued set at every node.
pub fn back_opt<C: ChoiceFunction + ?Sized>(tree: &DecisionTree, rule: &C) -> Result<SolveReport, SolveError> {
    back_opt_with_limit(tree, rule, DEFAULT_ENUMERATION_LIMIT)
}

pub fn back_opt_with_limit<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<SolveReport, SolveError> {
    validate(tree)?;
    let mut stats = base_stats(tree);
    let n = tree.state_count();
    let kept = backward(tree.root(), *tree.root_event(), n, rule, limit, &mut stats)?;
    Ok(finish(kept, Method::Backward, stats))
}

fn backward<C: ChoiceFunction + ?Sized>(
    node: &Node,
    ev: Event,
    n: usize,
    rule: &C,
    limit: usize,
    stats: &mut SolveStats,
) -> Result<Vec<(NormalFormDecision, Gamble)>, SolveError> {
    match node {
        Node::Leaf(r) => Ok(vec![(NormalFormDecision::Leaf, Gamble::constant(*r, n))]),
        Node::Decision(children) => {
            let mut candidates = Vec::new();
            for (i, child) in children.iter().enumerate() {
                for (p, g) in backward(child, ev, n, rule, limit, stats)? {
                    candidates.push((NormalFormDecision::choose(i, p), g));
                }
            }
            check_size(candidates.len() as u128, limit)?;
            select_candidates(candidates, &ev, rule, stats)
        }
        Node::Chance(branches) => {
            let partition: Vec<Event> = branches.iter().map(|(e, _)| *e).collect();
            let mut parts = Vec::with_capacity(branches.len());
            for (e, child) in branches {
                parts.push(backward(child, ev & *e, n, rule, limit, stats)?);
            }
            let total = parts
                .iter()
                .fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
            check_size(total, limit)?;
            let mut candidates = Vec::with_capacity(total as usize);
            let mut index = vec![0usize; parts.len()];
            loop {
                let plans = index.iter().zip(&parts).map(|(&i, p)| p[i].0.clone()).collect();
                let gambles: Vec<&Gamble> = index.iter().zip(&parts).map(|(&i, p)| &p[i].1).collect();
                candidates.push((NormalFormDecision::Chance(plans), Gamble::glue(&partition, &gambles)));
                let mut k = parts.len();
                loop {
                    if k == 0 {
                        return select_candidates(candidates, &ev, rule, stats);
                    }
                    k -= 1;
                    index[k] += 1;
                    if index[k] < parts[k].len() {
                        break;
                    }
                    index[k] = 0;
                }
            }
        }
    }
}

fn check_size(count: u128, limit: usize) -> Result<(), SolveError> {
    if count > limit as u128 {
        Err(TreeError::EnumerationLimitExceeded { count, limit }.into())
    } else {
        Ok(())
    }
}

pub fn solve<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    method: Method,
    limit: usize,
) -> Result<SolveReport, SolveError> {
    match method {
        Method::Normal => norm_opt_with_limit(tree, rule, limit),
        Method::Backward => back_opt_with_limit(tree, rule, limit),
    }
}

/// Both solvers side by side with their symmetric difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardComparison {
    pub normal: SolveReport,
    pub backward: SolveReport,
    pub only_normal: NormalFormSolution,
    pub only_backward: NormalFormSolution,
}

impl BackwardComparison {
    pub fn agree(&self) -> bool {
        self.only_normal.is_empty() && self.only_backward.is_empty()
    }
}

pub fn compare_backward<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<BackwardComparison, SolveError> {
    let normal = norm_opt_with_limit(tree, rule, limit)?;
    let backward = back_opt_with_limit(tree, rule, limit)?;
    Ok(BackwardComparison {
        only_normal: normal.solution.difference(&backward.solution),
        only_backward: backward.solution.difference(&normal.solution),
        normal,
        backward,
    })
}

/// Groups the members of a solution by the gamble they induce.
pub fn members_by_gamble(
    tree: &DecisionTree,
    solution: &NormalFormSolution,
) -> Result<BTreeMap<Gamble, Vec<NormalFormDecision>>, SolveError> {
    let mut out: BTreeMap<Gamble, Vec<NormalFormDecision>> = BTreeMap::new();
    for m in solution {
        out.entry(m.gamble(tree)?).or_default().push(m.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::{ChoiceContext, ChoiceRule, MassFunction, RuleKind};
    use crate::model::{PossibilitySpace, RewardId, RewardTable};
    use crate::tree::{gamb, restrict_solution, subtree_at, NodeId};
    use num_rational::BigRational;

    type Q = BigRational;

    fn leaf(i: u32) -> Node {
        Node::leaf(RewardId(i))
    }

    /// Rewards sorted by name: X=-1 (0), Y1=-2 (1), Y2=2 (2), Z=0 (3).
    fn counterexample() -> (DecisionTree, ChoiceContext<Q>) {
        let space = PossibilitySpace::new(["a1", "a2"]).unwrap();
        let a = space.event_from_states([0]).unwrap();
        let n = Node::decision(vec![leaf(0), Node::chance(vec![(a, leaf(1)), (!a, leaf(2))])]);
        let tree = DecisionTree::new(Node::decision(vec![n, leaf(3)]), space.full());
        let table = RewardTable::new([
            ("X", Q::from_integer((-1).into())),
            ("Y1", Q::from_integer((-2).into())),
            ("Y2", Q::from_integer(2.into())),
            ("Z", Q::from_integer(0.into())),
        ])
        .unwrap();
        (tree, ChoiceContext::new(table))
    }

    fn g(v: &[u32]) -> Gamble {
        Gamble::new(v.iter().map(|&i| RewardId(i)).collect())
    }

    #[test]
    fn dominance_on_counterexample() {
        let (tree, ctx) = counterexample();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ctx).unwrap();
        let normal = norm_opt(&tree, &rule).unwrap();
        let yz: GambleSet = [g(&[1, 2]), g(&[3, 3])].into_iter().collect();
        assert_eq!(normal.induced_gambles, yz);
        assert_eq!(normal.solution.len(), 2);
        assert_eq!(normal.stats.nfd_count, 3);

        let backward = back_opt(&tree, &rule).unwrap();
        assert_eq!(backward.solution, normal.solution);

        let at_n = NodeId(vec![0]);
        let sub = norm_opt(&subtree_at(&tree, &at_n).unwrap(), &rule).unwrap();
        let xy: GambleSet = [g(&[0, 0]), g(&[1, 2])].into_iter().collect();
        assert_eq!(sub.induced_gambles, xy);
        let restricted = restrict_solution(&tree, &normal.solution, &at_n).unwrap();
        assert_eq!(restricted.len(), 1);
        assert_eq!(
            restricted.gambles(&subtree_at(&tree, &at_n).unwrap()).unwrap(),
            GambleSet::singleton(g(&[1, 2]))
        );
    }

    #[test]
    fn induced_gambles_match_selection() {
        let (tree, ctx) = counterexample();
        let p = MassFunction::new(vec![Q::new(1.into(), 3.into()), Q::new(2.into(), 3.into())]).unwrap();
        let rule = ChoiceRule::new(RuleKind::EuMax, ctx.with_probability(p)).unwrap();
        let report = norm_opt(&tree, &rule).unwrap();
        let selected = rule.select(&gamb(&tree).unwrap(), tree.root_event()).unwrap();
        assert_eq!(report.induced_gambles, selected);
        assert_eq!(report.solution.gambles(&tree).unwrap(), selected);
        // Y has expectation 2/3 and beats X and Z
        assert_eq!(selected, GambleSet::singleton(g(&[1, 2])));
    }

    #[test]
    fn single_leaf_is_solved_by_its_only_decision() {
        let space = PossibilitySpace::numbered(1).unwrap();
        let tree = DecisionTree::new(leaf(0), space.full());
        let table = RewardTable::new([("r", Q::from_integer(1.into()))]).unwrap();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ChoiceContext::new(table)).unwrap();
        for method in [Method::Normal, Method::Backward] {
            let r = solve(&tree, &rule, method, 10).unwrap();
            assert_eq!(r.solution.len(), 1);
            assert_eq!(r.method, method);
        }
    }

    /// Picks everything from sets of three or more, otherwise the gambles with
    /// the largest reward index sum.
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
    fn divergence_is_reported_with_symmetric_difference() {
        let space = PossibilitySpace::numbered(1).unwrap();
        let tree = DecisionTree::new(
            Node::decision(vec![Node::decision(vec![leaf(0), leaf(1)]), leaf(2)]),
            space.full(),
        );
        let cmp = compare_backward(&tree, &Pathological, 100).unwrap();
        assert_eq!(cmp.normal.solution.len(), 3);
        assert_eq!(cmp.backward.solution.len(), 1);
        assert!(!cmp.agree());
        assert_eq!(cmp.only_normal.len(), 2);
        assert!(cmp.only_backward.is_empty());
    }

    #[test]
    fn candidate_limit_applies_to_backward() {
        let (tree, ctx) = counterexample();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ctx).unwrap();
        assert!(matches!(
            back_opt_with_limit(&tree, &rule, 1),
            Err(SolveError::Tree(TreeError::EnumerationLimitExceeded { .. }))
        ));
    }

    #[test]
    fn method_names() {
        assert_eq!("normal".parse::<Method>().unwrap(), Method::Normal);
        assert_eq!("backward".parse::<Method>().unwrap(), Method::Backward);
        assert!("sideways".parse::<Method>().is_err());
    }
}
