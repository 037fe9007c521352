use std::collections::BTreeMap;

use super::{norm_opt_with_limit, SolveError};
use crate::choice::ChoiceFunction;
use crate::tree::{nfd_with_limit, DecisionTree, Node, NodeId, NormalFormDecision, NormalFormSolution};

/// Status of a decision arc in an extensive form solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcMark {
    Kept,
    Pruned,
    /// The arc leaves a decision node that no member of the solution reaches.
    Unreachable,
}

impl ArcMark {
    pub fn name(self) -> &'static str {
        match self {
            ArcMark::Kept => "kept",
            ArcMark::Pruned => "pruned",
            ArcMark::Unreachable => "unreachable",
        }
    }
}

/// The source tree with a mark on every decision arc, each arc named by the
/// node it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensiveSolution {
    tree: DecisionTree,
    marks: BTreeMap<NodeId, ArcMark>,
}

impl ExtensiveSolution {
    pub fn tree(&self) -> &DecisionTree {
        &self.tree
    }

    pub fn mark(&self, arc: &NodeId) -> Option<ArcMark> {
        self.marks.get(arc).copied()
    }

    pub fn marks(&self) -> impl Iterator<Item = (&NodeId, ArcMark)> {
        self.marks.iter().map(|(k, v)| (k, *v))
    }

    pub fn arcs_with(&self, mark: ArcMark) -> Vec<NodeId> {
        self.marks
            .iter()
            .filter(|(_, m)| **m == mark)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Whether every decision arc on the path to `node` is kept.
    pub fn is_reachable(&self, node: &NodeId) -> bool {
        (1..=node.path().len()).all(|k| {
            let prefix = NodeId(node.path()[..k].to_vec());
            self.marks.get(&prefix).is_none_or(|m| *m == ArcMark::Kept)
        })
    }

    /// Normal form decisions of the tree that use kept decision arcs only.
    pub fn nfd(&self, limit: usize) -> Result<Vec<NormalFormDecision>, SolveError> {
        Ok(nfd_with_limit(&self.tree, limit)?
            .into_iter()
            .filter(|p| p.arcs().iter().all(|a| self.marks.get(a) == Some(&ArcMark::Kept)))
            .collect())
    }
}

/// Keeps a decision arc iff the node it leads to lies in at least one member
/// of `solution`.
pub fn extract_extensive(tree: &DecisionTree, solution: &NormalFormSolution) -> Result<ExtensiveSolution, SolveError> {
    if solution.is_empty() {
        return Err(SolveError::EmptySolution);
    }
    for m in solution {
        m.gamble(tree)?;
    }
    let mut marks = BTreeMap::new();
    for id in tree.node_ids() {
        if let Some(Node::Decision(children)) = tree.node(&id) {
            let reached = solution.reaches(&id);
            for i in 0..children.len() {
                let arc = id.child(i);
                let mark = if !reached {
                    ArcMark::Unreachable
                } else if solution.reaches(&arc) {
                    ArcMark::Kept
                } else {
                    ArcMark::Pruned
                };
                marks.insert(arc, mark);
            }
        }
    }
    Ok(ExtensiveSolution {
        tree: tree.clone(),
        marks,
    })
}

/// Outcome of comparing a normal form solution with the normal form
/// decisions of its extensive form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub solution: NormalFormSolution,
    pub extensive: ExtensiveSolution,
    /// A member of `nfd(E)` missing from the solution, when they differ.
    pub witness: Option<NormalFormDecision>,
}

impl EquivalenceCheck {
    pub fn equivalent(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks `nfd(extract_extensive(T, S)) = S` for a given solution.
pub fn check_solution_extensive_equivalence(
    tree: &DecisionTree,
    solution: &NormalFormSolution,
    limit: usize,
) -> Result<EquivalenceCheck, SolveError> {
    let extensive = extract_extensive(tree, solution)?;
    // every member only uses kept arcs, so nfd(E) ⊇ S and a difference is a witness
    let witness = extensive.nfd(limit)?.into_iter().find(|p| !solution.contains(p));
    Ok(EquivalenceCheck {
        solution: solution.clone(),
        extensive,
        witness,
    })
}

/// Solves with the normal form operator and checks the result against its
/// extensive form.
pub fn check_normal_extensive_equivalence<C: ChoiceFunction + ?Sized>(
    tree: &DecisionTree,
    rule: &C,
    limit: usize,
) -> Result<EquivalenceCheck, SolveError> {
    let solution = norm_opt_with_limit(tree, rule, limit)?.solution;
    check_solution_extensive_equivalence(tree, &solution, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PossibilitySpace, RewardId};
    use crate::tree::nfd;

    fn leaf(i: u32) -> Node {
        Node::leaf(RewardId(i))
    }

    fn cross() -> DecisionTree {
        let space = PossibilitySpace::numbered(2).unwrap();
        let e = space.event_from_states([0]).unwrap();
        DecisionTree::new(
            Node::chance(vec![
                (e, Node::decision(vec![leaf(0), leaf(1)])),
                (!e, Node::decision(vec![leaf(2), leaf(3)])),
            ]),
            space.full(),
        )
    }

    fn plan(first: usize, second: usize) -> NormalFormDecision {
        NormalFormDecision::Chance(vec![
            NormalFormDecision::choose(first, NormalFormDecision::Leaf),
            NormalFormDecision::choose(second, NormalFormDecision::Leaf),
        ])
    }

    #[test]
    fn full_solution_prunes_nothing() {
        let t = cross();
        let all: NormalFormSolution = nfd(&t).unwrap().into_iter().collect();
        let e = extract_extensive(&t, &all).unwrap();
        assert_eq!(e.arcs_with(ArcMark::Kept).len(), 4);
        assert!(check_solution_extensive_equivalence(&t, &all, 100).unwrap().equivalent());
    }

    #[test]
    fn crossed_pair_has_no_extensive_counterpart() {
        let t = cross();
        let s: NormalFormSolution = [plan(0, 1), plan(1, 0)].into_iter().collect();
        let check = check_solution_extensive_equivalence(&t, &s, 100).unwrap();
        assert_eq!(check.extensive.arcs_with(ArcMark::Kept).len(), 4);
        assert_eq!(check.witness, Some(plan(0, 0)));
    }

    #[test]
    fn unreachable_arcs_are_flagged() {
        let space = PossibilitySpace::numbered(1).unwrap();
        let t = DecisionTree::new(
            Node::decision(vec![Node::decision(vec![leaf(0), leaf(1)]), leaf(2)]),
            space.full(),
        );
        let s: NormalFormSolution = [NormalFormDecision::choose(1, NormalFormDecision::Leaf)]
            .into_iter()
            .collect();
        let e = extract_extensive(&t, &s).unwrap();
        assert_eq!(e.mark(&NodeId(vec![0])), Some(ArcMark::Pruned));
        assert_eq!(e.mark(&NodeId(vec![1])), Some(ArcMark::Kept));
        assert_eq!(e.mark(&NodeId(vec![0, 0])), Some(ArcMark::Unreachable));
        assert!(!e.is_reachable(&NodeId(vec![0, 1])));
        assert!(e.is_reachable(&NodeId(vec![1])));
        assert!(matches!(
            extract_extensive(&t, &NormalFormSolution::new()),
            Err(SolveError::EmptySolution)
        ));
    }
}
