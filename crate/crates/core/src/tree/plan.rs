use std::collections::BTreeSet;

use super::{DecisionTree, Node, NodeId, TreeError};
use crate::model::{Gamble, GambleSet, RewardId};
use crate::tree::ops::full_mask_of;

/// A normal form decision (strategy): exactly one arc kept at every reachable
/// decision node of its source tree.
///
/// Child indices refer to the source tree, so node addresses inside a
/// decision are the same as in the tree it was taken from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalFormDecision {
    Leaf,
    Decision {
        choice: usize,
        next: Box<NormalFormDecision>,
    },
    Chance(Vec<NormalFormDecision>),
}

impl NormalFormDecision {
    pub fn choose(choice: usize, next: NormalFormDecision) -> NormalFormDecision {
        NormalFormDecision::Decision {
            choice,
            next: Box::new(next),
        }
    }

    /// Whether the node at `id` lies in this decision.
    pub fn contains(&self, id: &NodeId) -> bool {
        self.at(id.path()).is_some()
    }

    fn at(&self, path: &[usize]) -> Option<&NormalFormDecision> {
        let mut plan = self;
        for &i in path {
            plan = match plan {
                NormalFormDecision::Leaf => return None,
                NormalFormDecision::Decision { choice, next } => {
                    if *choice != i {
                        return None;
                    }
                    next
                }
                NormalFormDecision::Chance(branches) => branches.get(i)?,
            };
        }
        Some(plan)
    }

    /// `st_N(U)`: the part of the decision below `id`, if `id` lies in it.
    pub fn restrict(&self, id: &NodeId) -> Option<NormalFormDecision> {
        self.at(id.path()).cloned()
    }

    /// Addresses of all nodes lying in this decision.
    pub fn nodes(&self) -> Vec<NodeId> {
        fn walk(plan: &NormalFormDecision, at: &mut Vec<usize>, out: &mut Vec<NodeId>) {
            out.push(NodeId(at.clone()));
            match plan {
                NormalFormDecision::Leaf => {}
                NormalFormDecision::Decision { choice, next } => {
                    at.push(*choice);
                    walk(next, at, out);
                    at.pop();
                }
                NormalFormDecision::Chance(branches) => {
                    for (i, b) in branches.iter().enumerate() {
                        at.push(i);
                        walk(b, at, out);
                        at.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// The kept decision arcs, each named by the node it leads to.
    pub fn arcs(&self) -> Vec<NodeId> {
        fn walk(plan: &NormalFormDecision, at: &mut Vec<usize>, out: &mut Vec<NodeId>) {
            match plan {
                NormalFormDecision::Leaf => {}
                NormalFormDecision::Decision { choice, next } => {
                    at.push(*choice);
                    out.push(NodeId(at.clone()));
                    walk(next, at, out);
                    at.pop();
                }
                NormalFormDecision::Chance(branches) => {
                    for (i, b) in branches.iter().enumerate() {
                        at.push(i);
                        walk(b, at, out);
                        at.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Builds the decision that follows exactly the given decision arcs.
    ///
    /// Every reachable decision node must have exactly one of its arcs listed,
    /// and no listed arc may be unreachable.
    pub fn from_arcs(tree: &DecisionTree, arcs: &[NodeId]) -> Result<NormalFormDecision, TreeError> {
        let chosen: BTreeSet<&NodeId> = arcs.iter().collect();
        let mut used = 0usize;
        fn build(
            node: &Node,
            at: &mut Vec<usize>,
            chosen: &BTreeSet<&NodeId>,
            used: &mut usize,
        ) -> Result<NormalFormDecision, TreeError> {
            match node {
                Node::Leaf(_) => Ok(NormalFormDecision::Leaf),
                Node::Decision(children) => {
                    let mut picked = None;
                    for i in 0..children.len() {
                        at.push(i);
                        if chosen.contains(&NodeId(at.clone())) {
                            if picked.is_some() {
                                return Err(TreeError::PlanMismatch(NodeId(at.clone())));
                            }
                            picked = Some(i);
                        }
                        at.pop();
                    }
                    let i = picked.ok_or_else(|| TreeError::PlanMismatch(NodeId(at.clone())))?;
                    *used += 1;
                    at.push(i);
                    let next = build(&children[i], at, chosen, used)?;
                    at.pop();
                    Ok(NormalFormDecision::choose(i, next))
                }
                Node::Chance(branches) => {
                    let mut out = Vec::with_capacity(branches.len());
                    for (i, (_, child)) in branches.iter().enumerate() {
                        at.push(i);
                        out.push(build(child, at, chosen, used)?);
                        at.pop();
                    }
                    Ok(NormalFormDecision::Chance(out))
                }
            }
        }
        let plan = build(tree.root(), &mut Vec::new(), &chosen, &mut used)?;
        if used != chosen.len() {
            let stray = arcs
                .iter()
                .find(|a| !plan.arcs().contains(a))
                .cloned()
                .unwrap_or_default();
            return Err(TreeError::PlanMismatch(stray));
        }
        Ok(plan)
    }

    /// The normal form gamble induced on the source tree.
    pub fn gamble(&self, tree: &DecisionTree) -> Result<Gamble, TreeError> {
        let n = tree.state_count();
        let mut out = vec![RewardId(0); n];
        fill(tree.root(), self, full_mask_of(n), &mut out, &mut Vec::new())?;
        Ok(Gamble::new(out))
    }

    /// Materializes the decision as a tree whose decision nodes are all unary.
    pub fn to_tree(&self, tree: &DecisionTree) -> Result<DecisionTree, TreeError> {
        fn build(node: &Node, plan: &NormalFormDecision, at: &mut Vec<usize>) -> Result<Node, TreeError> {
            match (node, plan) {
                (Node::Leaf(r), NormalFormDecision::Leaf) => Ok(Node::Leaf(*r)),
                (Node::Decision(children), NormalFormDecision::Decision { choice, next }) => {
                    let child = children
                        .get(*choice)
                        .ok_or_else(|| TreeError::PlanMismatch(NodeId(at.clone())))?;
                    at.push(*choice);
                    let built = build(child, next, at)?;
                    at.pop();
                    Ok(Node::unary(built))
                }
                (Node::Chance(branches), NormalFormDecision::Chance(plans)) if branches.len() == plans.len() => {
                    let mut out = Vec::with_capacity(branches.len());
                    for (i, ((e, child), p)) in branches.iter().zip(plans).enumerate() {
                        at.push(i);
                        out.push((*e, build(child, p, at)?));
                        at.pop();
                    }
                    Ok(Node::Chance(out))
                }
                _ => Err(TreeError::PlanMismatch(NodeId(at.clone()))),
            }
        }
        Ok(DecisionTree::new(
            build(tree.root(), self, &mut Vec::new())?,
            *tree.root_event(),
        ))
    }
}

pub(crate) fn fill(
    node: &Node,
    plan: &NormalFormDecision,
    mask: u64,
    out: &mut [RewardId],
    at: &mut Vec<usize>,
) -> Result<(), TreeError> {
    match (node, plan) {
        (Node::Leaf(r), NormalFormDecision::Leaf) => {
            for (s, slot) in out.iter_mut().enumerate() {
                if mask & (1 << s) != 0 {
                    *slot = *r;
                }
            }
            Ok(())
        }
        (Node::Decision(children), NormalFormDecision::Decision { choice, next }) => {
            let child = children
                .get(*choice)
                .ok_or_else(|| TreeError::PlanMismatch(NodeId(at.clone())))?;
            at.push(*choice);
            fill(child, next, mask, out, at)?;
            at.pop();
            Ok(())
        }
        (Node::Chance(branches), NormalFormDecision::Chance(plans)) if branches.len() == plans.len() => {
            for (i, ((e, child), p)) in branches.iter().zip(plans).enumerate() {
                at.push(i);
                fill(child, p, mask & e.bits(), out, at)?;
                at.pop();
            }
            Ok(())
        }
        _ => Err(TreeError::PlanMismatch(NodeId(at.clone()))),
    }
}

/// A normal form solution: a set of normal form decisions of one tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NormalFormSolution {
    members: BTreeSet<NormalFormDecision>,
}

impl NormalFormSolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, decision: NormalFormDecision) -> bool {
        self.members.insert(decision)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, decision: &NormalFormDecision) -> bool {
        self.members.contains(decision)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &NormalFormDecision> + ExactSizeIterator {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &NormalFormSolution) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn difference(&self, other: &NormalFormSolution) -> NormalFormSolution {
        self.members.difference(&other.members).cloned().collect()
    }

    /// Whether `id` lies in at least one member.
    pub fn reaches(&self, id: &NodeId) -> bool {
        self.members.iter().any(|m| m.contains(id))
    }

    /// `gamb` of the solution: the union of its members' gambles.
    pub fn gambles(&self, tree: &DecisionTree) -> Result<GambleSet, TreeError> {
        self.members.iter().map(|m| m.gamble(tree)).collect()
    }

    pub fn arc_lists(&self) -> Vec<Vec<NodeId>> {
        self.members.iter().map(NormalFormDecision::arcs).collect()
    }
}

impl FromIterator<NormalFormDecision> for NormalFormSolution {
    fn from_iter<I: IntoIterator<Item = NormalFormDecision>>(iter: I) -> Self {
        NormalFormSolution {
            members: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for NormalFormSolution {
    type Item = NormalFormDecision;
    type IntoIter = std::collections::btree_set::IntoIter<NormalFormDecision>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

impl<'a> IntoIterator for &'a NormalFormSolution {
    type Item = &'a NormalFormDecision;
    type IntoIter = std::collections::btree_set::Iter<'a, NormalFormDecision>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
