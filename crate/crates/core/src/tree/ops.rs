use super::{DecisionTree, Node, NodeId, NormalFormDecision, NormalFormSolution, TreeError, DEFAULT_ENUMERATION_LIMIT};
use crate::model::{check_partition, set_sum_unchecked, Event, Gamble, GambleSet, ModelError, RewardId};

pub(crate) fn full_mask_of(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Checks the partition requirement at every chance node and that every node
/// is reached under a non-empty event. Reports the first offending node in
/// preorder.
pub fn validate(tree: &DecisionTree) -> Result<(), TreeError> {
    fn walk(node: &Node, ev: Event, at: &mut Vec<usize>) -> Result<(), TreeError> {
        if ev.is_empty() {
            return Err(TreeError::EmptySubtreeEvent(NodeId(at.clone())));
        }
        match node {
            Node::Leaf(_) => Ok(()),
            Node::Decision(children) => {
                if children.is_empty() {
                    return Err(TreeError::EmptyNode(NodeId(at.clone())));
                }
                for (i, child) in children.iter().enumerate() {
                    at.push(i);
                    walk(child, ev, at)?;
                    at.pop();
                }
                Ok(())
            }
            Node::Chance(branches) => {
                if branches.is_empty() {
                    return Err(TreeError::EmptyNode(NodeId(at.clone())));
                }
                let events: Vec<Event> = branches.iter().map(|(e, _)| *e).collect();
                if events.iter().any(|e| e.same_space(&ev).is_err()) {
                    return Err(TreeError::SpaceMismatch(NodeId(at.clone())));
                }
                if check_partition(&events).is_err() {
                    return Err(TreeError::NotAPartition(NodeId(at.clone())));
                }
                for (i, (e, child)) in branches.iter().enumerate() {
                    at.push(i);
                    walk(child, ev & *e, at)?;
                    at.pop();
                }
                Ok(())
            }
        }
    }
    walk(tree.root(), *tree.root_event(), &mut Vec::new())
}

/// Drops chance branches whose event cannot occur given the history,
/// merging each dropped event into the first surviving sibling so that the
/// branch events still partition the space.
pub fn prune_inconsistent(tree: &DecisionTree) -> Result<DecisionTree, TreeError> {
    fn walk(node: &Node, ev: Event, at: &mut Vec<usize>) -> Result<Node, TreeError> {
        match node {
            Node::Leaf(r) => Ok(Node::Leaf(*r)),
            Node::Decision(children) => {
                let mut out = Vec::with_capacity(children.len());
                for (i, c) in children.iter().enumerate() {
                    at.push(i);
                    out.push(walk(c, ev, at)?);
                    at.pop();
                }
                Ok(Node::Decision(out))
            }
            Node::Chance(branches) => {
                let events: Vec<Event> = branches.iter().map(|(e, _)| *e).collect();
                if check_partition(&events).is_err() {
                    return Err(TreeError::NotAPartition(NodeId(at.clone())));
                }
                let mut dropped = ev.with_bits(0);
                let mut kept = Vec::new();
                for (i, (e, child)) in branches.iter().enumerate() {
                    if e.intersects(&ev) {
                        at.push(i);
                        kept.push((*e, walk(child, ev & *e, at)?));
                        at.pop();
                    } else {
                        dropped = dropped | *e;
                    }
                }
                let first = kept
                    .first_mut()
                    .ok_or_else(|| TreeError::EmptySubtreeEvent(NodeId(at.clone())))?;
                first.0 = first.0 | dropped;
                Ok(Node::Chance(kept))
            }
        }
    }
    if tree.root_event().is_empty() {
        return Err(TreeError::EmptySubtreeEvent(NodeId::root()));
    }
    let root = walk(tree.root(), *tree.root_event(), &mut Vec::new())?;
    Ok(DecisionTree::new(root, *tree.root_event()))
}

/// `st_N(T)`: the subtree at `node`, remembering the event accumulated on the
/// chance arcs leading to it.
pub fn subtree_at(tree: &DecisionTree, node: &NodeId) -> Result<DecisionTree, TreeError> {
    let mut current = tree.root();
    let mut ev = *tree.root_event();
    for &i in node.path() {
        current = match current {
            Node::Leaf(_) => return Err(TreeError::UnknownNode(node.clone())),
            Node::Decision(children) => children.get(i).ok_or_else(|| TreeError::UnknownNode(node.clone()))?,
            Node::Chance(branches) => {
                let (e, child) = branches.get(i).ok_or_else(|| TreeError::UnknownNode(node.clone()))?;
                ev = ev & *e;
                child
            }
        };
    }
    Ok(DecisionTree::new(current.clone(), ev))
}

/// `|nfd(T)|` by the product/sum recursion, saturating.
pub fn count_nfd(node: &Node) -> u128 {
    match node {
        Node::Leaf(_) => 1,
        Node::Decision(children) => children
            .iter()
            .map(count_nfd)
            .fold(0u128, |a, b| a.saturating_add(b)),
        Node::Chance(branches) => branches
            .iter()
            .map(|(_, n)| count_nfd(n))
            .fold(1u128, |a, b| a.saturating_mul(b)),
    }
}

fn check_limit(node: &Node, limit: usize) -> Result<(), TreeError> {
    let count = count_nfd(node);
    if count > limit as u128 {
        Err(TreeError::EnumerationLimitExceeded { count, limit })
    } else {
        Ok(())
    }
}

/// All normal form decisions of the tree, in canonical order.
pub fn nfd(tree: &DecisionTree) -> Result<Vec<NormalFormDecision>, TreeError> {
    nfd_with_limit(tree, DEFAULT_ENUMERATION_LIMIT)
}

pub fn nfd_with_limit(tree: &DecisionTree, limit: usize) -> Result<Vec<NormalFormDecision>, TreeError> {
    check_limit(tree.root(), limit)?;
    let mut out = enumerate(tree.root());
    out.sort();
    Ok(out)
}

pub(crate) fn enumerate(node: &Node) -> Vec<NormalFormDecision> {
    match node {
        Node::Leaf(_) => vec![NormalFormDecision::Leaf],
        Node::Decision(children) => children
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                enumerate(c)
                    .into_iter()
                    .map(move |p| NormalFormDecision::choose(i, p))
            })
            .collect(),
        Node::Chance(branches) => {
            let mut acc: Vec<Vec<NormalFormDecision>> = vec![Vec::new()];
            for (_, child) in branches {
                let options = enumerate(child);
                let mut next = Vec::with_capacity(acc.len() * options.len());
                for prefix in &acc {
                    for option in &options {
                        let mut v = prefix.clone();
                        v.push(option.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc.into_iter().map(NormalFormDecision::Chance).collect()
        }
    }
}

/// `gamb(T)` by the leaf / set-sum / union recursion.
pub fn gamb(tree: &DecisionTree) -> Result<GambleSet, TreeError> {
    gamb_with_limit(tree, DEFAULT_ENUMERATION_LIMIT)
}

pub fn gamb_with_limit(tree: &DecisionTree, limit: usize) -> Result<GambleSet, TreeError> {
    check_limit(tree.root(), limit)?;
    Ok(gamb_node(tree.root(), tree.state_count()))
}

fn gamb_node(node: &Node, n: usize) -> GambleSet {
    match node {
        Node::Leaf(r) => GambleSet::singleton(Gamble::constant(*r, n)),
        Node::Decision(children) => children.iter().flat_map(|c| gamb_node(c, n)).collect(),
        Node::Chance(branches) => {
            let partition: Vec<Event> = branches.iter().map(|(e, _)| *e).collect();
            let sets: Vec<GambleSet> = branches.iter().map(|(_, c)| gamb_node(c, n)).collect();
            set_sum_unchecked(&partition, &sets)
        }
    }
}

/// `gamb(nfd(T))`: the union of the gambles of every normal form decision.
pub fn gambles_of_nfd(tree: &DecisionTree, limit: usize) -> Result<GambleSet, TreeError> {
    nfd_with_limit(tree, limit)?
        .iter()
        .map(|p| p.gamble(tree))
        .collect()
}

/// Outcome of a strategic equivalence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategicEquivalence {
    /// `gamb(t1) = gamb(t2)`.
    pub equivalent: bool,
    /// `ev(t1) = ev(t2)`.
    pub same_event: bool,
}

pub fn strategically_equivalent(
    t1: &DecisionTree,
    t2: &DecisionTree,
    limit: usize,
) -> Result<StrategicEquivalence, TreeError> {
    if t1.root_event().same_space(t2.root_event()).is_err() {
        return Err(TreeError::TreesOnDifferentSpaces);
    }
    Ok(StrategicEquivalence {
        equivalent: gamb_with_limit(t1, limit)? == gamb_with_limit(t2, limit)?,
        same_event: t1.root_event() == t2.root_event(),
    })
}

/// `st_N(𝒯)`: restrictions of the members that pass through `node`.
pub fn restrict_solution(
    tree: &DecisionTree,
    solution: &NormalFormSolution,
    node: &NodeId,
) -> Result<NormalFormSolution, TreeError> {
    if tree.node(node).is_none() {
        return Err(TreeError::UnknownNode(node.clone()));
    }
    Ok(solution.iter().filter_map(|m| m.restrict(node)).collect())
}

/// The tree `⊔_{X∈𝒳} ⊙_{r} X⁻¹(r) r` with `ev = a`, which realizes `set` as
/// the normal form gambles of a single tree.
pub fn tree_for_gambles(set: &GambleSet, a: &Event) -> Result<DecisionTree, TreeError> {
    if set.is_empty() {
        return Err(ModelError::EmptyInputSet.into());
    }
    let n = a.space_len();
    let mut options = Vec::with_capacity(set.len());
    for gamble in set {
        if gamble.len() != n {
            return Err(ModelError::DimensionMismatch.into());
        }
        let branches: Vec<(Event, Node)> = gamble
            .attained()
            .into_iter()
            .map(|r: RewardId| {
                let bits = (0..n)
                    .filter(|&s| gamble.get(s) == r)
                    .fold(0u64, |acc, s| acc | (1 << s));
                (a.with_bits(bits), Node::Leaf(r))
            })
            .collect();
        options.push(Node::Chance(branches));
    }
    Ok(DecisionTree::new(Node::Decision(options), *a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PossibilitySpace, RewardId};

    fn leaf(i: u32) -> Node {
        Node::leaf(RewardId(i))
    }

    /// Small counterexample tree over {a1, a2}: rewards X=-1 (0), Y1=-2 (1), Y2=2 (2), Z=0 (3).
    fn counterexample() -> (PossibilitySpace, DecisionTree) {
        let space = PossibilitySpace::new(["a1", "a2"]).unwrap();
        let a = space.event_from_states([0]).unwrap();
        let n = Node::decision(vec![leaf(0), Node::chance(vec![(a, leaf(1)), (!a, leaf(2))])]);
        (space.clone(), DecisionTree::new(Node::decision(vec![n, leaf(3)]), space.full()))
    }

    fn g(v: &[u32]) -> Gamble {
        Gamble::new(v.iter().map(|&i| RewardId(i)).collect())
    }

    #[test]
    fn single_leaf() {
        let space = PossibilitySpace::numbered(3).unwrap();
        let t = DecisionTree::new(leaf(4), space.full());
        assert!(validate(&t).is_ok());
        assert_eq!(nfd(&t).unwrap(), vec![NormalFormDecision::Leaf]);
        assert_eq!(gamb(&t).unwrap(), GambleSet::singleton(g(&[4, 4, 4])));
    }

    #[test]
    fn duplicated_event_is_not_a_partition() {
        let space = PossibilitySpace::numbered(2).unwrap();
        let e = space.event_from_states([0]).unwrap();
        let t = DecisionTree::new(
            Node::decision(vec![leaf(0), Node::chance(vec![(e, leaf(0)), (e, leaf(1))])]),
            space.full(),
        );
        assert_eq!(validate(&t), Err(TreeError::NotAPartition(NodeId(vec![1]))));
    }

    #[test]
    fn inconsistent_branch_reported_and_pruned() {
        let space = PossibilitySpace::numbered(3).unwrap();
        let a = space.event_from_states([0]).unwrap();
        let b = space.event_from_states([1]).unwrap();
        let c = space.event_from_states([2]).unwrap();
        // under history A, the branch on B can never occur
        let inner = Node::chance(vec![(a, leaf(0)), (b, leaf(1)), (c, leaf(2))]);
        let t = DecisionTree::new(Node::chance(vec![(a, inner), (!a, leaf(3))]), space.full());
        assert_eq!(validate(&t), Err(TreeError::EmptySubtreeEvent(NodeId(vec![0, 1]))));
        let pruned = prune_inconsistent(&t).unwrap();
        assert!(validate(&pruned).is_ok());
        assert_eq!(pruned.node(&NodeId(vec![0])).unwrap().child_count(), 1);
    }

    #[test]
    fn counterexample_gambles_and_decisions() {
        let (_, t) = counterexample();
        assert!(validate(&t).is_ok());
        let decisions = nfd(&t).unwrap();
        assert_eq!(decisions.len(), 3);
        let expected: GambleSet = [g(&[0, 0]), g(&[1, 2]), g(&[3, 3])].into_iter().collect();
        assert_eq!(gamb(&t).unwrap(), expected);
        assert_eq!(gambles_of_nfd(&t, 100).unwrap(), expected);

        let n = subtree_at(&t, &NodeId(vec![0])).unwrap();
        let at_n: GambleSet = [g(&[0, 0]), g(&[1, 2])].into_iter().collect();
        assert_eq!(gamb(&n).unwrap(), at_n);
    }

    #[test]
    fn subtree_events_accumulate() {
        let space = PossibilitySpace::numbered(4).unwrap();
        let s1 = space.event_from_states([0, 2]).unwrap();
        let e1 = space.event_from_states([0, 1]).unwrap();
        let inner = Node::chance(vec![(e1, leaf(0)), (!e1, leaf(1))]);
        let t = DecisionTree::new(
            Node::chance(vec![(s1, Node::unary(inner.clone())), (!s1, inner)]),
            space.full(),
        );
        let st = subtree_at(&t, &NodeId(vec![0])).unwrap();
        assert_eq!(*st.root_event(), s1);
        let st2 = subtree_at(&t, &NodeId(vec![0, 0, 1])).unwrap();
        assert_eq!(*st2.root_event(), s1 & !e1);
        assert_eq!(subtree_at(&t, &NodeId::root()).unwrap(), t);
        assert_eq!(
            subtree_at(&t, &NodeId(vec![5])),
            Err(TreeError::UnknownNode(NodeId(vec![5])))
        );
    }

    #[test]
    fn enumeration_limit() {
        let (_, t) = counterexample();
        assert!(matches!(
            nfd_with_limit(&t, 2),
            Err(TreeError::EnumerationLimitExceeded { count: 3, limit: 2 })
        ));
    }

    #[test]
    fn unary_prefix_and_flattening_are_equivalent() {
        let (_, t) = counterexample();
        let prefixed = DecisionTree::new(Node::unary(t.root().clone()), *t.root_event());
        let eq = strategically_equivalent(&t, &prefixed, 100).unwrap();
        assert!(eq.equivalent && eq.same_event);

        let space = PossibilitySpace::numbered(2).unwrap();
        let nested = DecisionTree::new(
            Node::decision(vec![Node::decision(vec![leaf(0), leaf(1)]), leaf(2)]),
            space.full(),
        );
        let flat = DecisionTree::new(Node::decision(vec![leaf(0), leaf(1), leaf(2)]), space.full());
        assert!(strategically_equivalent(&nested, &flat, 100).unwrap().equivalent);
    }

    #[test]
    fn different_spaces_rejected() {
        let (_, t) = counterexample();
        let other = PossibilitySpace::new(["u", "v"]).unwrap();
        let t2 = DecisionTree::new(leaf(0), other.full());
        assert_eq!(
            strategically_equivalent(&t, &t2, 10),
            Err(TreeError::TreesOnDifferentSpaces)
        );
    }

    #[test]
    fn restriction_of_solutions() {
        let (_, t) = counterexample();
        let all: NormalFormSolution = nfd(&t).unwrap().into_iter().collect();
        assert_eq!(restrict_solution(&t, &all, &NodeId::root()).unwrap(), all);
        // only the member choosing the leaf on the right
        let right: NormalFormSolution = all.iter().filter(|m| m.contains(&NodeId(vec![1]))).cloned().collect();
        assert!(restrict_solution(&t, &right, &NodeId(vec![0])).unwrap().is_empty());
        assert!(restrict_solution(&t, &right, &NodeId(vec![9])).is_err());
    }

    #[test]
    fn constructed_tree_realizes_consistent_sets() {
        let space = PossibilitySpace::numbered(3).unwrap();
        let a = space.event_from_states([0, 2]).unwrap();
        let set: GambleSet = [g(&[0, 1, 1]), g(&[2, 2, 2])].into_iter().collect();
        let t = tree_for_gambles(&set, &a).unwrap();
        assert!(validate(&t).is_ok());
        assert_eq!(*t.root_event(), a);
        assert_eq!(gamb(&t).unwrap(), set);
    }
}
