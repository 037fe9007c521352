use rand::seq::SliceRandom;
use rand::Rng;

use super::rng_for;
use crate::tree::{DecisionTree, Node, NodeId};

/// Rewrites that leave `gamb` and `ev` unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rewrite {
    PermuteDecision,
    FlattenDecision,
    NestDecision,
    InsertUnary,
    RemoveUnary,
    PermuteChance,
}

impl Rewrite {
    pub const ALL: [Rewrite; 6] = [
        Rewrite::PermuteDecision,
        Rewrite::FlattenDecision,
        Rewrite::NestDecision,
        Rewrite::InsertUnary,
        Rewrite::RemoveUnary,
        Rewrite::PermuteChance,
    ];

    fn applies(self, node: &Node) -> bool {
        match (self, node) {
            (Rewrite::PermuteDecision | Rewrite::NestDecision, Node::Decision(c)) => c.len() >= 2,
            (Rewrite::FlattenDecision, Node::Decision(c)) => c.iter().any(|n| matches!(n, Node::Decision(_))),
            (Rewrite::RemoveUnary, Node::Decision(c)) => c.len() == 1,
            (Rewrite::PermuteChance, Node::Chance(b)) => b.len() >= 2,
            (Rewrite::InsertUnary, _) => true,
            _ => false,
        }
    }
}

fn node_mut<'a>(mut node: &'a mut Node, id: &NodeId) -> &'a mut Node {
    for &i in id.path() {
        node = match node {
            Node::Decision(c) => &mut c[i],
            Node::Chance(b) => &mut b[i].1,
            Node::Leaf(_) => unreachable!("path from node_ids"),
        };
    }
    node
}

fn apply<R: Rng>(kind: Rewrite, node: &mut Node, rng: &mut R) {
    match kind {
        Rewrite::PermuteDecision => {
            if let Node::Decision(c) = node {
                c.shuffle(rng);
            }
        }
        Rewrite::PermuteChance => {
            if let Node::Chance(b) = node {
                b.shuffle(rng);
            }
        }
        Rewrite::InsertUnary => {
            let inner = std::mem::replace(node, Node::Decision(Vec::new()));
            *node = Node::unary(inner);
        }
        Rewrite::RemoveUnary => {
            if let Node::Decision(c) = node {
                let inner = c.pop().expect("unary");
                *node = inner;
            }
        }
        Rewrite::FlattenDecision => {
            if let Node::Decision(c) = node {
                let sites: Vec<usize> = (0..c.len()).filter(|&i| matches!(c[i], Node::Decision(_))).collect();
                let i = *sites.choose(rng).expect("applies");
                if let Node::Decision(grand) = c.remove(i) {
                    for (k, g) in grand.into_iter().enumerate() {
                        c.insert(i + k, g);
                    }
                }
            }
        }
        Rewrite::NestDecision => {
            if let Node::Decision(c) = node {
                let len = rng.gen_range(2..=c.len());
                let start = rng.gen_range(0..=c.len() - len);
                let group: Vec<Node> = c.drain(start..start + len).collect();
                c.insert(start, Node::Decision(group));
            }
        }
    }
}

/// Applies one random applicable rewrite, returning which one was used.
pub fn rewrite_step<R: Rng>(tree: &DecisionTree, rng: &mut R) -> (DecisionTree, Rewrite) {
    let ids = tree.node_ids();
    let mut kinds = Rewrite::ALL.to_vec();
    kinds.shuffle(rng);
    for kind in kinds {
        let sites: Vec<&NodeId> = ids
            .iter()
            .filter(|id| kind.applies(tree.node(id).expect("own id")))
            .collect();
        if let Some(site) = sites.choose(rng) {
            let mut root = tree.root().clone();
            apply(kind, node_mut(&mut root, site), rng);
            return (DecisionTree::new(root, *tree.root_event()), kind);
        }
    }
    unreachable!("InsertUnary applies everywhere")
}

/// A strategically equivalent tree with the same `ev`, after `steps` random rewrites.
pub fn equivalent_rewrite(tree: &DecisionTree, steps: usize, seed: u64) -> DecisionTree {
    let mut rng = rng_for(seed);
    let mut current = tree.clone();
    for _ in 0..steps {
        current = rewrite_step(&current, &mut rng).0;
    }
    current
}
