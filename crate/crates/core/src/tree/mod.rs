//! Decision trees built from leaves, decision nodes (`⊔`) and chance nodes
//! (`⊙`), together with normal form decisions and the `gamb`/`nfd` recursions.

mod ops;
mod plan;

pub use ops::{
    count_nfd, gamb, gamb_with_limit, gambles_of_nfd, nfd, nfd_with_limit, prune_inconsistent,
    restrict_solution, strategically_equivalent, subtree_at, tree_for_gambles, validate,
    StrategicEquivalence,
};
pub use plan::{NormalFormDecision, NormalFormSolution};

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{Event, ModelError, RewardId};

/// Default cap on the number of normal form decisions any enumeration may produce.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("branch events at node {0} do not partition the possibility space")]
    NotAPartition(NodeId),
    #[error("node {0} is reached under an empty event")]
    EmptySubtreeEvent(NodeId),
    #[error("node {0} has no children")]
    EmptyNode(NodeId),
    #[error("node {0} uses an event from a different possibility space")]
    SpaceMismatch(NodeId),
    #[error("no node at {0}")]
    UnknownNode(NodeId),
    #[error("{count} normal form decisions exceed the enumeration limit of {limit}")]
    EnumerationLimitExceeded { count: u128, limit: usize },
    #[error("normal form decision does not match the tree at {0}")]
    PlanMismatch(NodeId),
    #[error("trees are defined on different possibility spaces")]
    TreesOnDifferentSpaces,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Address of a node: the child indices followed from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub Vec<usize>);

impl NodeId {
    pub fn root() -> NodeId {
        NodeId(Vec::new())
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: usize) -> NodeId {
        let mut path = self.0.clone();
        path.push(index);
        NodeId(path)
    }

    pub fn parent(&self) -> Option<NodeId> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Whether `self` lies in the subtree rooted at `ancestor`.
    pub fn starts_with(&self, ancestor: &NodeId) -> bool {
        self.0.starts_with(&ancestor.0)
    }

    /// The path of `self` relative to `ancestor`.
    pub fn relative_to(&self, ancestor: &NodeId) -> Option<NodeId> {
        self.starts_with(ancestor)
            .then(|| NodeId(self.0[ancestor.0.len()..].to_vec()))
    }

    pub fn join(&self, rest: &NodeId) -> NodeId {
        let mut path = self.0.clone();
        path.extend_from_slice(&rest.0);
        NodeId(path)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl From<Vec<usize>> for NodeId {
    fn from(path: Vec<usize>) -> Self {
        NodeId(path)
    }
}

/// One node of a decision tree together with everything below it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(RewardId),
    Decision(Vec<Node>),
    Chance(Vec<(Event, Node)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Decision,
    Chance,
}

impl Node {
    pub fn leaf(reward: RewardId) -> Node {
        Node::Leaf(reward)
    }

    pub fn decision(children: Vec<Node>) -> Node {
        Node::Decision(children)
    }

    /// `⊔T`: a decision node with a single option.
    pub fn unary(child: Node) -> Node {
        Node::Decision(vec![child])
    }

    pub fn chance(branches: Vec<(Event, Node)>) -> Node {
        Node::Chance(branches)
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Leaf(_) => NodeKind::Leaf,
            Node::Decision(_) => NodeKind::Decision,
            Node::Chance(_) => NodeKind::Chance,
        }
    }

    pub fn child_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Decision(c) => c.len(),
            Node::Chance(b) => b.len(),
        }
    }

    pub fn child(&self, index: usize) -> Option<&Node> {
        match self {
            Node::Leaf(_) => None,
            Node::Decision(c) => c.get(index),
            Node::Chance(b) => b.get(index).map(|(_, n)| n),
        }
    }

    /// Total number of nodes, this one included.
    pub fn size(&self) -> usize {
        1 + match self {
            Node::Leaf(_) => 0,
            Node::Decision(c) => c.iter().map(Node::size).sum(),
            Node::Chance(b) => b.iter().map(|(_, n)| n.size()).sum(),
        }
    }

    /// Number of arcs on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Decision(c) => 1 + c.iter().map(Node::depth).max().unwrap_or(0),
            Node::Chance(b) => 1 + b.iter().map(|(_, n)| n.depth()).max().unwrap_or(0),
        }
    }

    fn canonical(&self) -> Node {
        match self {
            Node::Leaf(r) => Node::Leaf(*r),
            Node::Decision(c) => Node::Decision(c.iter().map(Node::canonical).collect()),
            Node::Chance(b) => {
                let mut branches: Vec<(Event, Node)> =
                    b.iter().map(|(e, n)| (*e, n.canonical())).collect();
                branches.sort_by_key(|(e, _)| e.bits());
                Node::Chance(branches)
            }
        }
    }
}

/// A decision tree together with its conditioning event `ev(T)`.
#[derive(Clone, Debug)]
pub struct DecisionTree {
    root_event: Event,
    root: Node,
}

impl DecisionTree {
    pub fn new(root: Node, root_event: Event) -> DecisionTree {
        DecisionTree { root_event, root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    /// `ev(T)`: the intersection of all chance events that preceded the tree.
    pub fn root_event(&self) -> &Event {
        &self.root_event
    }

    pub fn with_root_event(&self, event: Event) -> DecisionTree {
        DecisionTree::new(self.root.clone(), event)
    }

    pub fn state_count(&self) -> usize {
        self.root_event.space_len()
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        let mut node = &self.root;
        for &i in id.path() {
            node = node.child(i)?;
        }
        Some(node)
    }

    /// All node addresses in preorder.
    pub fn node_ids(&self) -> Vec<NodeId> {
        fn walk(node: &Node, at: &mut Vec<usize>, out: &mut Vec<NodeId>) {
            out.push(NodeId(at.clone()));
            for i in 0..node.child_count() {
                at.push(i);
                walk(node.child(i).expect("in range"), at, out);
                at.pop();
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Counts (decision, chance, leaf) nodes.
    pub fn node_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for id in self.node_ids() {
            match self.node(&id).expect("own id").kind() {
                NodeKind::Decision => counts.0 += 1,
                NodeKind::Chance => counts.1 += 1,
                NodeKind::Leaf => counts.2 += 1,
            }
        }
        counts
    }
}

/// Structural equality up to the order of chance branches.
impl PartialEq for DecisionTree {
    fn eq(&self, other: &Self) -> bool {
        self.root_event == other.root_event && self.root.canonical() == other.root.canonical()
    }
}

impl Eq for DecisionTree {}
