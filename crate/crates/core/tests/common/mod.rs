//! Brute-force oracles shared by the integration tests. None of them calls
//! the library's recursions or choice rules.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use choicetree::choice::{ChoiceContext, MassFunction, RuleKind};
use choicetree::io::{parse_tree_file, Problem};
use choicetree::model::{Event, Gamble, GambleSet, RewardId};
use choicetree::tree::{DecisionTree, Node, NodeId};
use choicetree::Rational;
use num_traits::Zero;

pub type Raw = Vec<u32>;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn load(name: &str) -> Problem {
    parse_tree_file(&fixture_text(name)).unwrap().resolve().unwrap()
}

pub fn raw(g: &Gamble) -> Raw {
    g.values().iter().map(|r| r.0).collect()
}

pub fn raw_set(set: &GambleSet) -> BTreeSet<Raw> {
    set.iter().map(raw).collect()
}

pub fn to_set(raws: &BTreeSet<Raw>) -> GambleSet {
    raws.iter()
        .map(|v| Gamble::new(v.iter().map(|&r| RewardId(r)).collect()))
        .collect()
}

fn decision_nodes(tree: &DecisionTree) -> Vec<(NodeId, usize)> {
    tree.node_ids()
        .into_iter()
        .filter_map(|id| match tree.node(&id) {
            Some(Node::Decision(c)) => Some((id, c.len())),
            _ => None,
        })
        .collect()
}

/// Number of full strategies (one choice at every decision node).
pub fn strategy_count(tree: &DecisionTree) -> u128 {
    decision_nodes(tree)
        .iter()
        .fold(1u128, |acc, (_, k)| acc.saturating_mul(*k as u128))
}

/// Follows state `w` through the tree under `choice`.
fn play(tree: &DecisionTree, w: usize, choice: &dyn Fn(&NodeId) -> usize) -> u32 {
    let mut id = NodeId::root();
    let mut node = tree.root();
    loop {
        match node {
            Node::Leaf(r) => return r.0,
            Node::Decision(children) => {
                let i = choice(&id);
                id = id.child(i);
                node = &children[i];
            }
            Node::Chance(branches) => {
                let i = branches.iter().position(|(e, _)| e.contains(w)).expect("partition");
                id = id.child(i);
                node = &branches[i].1;
            }
        }
    }
}

/// Every gamble some full strategy produces, by playing each state.
pub fn oracle_gambles(tree: &DecisionTree) -> BTreeSet<Raw> {
    let nodes = decision_nodes(tree);
    let n = tree.state_count();
    let mut out = BTreeSet::new();
    let mut digits = vec![0usize; nodes.len()];
    loop {
        let choice = |id: &NodeId| {
            let k = nodes.iter().position(|(d, _)| d == id).expect("decision node");
            digits[k]
        };
        out.insert((0..n).map(|w| play(tree, w, &choice)).collect());
        let mut k = 0;
        loop {
            if k == nodes.len() {
                return out;
            }
            digits[k] += 1;
            if digits[k] < nodes[k].1 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Gamble of one normal form decision, given as its decision arcs.
pub fn oracle_plan_gamble(tree: &DecisionTree, arcs: &[NodeId]) -> Raw {
    let choice = |id: &NodeId| {
        arcs.iter()
            .find(|a| a.parent().as_ref() == Some(id))
            .map(|a| *a.path().last().unwrap())
            .expect("plan covers every reached decision node")
    };
    (0..tree.state_count()).map(|w| play(tree, w, &choice)).collect()
}

fn util(ctx: &ChoiceContext<Rational>, r: u32) -> Rational {
    ctx.utilities.utility(RewardId(r)).clone()
}

pub fn expectation(ctx: &ChoiceContext<Rational>, p: &MassFunction<Rational>, g: &Raw, a: &Event) -> Rational {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for w in a.states() {
        num += p.masses()[w].clone() * util(ctx, g[w]);
        den += p.masses()[w].clone();
    }
    num / den
}

fn credal(ctx: &ChoiceContext<Rational>) -> Vec<MassFunction<Rational>> {
    match (&ctx.credal, &ctx.probability) {
        (Some(c), _) => c.clone(),
        (None, Some(p)) => vec![p.clone()],
        (None, None) => panic!("no mass functions"),
    }
}

fn argmax<F: Fn(&Raw) -> Rational>(set: &BTreeSet<Raw>, f: F) -> BTreeSet<Raw> {
    let best = set.iter().map(&f).max().expect("non-empty");
    set.iter().filter(|g| f(g) == best).cloned().collect()
}

/// The six rules straight from their definitions.
pub fn oracle_select(kind: RuleKind, ctx: &ChoiceContext<Rational>, set: &BTreeSet<Raw>, a: &Event) -> BTreeSet<Raw> {
    match kind {
        RuleKind::EuMax => {
            let p = ctx.probability.clone().expect("probability");
            argmax(set, |g| expectation(ctx, &p, g, a))
        }
        RuleKind::PointwiseDominance => set
            .iter()
            .filter(|x| {
                !set.iter().any(|y| {
                    a.states().all(|w| util(ctx, y[w]) >= util(ctx, x[w]))
                        && a.states().any(|w| util(ctx, y[w]) > util(ctx, x[w]))
                })
            })
            .cloned()
            .collect(),
        RuleKind::Maximality => {
            let ps = credal(ctx);
            set.iter()
                .filter(|x| {
                    !set.iter().any(|y| {
                        ps.iter()
                            .all(|p| expectation(ctx, p, y, a) - expectation(ctx, p, x, a) > Rational::zero())
                    })
                })
                .cloned()
                .collect()
        }
        RuleKind::EAdmissibility => {
            let ps = credal(ctx);
            ps.iter().flat_map(|p| argmax(set, |g| expectation(ctx, p, g, a))).collect()
        }
        RuleKind::GammaMaximin => {
            let ps = credal(ctx);
            argmax(set, |g| ps.iter().map(|p| expectation(ctx, p, g, a)).min().unwrap())
        }
        RuleKind::IntervalDominance => {
            let ps = credal(ctx);
            let lo = |g: &Raw| ps.iter().map(|p| expectation(ctx, p, g, a)).min().unwrap();
            let hi = |g: &Raw| ps.iter().map(|p| expectation(ctx, p, g, a)).max().unwrap();
            set.iter()
                .filter(|x| !set.iter().any(|y| lo(y) > hi(x)))
                .cloned()
                .collect()
        }
    }
}

/// Gambles of the normal form solution: the selected members of the
/// simulated gamble set.
pub fn oracle_norm_opt(kind: RuleKind, ctx: &ChoiceContext<Rational>, tree: &DecisionTree) -> BTreeSet<Raw> {
    oracle_select(kind, ctx, &oracle_gambles(tree), tree.root_event())
}
