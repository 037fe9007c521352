use std::fmt::Write;

use super::Problem;
use crate::scalar::format_rational;
use crate::solve::{ArcMark, ExtensiveSolution};
use crate::tree::{Node, NodeId};

fn dot_id(id: &NodeId) -> String {
    let mut s = String::from("n");
    for i in id.path() {
        write!(s, "_{i}").expect("string write");
    }
    s
}

/// Graphviz text for the tree: decision nodes as boxes, chance nodes as
/// circles, leaves as `reward (utility)`. With an extensive solution, pruned
/// decision arcs are dashed and arcs out of unreachable decision nodes gray.
pub fn export_dot(problem: &Problem, solution: Option<&ExtensiveSolution>) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=LR;\n");
    let mut edges = String::new();
    let mut stack = vec![(NodeId::root(), problem.tree.root())];
    while let Some((id, node)) = stack.pop() {
        let name = dot_id(&id);
        match node {
            Node::Leaf(r) => {
                let label = format!(
                    "{} ({})",
                    problem.utilities.name(*r),
                    format_rational(problem.utilities.utility(*r))
                );
                writeln!(out, "  {name} [shape=plaintext, label=\"{label}\"];").expect("string write");
            }
            Node::Decision(children) => {
                writeln!(out, "  {name} [shape=box, label=\"{id}\"];").expect("string write");
                for (i, child) in children.iter().enumerate() {
                    let cid = id.child(i);
                    let style = match solution.and_then(|s| s.mark(&cid)) {
                        Some(ArcMark::Pruned) => ", style=dashed",
                        Some(ArcMark::Unreachable) => ", color=gray",
                        _ => "",
                    };
                    writeln!(edges, "  {name} -> {} [label=\"{}\"{style}];", dot_id(&cid), i + 1)
                        .expect("string write");
                    stack.push((cid, child));
                }
            }
            Node::Chance(branches) => {
                writeln!(out, "  {name} [shape=circle, label=\"{id}\"];").expect("string write");
                for (i, (event, child)) in branches.iter().enumerate() {
                    let cid = id.child(i);
                    let label = match problem.event_name(event) {
                        Some(n) => n.to_string(),
                        None => event.display(&problem.space).to_string(),
                    };
                    writeln!(edges, "  {name} -> {} [label=\"{label}\"];", dot_id(&cid)).expect("string write");
                    stack.push((cid, child));
                }
            }
        }
        // keep preorder: children were pushed left to right
        let len = stack.len();
        let pushed = node.child_count();
        stack[len - pushed..].reverse();
    }
    out.push_str(&edges);
    out.push_str("}\n");
    out
}
