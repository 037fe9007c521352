//! Structured JSON reports. Objects serialize with sorted keys, so identical
//! inputs give byte-identical output.

use serde_json::{json, Map, Value};

use crate::choice::{ChoiceContext, MassFunction};
use crate::generate::World;
use crate::laws::{LawReport, NodeVerdict, PerfectnessReport, PropertyInstance, Violation};
use crate::model::{Event, Gamble, GambleSet, PossibilitySpace, RewardTable};
use crate::scalar::format_rational;
use crate::solve::{BackwardComparison, EquivalenceCheck, ExtensiveSolution, SolveReport, SolveStats};
use crate::tree::{DecisionTree, NormalFormDecision, NormalFormSolution};
use crate::Rational;

pub fn gamble(g: &Gamble, table: &RewardTable<Rational>) -> Value {
    json!(g.names(table))
}

pub fn gamble_set(set: &GambleSet, table: &RewardTable<Rational>) -> Value {
    Value::Array(set.iter().map(|g| gamble(g, table)).collect())
}

pub fn event(e: &Event, space: &PossibilitySpace) -> Value {
    json!(e.states().map(|s| space.label(s)).collect::<Vec<_>>())
}

fn arcs(d: &NormalFormDecision) -> Value {
    json!(d.arcs())
}

/// One entry per member: its decision arcs and the gamble it induces.
pub fn solution(tree: &DecisionTree, table: &RewardTable<Rational>, s: &NormalFormSolution) -> Value {
    Value::Array(
        s.iter()
            .map(|m| {
                let g = m.gamble(tree).map(|g| gamble(&g, table)).unwrap_or(Value::Null);
                json!({ "arcs": arcs(m), "gamble": g })
            })
            .collect(),
    )
}

pub fn stats(s: &SolveStats) -> Value {
    json!({
        "decision_nodes": s.decision_nodes,
        "chance_nodes": s.chance_nodes,
        "leaves": s.leaves,
        "nfd_count": s.nfd_count.to_string(),
        "largest_candidate_set": s.largest_candidate_set,
        "choice_calls": s.choice_calls,
    })
}

pub fn solve_report(tree: &DecisionTree, table: &RewardTable<Rational>, r: &SolveReport) -> Value {
    json!({
        "method": r.method.name(),
        "solution": solution(tree, table, &r.solution),
        "induced_gambles": gamble_set(&r.induced_gambles, table),
        "stats": stats(&r.stats),
    })
}

pub fn extensive(e: &ExtensiveSolution) -> Value {
    Value::Array(
        e.marks()
            .map(|(arc, mark)| json!({ "arc": arc, "mark": mark.name() }))
            .collect(),
    )
}

pub fn equivalence(tree: &DecisionTree, table: &RewardTable<Rational>, c: &EquivalenceCheck) -> Value {
    let witness = c.witness.as_ref().map(|w| {
        let g = w.gamble(tree).map(|g| gamble(&g, table)).unwrap_or(Value::Null);
        json!({ "arcs": arcs(w), "gamble": g })
    });
    json!({
        "equivalent": c.equivalent(),
        "arcs": extensive(&c.extensive),
        "witness": witness,
    })
}

fn node_verdict(tree: &DecisionTree, table: &RewardTable<Rational>, v: &NodeVerdict) -> Value {
    let sub = crate::tree::subtree_at(tree, &v.node).ok();
    let members = |s: &NormalFormSolution| match &sub {
        Some(t) => solution(t, table, s),
        None => Value::Null,
    };
    json!({
        "node": v.node,
        "holds": v.holds,
        "expected": members(&v.expected),
        "actual": members(&v.actual),
        "expected_gambles": gamble_set(&v.expected_gambles, table),
        "actual_gambles": gamble_set(&v.actual_gambles, table),
    })
}

pub fn perfectness(tree: &DecisionTree, table: &RewardTable<Rational>, r: &PerfectnessReport) -> Value {
    json!({
        "weak": r.weak,
        "perfect": r.perfect(),
        "nodes_checked": r.nodes.len(),
        "root_solution": solution(tree, table, &r.root_solution),
        "violations": r.violations().map(|v| node_verdict(tree, table, v)).collect::<Vec<_>>(),
    })
}

pub fn comparison(tree: &DecisionTree, table: &RewardTable<Rational>, c: &BackwardComparison) -> Value {
    json!({
        "agree": c.agree(),
        "normal": solve_report(tree, table, &c.normal),
        "backward": solve_report(tree, table, &c.backward),
        "only_normal": solution(tree, table, &c.only_normal),
        "only_backward": solution(tree, table, &c.only_backward),
    })
}

fn mass(m: &MassFunction<Rational>) -> Value {
    json!(m.masses().iter().map(format_rational).collect::<Vec<_>>())
}

pub fn context(ctx: &ChoiceContext<Rational>) -> Value {
    let utilities: Map<String, Value> = ctx
        .utilities
        .iter()
        .map(|(_, n, u)| (n.to_string(), json!(format_rational(u))))
        .collect();
    json!({
        "utilities": utilities,
        "probability": ctx.probability.as_ref().map(mass),
        "credal": ctx.credal.as_ref().map(|c| c.iter().map(mass).collect::<Vec<_>>()),
    })
}

pub fn instance(inst: &PropertyInstance, space: &PossibilitySpace, table: &RewardTable<Rational>) -> Value {
    let ev = |e: &Event| event(e, space);
    let set = |s: &GambleSet| gamble_set(s, table);
    let sets = |s: &[GambleSet]| s.iter().map(set).collect::<Vec<_>>();
    let body = match inst {
        PropertyInstance::Conditioning { set: x, a } => json!({ "set": set(x), "a": ev(a) }),
        PropertyInstance::Subset { set: x, subset, a } => {
            json!({ "set": set(x), "subset": set(subset), "a": ev(a) })
        }
        PropertyInstance::Mixture { set: x, z, a, b } => {
            json!({ "set": set(x), "z": gamble(z, table), "a": ev(a), "b": ev(b) })
        }
        PropertyInstance::Family { sets: xs, a } => json!({ "sets": sets(xs), "a": ev(a) }),
        PropertyInstance::BackwardConditioning { set: x, zs, a, b } => {
            json!({ "set": set(x), "zs": set(zs), "a": ev(a), "b": ev(b) })
        }
        PropertyInstance::SetSum { partition, sets: xs, b } => json!({
            "partition": partition.iter().map(ev).collect::<Vec<_>>(),
            "sets": sets(xs),
            "b": ev(b),
        }),
    };
    json!({ "shape": inst.shape(), "data": body })
}

pub fn violation(v: &Violation, table: &RewardTable<Rational>) -> Value {
    json!({
        "note": v.note,
        "expected": gamble_set(&v.expected, table),
        "actual": gamble_set(&v.actual, table),
    })
}

pub fn world(w: &World) -> Value {
    json!({ "states": w.space.labels(), "context": context(&w.context) })
}

pub fn law(r: &LawReport) -> Value {
    let witness = r.witness.as_ref().map(|w| {
        let table = &w.world.context.utilities;
        json!({
            "sample": w.sample,
            "original_gambles": w.original_size.0,
            "original_states": w.original_size.1,
            "world": world(&w.world),
            "instance": instance(&w.instance, &w.world.space, table),
            "violation": violation(&w.violation, table),
        })
    });
    json!({
        "property": r.property.code(),
        "name": r.property.name(),
        "rule": r.rule.name(),
        "instances_checked": r.instances_checked,
        "skipped": r.skipped,
        "verdict": r.verdict.name(),
        "witness": witness,
    })
}

/// Pretty JSON followed by a newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
