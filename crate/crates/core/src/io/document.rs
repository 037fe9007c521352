use std::collections::{BTreeMap, BTreeSet};

use super::lex::{is_identifier, lex, Cursor, Tok};
use super::IoError;
use crate::model::{Event, PossibilitySpace, RewardTable};
use crate::scalar::format_rational;
use crate::tree::{DecisionTree, Node};
use crate::Rational;

/// Widest line the serializer emits before breaking a tree expression.
const LINE_WIDTH: usize = 80;

/// A tree expression over reward and event names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Leaf(String),
    Decision(Vec<Expr>),
    Chance(Vec<(String, Expr)>),
}

/// A parsed tree file. Every name it mentions is defined in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDocument {
    /// Leading comment lines, kept verbatim.
    pub header: Vec<String>,
    pub omega: Vec<String>,
    pub rewards: Vec<(String, Rational)>,
    pub events: Vec<(String, Vec<String>)>,
    pub root_event: Option<String>,
    pub tree: Expr,
}

/// A tree document resolved into model objects.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub space: PossibilitySpace,
    pub utilities: RewardTable<Rational>,
    pub tree: DecisionTree,
    /// Named events in document order.
    pub events: Vec<(String, Event)>,
}

impl Problem {
    /// First name given to `event`, if any.
    pub fn event_name(&self, event: &Event) -> Option<&str> {
        self.events.iter().find(|(_, e)| e == event).map(|(n, _)| n.as_str())
    }
}

pub fn parse_tree_file(text: &str) -> Result<TreeDocument, IoError> {
    let lexed = lex(text)?;
    let mut cur = Cursor::new(lexed.tokens);
    let mut omega: Option<Vec<String>> = None;
    let mut rewards: Vec<(String, Rational)> = Vec::new();
    let mut events: Vec<(String, Vec<String>)> = Vec::new();
    let mut root_event: Option<String> = None;
    let mut tree: Option<Expr> = None;
    let mut seen = BTreeSet::new();
    let mut define = |kind: &str, name: &str| -> Result<(), IoError> {
        if seen.insert(format!("{kind} {name}")) {
            Ok(())
        } else {
            Err(IoError::DuplicateDefinition(name.to_string()))
        }
    };
    loop {
        cur.skip_newlines();
        if cur.peek().tok == Tok::Eof {
            break;
        }
        let (keyword, kw) = cur.ident("a statement")?;
        match keyword.as_str() {
            "omega" => {
                define("statement", "omega")?;
                let mut labels = Vec::new();
                while let Tok::Ident(_) = cur.peek().tok {
                    let (label, _) = cur.ident("a state label")?;
                    define("state", &label)?;
                    labels.push(label);
                }
                if labels.is_empty() {
                    return Err(cur.error("expected at least one state label"));
                }
                omega = Some(labels);
            }
            "reward" => {
                let (name, _) = cur.ident("a reward name")?;
                define("reward", &name)?;
                cur.sym('=')?;
                rewards.push((name, cur.rational()?));
            }
            "event" => {
                let (name, _) = cur.ident("an event name")?;
                define("event", &name)?;
                cur.sym('=')?;
                let mut labels = Vec::new();
                while let Tok::Ident(_) = cur.peek().tok {
                    labels.push(cur.ident("a state label")?.0);
                }
                if labels.is_empty() {
                    return Err(cur.error("expected at least one state label"));
                }
                events.push((name, labels));
            }
            "root_event" => {
                define("statement", "root_event")?;
                root_event = Some(cur.ident("an event name")?.0);
            }
            "tree" => {
                define("statement", "tree")?;
                cur.sym('=')?;
                if matches!(cur.peek().tok, Tok::Newline | Tok::Eof) {
                    return Err(cur.error("empty tree expression"));
                }
                tree = Some(parse_expr(&mut cur)?);
            }
            other => return Err(IoError::syntax(kw.line, kw.col, format!("unknown statement `{other}`"))),
        }
        cur.end_of_statement()?;
    }
    let omega = omega.ok_or_else(|| cur.error("missing `omega` declaration"))?;
    let tree = tree.ok_or_else(|| cur.error("missing `tree` definition"))?;
    let doc = TreeDocument {
        header: lexed.header,
        omega,
        rewards,
        events,
        root_event,
        tree,
    };
    doc.check_references()?;
    Ok(doc)
}

fn parse_expr(cur: &mut Cursor) -> Result<Expr, IoError> {
    cur.skip_newlines();
    let (head, at) = cur.ident("`leaf`, `decision` or `chance`")?;
    if !matches!(head.as_str(), "leaf" | "decision" | "chance") {
        return Err(IoError::syntax(at.line, at.col, format!("unknown node kind `{head}`")));
    }
    cur.skip_newlines();
    cur.sym('(')?;
    let expr = match head.as_str() {
        "leaf" => {
            cur.skip_newlines();
            let (name, _) = cur.ident("a reward name")?;
            Expr::Leaf(name)
        }
        "decision" => {
            let mut children = vec![parse_expr(cur)?];
            while {
                cur.skip_newlines();
                cur.eat_sym(',')
            } {
                children.push(parse_expr(cur)?);
            }
            Expr::Decision(children)
        }
        "chance" => {
            let mut branches = Vec::new();
            loop {
                cur.skip_newlines();
                let (event, _) = cur.ident("an event name")?;
                cur.skip_newlines();
                cur.sym(':')?;
                branches.push((event, parse_expr(cur)?));
                cur.skip_newlines();
                if !cur.eat_sym(',') {
                    break;
                }
            }
            Expr::Chance(branches)
        }
        _ => unreachable!(),
    };
    cur.skip_newlines();
    cur.sym(')')?;
    Ok(expr)
}

impl TreeDocument {
    fn check_references(&self) -> Result<(), IoError> {
        let labels: BTreeSet<&str> = self.omega.iter().map(String::as_str).collect();
        for (_, members) in &self.events {
            for l in members {
                if !labels.contains(l.as_str()) {
                    return Err(IoError::UnknownReference(l.clone()));
                }
            }
        }
        let events: BTreeSet<&str> = self.events.iter().map(|(n, _)| n.as_str()).collect();
        let rewards: BTreeSet<&str> = self.rewards.iter().map(|(n, _)| n.as_str()).collect();
        if let Some(r) = &self.root_event {
            if !events.contains(r.as_str()) {
                return Err(IoError::UnknownReference(r.clone()));
            }
        }
        fn walk(e: &Expr, events: &BTreeSet<&str>, rewards: &BTreeSet<&str>) -> Result<(), IoError> {
            match e {
                Expr::Leaf(r) if !rewards.contains(r.as_str()) => Err(IoError::UnknownReference(r.clone())),
                Expr::Leaf(_) => Ok(()),
                Expr::Decision(children) => children.iter().try_for_each(|c| walk(c, events, rewards)),
                Expr::Chance(branches) => branches.iter().try_for_each(|(ev, c)| {
                    if events.contains(ev.as_str()) {
                        walk(c, events, rewards)
                    } else {
                        Err(IoError::UnknownReference(ev.clone()))
                    }
                }),
            }
        }
        walk(&self.tree, &events, &rewards)
    }

    pub fn space(&self) -> Result<PossibilitySpace, IoError> {
        Ok(PossibilitySpace::new(self.omega.iter().cloned())?)
    }

    pub fn utilities(&self) -> Result<RewardTable<Rational>, IoError> {
        Ok(RewardTable::new(self.rewards.iter().cloned())?)
    }

    /// Builds the space, utilities and tree. The tree is not validated.
    pub fn resolve(&self) -> Result<Problem, IoError> {
        let space = self.space()?;
        let utilities = self.utilities()?;
        let mut events = Vec::with_capacity(self.events.len());
        for (name, members) in &self.events {
            events.push((name.clone(), space.event_from_labels(members.iter().map(String::as_str))?));
        }
        let lookup: BTreeMap<&str, Event> = events.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        fn build(e: &Expr, lookup: &BTreeMap<&str, Event>, table: &RewardTable<Rational>) -> Result<Node, IoError> {
            Ok(match e {
                Expr::Leaf(r) => Node::leaf(table.id(r).ok_or_else(|| IoError::UnknownReference(r.clone()))?),
                Expr::Decision(children) => Node::decision(
                    children
                        .iter()
                        .map(|c| build(c, lookup, table))
                        .collect::<Result<_, _>>()?,
                ),
                Expr::Chance(branches) => Node::chance(
                    branches
                        .iter()
                        .map(|(ev, c)| {
                            let event = *lookup
                                .get(ev.as_str())
                                .ok_or_else(|| IoError::UnknownReference(ev.clone()))?;
                            Ok((event, build(c, lookup, table)?))
                        })
                        .collect::<Result<_, IoError>>()?,
                ),
            })
        }
        let root = build(&self.tree, &lookup, &utilities)?;
        let root_event = match &self.root_event {
            Some(name) => *lookup
                .get(name.as_str())
                .ok_or_else(|| IoError::UnknownReference(name.clone()))?,
            None => space.full(),
        };
        Ok(Problem {
            space,
            utilities,
            tree: DecisionTree::new(root, root_event),
            events,
        })
    }

    /// A document describing `tree`. Events are named `e1, e2, ...` in
    /// order of first appearance.
    pub fn from_tree(
        space: &PossibilitySpace,
        utilities: &RewardTable<Rational>,
        tree: &DecisionTree,
    ) -> Result<TreeDocument, IoError> {
        for l in space.labels() {
            if !is_identifier(l) {
                return Err(IoError::InvalidName(l.clone()));
            }
        }
        for (_, name, _) in utilities.iter() {
            if !is_identifier(name) {
                return Err(IoError::InvalidName(name.to_string()));
            }
        }
        let mut named: Vec<Event> = Vec::new();
        let mut name_of = |e: Event| -> Result<String, IoError> {
            e.same_space(&space.full())?;
            let i = match named.iter().position(|x| *x == e) {
                Some(i) => i,
                None => {
                    named.push(e);
                    named.len() - 1
                }
            };
            Ok(format!("e{}", i + 1))
        };
        let root_event = if tree.root_event().is_full() {
            None
        } else {
            Some(name_of(*tree.root_event())?)
        };
        fn walk(node: &Node, table: &RewardTable<Rational>, name_of: &mut dyn FnMut(Event) -> Result<String, IoError>) -> Result<Expr, IoError> {
            Ok(match node {
                Node::Leaf(r) => {
                    if !table.contains(*r) {
                        return Err(IoError::UnknownReference(format!("reward #{}", r.0)));
                    }
                    Expr::Leaf(table.name(*r).to_string())
                }
                Node::Decision(children) => Expr::Decision(
                    children
                        .iter()
                        .map(|c| walk(c, table, name_of))
                        .collect::<Result<_, _>>()?,
                ),
                Node::Chance(branches) => Expr::Chance(
                    branches
                        .iter()
                        .map(|(e, c)| Ok((name_of(*e)?, walk(c, table, name_of)?)))
                        .collect::<Result<_, IoError>>()?,
                ),
            })
        }
        let expr = walk(tree.root(), utilities, &mut name_of)?;
        let events = named
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    format!("e{}", i + 1),
                    e.states().map(|s| space.label(s).to_string()).collect(),
                )
            })
            .collect::<Vec<(String, Vec<String>)>>();
        if let Some((name, _)) = events.iter().find(|(_, m)| m.is_empty()) {
            return Err(IoError::EmptyEvent(name.clone()));
        }
        Ok(TreeDocument {
            header: Vec::new(),
            omega: space.labels().to_vec(),
            rewards: utilities
                .iter()
                .map(|(_, n, u)| (n.to_string(), u.clone()))
                .collect(),
            events,
            root_event,
            tree: expr,
        })
    }

    /// Canonical text: header, then `omega`, rewards, events, root event and
    /// tree, separated by blank lines.
    pub fn serialize(&self) -> String {
        let mut blocks: Vec<String> = Vec::new();
        if !self.header.is_empty() {
            blocks.push(self.header.join("\n"));
        }
        blocks.push(format!("omega {}", self.omega.join(" ")));
        if !self.rewards.is_empty() {
            blocks.push(
                self.rewards
                    .iter()
                    .map(|(n, u)| format!("reward {n} = {}", format_rational(u)))
                    .collect::<Vec<_>>()
                    .join("\n"),
            );
        }
        if !self.events.is_empty() {
            blocks.push(
                self.events
                    .iter()
                    .map(|(n, m)| format!("event {n} = {}", m.join(" ")))
                    .collect::<Vec<_>>()
                    .join("\n"),
            );
        }
        if let Some(r) = &self.root_event {
            blocks.push(format!("root_event {r}"));
        }
        let mut tree = String::from("tree = ");
        write_expr(&self.tree, 0, "tree = ".len(), &mut tree);
        blocks.push(tree);
        let mut out = blocks.join("\n\n");
        out.push('\n');
        out
    }
}

fn inline(e: &Expr) -> String {
    match e {
        Expr::Leaf(r) => format!("leaf({r})"),
        Expr::Decision(c) => format!("decision({})", c.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Expr::Chance(b) => format!(
            "chance({})",
            b.iter()
                .map(|(ev, c)| format!("{ev}: {}", inline(c)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

/// Writes `e` starting at column `col` of a line indented by `indent`.
fn write_expr(e: &Expr, indent: usize, col: usize, out: &mut String) {
    let flat = inline(e);
    // +1 leaves room for a trailing comma
    if col + flat.len() < LINE_WIDTH || matches!(e, Expr::Leaf(_)) {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match e {
        Expr::Leaf(_) => unreachable!(),
        Expr::Decision(children) => {
            out.push_str("decision(\n");
            for (i, c) in children.iter().enumerate() {
                out.push_str(&pad);
                write_expr(c, indent + 2, indent + 2, out);
                out.push_str(if i + 1 < children.len() { ",\n" } else { "\n" });
            }
        }
        Expr::Chance(branches) => {
            out.push_str("chance(\n");
            for (i, (ev, c)) in branches.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(ev);
                out.push_str(": ");
                write_expr(c, indent + 2, indent + 4 + ev.len(), out);
                out.push_str(if i + 1 < branches.len() { ",\n" } else { "\n" });
            }
        }
    }
    out.push_str(&" ".repeat(indent));
    out.push(')');
}
