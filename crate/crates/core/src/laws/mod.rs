//! Executable checks of choice function properties and of subtree perfectness.

mod falsify;
mod perfect;

pub use falsify::{
    falsify_property, falsify_property_sampled, recheck_witness, shrink_witness, LawReport, LawVerdict,
    SamplingConfig, Witness,
};
pub use perfect::{check_subtree_perfectness, check_weak_subtree_perfectness, NodeVerdict, PerfectnessReport};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::choice::{ChoiceError, ChoiceFunction};
use crate::model::{
    check_partition, gamble_set_sum, is_a_consistent, Event, Gamble, GambleSet, ModelError, PossibilitySpace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
    P11,
    L,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        PropertyId::P1,
        PropertyId::P2,
        PropertyId::P3,
        PropertyId::P4,
        PropertyId::P5,
        PropertyId::P6,
        PropertyId::P7,
        PropertyId::P8,
        PropertyId::P9,
        PropertyId::P10,
        PropertyId::P11,
        PropertyId::L,
    ];

    pub fn code(self) -> &'static str {
        match self {
            PropertyId::P1 => "P1",
            PropertyId::P2 => "P2",
            PropertyId::P3 => "P3",
            PropertyId::P4 => "P4",
            PropertyId::P5 => "P5",
            PropertyId::P6 => "P6",
            PropertyId::P7 => "P7",
            PropertyId::P8 => "P8",
            PropertyId::P9 => "P9",
            PropertyId::P10 => "P10",
            PropertyId::P11 => "P11",
            PropertyId::L => "L",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::P1 => "P1_conditioning",
            PropertyId::P2 => "P2_intersection",
            PropertyId::P3 => "P3_mixture",
            PropertyId::P4 => "P4_strong_path_independence",
            PropertyId::P5 => "P5_very_strong_path_independence",
            PropertyId::P6 => "P6_total_preorder",
            PropertyId::P7 => "P7_backward_conditioning",
            PropertyId::P8 => "P8_insensitivity",
            PropertyId::P9 => "P9_preservation",
            PropertyId::P10 => "P10_backward_mixture",
            PropertyId::P11 => "P11_path_independence",
            PropertyId::L => "L_setsum_factorization",
        }
    }

    /// Parses a comma separated list such as `P1,P2,P3`.
    pub fn parse_list(text: &str) -> Result<Vec<PropertyId>, LawError> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim();
        PropertyId::ALL
            .into_iter()
            .find(|p| p.code().eq_ignore_ascii_case(key) || p.name().eq_ignore_ascii_case(key))
            .ok_or_else(|| LawError::UnknownProperty(s.to_string()))
    }
}

/// The data a single property check ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyInstance {
    /// `(𝒳, A)`: P1.
    Conditioning { set: GambleSet, a: Event },
    /// `(𝒳, 𝒴 ⊆ 𝒳, A)`: P2, P8, P9.
    Subset { set: GambleSet, subset: GambleSet, a: Event },
    /// `(𝒳, Z, A, B)`: P3, P10.
    Mixture { set: GambleSet, z: Gamble, a: Event, b: Event },
    /// `(𝒳_1, ..., 𝒳_n, A)`: P4, P5, P6, P11.
    Family { sets: Vec<GambleSet>, a: Event },
    /// `(𝒳, 𝒵, A, B)`: P7.
    BackwardConditioning { set: GambleSet, zs: GambleSet, a: Event, b: Event },
    /// `(A_1, ..., A_n, 𝒳_1, ..., 𝒳_n, B)`: L.
    SetSum { partition: Vec<Event>, sets: Vec<GambleSet>, b: Event },
}

impl PropertyInstance {
    pub fn shape(&self) -> &'static str {
        match self {
            PropertyInstance::Conditioning { .. } => "conditioning",
            PropertyInstance::Subset { .. } => "subset",
            PropertyInstance::Mixture { .. } => "mixture",
            PropertyInstance::Family { .. } => "family",
            PropertyInstance::BackwardConditioning { .. } => "backward_conditioning",
            PropertyInstance::SetSum { .. } => "set_sum",
        }
    }

    /// Whether the instance has the shape `prop` ranges over.
    pub fn fits(&self, prop: PropertyId) -> bool {
        use PropertyId::*;
        matches!(
            (prop, self),
            (P1, PropertyInstance::Conditioning { .. })
                | (P2 | P8 | P9, PropertyInstance::Subset { .. })
                | (P3 | P10, PropertyInstance::Mixture { .. })
                | (P4 | P5 | P6 | P11, PropertyInstance::Family { .. })
                | (P7, PropertyInstance::BackwardConditioning { .. })
                | (L, PropertyInstance::SetSum { .. })
        )
    }

    /// Every distinct gamble mentioned by the instance.
    pub fn gambles(&self) -> GambleSet {
        let mut out = GambleSet::new();
        match self {
            PropertyInstance::Conditioning { set, .. } => out.extend(set.iter().cloned()),
            PropertyInstance::Subset { set, subset, .. } => {
                out.extend(set.iter().cloned());
                out.extend(subset.iter().cloned());
            }
            PropertyInstance::Mixture { set, z, .. } => {
                out.extend(set.iter().cloned());
                out.insert(z.clone());
            }
            PropertyInstance::Family { sets, .. } | PropertyInstance::SetSum { sets, .. } => {
                for s in sets {
                    out.extend(s.iter().cloned());
                }
            }
            PropertyInstance::BackwardConditioning { set, zs, .. } => {
                out.extend(set.iter().cloned());
                out.extend(zs.iter().cloned());
            }
        }
        out
    }

    pub fn gamble_count(&self) -> usize {
        self.gambles().len()
    }

    pub fn state_count(&self) -> usize {
        self.events()[0].space_len()
    }

    pub fn events(&self) -> Vec<Event> {
        match self {
            PropertyInstance::Conditioning { a, .. }
            | PropertyInstance::Subset { a, .. }
            | PropertyInstance::Family { a, .. } => vec![*a],
            PropertyInstance::Mixture { a, b, .. } | PropertyInstance::BackwardConditioning { a, b, .. } => {
                vec![*a, *b]
            }
            PropertyInstance::SetSum { partition, b, .. } => {
                let mut v = partition.clone();
                v.push(*b);
                v
            }
        }
    }

    /// The instance on the sub-space keeping `states`.
    pub fn project(&self, space: &PossibilitySpace, states: &[usize]) -> Result<PropertyInstance, LawError> {
        let sub = space.restrict(states)?;
        let ev = |e: &Event| e.restrict(&sub, states);
        let set = |s: &GambleSet| s.project(states);
        Ok(match self {
            PropertyInstance::Conditioning { set: x, a } => PropertyInstance::Conditioning { set: set(x), a: ev(a) },
            PropertyInstance::Subset { set: x, subset, a } => PropertyInstance::Subset {
                set: set(x),
                subset: set(subset),
                a: ev(a),
            },
            PropertyInstance::Mixture { set: x, z, a, b } => PropertyInstance::Mixture {
                set: set(x),
                z: z.project(states),
                a: ev(a),
                b: ev(b),
            },
            PropertyInstance::Family { sets, a } => PropertyInstance::Family {
                sets: sets.iter().map(set).collect(),
                a: ev(a),
            },
            PropertyInstance::BackwardConditioning { set: x, zs, a, b } => PropertyInstance::BackwardConditioning {
                set: set(x),
                zs: set(zs),
                a: ev(a),
                b: ev(b),
            },
            PropertyInstance::SetSum { partition, sets, b } => PropertyInstance::SetSum {
                partition: partition.iter().map(ev).collect(),
                sets: sets.iter().map(set).collect(),
                b: ev(b),
            },
        })
    }

    /// Instances with one gamble (or one whole member set) removed.
    pub fn smaller(&self) -> Vec<PropertyInstance> {
        let mut out = Vec::new();
        let without = |s: &GambleSet, g: &Gamble| {
            let mut t = s.clone();
            t.remove(g);
            t
        };
        match self {
            PropertyInstance::Conditioning { set, a } => {
                for g in set {
                    out.push(PropertyInstance::Conditioning { set: without(set, g), a: *a });
                }
            }
            PropertyInstance::Subset { set, subset, a } => {
                for g in set {
                    out.push(PropertyInstance::Subset {
                        set: without(set, g),
                        subset: without(subset, g),
                        a: *a,
                    });
                }
            }
            PropertyInstance::Mixture { set, z, a, b } => {
                for g in set {
                    out.push(PropertyInstance::Mixture {
                        set: without(set, g),
                        z: z.clone(),
                        a: *a,
                        b: *b,
                    });
                }
            }
            PropertyInstance::Family { sets, a } => {
                for i in 0..sets.len() {
                    let mut s = sets.clone();
                    s.remove(i);
                    out.push(PropertyInstance::Family { sets: s, a: *a });
                }
                for g in &self.gambles() {
                    let s: Vec<GambleSet> = sets.iter().map(|x| without(x, g)).collect();
                    out.push(PropertyInstance::Family { sets: s, a: *a });
                }
            }
            PropertyInstance::BackwardConditioning { set, zs, a, b } => {
                for g in set {
                    out.push(PropertyInstance::BackwardConditioning {
                        set: without(set, g),
                        zs: zs.clone(),
                        a: *a,
                        b: *b,
                    });
                }
                for g in zs {
                    out.push(PropertyInstance::BackwardConditioning {
                        set: set.clone(),
                        zs: without(zs, g),
                        a: *a,
                        b: *b,
                    });
                }
            }
            PropertyInstance::SetSum { partition, sets, b } => {
                for (i, s) in sets.iter().enumerate() {
                    for g in s {
                        let mut v = sets.clone();
                        v[i] = without(s, g);
                        out.push(PropertyInstance::SetSum {
                            partition: partition.clone(),
                            sets: v,
                            b: *b,
                        });
                    }
                }
            }
        }
        out
    }

    /// Checks the shape and consistency preconditions of `prop`.
    pub fn check_preconditions(&self, prop: PropertyId) -> Result<(), LawError> {
        let bad = |m: &str| Err(LawError::MalformedInstance(m.to_string()));
        if !self.fits(prop) {
            return Err(LawError::MalformedInstance(format!(
                "{} needs a different instance shape than `{}`",
                prop.code(),
                self.shape()
            )));
        }
        let n = self.state_count();
        let events = self.events();
        if events.iter().any(|e| e.same_space(&events[0]).is_err()) {
            return Err(ModelError::SpaceMismatch.into());
        }
        if self.gambles().iter().any(|g| g.len() != n) {
            return Err(ModelError::DimensionMismatch.into());
        }
        let consistent = |s: &GambleSet, e: &Event| s.iter().all(|g| is_a_consistent(g, e));
        match self {
            PropertyInstance::Conditioning { set, a } => {
                if a.is_empty() || set.is_empty() {
                    return bad("empty event or set");
                }
                if !consistent(set, a) {
                    return bad("set is not A-consistent");
                }
            }
            PropertyInstance::Subset { set, subset, a } => {
                if a.is_empty() || subset.is_empty() {
                    return bad("empty event or subset");
                }
                if !subset.is_subset(set) {
                    return bad("second set is not a subset of the first");
                }
                if !consistent(set, a) {
                    return bad("set is not A-consistent");
                }
            }
            PropertyInstance::Mixture { set, z, a, b } => {
                let (ab, nab) = (*a & *b, !*a & *b);
                if ab.is_empty() || nab.is_empty() || set.is_empty() {
                    return bad("A∩B or ∁A∩B is empty, or the set is empty");
                }
                if !consistent(set, &ab) || !is_a_consistent(z, &nab) {
                    return bad("set is not A∩B-consistent or Z is not ∁A∩B-consistent");
                }
            }
            PropertyInstance::Family { sets, a } => {
                if a.is_empty() || sets.is_empty() || sets.iter().any(GambleSet::is_empty) {
                    return bad("empty event, family or member set");
                }
                if !sets.iter().all(|s| consistent(s, a)) {
                    return bad("a member set is not A-consistent");
                }
            }
            PropertyInstance::BackwardConditioning { set, zs, a, b } => {
                let (ab, nab) = (*a & *b, !*a & *b);
                if ab.is_empty() || nab.is_empty() || set.is_empty() || zs.is_empty() {
                    return bad("A∩B or ∁A∩B is empty, or a set is empty");
                }
                if !consistent(set, &ab) || !consistent(zs, &nab) {
                    return bad("set is not A∩B-consistent or 𝒵 is not ∁A∩B-consistent");
                }
            }
            PropertyInstance::SetSum { partition, sets, b } => {
                if partition.len() != sets.len() || sets.iter().any(GambleSet::is_empty) {
                    return bad("one non-empty set per partition block is needed");
                }
                if check_partition(partition).is_err() {
                    return bad("events do not partition the space");
                }
                for (e, s) in partition.iter().zip(sets) {
                    let eb = *e & *b;
                    if eb.is_empty() || !consistent(s, &eb) {
                        return bad("a block misses B or its set is not A_i∩B-consistent");
                    }
                }
            }
        }
        Ok(())
    }
}

/// Evidence that an instance breaks a property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub note: String,
    pub expected: GambleSet,
    pub actual: GambleSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Violation),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(v) => Some(v),
        }
    }
}

fn violated(note: impl Into<String>, expected: GambleSet, actual: GambleSet) -> Verdict {
    Verdict::Violated(Violation {
        note: note.into(),
        expected,
        actual,
    })
}

fn union_of(sets: &[GambleSet]) -> GambleSet {
    sets.iter().flat_map(|s| s.iter().cloned()).collect()
}

/// `A𝒳 ⊕ ∁A𝒵`.
fn mix(a: &Event, set: &GambleSet, zs: &GambleSet) -> Result<GambleSet, LawError> {
    Ok(gamble_set_sum(&[*a, !*a], &[set.clone(), zs.clone()])?)
}

/// Evaluates `prop` on one instance, literally as stated.
pub fn check_property_instance<C: ChoiceFunction + ?Sized>(
    prop: PropertyId,
    rule: &C,
    instance: &PropertyInstance,
) -> Result<Verdict, LawError> {
    instance.check_preconditions(prop)?;
    let opt = |s: &GambleSet, e: &Event| rule.select(s, e);
    Ok(match (prop, instance) {
        (PropertyId::P1, PropertyInstance::Conditioning { set, a }) => {
            let chosen = opt(set, a)?;
            for x in &chosen {
                if let Some(y) = set.iter().find(|y| !chosen.contains(y) && x.equal_on(y, a)) {
                    let expected: GambleSet = chosen.iter().cloned().chain([y.clone()]).collect();
                    return Ok(violated(
                        "a gamble equal on A to a selected gamble is not selected",
                        expected,
                        chosen,
                    ));
                }
            }
            Verdict::Holds
        }
        (PropertyId::P2, PropertyInstance::Subset { set, subset, a }) => {
            let meet = opt(set, a)?.intersection(subset);
            if meet.is_empty() {
                return Ok(Verdict::Holds);
            }
            let sub = opt(subset, a)?;
            if sub == meet {
                Verdict::Holds
            } else {
                violated("opt(𝒴|A) differs from opt(𝒳|A) ∩ 𝒴", meet, sub)
            }
        }
        (PropertyId::P8, PropertyInstance::Subset { set, subset, a }) => {
            let full = opt(set, a)?;
            // the literal instance and its enlargement by opt(𝒳|A) both satisfy 𝒴 ⊆ 𝒳
            for y in [subset.clone(), subset.union(&full)] {
                if full.is_subset(&y) {
                    let sub = opt(&y, a)?;
                    if sub != full {
                        return Ok(violated(
                            "opt(𝒴|A) differs from opt(𝒳|A) although opt(𝒳|A) ⊆ 𝒴 ⊆ 𝒳",
                            full,
                            sub,
                        ));
                    }
                }
            }
            Verdict::Holds
        }
        (PropertyId::P9, PropertyInstance::Subset { set, subset, a }) => {
            let meet = opt(set, a)?.intersection(subset);
            let sub = opt(subset, a)?;
            if meet.is_subset(&sub) {
                Verdict::Holds
            } else {
                violated("opt(𝒴|A) misses elements of opt(𝒳|A) ∩ 𝒴", meet, sub)
            }
        }
        (PropertyId::P3 | PropertyId::P10, PropertyInstance::Mixture { set, z, a, b }) => {
            let zs = GambleSet::singleton(z.clone());
            let lhs = opt(&mix(a, set, &zs)?, b)?;
            let rhs = mix(a, &opt(set, &(*a & *b))?, &zs)?;
            let ok = if prop == PropertyId::P3 { lhs == rhs } else { lhs.is_subset(&rhs) };
            if ok {
                Verdict::Holds
            } else {
                violated("opt(A𝒳⊕∁AZ|B) compared with A opt(𝒳|A∩B)⊕∁AZ", rhs, lhs)
            }
        }
        (PropertyId::P4, PropertyInstance::Family { sets, a }) => {
            let whole = opt(&union_of(sets), a)?;
            // the largest index set whose selections fit inside opt(∪𝒳_i|A)
            let mut best = GambleSet::new();
            let mut any = false;
            for s in sets {
                let o = opt(s, a)?;
                if o.is_subset(&whole) {
                    best = best.union(&o);
                    any = true;
                }
            }
            if any && best == whole {
                Verdict::Holds
            } else {
                violated("no index set I gives opt(∪𝒳_i|A) = ∪_{i∈I} opt(𝒳_i|A)", whole, best)
            }
        }
        (PropertyId::P5, PropertyInstance::Family { sets, a }) => {
            let whole = opt(&union_of(sets), a)?;
            let mut rhs = GambleSet::new();
            for s in sets {
                if !s.is_disjoint(&whole) {
                    rhs = rhs.union(&opt(s, a)?);
                }
            }
            if rhs == whole {
                Verdict::Holds
            } else {
                violated("opt(∪𝒳_i|A) differs from the union over sets meeting it", whole, rhs)
            }
        }
        (PropertyId::P6, PropertyInstance::Family { sets, a }) => check_total_preorder(rule, sets, a)?,
        (PropertyId::P11, PropertyInstance::Family { sets, a }) => {
            let whole = opt(&union_of(sets), a)?;
            let mut inner = GambleSet::new();
            for s in sets {
                inner = inner.union(&opt(s, a)?);
            }
            let two_stage = opt(&inner, a)?;
            if two_stage == whole {
                Verdict::Holds
            } else {
                violated("opt(∪𝒳_i|A) differs from opt(∪opt(𝒳_i|A)|A)", whole, two_stage)
            }
        }
        (PropertyId::P7, PropertyInstance::BackwardConditioning { set, zs, a, b }) => {
            let ab = *a & *b;
            let inner = opt(set, &ab)?;
            let outer = opt(&mix(a, set, zs)?, b)?;
            let partition = [*a, !*a];
            for x in &inner {
                let supported = zs
                    .iter()
                    .any(|z| outer.contains(&Gamble::glue(&partition, &[x, z])));
                if !supported {
                    continue;
                }
                if let Some(y) = set.iter().find(|y| !inner.contains(y) && x.equal_on(y, a)) {
                    let expected: GambleSet = inner.iter().cloned().chain([y.clone()]).collect();
                    return Ok(violated(
                        "a gamble equal on A to a selected, supported gamble is not selected given A∩B",
                        expected,
                        inner,
                    ));
                }
            }
            Verdict::Holds
        }
        (PropertyId::L, PropertyInstance::SetSum { partition, sets, b }) => {
            let lhs = opt(&gamble_set_sum(partition, sets)?, b)?;
            let parts = partition
                .iter()
                .zip(sets)
                .map(|(e, s)| opt(s, &(*e & *b)))
                .collect::<Result<Vec<_>, _>>()?;
            let rhs = gamble_set_sum(partition, &parts)?;
            if lhs == rhs {
                Verdict::Holds
            } else {
                violated("opt(⊕A_i𝒳_i|B) differs from ⊕A_i opt(𝒳_i|A_i∩B)", rhs, lhs)
            }
        }
        _ => unreachable!("shape checked by check_preconditions"),
    })
}

/// Builds the revealed relation `X ⪰ Y ⇔ X ∈ opt({X,Y}|A)` on every gamble of
/// the family and checks it is a total preorder whose maximal elements are
/// the selections from every member set and from their union.
fn check_total_preorder<C: ChoiceFunction + ?Sized>(
    rule: &C,
    sets: &[GambleSet],
    a: &Event,
) -> Result<Verdict, LawError> {
    let all: Vec<Gamble> = union_of(sets).into_iter().collect();
    let m = all.len();
    let mut geq = vec![vec![true; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let pair: GambleSet = [all[i].clone(), all[j].clone()].into_iter().collect();
            let chosen = rule.select(&pair, a)?;
            geq[i][j] = chosen.contains(&all[i]);
            geq[j][i] = chosen.contains(&all[j]);
            if !geq[i][j] && !geq[j][i] {
                return Ok(violated("revealed relation is not total", pair, chosen));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if geq[i][j] && geq[j][k] && !geq[i][k] {
                    let triple: GambleSet = [all[i].clone(), all[j].clone(), all[k].clone()].into_iter().collect();
                    let pair: GambleSet = [all[i].clone(), all[k].clone()].into_iter().collect();
                    let chosen = rule.select(&pair, a)?;
                    return Ok(violated(
                        "revealed relation is not transitive on these three gambles",
                        triple,
                        chosen,
                    ));
                }
            }
        }
    }
    let index: BTreeMap<&Gamble, usize> = all.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut family: Vec<GambleSet> = sets.to_vec();
    family.push(union_of(sets));
    for s in &family {
        let maximal: GambleSet = s
            .iter()
            .filter(|x| s.iter().all(|y| geq[index[x]][index[y]]))
            .cloned()
            .collect();
        let chosen = rule.select(s, a)?;
        if chosen != maximal {
            return Ok(violated(
                "selection differs from the maximal elements of the revealed preorder",
                maximal,
                chosen,
            ));
        }
    }
    Ok(Verdict::Holds)
}
