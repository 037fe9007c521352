use std::collections::BTreeSet;
use std::fmt;

use super::space::{check_partition, Event, PossibilitySpace};
use super::{ModelError, RewardId, RewardTable};
use crate::scalar::Scalar;

/// A total map from states to reward symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gamble {
    values: Vec<RewardId>,
}

impl Gamble {
    pub fn new(values: Vec<RewardId>) -> Gamble {
        assert!(!values.is_empty(), "gamble over an empty space");
        Gamble { values }
    }

    pub fn constant(reward: RewardId, states: usize) -> Gamble {
        Gamble::new(vec![reward; states])
    }

    /// Looks each label up in the reward table.
    pub fn from_names<S: Scalar>(table: &RewardTable<S>, names: &[&str]) -> Result<Gamble, ModelError> {
        let values = names
            .iter()
            .map(|n| table.id(n).ok_or_else(|| ModelError::UnknownReward(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Gamble::new(values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[RewardId] {
        &self.values
    }

    pub fn get(&self, state: usize) -> RewardId {
        self.values[state]
    }

    /// `AX = AY`: pointwise equality on the states of `event`.
    pub fn equal_on(&self, other: &Gamble, event: &Event) -> bool {
        event.states().all(|s| self.values[s] == other.values[s])
    }

    /// The partial map `AX`.
    pub fn restrict(&self, event: &Event) -> PartialGamble {
        PartialGamble {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(s, r)| event.contains(s).then_some(*r))
                .collect(),
        }
    }

    /// Distinct rewards attained anywhere.
    pub fn attained(&self) -> BTreeSet<RewardId> {
        self.values.iter().copied().collect()
    }

    /// Distinct rewards attained on `event`.
    pub fn attained_on(&self, event: &Event) -> BTreeSet<RewardId> {
        event.states().map(|s| self.values[s]).collect()
    }

    /// Projects the gamble onto the kept states.
    pub fn project(&self, states: &[usize]) -> Gamble {
        Gamble::new(states.iter().map(|&s| self.values[s]).collect())
    }

    /// Utility vector `U(X)`.
    pub fn utilities<'a, S: Scalar>(&'a self, table: &'a RewardTable<S>) -> impl Iterator<Item = &'a S> + 'a {
        self.values.iter().map(move |r| table.utility(*r))
    }

    /// Glues total gambles on a partition without validating it: state `s`
    /// takes its value from the gamble of the block containing `s`.
    pub(crate) fn glue(partition: &[Event], parts: &[&Gamble]) -> Gamble {
        debug_assert_eq!(partition.len(), parts.len());
        let n = parts[0].len();
        let mut values = vec![RewardId(0); n];
        for (event, part) in partition.iter().zip(parts) {
            for s in event.states() {
                values[s] = part.values[s];
            }
        }
        Gamble { values }
    }

    pub fn display<'a, S: Scalar>(&'a self, table: &'a RewardTable<S>) -> impl fmt::Display + 'a {
        GambleDisplay { gamble: self, table }
    }

    pub fn names<S: Scalar>(&self, table: &RewardTable<S>) -> Vec<String> {
        self.values.iter().map(|r| table.name(*r).to_string()).collect()
    }
}

impl fmt::Debug for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", r.0)?;
        }
        write!(f, ")")
    }
}

struct GambleDisplay<'a, S> {
    gamble: &'a Gamble,
    table: &'a RewardTable<S>,
}

impl<S: Scalar> fmt::Display for GambleDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.gamble.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.table.name(*r))?;
        }
        write!(f, ")")
    }
}

/// A gamble defined only on some states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialGamble {
    values: Vec<Option<RewardId>>,
}

impl PartialGamble {
    pub fn new(values: Vec<Option<RewardId>>) -> PartialGamble {
        PartialGamble { values }
    }

    pub fn values(&self) -> &[Option<RewardId>] {
        &self.values
    }

    fn domain_bits(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .fold(0, |acc, (s, _)| acc | (1 << s))
    }
}

/// Finite deduplicated set of gambles, ordered lexicographically by reward symbol.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GambleSet {
    members: BTreeSet<Gamble>,
}

impl GambleSet {
    pub fn new() -> GambleSet {
        GambleSet::default()
    }

    pub fn singleton(gamble: Gamble) -> GambleSet {
        let mut set = GambleSet::new();
        set.insert(gamble);
        set
    }

    pub fn insert(&mut self, gamble: Gamble) -> bool {
        self.members.insert(gamble)
    }

    pub fn remove(&mut self, gamble: &Gamble) -> bool {
        self.members.remove(gamble)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, gamble: &Gamble) -> bool {
        self.members.contains(gamble)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Gamble> + ExactSizeIterator {
        self.members.iter()
    }

    pub fn first(&self) -> Option<&Gamble> {
        self.members.first()
    }

    pub fn is_subset(&self, other: &GambleSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &GambleSet) -> GambleSet {
        self.members.union(&other.members).cloned().collect()
    }

    pub fn intersection(&self, other: &GambleSet) -> GambleSet {
        self.members.intersection(&other.members).cloned().collect()
    }

    pub fn difference(&self, other: &GambleSet) -> GambleSet {
        self.members.difference(&other.members).cloned().collect()
    }

    pub fn is_disjoint(&self, other: &GambleSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    /// Number of states the members are defined on, if non-empty.
    pub fn state_count(&self) -> Option<usize> {
        self.members.first().map(Gamble::len)
    }

    pub fn project(&self, states: &[usize]) -> GambleSet {
        self.iter().map(|g| g.project(states)).collect()
    }

    pub fn display<'a, S: Scalar>(&'a self, table: &'a RewardTable<S>) -> impl fmt::Display + 'a {
        SetDisplay { set: self, table }
    }
}

impl fmt::Debug for GambleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl FromIterator<Gamble> for GambleSet {
    fn from_iter<I: IntoIterator<Item = Gamble>>(iter: I) -> Self {
        GambleSet {
            members: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for GambleSet {
    type Item = Gamble;
    type IntoIter = std::collections::btree_set::IntoIter<Gamble>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

impl<'a> IntoIterator for &'a GambleSet {
    type Item = &'a Gamble;
    type IntoIter = std::collections::btree_set::Iter<'a, Gamble>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl Extend<Gamble> for GambleSet {
    fn extend<I: IntoIterator<Item = Gamble>>(&mut self, iter: I) {
        self.members.extend(iter)
    }
}

struct SetDisplay<'a, S> {
    set: &'a GambleSet,
    table: &'a RewardTable<S>,
}

impl<S: Scalar> fmt::Display for SetDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", g.display(self.table))?;
        }
        write!(f, "}}")
    }
}

/// The `⊕` operator: glues partial gambles defined on the blocks of a partition.
pub fn combine_on_partition(parts: &[(Event, PartialGamble)]) -> Result<Gamble, ModelError> {
    let events: Vec<Event> = parts.iter().map(|(e, _)| *e).collect();
    check_partition(&events)?;
    let n = events[0].space_len();
    let mut values = vec![RewardId(0); n];
    for (event, part) in parts {
        if part.values.len() != n || part.domain_bits() != event.bits() {
            return Err(ModelError::DomainMismatch);
        }
        for s in event.states() {
            values[s] = part.values[s].expect("domain checked");
        }
    }
    Ok(Gamble::new(values))
}

/// `⊕_i E_i 𝒳_i = { ⊕_i E_i X_i : X_i ∈ 𝒳_i }`.
pub fn gamble_set_sum(partition: &[Event], sets: &[GambleSet]) -> Result<GambleSet, ModelError> {
    check_partition(partition)?;
    if partition.len() != sets.len() {
        return Err(ModelError::ArityMismatch {
            events: partition.len(),
            sets: sets.len(),
        });
    }
    if sets.iter().any(GambleSet::is_empty) {
        return Err(ModelError::EmptyInputSet);
    }
    let n = partition[0].space_len();
    if sets.iter().flat_map(|s| s.iter()).any(|g| g.len() != n) {
        return Err(ModelError::DimensionMismatch);
    }
    Ok(set_sum_unchecked(partition, sets))
}

/// Cartesian gluing without validation; callers guarantee a partition and
/// non-empty sets.
pub(crate) fn set_sum_unchecked(partition: &[Event], sets: &[GambleSet]) -> GambleSet {
    let lists: Vec<Vec<&Gamble>> = sets.iter().map(|s| s.iter().collect()).collect();
    let mut out = GambleSet::new();
    let mut cursor = vec![0usize; lists.len()];
    loop {
        let parts: Vec<&Gamble> = cursor.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
        out.insert(Gamble::glue(partition, &parts));
        // odometer step, last position fastest
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < lists[pos].len() {
                break;
            }
            cursor[pos] = 0;
        }
    }
}

/// Result of an A-consistency check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    /// `reward` is attained by `gamble` somewhere, but nowhere inside the event.
    Inconsistent { gamble: Gamble, reward: RewardId },
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }
}

/// Checks that every reward attained by a member is also attained inside `a`.
pub fn check_a_consistency(set: &GambleSet, a: &Event) -> Result<Consistency, ModelError> {
    if a.is_empty() {
        return Err(ModelError::EmptyEvent);
    }
    for gamble in set {
        if gamble.len() != a.space_len() {
            return Err(ModelError::DimensionMismatch);
        }
        if let Some(reward) = first_unreached(gamble, a) {
            return Ok(Consistency::Inconsistent {
                gamble: gamble.clone(),
                reward,
            });
        }
    }
    Ok(Consistency::Consistent)
}

pub(crate) fn first_unreached(gamble: &Gamble, a: &Event) -> Option<RewardId> {
    let inside = gamble.attained_on(a);
    gamble.attained().into_iter().find(|r| !inside.contains(r))
}

/// Gamble-level consistency: `{X}` is `a`-consistent.
pub fn is_a_consistent(gamble: &Gamble, a: &Event) -> bool {
    !a.is_empty() && first_unreached(gamble, a).is_none()
}

/// Renders `set` row by row with state labels, for human reports.
pub fn describe_set<S: Scalar>(set: &GambleSet, table: &RewardTable<S>, space: &PossibilitySpace) -> String {
    let mut out = String::new();
    for g in set {
        let cells: Vec<String> = g
            .values()
            .iter()
            .enumerate()
            .map(|(s, r)| format!("{}={}", space.label(s), table.name(*r)))
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
