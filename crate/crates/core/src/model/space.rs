use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{BitAnd, BitOr, Not};

use super::ModelError;

/// Largest possibility space supported; events are stored as 64-bit masks.
pub const MAX_STATES: usize = 64;

/// Fingerprint identifying a possibility space by its ordered state labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceId(u64);

/// A finite, ordered set of named states.
#[derive(Clone, Debug)]
pub struct PossibilitySpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    id: SpaceId,
}

impl PossibilitySpace {
    pub fn new<I, L>(labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        if labels.len() > MAX_STATES {
            return Err(ModelError::TooManyStates(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(label.clone()));
            }
        }
        let mut hasher = DefaultHasher::new();
        labels.hash(&mut hasher);
        Ok(PossibilitySpace {
            labels,
            index,
            id: SpaceId(hasher.finish()),
        })
    }

    /// Space with states `w1..wn`.
    pub fn numbered(n: usize) -> Result<Self, ModelError> {
        Self::new((1..=n).map(|i| format!("w{i}")))
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn state(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full(&self) -> Event {
        Event::from_bits(self.id, self.len(), full_mask(self.len()))
    }

    pub fn empty_event(&self) -> Event {
        Event::from_bits(self.id, self.len(), 0)
    }

    pub fn event_from_states<I: IntoIterator<Item = usize>>(
        &self,
        states: I,
    ) -> Result<Event, ModelError> {
        let mut bits = 0u64;
        for s in states {
            if s >= self.len() {
                return Err(ModelError::UnknownState(s.to_string()));
            }
            bits |= 1 << s;
        }
        Ok(Event::from_bits(self.id, self.len(), bits))
    }

    pub fn event_from_labels<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        labels: I,
    ) -> Result<Event, ModelError> {
        let mut states = Vec::new();
        for label in labels {
            states.push(
                self.state(label)
                    .ok_or_else(|| ModelError::UnknownState(label.to_string()))?,
            );
        }
        self.event_from_states(states)
    }

    /// The space obtained by keeping only `states` (in their original order).
    pub fn restrict(&self, states: &[usize]) -> Result<PossibilitySpace, ModelError> {
        PossibilitySpace::new(states.iter().map(|&s| self.labels[s].clone()))
    }
}

impl PartialEq for PossibilitySpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for PossibilitySpace {}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of a possibility space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    space: SpaceId,
    size: u8,
    bits: u64,
}

impl Event {
    pub(crate) fn from_bits(space: SpaceId, size: usize, bits: u64) -> Event {
        debug_assert!(bits & !full_mask(size) == 0);
        Event {
            space,
            size: size as u8,
            bits,
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    /// Number of states in the underlying space.
    pub fn space_len(&self) -> usize {
        self.size as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub(crate) fn with_bits(&self, bits: u64) -> Event {
        Event::from_bits(self.space, self.space_len(), bits)
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.space_len())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, state: usize) -> bool {
        state < 64 && self.bits & (1 << state) != 0
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.space_len()).filter(move |&s| self.contains(s))
    }

    pub fn same_space(&self, other: &Event) -> Result<(), ModelError> {
        if self.space == other.space && self.size == other.size {
            Ok(())
        } else {
            Err(ModelError::SpaceMismatch)
        }
    }

    fn assert_same_space(&self, other: &Event) {
        assert!(
            self.space == other.space && self.size == other.size,
            "events from different possibility spaces"
        );
    }

    pub fn complement(&self) -> Event {
        self.with_bits(!self.bits & full_mask(self.space_len()))
    }

    pub fn intersects(&self, other: &Event) -> bool {
        self.assert_same_space(other);
        self.bits & other.bits != 0
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.assert_same_space(other);
        self.bits & !other.bits == 0
    }

    /// Projects the event onto the sub-space keeping `states`.
    pub fn restrict(&self, space: &PossibilitySpace, states: &[usize]) -> Event {
        let mut bits = 0u64;
        for (new, &old) in states.iter().enumerate() {
            if self.contains(old) {
                bits |= 1 << new;
            }
        }
        Event::from_bits(space.id(), space.len(), bits)
    }

    /// Renders the event as `{label, ...}` using the given space.
    pub fn display<'a>(&'a self, space: &'a PossibilitySpace) -> impl fmt::Display + 'a {
        EventDisplay { event: self, space }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event{{")?;
        let mut first = true;
        for s in self.states() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

struct EventDisplay<'a> {
    event: &'a Event,
    space: &'a PossibilitySpace,
}

impl fmt::Display for EventDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.event.states().map(|s| self.space.label(s)).collect();
        write!(f, "{{{}}}", labels.join(", "))
    }
}

impl BitAnd for Event {
    type Output = Event;

    fn bitand(self, rhs: Event) -> Event {
        self.assert_same_space(&rhs);
        self.with_bits(self.bits & rhs.bits)
    }
}

impl BitOr for Event {
    type Output = Event;

    fn bitor(self, rhs: Event) -> Event {
        self.assert_same_space(&rhs);
        self.with_bits(self.bits | rhs.bits)
    }
}

impl Not for Event {
    type Output = Event;

    fn not(self) -> Event {
        self.complement()
    }
}

/// Checks that `events` are pairwise disjoint and cover their space.
pub fn check_partition(events: &[Event]) -> Result<(), ModelError> {
    let first = events.first().ok_or(ModelError::NotAPartition)?;
    let mut seen = 0u64;
    for e in events {
        first.same_space(e)?;
        if e.bits & seen != 0 {
            return Err(ModelError::NotAPartition);
        }
        seen |= e.bits;
    }
    if seen != full_mask(first.space_len()) {
        return Err(ModelError::NotAPartition);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_rejects_duplicates_and_empty() {
        assert!(matches!(
            PossibilitySpace::new(["a", "a"]),
            Err(ModelError::DuplicateState(_))
        ));
        assert!(matches!(
            PossibilitySpace::new(Vec::<String>::new()),
            Err(ModelError::EmptySpace)
        ));
        assert!(PossibilitySpace::numbered(65).is_err());
        assert!(PossibilitySpace::numbered(64).is_ok());
    }

    #[test]
    fn event_algebra() {
        let space = PossibilitySpace::numbered(4).unwrap();
        let e1 = space.event_from_states([0, 1]).unwrap();
        let s1 = space.event_from_states([0, 2]).unwrap();
        assert_eq!((e1 & s1).states().collect::<Vec<_>>(), vec![0]);
        assert_eq!((e1 | s1).len(), 3);
        assert_eq!((!e1).states().collect::<Vec<_>>(), vec![2, 3]);
        assert!(space.full().is_full());
        assert!(check_partition(&[e1, !e1]).is_ok());
        assert!(check_partition(&[e1, e1]).is_err());
        assert!(check_partition(&[e1]).is_err());
    }

    #[test]
    #[should_panic(expected = "different possibility spaces")]
    fn cross_space_intersection_panics() {
        let a = PossibilitySpace::new(["x", "y"]).unwrap();
        let b = PossibilitySpace::new(["u", "v"]).unwrap();
        let _ = a.full() & b.full();
    }

    #[test]
    fn cross_space_partition_is_an_error() {
        let a = PossibilitySpace::new(["x", "y"]).unwrap();
        let b = PossibilitySpace::new(["u", "v"]).unwrap();
        let ea = a.event_from_states([0]).unwrap();
        let eb = b.event_from_states([1]).unwrap();
        assert!(matches!(
            check_partition(&[ea, eb]),
            Err(ModelError::SpaceMismatch)
        ));
    }
}
