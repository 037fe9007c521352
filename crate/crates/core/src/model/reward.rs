use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

use super::ModelError;

/// Index of a reward symbol inside its [`RewardTable`].
///
/// Ids are assigned in lexicographic order of the symbols, so ordering gambles
/// by id orders them by symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RewardId(pub u32);

impl RewardId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RewardId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Reward symbols with their utilities.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardTable<S> {
    names: Vec<String>,
    utilities: Vec<S>,
}

impl<S: Scalar> RewardTable<S> {
    pub fn new<I, N>(entries: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (N, S)>,
        N: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, utility) in entries {
            let name = name.into();
            if map.contains_key(&name) {
                return Err(ModelError::DuplicateReward(name));
            }
            map.insert(name, utility);
        }
        let (names, utilities) = map.into_iter().unzip();
        Ok(RewardTable { names, utilities })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<RewardId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| RewardId(i as u32))
    }

    pub fn name(&self, id: RewardId) -> &str {
        &self.names[id.index()]
    }

    pub fn utility(&self, id: RewardId) -> &S {
        &self.utilities[id.index()]
    }

    pub fn utilities(&self) -> &[S] {
        &self.utilities
    }

    pub fn ids(&self) -> impl Iterator<Item = RewardId> {
        (0..self.names.len() as u32).map(RewardId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (RewardId, &str, &S)> {
        self.names
            .iter()
            .zip(&self.utilities)
            .enumerate()
            .map(|(i, (n, u))| (RewardId(i as u32), n.as_str(), u))
    }

    pub fn contains(&self, id: RewardId) -> bool {
        id.index() < self.names.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn ids_follow_symbol_order() {
        let table = RewardTable::new([
            ("z", BigRational::from_ratio(0, 1)),
            ("a", BigRational::from_ratio(-1, 1)),
            ("m", BigRational::from_ratio(5, 2)),
        ])
        .unwrap();
        assert_eq!(table.id("a"), Some(RewardId(0)));
        assert_eq!(table.id("m"), Some(RewardId(1)));
        assert_eq!(table.id("z"), Some(RewardId(2)));
        assert_eq!(table.id("q"), None);
        assert_eq!(table.utility(RewardId(1)), &BigRational::from_ratio(5, 2));
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let err = RewardTable::new([("a", 1.0), ("a", 2.0)]).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateReward(ref n) if n == "a"));
    }
}
