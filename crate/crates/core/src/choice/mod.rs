//! Set-valued choice functions over gambles, conditional on an event.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{is_a_consistent, Event, Gamble, GambleSet, RewardTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("rule `{rule}` needs {needs}")]
    MissingContext { rule: &'static str, needs: &'static str },
    #[error("cannot choose from an empty gamble set")]
    EmptySet,
    #[error("cannot condition on an empty event")]
    EmptyEvent,
    #[error("gamble set is not consistent with the conditioning event")]
    InconsistentSet,
    #[error("gamble or mass function length differs from the size of the possibility space")]
    DimensionMismatch,
    #[error("gamble uses a reward outside the utility table")]
    UnknownReward,
    #[error("invalid mass function: {0}")]
    InvalidMass(String),
    #[error("credal set is empty")]
    EmptyCredalSet,
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
}

/// A probability mass function with strictly positive masses summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction<S> {
    masses: Vec<S>,
}

impl<S: Scalar> MassFunction<S> {
    pub fn new(masses: Vec<S>) -> Result<Self, ChoiceError> {
        if masses.is_empty() {
            return Err(ChoiceError::InvalidMass("no states".into()));
        }
        if let Some(i) = masses.iter().position(|m| !m.is_positive()) {
            return Err(ChoiceError::InvalidMass(format!("mass of state {i} is not positive")));
        }
        let total = masses.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !S::is_unit(&total) {
            return Err(ChoiceError::InvalidMass(format!("masses sum to {total}")));
        }
        Ok(MassFunction { masses })
    }

    pub fn uniform(states: usize) -> Result<Self, ChoiceError> {
        if states == 0 {
            return Err(ChoiceError::InvalidMass("no states".into()));
        }
        Self::new(vec![S::from_ratio(1, states as i64); states])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn mass(&self, state: usize) -> &S {
        &self.masses[state]
    }

    pub fn probability(&self, event: &Event) -> S {
        event
            .states()
            .fold(S::zero(), |acc, s| acc + self.masses[s].clone())
    }

    /// `E[U∘X | A]`. `event` must be non-empty.
    pub fn conditional_expectation(&self, gamble: &Gamble, table: &RewardTable<S>, event: &Event) -> S {
        let mut numer = S::zero();
        let mut denom = S::zero();
        for s in event.states() {
            let m = self.masses[s].clone();
            numer = numer + m.clone() * table.utility(gamble.get(s)).clone();
            denom = denom + m;
        }
        numer / denom
    }

    /// The mass function conditioned on the states kept, renumbered in order.
    pub fn restrict(&self, states: &[usize]) -> Result<Self, ChoiceError> {
        let kept: Vec<S> = states.iter().map(|&s| self.masses[s].clone()).collect();
        let total = kept.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !total.is_positive() {
            return Err(ChoiceError::InvalidMass("no mass left".into()));
        }
        Self::new(kept.into_iter().map(|m| m / total.clone()).collect())
    }
}

/// The rules offered by [`ChoiceRule`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    EuMax,
    PointwiseDominance,
    Maximality,
    EAdmissibility,
    GammaMaximin,
    IntervalDominance,
}

impl RuleKind {
    pub const ALL: [RuleKind; 6] = [
        RuleKind::EuMax,
        RuleKind::PointwiseDominance,
        RuleKind::Maximality,
        RuleKind::EAdmissibility,
        RuleKind::GammaMaximin,
        RuleKind::IntervalDominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::EuMax => "eu_max",
            RuleKind::PointwiseDominance => "pointwise_dominance",
            RuleKind::Maximality => "maximality",
            RuleKind::EAdmissibility => "e_admissibility",
            RuleKind::GammaMaximin => "gamma_maximin",
            RuleKind::IntervalDominance => "interval_dominance",
        }
    }

    pub fn needs_probability(self) -> bool {
        self == RuleKind::EuMax
    }

    /// Rules that read a credal set (a single probability is accepted in its place).
    pub fn needs_credal(self) -> bool {
        matches!(
            self,
            RuleKind::Maximality | RuleKind::EAdmissibility | RuleKind::GammaMaximin | RuleKind::IntervalDominance
        )
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = ChoiceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| ChoiceError::UnknownRule(s.to_string()))
    }
}

/// Utilities plus the optional uncertainty model a rule may need.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceContext<S> {
    pub utilities: RewardTable<S>,
    pub probability: Option<MassFunction<S>>,
    pub credal: Option<Vec<MassFunction<S>>>,
}

impl<S: Scalar> ChoiceContext<S> {
    pub fn new(utilities: RewardTable<S>) -> Self {
        ChoiceContext {
            utilities,
            probability: None,
            credal: None,
        }
    }

    pub fn with_probability(mut self, p: MassFunction<S>) -> Self {
        self.probability = Some(p);
        self
    }

    pub fn with_credal(mut self, set: Vec<MassFunction<S>>) -> Self {
        self.credal = Some(set);
        self
    }

    /// The credal set used by imprecise rules: the declared one, or the
    /// precise probability as a singleton.
    pub fn credal_set(&self) -> Option<Vec<&MassFunction<S>>> {
        match (&self.credal, &self.probability) {
            (Some(set), _) => Some(set.iter().collect()),
            (None, Some(p)) => Some(vec![p]),
            (None, None) => None,
        }
    }

    /// The context on the sub-space keeping `states`, with every mass
    /// function conditioned on them.
    pub fn restrict_to(&self, states: &[usize]) -> Result<Self, ChoiceError> {
        Ok(ChoiceContext {
            utilities: self.utilities.clone(),
            probability: self.probability.as_ref().map(|p| p.restrict(states)).transpose()?,
            credal: self
                .credal
                .as_ref()
                .map(|set| set.iter().map(|p| p.restrict(states)).collect())
                .transpose()?,
        })
    }
}

/// A choice function `opt(· | A)`.
pub trait ChoiceFunction {
    /// Returns the non-empty subset of `set` chosen under `event`.
    fn select(&self, set: &GambleSet, event: &Event) -> Result<GambleSet, ChoiceError>;

    fn name(&self) -> String;
}

impl<T: ChoiceFunction + ?Sized> ChoiceFunction for &T {
    fn select(&self, set: &GambleSet, event: &Event) -> Result<GambleSet, ChoiceError> {
        (**self).select(set, event)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// One of the built-in rules bound to a context.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceRule<S> {
    kind: RuleKind,
    context: ChoiceContext<S>,
}

impl<S: Scalar> ChoiceRule<S> {
    /// Binds `kind` to `context`, checking that the context has what the rule needs.
    pub fn new(kind: RuleKind, context: ChoiceContext<S>) -> Result<Self, ChoiceError> {
        let n = if kind.needs_probability() {
            let p = context.probability.as_ref().ok_or(ChoiceError::MissingContext {
                rule: kind.name(),
                needs: "a probability mass function",
            })?;
            Some(p.len())
        } else if kind.needs_credal() {
            let set = context.credal_set().ok_or(ChoiceError::MissingContext {
                rule: kind.name(),
                needs: "a credal set or a probability mass function",
            })?;
            if set.is_empty() {
                return Err(ChoiceError::EmptyCredalSet);
            }
            if set.iter().any(|p| p.len() != set[0].len()) {
                return Err(ChoiceError::DimensionMismatch);
            }
            Some(set[0].len())
        } else {
            None
        };
        if let (Some(n), Some(p)) = (n, &context.probability) {
            if p.len() != n {
                return Err(ChoiceError::DimensionMismatch);
            }
        }
        Ok(ChoiceRule { kind, context })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn context(&self) -> &ChoiceContext<S> {
        &self.context
    }

    pub fn restrict_to(&self, states: &[usize]) -> Result<Self, ChoiceError> {
        ChoiceRule::new(self.kind, self.context.restrict_to(states)?)
    }

    fn masses(&self) -> Vec<&MassFunction<S>> {
        if self.kind.needs_probability() {
            vec![self.context.probability.as_ref().expect("checked in new")]
        } else {
            self.context.credal_set().expect("checked in new")
        }
    }

    fn check(&self, set: &GambleSet, event: &Event) -> Result<(), ChoiceError> {
        if set.is_empty() {
            return Err(ChoiceError::EmptySet);
        }
        if event.is_empty() {
            return Err(ChoiceError::EmptyEvent);
        }
        let n = event.space_len();
        for g in set {
            if g.len() != n {
                return Err(ChoiceError::DimensionMismatch);
            }
            if g.values().iter().any(|r| !self.context.utilities.contains(*r)) {
                return Err(ChoiceError::UnknownReward);
            }
            if !is_a_consistent(g, event) {
                return Err(ChoiceError::InconsistentSet);
            }
        }
        if self.kind != RuleKind::PointwiseDominance && self.masses().iter().any(|p| p.len() != n) {
            return Err(ChoiceError::DimensionMismatch);
        }
        Ok(())
    }

    /// `table[p][i]`: conditional expectation of the i-th gamble under the p-th mass function.
    fn expectations(&self, gambles: &[&Gamble], event: &Event) -> Vec<Vec<S>> {
        self.masses()
            .iter()
            .map(|p| {
                gambles
                    .iter()
                    .map(|g| p.conditional_expectation(g, &self.context.utilities, event))
                    .collect()
            })
            .collect()
    }
}

fn argmax<S: Scalar>(values: &[S]) -> Vec<usize> {
    let mut best = &values[0];
    for v in &values[1..] {
        if v > best {
            best = v;
        }
    }
    (0..values.len()).filter(|&i| values[i] >= *best).collect()
}

fn min_of<S: Scalar>(values: impl Iterator<Item = S>) -> S {
    values
        .reduce(|a, b| if b < a { b } else { a })
        .expect("non-empty")
}

fn max_of<S: Scalar>(values: impl Iterator<Item = S>) -> S {
    values
        .reduce(|a, b| if b > a { b } else { a })
        .expect("non-empty")
}

impl<S: Scalar> ChoiceFunction for ChoiceRule<S> {
    fn select(&self, set: &GambleSet, event: &Event) -> Result<GambleSet, ChoiceError> {
        self.check(set, event)?;
        let gambles: Vec<&Gamble> = set.iter().collect();
        let m = gambles.len();
        let keep: Vec<usize> = match self.kind {
            RuleKind::PointwiseDominance => {
                let u = &self.context.utilities;
                let dominates = |y: &Gamble, x: &Gamble| {
                    let mut strict = false;
                    for s in event.states() {
                        let (uy, ux) = (u.utility(y.get(s)), u.utility(x.get(s)));
                        if uy < ux {
                            return false;
                        }
                        if uy > ux {
                            strict = true;
                        }
                    }
                    strict
                };
                (0..m)
                    .filter(|&i| !(0..m).any(|j| dominates(gambles[j], gambles[i])))
                    .collect()
            }
            RuleKind::EuMax => {
                let e = self.expectations(&gambles, event);
                argmax(&e[0])
            }
            RuleKind::EAdmissibility => {
                let e = self.expectations(&gambles, event);
                let mut admitted = vec![false; m];
                for row in &e {
                    for i in argmax(row) {
                        admitted[i] = true;
                    }
                }
                (0..m).filter(|&i| admitted[i]).collect()
            }
            RuleKind::Maximality => {
                let e = self.expectations(&gambles, event);
                // j beats i when E_p[Y - X | A] > 0 for every p
                let beats = |j: usize, i: usize| e.iter().all(|row| row[j] > row[i]);
                (0..m).filter(|&i| !(0..m).any(|j| beats(j, i))).collect()
            }
            RuleKind::GammaMaximin => {
                let e = self.expectations(&gambles, event);
                let lower: Vec<S> = (0..m)
                    .map(|i| min_of(e.iter().map(|row| row[i].clone())))
                    .collect();
                argmax(&lower)
            }
            RuleKind::IntervalDominance => {
                let e = self.expectations(&gambles, event);
                let lower: Vec<S> = (0..m)
                    .map(|i| min_of(e.iter().map(|row| row[i].clone())))
                    .collect();
                let upper: Vec<S> = (0..m)
                    .map(|i| max_of(e.iter().map(|row| row[i].clone())))
                    .collect();
                let best_lower = max_of(lower.iter().cloned());
                (0..m).filter(|&i| upper[i] >= best_lower).collect()
            }
        };
        Ok(keep.into_iter().map(|i| gambles[i].clone()).collect())
    }

    fn name(&self) -> String {
        self.kind.name().to_string()
    }
}
