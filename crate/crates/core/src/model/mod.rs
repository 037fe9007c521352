//! Possibility spaces, events, reward symbols and gambles.

mod gamble;
mod reward;
mod space;

pub use gamble::{
    check_a_consistency, combine_on_partition, describe_set, gamble_set_sum, is_a_consistent,
    Consistency, Gamble, GambleSet, PartialGamble,
};
pub(crate) use gamble::set_sum_unchecked;
pub use reward::{RewardId, RewardTable};
pub use space::{check_partition, Event, PossibilitySpace, SpaceId, MAX_STATES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("possibility space has no states")]
    EmptySpace,
    #[error("possibility space has {0} states; at most {MAX_STATES} are supported")]
    TooManyStates(usize),
    #[error("duplicate state label `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate reward symbol `{0}`")]
    DuplicateReward(String),
    #[error("unknown reward symbol `{0}`")]
    UnknownReward(String),
    #[error("events do not form a partition of the possibility space")]
    NotAPartition,
    #[error("a partial gamble's domain differs from its event")]
    DomainMismatch,
    #[error("{events} events but {sets} gamble sets")]
    ArityMismatch { events: usize, sets: usize },
    #[error("empty gamble set")]
    EmptyInputSet,
    #[error("empty event")]
    EmptyEvent,
    #[error("events or gambles belong to different possibility spaces")]
    SpaceMismatch,
    #[error("gamble length differs from the size of the possibility space")]
    DimensionMismatch,
}
