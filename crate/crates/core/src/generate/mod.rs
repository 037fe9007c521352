//! Deterministic random generation of worlds, consistent trees, property
//! instances and gamble-preserving tree rewrites.

mod instances;
mod rewrite;

pub(crate) use instances::draw_checked;
pub use instances::{family_corpus, random_gamble_instance, random_gamble_instance_in, GeneratedInstance};
pub use rewrite::{equivalent_rewrite, rewrite_step, Rewrite};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::choice::{ChoiceContext, ChoiceError, MassFunction};
use crate::model::{Event, ModelError, PossibilitySpace, RewardId, RewardTable, MAX_STATES};
use crate::tree::{count_nfd, validate, DecisionTree, Node, DEFAULT_ENUMERATION_LIMIT};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no valid output after {attempts} attempts")]
    GenerationRetryExhausted { attempts: usize },
    #[error("precondition cannot be met: {0}")]
    UnsatisfiablePrecondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// Bounds for everything the generators produce.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    /// Longest root-to-leaf path, in arcs.
    pub max_depth: usize,
    pub max_children: usize,
    pub omega_min: usize,
    pub omega_max: usize,
    pub reward_count: usize,
    pub utility_min: i64,
    pub utility_max: i64,
    /// Largest denominator of a generated utility (at most 16).
    pub utility_max_denom: i64,
    /// Probability that an internal node is a decision node.
    pub decision_ratio: f64,
    /// Probability that a non-root node above the depth bound is a leaf.
    pub leaf_prob: f64,
    /// Largest `|nfd(T)|` a generated tree may have.
    pub nfd_ceiling: usize,
    pub retries: usize,
    /// Number of mass functions in generated credal sets.
    pub credal_size: usize,
    /// Largest gamble set in generated property instances.
    pub max_gambles: usize,
    /// Largest number of member sets in family instances.
    pub max_sets: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            max_children: 3,
            omega_min: 2,
            omega_max: 6,
            reward_count: 5,
            utility_min: 0,
            utility_max: 20,
            utility_max_denom: 4,
            decision_ratio: 0.5,
            leaf_prob: 0.3,
            nfd_ceiling: 500,
            retries: 200,
            credal_size: 2,
            max_gambles: 4,
            max_sets: 3,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |m: &str| Err(GenError::InvalidConfig(m.to_string()));
        if self.max_children == 0 || self.reward_count == 0 || self.retries == 0 || self.credal_size == 0 {
            return fail("max_children, reward_count, retries and credal_size must be at least 1");
        }
        if self.max_gambles == 0 || self.max_sets == 0 {
            return fail("max_gambles and max_sets must be at least 1");
        }
        if self.omega_min == 0 || self.omega_min > self.omega_max || self.omega_max > MAX_STATES {
            return fail("state count range must satisfy 1 <= omega_min <= omega_max <= 64");
        }
        if self.utility_min > self.utility_max {
            return fail("utility_min exceeds utility_max");
        }
        if !(1..=16).contains(&self.utility_max_denom) {
            return fail("utility_max_denom must lie in 1..=16");
        }
        if !(0.0..=1.0).contains(&self.decision_ratio) || !(0.0..=1.0).contains(&self.leaf_prob) {
            return fail("ratios must lie in [0, 1]");
        }
        if self.nfd_ceiling == 0 || self.nfd_ceiling > DEFAULT_ENUMERATION_LIMIT {
            return fail("nfd_ceiling must lie in 1..=DEFAULT_ENUMERATION_LIMIT");
        }
        Ok(())
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A possibility space with utilities, a probability and a credal set, so
/// that every built-in rule can be evaluated in it.
#[derive(Clone, Debug, PartialEq)]
pub struct World {
    pub space: PossibilitySpace,
    pub context: ChoiceContext<Rational>,
}

impl World {
    /// The world on the sub-space keeping `states`.
    pub fn restrict(&self, states: &[usize]) -> Result<World, GenError> {
        Ok(World {
            space: self.space.restrict(states)?,
            context: self.context.restrict_to(states)?,
        })
    }
}

pub(crate) fn random_mass<R: Rng>(n: usize, rng: &mut R) -> MassFunction<Rational> {
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = weights.iter().sum();
    MassFunction::new(
        weights
            .into_iter()
            .map(|w| Rational::new(BigInt::from(w), BigInt::from(total)))
            .collect(),
    )
    .expect("positive weights normalize to a mass function")
}

pub(crate) fn random_utilities<R: Rng>(config: &GenConfig, rng: &mut R) -> RewardTable<Rational> {
    let entries = (0..config.reward_count).map(|i| {
        let den = rng.gen_range(1..=config.utility_max_denom);
        let num = rng.gen_range(config.utility_min * den..=config.utility_max * den);
        (format!("r{i:02}"), Rational::new(BigInt::from(num), BigInt::from(den)))
    });
    RewardTable::new(entries).expect("distinct generated names")
}

/// A world on `n` states with random utilities, probability and credal set.
pub(crate) fn random_world_with<R: Rng>(n: usize, config: &GenConfig, rng: &mut R) -> Result<World, GenError> {
    let space = PossibilitySpace::numbered(n)?;
    let utilities = random_utilities(config, rng);
    let probability = random_mass(n, rng);
    let credal = (0..config.credal_size).map(|_| random_mass(n, rng)).collect();
    Ok(World {
        space,
        context: ChoiceContext::new(utilities)
            .with_probability(probability)
            .with_credal(credal),
    })
}

pub fn random_world(config: &GenConfig, seed: u64) -> Result<World, GenError> {
    config.validate()?;
    let mut rng = rng_for(seed);
    let n = rng.gen_range(config.omega_min..=config.omega_max);
    random_world_with(n, config, &mut rng)
}

/// A consistent tree together with the world it lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedProblem {
    pub world: World,
    pub tree: DecisionTree,
}

/// Random partition of the space into `k` blocks, each meeting `history`.
/// Needs `history.len() >= k`.
pub(crate) fn random_partition<R: Rng>(history: &Event, k: usize, rng: &mut R) -> Vec<Event> {
    let mut inside: Vec<usize> = history.states().collect();
    inside.shuffle(rng);
    let mut blocks = vec![0u64; k];
    for (i, s) in inside.iter().enumerate() {
        let b = if i < k { i } else { rng.gen_range(0..k) };
        blocks[b] |= 1 << s;
    }
    for s in 0..history.space_len() {
        if !history.contains(s) {
            blocks[rng.gen_range(0..k)] |= 1 << s;
        }
    }
    blocks.into_iter().map(|b| history.with_bits(b)).collect()
}

fn random_node<R: Rng>(config: &GenConfig, depth: usize, history: Event, rng: &mut R) -> Node {
    if depth >= config.max_depth || (depth > 0 && rng.gen_bool(config.leaf_prob)) {
        return Node::Leaf(RewardId(rng.gen_range(0..config.reward_count) as u32));
    }
    let chance_possible = history.len() >= 2 && config.max_children >= 2;
    if !chance_possible || rng.gen_bool(config.decision_ratio) {
        let k = if config.max_children >= 2 && rng.gen_bool(0.85) {
            rng.gen_range(2..=config.max_children)
        } else {
            1
        };
        Node::Decision((0..k).map(|_| random_node(config, depth + 1, history, rng)).collect())
    } else {
        let k = rng.gen_range(2..=config.max_children.min(history.len()));
        let blocks = random_partition(&history, k, rng);
        Node::Chance(
            blocks
                .into_iter()
                .map(|e| {
                    let child = random_node(config, depth + 1, history & e, rng);
                    (e, child)
                })
                .collect(),
        )
    }
}

/// A random consistent tree whose `|nfd|` stays within the configured ceiling.
pub fn random_consistent_tree(config: &GenConfig, seed: u64) -> Result<GeneratedProblem, GenError> {
    config.validate()?;
    let mut rng = rng_for(seed);
    let n = rng.gen_range(config.omega_min..=config.omega_max);
    let world = random_world_with(n, config, &mut rng)?;
    for _ in 0..config.retries {
        let root = random_node(config, 0, world.space.full(), &mut rng);
        if count_nfd(&root) > config.nfd_ceiling as u128 {
            continue;
        }
        let tree = DecisionTree::new(root, world.space.full());
        if validate(&tree).is_ok() {
            return Ok(GeneratedProblem { world, tree });
        }
    }
    Err(GenError::GenerationRetryExhausted {
        attempts: config.retries,
    })
}

/// `count` trees from consecutive seeds derived from `seed`.
pub fn tree_corpus(config: &GenConfig, count: usize, seed: u64) -> Result<Vec<GeneratedProblem>, GenError> {
    (0..count as u64)
        .map(|i| random_consistent_tree(config, seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect()
}
