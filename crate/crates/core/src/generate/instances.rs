use rand::seq::SliceRandom;
use rand::Rng;

use super::{random_partition, random_world_with, rng_for, GenConfig, GenError, World};
use crate::laws::{PropertyId, PropertyInstance};
use crate::model::{Event, Gamble, GambleSet, RewardId};

/// A property instance together with the world it was drawn in.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    pub world: World,
    pub instance: PropertyInstance,
}

fn random_event<R: Rng>(full: &Event, rng: &mut R) -> Event {
    loop {
        let e = full.with_bits(rng.gen::<u64>() & full.bits());
        if !e.is_empty() {
            return e;
        }
    }
}

/// `Ω` half of the time, otherwise a random non-empty event.
fn random_conditioning<R: Rng>(full: &Event, rng: &mut R) -> Event {
    if rng.gen_bool(0.5) {
        *full
    } else {
        random_event(full, rng)
    }
}

/// Events `A`, `B` with `A∩B` and `∁A∩B` both non-empty.
fn random_split<R: Rng>(full: &Event, fixed_a: Option<Event>, rng: &mut R) -> Option<(Event, Event)> {
    if full.len() < 2 {
        return None;
    }
    for _ in 0..1000 {
        let b = if rng.gen_bool(0.5) { *full } else { random_event(full, rng) };
        let a = fixed_a.unwrap_or_else(|| random_event(full, rng));
        if !(a & b).is_empty() && !(!a & b).is_empty() {
            return Some((a, b));
        }
        if fixed_a.is_some() && (!a).is_empty() {
            return None;
        }
    }
    None
}

/// A gamble whose every attained reward is attained inside `c`.
fn consistent_gamble<R: Rng>(c: &Event, rewards: usize, rng: &mut R) -> Gamble {
    let n = c.space_len();
    let mut values = vec![RewardId(0); n];
    let mut inside = Vec::with_capacity(c.len());
    for s in c.states() {
        let r = RewardId(rng.gen_range(0..rewards) as u32);
        values[s] = r;
        inside.push(r);
    }
    for (s, v) in values.iter_mut().enumerate() {
        if !c.contains(s) {
            *v = *inside.choose(rng).expect("non-empty event");
        }
    }
    Gamble::new(values)
}

/// A gamble equal to `x` on `a` whose values off `a` are taken from `x` on `c ⊆ a`.
fn twin<R: Rng>(x: &Gamble, a: &Event, c: &Event, rng: &mut R) -> Gamble {
    let pool: Vec<RewardId> = c.states().map(|s| x.get(s)).collect();
    let values = (0..x.len())
        .map(|s| if a.contains(s) { x.get(s) } else { *pool.choose(rng).expect("non-empty") })
        .collect();
    Gamble::new(values)
}

fn consistent_set<R: Rng>(c: &Event, size: usize, rewards: usize, rng: &mut R) -> GambleSet {
    (0..size).map(|_| consistent_gamble(c, rewards, rng)).collect()
}

/// Adds twins (equal on `a`, consistent with `c`) of one or two members.
fn add_twins<R: Rng>(set: &mut GambleSet, a: &Event, c: &Event, rng: &mut R) {
    let members: Vec<Gamble> = set.iter().cloned().collect();
    for _ in 0..rng.gen_range(1..=2) {
        let x = members.choose(rng).expect("non-empty");
        set.insert(twin(x, a, c, rng));
    }
}

fn random_subset<R: Rng>(set: &GambleSet, rng: &mut R) -> GambleSet {
    loop {
        let s: GambleSet = set.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !s.is_empty() {
            return s;
        }
    }
}

fn draw<R: Rng>(
    prop: PropertyId,
    world: &World,
    fixed_a: Option<Event>,
    config: &GenConfig,
    rng: &mut R,
) -> Result<PropertyInstance, GenError> {
    let full = world.space.full();
    let rewards = world.context.utilities.len();
    let size = |rng: &mut R, min: usize| rng.gen_range(min.min(config.max_gambles)..=config.max_gambles);
    let pick_a = |rng: &mut R| fixed_a.unwrap_or_else(|| random_conditioning(&full, rng));
    Ok(match prop {
        PropertyId::P1 => {
            let a = pick_a(rng);
            let k = size(rng, 1);
            let mut set = consistent_set(&a, k, rewards, rng);
            if rng.gen_bool(0.8) {
                add_twins(&mut set, &a, &a, rng);
            }
            PropertyInstance::Conditioning { set, a }
        }
        PropertyId::P2 | PropertyId::P8 | PropertyId::P9 => {
            let a = pick_a(rng);
            let k = size(rng, 2);
            let set = consistent_set(&a, k, rewards, rng);
            let subset = random_subset(&set, rng);
            PropertyInstance::Subset { set, subset, a }
        }
        PropertyId::P3 | PropertyId::P10 => {
            let (a, b) = random_split(&full, fixed_a, rng).ok_or_else(|| {
                GenError::UnsatisfiablePrecondition("mixture needs A∩B and ∁A∩B non-empty".into())
            })?;
            let k = size(rng, 1);
            let set = consistent_set(&(a & b), k, rewards, rng);
            let z = consistent_gamble(&(!a & b), rewards, rng);
            PropertyInstance::Mixture { set, z, a, b }
        }
        PropertyId::P7 => {
            let (a, b) = random_split(&full, fixed_a, rng).ok_or_else(|| {
                GenError::UnsatisfiablePrecondition("backward conditioning needs A∩B and ∁A∩B non-empty".into())
            })?;
            let k = size(rng, 1);
            let mut set = consistent_set(&(a & b), k, rewards, rng);
            add_twins(&mut set, &a, &(a & b), rng);
            let zk = rng.gen_range(1..=3);
            let zs = consistent_set(&(!a & b), zk, rewards, rng);
            PropertyInstance::BackwardConditioning { set, zs, a, b }
        }
        PropertyId::P4 | PropertyId::P5 | PropertyId::P6 | PropertyId::P11 => {
            let a = pick_a(rng);
            family_in(&a, rewards, config, rng)
        }
        PropertyId::L => {
            let n = full.len();
            if n < 2 {
                return Err(GenError::UnsatisfiablePrecondition("set sums need two states".into()));
            }
            let b = match fixed_a {
                Some(b) if b.len() < 2 => {
                    return Err(GenError::UnsatisfiablePrecondition("B needs two states".into()));
                }
                Some(b) => b,
                None if rng.gen_bool(0.5) => full,
                None => loop {
                    let e = random_event(&full, rng);
                    if e.len() >= 2 {
                        break e;
                    }
                },
            };
            let k = rng.gen_range(2..=b.len().min(3));
            let partition = random_partition(&b, k, rng);
            let sets = partition
                .iter()
                .map(|e| {
                    let m = rng.gen_range(1..=config.max_gambles.min(3));
                    consistent_set(&(*e & b), m, rewards, rng)
                })
                .collect();
            PropertyInstance::SetSum { partition, sets, b }
        }
    })
}

fn family_in<R: Rng>(a: &Event, rewards: usize, config: &GenConfig, rng: &mut R) -> PropertyInstance {
    let pool_size = rng.gen_range(2..=config.max_gambles + 2);
    let mut pool = consistent_set(a, pool_size, rewards, rng);
    if rng.gen_bool(0.3) {
        add_twins(&mut pool, a, a, rng);
    }
    let count = rng.gen_range(1..=config.max_sets.max(2));
    let sets = (0..count)
        .map(|_| loop {
            let s = random_subset(&pool, rng);
            if s.len() <= config.max_gambles {
                break s;
            }
        })
        .collect();
    PropertyInstance::Family { sets, a: *a }
}

/// An instance for `prop` drawn in the given world. `a` fixes the
/// conditioning event (`A` for most shapes, `B` for the set-sum law).
pub fn random_gamble_instance_in(
    prop: PropertyId,
    world: &World,
    a: Option<Event>,
    config: &GenConfig,
    seed: u64,
) -> Result<PropertyInstance, GenError> {
    config.validate()?;
    let mut rng = rng_for(seed);
    draw_checked(prop, world, a, config, &mut rng)
}

pub(crate) fn draw_checked<R: Rng>(
    prop: PropertyId,
    world: &World,
    a: Option<Event>,
    config: &GenConfig,
    rng: &mut R,
) -> Result<PropertyInstance, GenError> {
    if let Some(e) = &a {
        e.same_space(&world.space.full())?;
    }
    for _ in 0..config.retries {
        let inst = draw(prop, world, a, config, rng)?;
        if inst.check_preconditions(prop).is_ok() {
            return Ok(inst);
        }
    }
    Err(GenError::GenerationRetryExhausted {
        attempts: config.retries,
    })
}

/// A fresh world and an instance for `prop` in it.
pub fn random_gamble_instance(prop: PropertyId, config: &GenConfig, seed: u64) -> Result<GeneratedInstance, GenError> {
    config.validate()?;
    let mut rng = rng_for(seed);
    let min = match prop {
        PropertyId::P3 | PropertyId::P7 | PropertyId::P10 | PropertyId::L => config.omega_min.max(2),
        _ => config.omega_min,
    };
    if min > config.omega_max {
        return Err(GenError::UnsatisfiablePrecondition(format!(
            "{} needs at least two states",
            prop.code()
        )));
    }
    let n = rng.gen_range(min..=config.omega_max);
    let world = random_world_with(n, config, &mut rng)?;
    let instance = draw_checked(prop, &world, None, config, &mut rng)?;
    Ok(GeneratedInstance { world, instance })
}

/// `count` family instances, each in its own world.
pub fn family_corpus(config: &GenConfig, count: usize, seed: u64) -> Result<Vec<GeneratedInstance>, GenError> {
    (0..count as u64)
        .map(|i| random_gamble_instance(PropertyId::P4, config, seed.wrapping_mul(7_919).wrapping_add(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_world;
    use crate::model::check_a_consistency;

    #[test]
    fn every_property_gets_a_valid_instance() {
        let config = GenConfig::default();
        for prop in PropertyId::ALL {
            for seed in 0..30 {
                let g = random_gamble_instance(prop, &config, seed).unwrap();
                assert!(g.instance.fits(prop));
                g.instance.check_preconditions(prop).unwrap();
            }
        }
    }

    #[test]
    fn conditioning_batch_is_consistent() {
        let config = GenConfig::default();
        for seed in 0..1000 {
            let g = random_gamble_instance(PropertyId::P1, &config, seed).unwrap();
            if let PropertyInstance::Conditioning { set, a } = &g.instance {
                assert!(check_a_consistency(set, a).unwrap().is_consistent());
            } else {
                panic!("wrong shape");
            }
        }
    }

    #[test]
    fn mixture_with_full_event_is_rejected() {
        let config = GenConfig::default();
        let world = random_world(&config, 3).unwrap();
        let full = world.space.full();
        assert!(matches!(
            random_gamble_instance_in(PropertyId::P3, &world, Some(full), &config, 1),
            Err(GenError::UnsatisfiablePrecondition(_))
        ));
    }

    #[test]
    fn subset_instances_have_subsets() {
        let config = GenConfig::default();
        for seed in 0..50 {
            let g = random_gamble_instance(PropertyId::P2, &config, seed).unwrap();
            if let PropertyInstance::Subset { set, subset, .. } = g.instance {
                assert!(!subset.is_empty() && subset.is_subset(&set));
            }
        }
    }

    #[test]
    fn instances_are_deterministic() {
        let config = GenConfig::default();
        for prop in PropertyId::ALL {
            assert_eq!(
                random_gamble_instance(prop, &config, 11).unwrap(),
                random_gamble_instance(prop, &config, 11).unwrap()
            );
        }
    }
}
