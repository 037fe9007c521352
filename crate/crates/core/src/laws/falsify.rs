use rand::Rng;

use super::{check_property_instance, LawError, PropertyId, PropertyInstance, Verdict, Violation};
use crate::choice::{ChoiceRule, RuleKind};
use crate::generate::{draw_checked, random_world_with, rng_for, GenConfig, World};
use crate::model::PossibilitySpace;
use crate::Rational;

/// How many instances to draw and from what distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingConfig {
    pub budget: usize,
    pub generator: GenConfig,
    pub shrink: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            budget: 1000,
            generator: GenConfig::default(),
            shrink: true,
        }
    }
}

impl SamplingConfig {
    pub fn with_budget(budget: usize) -> Self {
        SamplingConfig {
            budget,
            ..SamplingConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawVerdict {
    /// No violation within the budget.
    Corroborated,
    Violated,
}

impl LawVerdict {
    pub fn name(self) -> &'static str {
        match self {
            LawVerdict::Corroborated => "corroborated",
            LawVerdict::Violated => "violated",
        }
    }
}

/// A violating instance with the world it lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub world: World,
    pub instance: PropertyInstance,
    pub violation: Violation,
    /// Index of the sample that first violated the property.
    pub sample: usize,
    /// Gamble and state counts before shrinking.
    pub original_size: (usize, usize),
}

impl Witness {
    pub fn gamble_count(&self) -> usize {
        self.instance.gamble_count()
    }

    pub fn state_count(&self) -> usize {
        self.world.space.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub property: PropertyId,
    pub rule: RuleKind,
    pub instances_checked: usize,
    /// Samples whose world could not host the property's instance shape.
    pub skipped: usize,
    pub verdict: LawVerdict,
    pub witness: Option<Witness>,
}

fn violation_in(prop: PropertyId, kind: RuleKind, world: &World, inst: &PropertyInstance) -> Option<Violation> {
    let rule = ChoiceRule::new(kind, world.context.clone()).ok()?;
    match check_property_instance(prop, &rule, inst) {
        Ok(Verdict::Violated(v)) => Some(v),
        _ => None,
    }
}

/// Re-runs the single witnessing instance.
pub fn recheck_witness(prop: PropertyId, kind: RuleKind, witness: &Witness) -> Result<Verdict, LawError> {
    let rule = ChoiceRule::new(kind, witness.world.context.clone())?;
    check_property_instance(prop, &rule, &witness.instance)
}

fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..(1u64 << n) - 1)
        .map(|bits| (0..n).filter(|s| bits & (1 << s) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Greedily removes gambles, then states, while the violation persists.
pub fn shrink_witness(
    prop: PropertyId,
    kind: RuleKind,
    world: World,
    instance: PropertyInstance,
    violation: Violation,
) -> (World, PropertyInstance, Violation) {
    let (mut world, mut inst, mut violation) = (world, instance, violation);
    loop {
        let mut improved = false;
        for cand in inst.smaller() {
            if cand.check_preconditions(prop).is_err() {
                continue;
            }
            if let Some(v) = violation_in(prop, kind, &world, &cand) {
                inst = cand;
                violation = v;
                improved = true;
                break;
            }
        }
        if improved {
            continue;
        }
        let n = world.space.len();
        let candidates = if n <= 10 {
            subsets_by_size(n)
        } else {
            (0..n).map(|drop| (0..n).filter(|&s| s != drop).collect()).collect()
        };
        for states in candidates {
            let Ok(w) = world.restrict(&states) else { continue };
            let Ok(cand) = inst.project(&world.space, &states) else { continue };
            if cand.check_preconditions(prop).is_err() {
                continue;
            }
            if let Some(v) = violation_in(prop, kind, &w, &cand) {
                world = w;
                inst = cand;
                violation = v;
                improved = true;
                break;
            }
        }
        if !improved {
            return (world, inst, violation);
        }
    }
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

fn run<F>(prop: PropertyId, kind: RuleKind, sampling: &SamplingConfig, seed: u64, mut make_world: F) -> LawReport
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> Option<World>,
{
    let mut report = LawReport {
        property: prop,
        rule: kind,
        instances_checked: 0,
        skipped: 0,
        verdict: LawVerdict::Corroborated,
        witness: None,
    };
    for i in 0..sampling.budget {
        let mut rng = rng_for(sample_seed(seed, i));
        let Some(world) = make_world(&mut rng) else {
            report.skipped += 1;
            continue;
        };
        let Ok(inst) = draw_checked(prop, &world, None, &sampling.generator, &mut rng) else {
            report.skipped += 1;
            continue;
        };
        report.instances_checked += 1;
        if let Some(v) = violation_in(prop, kind, &world, &inst) {
            let original_size = (inst.gamble_count(), world.space.len());
            let (world, instance, violation) = if sampling.shrink {
                shrink_witness(prop, kind, world, inst, v)
            } else {
                (world, inst, v)
            };
            report.verdict = LawVerdict::Violated;
            report.witness = Some(Witness {
                world,
                instance,
                violation,
                sample: i,
                original_size,
            });
            break;
        }
    }
    report
}

/// Samples instances in worlds that share the rule's utilities and mass
/// functions; the state count comes from the mass functions, or from the
/// generator range when the rule uses none.
pub fn falsify_property(
    prop: PropertyId,
    rule: &ChoiceRule<Rational>,
    sampling: &SamplingConfig,
    seed: u64,
) -> LawReport {
    let ctx = rule.context().clone();
    let fixed = ctx
        .probability
        .as_ref()
        .map(|p| p.len())
        .or_else(|| ctx.credal.as_ref().and_then(|c| c.first()).map(|p| p.len()));
    let g = &sampling.generator;
    run(prop, rule.kind(), sampling, seed, |rng| {
        let n = fixed.unwrap_or_else(|| rng.gen_range(g.omega_min..=g.omega_max));
        Some(World {
            space: PossibilitySpace::numbered(n).ok()?,
            context: ctx.clone(),
        })
    })
}

/// Samples a fresh world (utilities, probability, credal set) for every instance.
pub fn falsify_property_sampled(prop: PropertyId, kind: RuleKind, sampling: &SamplingConfig, seed: u64) -> LawReport {
    let g = &sampling.generator;
    if g.validate().is_err() {
        return run(prop, kind, sampling, seed, |_| None);
    }
    run(prop, kind, sampling, seed, |rng| {
        let n = rng.gen_range(g.omega_min..=g.omega_max);
        random_world_with(n, g, rng).ok()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::ChoiceContext;
    use crate::model::RewardTable;
    use crate::scalar::Scalar;

    #[test]
    fn zero_budget_is_vacuous() {
        let r = falsify_property_sampled(PropertyId::P1, RuleKind::EuMax, &SamplingConfig::with_budget(0), 1);
        assert_eq!(r.instances_checked, 0);
        assert_eq!(r.verdict, LawVerdict::Corroborated);
        assert!(r.witness.is_none());
    }

    #[test]
    fn expected_utility_conditioning_is_corroborated() {
        let r = falsify_property_sampled(PropertyId::P1, RuleKind::EuMax, &SamplingConfig::with_budget(200), 2);
        assert_eq!(r.verdict, LawVerdict::Corroborated);
        assert_eq!(r.instances_checked, 200);
    }

    #[test]
    fn dominance_intersection_violation_shrinks() {
        let r = falsify_property_sampled(
            PropertyId::P2,
            RuleKind::PointwiseDominance,
            &SamplingConfig::with_budget(1000),
            3,
        );
        assert_eq!(r.verdict, LawVerdict::Violated);
        let w = r.witness.as_ref().unwrap();
        assert!(w.gamble_count() <= 3, "{w:?}");
        assert!(w.state_count() <= 2, "{w:?}");
        assert!(!recheck_witness(PropertyId::P2, RuleKind::PointwiseDominance, w).unwrap().holds());
    }

    #[test]
    fn bound_rule_keeps_its_utilities() {
        let table = RewardTable::new((0..3).map(|i| (format!("u{i}"), Rational::from_ratio(i, 1)))).unwrap();
        let rule = ChoiceRule::new(RuleKind::PointwiseDominance, ChoiceContext::new(table.clone())).unwrap();
        let r = falsify_property(PropertyId::P9, &rule, &SamplingConfig::with_budget(100), 5);
        assert_eq!(r.verdict, LawVerdict::Corroborated);
        let r = falsify_property(PropertyId::P2, &rule, &SamplingConfig::with_budget(1000), 5);
        assert_eq!(r.verdict, LawVerdict::Violated);
        assert_eq!(r.witness.unwrap().world.context.utilities, table);
    }

    #[test]
    fn state_subsets_are_ordered_by_size() {
        let s = subsets_by_size(3);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], vec![0]);
        assert_eq!(s[5], vec![1, 2]);
    }
}
