//! Randomized property suites over batches of small instances.
//!
//! Each suite draws its instances from a seed, checks one family of
//! invariants on every instance and reports the failures. Instances are
//! independent, so a suite is evaluated through [`crate::batch`].

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{PartialAction, PointSet};
use crate::algebra::{br_enumerate, br_expected_count, br_mul, br_verify_inverse_monoid, groupoid_build, BrElement};
use crate::batch::{self, Execution};
use crate::fixtures::{self, mutate, random_any_subset, random_instance, InstanceLimits};
use crate::globalization::{envelope, quotient_group_action};
use crate::orbits::{full_quotient, invariant_separator, section_finite_traced, verify_section, SectionError};
use crate::tower::{build_chain, compatibility_check, inverse_limit_check, tower_section, TowerQuotients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AxiomEquivalence,
    Saturation,
    Globalization,
    Separation,
    Sections,
    QuotientGroups,
    TowerDescent,
    Transfers,
    BirgetRhodes,
    Groupoid,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::AxiomEquivalence,
        Suite::Saturation,
        Suite::Globalization,
        Suite::Separation,
        Suite::Sections,
        Suite::QuotientGroups,
        Suite::TowerDescent,
        Suite::Transfers,
        Suite::BirgetRhodes,
        Suite::Groupoid,
    ];

    pub fn number(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::AxiomEquivalence => "axiom-equivalence",
            Suite::Saturation => "saturation",
            Suite::Globalization => "globalization",
            Suite::Separation => "separation",
            Suite::Sections => "sections",
            Suite::QuotientGroups => "quotient-groups",
            Suite::TowerDescent => "tower-descent",
            Suite::Transfers => "transfers",
            Suite::BirgetRhodes => "birget-rhodes",
            Suite::Groupoid => "groupoid",
        }
    }

    pub fn check(self, seed: u64) -> Result<(), String> {
        match self {
            Suite::AxiomEquivalence => check_axiom_equivalence(seed),
            Suite::Saturation => check_saturation(seed),
            Suite::Globalization => check_globalization(seed),
            Suite::Separation => check_separation(seed),
            Suite::Sections => check_sections(seed),
            Suite::QuotientGroups => check_quotient_groups(seed),
            Suite::TowerDescent => check_tower_descent(seed),
            Suite::Transfers => check_transfers(seed),
            Suite::BirgetRhodes => check_birget_rhodes(seed),
            Suite::Groupoid => check_groupoid(seed),
        }
    }
}

/// Instances stay within `|G| <= 8` and `|X| <= 16`.
pub fn limits() -> InstanceLimits {
    InstanceLimits::default()
}

/// Seed of the `index`-th instance of a suite.
pub fn instance_seed(base: u64, suite: Suite, index: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((suite.number() as u64) << 32)
        .wrapping_add(index as u64)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn any_instance(seed: u64) -> PartialAction {
    random_instance(seed, seed % 2 == 0, limits()).induced.action
}

fn free_instance(seed: u64) -> PartialAction {
    random_instance(seed, true, limits()).induced.action
}

fn check_axiom_equivalence(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    let report = pa.validate();
    ensure(report.is_valid(), || format!("induced action rejected: {report}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    for _ in 0..4 {
        let mutated = mutate(&pa, &mut rng);
        let report = mutated.validate();
        ensure(report.verdicts_agree(), || format!("verdicts disagree: {report}"))?;
    }
    Ok(())
}

fn check_saturation(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5A5A);
    let u = random_any_subset(&mut rng, pa.space_size());
    let sat = pa.saturate(&u);
    let complement: PointSet = pa.points().filter(|x| !sat.contains(x)).collect();
    ensure(u.is_subset(&sat), || "U not contained in its saturation".into())?;
    ensure(pa.is_invariant(&sat), || format!("saturation {sat:?} not invariant"))?;
    ensure(pa.is_invariant(&complement), || "complement not invariant".into())?;
    ensure(pa.saturate(&sat) == sat, || "saturation not idempotent".into())
}

fn check_globalization(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    let env = envelope(&pa).map_err(|e| e.to_string())?;
    let mu = env.mu();
    let group = pa.group();
    let homomorphism = group.elements().all(|g| {
        group
            .elements()
            .all(|h| (0..env.len()).all(|c| mu.apply(g, mu.apply(h, c)) == mu.apply(group.mul(g, h), c)))
    });
    ensure(homomorphism, || "mu is not a global action".into())?;
    let report = env.check();
    ensure(report.all_hold(), || format!("envelope invariants fail: {report:?}"))?;
    ensure(env.matches_hat_orbits(), || "envelope classes differ from hat orbits".into())
}

fn check_separation(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    let quotient = full_quotient(&pa).map_err(|e| e.to_string())?;
    for x in pa.points() {
        for y in pa.points() {
            let separated = invariant_separator(&pa, x, y);
            if quotient.class_of(x) == quotient.class_of(y) {
                ensure(separated.is_none(), || format!("{x} ~ {y} but separated"))?;
                continue;
            }
            let a = separated.ok_or_else(|| format!("{x}, {y} not separated"))?;
            let complement: PointSet = pa.points().filter(|z| !a.contains(z)).collect();
            ensure(a.contains(&x) && !a.contains(&y), || format!("separator for {x}, {y} misplaced"))?;
            ensure(pa.is_invariant(&a) && pa.is_invariant(&complement), || {
                format!("separator for {x}, {y} not invariant")
            })?;
            ensure(quotient.preimage_of_image(&a) == a, || format!("separator for {x}, {y} not saturated"))?;
        }
    }
    Ok(())
}

fn check_sections(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    match section_finite_traced(&pa) {
        Ok(trace) => {
            ensure(pa.is_free(), || "section built for a non-free action".into())?;
            ensure(verify_section(&pa, &trace.section), || "section fails verification".into())?;
            let mut covered = vec![0usize; trace.section.from.len()];
            for (_, classes) in &trace.refinement {
                for &c in classes {
                    covered[c] += 1;
                }
            }
            ensure(covered.iter().all(|&n| n == 1), || "refinement is not a partition".into())
        }
        Err(SectionError::NotFree) => ensure(!pa.is_free(), || "free action reported NotFree".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn check_quotient_groups(seed: u64) -> Result<(), String> {
    let pa = free_instance(seed);
    for normal in pa.group().normal_subgroups() {
        let qa = quotient_group_action(&pa, &normal).map_err(|e| e.to_string())?;
        let which = || format!("H = {:?}", normal.elements());
        ensure(qa.action.validate().is_valid(), || format!("{}: eta_G/H invalid", which()))?;
        ensure(qa.action.is_free(), || format!("{}: eta_G/H not free", which()))?;
        ensure(qa.psi_is_bijective(), || format!("{}: psi not bijective", which()))?;
        ensure(qa.diagram_commutes(), || format!("{}: psi diagram fails", which()))?;
    }
    Ok(())
}

fn check_tower_descent(seed: u64) -> Result<(), String> {
    let pa = free_instance(seed);
    let chain = build_chain(pa.group());
    let tower = tower_section(&pa, &chain).map_err(|e| e.to_string())?;
    ensure(verify_section(&pa, tower.section()), || "final section fails".into())?;
    for (i, lower) in tower.levels.iter().enumerate() {
        for upper in &tower.levels[i..] {
            ensure(
                compatibility_check(&pa, &lower.subgroup, &lower.section, &upper.subgroup, &upper.section),
                || format!("levels {:?} and {:?} not ordered", lower.subgroup.elements(), upper.subgroup.elements()),
            )?;
        }
    }
    let quotients = TowerQuotients::build(&pa, &chain).map_err(|e| e.to_string())?;
    ensure(inverse_limit_check(&quotients), || "inverse limit check fails".into())
}

fn check_transfers(seed: u64) -> Result<(), String> {
    let pa = free_instance(seed);
    let env = envelope(&pa).map_err(|e| e.to_string())?;
    let q = section_finite_traced(&pa).map_err(|e| e.to_string())?.section;
    let s = env.section_to_envelope(&q).map_err(|e| e.to_string())?;
    ensure(verify_section(env.mu_action(), &s), || "section of Pi_G fails".into())?;
    let r = env.section_from_envelope(&s).map_err(|e| e.to_string())?;
    ensure(verify_section(&pa, &r), || "round trip fails".into())?;
    let p = env
        .section_from_two(&s, &env.canonical_splitting())
        .map_err(|e| e.to_string())?;
    ensure(verify_section(&pa, &p), || "two-section transfer fails".into())
}

fn check_birget_rhodes(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = fixtures::small_groups();
    let (_, group) = groups.choose(&mut rng).expect("catalog is nonempty");
    let group = Arc::new(group.clone());
    let n = group.order();
    let random_element = |rng: &mut ChaCha8Rng| {
        let g = rng.gen_range(0..n);
        let mask: u64 = rng.gen::<u64>() & ((1u64 << n) - 1) | 1 | (1 << g);
        let set: Vec<usize> = (0..n).filter(|&a| mask >> a & 1 == 1).collect();
        BrElement::new(group.clone(), &set, g).expect("mask contains 1 and g")
    };
    let (a, b, c) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
    let mul = |x: &BrElement, y: &BrElement| br_mul(x, y).expect("same group");
    ensure(mul(&mul(&a, &b), &c) == mul(&a, &mul(&b, &c)), || "product not associative".into())?;
    let a_star = a.inverse();
    ensure(
        mul(&mul(&a, &a_star), &a) == a && mul(&mul(&a_star, &a), &a_star) == a_star,
        || "inverse formula fails".into(),
    )?;
    let (e, f) = (mul(&a, &a_star), mul(&b, &b.inverse()));
    ensure(e.is_idempotent() && mul(&e, &f) == mul(&f, &e), || "idempotents do not commute".into())?;
    if n <= 6 {
        let count = br_enumerate(&group).map_err(|e| e.to_string())?.len();
        ensure(count as u128 == br_expected_count(n), || format!("{count} elements for order {n}"))?;
        let report = br_verify_inverse_monoid(&group, 6, Execution::Sequential).map_err(|e| e.to_string())?;
        ensure(report.all_pass(), || report.violations.join("; "))?;
    }
    Ok(())
}

fn check_groupoid(seed: u64) -> Result<(), String> {
    let pa = any_instance(seed);
    let report = groupoid_build(&pa).verify();
    ensure(report.all_pass(), || format!("groupoid axioms fail: {report:?}"))?;
    ensure(report.components == report.orbits, || "components differ from orbits".into())?;
    ensure(report.trivial_isotropy == pa.is_free(), || "isotropy does not match freeness".into())
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub number: usize,
    pub suite: Suite,
    pub instances: usize,
    pub failures: usize,
    /// First few failures as `(seed, message)`.
    pub examples: Vec<(u64, String)>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn run_suite(suite: Suite, instances: usize, base_seed: u64, exec: Execution) -> SuiteOutcome {
    let results = batch::map_range(exec, 0..instances, |i| {
        let seed = instance_seed(base_seed, suite, i);
        (seed, suite.check(seed))
    });
    let failed: Vec<(u64, String)> = results
        .into_iter()
        .filter_map(|(seed, r)| r.err().map(|e| (seed, e)))
        .collect();
    SuiteOutcome {
        number: suite.number(),
        suite,
        instances,
        failures: failed.len(),
        examples: failed.into_iter().take(3).collect(),
    }
}

pub fn run_all(instances: usize, base_seed: u64, exec: Execution) -> Vec<SuiteOutcome> {
    Suite::ALL
        .iter()
        .map(|&suite| run_suite(suite, instances, base_seed, exec))
        .collect()
}
