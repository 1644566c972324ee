//! Named example actions and seeded random instances.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::{GlobalAction, Induced, PartialAction, PointSet};
use crate::group::FiniteGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?} (expected bernoulli, subgroup-restriction, trivial, random-free or random-any)")]
    UnknownFixture(String),
    #[error("bad fixture parameters: {0}")]
    BadParams(String),
}

pub const FIXTURE_NAMES: [&str; 5] = ["bernoulli", "subgroup-restriction", "trivial", "random-free", "random-any"];

/// Z/2 on two points with `X_a` empty.
pub fn f1() -> PartialAction {
    PartialAction::new(FiniteGroup::cyclic(2), 2, vec![vec![(0, 0), (1, 1)], vec![]]).expect("static fixture")
}

/// The partial Bernoulli action of Z/2.
pub fn f2() -> PartialAction {
    bernoulli(&FiniteGroup::cyclic(2))
}

/// Left multiplication of Z/4 restricted to `U = {0, 2}`; local points
/// 0 and 1 are the elements 0 and 2.
pub fn f3() -> PartialAction {
    subgroup_restriction(&FiniteGroup::cyclic(4), &[0, 2])
        .expect("{0,2} is a subgroup of Z/4")
        .action
}

/// Shift action of `G` on `{0,1}^G`, `(g.w)(h) = w(g^-1 h)`. A point `w`
/// is encoded as the integer whose bit `i` is `w(i)`, with elements
/// enumerated by index (identity first).
pub fn bernoulli_shift(group: &FiniteGroup) -> GlobalAction {
    let n = group.order();
    assert!(n <= 16, "Bernoulli space {{0,1}}^G limited to |G| <= 16");
    let size = 1usize << n;
    let g_arc = Arc::new(group.clone());
    let rule = {
        let group = g_arc.clone();
        move |g: usize, w: usize| {
            let g_inv = group.inv(g);
            (0..n).fold(0, |acc, h| acc | (((w >> group.mul(g_inv, h)) & 1) << h))
        }
    };
    let labels = (0..size)
        .map(|w| {
            let bits: Vec<String> = (0..n).map(|i| ((w >> i) & 1).to_string()).collect();
            format!("({})", bits.join(","))
        })
        .collect();
    GlobalAction::from_fn(g_arc, size, rule)
        .and_then(|u| u.with_labels(labels))
        .expect("shift is an action")
}

/// The Bernoulli shift restricted to `Omega_1 = {w : w(1) = 1}`, so that
/// `D_g = {w : w(1) = 1 = w(g)}`.
pub fn bernoulli(group: &FiniteGroup) -> PartialAction {
    let shift = bernoulli_shift(group);
    let omega: PointSet = (0..shift.space_size()).filter(|w| w & 1 == 1).collect();
    shift.induce(&omega).expect("Omega_1 is nonempty").action
}

/// Left multiplication restricted to a subgroup `U`, with `D_g = U ∩ gU`.
pub fn subgroup_restriction(group: &FiniteGroup, subgroup: &[usize]) -> Result<Induced, FixtureError> {
    let u = group
        .subgroup(subgroup)
        .map_err(|e| FixtureError::BadParams(e.to_string()))?;
    let regular = GlobalAction::regular(group.clone());
    regular
        .induce(&u.elements().iter().copied().collect())
        .map_err(|e| FixtureError::BadParams(e.to_string()))
}

/// The trivial group acting on `m` points.
pub fn trivial(m: usize) -> PartialAction {
    PartialAction::new(FiniteGroup::trivial(), m, vec![(0..m).map(|x| (x, x)).collect()]).expect("m > 0")
}

/// Groups of order at most 8 used for random instances.
pub fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    let mut out: Vec<(&'static str, FiniteGroup)> = vec![
        ("Z1", FiniteGroup::cyclic(1)),
        ("Z2", FiniteGroup::cyclic(2)),
        ("Z3", FiniteGroup::cyclic(3)),
        ("Z4", FiniteGroup::cyclic(4)),
        ("Z5", FiniteGroup::cyclic(5)),
        ("Z6", FiniteGroup::cyclic(6)),
        ("Z7", FiniteGroup::cyclic(7)),
        ("Z8", FiniteGroup::cyclic(8)),
    ];
    for name in ["V4", "S3", "D4", "Q8", "Z2xZ4", "Z2xZ2xZ2"] {
        out.push((name, FiniteGroup::by_name(name).expect("catalog name")));
    }
    out
}

/// A random global action together with the partial action it induces on a
/// random subset.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub group_name: &'static str,
    pub global: GlobalAction,
    pub induced: Induced,
}

impl RandomInstance {
    pub fn action(&self) -> &PartialAction {
        &self.induced.action
    }
}

/// Size limits for random instances.
#[derive(Debug, Clone, Copy)]
pub struct InstanceLimits {
    pub max_ambient: usize,
    pub max_points: usize,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_ambient: 24,
            max_points: 16,
        }
    }
}

/// Disjoint union of coset spaces `G/K`, randomly relabelled. With
/// `free = true` every `K` is trivial, so the action is free.
pub fn random_global(group: &FiniteGroup, rng: &mut impl Rng, max_points: usize, free: bool) -> GlobalAction {
    let subgroups = group.subgroups();
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new(); // cosets per block
    let mut total = 0;
    loop {
        let k = if free {
            group.trivial_subgroup()
        } else {
            subgroups.choose(rng).expect("at least the trivial subgroup").clone()
        };
        let index = group.order() / k.len();
        if total > 0 && (total + index > max_points || rng.gen_bool(0.35)) {
            break;
        }
        let mut assigned = vec![false; group.order()];
        let mut cosets = Vec::new();
        for a in group.elements() {
            if assigned[a] {
                continue;
            }
            let coset: Vec<usize> = k.elements().iter().map(|&h| group.mul(a, h)).collect();
            for &c in &coset {
                assigned[c] = true;
            }
            cosets.push(coset);
        }
        total += cosets.len();
        blocks.push(cosets);
        if total >= max_points {
            break;
        }
    }

    // (block, coset) -> ambient point
    let mut relabel: Vec<usize> = (0..total).collect();
    relabel.shuffle(rng);
    let mut offset = 0;
    let mut perm = vec![vec![0; total]; group.order()];
    for cosets in &blocks {
        let mut coset_index = vec![0; group.order()];
        for (i, coset) in cosets.iter().enumerate() {
            for &c in coset {
                coset_index[c] = i;
            }
        }
        for g in group.elements() {
            for (i, coset) in cosets.iter().enumerate() {
                let j = coset_index[group.mul(g, coset[0])];
                perm[g][relabel[offset + i]] = relabel[offset + j];
            }
        }
        offset += cosets.len();
    }
    GlobalAction::new(group.clone(), total, perm).expect("coset actions form an action")
}

/// A nonempty subset of `0..space` with at most `max` points.
pub fn random_subset(rng: &mut impl Rng, space: usize, max: usize) -> PointSet {
    let mut points: Vec<usize> = (0..space).collect();
    points.shuffle(rng);
    let size = rng.gen_range(1..=max.min(space).max(1));
    points.into_iter().take(size).collect()
}

/// A possibly empty random subset, each point kept with probability 1/2.
pub fn random_any_subset(rng: &mut impl Rng, space: usize) -> PointSet {
    (0..space).filter(|_| rng.gen_bool(0.5)).collect()
}

pub fn random_instance(seed: u64, free: bool, limits: InstanceLimits) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = small_groups();
    let (group_name, group) = groups.choose(&mut rng).expect("catalog is nonempty").clone();
    let global = random_global(&group, &mut rng, limits.max_ambient, free);
    let subset = random_subset(&mut rng, global.space_size(), limits.max_points);
    let induced = global.induce(&subset).expect("subset is nonempty");
    RandomInstance {
        group_name,
        global,
        induced,
    }
}

/// Changes exactly one graph entry of `pa`: retargets, removes or adds a
/// pair in the graph of one element.
pub fn mutate(pa: &PartialAction, rng: &mut impl Rng) -> PartialAction {
    let mut graphs = pa.graphs().to_vec();
    let m = pa.space_size();
    let g = rng.gen_range(0..graphs.len());
    let graph = &mut graphs[g];
    match rng.gen_range(0..3) {
        0 if !graph.is_empty() => {
            let i = rng.gen_range(0..graph.len());
            let old = graph[i].1;
            graph[i].1 = if m > 1 { (old + rng.gen_range(1..m)) % m } else { old };
        }
        1 if !graph.is_empty() => {
            let i = rng.gen_range(0..graph.len());
            graph.remove(i);
        }
        _ => {
            let x = rng.gen_range(0..m);
            let y = rng.gen_range(0..m);
            graph.push((x, y));
        }
    }
    PartialAction::new(pa.group_arc().clone(), m, graphs).expect("mutation keeps indices in range")
}

/// Parameters for [`gen_fixture`].
#[derive(Debug, Clone, Default)]
pub struct FixtureParams {
    pub group: Option<FiniteGroup>,
    pub subset: Option<Vec<usize>>,
    pub size: Option<usize>,
    pub seed: u64,
}

pub fn gen_fixture(name: &str, params: &FixtureParams) -> Result<PartialAction, FixtureError> {
    let need_group = || {
        params
            .group
            .clone()
            .ok_or_else(|| FixtureError::BadParams(format!("fixture {name} needs a group")))
    };
    match name {
        "bernoulli" => {
            let group = need_group()?;
            if group.order() > 8 {
                return Err(FixtureError::BadParams("bernoulli supports |G| <= 8".into()));
            }
            Ok(bernoulli(&group))
        }
        "subgroup-restriction" => {
            let group = need_group()?;
            let subset = params
                .subset
                .clone()
                .ok_or_else(|| FixtureError::BadParams("subgroup-restriction needs a subset".into()))?;
            Ok(subgroup_restriction(&group, &subset)?.action)
        }
        "trivial" => match params.size {
            Some(m) if m > 0 => Ok(trivial(m)),
            _ => Err(FixtureError::BadParams("trivial needs a positive size".into())),
        },
        "random-free" | "random-any" => {
            let free = name == "random-free";
            let limits = InstanceLimits {
                max_points: params.size.unwrap_or(16).max(1),
                ..InstanceLimits::default()
            };
            match &params.group {
                None => Ok(random_instance(params.seed, free, limits).induced.action),
                Some(group) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                    let global = random_global(group, &mut rng, limits.max_ambient, free);
                    let subset = random_subset(&mut rng, global.space_size(), limits.max_points);
                    Ok(global.induce(&subset).expect("nonempty subset").action)
                }
            }
        }
        other => Err(FixtureError::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_z2_matches_f2() {
        let f2 = f2();
        assert_eq!(f2.space_size(), 2);
        assert_eq!(f2.labels().unwrap(), &["(1,0)".to_string(), "(1,1)".to_string()]);
        // D_a = {(1,1)} and a fixes it
        assert_eq!(f2.graph(1), &[(1, 1)]);
        assert!(f2.validate().is_valid());
    }

    #[test]
    fn bernoulli_domains_are_pairs_of_ones() {
        let g = FiniteGroup::cyclic(3);
        let pa = bernoulli(&g);
        let shift = bernoulli_shift(&g);
        let ambient: Vec<usize> = (0..shift.space_size()).filter(|w| w & 1 == 1).collect();
        for h in g.elements() {
            let expected: PointSet = (0..pa.space_size())
                .filter(|&i| (ambient[i] >> h) & 1 == 1)
                .collect();
            assert_eq!(pa.range_of(h), expected);
        }
    }

    #[test]
    fn subgroup_restriction_rejects_non_subgroups() {
        let z4 = FiniteGroup::cyclic(4);
        assert!(matches!(subgroup_restriction(&z4, &[0, 1]), Err(FixtureError::BadParams(_))));
        let f3 = f3();
        assert_eq!(f3.labels().unwrap(), &["0".to_string(), "2".to_string()]);
    }

    #[test]
    fn random_instances_are_valid_and_deterministic() {
        for seed in 0..50 {
            let a = random_instance(seed, seed % 2 == 0, InstanceLimits::default());
            let b = random_instance(seed, seed % 2 == 0, InstanceLimits::default());
            assert_eq!(a.action(), b.action());
            assert!(a.action().space_size() <= 16);
            assert!(a.action().validate().is_valid());
            if seed % 2 == 0 {
                assert!(a.action().is_free());
            }
        }
    }

    #[test]
    fn gen_fixture_names() {
        let z2 = FiniteGroup::cyclic(2);
        let params = FixtureParams {
            group: Some(z2),
            ..Default::default()
        };
        assert_eq!(gen_fixture("bernoulli", &params).unwrap(), f2());
        assert_eq!(
            gen_fixture("trivial", &FixtureParams { size: Some(5), ..Default::default() }).unwrap(),
            trivial(5)
        );
        assert!(matches!(gen_fixture("nope", &params), Err(FixtureError::UnknownFixture(_))));
        assert!(matches!(gen_fixture("trivial", &params), Err(FixtureError::BadParams(_))));
    }
}
