//! Descending chains of normal subgroups, the inverse systems of orbit
//! quotients along them, and section descent down a chain.

use thiserror::Error;

use crate::action::PartialAction;
use crate::globalization::{lift_section_traced, GlobalizationError, LiftStep};
use crate::group::{FiniteGroup, Subgroup};
use crate::orbits::{full_quotient, orbit_quotient, verify_section, OrbitError, OrbitQuotient, Section};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("chain is empty")]
    EmptyChain,
    #[error("chain must start at the whole group")]
    FirstNotWhole,
    #[error("chain must end at the trivial subgroup")]
    LastNotTrivial,
    #[error("term {index} of the chain is not normal in G")]
    NotNormal { index: usize },
    #[error("term {index} is not a proper subgroup of term {}", index - 1)]
    NotStrictlyDecreasing { index: usize },
    #[error("the partial action is not free")]
    NotFree,
    #[error("descent step {step} broke the order on sections")]
    OrderViolated { step: usize },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Lift(#[from] GlobalizationError),
}

/// `G = N_0 ⊋ N_1 ⊋ ... ⊋ N_k = {1}` with every `N_i` normal in `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalChain {
    terms: Vec<Subgroup>,
}

impl NormalChain {
    pub fn new(group: &FiniteGroup, terms: Vec<Subgroup>) -> Result<Self, TowerError> {
        let first = terms.first().ok_or(TowerError::EmptyChain)?;
        if first != &group.whole() {
            return Err(TowerError::FirstNotWhole);
        }
        if !terms.last().expect("nonempty").is_trivial() {
            return Err(TowerError::LastNotTrivial);
        }
        for (index, term) in terms.iter().enumerate() {
            if term.parent_order() != group.order() || !group.is_normal(term) {
                return Err(TowerError::NotNormal { index });
            }
            if index > 0 {
                let prev = &terms[index - 1];
                if !term.is_subset_of(prev) || term.len() == prev.len() {
                    return Err(TowerError::NotStrictlyDecreasing { index });
                }
            }
        }
        Ok(Self { terms })
    }

    /// Parses `"0,1,2,3;0,2;0"` style chains: terms separated by `;`,
    /// elements by `,`.
    pub fn parse(group: &FiniteGroup, text: &str) -> Result<Self, ChainParseError> {
        let mut terms = Vec::new();
        for part in text.split(';') {
            let elements = part
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| ChainParseError::BadElement(s.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            terms.push(group.subgroup(&elements).map_err(|e| ChainParseError::Group(e.to_string()))?);
        }
        Ok(Self::new(group, terms)?)
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainParseError {
    #[error("bad chain element {0:?}")]
    BadElement(String),
    #[error("bad chain term: {0}")]
    Group(String),
    #[error(transparent)]
    Chain(#[from] TowerError),
}

/// Descends from `G` by repeatedly taking a maximal proper normal subgroup
/// of `G` inside the current term, preferring the lexicographically least
/// element list among maximal candidates.
pub fn build_chain(group: &FiniteGroup) -> NormalChain {
    let normal = group.normal_subgroups();
    let mut terms = vec![group.whole()];
    loop {
        let current = terms.last().expect("nonempty");
        if current.is_trivial() {
            break;
        }
        let proper: Vec<&Subgroup> = normal
            .iter()
            .filter(|s| s.is_subset_of(current) && s.len() < current.len())
            .collect();
        let next = proper
            .iter()
            .filter(|s| !proper.iter().any(|t| s.len() < t.len() && s.is_subset_of(t)))
            .min_by(|a, b| a.elements().cmp(b.elements()))
            .expect("the trivial subgroup is a candidate");
        terms.push((*next).clone());
    }
    NormalChain { terms }
}

/// Orbit quotients along a chain with their bonding maps.
#[derive(Debug, Clone)]
pub struct TowerQuotients {
    pub levels: Vec<OrbitQuotient>,
    /// `bonds[i] = pi_{N_{i+1}, N_i}`
    pub bonds: Vec<Vec<usize>>,
}

impl TowerQuotients {
    pub fn build(pa: &PartialAction, chain: &NormalChain) -> Result<Self, TowerError> {
        let levels = chain
            .terms()
            .iter()
            .map(|n| orbit_quotient(pa, n))
            .collect::<Result<Vec<_>, _>>()?;
        let bonds = levels
            .windows(2)
            .map(|w| w[1].connect_to(&w[0]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { levels, bonds })
    }

    /// Composite bond from level `j` down to level `i <= j`.
    pub fn bond_between(&self, i: usize, j: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.levels[j].len()).collect();
        for level in (i..j).rev() {
            map = map.iter().map(|&c| self.bonds[level][c]).collect();
        }
        map
    }

    /// Composites of bonds agree with the direct connecting maps.
    pub fn bonds_compose(&self) -> bool {
        (0..self.levels.len()).all(|i| {
            (i..self.levels.len())
                .all(|j| self.levels[j].connect_to(&self.levels[i]).is_ok_and(|d| d == self.bond_between(i, j)))
        })
    }
}

/// Compatible families `(c_i, ..., c_j)` of the window `i..=j`.
fn compatible_families(tq: &TowerQuotients, i: usize, j: usize) -> Vec<Vec<usize>> {
    let mut families: Vec<Vec<usize>> = (0..tq.levels[i].len()).map(|c| vec![c]).collect();
    for level in i + 1..=j {
        families = families
            .into_iter()
            .flat_map(|fam| {
                let last = *fam.last().expect("nonempty family");
                (0..tq.levels[level].len())
                    .filter(move |&d| tq.bonds[level - 1][d] == last)
                    .map(move |d| {
                        let mut next = fam.clone();
                        next.push(d);
                        next
                    })
            })
            .collect();
    }
    families
}

/// For every window `N_i ⊇ ... ⊇ N_j` of the chain, checks that
/// `X -> lim X/~_{N_l}` has image projecting onto every level and that the
/// induced map from `X/~_{N_j}` to the limit is a bijection.
pub fn inverse_limit_check(tq: &TowerQuotients) -> bool {
    let points = tq.levels.first().map_or(0, |l| l.class_map().len());
    for i in 0..tq.levels.len() {
        for j in i..tq.levels.len() {
            let mut families = compatible_families(tq, i, j);
            families.sort();
            let e = |x: usize| -> Vec<usize> { (i..=j).map(|l| tq.levels[l].class_of(x)).collect() };
            let e_image: std::collections::BTreeSet<Vec<usize>> = (0..points).map(e).collect();

            for (offset, level) in (i..=j).enumerate() {
                let projected: std::collections::BTreeSet<usize> = e_image.iter().map(|f| f[offset]).collect();
                if projected.len() != tq.levels[level].len() {
                    return false;
                }
            }

            let finest = &tq.levels[j];
            let mut bar_e = Vec::with_capacity(finest.len());
            for members in finest.classes() {
                let value = e(members[0]);
                if members.iter().any(|&x| e(x) != value) {
                    return false;
                }
                bar_e.push(value);
            }
            let distinct: std::collections::BTreeSet<&Vec<usize>> = bar_e.iter().collect();
            let onto = bar_e.iter().all(|f| families.binary_search(f).is_ok());
            if distinct.len() != bar_e.len() || bar_e.len() != families.len() || !onto {
                return false;
            }
        }
    }
    true
}

/// `(N, r) <= (N', r')` iff `N' ⊆ N` and `pi_{N',N} ∘ r' = r`, where `r`
/// and `r'` are sections of `pi_{N,G}` and `pi_{N',G}`.
pub fn compatibility_check(pa: &PartialAction, n: &Subgroup, r: &Section, n_prime: &Subgroup, r_prime: &Section) -> bool {
    let whole = pa.group().whole();
    let shaped = |s: &Section, sub: &Subgroup| s.from.subgroup() == &whole && s.to.subgroup() == sub;
    if !n_prime.is_subset_of(n) || !shaped(r, n) || !shaped(r_prime, n_prime) {
        return false;
    }
    if !verify_section(pa, r) || !verify_section(pa, r_prime) {
        return false;
    }
    let Ok(bond) = r_prime.to.connect_to(&r.to) else {
        return false;
    };
    r_prime
        .choice
        .iter()
        .zip(&r.choice)
        .all(|(&finer, &coarser)| bond[finer] == coarser)
}

#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub subgroup: Subgroup,
    /// Section of `pi_{N_i, G}`.
    pub section: Section,
}

#[derive(Debug, Clone)]
pub struct TowerSection {
    pub levels: Vec<TowerLevel>,
    pub steps: Vec<LiftStep>,
}

impl TowerSection {
    /// The final section of `pi_G = pi_{{1}, G}`.
    pub fn section(&self) -> &Section {
        &self.levels.last().expect("at least the top level").section
    }
}

/// Starts from the identity section of `pi_{G,G}` and lifts through each
/// consecutive pair of the chain.
pub fn tower_section(pa: &PartialAction, chain: &NormalChain) -> Result<TowerSection, TowerError> {
    if !pa.is_free() {
        return Err(TowerError::NotFree);
    }
    let top = chain.terms()[0].clone();
    let mut levels = vec![TowerLevel {
        subgroup: top,
        section: Section::identity(full_quotient(pa)?),
    }];
    let mut steps = Vec::new();
    for (step, pair) in chain.terms().windows(2).enumerate() {
        let current = &levels.last().expect("nonempty").section;
        let lift = lift_section_traced(pa, &pair[0], &pair[1], current)?;
        if !compatibility_check(pa, &pair[0], current, &pair[1], &lift.lifted) {
            return Err(TowerError::OrderViolated { step });
        }
        levels.push(TowerLevel {
            subgroup: pair[1].clone(),
            section: lift.lifted.clone(),
        });
        steps.push(lift);
    }
    Ok(TowerSection { levels, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orbits::section_finite;
    use crate::GlobalAction;

    fn elements(chain: &NormalChain) -> Vec<Vec<usize>> {
        chain.terms().iter().map(|s| s.elements().to_vec()).collect()
    }

    #[test]
    fn chains_of_small_groups() {
        assert_eq!(
            elements(&build_chain(&FiniteGroup::cyclic(4))),
            vec![vec![0, 1, 2, 3], vec![0, 2], vec![0]]
        );
        assert_eq!(elements(&build_chain(&FiniteGroup::cyclic(2))), vec![vec![0, 1], vec![0]]);
        let s3 = build_chain(&FiniteGroup::symmetric(3));
        assert_eq!(s3.len(), 3);
        assert_eq!(s3.terms()[1].len(), 3);
        assert_eq!(elements(&build_chain(&FiniteGroup::trivial())), vec![vec![0]]);
    }

    #[test]
    fn chain_validation() {
        let z4 = FiniteGroup::cyclic(4);
        assert!(NormalChain::parse(&z4, "0,1,2,3;0,2;0").is_ok());
        assert!(NormalChain::parse(&z4, "0,1,2,3;0").is_ok());
        assert!(matches!(
            NormalChain::parse(&z4, "0,2;0"),
            Err(ChainParseError::Chain(TowerError::FirstNotWhole))
        ));
        assert!(matches!(
            NormalChain::parse(&z4, "0,1,2,3;0,2"),
            Err(ChainParseError::Chain(TowerError::LastNotTrivial))
        ));
        assert!(matches!(
            NormalChain::parse(&z4, "0,1,2,3;0,1,2,3;0"),
            Err(ChainParseError::Chain(TowerError::NotStrictlyDecreasing { index: 1 }))
        ));
        let s3 = FiniteGroup::symmetric(3);
        let two = s3.subgroups().into_iter().find(|s| s.len() == 2).unwrap();
        assert!(matches!(
            NormalChain::new(&s3, vec![s3.whole(), two, s3.trivial_subgroup()]),
            Err(TowerError::NotNormal { index: 1 })
        ));
        assert!(NormalChain::parse(&z4, "0,x").is_err());
    }

    #[test]
    fn tower_quotients_of_f3() {
        let f3 = fixtures::f3();
        let chain = build_chain(f3.group());
        let tq = TowerQuotients::build(&f3, &chain).unwrap();
        assert_eq!(tq.levels.iter().map(OrbitQuotient::len).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(tq.bonds_compose());
        assert!(inverse_limit_check(&tq));
    }

    #[test]
    fn single_level_limit_is_x() {
        let pa = fixtures::f2();
        let chain = NormalChain::parse(pa.group(), "0,1;0").unwrap();
        let tq = TowerQuotients::build(&pa, &chain).unwrap();
        assert!(inverse_limit_check(&tq));
    }

    #[test]
    fn f3_tower_section() {
        let f3 = fixtures::f3();
        let chain = build_chain(f3.group());
        let tower = tower_section(&f3, &chain).unwrap();
        assert_eq!(tower.levels.len(), 3);
        assert!(verify_section(&f3, tower.section()));
        assert_eq!(tower.section().chosen_points(), vec![0]);
        for i in 0..tower.levels.len() {
            for j in i..tower.levels.len() {
                let (a, b) = (&tower.levels[i], &tower.levels[j]);
                assert!(compatibility_check(&f3, &a.subgroup, &a.section, &b.subgroup, &b.section));
            }
        }
    }

    #[test]
    fn trivial_group_tower_is_identity() {
        let pa = fixtures::trivial(4);
        let chain = build_chain(pa.group());
        let tower = tower_section(&pa, &chain).unwrap();
        assert_eq!(tower.section().choice, vec![0, 1, 2, 3]);
    }

    #[test]
    fn free_z2_on_four_points_agrees_with_finite_section() {
        // two regular orbits {0,1} and {2,3}
        let u = GlobalAction::from_fn(FiniteGroup::cyclic(2), 4, |g, x| x ^ g).unwrap();
        let pa = u.as_partial_action();
        let chain = build_chain(pa.group());
        let tower = tower_section(&pa, &chain).unwrap();
        let finite = section_finite(&pa).unwrap();
        assert_eq!(tower.section().choice.len(), 2);
        assert_eq!(tower.section().from, finite.from);
        assert!(verify_section(&pa, tower.section()));
    }

    #[test]
    fn compatibility_detects_disagreement() {
        // Z/4 acting regularly on two copies of itself.
        let u = GlobalAction::from_fn(FiniteGroup::cyclic(4), 8, |g, x| (x / 4) * 4 + (x % 4 + g) % 4).unwrap();
        let pa = u.as_partial_action();
        let g = pa.group();
        let n = g.subgroup(&[0, 2]).unwrap();
        let top = full_quotient(&pa).unwrap();
        let n_q = orbit_quotient(&pa, &n).unwrap();
        // N-classes: {0,2},{1,3},{4,6},{5,7}; r chooses {0,2} and {4,6}
        let r = Section {
            from: top.clone(),
            to: n_q.clone(),
            choice: vec![0, 2],
        };
        assert!(verify_section(&pa, &r));
        let trivial = g.trivial_subgroup();
        let agree = Section {
            from: top.clone(),
            to: orbit_quotient(&pa, &trivial).unwrap(),
            choice: vec![2, 4],
        };
        let disagree = Section {
            choice: vec![1, 4],
            ..agree.clone()
        };
        assert!(verify_section(&pa, &disagree));
        assert!(compatibility_check(&pa, &n, &r, &trivial, &agree));
        assert!(!compatibility_check(&pa, &n, &r, &trivial, &disagree));
        assert!(compatibility_check(&pa, &n, &r, &n, &r));
    }

    #[test]
    fn non_free_tower_is_refused() {
        let f2 = fixtures::f2();
        let chain = build_chain(f2.group());
        assert_eq!(tower_section(&f2, &chain).unwrap_err(), TowerError::NotFree);
    }
}
