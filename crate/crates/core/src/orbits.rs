//! Orbit quotients `X/~_H`, connecting maps between them, invariant
//! separators and sections of the quotient map.

use thiserror::Error;

use crate::action::{PartialAction, PointSet};
use crate::group::{GroupError, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("subgroup belongs to a group of order {subgroup_parent}, action group has order {group}")]
    ForeignSubgroup { subgroup_parent: usize, group: usize },
    #[error("subgroup {inner:?} is not contained in {outer:?}")]
    NotNested { inner: Vec<usize>, outer: Vec<usize> },
    #[error("orbits overlap at point {point}; the input is not a partial action")]
    NotAPartition { point: usize },
    #[error("class {class} of the finer quotient meets several coarser classes")]
    IllDefinedConnectingMap { class: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SectionError {
    #[error("the partial action is not free")]
    NotFree,
    #[error("quotient map is not injective on the neighbourhood of point {point}")]
    NotLocallyInjective { point: usize },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// The partition of `X` into `H`-orbits. Classes are sorted and numbered by
/// their least point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitQuotient {
    subgroup: Subgroup,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl OrbitQuotient {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> &[usize] {
        &self.classes[index]
    }

    /// `pi_H` as an index map.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class_map(&self) -> &[usize] {
        &self.class_of
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    /// `pi_{H1,H2}` from this (finer) quotient to a coarser one.
    pub fn connect_to(&self, coarser: &OrbitQuotient) -> Result<Vec<usize>, OrbitError> {
        if !self.subgroup.is_subset_of(&coarser.subgroup) {
            return Err(OrbitError::NotNested {
                inner: self.subgroup.elements().to_vec(),
                outer: coarser.subgroup.elements().to_vec(),
            });
        }
        self.classes
            .iter()
            .enumerate()
            .map(|(class, members)| {
                let image = coarser.class_of[members[0]];
                if members.iter().all(|&x| coarser.class_of[x] == image) {
                    Ok(image)
                } else {
                    Err(OrbitError::IllDefinedConnectingMap { class })
                }
            })
            .collect()
    }

    /// `pi_H^{-1}(pi_H(A))`
    pub fn preimage_of_image(&self, subset: &PointSet) -> PointSet {
        let hit: std::collections::BTreeSet<usize> = subset.iter().map(|&x| self.class_of[x]).collect();
        hit.into_iter().flat_map(|c| self.classes[c].iter().copied()).collect()
    }
}

/// `X/~_H`, with `x ~_H y` iff `h.x = y` for some `h ∈ H` defined at `x`.
pub fn orbit_quotient(pa: &PartialAction, subgroup: &Subgroup) -> Result<OrbitQuotient, OrbitError> {
    if subgroup.parent_order() != pa.group().order() {
        return Err(OrbitError::ForeignSubgroup {
            subgroup_parent: subgroup.parent_order(),
            group: pa.group().order(),
        });
    }
    let m = pa.space_size();
    let mut class_of = vec![usize::MAX; m];
    let mut classes = Vec::new();
    for x in 0..m {
        if class_of[x] != usize::MAX {
            continue;
        }
        // One step suffices: H^x . x is already closed for a partial action.
        let mut members: Vec<usize> = subgroup
            .elements()
            .iter()
            .filter_map(|&h| pa.act(h, x))
            .collect();
        members.sort_unstable();
        members.dedup();
        for &y in &members {
            if class_of[y] != usize::MAX {
                return Err(OrbitError::NotAPartition { point: y });
            }
            class_of[y] = classes.len();
        }
        if class_of[x] != classes.len() {
            return Err(OrbitError::NotAPartition { point: x });
        }
        classes.push(members);
    }
    Ok(OrbitQuotient {
        subgroup: subgroup.clone(),
        classes,
        class_of,
    })
}

/// `X/~_G`
pub fn full_quotient(pa: &PartialAction) -> Result<OrbitQuotient, OrbitError> {
    orbit_quotient(pa, &pa.group().whole())
}

/// `X/~_{1}`: every class a singleton, class index = point.
pub fn trivial_quotient(pa: &PartialAction) -> OrbitQuotient {
    let m = pa.space_size();
    OrbitQuotient {
        subgroup: pa.group().trivial_subgroup(),
        classes: (0..m).map(|x| vec![x]).collect(),
        class_of: (0..m).collect(),
    }
}

pub fn connecting_map(pa: &PartialAction, finer: &Subgroup, coarser: &Subgroup) -> Result<Vec<usize>, OrbitError> {
    if !finer.is_subset_of(coarser) {
        return Err(OrbitError::NotNested {
            inner: finer.elements().to_vec(),
            outer: coarser.elements().to_vec(),
        });
    }
    orbit_quotient(pa, finer)?.connect_to(&orbit_quotient(pa, coarser)?)
}

/// A `G`-invariant set with invariant complement containing `x` but not
/// `y`, or `None` when `x ~_G y`.
pub fn invariant_separator(pa: &PartialAction, x: usize, y: usize) -> Option<PointSet> {
    let orbit = pa.saturate(&PointSet::from([x]));
    if orbit.contains(&y) {
        None
    } else {
        Some(orbit)
    }
}

/// A section of `pi_{H1,H2}: X/~_{H1} -> X/~_{H2}` with `H1 ⊆ H2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    /// `X/~_{H2}`
    pub from: OrbitQuotient,
    /// `X/~_{H1}`
    pub to: OrbitQuotient,
    /// class of `from` -> class of `to`
    pub choice: Vec<usize>,
}

impl Section {
    pub fn identity(quotient: OrbitQuotient) -> Self {
        Section {
            choice: (0..quotient.len()).collect(),
            to: quotient.clone(),
            from: quotient,
        }
    }

    /// Least point of each chosen class; for sections of `pi_G` these are
    /// the chosen orbit representatives.
    pub fn chosen_points(&self) -> Vec<usize> {
        self.choice.iter().map(|&c| self.to.representative(c)).collect()
    }

    /// `self` after `inner`, where `inner: X/~_{H3} -> X/~_{H2}` lands in
    /// this section's domain.
    pub fn after(&self, inner: &Section) -> Option<Section> {
        if inner.to != self.from {
            return None;
        }
        Some(Section {
            from: inner.from.clone(),
            to: self.to.clone(),
            choice: inner.choice.iter().map(|&c| self.choice[c]).collect(),
        })
    }
}

/// Checks the section identity `pi_{H1,H2} ∘ choice = id`, and that both
/// quotients really are the orbit quotients of `pa`.
pub fn verify_section(pa: &PartialAction, section: &Section) -> bool {
    let rebuilt = |q: &OrbitQuotient| orbit_quotient(pa, q.subgroup()).is_ok_and(|r| &r == q);
    if !rebuilt(&section.from) || !rebuilt(&section.to) {
        return false;
    }
    let Ok(bond) = section.to.connect_to(&section.from) else {
        return false;
    };
    section.choice.len() == section.from.len()
        && section
            .choice
            .iter()
            .enumerate()
            .all(|(c, &chosen)| bond.get(chosen) == Some(&c))
}

/// Intermediate data of the finite section construction.
#[derive(Debug, Clone)]
pub struct FiniteSectionTrace {
    pub section: Section,
    /// `V_x` for every base point `x`, in point order.
    pub neighbourhoods: Vec<PointSet>,
    /// `pi_G(V_x)` as class sets, in point order.
    pub cover: Vec<Vec<usize>>,
    /// The disjoint refinement `W_j`, each with the base point it came from.
    pub refinement: Vec<(usize, Vec<usize>)>,
}

/// Section of `pi_G` for a free partial action, built from local inverses
/// on the neighbourhoods `V_x = ∩_{g ∈ G^x} eta_g^{-1}(U_g ∩ X_g)` with
/// `U_g = {eta_g(x)}`.
pub fn section_finite(pa: &PartialAction) -> Result<Section, SectionError> {
    section_finite_traced(pa).map(|t| t.section)
}

pub fn section_finite_traced(pa: &PartialAction) -> Result<FiniteSectionTrace, SectionError> {
    if !pa.is_free() {
        return Err(SectionError::NotFree);
    }
    let quotient = full_quotient(pa)?;
    let points = trivial_quotient(pa);

    let mut neighbourhoods = Vec::with_capacity(pa.space_size());
    let mut cover = Vec::with_capacity(pa.space_size());
    let mut refinement = Vec::new();
    let mut choice = vec![usize::MAX; quotient.len()];
    let mut covered = vec![false; quotient.len()];

    for x in pa.points() {
        // (g, U_g) with the U_g pairwise disjoint, by freeness.
        let clopens: Vec<(usize, usize)> = pa
            .defined_at(x)
            .into_iter()
            .map(|g| (g, pa.act(g, x).expect("g defined at x")))
            .collect();
        debug_assert!({
            let targets: PointSet = clopens.iter().map(|&(_, y)| y).collect();
            targets.len() == clopens.len()
        });

        let neighbourhood: PointSet = pa
            .points()
            .filter(|&z| clopens.iter().all(|&(g, target)| pa.act(g, z) == Some(target)))
            .collect();

        let mut local_inverse: Vec<(usize, usize)> =
            neighbourhood.iter().map(|&z| (quotient.class_of(z), z)).collect();
        local_inverse.sort_unstable();
        if local_inverse.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(SectionError::NotLocallyInjective { point: x });
        }

        let image: Vec<usize> = local_inverse.iter().map(|&(c, _)| c).collect();
        let mut fresh = Vec::new();
        for &(c, z) in local_inverse.iter().filter(|&&(c, _)| !covered[c]) {
            fresh.push(c);
            choice[c] = z;
        }
        for &c in &fresh {
            covered[c] = true;
        }
        if !fresh.is_empty() {
            refinement.push((x, fresh));
        }
        neighbourhoods.push(neighbourhood);
        cover.push(image);
    }

    Ok(FiniteSectionTrace {
        section: Section {
            from: quotient,
            to: points,
            choice,
        },
        neighbourhoods,
        cover,
        refinement,
    })
}
