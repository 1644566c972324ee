//! Partial and global actions of finite groups on finite sets.
//!
//! A [`PartialAction`] is stored as one graph `{(x, y)}` per group element,
//! so inputs violating the axioms are still representable; the validator in
//! [`PartialAction::validate`] reports what is wrong with them. Undefined
//! products are `None`, never errors.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{FiniteGroup, GroupError, Restriction, Subgroup};

pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("space must have at least one point")]
    EmptySpace,
    #[error("expected {expected} graphs or permutations (one per group element), got {got}")]
    WrongElementCount { expected: usize, got: usize },
    #[error("graph of element {g} mentions point {point}, outside 0..{space_size}")]
    PointOutOfRange {
        g: usize,
        point: usize,
        space_size: usize,
    },
    #[error("u_{g} is not a permutation of the space")]
    NotAPermutation { g: usize },
    #[error("u_1 is not the identity")]
    IdentityNotTrivial,
    #[error("u_{g} u_{h} != u_{{{g}*{h}}}")]
    NotAHomomorphism { g: usize, h: usize },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("label list has {got} entries for {expected} points")]
    LabelCount { expected: usize, got: usize },
    #[error("partial action axioms violated: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One failed clause of either axiomatization.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    /// The graph of `g` assigns two values to `x`.
    NotAFunction { g: usize, x: usize },
    /// `g.x` is defined but `g^-1.(g.x)` is undefined or differs from `x`.
    Pa1 { g: usize, x: usize },
    /// `g.(h.x)` is defined but `(gh).x` is undefined or differs.
    Pa2 { g: usize, h: usize, x: usize },
    /// `1.x` is undefined or differs from `x`.
    Pa3 { x: usize },
    /// Two points share an image under `eta_g`.
    NotInjective { g: usize, y: usize },
    /// The range of `eta_g` differs from the domain of `eta_{g^-1}`.
    RangeDomainMismatch { g: usize },
    /// `X_1 = X` and `eta_1 = id` fails at `x`.
    IdentityMap { x: usize },
    /// `eta_g(X_{g^-1} ∩ X_h) != X_g ∩ X_{gh}`.
    DomainTransport { g: usize, h: usize },
    /// `eta_g eta_h = eta_{gh}` fails at `x ∈ X_{h^-1} ∩ X_{h^-1 g^-1}`.
    Composition { g: usize, h: usize, x: usize },
}

/// Violations found by the pointwise axioms (PA1-PA3) and, independently,
/// by the family-of-bijections characterization. A valid action has both
/// lists empty; for any input the two lists are empty together.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub pointwise: Vec<Violation>,
    pub family: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.pointwise.is_empty() && self.family.is_empty()
    }

    pub fn pointwise_valid(&self) -> bool {
        self.pointwise.is_empty()
    }

    pub fn family_valid(&self) -> bool {
        self.family.is_empty()
    }

    /// Both axiomatizations reach the same verdict.
    pub fn verdicts_agree(&self) -> bool {
        self.pointwise.is_empty() == self.family.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} pointwise and {} family violations",
            self.pointwise.len(),
            self.family.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAction {
    group: Arc<FiniteGroup>,
    space_size: usize,
    graphs: Vec<Vec<(usize, usize)>>,
    /// `table[g * space_size + x]`, first graph entry wins.
    table: Vec<Option<usize>>,
    labels: Option<Vec<String>>,
}

impl PartialAction {
    /// Builds an action from per-element graphs, checking only index ranges.
    pub fn new(
        group: impl Into<Arc<FiniteGroup>>,
        space_size: usize,
        graphs: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, ActionError> {
        let group = group.into();
        if space_size == 0 {
            return Err(ActionError::EmptySpace);
        }
        if graphs.len() != group.order() {
            return Err(ActionError::WrongElementCount {
                expected: group.order(),
                got: graphs.len(),
            });
        }
        let mut table = vec![None; group.order() * space_size];
        for (g, graph) in graphs.iter().enumerate() {
            for &(x, y) in graph {
                for point in [x, y] {
                    if point >= space_size {
                        return Err(ActionError::PointOutOfRange { g, point, space_size });
                    }
                }
                table[g * space_size + x].get_or_insert(y);
            }
        }
        Ok(Self {
            group,
            space_size,
            graphs,
            table,
            labels: None,
        })
    }

    /// Builds an action from a rule `(g, x) -> Option<g.x>`.
    pub fn from_fn(
        group: impl Into<Arc<FiniteGroup>>,
        space_size: usize,
        rule: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self, ActionError> {
        let group = group.into();
        let graphs = group
            .elements()
            .map(|g| (0..space_size).filter_map(|x| rule(g, x).map(|y| (x, y))).collect())
            .collect();
        Self::new(group, space_size, graphs)
    }

    /// Like [`PartialAction::new`] but also rejects inputs failing the axioms.
    pub fn checked(
        group: impl Into<Arc<FiniteGroup>>,
        space_size: usize,
        graphs: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, ActionError> {
        let pa = Self::new(group, space_size, graphs)?;
        let report = pa.validate();
        if report.is_valid() {
            Ok(pa)
        } else {
            Err(ActionError::Invalid(report))
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ActionError> {
        if labels.len() != self.space_size {
            return Err(ActionError::LabelCount {
                expected: self.space_size,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn graphs(&self) -> &[Vec<(usize, usize)>] {
        &self.graphs
    }

    pub fn graph(&self, g: usize) -> &[(usize, usize)] {
        &self.graphs[g]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.space_size
    }

    /// `g.x`, or `None` when `(g, x)` is outside `G*X`.
    #[inline]
    pub fn act(&self, g: usize, x: usize) -> Option<usize> {
        self.table[g * self.space_size + x]
    }

    /// `X_{g^-1}`, the set where `eta_g` is defined.
    pub fn domain_of(&self, g: usize) -> PointSet {
        self.graphs[g].iter().map(|&(x, _)| x).collect()
    }

    /// `X_g`, the range of `eta_g`.
    pub fn range_of(&self, g: usize) -> PointSet {
        self.graphs[g].iter().map(|&(_, y)| y).collect()
    }

    /// `G^x`: elements defined at `x`.
    pub fn defined_at(&self, x: usize) -> Vec<usize> {
        self.group.elements().filter(|&g| self.act(g, x).is_some()).collect()
    }

    /// The pairs of `G*X` in lexicographic order.
    pub fn domain_pairs(&self) -> Vec<(usize, usize)> {
        self.group
            .elements()
            .flat_map(|g| self.points().filter(move |&x| self.act(g, x).is_some()).map(move |x| (g, x)))
            .collect()
    }

    /// Checks both axiomatizations independently.
    pub fn validate(&self) -> ValidationReport {
        let not_function = self.non_functional_entries();
        let mut pointwise = not_function.clone();
        let mut family = not_function;
        if pointwise.is_empty() {
            pointwise = self.pointwise_violations();
            family = self.family_violations();
        }
        ValidationReport { pointwise, family }
    }

    fn non_functional_entries(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (g, graph) in self.graphs.iter().enumerate() {
            let mut seen = vec![None; self.space_size];
            for &(x, y) in graph {
                match seen[x] {
                    None => seen[x] = Some(y),
                    Some(prev) if prev != y => out.push(Violation::NotAFunction { g, x }),
                    Some(_) => {}
                }
            }
        }
        out.dedup();
        out
    }

    fn pointwise_violations(&self) -> Vec<Violation> {
        let group = &*self.group;
        let mut out = Vec::new();
        for g in group.elements() {
            for x in self.points() {
                if let Some(y) = self.act(g, x) {
                    if self.act(group.inv(g), y) != Some(x) {
                        out.push(Violation::Pa1 { g, x });
                    }
                }
            }
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                for x in self.points() {
                    let Some(hx) = self.act(h, x) else { continue };
                    let Some(ghx) = self.act(g, hx) else { continue };
                    if self.act(gh, x) != Some(ghx) {
                        out.push(Violation::Pa2 { g, h, x });
                    }
                }
            }
        }
        for x in self.points() {
            if self.act(FiniteGroup::IDENTITY, x) != Some(x) {
                out.push(Violation::Pa3 { x });
            }
        }
        out
    }

    fn family_violations(&self) -> Vec<Violation> {
        let group = &*self.group;
        let ranges: Vec<PointSet> = group.elements().map(|g| self.range_of(g)).collect();
        let domains: Vec<PointSet> = group.elements().map(|g| self.domain_of(g)).collect();
        let mut out = Vec::new();

        for g in group.elements() {
            let mut hit = vec![false; self.space_size];
            let pairs: BTreeSet<(usize, usize)> = self.graphs[g].iter().copied().collect();
            for &(_, y) in &pairs {
                if std::mem::replace(&mut hit[y], true) {
                    out.push(Violation::NotInjective { g, y });
                }
            }
            if ranges[g] != domains[group.inv(g)] {
                out.push(Violation::RangeDomainMismatch { g });
            }
        }

        for x in self.points() {
            if !ranges[FiniteGroup::IDENTITY].contains(&x) || self.act(FiniteGroup::IDENTITY, x) != Some(x) {
                out.push(Violation::IdentityMap { x });
            }
        }

        for g in group.elements() {
            let g_inv = group.inv(g);
            for h in group.elements() {
                let gh = group.mul(g, h);
                let source: PointSet = ranges[g_inv].intersection(&ranges[h]).copied().collect();
                let image: Option<PointSet> = source.iter().map(|&x| self.act(g, x)).collect();
                let target: PointSet = ranges[g].intersection(&ranges[gh]).copied().collect();
                if image.as_ref() != Some(&target) {
                    out.push(Violation::DomainTransport { g, h });
                }
            }
        }

        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                let h_inv = group.inv(h);
                let hg_inv = group.inv(gh);
                for &x in ranges[h_inv].intersection(&ranges[hg_inv]) {
                    let composite = self.act(h, x).and_then(|hx| self.act(g, hx));
                    let direct = self.act(gh, x);
                    let lands = composite.is_some_and(|y| ranges[g].contains(&y) && ranges[gh].contains(&y));
                    if composite.is_none() || composite != direct || !lands {
                        out.push(Violation::Composition { g, h, x });
                    }
                }
            }
        }
        out
    }

    /// `G^U . U`, the union of `eta_g(U ∩ X_{g^-1})`.
    pub fn saturate(&self, subset: &PointSet) -> PointSet {
        self.saturate_within(subset, |_| true)
    }

    /// Saturation using only elements accepted by `keep`.
    pub(crate) fn saturate_within(&self, subset: &PointSet, keep: impl Fn(usize) -> bool) -> PointSet {
        let mut out = PointSet::new();
        for g in self.group.elements().filter(|&g| keep(g)) {
            out.extend(subset.iter().filter_map(|&x| self.act(g, x)));
        }
        out
    }

    pub fn is_invariant(&self, subset: &PointSet) -> bool {
        self.saturate(subset).is_subset(subset)
    }

    /// The partial action of a subgroup, reindexed as a standalone group.
    pub fn restrict_to_subgroup(&self, elements: &[usize]) -> Result<RestrictedAction, ActionError> {
        let subgroup = self.group.subgroup(elements)?;
        Ok(self.restrict(&subgroup))
    }

    pub fn restrict(&self, subgroup: &Subgroup) -> RestrictedAction {
        let restriction = self.group.restrict(subgroup);
        let graphs = restriction
            .embedding
            .iter()
            .map(|&g| self.graphs[g].clone())
            .collect();
        let action = PartialAction {
            group: Arc::new(restriction.group.clone()),
            space_size: self.space_size,
            table: restriction
                .embedding
                .iter()
                .flat_map(|&g| self.table[g * self.space_size..(g + 1) * self.space_size].iter().copied())
                .collect(),
            graphs,
            labels: self.labels.clone(),
        };
        RestrictedAction { action, restriction }
    }

    /// The partial action of `G` on `G x X` given by
    /// `(h, x) -> (h g^-1, eta_g(x))` for `x ∈ X_{g^-1}`. The pair `(h, x)`
    /// is point `h * |X| + x`.
    pub fn hat_action(&self) -> PartialAction {
        let group = &*self.group;
        let m = self.space_size;
        let graphs = group
            .elements()
            .map(|g| {
                let g_inv = group.inv(g);
                group
                    .elements()
                    .flat_map(|h| {
                        self.graphs[g]
                            .iter()
                            .map(move |&(x, y)| (h * m + x, group.mul(h, g_inv) * m + y))
                    })
                    .collect()
            })
            .collect();
        let labels = group
            .elements()
            .flat_map(|h| self.points().map(move |x| (h, x)))
            .map(|(h, x)| format!("({},{})", h, self.label(x)))
            .collect();
        PartialAction::new(self.group.clone(), group.order() * m, graphs)
            .and_then(|pa| pa.with_labels(labels))
            .expect("hat action indices are in range")
    }

    /// No `g != 1` fixes a point where it is defined.
    pub fn is_free(&self) -> bool {
        self.graphs
            .iter()
            .enumerate()
            .skip(1)
            .all(|(_, graph)| graph.iter().all(|&(x, y)| x != y))
    }
}

/// A partial action restricted to a subgroup `H`, with the group reindexed.
#[derive(Debug, Clone)]
pub struct RestrictedAction {
    pub action: PartialAction,
    pub restriction: Restriction,
}

/// A global action `u` given by one permutation per group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalAction {
    group: Arc<FiniteGroup>,
    space_size: usize,
    perm: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl GlobalAction {
    /// Checks that `perm` is a homomorphism into permutations of `0..m`.
    pub fn new(
        group: impl Into<Arc<FiniteGroup>>,
        space_size: usize,
        perm: Vec<Vec<usize>>,
    ) -> Result<Self, ActionError> {
        let group = group.into();
        if space_size == 0 {
            return Err(ActionError::EmptySpace);
        }
        if perm.len() != group.order() {
            return Err(ActionError::WrongElementCount {
                expected: group.order(),
                got: perm.len(),
            });
        }
        for (g, p) in perm.iter().enumerate() {
            if p.len() != space_size {
                return Err(ActionError::NotAPermutation { g });
            }
            if let Some(&point) = p.iter().find(|&&y| y >= space_size) {
                return Err(ActionError::PointOutOfRange { g, point, space_size });
            }
            let distinct: BTreeSet<usize> = p.iter().copied().collect();
            if distinct.len() != space_size {
                return Err(ActionError::NotAPermutation { g });
            }
        }
        if perm[FiniteGroup::IDENTITY].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(ActionError::IdentityNotTrivial);
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if (0..space_size).any(|x| perm[g][perm[h][x]] != perm[gh][x]) {
                    return Err(ActionError::NotAHomomorphism { g, h });
                }
            }
        }
        Ok(Self {
            group,
            space_size,
            perm,
            labels: None,
        })
    }

    pub fn from_fn(
        group: impl Into<Arc<FiniteGroup>>,
        space_size: usize,
        rule: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, ActionError> {
        let group = group.into();
        let perm = group
            .elements()
            .map(|g| (0..space_size).map(|x| rule(g, x)).collect())
            .collect();
        Self::new(group, space_size, perm)
    }

    /// Left multiplication of the group on itself.
    pub fn regular(group: impl Into<Arc<FiniteGroup>>) -> Self {
        let group = group.into();
        let n = group.order();
        let g2 = group.clone();
        Self::from_fn(group, n, move |g, x| g2.mul(g, x)).expect("regular action is an action")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ActionError> {
        if labels.len() != self.space_size {
            return Err(ActionError::LabelCount {
                expected: self.space_size,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perm[g]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perm
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.perm[g][x]
    }

    /// The global action viewed as a (total) partial action.
    pub fn as_partial_action(&self) -> PartialAction {
        let graphs = self
            .perm
            .iter()
            .map(|p| p.iter().copied().enumerate().collect())
            .collect();
        let pa = PartialAction::new(self.group.clone(), self.space_size, graphs)
            .expect("permutation entries are in range");
        match &self.labels {
            Some(l) => pa.with_labels(l.clone()).expect("label count checked"),
            None => pa,
        }
    }

    /// The partial action induced on `subset`: `X_g = S ∩ u_g(S)` and
    /// `eta_g = u_g` on `X_{g^-1}`. Points of the result are the members of
    /// `subset` in increasing order.
    pub fn induce(&self, subset: &PointSet) -> Result<Induced, ActionError> {
        if subset.is_empty() {
            return Err(ActionError::EmptySubset);
        }
        if let Some(&point) = subset.iter().find(|&&x| x >= self.space_size) {
            return Err(ActionError::PointOutOfRange {
                g: FiniteGroup::IDENTITY,
                point,
                space_size: self.space_size,
            });
        }
        let points: Vec<usize> = subset.iter().copied().collect();
        let mut local = vec![None; self.space_size];
        for (i, &x) in points.iter().enumerate() {
            local[x] = Some(i);
        }
        let graphs = self
            .perm
            .iter()
            .map(|p| {
                points
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &x)| local[p[x]].map(|j| (i, j)))
                    .collect()
            })
            .collect();
        let labels = points
            .iter()
            .map(|&x| match &self.labels {
                Some(l) => l[x].clone(),
                None => x.to_string(),
            })
            .collect();
        let action = PartialAction::new(self.group.clone(), points.len(), graphs)?.with_labels(labels)?;
        Ok(Induced { action, points })
    }
}

/// Result of inducing a partial action on a subset of a global action.
#[derive(Debug, Clone)]
pub struct Induced {
    pub action: PartialAction,
    /// Local point -> point of the ambient space.
    pub points: Vec<usize>,
}

pub fn induce_from_global(global: &GlobalAction, subset: &PointSet) -> Result<Induced, ActionError> {
    global.induce(subset)
}
