//! The enveloping space `X_G = (G x X)/R` with its global action `mu` and
//! embedding `iota`, the quotient-group partial actions `eta_{G/H}` built
//! from it, and the transfers of sections between `pi_G` and `Pi_G`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::action::{ActionError, GlobalAction, PartialAction, PointSet};
use crate::group::{FiniteGroup, GroupError, QuotientGroup, Subgroup};
use crate::orbits::{
    full_quotient, orbit_quotient, section_finite, trivial_quotient, verify_section, OrbitError, OrbitQuotient,
    Section, SectionError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlobalizationError {
    #[error("relation R is not an equivalence ({property} fails at pair {pair:?})")]
    RNotEquivalence {
        property: &'static str,
        pair: (usize, usize),
    },
    #[error("mu is not well defined on the class of {pair:?}")]
    MuNotWellDefined { pair: (usize, usize) },
    #[error("the partial action is not free")]
    NotFree,
    #[error("{map} is not well defined")]
    NotWellDefined { map: &'static str },
    #[error("{map} is not injective")]
    NotInjective { map: &'static str },
    #[error("psi is not a bijection")]
    PsiNotBijective,
    #[error("section chooses envelope class {class}, which is not in iota(X)")]
    ImageNotInIota { class: usize },
    #[error("{which} is not a section of the required map")]
    NotASection { which: &'static str },
    #[error("lifted map failed the section identity")]
    LiftFailed,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// `X_G` with classes labelled by their least `(g, x)` pair.
#[derive(Debug, Clone)]
pub struct EnvelopingSpace {
    source: PartialAction,
    classes: Vec<Vec<(usize, usize)>>,
    /// pair index `g * |X| + x` -> class
    pair_class: Vec<usize>,
    mu: GlobalAction,
    /// `mu` as a partial action, for orbit and section machinery.
    mu_view: PartialAction,
    iota: Vec<usize>,
}

/// Invariant checks on an [`EnvelopingSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct EnvelopeReport {
    pub iota_injective: bool,
    pub orbit_of_image_covers: bool,
    pub restriction_matches: bool,
    pub mu_free_if_source_free: bool,
}

impl EnvelopeReport {
    pub fn all_hold(&self) -> bool {
        self.iota_injective && self.orbit_of_image_covers && self.restriction_matches && self.mu_free_if_source_free
    }
}

/// `(g,x) R (h,y)` iff `x ∈ X_{g^-1 h}` and `eta_{h^-1 g}(x) = y`.
fn related(pa: &PartialAction, (g, x): (usize, usize), (h, y): (usize, usize)) -> bool {
    let group = pa.group();
    pa.act(group.mul(group.inv(h), g), x) == Some(y)
}

/// Builds the enveloping space, verifying that `R` is an equivalence.
pub fn envelope(pa: &PartialAction) -> Result<EnvelopingSpace, GlobalizationError> {
    let group = pa.group();
    let m = pa.space_size();
    let pairs: Vec<(usize, usize)> = group.elements().flat_map(|g| (0..m).map(move |x| (g, x))).collect();
    let index = |(g, x): (usize, usize)| g * m + x;

    // R-neighbours of (g, x) are (h, eta_{h^-1 g}(x)); at most one per h.
    let rows: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(g, x)| {
            group
                .elements()
                .filter_map(|h| pa.act(group.mul(group.inv(h), g), x).map(|y| index((h, y))))
                .collect()
        })
        .collect();

    for (p, &pair) in pairs.iter().enumerate() {
        if !related(pa, pair, pair) {
            return Err(GlobalizationError::RNotEquivalence {
                property: "reflexivity",
                pair,
            });
        }
        for &q in &rows[p] {
            if !related(pa, pairs[q], pair) {
                return Err(GlobalizationError::RNotEquivalence {
                    property: "symmetry",
                    pair,
                });
            }
            if rows[q].iter().any(|&r| !related(pa, pair, pairs[r])) {
                return Err(GlobalizationError::RNotEquivalence {
                    property: "transitivity",
                    pair,
                });
            }
        }
    }

    let mut pair_class = vec![usize::MAX; pairs.len()];
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for p in 0..pairs.len() {
        if pair_class[p] != usize::MAX {
            continue;
        }
        let mut members = rows[p].clone();
        members.sort_unstable();
        for &q in &members {
            pair_class[q] = classes.len();
        }
        classes.push(members.into_iter().map(|q| pairs[q]).collect());
    }

    let mut perm = vec![vec![0; classes.len()]; group.order()];
    for (c, members) in classes.iter().enumerate() {
        for g in group.elements() {
            let target = pair_class[index((group.mul(g, members[0].0), members[0].1))];
            for &(h, x) in members {
                if pair_class[index((group.mul(g, h), x))] != target {
                    return Err(GlobalizationError::MuNotWellDefined { pair: (h, x) });
                }
            }
            perm[g][c] = target;
        }
    }
    let labels: Vec<String> = classes
        .iter()
        .map(|c| format!("[{},{}]", c[0].0, pa.label(c[0].1)))
        .collect();
    let mu = GlobalAction::new(pa.group_arc().clone(), classes.len(), perm)?.with_labels(labels)?;
    let iota = (0..m).map(|x| pair_class[index((FiniteGroup::IDENTITY, x))]).collect();
    Ok(EnvelopingSpace {
        source: pa.clone(),
        mu_view: mu.as_partial_action(),
        classes,
        pair_class,
        mu,
        iota,
    })
}

impl EnvelopingSpace {
    pub fn source(&self) -> &PartialAction {
        &self.source
    }

    pub fn classes(&self) -> &[Vec<(usize, usize)>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `[g, x]`
    pub fn class_of(&self, g: usize, x: usize) -> usize {
        self.pair_class[g * self.source.space_size() + x]
    }

    pub fn mu(&self) -> &GlobalAction {
        &self.mu
    }

    /// `mu` as a partial action on the classes.
    pub fn mu_action(&self) -> &PartialAction {
        &self.mu_view
    }

    pub fn iota(&self) -> &[usize] {
        &self.iota
    }

    pub fn iota_inverse(&self) -> Vec<Option<usize>> {
        let mut inv = vec![None; self.len()];
        for (x, &c) in self.iota.iter().enumerate() {
            inv[c] = Some(x);
        }
        inv
    }

    /// Least pair of every class: a splitting of `G x X -> X_G`.
    pub fn canonical_splitting(&self) -> Vec<(usize, usize)> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn check(&self) -> EnvelopeReport {
        let pa = &self.source;
        let image: PointSet = self.iota.iter().copied().collect();
        let iota_injective = image.len() == self.iota.len();
        let covered = self.mu_view.saturate(&image);
        let orbit_of_image_covers = covered.len() == self.len();
        let restriction_matches = iota_injective
            && pa.group().elements().all(|g| {
                pa.points().all(|x| {
                    let moved = self.mu.apply(g, self.iota[x]);
                    match pa.act(g, x) {
                        Some(y) => moved == self.iota[y],
                        None => !image.contains(&moved),
                    }
                })
            });
        let mu_free_if_source_free = !pa.is_free() || self.mu_view.is_free();
        EnvelopeReport {
            iota_injective,
            orbit_of_image_covers,
            restriction_matches,
            mu_free_if_source_free,
        }
    }

    /// Compares the classes with the orbits of the hat action on `G x X`.
    pub fn matches_hat_orbits(&self) -> bool {
        let hat = self.source.hat_action();
        let Ok(orbits) = full_quotient(&hat) else {
            return false;
        };
        let m = self.source.space_size();
        let ours: Vec<Vec<usize>> = self
            .classes
            .iter()
            .map(|c| c.iter().map(|&(g, x)| g * m + x).collect())
            .collect();
        orbits.classes() == ours.as_slice()
    }

    /// DOT digraph of `mu`, one edge per non-identity element and class.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph envelope {\n");
        let labels = self.mu.labels().expect("envelope classes are labelled");
        let image: PointSet = self.iota.iter().copied().collect();
        for (c, label) in labels.iter().enumerate() {
            let shape = if image.contains(&c) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  c{c} [label=\"{label}\", shape={shape}];");
        }
        for g in self.mu.group().elements().skip(1) {
            for c in 0..self.len() {
                let _ = writeln!(out, "  c{c} -> c{} [label=\"{g}\"];", self.mu.apply(g, c));
            }
        }
        out.push_str("}\n");
        out
    }

    /// `Pi_G: X_G -> X_G/~_G`
    pub fn orbit_quotient(&self) -> OrbitQuotient {
        full_quotient(&self.mu_view).expect("mu is a global action")
    }

    fn require_section_of_pi_g(&self, q: &Section, which: &'static str) -> Result<(), GlobalizationError> {
        let pa = &self.source;
        if q.from.subgroup() != &pa.group().whole()
            || !q.to.subgroup().is_trivial()
            || !verify_section(pa, q)
        {
            return Err(GlobalizationError::NotASection { which });
        }
        Ok(())
    }

    fn require_section_of_big_pi(&self, q: &Section, which: &'static str) -> Result<(), GlobalizationError> {
        let view = &self.mu_view;
        if q.from.subgroup() != &view.group().whole()
            || !q.to.subgroup().is_trivial()
            || !verify_section(view, q)
        {
            return Err(GlobalizationError::NotASection { which });
        }
        Ok(())
    }

    /// From a section `q` of `pi_G`, the section `G.[1,x] -> iota(q(pi_G(x)))`
    /// of `Pi_G`.
    pub fn section_to_envelope(&self, q: &Section) -> Result<Section, GlobalizationError> {
        self.require_section_of_pi_g(q, "q")?;
        let big = self.orbit_quotient();
        let mut choice = vec![usize::MAX; big.len()];
        for x in self.source.points() {
            let orbit = big.class_of(self.iota[x]);
            let chosen = self.iota[q.choice[q.from.class_of(x)]];
            if choice[orbit] != usize::MAX && choice[orbit] != chosen {
                return Err(GlobalizationError::NotWellDefined { map: "s" });
            }
            choice[orbit] = chosen;
        }
        if choice.contains(&usize::MAX) {
            return Err(GlobalizationError::NotWellDefined { map: "s" });
        }
        let s = Section {
            from: big,
            to: trivial_quotient(&self.mu_view),
            choice,
        };
        if !verify_section(&self.mu_view, &s) {
            return Err(GlobalizationError::LiftFailed);
        }
        Ok(s)
    }

    /// From a section of `Pi_G` with image in `iota(X)`, the section
    /// `G^x.x -> iota^-1(q(G[1,x]))` of `pi_G`.
    pub fn section_from_envelope(&self, q: &Section) -> Result<Section, GlobalizationError> {
        self.require_section_of_big_pi(q, "q")?;
        let iota_inv = self.iota_inverse();
        if let Some(&class) = q.choice.iter().find(|&&c| iota_inv[c].is_none()) {
            return Err(GlobalizationError::ImageNotInIota { class });
        }
        let pa = &self.source;
        let small = full_quotient(pa)?;
        let choice = (0..small.len())
            .map(|c| {
                let x = small.representative(c);
                iota_inv[q.choice[q.from.class_of(self.iota[x])]].expect("image checked")
            })
            .collect();
        let r = Section {
            from: small,
            to: trivial_quotient(pa),
            choice,
        };
        if !verify_section(pa, &r) {
            return Err(GlobalizationError::LiftFailed);
        }
        Ok(r)
    }

    /// From a section `q` of `Pi_G` and a splitting `t` of `G x X -> X_G`,
    /// the section `G^x.x -> proj_2(t(q(G.[1,x])))` of `pi_G`.
    pub fn section_from_two(&self, q: &Section, splitting: &[(usize, usize)]) -> Result<Section, GlobalizationError> {
        self.require_section_of_big_pi(q, "q")?;
        let pa = &self.source;
        let (n, m) = (pa.group().order(), pa.space_size());
        let splits = splitting.len() == self.len()
            && splitting
                .iter()
                .enumerate()
                .all(|(k, &(g, x))| g < n && x < m && self.class_of(g, x) == k);
        if !splits {
            return Err(GlobalizationError::NotASection { which: "t" });
        }
        let small = full_quotient(pa)?;
        let choice = (0..small.len())
            .map(|c| {
                let x = small.representative(c);
                splitting[q.choice[q.from.class_of(self.iota[x])]].1
            })
            .collect();
        let p = Section {
            from: small,
            to: trivial_quotient(pa),
            choice,
        };
        if !verify_section(pa, &p) {
            return Err(GlobalizationError::LiftFailed);
        }
        Ok(p)
    }
}

/// The free partial action of `G/H` on `T = X/~_H` obtained by restricting
/// the induced action on `X_G/~_H` to the image of `phi`, together with the
/// bijection `psi: T/~_{G/H} -> X/~_G`.
#[derive(Debug, Clone)]
pub struct QuotientGroupAction {
    pub normal: Subgroup,
    pub quotient_group: QuotientGroup,
    /// `T = X/~_H`
    pub h_quotient: OrbitQuotient,
    /// `X_G/~_H`
    pub envelope_h_quotient: OrbitQuotient,
    /// `tau_{gH}` on `X_G/~_H`
    pub tau: GlobalAction,
    /// `phi: T -> X_G/~_H`
    pub phi: Vec<usize>,
    /// `eta_{G/H}` on `T`
    pub action: PartialAction,
    /// `T/~_{G/H}`
    pub action_quotient: OrbitQuotient,
    /// `X/~_G`
    pub g_quotient: OrbitQuotient,
    /// `psi: T/~_{G/H} -> X/~_G`
    pub psi: Vec<usize>,
}

impl QuotientGroupAction {
    pub fn psi_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.psi.len()];
        for (z, &c) in self.psi.iter().enumerate() {
            inv[c] = z;
        }
        inv
    }

    /// `psi(pi_{G/H}(pi_H(x))) = pi_G(x)` for every `x`.
    pub fn diagram_commutes(&self) -> bool {
        (0..self.h_quotient.class_map().len()).all(|x| {
            let z = self.action_quotient.class_of(self.h_quotient.class_of(x));
            self.psi[z] == self.g_quotient.class_of(x)
        })
    }

    pub fn psi_is_bijective(&self) -> bool {
        let image: PointSet = self.psi.iter().copied().collect();
        image.len() == self.psi.len() && self.psi.len() == self.g_quotient.len()
    }
}

pub fn quotient_group_action(pa: &PartialAction, normal: &Subgroup) -> Result<QuotientGroupAction, GlobalizationError> {
    let group = pa.group();
    group.require_normal(normal)?;
    if !pa.is_free() {
        return Err(GlobalizationError::NotFree);
    }
    let env = envelope(pa)?;
    let quotient_group = group.quotient(normal)?;
    let envelope_h_quotient = orbit_quotient(env.mu_action(), normal)?;
    let k = envelope_h_quotient.len();

    // tau_{gH}(Pi_H([t,x])) = Pi_H([gt,x])
    let mut perm = vec![vec![0; k]; quotient_group.group.order()];
    for (coset_index, coset) in quotient_group.cosets.iter().enumerate() {
        for d in 0..k {
            let target = envelope_h_quotient.class_of(env.mu().apply(coset[0], envelope_h_quotient.representative(d)));
            let consistent = coset.iter().all(|&g| {
                envelope_h_quotient
                    .class(d)
                    .iter()
                    .all(|&c| envelope_h_quotient.class_of(env.mu().apply(g, c)) == target)
            });
            if !consistent {
                return Err(GlobalizationError::NotWellDefined { map: "tau" });
            }
            perm[coset_index][d] = target;
        }
    }
    let tau = GlobalAction::new(quotient_group.group.clone(), k, perm)?;

    // phi(H^x.x) = H[1,x]
    let h_quotient = orbit_quotient(pa, normal)?;
    let mut phi = Vec::with_capacity(h_quotient.len());
    for members in h_quotient.classes() {
        let image = envelope_h_quotient.class_of(env.iota()[members[0]]);
        if members
            .iter()
            .any(|&x| envelope_h_quotient.class_of(env.iota()[x]) != image)
        {
            return Err(GlobalizationError::NotWellDefined { map: "phi" });
        }
        phi.push(image);
    }
    let image: PointSet = phi.iter().copied().collect();
    if image.len() != phi.len() {
        return Err(GlobalizationError::NotInjective { map: "phi" });
    }

    // Restrict tau to Im(phi), then pull back along phi.
    let induced = tau.induce(&image)?;
    let mut t_of_local = vec![0; induced.points.len()];
    for (t, &d) in phi.iter().enumerate() {
        let local = induced.points.binary_search(&d).expect("phi lands in its image");
        t_of_local[local] = t;
    }
    let graphs = induced
        .action
        .graphs()
        .iter()
        .map(|graph| graph.iter().map(|&(i, j)| (t_of_local[i], t_of_local[j])).collect())
        .collect();
    let labels = h_quotient
        .classes()
        .iter()
        .map(|c| {
            let names: Vec<String> = c.iter().map(|&x| pa.label(x)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    let action = PartialAction::new(quotient_group.group.clone(), h_quotient.len(), graphs)?.with_labels(labels)?;

    let action_quotient = full_quotient(&action)?;
    let g_quotient = full_quotient(pa)?;
    let mut psi = vec![usize::MAX; action_quotient.len()];
    for x in pa.points() {
        let z = action_quotient.class_of(h_quotient.class_of(x));
        let target = g_quotient.class_of(x);
        if psi[z] != usize::MAX && psi[z] != target {
            return Err(GlobalizationError::NotWellDefined { map: "psi" });
        }
        psi[z] = target;
    }
    let result = QuotientGroupAction {
        normal: normal.clone(),
        quotient_group,
        h_quotient,
        envelope_h_quotient,
        tau,
        phi,
        action,
        action_quotient,
        g_quotient,
        psi,
    };
    if !result.psi_is_bijective() {
        return Err(GlobalizationError::PsiNotBijective);
    }
    Ok(result)
}

/// Intermediate data of one lifting step.
#[derive(Debug, Clone)]
pub struct LiftStep {
    pub quotient_action: QuotientGroupAction,
    /// `lambda`, a section of `pi_{N/M}: T -> T/~_{N/M}`
    pub local_section: Section,
    /// `lambda ∘ psi^-1`, a section of `pi_{M,N}`
    pub bridge: Section,
    /// `alpha = lambda ∘ psi^-1 ∘ t`, a section of `pi_{M,G}`
    pub lifted: Section,
}

/// Lifts a section `t` of `pi_{N,G}` to a section of `pi_{M,G}` for normal
/// subgroups `M ⊆ N` of `G`.
pub fn lift_section_through(
    pa: &PartialAction,
    n: &Subgroup,
    m: &Subgroup,
    t: &Section,
) -> Result<Section, GlobalizationError> {
    lift_section_traced(pa, n, m, t).map(|step| step.lifted)
}

pub fn lift_section_traced(
    pa: &PartialAction,
    n: &Subgroup,
    m: &Subgroup,
    t: &Section,
) -> Result<LiftStep, GlobalizationError> {
    let group = pa.group();
    group.require_normal(n)?;
    group.require_normal(m)?;
    if !m.is_subset_of(n) {
        return Err(GroupError::NotNested {
            inner: m.elements().to_vec(),
            outer: n.elements().to_vec(),
        }
        .into());
    }
    if t.from.subgroup() != &group.whole() || t.to.subgroup() != n || !verify_section(pa, t) {
        return Err(GlobalizationError::NotASection { which: "t" });
    }
    if !pa.is_free() {
        return Err(GlobalizationError::NotFree);
    }

    let restricted = pa.restrict(n);
    let local_m = restricted.restriction.pull(m)?;
    let quotient_action = quotient_group_action(&restricted.action, &local_m)?;
    let local_section = section_finite(&quotient_action.action)?;

    let m_quotient = orbit_quotient(pa, m)?;
    let n_quotient = &t.to;
    // Quotients of the restricted action carry the same canonical numbering.
    debug_assert_eq!(quotient_action.h_quotient.classes(), m_quotient.classes());
    debug_assert_eq!(quotient_action.g_quotient.classes(), n_quotient.classes());

    let psi_inv = quotient_action.psi_inverse();
    let bridge_choice: Vec<usize> = (0..n_quotient.len())
        .map(|c| local_section.choice[psi_inv[c]])
        .collect();
    let bridge = Section {
        from: n_quotient.clone(),
        to: m_quotient.clone(),
        choice: bridge_choice,
    };
    if !verify_section(pa, &bridge) {
        return Err(GlobalizationError::LiftFailed);
    }
    let lifted = bridge.after(t).ok_or(GlobalizationError::LiftFailed)?;
    if !verify_section(pa, &lifted) {
        return Err(GlobalizationError::LiftFailed);
    }
    Ok(LiftStep {
        quotient_action,
        local_section,
        bridge,
        lifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orbits::section_finite;

    #[test]
    fn f3_envelope_is_regular_z4() {
        let f3 = fixtures::f3();
        let env = envelope(&f3).unwrap();
        assert_eq!(env.len(), 4);
        // local point 1 is the element 2
        assert_eq!(
            env.classes(),
            &[
                vec![(0, 0), (2, 1)],
                vec![(0, 1), (2, 0)],
                vec![(1, 0), (3, 1)],
                vec![(1, 1), (3, 0)],
            ]
        );
        assert!(env.check().all_hold());
        assert!(env.matches_hat_orbits());
        // mu is free and transitive, as the regular action is
        let pa = env.mu_action();
        assert!(pa.is_free());
        assert_eq!(env.orbit_quotient().len(), 1);
    }

    #[test]
    fn f2_envelope_has_three_classes() {
        let env = envelope(&fixtures::f2()).unwrap();
        assert_eq!(env.len(), 3);
        assert!(env.check().all_hold());
        assert!(env.matches_hat_orbits());
    }

    #[test]
    fn global_action_envelope_is_the_space() {
        let u = crate::GlobalAction::regular(FiniteGroup::symmetric(3));
        let env = envelope(&u.as_partial_action()).unwrap();
        assert_eq!(env.len(), 6);
        let image: PointSet = env.iota().iter().copied().collect();
        assert_eq!(image.len(), 6);
    }

    #[test]
    fn invalid_input_breaks_r() {
        // a.0 = 1 with no way back
        let pa = PartialAction::new(FiniteGroup::cyclic(2), 2, vec![vec![(0, 0), (1, 1)], vec![(0, 1)]]).unwrap();
        assert!(matches!(envelope(&pa), Err(GlobalizationError::RNotEquivalence { .. })));
    }

    #[test]
    fn quotient_action_of_f3() {
        let f3 = fixtures::f3();
        let g = f3.group();
        let h = g.subgroup(&[0, 2]).unwrap();
        let qa = quotient_group_action(&f3, &h).unwrap();
        assert_eq!(qa.quotient_group.group, FiniteGroup::cyclic(2));
        assert_eq!(qa.h_quotient.len(), 1);
        assert!(qa.action.validate().is_valid());
        assert!(qa.action.is_free());
        assert!(qa.action.graph(1).is_empty());
        assert!(qa.diagram_commutes());

        let trivial = quotient_group_action(&f3, &g.trivial_subgroup()).unwrap();
        assert_eq!(trivial.action.graphs(), f3.graphs());
        assert_eq!(trivial.psi, vec![0]);

        let whole = quotient_group_action(&f3, &g.whole()).unwrap();
        assert_eq!(whole.quotient_group.group.order(), 1);
        assert_eq!(whole.action_quotient.len(), whole.g_quotient.len());
    }

    #[test]
    fn quotient_action_errors() {
        let f2 = fixtures::f2();
        assert_eq!(
            quotient_group_action(&f2, &f2.group().whole()).unwrap_err(),
            GlobalizationError::NotFree
        );
        let s3 = FiniteGroup::symmetric(3);
        let pa = crate::GlobalAction::regular(s3.clone()).as_partial_action();
        let two = s3.subgroups().into_iter().find(|s| s.len() == 2).unwrap();
        assert!(matches!(
            quotient_group_action(&pa, &two),
            Err(GlobalizationError::Group(GroupError::NotNormal { .. }))
        ));
    }

    #[test]
    fn lift_on_f3() {
        let f3 = fixtures::f3();
        let g = f3.group();
        let n = g.subgroup(&[0, 2]).unwrap();
        let m = g.trivial_subgroup();
        // t: the unique section of pi_{N,G} (one class each side)
        let t = Section {
            from: full_quotient(&f3).unwrap(),
            to: orbit_quotient(&f3, &n).unwrap(),
            choice: vec![0],
        };
        let alpha = lift_section_through(&f3, &n, &m, &t).unwrap();
        assert!(verify_section(&f3, &alpha));
        assert!([0, 1].contains(&alpha.chosen_points()[0]));

        let same = lift_section_through(&f3, &n, &n, &t).unwrap();
        assert_eq!(same, t);

        let id = Section::identity(full_quotient(&f3).unwrap());
        let whole = g.whole();
        assert_eq!(lift_section_through(&f3, &whole, &whole, &id).unwrap(), id);
    }

    #[test]
    fn transfers_on_f3() {
        let f3 = fixtures::f3();
        let env = envelope(&f3).unwrap();
        let q = section_finite(&f3).unwrap();
        let s = env.section_to_envelope(&q).unwrap();
        assert_eq!(s.choice, vec![env.iota()[0]]);
        let back = env.section_from_envelope(&s).unwrap();
        assert!(verify_section(&f3, &back));

        let p = env.section_from_two(&s, &env.canonical_splitting()).unwrap();
        assert!(verify_section(&f3, &p));

        // class 2 is [1,0], outside iota(X)
        let outside = Section {
            choice: vec![2],
            ..s.clone()
        };
        assert!(verify_section(env.mu_action(), &outside));
        assert_eq!(
            env.section_from_envelope(&outside).unwrap_err(),
            GlobalizationError::ImageNotInIota { class: 2 }
        );
        // the canonical splitting still recovers a section from it
        assert!(env.section_from_two(&outside, &env.canonical_splitting()).is_ok());

        let mut bad_t = env.canonical_splitting();
        bad_t.swap(0, 1);
        assert_eq!(
            env.section_from_two(&s, &bad_t).unwrap_err(),
            GlobalizationError::NotASection { which: "t" }
        );
    }

    #[test]
    fn transfers_on_f1() {
        let f1 = fixtures::f1();
        let env = envelope(&f1).unwrap();
        assert_eq!(env.len(), 4);
        let q = section_finite(&f1).unwrap();
        let s = env.section_to_envelope(&q).unwrap();
        assert_eq!(s.from.len(), 2);
        assert_eq!(s.choice, vec![env.iota()[0], env.iota()[1]]);
    }

    #[test]
    fn trivial_group_transfers_are_identities() {
        let pa = fixtures::trivial(3);
        let env = envelope(&pa).unwrap();
        let q = section_finite(&pa).unwrap();
        let s = env.section_to_envelope(&q).unwrap();
        assert_eq!(s.choice, vec![0, 1, 2]);
        assert_eq!(env.section_from_envelope(&s).unwrap(), q);
        assert_eq!(env.section_from_two(&s, &env.canonical_splitting()).unwrap(), q);
    }

    #[test]
    fn dot_export_lists_every_class() {
        let env = envelope(&fixtures::f3()).unwrap();
        let dot = env.to_dot();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("shape=").count(), 4);
        assert_eq!(dot.matches("->").count(), 12);
    }
}
