//! The Birget-Rhodes expansion of a finite group and the action groupoid of
//! a partial action.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::action::PartialAction;
use crate::batch::{self, Execution};
use crate::group::FiniteGroup;
use crate::orbits::full_quotient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("({set:?}, {g}) is not an element: the set must contain 1 and g")]
    InvalidElement { set: Vec<usize>, g: usize },
    #[error("group of order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
}

/// Default order cap for full monoid verification.
pub const DEFAULT_ORDER_CAP: usize = 6;
/// Largest order for which the expansion can be enumerated at all.
pub const MAX_ENUMERABLE_ORDER: usize = 20;

/// `(A, g)` with `{1, g} ⊆ A ⊆ G`; `A` is a bitmask over element indices.
#[derive(Debug, Clone)]
pub struct BrElement {
    group: Arc<FiniteGroup>,
    set: u64,
    g: usize,
}

impl PartialEq for BrElement {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set && self.g == other.g && same_group(&self.group, &other.group)
    }
}

impl Eq for BrElement {}

fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl BrElement {
    pub fn new(group: impl Into<Arc<FiniteGroup>>, set: &[usize], g: usize) -> Result<Self, AlgebraError> {
        let group = group.into();
        let invalid = || AlgebraError::InvalidElement { set: set.to_vec(), g };
        let n = group.order();
        if n > 64 || g >= n || set.iter().any(|&a| a >= n) {
            return Err(invalid());
        }
        let mask = set.iter().fold(0u64, |m, &a| m | (1 << a));
        if mask & 1 == 0 || mask & (1 << g) == 0 {
            return Err(invalid());
        }
        Ok(Self { group, set: mask, g })
    }

    pub fn identity(group: impl Into<Arc<FiniteGroup>>) -> Self {
        Self {
            group: group.into(),
            set: 1,
            g: FiniteGroup::IDENTITY,
        }
    }

    pub fn set(&self) -> Vec<usize> {
        (0..self.group.order()).filter(|&a| self.set >> a & 1 == 1).collect()
    }

    pub fn element(&self) -> usize {
        self.g
    }

    pub fn is_idempotent(&self) -> bool {
        self.g == FiniteGroup::IDENTITY
    }

    /// `(g^-1 A, g^-1)`
    pub fn inverse(&self) -> Self {
        let g_inv = self.group.inv(self.g);
        Self {
            set: translate(&self.group, g_inv, self.set),
            g: g_inv,
            group: self.group.clone(),
        }
    }
}

/// `gA` as a bitmask.
fn translate(group: &FiniteGroup, g: usize, set: u64) -> u64 {
    let mut out = 0u64;
    let mut rest = set;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1 << group.mul(g, a);
    }
    out
}

fn mul_raw(group: &FiniteGroup, (a_set, g): (u64, usize), (b_set, h): (u64, usize)) -> (u64, usize) {
    (a_set | translate(group, g, b_set), group.mul(g, h))
}

/// `(A, g)(B, h) = (A ∪ gB, gh)`
pub fn br_mul(a: &BrElement, b: &BrElement) -> Result<BrElement, AlgebraError> {
    if !same_group(&a.group, &b.group) {
        return Err(AlgebraError::GroupMismatch);
    }
    let (set, g) = mul_raw(&a.group, (a.set, a.g), (b.set, b.g));
    Ok(BrElement {
        group: a.group.clone(),
        set,
        g,
    })
}

/// `2^{n-1} + (n-1) 2^{n-2}`: subsets containing 1 for `g = 1`, plus
/// subsets containing both 1 and `g` for each of the `n - 1` others.
pub fn br_expected_count(order: usize) -> u128 {
    assert!(order >= 1);
    if order == 1 {
        1
    } else {
        (1u128 << (order - 1)) + (order as u128 - 1) * (1u128 << (order - 2))
    }
}

/// Every element of the expansion, ordered by `g` then by bitmask.
pub fn br_enumerate(group: &Arc<FiniteGroup>) -> Result<Vec<BrElement>, AlgebraError> {
    let n = group.order();
    if n > MAX_ENUMERABLE_ORDER {
        return Err(AlgebraError::OrderCapExceeded {
            order: n,
            cap: MAX_ENUMERABLE_ORDER,
        });
    }
    let mut out = Vec::new();
    for g in 0..n {
        let required = 1u64 | (1 << g);
        for mask in 0..(1u64 << n) {
            if mask & required == required {
                out.push(BrElement {
                    group: group.clone(),
                    set: mask,
                    g,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BrReport {
    pub order: usize,
    pub count: usize,
    pub expected_count: u128,
    pub associative: bool,
    pub identity: bool,
    pub inverses_unique: bool,
    pub inverse_formula: bool,
    pub idempotents: usize,
    pub idempotents_are_a1: bool,
    pub idempotents_commute: bool,
    pub violations: Vec<String>,
}

impl BrReport {
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty() && self.count as u128 == self.expected_count
    }
}

/// Checks that the expansion is an inverse monoid whose inverse is
/// `(A, g)* = (g^-1 A, g^-1)` and whose idempotents `(A, 1)` commute.
pub fn br_verify_inverse_monoid(
    group: &Arc<FiniteGroup>,
    cap: usize,
    exec: Execution,
) -> Result<BrReport, AlgebraError> {
    let n = group.order();
    if n > cap {
        return Err(AlgebraError::OrderCapExceeded { order: n, cap });
    }
    let elements = br_enumerate(group)?;
    let raw: Vec<(u64, usize)> = elements.iter().map(|e| (e.set, e.g)).collect();
    let index: HashMap<(u64, usize), usize> = raw.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let k = raw.len();
    let table: Vec<usize> = batch::map_range(exec, 0..k, |i| {
        raw.iter()
            .map(|&b| index[&mul_raw(group, raw[i], b)])
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let mul = |a: usize, b: usize| table[a * k + b];

    let mut violations = Vec::new();
    let bad_assoc: Vec<(usize, usize, usize)> = batch::map_range(exec, 0..k, |a| {
        (0..k)
            .flat_map(|b| (0..k).map(move |c| (b, c)))
            .find(|&(b, c)| mul(mul(a, b), c) != mul(a, mul(b, c)))
            .map(|(b, c)| (a, b, c))
    })
    .into_iter()
    .flatten()
    .collect();
    let associative = bad_assoc.is_empty();
    if let Some(&(a, b, c)) = bad_assoc.first() {
        violations.push(format!("associativity fails at ({a}, {b}, {c})"));
    }

    let one = index[&(1, FiniteGroup::IDENTITY)];
    let identity = (0..k).all(|a| mul(one, a) == a && mul(a, one) == a);
    if !identity {
        violations.push("({1}, 1) is not a two-sided identity".into());
    }

    let inverse_sets: Vec<Vec<usize>> = batch::map_range(exec, 0..k, |a| {
        (0..k)
            .filter(|&b| mul(mul(a, b), a) == a && mul(mul(b, a), b) == b)
            .collect()
    });
    let inverses_unique = inverse_sets.iter().all(|s| s.len() == 1);
    if !inverses_unique {
        violations.push("some element lacks a unique generalized inverse".into());
    }
    let inverse_formula = inverse_sets.iter().enumerate().all(|(a, s)| {
        let inv = elements[a].inverse();
        s.first() == Some(&index[&(inv.set, inv.g)])
    });
    if !inverse_formula {
        violations.push("inverse differs from (g^-1 A, g^-1)".into());
    }

    let idempotent: Vec<usize> = (0..k).filter(|&e| mul(e, e) == e).collect();
    let idempotents_are_a1 = idempotent.iter().all(|&e| raw[e].1 == FiniteGroup::IDENTITY)
        && idempotent.len() == raw.iter().filter(|e| e.1 == FiniteGroup::IDENTITY).count();
    if !idempotents_are_a1 {
        violations.push("idempotents are not exactly the (A, 1)".into());
    }
    let idempotents_commute = idempotent
        .iter()
        .all(|&e| idempotent.iter().all(|&f| mul(e, f) == mul(f, e)));
    if !idempotents_commute {
        violations.push("idempotents do not commute".into());
    }

    Ok(BrReport {
        order: n,
        count: k,
        expected_count: br_expected_count(n),
        associative,
        identity,
        inverses_unique,
        inverse_formula,
        idempotents: idempotent.len(),
        idempotents_are_a1,
        idempotents_commute,
        violations,
    })
}

/// An arrow `(g, x): x -> g.x` of the action groupoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Arrow {
    pub g: usize,
    pub x: usize,
}

/// The action groupoid: arrows are the pairs of `G*X`.
#[derive(Debug, Clone)]
pub struct ActionGroupoid {
    action: PartialAction,
    arrows: Vec<Arrow>,
    /// `g * |X| + x` -> arrow index
    index: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GroupoidReport {
    pub arrows: usize,
    pub units: usize,
    pub compositions: usize,
    pub inverse_is_involution: bool,
    pub inverse_laws: bool,
    pub source_target_laws: bool,
    pub unit_laws: bool,
    pub associative: bool,
    pub components: usize,
    pub orbits: usize,
    pub components_match_orbits: bool,
    pub trivial_isotropy: bool,
}

impl GroupoidReport {
    pub fn all_pass(&self) -> bool {
        self.inverse_is_involution
            && self.inverse_laws
            && self.source_target_laws
            && self.unit_laws
            && self.associative
            && self.components_match_orbits
    }
}

pub fn groupoid_build(pa: &PartialAction) -> ActionGroupoid {
    let arrows: Vec<Arrow> = pa.domain_pairs().into_iter().map(|(g, x)| Arrow { g, x }).collect();
    let mut index = vec![None; pa.group().order() * pa.space_size()];
    for (i, a) in arrows.iter().enumerate() {
        index[a.g * pa.space_size() + a.x] = Some(i);
    }
    ActionGroupoid {
        action: pa.clone(),
        arrows,
        index,
    }
}

impl ActionGroupoid {
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn contains(&self, arrow: Arrow) -> bool {
        self.lookup(arrow).is_some()
    }

    fn lookup(&self, arrow: Arrow) -> Option<usize> {
        if arrow.g >= self.action.group().order() || arrow.x >= self.action.space_size() {
            return None;
        }
        self.index[arrow.g * self.action.space_size() + arrow.x]
    }

    pub fn source(&self, f: Arrow) -> usize {
        f.x
    }

    pub fn target(&self, f: Arrow) -> usize {
        self.action.act(f.g, f.x).expect("arrow lies in G*X")
    }

    pub fn unit(&self, x: usize) -> Arrow {
        Arrow {
            g: FiniteGroup::IDENTITY,
            x,
        }
    }

    pub fn is_unit(&self, f: Arrow) -> bool {
        f.g == FiniteGroup::IDENTITY
    }

    /// `(g, x)^-1 = (g^-1, g.x)`
    pub fn inverse(&self, f: Arrow) -> Arrow {
        Arrow {
            g: self.action.group().inv(f.g),
            x: self.target(f),
        }
    }

    /// `(g, x) ∗ (h, y) = (gh, y)` when `x = h.y`, otherwise `None`.
    pub fn compose(&self, f: Arrow, h: Arrow) -> Option<Arrow> {
        if !self.contains(f) || !self.contains(h) || f.x != self.target(h) {
            return None;
        }
        let composite = Arrow {
            g: self.action.group().mul(f.g, h.g),
            x: h.x,
        };
        self.contains(composite).then_some(composite)
    }

    /// Every defined composite as `(f, h, f ∗ h)`.
    pub fn compositions(&self) -> Vec<(Arrow, Arrow, Arrow)> {
        let mut out = Vec::new();
        for &f in &self.arrows {
            for &h in &self.arrows {
                if let Some(c) = self.compose(f, h) {
                    out.push((f, h, c));
                }
            }
        }
        out
    }

    /// Connected components of the source/target graph, as sorted point sets.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let m = self.action.space_size();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for &f in &self.arrows {
            let (a, b) = (find(&mut parent, self.source(f)), find(&mut parent, self.target(f)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in 0..m {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Non-unit arrows with equal source and target.
    pub fn isotropy(&self) -> Vec<Arrow> {
        self.arrows
            .iter()
            .copied()
            .filter(|&f| !self.is_unit(f) && self.source(f) == self.target(f))
            .collect()
    }

    pub fn verify(&self) -> GroupoidReport {
        let arrows = &self.arrows;
        let inverse_is_involution = arrows
            .iter()
            .all(|&f| self.contains(self.inverse(f)) && self.inverse(self.inverse(f)) == f);
        let inverse_laws = arrows.iter().all(|&f| {
            let inv = self.inverse(f);
            self.compose(f, inv) == Some(self.unit(self.target(f))) && self.compose(inv, f) == Some(self.unit(self.source(f)))
        });
        let compositions = self.compositions();
        let source_target_laws = compositions
            .iter()
            .all(|&(f, h, c)| self.source(c) == self.source(h) && self.target(c) == self.target(f));
        let unit_laws = arrows.iter().all(|&f| {
            self.compose(self.unit(self.target(f)), f) == Some(f) && self.compose(f, self.unit(self.source(f))) == Some(f)
        });
        let associative = compositions.iter().all(|&(f, h, fh)| {
            arrows.iter().all(|&k| match self.compose(h, k) {
                Some(hk) => self.compose(fh, k) == self.compose(f, hk) && self.compose(fh, k).is_some(),
                None => true,
            })
        });
        let components = self.components();
        let orbits = full_quotient(&self.action).map(|q| q.classes().to_vec());
        let components_match_orbits = orbits.as_ref().is_ok_and(|o| *o == components);
        GroupoidReport {
            arrows: arrows.len(),
            units: arrows.iter().filter(|&&f| self.is_unit(f)).count(),
            compositions: compositions.len(),
            inverse_is_involution,
            inverse_laws,
            source_target_laws,
            unit_laws,
            associative,
            components: components.len(),
            orbits: orbits.map_or(0, |o| o.len()),
            components_match_orbits,
            trivial_isotropy: self.isotropy().is_empty(),
        }
    }

    /// DOT digraph with one edge `x -> g.x` per non-unit arrow.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph groupoid {\n");
        for x in self.action.points() {
            let _ = writeln!(out, "  p{x} [label=\"{}\"];", self.action.label(x));
        }
        for &f in self.arrows.iter().filter(|&&f| !self.is_unit(f)) {
            let _ = writeln!(out, "  p{} -> p{} [label=\"{}\"];", self.source(f), self.target(f), f.g);
        }
        out.push_str("}\n");
        out
    }
}
