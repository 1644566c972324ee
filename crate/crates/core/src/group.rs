//! Finite groups given by multiplication tables.
//!
//! Elements are the indices `0..order`, and the identity is always index 0.
//! Subgroups, normality, quotients and restrictions are all derived from the
//! table; nothing else about the group is stored.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is empty")]
    Empty,
    #[error("row {row} has length {len}, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry mul[{a}][{b}] = {value} is out of range for order {order}")]
    EntryOutOfRange {
        a: usize,
        b: usize,
        value: usize,
        order: usize,
    },
    #[error("{axis} {index} of the table is not a permutation")]
    NotLatinSquare { axis: Axis, index: usize },
    #[error("element 0 is not a two-sided identity (fails against element {element})")]
    NoIdentityAtZero { element: usize },
    #[error("element {element} has no two-sided inverse")]
    MissingInverse { element: usize },
    #[error("({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("elements {elements:?} do not form a subgroup")]
    NotASubgroup { elements: Vec<usize> },
    #[error("subgroup {elements:?} is not normal")]
    NotNormal { elements: Vec<usize> },
    #[error("subgroup {inner:?} is not contained in {outer:?}")]
    NotNested { inner: Vec<usize>, outer: Vec<usize> },
    #[error("unknown group name {0:?}")]
    UnknownName(String),
}

/// A finite group of order `n` stored as a flat `n*n` Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteGroup {
    pub const IDENTITY: usize = 0;

    /// Validates a Cayley table, reporting the first violated axiom.
    ///
    /// Checks run in the order: shape, entry range, Latin square,
    /// identity at index 0, two-sided inverses, associativity.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (b, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange {
                        a: row,
                        b,
                        value,
                        order,
                    });
                }
            }
        }

        let mut seen = vec![false; order];
        for (index, entries) in table.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = false);
            for &v in entries {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NotLatinSquare {
                        axis: Axis::Row,
                        index,
                    });
                }
            }
        }
        for index in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for entries in table {
                if std::mem::replace(&mut seen[entries[index]], true) {
                    return Err(GroupError::NotLatinSquare {
                        axis: Axis::Column,
                        index,
                    });
                }
            }
        }

        for element in 0..order {
            if table[0][element] != element || table[element][0] != element {
                return Err(GroupError::NoIdentityAtZero { element });
            }
        }

        let mut inv = vec![0; order];
        for (element, slot) in inv.iter_mut().enumerate() {
            // Latin rows give exactly one right inverse candidate.
            let right = table[element].iter().position(|&v| v == 0).unwrap();
            if table[right][element] != 0 {
                return Err(GroupError::MissingInverse { element });
            }
            *slot = right;
        }

        for a in 0..order {
            for b in 0..order {
                let ab = table[a][b];
                for c in 0..order {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NonAssociative { a, b, c });
                    }
                }
            }
        }

        Ok(Self {
            order,
            mul: table.iter().flatten().copied().collect(),
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// `g * a * g^-1`
    pub fn conjugate(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, self.elements().collect())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, vec![Self::IDENTITY])
    }

    /// Checks closure under multiplication and inverses and membership of 1.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup, GroupError> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        let not_a_subgroup = || GroupError::NotASubgroup {
            elements: set.iter().copied().collect(),
        };
        if set.iter().any(|&g| g >= self.order) || !set.contains(&Self::IDENTITY) {
            return Err(not_a_subgroup());
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(not_a_subgroup());
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(not_a_subgroup());
                }
            }
        }
        Ok(Subgroup::from_sorted(self.order, set.into_iter().collect()))
    }

    /// Smallest subgroup containing `generators`.
    pub fn generated(&self, generators: &[usize]) -> Subgroup {
        let mut mask = vec![false; self.order];
        mask[Self::IDENTITY] = true;
        let mut queue: VecDeque<usize> = VecDeque::from([Self::IDENTITY]);
        while let Some(a) = queue.pop_front() {
            for &g in generators {
                let next = self.mul(a, g);
                if !mask[next] {
                    mask[next] = true;
                    queue.push_back(next);
                }
            }
        }
        let elements = (0..self.order).filter(|&g| mask[g]).collect();
        Subgroup::from_sorted(self.order, elements)
    }

    pub fn is_normal(&self, subgroup: &Subgroup) -> bool {
        self.elements().all(|g| {
            subgroup
                .elements()
                .iter()
                .all(|&h| subgroup.contains(self.conjugate(h, g)))
        })
    }

    pub fn require_normal(&self, subgroup: &Subgroup) -> Result<(), GroupError> {
        if self.is_normal(subgroup) {
            Ok(())
        } else {
            Err(GroupError::NotNormal {
                elements: subgroup.elements().to_vec(),
            })
        }
    }

    /// Every subgroup, sorted by element list.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::from([self.trivial_subgroup()]);
        found.insert(vec![Self::IDENTITY]);
        while let Some(sub) = queue.pop_front() {
            for g in self.elements().filter(|&g| !sub.contains(g)) {
                let mut gens = sub.elements().to_vec();
                gens.push(g);
                let bigger = self.generated(&gens);
                if found.insert(bigger.elements().to_vec()) {
                    queue.push_back(bigger);
                }
            }
        }
        found
            .into_iter()
            .map(|e| Subgroup::from_sorted(self.order, e))
            .collect()
    }

    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        self.subgroups()
            .into_iter()
            .filter(|s| self.is_normal(s))
            .collect()
    }

    /// The subgroup as a group in its own right, reindexed in increasing
    /// order of parent index (so the identity stays at 0).
    pub fn restrict(&self, subgroup: &Subgroup) -> Restriction {
        let embedding = subgroup.elements().to_vec();
        let mut local = vec![None; self.order];
        for (i, &g) in embedding.iter().enumerate() {
            local[g] = Some(i);
        }
        let k = embedding.len();
        let mut mul = Vec::with_capacity(k * k);
        for &a in &embedding {
            for &b in &embedding {
                mul.push(local[self.mul(a, b)].expect("subgroup is closed"));
            }
        }
        let inv = embedding
            .iter()
            .map(|&a| local[self.inv(a)].expect("subgroup is closed"))
            .collect();
        Restriction {
            group: FiniteGroup { order: k, mul, inv },
            embedding,
            local,
        }
    }

    /// The quotient `G/N` by a normal subgroup. Cosets are numbered in order
    /// of their least element, so the identity coset is 0.
    pub fn quotient(&self, normal: &Subgroup) -> Result<QuotientGroup, GroupError> {
        self.require_normal(normal)?;
        let mut coset_of = vec![usize::MAX; self.order];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for g in self.elements() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let mut coset: Vec<usize> = normal.elements().iter().map(|&h| self.mul(g, h)).collect();
            coset.sort_unstable();
            for &x in &coset {
                coset_of[x] = cosets.len();
            }
            cosets.push(coset);
        }
        let k = cosets.len();
        let mut mul = Vec::with_capacity(k * k);
        for a in &cosets {
            for b in &cosets {
                mul.push(coset_of[self.mul(a[0], b[0])]);
            }
        }
        let inv = cosets.iter().map(|c| coset_of[self.inv(c[0])]).collect();
        Ok(QuotientGroup {
            group: FiniteGroup { order: k, mul, inv },
            coset_of,
            cosets,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs positive order");
        Self::build(n, |a, b| (a + b) % n)
    }

    /// Dihedral group of order `2n`; `r^k s^e` is index `k + n*e`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0, "dihedral group needs n >= 1");
        Self::build(2 * n, |a, b| {
            let (ka, ea) = (a % n, a / n);
            let (kb, eb) = (b % n, b / n);
            let k = if ea == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
            k + n * ((ea + eb) % 2)
        })
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}` indexed `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion() -> Self {
        // unit index u in {0:1, 1:i, 2:j, 3:k}, sign bit s; element = 2u + s
        fn unit_mul(a: usize, b: usize) -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        }
        Self::build(8, |a, b| {
            let (u, neg) = unit_mul(a / 2, b / 2);
            let sign = (a % 2) ^ (b % 2) ^ usize::from(neg);
            2 * u + sign
        })
    }

    /// Symmetric group on `n` letters, elements in lexicographic order of
    /// their one-line notation.
    pub fn symmetric(n: usize) -> Self {
        assert!((1..=6).contains(&n), "symmetric group limited to n <= 6");
        let mut gens = Vec::new();
        if n > 1 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            gens.push(swap);
            gens.push(cycle);
        }
        Self::from_permutations(n, &gens)
    }

    /// Permutation group generated by `generators` acting on `0..degree`.
    /// Composition is `(p*q)(i) = p(q(i))`; elements are sorted
    /// lexicographically, which puts the identity first.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Self {
        let identity: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let next = compose(g, &p);
                if found.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let perms: Vec<Vec<usize>> = found.into_iter().collect();
        let index: BTreeMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        Self::build(perms.len(), |a, b| index[compose(&perms[a], &perms[b]).as_slice()])
    }

    /// `G x H` with `(a, b)` at index `a * |H| + b`.
    pub fn direct_product(left: &Self, right: &Self) -> Self {
        let m = right.order;
        Self::build(left.order * m, |a, b| {
            left.mul(a / m, b / m) * m + right.mul(a % m, b % m)
        })
    }

    /// Resolves names like `Z4`, `C6`, `S3`, `D4` (order 8), `Q8`, `V4`,
    /// `trivial`, and `x`-separated products such as `Z2xZ4`.
    pub fn by_name(name: &str) -> Result<Self, GroupError> {
        let unknown = || GroupError::UnknownName(name.to_string());
        let lowered = name.trim().to_ascii_lowercase().replace('/', "");
        let factors: Vec<&str> = lowered.split(['x', '×']).map(str::trim).collect();
        if factors.len() > 1 {
            let mut acc = Self::trivial();
            for f in factors {
                let g = Self::by_name(f).map_err(|_| unknown())?;
                acc = Self::direct_product(&acc, &g);
            }
            return Ok(acc);
        }
        let name_lc = factors[0];
        match name_lc {
            "trivial" | "1" | "e" => return Ok(Self::trivial()),
            "q8" => return Ok(Self::quaternion()),
            "v4" | "klein" => return Ok(Self::direct_product(&Self::cyclic(2), &Self::cyclic(2))),
            _ => {}
        }
        let (kind, digits) = name_lc.split_at(1.min(name_lc.len()));
        let n: usize = digits.parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        match kind {
            "z" | "c" if n <= 64 => Ok(Self::cyclic(n)),
            "s" if n <= 5 => Ok(Self::symmetric(n)),
            "d" if n <= 32 => Ok(Self::dihedral(n)),
            _ => Err(unknown()),
        }
    }

    fn build(order: usize, op: impl Fn(usize, usize) -> usize) -> Self {
        let mut mul = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                mul.push(op(a, b));
            }
        }
        let inv = (0..order)
            .map(|a| (0..order).find(|&b| mul[a * order + b] == 0).expect("group has inverses"))
            .collect();
        Self { order, mul, inv }
    }
}

/// A subgroup of a specific parent group, stored as a sorted element list
/// plus a membership mask over the parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    fn from_sorted(parent_order: usize, elements: Vec<usize>) -> Self {
        let mut mask = vec![false; parent_order];
        for &g in &elements {
            mask[g] = true;
        }
        Self { elements, mask }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask.get(g).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn parent_order(&self) -> usize {
        self.mask.len()
    }
}

/// A subgroup viewed as a standalone group.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub group: FiniteGroup,
    /// Local index -> parent index.
    pub embedding: Vec<usize>,
    local: Vec<Option<usize>>,
}

impl Restriction {
    pub fn local_index(&self, parent: usize) -> Option<usize> {
        self.local.get(parent).copied().flatten()
    }

    /// Re-expresses a parent subgroup contained in this one in local indices.
    pub fn pull(&self, parent_subgroup: &Subgroup) -> Result<Subgroup, GroupError> {
        let local: Option<Vec<usize>> = parent_subgroup
            .elements()
            .iter()
            .map(|&g| self.local_index(g))
            .collect();
        match local {
            Some(mut elements) => {
                elements.sort_unstable();
                Ok(Subgroup::from_sorted(self.group.order(), elements))
            }
            None => Err(GroupError::NotNested {
                inner: parent_subgroup.elements().to_vec(),
                outer: self.embedding.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuotientGroup {
    pub group: FiniteGroup,
    /// Parent element -> coset index.
    pub coset_of: Vec<usize>,
    pub cosets: Vec<Vec<usize>>,
}
