//! Finite intersection-closed families of linear subspaces.
//!
//! A [`Semilattice`] always contains `{0}` (the member whose boundary sphere
//! is empty) and never the ambient space. Members are kept in canonical
//! order: ascending dimension, then lexicographic on the RREF basis, so
//! `members[0]` is always `{0}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{rank, LinalgError, QMatrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemilatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("generator {0} equals the ambient space")]
    FullGenerator(usize),
    #[error("family is not closed under intersection")]
    NotClosed,
    #[error("family does not contain the zero subspace")]
    MissingZero,
    #[error("member index {0} out of range")]
    BadIndex(usize),
    #[error("member {0} is not a minimal remaining element")]
    NotMinimal(usize),
    #[error("member {0} has already been blown up")]
    AlreadyReduced(usize),
    #[error("the zero subspace is not a blow-up center")]
    ZeroCenter,
    #[error("subspace is not a member of the semilattice")]
    NotMember,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not preserve the semilattice")]
    NotInvariant,
    #[error("sequence is not an admissible ordering")]
    NotAdmissible,
    #[error("too many members ({0}) to count orderings exactly")]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, SemilatticeError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Semilattice {
    ambient: usize,
    members: Vec<Subspace>,
}

/// Smallest intersection-closed family containing `generators` and `{0}`.
pub fn close(ambient: usize, generators: &[Subspace]) -> Result<Semilattice> {
    let mut found: BTreeSet<Subspace> = BTreeSet::new();
    found.insert(Subspace::zero(ambient)?);
    for (i, g) in generators.iter().enumerate() {
        if g.ambient() != ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient,
                found: g.ambient(),
            }
            .into());
        }
        if g.is_full() {
            return Err(SemilatticeError::FullGenerator(i));
        }
        found.insert(g.clone());
    }
    // Worklist fixpoint: each new member is intersected against all known ones.
    let mut pending: Vec<Subspace> = found.iter().cloned().collect();
    while let Some(next) = pending.pop() {
        let known: Vec<Subspace> = found.iter().cloned().collect();
        for other in &known {
            let meet = next.intersect(other)?;
            if found.insert(meet.clone()) {
                pending.push(meet);
            }
        }
    }
    Ok(Semilattice {
        ambient,
        members: found.into_iter().collect(),
    })
}

impl Semilattice {
    /// Validates an explicit member list (any order, duplicates removed).
    pub fn from_members(ambient: usize, members: Vec<Subspace>) -> Result<Self> {
        let set: BTreeSet<Subspace> = members.into_iter().collect();
        for (i, m) in set.iter().enumerate() {
            if m.ambient() != ambient {
                return Err(LinalgError::DimensionMismatch {
                    expected: ambient,
                    found: m.ambient(),
                }
                .into());
            }
            if m.is_full() {
                return Err(SemilatticeError::FullGenerator(i));
            }
        }
        if !set.contains(&Subspace::zero(ambient)?) {
            return Err(SemilatticeError::MissingZero);
        }
        let members: Vec<Subspace> = set.into_iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if members.binary_search(&a.intersect(b)?).is_err() {
                    return Err(SemilatticeError::NotClosed);
                }
            }
        }
        Ok(Self { ambient, members })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, index: usize) -> Result<&Subspace> {
        self.members.get(index).ok_or(SemilatticeError::BadIndex(index))
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.members.binary_search(s).ok()
    }

    /// Indices of the members other than `{0}`.
    pub fn nontrivial(&self) -> std::ops::Range<usize> {
        1..self.members.len()
    }

    /// `members[a] ⊂ members[b]` (non-strict).
    pub fn is_subset(&self, a: usize, b: usize) -> bool {
        self.members[b]
            .contains(&self.members[a])
            .expect("members share the ambient dimension")
    }

    /// Strict inclusion table over member indices.
    pub fn strict_inclusions(&self) -> Vec<Vec<bool>> {
        let n = self.members.len();
        (0..n)
            .map(|a| (0..n).map(|b| a != b && self.is_subset(a, b)).collect())
            .collect()
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        let m = self.members[a]
            .intersect(&self.members[b])
            .expect("members share the ambient dimension");
        self.index_of(&m).expect("semilattice is intersection-closed")
    }
}

/// A linear extension of the inclusion order on the nontrivial members,
/// given as member indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AdmissibleOrdering {
    pub sequence: Vec<usize>,
}

impl AdmissibleOrdering {
    pub fn canonical(s: &Semilattice) -> Self {
        Self {
            sequence: s.nontrivial().collect(),
        }
    }

    /// Checks `P_i ⊂ P_j ⇒ i ≤ j` and that the sequence is a permutation of
    /// the nontrivial members.
    pub fn validate(&self, s: &Semilattice) -> Result<()> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for &i in &self.sequence {
            if i == 0 || i >= s.len() || !seen.insert(i) {
                return Err(SemilatticeError::NotAdmissible);
            }
        }
        if seen.len() != s.len() - 1 {
            return Err(SemilatticeError::NotAdmissible);
        }
        for (pos, &a) in self.sequence.iter().enumerate() {
            for &b in &self.sequence[..pos] {
                if s.is_subset(a, b) {
                    return Err(SemilatticeError::NotAdmissible);
                }
            }
        }
        Ok(())
    }
}

/// Up to `limit` admissible orderings; the first is the canonical one.
pub fn admissible_orderings(s: &Semilattice, limit: usize) -> Vec<AdmissibleOrdering> {
    let less = s.strict_inclusions();
    let items: Vec<usize> = s.nontrivial().collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(items.len());
    let mut used = vec![false; s.len()];
    extend_orderings(&items, &less, &mut used, &mut current, limit, &mut out);
    if out.is_empty() && limit > 0 {
        out.push(AdmissibleOrdering { sequence: vec![] });
    }
    out
}

fn extend_orderings(
    items: &[usize],
    less: &[Vec<bool>],
    used: &mut [bool],
    current: &mut Vec<usize>,
    limit: usize,
    out: &mut Vec<AdmissibleOrdering>,
) {
    if out.len() >= limit {
        return;
    }
    if current.len() == items.len() {
        if !current.is_empty() {
            out.push(AdmissibleOrdering {
                sequence: current.clone(),
            });
        }
        return;
    }
    for &i in items {
        if used[i] || items.iter().any(|&j| !used[j] && less[j][i]) {
            continue;
        }
        used[i] = true;
        current.push(i);
        extend_orderings(items, less, used, current, limit, out);
        current.pop();
        used[i] = false;
        if out.len() >= limit {
            return;
        }
    }
}

/// A random admissible ordering: at every step one of the currently minimal
/// remaining members is chosen uniformly.
pub fn random_admissible_ordering<R: rand::Rng + ?Sized>(
    s: &Semilattice,
    rng: &mut R,
) -> AdmissibleOrdering {
    let less = s.strict_inclusions();
    let mut remaining: Vec<usize> = s.nontrivial().collect();
    let mut sequence = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let minimal: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| less[j][i]))
            .collect();
        let pick = minimal[rng.gen_range(0..minimal.len())];
        remaining.retain(|&i| i != pick);
        sequence.push(pick);
    }
    AdmissibleOrdering { sequence }
}

/// Exact number of admissible orderings, by dynamic programming over the
/// down-closed subsets of the nontrivial members.
pub fn count_admissible_orderings(s: &Semilattice) -> Result<u128> {
    let items: Vec<usize> = s.nontrivial().collect();
    let m = items.len();
    if m > 24 {
        return Err(SemilatticeError::TooLarge(m));
    }
    let mut below = vec![0u32; m];
    for (a, &i) in items.iter().enumerate() {
        for (b, &j) in items.iter().enumerate() {
            if a != b && s.is_subset(j, i) {
                below[a] |= 1 << b;
            }
        }
    }
    let full = (1u32 << m) - 1;
    // Masks with the same popcount are processed together, layer by layer.
    let mut layer: BTreeMap<u32, u128> = BTreeMap::from([(0, 1)]);
    for _ in 0..m {
        let mut next: BTreeMap<u32, u128> = BTreeMap::new();
        for (&mask, &count) in &layer {
            for a in 0..m {
                if mask & (1 << a) == 0 && below[a] & !mask == 0 {
                    *next.entry(mask | (1 << a)).or_insert(0) += count;
                }
            }
        }
        layer = next;
    }
    Ok(layer.get(&full).copied().unwrap_or(0))
}

/// How a surviving member is represented after blowing up a center `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    /// `P ⊂ Q`: the member becomes `[Q:P]`.
    Lifted,
    /// `Q ∩ P` was already blown up (or is `{0}`): the lift of `Q` is disjoint
    /// from the new front face and `Q` is carried over unchanged.
    Untouched,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedMember {
    pub member: usize,
    pub tag: Tag,
}

/// The family left after one blow-up step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub center: usize,
    /// Surviving nontrivial members, in canonical order, with their tags.
    pub members: Vec<TaggedMember>,
}

impl Reduction {
    /// Cardinality counting the empty element that `{0}` and the center both map to.
    pub fn family_size(&self) -> usize {
        self.members.len() + 1
    }
}

/// Progress through an iterated blow-up: which nontrivial members are still
/// waiting to be blown up.
#[derive(Clone, Debug)]
pub struct ReductionState<'a> {
    lattice: &'a Semilattice,
    remaining: BTreeSet<usize>,
}

impl<'a> ReductionState<'a> {
    pub fn new(lattice: &'a Semilattice) -> Self {
        Self {
            lattice,
            remaining: lattice.nontrivial().collect(),
        }
    }

    pub fn remaining(&self) -> &BTreeSet<usize> {
        &self.remaining
    }

    /// Size of the current family, counting the empty element.
    pub fn family_size(&self) -> usize {
        self.remaining.len() + 1
    }

    pub fn is_minimal(&self, center: usize) -> bool {
        self.remaining.contains(&center)
            && self
                .remaining
                .iter()
                .all(|&q| q == center || !self.lattice.is_subset(q, center))
    }

    pub fn reduce(&mut self, center: usize) -> Result<Reduction> {
        if center == 0 {
            return Err(SemilatticeError::ZeroCenter);
        }
        if center >= self.lattice.len() {
            return Err(SemilatticeError::BadIndex(center));
        }
        if !self.remaining.contains(&center) {
            return Err(SemilatticeError::AlreadyReduced(center));
        }
        if !self.is_minimal(center) {
            return Err(SemilatticeError::NotMinimal(center));
        }
        self.remaining.remove(&center);
        let members = self
            .remaining
            .iter()
            .map(|&q| {
                let tag = if self.lattice.is_subset(center, q) {
                    Tag::Lifted
                } else {
                    let meet = self.lattice.meet(center, q);
                    debug_assert!(meet == 0 || !self.remaining.contains(&meet));
                    Tag::Untouched
                };
                TaggedMember { member: q, tag }
            })
            .collect();
        Ok(Reduction { center, members })
    }
}

/// One reduction step of `s` along a minimal nontrivial member `p`.
pub fn reduce(s: &Semilattice, p: &Subspace) -> Result<Reduction> {
    let center = s.index_of(p).ok_or(SemilatticeError::NotMember)?;
    ReductionState::new(s).reduce(center)
}

/// Runs the full iterated reduction along an ordering.
pub fn reduce_along(s: &Semilattice, ordering: &AdmissibleOrdering) -> Result<Vec<Reduction>> {
    ordering.validate(s)?;
    let mut state = ReductionState::new(s);
    ordering
        .sequence
        .iter()
        .map(|&p| state.reduce(p))
        .collect()
}

/// Tag events keyed by the unordered member pair they concern.
pub fn tag_events(steps: &[Reduction]) -> BTreeMap<(usize, usize), Vec<Tag>> {
    let mut events: BTreeMap<(usize, usize), Vec<Tag>> = BTreeMap::new();
    for step in steps {
        for tm in &step.members {
            let key = (step.center.min(tm.member), step.center.max(tm.member));
            events.entry(key).or_default().push(tm.tag);
        }
    }
    for tags in events.values_mut() {
        tags.sort();
    }
    events
}

/// Clean-intersection check for a family of linear subspaces.
///
/// Every sub-family of size at most `max_subfamily` must have its meet in the
/// family, and the meet computed by folding pairwise intersections must have
/// the dimension predicted by stacking the defining equations (the tangent
/// side of the clean-intersection condition).
pub fn is_clean_with_depth(family: &[Subspace], max_subfamily: usize) -> bool {
    let Some(first) = family.first() else {
        return true;
    };
    let n = first.ambient();
    if family.iter().any(|y| y.ambient() != n) {
        return false;
    }
    let members: BTreeSet<&Subspace> = family.iter().collect();
    let annihilators: Vec<Vec<Vec<_>>> = family
        .iter()
        .map(|y| y.orthogonal_complement().basis().to_vec())
        .collect();
    let mut chosen = Vec::new();
    check_subfamilies(family, &annihilators, &members, n, 0, max_subfamily, &mut chosen)
}

fn check_subfamilies(
    family: &[Subspace],
    annihilators: &[Vec<Vec<crate::exact_linalg::Rational>>],
    members: &BTreeSet<&Subspace>,
    n: usize,
    start: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() >= 2 {
        let meet = chosen[1..].iter().fold(family[chosen[0]].clone(), |acc, &i| {
            acc.intersect(&family[i]).expect("common ambient")
        });
        if !members.contains(&meet) {
            return false;
        }
        let equations: Vec<_> = chosen
            .iter()
            .flat_map(|&i| annihilators[i].iter().cloned())
            .collect();
        if meet.dim() != n - rank(&equations, n) {
            return false;
        }
    }
    if chosen.len() == depth {
        return true;
    }
    for i in start..family.len() {
        chosen.push(i);
        let ok = check_subfamilies(family, annihilators, members, n, i + 1, depth, chosen);
        chosen.pop();
        if !ok {
            return false;
        }
    }
    true
}

pub const DEFAULT_CLEAN_DEPTH: usize = 4;

pub fn is_clean(family: &[Subspace]) -> bool {
    is_clean_with_depth(family, DEFAULT_CLEAN_DEPTH)
}

/// Applies `g` to every member and re-canonicalizes.
pub fn act(s: &Semilattice, g: &QMatrix) -> Result<Semilattice> {
    if !g.is_square() || g.rows() != s.ambient {
        return Err(LinalgError::DimensionMismatch {
            expected: s.ambient,
            found: g.rows(),
        }
        .into());
    }
    if !g.is_invertible() {
        return Err(SemilatticeError::Singular);
    }
    let images = s
        .members
        .iter()
        .map(|m| m.image(g))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Semilattice::from_members(s.ambient, images)
}

/// Like [`act`], but requires `g(s) = s` and returns the induced permutation
/// of member indices (`perm[i]` is the index of `g(members[i])`).
pub fn act_invariant(s: &Semilattice, g: &QMatrix) -> Result<Vec<usize>> {
    let image = act(s, g)?;
    if image != *s {
        return Err(SemilatticeError::NotInvariant);
    }
    s.members
        .iter()
        .map(|m| {
            let gm = m.image(g)?;
            s.index_of(&gm).ok_or(SemilatticeError::NotInvariant)
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SemilatticeRepr {
    ambient: usize,
    members: Vec<Subspace>,
}

impl Serialize for Semilattice {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SemilatticeRepr {
            ambient: self.ambient,
            members: self.members.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Semilattice {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SemilatticeRepr::deserialize(deserializer)?;
        Semilattice::from_members(repr.ambient, repr.members).map_err(serde::de::Error::custom)
    }
}
