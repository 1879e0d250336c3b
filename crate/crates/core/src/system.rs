//! Partial and full Steiner triple systems on dense point indices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// A block, always stored with its points ascending.
pub type Triple = [usize; 3];

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Partial,
    Steiner,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Partial => "partial",
            Kind::Steiner => "steiner",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a constructed system came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    /// PG(d,2).
    Pg2(usize),
    /// AG(d,3).
    Ag3(usize),
    /// PG(d,2) with one 15-point subspace replaced.
    PerturbedPg(usize),
    /// The hyperplane-union partial system for a given `n`.
    Section4(usize),
    Random(u64),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Plain => f.write_str("plain"),
            Variant::Pg2(d) => write!(f, "pg2 {d}"),
            Variant::Ag3(d) => write!(f, "ag3 {d}"),
            Variant::PerturbedPg(d) => write!(f, "perturbed-pg {d}"),
            Variant::Section4(n) => write!(f, "section4 {n}"),
            Variant::Random(seed) => write!(f, "random {seed}"),
        }
    }
}

/// Coordinate vectors keyed by point index; entries are field digits
/// written most significant coordinate first.
pub type Labels = BTreeMap<usize, Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryTag {
    pub variant: Variant,
    pub labels: Option<Labels>,
}

impl GeometryTag {
    pub fn plain() -> Self {
        GeometryTag {
            variant: Variant::Plain,
            labels: None,
        }
    }

    pub fn new(variant: Variant, labels: Option<Labels>) -> Self {
        GeometryTag { variant, labels }
    }

    pub fn label(&self, point: usize) -> Option<&[u8]> {
        self.labels.as_ref()?.get(&point).map(Vec::as_slice)
    }
}

impl Default for GeometryTag {
    fn default() -> Self {
        GeometryTag::plain()
    }
}

pub fn is_admissible(order: usize) -> bool {
    order % 6 == 1 || order % 6 == 3
}

/// A linear triple system: every pair of points lies in at most one triple.
/// Immutable once built.
#[derive(Clone)]
pub struct TripleSystem {
    order: usize,
    triples: Vec<Triple>,
    third: Vec<u32>,
    kind: Kind,
    tag: GeometryTag,
}

impl fmt::Debug for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleSystem")
            .field("order", &self.order)
            .field("kind", &self.kind)
            .field("variant", &self.tag.variant)
            .field("triples", &self.triples.len())
            .finish()
    }
}

impl PartialEq for TripleSystem {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.kind == other.kind && self.triples == other.triples
    }
}

impl Eq for TripleSystem {}

impl TripleSystem {
    /// Validates the triples and builds the pair index. `Kind::Steiner` is
    /// checked, not trusted.
    pub fn build<I>(order: usize, triples: I, kind: Kind) -> Result<Self>
    where
        I: IntoIterator<Item = Triple>,
    {
        Self::build_tagged(order, triples, kind, GeometryTag::plain())
    }

    pub fn build_tagged<I>(order: usize, triples: I, kind: Kind, tag: GeometryTag) -> Result<Self>
    where
        I: IntoIterator<Item = Triple>,
    {
        if order >= NONE as usize || order.checked_mul(order).is_none() {
            return Err(Error::too_large("order", order as u128, NONE as u128 - 1));
        }
        let mut third = vec![NONE; order * order];
        let mut sorted = Vec::new();
        for t in triples {
            let mut t = t;
            t.sort_unstable();
            if let Some(&p) = t.iter().find(|&&p| p >= order) {
                return Err(Error::OutOfRange { point: p, order });
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::DegenerateTriple(t));
            }
            for (x, y, z) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                if third[x * order + y] != NONE {
                    return Err(Error::DuplicatePair(x, y));
                }
                third[x * order + y] = z as u32;
                third[y * order + x] = z as u32;
            }
            sorted.push(t);
        }
        sorted.sort_unstable();
        if kind == Kind::Steiner {
            if order > 3 && !is_admissible(order) {
                return Err(Error::BadOrder(order));
            }
            for x in 0..order {
                for y in x + 1..order {
                    if third[x * order + y] == NONE {
                        return Err(Error::NotSteiner(x, y));
                    }
                }
            }
        }
        Ok(TripleSystem {
            order,
            triples: sorted,
            third,
            kind,
            tag,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Triples in canonical order: each ascending, then lexicographic.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_steiner(&self) -> bool {
        self.kind == Kind::Steiner
    }

    pub fn tag(&self) -> &GeometryTag {
        &self.tag
    }

    pub fn with_tag(mut self, tag: GeometryTag) -> Self {
        self.tag = tag;
        self
    }

    /// Returns a copy whose kind is `Steiner` if every pair is covered.
    pub fn promoted(mut self) -> Self {
        if self.kind == Kind::Partial && self.covers_all_pairs() {
            self.kind = Kind::Steiner;
        }
        self
    }

    pub fn covers_all_pairs(&self) -> bool {
        (self.order <= 3 || is_admissible(self.order))
            && self.triples.len() * 6 == self.order * self.order.saturating_sub(1)
    }

    pub fn require_steiner(&self) -> Result<()> {
        if self.is_steiner() {
            Ok(())
        } else {
            Err(Error::RequiresSteiner)
        }
    }

    /// The third point of the block through `x` and `y`, if the pair is covered.
    pub fn third_point(&self, x: usize, y: usize) -> Result<Option<usize>> {
        for p in [x, y] {
            if p >= self.order {
                return Err(Error::OutOfRange {
                    point: p,
                    order: self.order,
                });
            }
        }
        if x == y {
            return Err(Error::SamePoint(x));
        }
        Ok(self.third_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn third_unchecked(&self, x: usize, y: usize) -> Option<usize> {
        let z = self.third[x * self.order + y];
        (z != NONE).then_some(z as usize)
    }

    #[inline]
    pub(crate) fn third_row(&self, x: usize) -> &[u32] {
        &self.third[x * self.order..(x + 1) * self.order]
    }

    pub fn is_block(&self, a: usize, b: usize, c: usize) -> bool {
        a != b && a < self.order && b < self.order && self.third_unchecked(a, b) == Some(c)
    }

    pub fn check_set(&self, s: &PointSet) -> Result<()> {
        if s.order() != self.order {
            let point = s.iter().find(|&p| p >= self.order).unwrap_or(s.order());
            return Err(Error::OutOfRange {
                point,
                order: self.order,
            });
        }
        Ok(())
    }

    pub fn point_set<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<PointSet> {
        PointSet::from_points(self.order, points)
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.order)
    }

    /// The partial system of blocks lying entirely inside `s`, re-indexed by
    /// ascending old index. The returned map sends new indices to old ones.
    pub fn induced_subsystem(&self, s: &PointSet) -> Result<(TripleSystem, Vec<usize>)> {
        self.check_set(s)?;
        let map = s.to_vec();
        let mut new_index = vec![usize::MAX; self.order];
        for (i, &p) in map.iter().enumerate() {
            new_index[p] = i;
        }
        let triples: Vec<Triple> = self
            .triples
            .iter()
            .filter(|t| t.iter().all(|&p| s.contains(p)))
            .map(|t| [new_index[t[0]], new_index[t[1]], new_index[t[2]]])
            .collect();
        let labels = self.tag.labels.as_ref().map(|labels| {
            labels
                .iter()
                .filter(|(p, _)| s.contains(**p))
                .map(|(p, v)| (new_index[*p], v.clone()))
                .collect()
        });
        let sys = TripleSystem::build_tagged(
            map.len(),
            triples,
            Kind::Partial,
            GeometryTag::new(Variant::Plain, labels),
        )?
        .promoted();
        Ok((sys, map))
    }

    /// Points lying on at least one block.
    pub fn covered_points(&self) -> PointSet {
        let mut s = PointSet::empty(self.order);
        for t in &self.triples {
            for &p in t {
                s.insert(p);
            }
        }
        s
    }
}
