use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A subset of the points `0..order` of some system, stored as a bitset.
///
/// Ordering is lexicographic on the ascending member lists, which is the
/// canonical order used whenever results are sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    order: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(order: usize) -> Self {
        PointSet {
            order,
            words: vec![0; order.div_ceil(64)],
        }
    }

    pub fn full(order: usize) -> Self {
        let mut s = PointSet::empty(order);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            let bits = (order - lo).min(64);
            *w = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        }
        s
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(order: usize, points: I) -> Result<Self> {
        let mut s = PointSet::empty(order);
        for p in points {
            if p >= order {
                return Err(Error::OutOfRange { point: p, order });
            }
            s.insert(p);
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        p < self.order && self.words[p >> 6] >> (p & 63) & 1 == 1
    }

    /// Inserts `p`, returning whether it was new. Panics if `p >= order`.
    #[inline]
    pub fn insert(&mut self, p: usize) -> bool {
        assert!(p < self.order, "point {p} out of range for order {}", self.order);
        let w = &mut self.words[p >> 6];
        let bit = 1u64 << (p & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, p: usize) -> bool {
        if p >= self.order {
            return false;
        }
        let w = &mut self.words[p >> 6];
        let bit = 1u64 << (p & 63);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.order
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> PointSet {
        PointSet::full(self.order).difference(self)
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn zip_with(&self, other: &PointSet, f: impl Fn(u64, u64) -> u64) -> PointSet {
        assert_eq!(self.order, other.order, "point sets over different orders");
        PointSet {
            order: self.order,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then(self.order.cmp(&other.order))
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PointSet {
    /// Comma-separated ascending indices, the same form `--set` accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}
