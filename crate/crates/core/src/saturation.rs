//! Hyperplanes of PG(n,2), the intersection-variance identity, counting
//! lower bounds for saturating sets, and exhaustive saturating searches.
//!
//! Every comparison involving a square root is squared first and carried
//! out in exact integer or rational arithmetic.

use itertools::Itertools;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::constructions::{pg2_point, pg2_value};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointset::PointSet;
use crate::system::{TripleSystem, NONE};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneFamily {
    pub ambient_dim: usize,
    /// Hyperplane `i` is the kernel of the functional with bits `i + 1`.
    pub hyperplanes: Vec<PointSet>,
}

fn pg_order(n: usize) -> usize {
    (1usize << (n + 1)) - 1
}

fn check_dim(n: usize) -> Result<()> {
    let cap = Limits::from_env().hyperplane_dim;
    if n == 0 {
        return Err(Error::InvalidArgument("projective dimension must be >= 1".into()));
    }
    if n > cap {
        return Err(Error::too_large("projective dimension", n as u128, cap as u128));
    }
    Ok(())
}

impl HyperplaneFamily {
    pub fn order(&self) -> usize {
        pg_order(self.ambient_dim)
    }

    /// Counts from double counting: `2^{n+1} − 1` hyperplanes of `2^n − 1`
    /// points, `2^n − 1` through each point and `2^{n−1} − 1` through each line.
    pub fn check_invariants(&self) -> bool {
        let n = self.ambient_dim;
        let order = self.order();
        if self.hyperplanes.len() != order {
            return false;
        }
        let h_size = (1usize << n) - 1;
        if self.hyperplanes.iter().any(|h| h.len() != h_size) {
            return false;
        }
        let per_point = (0..order).all(|p| self.hyperplanes.iter().filter(|h| h.contains(p)).count() == h_size);
        let per_line = (1usize << (n - 1)) - 1;
        let lines_ok = (1..=order).all(|a| {
            (a + 1..=order).filter(|&b| (a ^ b) > b).all(|b| {
                let line = [a, b, a ^ b].map(|v| pg2_point(n, v));
                self.hyperplanes
                    .iter()
                    .filter(|h| line.iter().all(|&p| h.contains(p)))
                    .count()
                    == per_line
            })
        });
        per_point && lines_ok
    }
}

pub fn hyperplanes_pg2(n: usize) -> Result<HyperplaneFamily> {
    check_dim(n)?;
    let order = pg_order(n);
    let hyperplanes = (1..=order)
        .map(|f| {
            PointSet::from_points(
                order,
                (0..order).filter(|&p| (pg2_value(n, p) & f).count_ones().is_multiple_of(2)),
            )
            .expect("in range")
        })
        .collect();
    let family = HyperplaneFamily {
        ambient_dim: n,
        hyperplanes,
    };
    debug_assert!(n > 6 || family.check_invariants());
    Ok(family)
}

fn check_subset(n: usize, u: &PointSet) -> Result<()> {
    let order = pg_order(n);
    if u.order() != order {
        return Err(Error::OutOfRange {
            point: u.iter().find(|&p| p >= order).unwrap_or(u.order()),
            order,
        });
    }
    Ok(())
}

/// `Σ_H (u(H) − m/2)²` computed directly, and the closed form
/// `−m²/4 + m·2^{n−1}`.
pub fn variance_identity(n: usize, u: &PointSet) -> Result<(Rational, Rational)> {
    check_dim(n)?;
    check_subset(n, u)?;
    let family = hyperplanes_pg2(n)?;
    let m = u.len() as i128;
    let sum4: i128 = family
        .hyperplanes
        .iter()
        .map(|h| {
            let dev2 = 2 * h.intersection_len(u) as i128 - m;
            dev2 * dev2
        })
        .sum();
    let lhs = Rational::new(sum4, 4);
    let rhs = Rational::new(-m * m, 4) + Rational::from_integer(m * (1i128 << n) / 2);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub hyperplane_index: usize,
    pub hyperplane: PointSet,
    pub intersection: usize,
    /// `|u(H) − m/2|`.
    pub deviation: Rational,
    /// `m/4 − m²/2^{n+3}`.
    pub radicand: Rational,
    pub radicand_negative: bool,
    /// `m = 0`: the bound is zero and the strict inequality is vacuous.
    pub degenerate: bool,
    /// `deviation² > radicand`, when the claim applies.
    pub bound_holds: Option<bool>,
}

/// The hyperplane maximizing `|u(H) − m/2|` (least functional on ties).
pub fn deviating_hyperplane(n: usize, u: &PointSet) -> Result<Deviation> {
    check_dim(n)?;
    check_subset(n, u)?;
    let family = hyperplanes_pg2(n)?;
    let m = u.len() as i128;
    let (index, intersection) = family
        .hyperplanes
        .iter()
        .map(|h| h.intersection_len(u))
        .enumerate()
        .fold((0, None::<usize>), |best, (i, k)| match best.1 {
            Some(b) if (2 * b as i128 - m).abs() >= (2 * k as i128 - m).abs() => best,
            _ => (i, Some(k)),
        });
    let intersection = intersection.expect("at least one hyperplane");
    let deviation = Rational::new((2 * intersection as i128 - m).abs(), 2);
    let radicand = Rational::new(m, 4) - Rational::new(m * m, 1i128 << (n + 3));
    let radicand_negative = radicand < Rational::from_integer(0);
    let degenerate = m == 0;
    let bound_holds = (!radicand_negative && !degenerate).then(|| deviation * deviation > radicand);
    Ok(Deviation {
        hyperplane_index: index,
        hyperplane: family.hyperplanes[index].clone(),
        intersection,
        deviation,
        radicand,
        radicand_negative,
        degenerate,
        bound_holds,
    })
}

const PRIME_POWERS: [u64; 27] = [
    2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49, 53, 59, 61, 64,
];

/// Least `s` with `(q−1)·C(s,2) + s ≥ (q^{n+1} − 1)/(q − 1)`.
pub fn lunelli_sce_min(n: usize, q: u64) -> Result<u64> {
    if !PRIME_POWERS.contains(&q) {
        return Err(Error::NotPrimePower(q));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("projective dimension must be >= 1".into()));
    }
    let q = q as u128;
    let threshold = q
        .checked_pow(n as u32 + 1)
        .filter(|&p| p < 1u128 << 100)
        .ok_or_else(|| Error::too_large("q^(n+1)", u128::MAX, 1u128 << 100))?;
    let threshold = (threshold - 1) / (q - 1);
    let covered = |s: u128| (q - 1) * (s * s.saturating_sub(1) / 2) + s;
    let (mut lo, mut hi) = (0u128, threshold);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if covered(mid) >= threshold {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo as u64)
}

/// Whether some hyperplane split `m1` out of `m` points can occur for a
/// saturating `m`-set: the split must deviate from `m/2` by more than the
/// guaranteed radius, and cover the points off the hyperplane.
fn refined_survives(n: usize, m: u128) -> bool {
    let scale = 1u128 << (n + 1);
    let rad = (m * scale) as i128 - (m * m) as i128;
    (0..=m).any(|m1| {
        let d = 2 * m1 as i128 - m as i128;
        let outside_deviation = d * d * scale as i128 > rad;
        let covers = m - m1 + m1 * (m - m1) >= (1u128 << n) - 1;
        outside_deviation && covers
    })
}

/// The Lunelli–Sce minimum, raised while every hyperplane split permitted
/// by the deviation bound fails the covering condition (PG(n,2) only).
pub fn refined_saturating_bound(n: usize) -> Result<u64> {
    check_dim(n)?;
    let mut m = lunelli_sce_min(n, 2)? as u128;
    while !refined_survives(n, m) {
        m += 1;
    }
    Ok(m as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaturationBound {
    pub n: usize,
    pub q: u64,
    pub lunelli_sce_min: u64,
    pub refined_min: Option<u64>,
    pub exact: Option<u64>,
}

pub fn saturation_bound(n: usize, q: u64) -> Result<SaturationBound> {
    Ok(SaturationBound {
        n,
        q,
        lunelli_sce_min: lunelli_sce_min(n, q)?,
        refined_min: if q == 2 { Some(refined_saturating_bound(n)?) } else { None },
        exact: None,
    })
}

struct SaturatingScan<'a> {
    ts: &'a TripleSystem,
    chosen: Vec<usize>,
    covered: Vec<PointSet>,
}

impl SaturatingScan<'_> {
    /// Lexicographically first saturating `k`-set extending the chosen prefix.
    fn search(&mut self, k: usize) -> bool {
        let n = self.ts.order();
        let covered = self.covered.last().unwrap().len();
        let j = self.chosen.len();
        if covered == n {
            return true;
        }
        if j == k {
            return false;
        }
        // r more points add at most r + r·j + C(r, 2) covered points
        let r = k - j;
        if covered + r + r * j + r * (r - 1) / 2 < n {
            return false;
        }
        let start = self.chosen.last().map_or(0, |&p| p + 1);
        for p in start..=n - r {
            let mut next = self.covered.last().unwrap().clone();
            next.insert(p);
            let row = self.ts.third_row(p);
            for &q in &self.chosen {
                if row[q] != NONE {
                    next.insert(row[q] as usize);
                }
            }
            self.chosen.push(p);
            self.covered.push(next);
            if self.search(k) {
                return true;
            }
            self.covered.pop();
            self.chosen.pop();
        }
        false
    }
}

/// Least `k` with a saturating `k`-set, and the lexicographically least
/// witness.
pub fn min_saturating_size(ts: &TripleSystem) -> Result<(usize, PointSet)> {
    let n = ts.order();
    let cap = Limits::from_env().enumerate_order;
    if n > cap {
        return Err(Error::too_large("order for saturating search", n as u128, cap as u128));
    }
    if n == 0 {
        return Ok((0, PointSet::empty(0)));
    }
    for k in 1..=n {
        let hit = (0..n).into_par_iter().find_map_first(|first| {
            let mut scan = SaturatingScan {
                ts,
                chosen: Vec::new(),
                covered: vec![PointSet::empty(n)],
            };
            if first + k > n {
                return None;
            }
            let mut start = PointSet::empty(n);
            start.insert(first);
            scan.chosen.push(first);
            scan.covered.push(start);
            scan.search(k).then(|| scan.chosen.clone())
        });
        if let Some(points) = hit {
            return Ok((k, ts.point_set(points)?));
        }
    }
    unreachable!("the full point set saturates")
}

pub fn min_saturating_size_pg(n: usize) -> Result<(usize, PointSet)> {
    check_dim(n)?;
    min_saturating_size(&crate::constructions::pg2(n)?)
}

/// One-step quasi-closure of `s`, computed with the closure kernel's pair walk.
pub fn first_step(ts: &TripleSystem, s: &PointSet) -> Result<PointSet> {
    Ok(s.union(&crate::closure::neighbors(ts, s)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremes {
    pub n: usize,
    pub m: usize,
    /// `max_{|U| = m} min_H |U ∩ H|`.
    pub maxmin: usize,
    pub maxmin_witness: PointSet,
    /// `min_{|U| = m} max_H |U ∩ H|`.
    pub minmax: usize,
    pub minmax_witness: PointSet,
    pub examined: u64,
    /// The budget ran out; the values are bounds from the subsets examined.
    pub truncated: bool,
}

pub fn intersection_extremes(n: usize, m: usize, budget: u64) -> Result<Extremes> {
    let limits = Limits::from_env();
    check_dim(n)?;
    if n > limits.extremes_dim {
        return Err(Error::too_large("dimension for extremes", n as u128, limits.extremes_dim as u128));
    }
    if m > limits.extremes_m {
        return Err(Error::too_large("set size for extremes", m as u128, limits.extremes_m as u128));
    }
    let family = hyperplanes_pg2(n)?;
    let order = family.order();
    if m > order {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds the {order} points")));
    }
    let mut best = None::<(usize, PointSet, usize, PointSet)>;
    let mut examined = 0u64;
    let mut truncated = false;
    for combo in (0..order).combinations(m) {
        if examined >= budget {
            truncated = true;
            break;
        }
        examined += 1;
        let u = PointSet::from_points(order, combo).expect("in range");
        let (lo, hi) = family
            .hyperplanes
            .iter()
            .map(|h| h.intersection_len(&u))
            .fold((usize::MAX, 0), |(lo, hi), k| (lo.min(k), hi.max(k)));
        match &mut best {
            None => best = Some((lo, u.clone(), hi, u)),
            Some((maxmin, wmax, minmax, wmin)) => {
                if lo > *maxmin {
                    *maxmin = lo;
                    *wmax = u.clone();
                }
                if hi < *minmax {
                    *minmax = hi;
                    *wmin = u;
                }
            }
        }
    }
    let (maxmin, maxmin_witness, minmax, minmax_witness) =
        best.unwrap_or_else(|| (0, PointSet::empty(order), 0, PointSet::empty(order)));
    Ok(Extremes {
        n,
        m,
        maxmin,
        maxmin_witness,
        minmax,
        minmax_witness,
        examined,
        truncated,
    })
}
