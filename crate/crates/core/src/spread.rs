//! Spreading-set search: greedy growth, reduction to a minimal set,
//! exhaustive minimum, enumeration of minimal sets, projective recognition
//! and the subspace dimension identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closure::{closure_set, is_closed, Closer};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointset::PointSet;
use crate::system::{TripleSystem, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Greedy,
    Exhaustive,
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingSearchResult {
    pub witness: PointSet,
    pub size: usize,
    pub method: SearchMethod,
    /// `|cl(U_1)|, |cl(U_2)|, …` as the greedy set grows.
    pub closure_sizes: Vec<usize>,
}

/// `floor(log2(n + 1))`.
pub fn log2_bound(order: usize) -> usize {
    (usize::BITS - 1 - (order + 1).leading_zeros()) as usize
}

/// `log2(n + 1)` when `n + 1` is a power of two.
pub fn exact_log2(order: usize) -> Option<usize> {
    (order + 1).is_power_of_two().then(|| log2_bound(order))
}

fn require_nontrivial(ts: &TripleSystem) -> Result<()> {
    ts.require_steiner()?;
    if ts.order() < 3 {
        return Err(Error::TrivialOrder(ts.order()));
    }
    Ok(())
}

/// Starts from a pair and keeps adjoining the least point outside the
/// current closure. Each closure at least doubles, so the result has at most
/// `floor(log2(n + 1))` points.
pub fn greedy_spreading_set(
    ts: &TripleSystem,
    seed_pair: Option<(usize, usize)>,
) -> Result<SpreadingSearchResult> {
    require_nontrivial(ts)?;
    let (x, y) = seed_pair.unwrap_or((0, 1));
    ts.third_point(x, y)?;
    let mut witness = ts.point_set([x, y])?;
    let mut c = Closer::new(ts);
    c.add(x);
    c.add(y);
    c.close();
    let mut closure_sizes = vec![c.len()];
    while !c.is_full() {
        let next = c.set().complement().iter().next().expect("closure not full");
        witness.insert(next);
        c.extend(next);
        closure_sizes.push(c.len());
    }
    Ok(SpreadingSearchResult {
        size: witness.len(),
        witness,
        method: SearchMethod::Greedy,
        closure_sizes,
    })
}

/// Deletes points (least index first) while the set keeps spreading.
pub fn reduce_to_minimal(ts: &TripleSystem, s: &PointSet) -> Result<PointSet> {
    if !closure_set(ts, s)?.is_full() {
        return Err(Error::NotSpreading);
    }
    let mut current = s.clone();
    'outer: loop {
        for p in current.to_vec() {
            let mut smaller = current.clone();
            smaller.remove(p);
            if closure_set(ts, &smaller)?.is_full() {
                current = smaller;
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

/// Depth-first scan of ascending point sequences in which every new point
/// lies outside the closure of the earlier ones. Minimal spreading sets all
/// have this form, so nothing is lost by the pruning.
struct IndependentScan<'a> {
    ts: &'a TripleSystem,
    closer: Closer<'a>,
    chosen: Vec<usize>,
}

impl<'a> IndependentScan<'a> {
    fn new(ts: &'a TripleSystem, first: usize) -> Self {
        let mut closer = Closer::new(ts);
        closer.extend(first);
        IndependentScan {
            ts,
            closer,
            chosen: vec![first],
        }
    }

    /// Visits every independent extension up to `max_size` points in
    /// lexicographic order. `visit` returns false to stop the scan; extension
    /// stops below any set that already spreads.
    fn walk(&mut self, max_size: usize, visit: &mut impl FnMut(&[usize], bool) -> bool) -> bool {
        let spreads = self.closer.is_full();
        if !visit(&self.chosen, spreads) {
            return false;
        }
        if spreads || self.chosen.len() >= max_size {
            return true;
        }
        let last = *self.chosen.last().unwrap();
        let checkpoint = self.closer.checkpoint();
        for p in last + 1..self.ts.order() {
            if self.closer.contains(p) {
                continue;
            }
            self.chosen.push(p);
            self.closer.extend(p);
            let keep_going = self.walk(max_size, visit);
            self.closer.rollback(checkpoint);
            self.chosen.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// The least `k` admitting a spreading `k`-set, with the lexicographically
/// least such set as witness.
pub fn min_spreading_size(ts: &TripleSystem) -> Result<(usize, PointSet)> {
    ts.require_steiner()?;
    let n = ts.order();
    let cap = Limits::from_env().search_order;
    if n > cap {
        return Err(Error::too_large("order for exhaustive spreading search", n as u128, cap as u128));
    }
    if n <= 1 {
        return Ok((n, PointSet::full(n)));
    }
    for k in 2..=n {
        let hit = (0..n).into_par_iter().find_map_first(|first| {
            let mut scan = IndependentScan::new(ts, first);
            let mut found = None;
            scan.walk(k, &mut |chosen, spreads| {
                if spreads && chosen.len() == k {
                    found = Some(chosen.to_vec());
                    false
                } else {
                    true
                }
            });
            found
        });
        if let Some(points) = hit {
            return Ok((k, ts.point_set(points)?));
        }
    }
    unreachable!("the full point set spreads")
}

/// Checks the definition of minimality literally: no proper nonempty subset
/// spreads.
pub fn is_minimal_spreading_set(ts: &TripleSystem, s: &PointSet) -> Result<bool> {
    if !closure_set(ts, s)?.is_full() {
        return Ok(false);
    }
    let points = s.to_vec();
    if points.len() > 24 {
        return Err(Error::too_large("set for full-subset minimality check", points.len() as u128, 24u128));
    }
    let full_mask = (1u32 << points.len()) - 1;
    for mask in 1..full_mask {
        let subset = points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p);
        if closure_set(ts, &ts.point_set(subset)?)?.is_full() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalSets {
    /// Canonically sorted.
    pub sets: Vec<PointSet>,
    pub truncated: bool,
}

pub fn enumerate_minimal_spreading_sets(
    ts: &TripleSystem,
    max_size: usize,
    budget: usize,
) -> Result<MinimalSets> {
    let n = ts.order();
    let cap = Limits::from_env().enumerate_order;
    if n > cap {
        return Err(Error::too_large("order for minimal-set enumeration", n as u128, cap as u128));
    }
    let per_branch: Vec<Result<(Vec<PointSet>, bool)>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut scan = IndependentScan::new(ts, first);
            let mut sets = Vec::new();
            let mut failure = None;
            let mut truncated = false;
            scan.walk(max_size, &mut |chosen, spreads| {
                if !spreads {
                    return true;
                }
                let set = match ts.point_set(chosen.iter().copied()) {
                    Ok(s) => s,
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                };
                match is_minimal_spreading_set(ts, &set) {
                    Ok(true) => sets.push(set),
                    Ok(false) => {}
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                }
                if sets.len() > budget {
                    truncated = true;
                    return false;
                }
                true
            });
            match failure {
                Some(e) => Err(e),
                None => Ok((sets, truncated)),
            }
        })
        .collect();
    let mut sets = Vec::new();
    let mut truncated = false;
    for branch in per_branch {
        let (s, t) = branch?;
        sets.extend(s);
        truncated |= t;
    }
    sets.sort();
    if sets.len() > budget {
        truncated = true;
        sets.truncate(budget);
    }
    Ok(MinimalSets { sets, truncated })
}

/// PG(d,2) recognition: `n + 1` is a power of two and every non-collinear
/// triple closes to exactly seven points.
pub fn check_projective(ts: &TripleSystem) -> Result<bool> {
    ts.require_steiner()?;
    let n = ts.order();
    if !(n + 1).is_power_of_two() {
        return Ok(false);
    }
    let ok = (0..n).into_par_iter().all(|x| {
        let mut c = Closer::new(ts);
        for y in x + 1..n {
            let t = ts.third_unchecked(x, y).expect("Steiner");
            for z in y + 1..n {
                if z == t {
                    continue;
                }
                c.add(x);
                c.add(y);
                c.add(z);
                c.close();
                let seven = c.len() == 7;
                c.clear();
                if !seven {
                    return false;
                }
            }
        }
        true
    });
    Ok(ok)
}

/// `log2(|s| + 1) − 1` when that is an integer; the empty set has dimension −1.
pub fn dimension(s: &PointSet) -> Option<i64> {
    exact_log2(s.len()).map(|k| k as i64 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionCounterexample {
    pub y: PointSet,
    pub z: PointSet,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    pub trials: usize,
    pub disjoint_pairs: usize,
    pub counterexamples: Vec<DimensionCounterexample>,
}

impl DimensionReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks closed-set algebra on random pairs of closures `Y`, `Z`:
/// `Y ∩ Z` is closed, every dimension is an integer,
/// `dim cl(Y ∪ Z) + dim(Y ∩ Z) = dim Y + dim Z`, and `Y`, `Z` are disjoint
/// exactly when `dim cl(Y ∪ Z) = dim Y + dim Z + 1`.
pub fn verify_dimension_theorem(ts: &TripleSystem, trials: usize, seed: u64) -> Result<DimensionReport> {
    let d = match ts.tag().variant {
        Variant::Pg2(d) if d <= 5 => d,
        _ => return Err(Error::NotProjectiveTag),
    };
    let n = ts.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_closed = |rng: &mut ChaCha8Rng| -> Result<PointSet> {
        let k = rng.gen_range(0..=d + 1);
        let points: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
        closure_set(ts, &ts.point_set(points)?)
    };
    let mut report = DimensionReport {
        trials,
        disjoint_pairs: 0,
        counterexamples: Vec::new(),
    };
    for _ in 0..trials {
        let y = random_closed(&mut rng)?;
        let z = random_closed(&mut rng)?;
        let meet = y.intersection(&z);
        let join = closure_set(ts, &y.union(&z))?;
        let fail = |reason: String| DimensionCounterexample {
            y: y.clone(),
            z: z.clone(),
            reason,
        };
        if !is_closed(ts, &meet)? {
            report.counterexamples.push(fail("intersection not closed".into()));
            continue;
        }
        let dims = [&y, &z, &meet, &join].map(dimension);
        let [Some(dy), Some(dz), Some(dm), Some(dj)] = dims else {
            report.counterexamples.push(fail(format!("non-integer dimension {dims:?}")));
            continue;
        };
        if dj + dm != dy + dz {
            report
                .counterexamples
                .push(fail(format!("dim join {dj} + dim meet {dm} != {dy} + {dz}")));
            continue;
        }
        let disjoint = meet.is_empty();
        if disjoint {
            report.disjoint_pairs += 1;
        }
        if disjoint != (dj == dy + dz + 1) {
            report.counterexamples.push(fail("disjointness criterion fails".into()));
        }
    }
    Ok(report)
}
