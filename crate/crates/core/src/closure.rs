//! Neighbours, quasi-closure chains, closure, and the spreading and
//! saturating predicates built on them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::system::{Triple, TripleSystem, NONE};

/// Incremental closure over a worklist of members.
///
/// Member `i` is paired with members `0..i` exactly once, so each pair of the
/// final closure is examined a single time. Rolling back to a checkpoint
/// restores an earlier closed state, which is what the subset searches use.
#[derive(Clone)]
pub struct Closer<'a> {
    ts: &'a TripleSystem,
    set: PointSet,
    members: Vec<usize>,
    done: usize,
}

impl<'a> Closer<'a> {
    pub fn new(ts: &'a TripleSystem) -> Self {
        Closer {
            ts,
            set: PointSet::empty(ts.order()),
            members: Vec::with_capacity(ts.order()),
            done: 0,
        }
    }

    /// Adds `p` without closing. Returns false if it was already present.
    #[inline]
    pub fn add(&mut self, p: usize) -> bool {
        let fresh = self.set.insert(p);
        if fresh {
            self.members.push(p);
        }
        fresh
    }

    pub fn close(&mut self) {
        while self.done < self.members.len() {
            let x = self.members[self.done];
            let row = self.ts.third_row(x);
            for j in 0..self.done {
                let z = row[self.members[j]];
                if z != NONE && self.set.insert(z as usize) {
                    self.members.push(z as usize);
                }
            }
            self.done += 1;
        }
    }

    /// Adds `p` and closes again.
    pub fn extend(&mut self, p: usize) {
        self.add(p);
        self.close();
    }

    pub fn checkpoint(&self) -> usize {
        debug_assert_eq!(self.done, self.members.len(), "checkpoint of an unclosed state");
        self.members.len()
    }

    pub fn rollback(&mut self, checkpoint: usize) {
        for &p in &self.members[checkpoint..] {
            self.set.remove(p);
        }
        self.members.truncate(checkpoint);
        self.done = checkpoint;
    }

    pub fn clear(&mut self) {
        self.rollback(0);
    }

    pub fn set(&self) -> &PointSet {
        &self.set
    }

    pub fn into_set(self) -> PointSet {
        self.set
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.set.contains(p)
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.ts.order()
    }
}

/// The chain `S_0 ⊆ S_1 ⊆ … ⊆ S_k` with `S_i = S_{i-1} ∪ N(S_{i-1})` and
/// `N(S_k) = ∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureTrace {
    steps: Vec<PointSet>,
    firing: Vec<Vec<Triple>>,
}

impl ClosureTrace {
    pub fn steps(&self) -> &[PointSet] {
        &self.steps
    }

    /// Blocks that fired for step `i` (`i >= 1`), stored at index `i - 1`.
    pub fn firing_blocks(&self) -> &[Vec<Triple>] {
        &self.firing
    }

    pub fn closure(&self) -> &PointSet {
        self.steps.last().expect("trace has at least S_0")
    }

    pub fn into_closure(mut self) -> PointSet {
        self.steps.pop().expect("trace has at least S_0")
    }

    /// One line per step: newly added points, then the blocks that added them.
    pub fn report(&self) -> String {
        let mut out = String::new();
        writeln!(out, "step 0 start {}", self.steps[0]).unwrap();
        for (i, blocks) in self.firing.iter().enumerate() {
            let added = self.steps[i + 1].difference(&self.steps[i]);
            write!(out, "step {} added {} via", i + 1, added).unwrap();
            for [a, b, c] in blocks {
                write!(out, " {a}-{b}-{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn neighbors(ts: &TripleSystem, s: &PointSet) -> Result<PointSet> {
    ts.check_set(s)?;
    let members = s.to_vec();
    let mut out = PointSet::empty(ts.order());
    for (i, &x) in members.iter().enumerate() {
        let row = ts.third_row(x);
        for &y in &members[..i] {
            let z = row[y];
            if z != NONE && !s.contains(z as usize) {
                out.insert(z as usize);
            }
        }
    }
    Ok(out)
}

pub fn is_closed(ts: &TripleSystem, s: &PointSet) -> Result<bool> {
    Ok(neighbors(ts, s)?.is_empty())
}

/// Round-by-round closure, recording each quasi-closure and the blocks that
/// fired. Only pairs touching the previous round's new points are examined.
pub fn closure(ts: &TripleSystem, s: &PointSet) -> Result<ClosureTrace> {
    ts.check_set(s)?;
    let mut steps = vec![s.clone()];
    let mut firing = Vec::new();
    let mut current = s.clone();
    let mut members = s.to_vec();
    let mut frontier_start = 0;
    loop {
        let mut added = PointSet::empty(ts.order());
        let mut blocks = Vec::new();
        for i in frontier_start..members.len() {
            let x = members[i];
            let row = ts.third_row(x);
            // pair x with every earlier member; pairs among older members were
            // handled in previous rounds
            for &y in &members[..i] {
                let z = row[y];
                if z != NONE && !current.contains(z as usize) {
                    added.insert(z as usize);
                    let mut t = [x, y, z as usize];
                    t.sort_unstable();
                    blocks.push(t);
                }
            }
        }
        if added.is_empty() {
            break;
        }
        frontier_start = members.len();
        members.extend(added.iter());
        current = current.union(&added);
        blocks.sort_unstable();
        blocks.dedup();
        steps.push(current.clone());
        firing.push(blocks);
    }
    Ok(ClosureTrace { steps, firing })
}

/// The closure as a set, via the worklist kernel.
pub fn closure_set(ts: &TripleSystem, s: &PointSet) -> Result<PointSet> {
    ts.check_set(s)?;
    let mut c = Closer::new(ts);
    for p in s {
        c.add(p);
    }
    c.close();
    Ok(c.into_set())
}

pub fn closure_of(ts: &TripleSystem, points: &[usize]) -> Result<PointSet> {
    closure_set(ts, &ts.point_set(points.iter().copied())?)
}

pub fn is_spreading_set(ts: &TripleSystem, s: &PointSet) -> Result<bool> {
    Ok(closure_set(ts, s)?.is_full())
}

pub fn is_saturating_set(ts: &TripleSystem, s: &PointSet) -> Result<bool> {
    Ok(s.union(&neighbors(ts, s)?).is_full())
}

/// True iff every 3-subset that is not a block spreads; larger nontrivial
/// subsets contain such a triple, so triples suffice.
pub fn is_spreading_system(ts: &TripleSystem) -> Result<bool> {
    ts.require_steiner()?;
    let n = ts.order();
    if n <= 3 {
        return Err(Error::TrivialOrder(n));
    }
    let all_spread = (0..n).into_par_iter().all(|x| {
        let mut c = Closer::new(ts);
        for y in x + 1..n {
            let t = ts.third_unchecked(x, y).expect("Steiner system covers all pairs");
            for z in y + 1..n {
                if z == t {
                    continue;
                }
                c.add(x);
                c.add(y);
                c.add(z);
                c.close();
                let full = c.is_full();
                c.clear();
                if !full {
                    return false;
                }
            }
        }
        true
    });
    Ok(all_spread)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSets {
    /// Canonically sorted.
    pub sets: Vec<PointSet>,
    pub truncated: bool,
}

pub const DEFAULT_CLOSED_SET_BUDGET: usize = 100_000;

/// All nontrivial subsystems: proper closed sets with more than three points.
///
/// Seeds with the closures of every non-block triple, then repeatedly closes
/// each known set together with one outside point. Every nontrivial closed
/// set is reached this way, since it contains a non-block triple and grows
/// from that triple's closure one point at a time.
pub fn enumerate_closed_sets(ts: &TripleSystem, max_count: usize) -> Result<ClosedSets> {
    ts.require_steiner()?;
    let n = ts.order();
    let mut found: BTreeSet<PointSet> = BTreeSet::new();
    if n <= 3 {
        return Ok(ClosedSets {
            sets: Vec::new(),
            truncated: false,
        });
    }
    let seeds: BTreeSet<PointSet> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut c = Closer::new(ts);
            let mut local = BTreeSet::new();
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
                    if !c.is_full() {
                        local.insert(c.set().clone());
                    }
                    c.clear();
                }
            }
            local
        })
        .collect();
    let mut frontier: Vec<PointSet> = seeds.iter().cloned().collect();
    found.extend(seeds);
    let mut truncated = found.len() > max_count;
    while !frontier.is_empty() && !truncated {
        let next: BTreeSet<PointSet> = frontier
            .par_iter()
            .flat_map_iter(|closed| {
                let mut c = Closer::new(ts);
                let mut local = BTreeSet::new();
                for p in closed {
                    c.add(p);
                }
                c.close();
                let base = c.checkpoint();
                for v in closed.complement().iter() {
                    c.extend(v);
                    if !c.is_full() {
                        local.insert(c.set().clone());
                    }
                    c.rollback(base);
                }
                local
            })
            .collect();
        frontier = next.into_iter().filter(|s| !found.contains(s)).collect();
        found.extend(frontier.iter().cloned());
        truncated = found.len() > max_count;
    }
    let mut sets: Vec<PointSet> = found.into_iter().collect();
    sets.truncate(max_count);
    Ok(ClosedSets { sets, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Kind;

    fn fano() -> TripleSystem {
        let mut ts = Vec::new();
        for a in 1usize..8 {
            for b in a + 1..8 {
                if (a ^ b) > b {
                    ts.push([a - 1, b - 1, (a ^ b) - 1]);
                }
            }
        }
        TripleSystem::build(7, ts, Kind::Steiner).unwrap()
    }

    #[test]
    fn neighbors_of_small_sets() {
        let f = fano();
        let block = f.point_set(f.triples()[0]).unwrap();
        assert!(neighbors(&f, &block).unwrap().is_empty());
        // labels 001 and 010 are points 0 and 1; 011 is point 2
        let pair = f.point_set([0, 1]).unwrap();
        assert_eq!(neighbors(&f, &pair).unwrap().to_vec(), vec![2]);
        assert!(neighbors(&f, &f.point_set([4]).unwrap()).unwrap().is_empty());
        assert!(neighbors(&f, &PointSet::empty(7)).unwrap().is_empty());
    }

    #[test]
    fn trace_of_fano_triangle() {
        let f = fano();
        let s = f.point_set([0, 1, 3]).unwrap();
        let trace = closure(&f, &s).unwrap();
        assert!(trace.closure().is_full());
        assert_eq!(trace.steps().len(), 3);
        // S1 adds the three pair-thirds: labels 3, 5, 6 → points 2, 4, 5
        assert_eq!(trace.steps()[1].to_vec(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(trace.firing_blocks()[0].len(), 3);
        assert_eq!(trace.steps()[2].len(), 7);
        let report = trace.report();
        assert!(report.starts_with("step 0 start 0,1,3\nstep 1 added 2,4,5 via"));
        assert_eq!(closure_set(&f, &s).unwrap(), *trace.closure());
    }

    #[test]
    fn pair_closes_to_its_block() {
        let f = fano();
        let c = closure_of(&f, &[2, 6]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(is_closed(&f, &c).unwrap());
    }

    #[test]
    fn small_sets_are_closed_when_they_have_no_neighbours() {
        let p = TripleSystem::build(4, [[0, 1, 2]], Kind::Partial).unwrap();
        assert!(is_closed(&p, &p.point_set([0, 3]).unwrap()).unwrap());
        assert!(!is_closed(&p, &p.point_set([0, 1]).unwrap()).unwrap());
        assert!(is_closed(&p, &p.point_set([3]).unwrap()).unwrap());
    }

    #[test]
    fn saturating_on_fano() {
        let f = fano();
        let line = f.point_set(f.triples()[0]).unwrap();
        assert!(is_saturating_set(&f, &line.complement()).unwrap());
        assert!(!is_saturating_set(&f, &f.point_set([0, 1, 3]).unwrap()).unwrap());
        assert!(is_saturating_set(&f, &f.all_points()).unwrap());
    }

    #[test]
    fn fano_spreads_and_has_no_subsystems() {
        let f = fano();
        assert!(is_spreading_system(&f).unwrap());
        let closed = enumerate_closed_sets(&f, 10).unwrap();
        assert!(closed.sets.is_empty());
        assert!(!closed.truncated);
    }

    #[test]
    fn trivial_and_partial_systems_rejected() {
        let s3 = TripleSystem::build(3, [[0, 1, 2]], Kind::Steiner).unwrap();
        assert_eq!(is_spreading_system(&s3), Err(Error::TrivialOrder(3)));
        assert!(enumerate_closed_sets(&s3, 10).unwrap().sets.is_empty());
        let p = TripleSystem::build(4, [[0, 1, 2]], Kind::Partial).unwrap();
        assert_eq!(is_spreading_system(&p), Err(Error::RequiresSteiner));
        assert_eq!(enumerate_closed_sets(&p, 1), Err(Error::RequiresSteiner));
    }

    #[test]
    fn wrong_order_set_rejected() {
        let f = fano();
        let s = PointSet::from_points(9, [8]).unwrap();
        assert!(matches!(closure(&f, &s), Err(Error::OutOfRange { .. })));
        assert!(matches!(neighbors(&f, &s), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn closer_rollback_restores_state() {
        let f = fano();
        let mut c = Closer::new(&f);
        c.extend(0);
        c.extend(1);
        let cp = c.checkpoint();
        assert_eq!(c.len(), 3);
        c.extend(3);
        assert!(c.is_full());
        c.rollback(cp);
        assert_eq!(c.set().to_vec(), vec![0, 1, 2]);
    }
}
