//! Embedding partial Steiner triple systems into full ones by seeded
//! hill-climbing with frozen source blocks, and the two-sizes pipeline built
//! on top of it.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closure::closure_set;
use crate::constructions::{section4_partial, Section4Artifacts};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::spread::is_minimal_spreading_set;
use crate::system::{is_admissible, GeometryTag, Kind, Triple, TripleSystem, Variant, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionBudget {
    pub restarts: usize,
    pub moves_per_restart: u64,
    /// How many admissible target orders the two-sizes pipeline may try.
    pub max_orders: usize,
    /// Permit a target order below `2u + 1`.
    pub allow_small_target: bool,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget {
            restarts: 50,
            moves_per_restart: 1_000_000,
            max_orders: 3,
            allow_small_target: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionReport {
    pub source_order: usize,
    pub target_order: usize,
    pub seed: u64,
    /// Index of the restart that produced `system`.
    pub restart: Option<usize>,
    /// Moves made by the winning restart.
    pub iterations: u64,
    /// Moves made by every restart up to and including the winner.
    pub total_iterations: u64,
    /// Completions found but rejected by post-hoc checks.
    pub rejected: usize,
    pub success: bool,
    pub system: Option<TripleSystem>,
    pub verified: Vec<Check>,
}

impl CompletionReport {
    /// Human-readable summary followed by a `key=value` block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "completion {} -> {}: {}",
            self.source_order,
            self.target_order,
            if self.success { "success" } else { "failed" }
        )
        .unwrap();
        for c in &self.verified {
            writeln!(out, "  {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name).unwrap();
        }
        out.push_str(&self.key_values());
        out
    }

    pub fn key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "source_order={}", self.source_order).unwrap();
        writeln!(out, "v={}", self.target_order).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        match self.restart {
            Some(r) => writeln!(out, "restart={r}").unwrap(),
            None => writeln!(out, "restart=none").unwrap(),
        }
        writeln!(out, "iterations={}", self.iterations).unwrap();
        writeln!(out, "total_iterations={}", self.total_iterations).unwrap();
        writeln!(out, "rejected={}", self.rejected).unwrap();
        writeln!(out, "success={}", self.success).unwrap();
        let checks = self
            .verified
            .iter()
            .map(|c| format!("{}:{}", c.name, if c.passed { "pass" } else { "fail" }))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(out, "checks={checks}").unwrap();
        out
    }
}

/// Set with O(1) insert, remove and uniform sampling over `0..universe`.
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    fn new(universe: usize) -> Self {
        IndexedSet {
            items: Vec::new(),
            pos: vec![NONE; universe],
        }
    }

    fn insert(&mut self, x: usize) {
        if self.pos[x] == NONE {
            self.pos[x] = self.items.len() as u32;
            self.items.push(x as u32);
        }
    }

    fn remove(&mut self, x: usize) {
        let p = self.pos[x];
        if p == NONE {
            return;
        }
        let last = self.items.pop().unwrap();
        if last as usize != x {
            self.items[p as usize] = last;
            self.pos[last as usize] = p;
        }
        self.pos[x] = NONE;
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn get(&self, i: usize) -> usize {
        self.items[i] as usize
    }
}

/// Hill-climbing state. Frozen pairs belong to source blocks and are never
/// uncovered again.
struct Climber {
    v: usize,
    third: Vec<u32>,
    frozen: Vec<bool>,
    uncovered: IndexedSet,
    live: Vec<IndexedSet>,
}

impl Climber {
    fn new(v: usize, frozen_blocks: &[Triple]) -> Self {
        let mut c = Climber {
            v,
            third: vec![NONE; v * v],
            frozen: vec![false; v * v],
            uncovered: IndexedSet::new(v * v),
            live: (0..v).map(|_| IndexedSet::new(v)).collect(),
        };
        for x in 0..v {
            for y in x + 1..v {
                c.uncovered.insert(x * v + y);
                c.live[x].insert(y);
                c.live[y].insert(x);
            }
        }
        for &t in frozen_blocks {
            c.add_block(t);
            for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                c.frozen[x * v + y] = true;
                c.frozen[y * v + x] = true;
            }
        }
        c
    }

    fn pairs(t: Triple) -> [(usize, usize, usize); 3] {
        let [a, b, c] = t;
        [(a, b, c), (a, c, b), (b, c, a)]
    }

    fn add_block(&mut self, t: Triple) {
        let v = self.v;
        for (x, y, z) in Self::pairs(t) {
            self.third[x * v + y] = z as u32;
            self.third[y * v + x] = z as u32;
            self.uncovered.remove(x.min(y) * v + x.max(y));
            self.live[x].remove(y);
            self.live[y].remove(x);
        }
    }

    fn remove_block(&mut self, t: Triple) {
        let v = self.v;
        for (x, y, _) in Self::pairs(t) {
            self.third[x * v + y] = NONE;
            self.third[y * v + x] = NONE;
            self.uncovered.insert(x.min(y) * v + x.max(y));
            self.live[x].insert(y);
            self.live[y].insert(x);
        }
    }

    /// Candidate thirds `z` for the uncovered pair `{x, y}`: `{x, z}` is
    /// uncovered and `{y, z}` is not held by a frozen block.
    fn candidates(&self, x: usize, y: usize, out: &mut Vec<usize>) {
        out.clear();
        let v = self.v;
        let live = &self.live[x];
        for i in 0..live.len() {
            let z = live.get(i);
            if z != y && !self.frozen[y * v + z] {
                out.push(z);
            }
        }
    }

    /// Runs until every pair is covered or `limit` moves have been made.
    fn run<R: Rng>(&mut self, rng: &mut R, limit: u64) -> (bool, u64) {
        let v = self.v;
        let mut buf = Vec::with_capacity(v);
        let mut moves = 0u64;
        while self.uncovered.len() > 0 {
            if moves >= limit {
                return (false, moves);
            }
            moves += 1;
            let pair = self.uncovered.get(rng.gen_range(0..self.uncovered.len()));
            let (mut x, mut y) = (pair / v, pair % v);
            if rng.gen::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            self.candidates(x, y, &mut buf);
            if buf.is_empty() {
                std::mem::swap(&mut x, &mut y);
                self.candidates(x, y, &mut buf);
                if buf.is_empty() {
                    continue;
                }
            }
            let z = buf[rng.gen_range(0..buf.len())];
            let w = self.third[y * v + z];
            if w != NONE {
                let mut old = [y, z, w as usize];
                old.sort_unstable();
                self.remove_block(old);
            }
            let mut t = [x, y, z];
            t.sort_unstable();
            self.add_block(t);
        }
        (true, moves)
    }

    fn blocks(&self) -> Vec<Triple> {
        let v = self.v;
        let mut out = Vec::with_capacity(v * (v - 1) / 6);
        for x in 0..v {
            for y in x + 1..v {
                let z = self.third[x * v + y];
                if z != NONE && z as usize > y {
                    out.push([x, y, z as usize]);
                }
            }
        }
        out
    }
}

/// Restarts evaluated together before checking for a winner.
const RESTART_BATCH: usize = 8;

fn restart_rng(seed: u64, target: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((target as u64) << 32) | restart as u64);
    rng
}

/// Outcome of one restart: moves used, and the completed system if any.
type Attempt = (u64, Option<TripleSystem>);

/// Moves used, and the completed system with its post-hoc checks.
type Checked = (u64, Option<(TripleSystem, Vec<Check>)>);

fn climb_once(blocks: &[Triple], v: usize, seed: u64, restart: usize, moves: u64, tag: &GeometryTag) -> Result<Attempt> {
    let mut climber = Climber::new(v, blocks);
    let mut rng = restart_rng(seed, v, restart);
    let (done, used) = climber.run(&mut rng, moves);
    if !done {
        return Ok((used, None));
    }
    let sys = TripleSystem::build_tagged(v, climber.blocks(), Kind::Steiner, tag.clone())?;
    Ok((used, Some(sys)))
}

/// Runs restarts (in parallel) and keeps the lowest-indexed one whose
/// completion passes `accept`, so the result does not depend on scheduling.
fn run_restarts<F>(
    source: &TripleSystem,
    v: usize,
    seed: u64,
    budget: &CompletionBudget,
    tag: &GeometryTag,
    accept: F,
) -> Result<CompletionReport>
where
    F: Fn(&TripleSystem) -> Result<Vec<Check>> + Sync,
{
    let blocks = source.triples().to_vec();
    let mut report = CompletionReport {
        source_order: source.order(),
        target_order: v,
        seed,
        restart: None,
        iterations: 0,
        total_iterations: 0,
        rejected: 0,
        success: false,
        system: None,
        verified: Vec::new(),
    };
    // fixed-size batches keep the outcome independent of the thread count
    for batch_start in (0..budget.restarts).step_by(RESTART_BATCH) {
        let batch_end = (batch_start + RESTART_BATCH).min(budget.restarts);
        let outcomes: Vec<Result<Checked>> = (batch_start..batch_end)
            .into_par_iter()
            .map(|r| {
                let (used, sys) = climb_once(&blocks, v, seed, r, budget.moves_per_restart, tag)?;
                match sys {
                    None => Ok((used, None)),
                    Some(sys) => {
                        let checks = accept(&sys)?;
                        Ok((used, Some((sys, checks))))
                    }
                }
            })
            .collect();
        for (r, outcome) in (batch_start..).zip(outcomes) {
            let (used, found) = outcome?;
            report.total_iterations += used;
            if let Some((sys, checks)) = found {
                if checks.iter().all(|c| c.passed) {
                    report.restart = Some(r);
                    report.iterations = used;
                    report.success = true;
                    report.system = Some(sys);
                    report.verified = checks;
                    return Ok(report);
                }
                report.rejected += 1;
                report.verified = checks;
            }
        }
    }
    Ok(report)
}

fn embedding_checks(source: &TripleSystem, sys: &TripleSystem) -> Vec<Check> {
    vec![
        Check::new("steiner", sys.is_steiner() && sys.covers_all_pairs()),
        Check::new("admissible_order", is_admissible(sys.order())),
        Check::new(
            "contains_source",
            source.triples().iter().all(|&[a, b, c]| sys.is_block(a, b, c)),
        ),
    ]
}

/// Number of points lying on a source block; isolated points impose nothing
/// on an embedding.
pub fn effective_source_order(ts: &TripleSystem) -> usize {
    ts.covered_points().len()
}

fn check_target(ts: &TripleSystem, v: usize, budget: &CompletionBudget) -> Result<()> {
    let u = effective_source_order(ts);
    if !is_admissible(v) || v < ts.order() || (!budget.allow_small_target && v < 2 * u + 1) {
        return Err(Error::InadmissibleOrder(v));
    }
    Ok(())
}

/// Embeds `ts` (points keep their indices) into a Steiner system of order
/// `v`. Running out of budget is reported with `success = false`.
pub fn complete_partial(
    ts: &TripleSystem,
    v: usize,
    seed: u64,
    budget: &CompletionBudget,
) -> Result<CompletionReport> {
    check_target(ts, v, budget)?;
    run_restarts(ts, v, seed, budget, &GeometryTag::plain(), |sys| {
        Ok(embedding_checks(ts, sys))
    })
}

/// Like [`complete_partial`], starting from raw blocks; two blocks sharing a
/// pair are reported as a frozen conflict.
pub fn complete_triples(
    order: usize,
    blocks: &[Triple],
    v: usize,
    seed: u64,
    budget: &CompletionBudget,
) -> Result<CompletionReport> {
    let ts = TripleSystem::build(order, blocks.iter().copied(), Kind::Partial).map_err(|e| match e {
        Error::DuplicatePair(x, y) => Error::FrozenConflict(x, y),
        other => other,
    })?;
    complete_partial(&ts, v, seed, budget)
}

/// A Steiner system of admissible order `n ≥ 7` grown from nothing.
/// Valid, not uniformly sampled.
pub fn random_sts(n: usize, seed: u64) -> Result<TripleSystem> {
    random_sts_with(n, seed, &CompletionBudget::default())
}

pub fn random_sts_with(n: usize, seed: u64, budget: &CompletionBudget) -> Result<TripleSystem> {
    if n < 7 || !is_admissible(n) {
        return Err(Error::InadmissibleOrder(n));
    }
    let empty = TripleSystem::build(n, [], Kind::Partial)?;
    let tag = GeometryTag::new(Variant::Random(seed), None);
    let report = run_restarts(&empty, n, seed, budget, &tag, |sys| Ok(embedding_checks(&empty, sys)))?;
    report.system.ok_or_else(|| {
        Error::BudgetExhausted(format!(
            "no STS({n}) after {} restarts of {} moves",
            budget.restarts, budget.moves_per_restart
        ))
    })
}

pub fn next_admissible(from: usize) -> usize {
    (from..).find(|&v| is_admissible(v)).unwrap()
}

#[derive(Debug, Clone)]
pub struct TwoSizes {
    pub artifacts: Section4Artifacts,
    pub system: TripleSystem,
    /// `{a_1, …, a_n}`, a minimal spreading set of size `n`.
    pub base: PointSet,
    /// `{b_1, b_2, b_3}`, a minimal spreading set of size 3.
    pub triple: PointSet,
    pub report: CompletionReport,
    /// Reports for target orders that were tried and failed.
    pub failed_targets: Vec<CompletionReport>,
}

/// Post-hoc checks on a completion of `X'`.
pub fn two_sizes_checks(art: &Section4Artifacts, sys: &TripleSystem) -> Result<Vec<Check>> {
    let lift = |s: &PointSet| sys.point_set(s.iter());
    let triple = lift(&art.triple_set())?;
    let base = lift(&art.base_set())?;
    let mut checks = embedding_checks(&art.system, sys);
    checks.push(Check::new("a_triple_minimal_spreading", is_minimal_spreading_set(sys, &triple)?));
    checks.push(Check::new("b_base_spreading", closure_set(sys, &base)?.is_full()));
    let mut c_ok = true;
    for &a in &art.base_points {
        let mut rest = base.clone();
        rest.remove(a);
        c_ok &= !closure_set(sys, &rest)?.is_full();
    }
    checks.push(Check::new("c_base_minus_one_not_spreading", c_ok));
    checks.push(Check::new("base_minimal_spreading", is_minimal_spreading_set(sys, &base)?));
    Ok(checks)
}

/// Completes `X'` for the given `n` at the least admissible order
/// `v ≥ 2u + 1` (then the next ones) and keeps the first completion in
/// which both witness sets are verified minimal spreading sets.
pub fn two_minimal_sizes_sts(n: usize, seed: u64, budget: &CompletionBudget) -> Result<TwoSizes> {
    let art = section4_partial(n)?;
    let u = effective_source_order(&art.system);
    let mut v = next_admissible(2 * u + 1);
    let mut failed = Vec::new();
    for _ in 0..budget.max_orders {
        let report = run_restarts(&art.system, v, seed, budget, &GeometryTag::plain(), |sys| {
            two_sizes_checks(&art, sys)
        })?;
        if report.success {
            let system = report.system.clone().expect("success carries a system");
            let base = system.point_set(art.base_points.iter().copied())?;
            let triple = system.point_set(art.b_points[..3].iter().copied())?;
            return Ok(TwoSizes {
                artifacts: art,
                system,
                base,
                triple,
                report,
                failed_targets: failed,
            });
        }
        failed.push(report);
        v = next_admissible(v + 1);
    }
    let summary = failed
        .iter()
        .map(|r| format!("v={} rejected={} moves={}", r.target_order, r.rejected, r.total_iterations))
        .collect::<Vec<_>>()
        .join("; ");
    Err(Error::BudgetExhausted(summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::pg2;
    use crate::spread::check_projective;

    fn small_budget() -> CompletionBudget {
        CompletionBudget {
            restarts: 8,
            moves_per_restart: 200_000,
            ..CompletionBudget::default()
        }
    }

    #[test]
    fn indexed_set_basics() {
        let mut s = IndexedSet::new(10);
        for x in [3, 7, 1] {
            s.insert(x);
        }
        s.insert(3);
        assert_eq!(s.len(), 3);
        s.remove(3);
        s.remove(3);
        assert_eq!(s.len(), 2);
        let mut items: Vec<usize> = (0..s.len()).map(|i| s.get(i)).collect();
        items.sort_unstable();
        assert_eq!(items, vec![1, 7]);
    }

    #[test]
    fn every_sts7_is_a_fano_plane() {
        for seed in 0..5 {
            let s = random_sts(7, seed).unwrap();
            assert_eq!(s.triples().len(), 7);
            assert!(check_projective(&s).unwrap());
        }
    }

    #[test]
    fn random_sts13_has_26_blocks() {
        let s = random_sts(13, 4).unwrap();
        assert_eq!(s.triples().len(), 26);
        assert_eq!(s.tag().variant, Variant::Random(4));
    }

    #[test]
    fn inadmissible_orders_rejected() {
        assert_eq!(random_sts(8, 0), Err(Error::InadmissibleOrder(8)));
        assert_eq!(random_sts(3, 0), Err(Error::InadmissibleOrder(3)));
        let block = TripleSystem::build(3, [[0, 1, 2]], Kind::Partial).unwrap();
        assert_eq!(
            complete_partial(&block, 6, 0, &small_budget()),
            Err(Error::InadmissibleOrder(6))
        );
        let fano = pg2(2).unwrap();
        assert_eq!(
            complete_partial(&fano, 9, 0, &small_budget()),
            Err(Error::InadmissibleOrder(9))
        );
    }

    #[test]
    fn one_block_embeds_in_sts7() {
        let block = TripleSystem::build(3, [[0, 1, 2]], Kind::Partial).unwrap();
        let report = complete_partial(&block, 7, 11, &small_budget()).unwrap();
        assert!(report.success);
        let sys = report.system.unwrap();
        assert!(sys.is_block(0, 1, 2));
        assert!(report.verified.iter().all(|c| c.passed));
    }

    #[test]
    fn empty_system_completes() {
        let empty = TripleSystem::build(7, [], Kind::Partial).unwrap();
        let report = complete_partial(&empty, 7, 2, &small_budget()).unwrap();
        assert!(report.success);
        assert_eq!(report.system.unwrap().triples().len(), 7);
    }

    #[test]
    fn frozen_conflict_reported() {
        assert_eq!(
            complete_triples(5, &[[0, 1, 2], [0, 1, 3]], 13, 0, &small_budget()),
            Err(Error::FrozenConflict(0, 1))
        );
    }

    #[test]
    fn completion_is_deterministic() {
        let block = TripleSystem::build(5, [[0, 1, 2], [2, 3, 4]], Kind::Partial).unwrap();
        let a = complete_partial(&block, 13, 9, &small_budget()).unwrap();
        let b = complete_partial(&block, 13, 9, &small_budget()).unwrap();
        assert_eq!(a, b);
        assert!(a.success);
    }

    #[test]
    fn exhausted_budget_is_not_an_error() {
        let budget = CompletionBudget {
            restarts: 2,
            moves_per_restart: 3,
            ..CompletionBudget::default()
        };
        let empty = TripleSystem::build(15, [], Kind::Partial).unwrap();
        let report = complete_partial(&empty, 15, 0, &budget).unwrap();
        assert!(!report.success);
        assert!(report.system.is_none());
        assert_eq!(report.total_iterations, 6);
        assert!(matches!(random_sts_with(15, 0, &budget), Err(Error::BudgetExhausted(_))));
    }

    #[test]
    fn report_renders_key_values() {
        let block = TripleSystem::build(3, [[0, 1, 2]], Kind::Partial).unwrap();
        let report = complete_partial(&block, 7, 11, &small_budget()).unwrap();
        let text = report.render();
        assert!(text.contains("v=7\n"));
        assert!(text.contains("seed=11\n"));
        assert!(text.contains("success=true\n"));
    }
}
