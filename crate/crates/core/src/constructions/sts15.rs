use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::is_spreading_system;
use crate::error::{Error, Result};
use crate::system::{GeometryTag, Kind, Triple, TripleSystem, Variant, NONE};

pub const STS15_BACKTRACK_NODES: u64 = 1_000_000;
pub const STS15_MAX_RESTARTS: usize = 20_000;

struct Backtracker<R> {
    order: usize,
    third: Vec<u32>,
    blocks: Vec<Triple>,
    nodes: u64,
    limit: u64,
    rng: R,
}

impl<R: Rng> Backtracker<R> {
    fn first_uncovered(&self) -> Option<(usize, usize)> {
        let n = self.order;
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .find(|&(x, y)| self.third[x * n + y] == NONE)
    }

    fn set(&mut self, [a, b, c]: Triple, value: bool) {
        let n = self.order;
        for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
            let z = if value { z as u32 } else { NONE };
            self.third[x * n + y] = z;
            self.third[y * n + x] = z;
        }
    }

    /// Covers the least uncovered pair with each candidate third point in
    /// random order. Returns `None` when the node budget runs out.
    fn search(&mut self) -> Option<bool> {
        let Some((x, y)) = self.first_uncovered() else {
            return Some(true);
        };
        self.nodes += 1;
        if self.nodes > self.limit {
            return None;
        }
        let n = self.order;
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&z| {
                z != x && z != y && self.third[x * n + z] == NONE && self.third[y * n + z] == NONE
            })
            .collect();
        candidates.shuffle(&mut self.rng);
        for z in candidates {
            let mut t = [x, y, z];
            t.sort_unstable();
            self.set(t, true);
            self.blocks.push(t);
            match self.search() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.blocks.pop();
            self.set(t, false);
        }
        Some(false)
    }
}

pub(crate) fn backtrack_sts<R: Rng>(order: usize, node_limit: u64, rng: R) -> Option<Vec<Triple>> {
    let mut bt = Backtracker {
        order,
        third: vec![NONE; order * order],
        blocks: Vec::new(),
        nodes: 0,
        limit: node_limit,
        rng,
    };
    match bt.search() {
        Some(true) => Some(bt.blocks),
        _ => None,
    }
}

/// An STS(15) with no nontrivial subsystem, found by randomized backtracking
/// with restarts and verified before it is returned.
pub fn subsystem_free_sts15(seed: u64) -> Result<TripleSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..STS15_MAX_RESTARTS {
        let restart_seed = rng.gen::<u64>();
        let Some(blocks) = backtrack_sts(15, STS15_BACKTRACK_NODES, ChaCha8Rng::seed_from_u64(restart_seed))
        else {
            continue;
        };
        let ts = TripleSystem::build_tagged(
            15,
            blocks,
            Kind::Steiner,
            GeometryTag::new(Variant::Random(seed), None),
        )?;
        if is_spreading_system(&ts)? {
            return Ok(ts);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no subsystem-free STS(15) after {STS15_MAX_RESTARTS} restarts (seed {seed})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::enumerate_closed_sets;

    #[test]
    fn backtracking_fills_small_orders() {
        for order in [7, 9, 13] {
            let blocks = backtrack_sts(order, 1_000_000, ChaCha8Rng::seed_from_u64(3)).unwrap();
            let ts = TripleSystem::build(order, blocks, Kind::Steiner).unwrap();
            assert_eq!(ts.triples().len(), order * (order - 1) / 6);
        }
    }

    #[test]
    fn sts15_is_subsystem_free_and_deterministic() {
        let a = subsystem_free_sts15(0).unwrap();
        assert_eq!(a.triples().len(), 35);
        assert!(enumerate_closed_sets(&a, 1000).unwrap().sets.is_empty());
        assert_eq!(a, subsystem_free_sts15(0).unwrap());
    }
}
