use sts_core::closure::{
    closure_of, enumerate_closed_sets, is_saturating_set, is_spreading_set, is_spreading_system,
    DEFAULT_CLOSED_SET_BUDGET,
};
use sts_core::completion::random_sts;
use sts_core::constructions::{ag3, perturbed_pg, perturbed_witness, pg2, pg2_point, subsystem_free_sts15};
use sts_core::saturation::min_saturating_size;
use sts_core::spread::{
    check_projective, enumerate_minimal_spreading_sets, greedy_spreading_set, is_minimal_spreading_set,
    log2_bound, min_spreading_size, reduce_to_minimal,
};
use sts_core::{PointSet, TripleSystem};

/// Number of k-dimensional subspaces of GF(q)^d.
fn gaussian_binomial(d: u32, k: u32, q: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= q.pow(d - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn subsystems_of_projective_spaces() {
    // proper subspaces of PG(d,2) with more than three points have projective
    // dimension 2..d-1, i.e. vector dimension 3..d
    for d in [3usize, 4] {
        let expected: u64 = (3..=d as u32).map(|k| gaussian_binomial(d as u32 + 1, k, 2)).sum();
        let found = enumerate_closed_sets(&pg2(d).unwrap(), DEFAULT_CLOSED_SET_BUDGET).unwrap();
        assert!(!found.truncated);
        assert_eq!(found.sets.len() as u64, expected, "PG({d},2)");
    }
    assert_eq!(gaussian_binomial(4, 3, 2), 15);
}

#[test]
fn subsystems_of_affine_spaces() {
    for d in [2usize, 3] {
        let expected: u64 = (2..d as u32)
            .map(|k| 3u64.pow(d as u32 - k) * gaussian_binomial(d as u32, k, 3))
            .sum();
        let found = enumerate_closed_sets(&ag3(d).unwrap(), DEFAULT_CLOSED_SET_BUDGET).unwrap();
        assert_eq!(found.sets.len() as u64, expected, "AG({d},3)");
    }
}

#[test]
fn closed_set_budget_truncates() {
    let found = enumerate_closed_sets(&pg2(4).unwrap(), 10).unwrap();
    assert!(found.truncated);
    assert_eq!(found.sets.len(), 10);
}

#[test]
fn no_triple_spreads_in_pg3() {
    let ts = pg2(3).unwrap();
    let n = ts.order();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                assert!(!is_spreading_set(&ts, &ts.point_set([a, b, c]).unwrap()).unwrap());
            }
        }
    }
    let found = enumerate_minimal_spreading_sets(&ts, 3, usize::MAX).unwrap();
    assert!(found.sets.is_empty());
}

#[test]
fn minimal_spreading_sets_in_planes() {
    // every non-collinear triple of a plane spreads, and no pair does
    let fano = pg2(2).unwrap();
    let found = enumerate_minimal_spreading_sets(&fano, 7, usize::MAX).unwrap();
    assert_eq!(found.sets.len() as u64, binomial(7, 3) - 7);
    assert!(found.sets.iter().all(|s| s.len() == 3));
    let ag = ag3(2).unwrap();
    let found = enumerate_minimal_spreading_sets(&ag, 9, usize::MAX).unwrap();
    assert_eq!(found.sets.len() as u64, binomial(9, 3) - 12);
    let mut sorted = found.sets.clone();
    sorted.sort();
    assert_eq!(sorted, found.sets);
}

#[test]
fn minimal_sets_in_pg3_are_bases() {
    // minimal spreading sets of PG(3,2) are exactly the independent 4-sets
    let ts = pg2(3).unwrap();
    let found = enumerate_minimal_spreading_sets(&ts, 15, usize::MAX).unwrap();
    let bases = 15 * 14 * 12 * 8 / 24;
    assert_eq!(found.sets.len(), bases);
    assert!(found.sets.iter().all(|s| s.len() == 4));
}

#[test]
fn minimum_spreading_sizes_of_classical_systems() {
    for d in 2..=5 {
        let (k, w) = min_spreading_size(&pg2(d).unwrap()).unwrap();
        assert_eq!(k, d + 1, "PG({d},2)");
        assert_eq!(w.to_vec(), (0..=d).map(|i| pg2_point(d, 1 << i)).collect::<Vec<_>>());
    }
    for d in 2..=3 {
        let (k, _) = min_spreading_size(&ag3(d).unwrap()).unwrap();
        assert_eq!(k, d + 1, "AG({d},3)");
    }
}

#[test]
fn greedy_respects_log_bound_on_random_systems() {
    for (i, order) in [7usize, 9, 13, 15, 19, 21, 25, 27, 31, 33].into_iter().enumerate() {
        let ts = random_sts(order, i as u64).unwrap();
        let g = greedy_spreading_set(&ts, None).unwrap();
        assert!(g.size <= log2_bound(order), "order {order}: {}", g.size);
        assert!(is_spreading_set(&ts, &g.witness).unwrap());
        for w in g.closure_sizes.windows(2) {
            assert!(w[1] > 2 * w[0]);
        }
    }
}

#[test]
fn greedy_reduces_to_a_basis_in_pg4() {
    let ts = pg2(4).unwrap();
    let g = greedy_spreading_set(&ts, None).unwrap();
    let r = reduce_to_minimal(&ts, &g.witness).unwrap();
    assert_eq!(r.len(), 5);
    assert!(is_minimal_spreading_set(&ts, &r).unwrap());
}

#[test]
fn perturbed_space_has_two_minimal_sizes() {
    let x = perturbed_pg(4, 0).unwrap();
    assert!(!check_projective(&x).unwrap());
    let u = perturbed_witness(4);
    assert!(is_minimal_spreading_set(&x, &u).unwrap());
    let (k, w) = min_spreading_size(&x).unwrap();
    assert!(k <= 4);
    assert!(is_minimal_spreading_set(&x, &w).unwrap());
    // and a basis of PG(4,2) outside the replaced subspace is still minimal of size 5
    let basis = x.point_set([0, 1, 2, 3, 4]).unwrap();
    assert!(is_spreading_set(&x, &basis).unwrap());
}

#[test]
fn subsystem_free_sts15_has_only_trivial_closed_sets() {
    let s = subsystem_free_sts15(0).unwrap();
    assert!(is_spreading_system(&s).unwrap());
    assert!(enumerate_closed_sets(&s, DEFAULT_CLOSED_SET_BUDGET).unwrap().sets.is_empty());
    assert!(!is_spreading_system(&pg2(3).unwrap()).unwrap());
}

#[test]
fn saturating_sets_of_pg3() {
    let ts = pg2(3).unwrap();
    let (k, w) = min_saturating_size(&ts).unwrap();
    assert!(k >= 5);
    assert_eq!(w.len(), k);
    assert!(is_saturating_set(&ts, &w).unwrap());
    assert!(is_spreading_set(&ts, &w).unwrap());
}

#[test]
fn searches_are_deterministic() {
    let ts: TripleSystem = random_sts(21, 5).unwrap();
    assert_eq!(ts, random_sts(21, 5).unwrap());
    let a = min_spreading_size(&ts).unwrap();
    let b = min_spreading_size(&ts).unwrap();
    assert_eq!(a, b);
    let c1 = closure_of(&ts, &[0, 1, 2]).unwrap();
    let c2: PointSet = closure_of(&ts, &[2, 1, 0]).unwrap();
    assert_eq!(c1, c2);
}
