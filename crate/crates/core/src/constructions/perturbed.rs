use crate::constructions::{find_triangle, pg2, pg2_point, subsystem_free_sts15};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::system::{GeometryTag, Kind, Triple, TripleSystem, Variant};

/// Seeds tried for the replacement STS(15) before giving up on alignment.
const ALIGNMENT_ATTEMPTS: u64 = 16;

/// The 15 points spanned by the first four basis vectors `v_0..v_3`.
pub fn perturbed_subspace(d: usize) -> PointSet {
    PointSet::from_points((1usize << (d + 1)) - 1, (1..16).map(|v| pg2_point(d, v)))
        .expect("d >= 3 keeps the subspace in range")
}

/// `{v_1, …, v_d}`, the basis vectors other than `v_0`.
pub fn perturbed_witness(d: usize) -> PointSet {
    PointSet::from_points((1usize << (d + 1)) - 1, (1..=d).map(|i| pg2_point(d, 1 << i)))
        .expect("basis vectors are points")
}

/// PG(d,2) with the 3-dimensional subspace `W = span(v_0..v_3)` replaced by
/// a subsystem-free STS(15). The replacement is positioned so that the
/// blocks on the pairs of `{v_1, v_2, v_3}` stay as they were in PG(d,2).
pub fn perturbed_pg(d: usize, seed: u64) -> Result<TripleSystem> {
    if d < 4 {
        return Err(Error::InvalidArgument("perturbed_pg needs d >= 4".into()));
    }
    let base = pg2(d)?;
    let order = base.order();
    let w = perturbed_subspace(d);
    let kept: Vec<Triple> = base
        .triples()
        .iter()
        .filter(|t| !t.iter().all(|&p| w.contains(p)))
        .copied()
        .collect();
    let v = [2usize, 4, 8];
    let preserved: [Triple; 3] = [
        [pg2_point(d, v[0]), pg2_point(d, v[1]), pg2_point(d, v[0] ^ v[1])],
        [pg2_point(d, v[1]), pg2_point(d, v[2]), pg2_point(d, v[1] ^ v[2])],
        [pg2_point(d, v[0]), pg2_point(d, v[2]), pg2_point(d, v[0] ^ v[2])],
    ];

    for attempt in 0..ALIGNMENT_ATTEMPTS {
        let sts = subsystem_free_sts15(seed.wrapping_add(attempt))?;
        let Ok(tri) = find_triangle(&sts) else {
            continue;
        };
        // vertices go to v_1, v_2, v_3 and edge points to their pairwise sums;
        // the other nine points fill W in ascending order
        let mut map = [usize::MAX; 15];
        let targets_v = v.map(|x| pg2_point(d, x));
        let targets_w = [v[0] ^ v[1], v[1] ^ v[2], v[2] ^ v[0]].map(|x| pg2_point(d, x));
        for i in 0..3 {
            map[tri.vertices[i]] = targets_v[i];
            map[tri.edges[i]] = targets_w[i];
        }
        let mut free = w
            .iter()
            .filter(|p| !targets_v.contains(p) && !targets_w.contains(p));
        for slot in map.iter_mut().filter(|m| **m == usize::MAX) {
            *slot = free.next().expect("nine free points");
        }
        let mut triples = kept.clone();
        triples.extend(sts.triples().iter().map(|t| t.map(|p| map[p])));
        let labels = base.tag().labels.clone();
        let sys = TripleSystem::build_tagged(
            order,
            triples,
            Kind::Steiner,
            GeometryTag::new(Variant::PerturbedPg(d), labels),
        )?;
        if preserved.iter().all(|&[a, b, c]| sys.is_block(a, b, c)) {
            return Ok(sys);
        }
    }
    Err(Error::NoTriangleAlignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{closure_set, is_spreading_set, is_spreading_system};

    #[test]
    fn replaced_subspace_is_subsystem_free() {
        let x = perturbed_pg(4, 0).unwrap();
        assert_eq!(x.order(), 31);
        assert_eq!(x.triples().len(), 31 * 30 / 6);
        let (inner, _) = x.induced_subsystem(&perturbed_subspace(4)).unwrap();
        assert!(inner.is_steiner());
        assert!(is_spreading_system(&inner).unwrap());
    }

    #[test]
    fn three_basis_points_close_to_w() {
        let x = perturbed_pg(4, 0).unwrap();
        let v123 = x.point_set([1, 2, 3]).unwrap();
        assert_eq!(closure_set(&x, &v123).unwrap(), perturbed_subspace(4));
    }

    #[test]
    fn witness_is_spreading_with_no_spreading_maximal_subset() {
        let x = perturbed_pg(4, 0).unwrap();
        let u = perturbed_witness(4);
        assert_eq!(u.len(), 4);
        assert!(is_spreading_set(&x, &u).unwrap());
        for p in &u {
            let mut smaller = u.clone();
            smaller.remove(p);
            assert!(!is_spreading_set(&x, &smaller).unwrap(), "U minus {p} spreads");
        }
    }

    #[test]
    fn blocks_outside_w_untouched() {
        let x = perturbed_pg(4, 0).unwrap();
        let base = pg2(4).unwrap();
        let w = perturbed_subspace(4);
        for t in base.triples() {
            if !t.iter().all(|&p| w.contains(p)) {
                assert!(x.is_block(t[0], t[1], t[2]));
            }
        }
    }

    #[test]
    fn small_dimension_rejected() {
        assert!(matches!(perturbed_pg(3, 0), Err(Error::InvalidArgument(_))));
    }
}
