use crate::closure::closure_set;
use crate::constructions::ag3;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointset::PointSet;
use crate::system::{GeometryTag, Kind, Labels, Triple, TripleSystem, Variant};

/// The partial system `X'` together with the named points used to analyze it.
///
/// Points of the hyperplane union come first, in ascending AG(n−1,3) index,
/// followed by the fresh points `b_4 … b_{n+7}`.
#[derive(Debug, Clone)]
pub struct Section4Artifacts {
    pub n: usize,
    /// `X'`: the hyperplane union plus the added b-triples.
    pub system: TripleSystem,
    /// The hyperplane union alone, on points `0..union_order`.
    pub union_system: TripleSystem,
    /// `a_1 … a_n`.
    pub base_points: Vec<usize>,
    /// `X_1 … X_n`, as sets over the points of `X'`.
    pub hyperplane_sets: Vec<PointSet>,
    /// `b_1 … b_{n+7}`.
    pub b_points: Vec<usize>,
}

impl Section4Artifacts {
    pub fn base_set(&self) -> PointSet {
        PointSet::from_points(self.system.order(), self.base_points.iter().copied()).unwrap()
    }

    pub fn triple_set(&self) -> PointSet {
        PointSet::from_points(self.system.order(), self.b_points[..3].iter().copied()).unwrap()
    }
}

/// Builds the hyperplane union of AG(n−1,3) over the affine base
/// `{0, e_1, …, e_{n−1}}` and attaches the chain of b-triples.
pub fn section4_partial(n: usize) -> Result<Section4Artifacts> {
    let cap = Limits::from_env().section4_n;
    if n <= 3 {
        return Err(Error::InvalidArgument(format!("section4 needs n > 3 (got {n})")));
    }
    if n > cap {
        return Err(Error::too_large("section4 n", n as u128, cap as u128));
    }
    let dim = n - 1;
    let ag = ag3(dim)?;
    let ag_labels = ag.tag().labels.clone().expect("ag3 carries labels");

    // a_1 = 0, a_{i+1} = e_i with the 1 in coordinate i (most significant first)
    let base_ag: Vec<usize> = std::iter::once(0)
        .chain((1..n).map(|i| 3usize.pow((dim - i) as u32)))
        .collect();
    let hyperplanes_ag: Vec<PointSet> = (0..n)
        .map(|i| {
            let others = base_ag
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p);
            closure_set(&ag, &ag.point_set(others)?)
        })
        .collect::<Result<_>>()?;
    for (i, h) in hyperplanes_ag.iter().enumerate() {
        debug_assert!(!h.contains(base_ag[i]));
        debug_assert_eq!(h.len(), 3usize.pow((dim - 1) as u32));
    }

    let union_ag = hyperplanes_ag
        .iter()
        .fold(PointSet::empty(ag.order()), |acc, h| acc.union(h));
    let union_points = union_ag.to_vec();
    let mut new_index = vec![usize::MAX; ag.order()];
    for (i, &p) in union_points.iter().enumerate() {
        new_index[p] = i;
    }
    let union_order = union_points.len();
    let order = union_order + n + 4;

    let union_triples: Vec<Triple> = ag
        .triples()
        .iter()
        .filter(|t| hyperplanes_ag.iter().any(|h| t.iter().all(|&p| h.contains(p))))
        .map(|t| t.map(|p| new_index[p]))
        .collect();

    // b_k for k = 1, 2, 3: least point of X_k that lies on no other X_j
    let mut b_points = Vec::with_capacity(n + 7);
    for k in 0..3 {
        let mut diff = hyperplanes_ag[k].clone();
        for (j, h) in hyperplanes_ag.iter().enumerate() {
            if j != k {
                diff = diff.difference(h);
            }
        }
        let first = diff.iter().next().ok_or(Error::EmptyDifferenceSet(k + 1))?;
        b_points.push(new_index[first]);
    }
    b_points.extend(union_order..order);
    let base_points: Vec<usize> = base_ag.iter().map(|&p| new_index[p]).collect();
    let hyperplane_sets: Vec<PointSet> = hyperplanes_ag
        .iter()
        .map(|h| PointSet::from_points(order, h.iter().map(|p| new_index[p])))
        .collect::<Result<_>>()?;

    let b = |k: usize| b_points[k - 1];
    let mut added: Vec<Triple> = Vec::with_capacity(2 * n + 4);
    for k in 1..=n + 4 {
        added.push([b(k), b(k + 1), b(k + 3)]);
    }
    for l in 4..=n + 3 {
        added.push([b(l), b(l + 4), base_points[l - 4]]);
    }
    for t in &added {
        for x in &hyperplane_sets {
            assert!(
                t.iter().filter(|&&p| x.contains(p)).count() <= 1,
                "added triple {t:?} meets a hyperplane twice"
            );
        }
    }

    let labels: Labels = union_points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, ag_labels[p].clone()))
        .collect();
    let union_system = TripleSystem::build_tagged(
        union_order,
        union_triples.iter().copied(),
        Kind::Partial,
        GeometryTag::new(Variant::Section4(n), Some(labels.clone())),
    )?;
    let system = TripleSystem::build_tagged(
        order,
        union_triples.into_iter().chain(added),
        Kind::Partial,
        GeometryTag::new(Variant::Section4(n), Some(labels)),
    )?;
    Ok(Section4Artifacts {
        n,
        system,
        union_system,
        base_points,
        hyperplane_sets,
        b_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{is_closed, is_spreading_set};

    /// |X_1 ∪ … ∪ X_n| by inclusion–exclusion: any j of the n hyperplanes
    /// of the affine base meet in an affine subspace of dimension n−1−j.
    fn union_size_oracle(n: usize) -> usize {
        let mut total: i64 = 0;
        let mut binom: i64 = 1;
        for j in 1..n {
            binom = binom * (n - j + 1) as i64 / j as i64;
            let size = 3i64.pow((n - 1 - j) as u32);
            total += if j % 2 == 1 { binom * size } else { -binom * size };
        }
        total as usize
    }

    #[test]
    fn point_counts_for_n4() {
        assert_eq!(union_size_oracle(4), 4 * 9 - 6 * 3 + 4);
        let art = section4_partial(4).unwrap();
        assert_eq!(art.union_system.order(), 22);
        assert_eq!(art.system.order(), 30);
        assert_eq!(art.b_points.len(), 11);
        assert_eq!(art.union_system.triples().len() + 12, art.system.triples().len());
    }

    #[test]
    fn union_sizes_match_inclusion_exclusion() {
        for n in 4..=6 {
            let art = section4_partial(n).unwrap();
            assert_eq!(art.union_system.order(), union_size_oracle(n), "n = {n}");
            assert_eq!(art.system.order(), union_size_oracle(n) + n + 4);
        }
    }

    #[test]
    fn base_is_minimal_spreading_in_union() {
        let art = section4_partial(4).unwrap();
        let x = &art.union_system;
        let base = x.point_set(art.base_points.iter().copied()).unwrap();
        assert!(is_spreading_set(x, &base).unwrap());
        for i in 0..4 {
            let mut rest = base.clone();
            rest.remove(art.base_points[i]);
            assert!(!is_spreading_set(x, &rest).unwrap());
        }
    }

    #[test]
    fn b_triple_and_base_spread_in_extended_system() {
        let art = section4_partial(4).unwrap();
        assert!(is_spreading_set(&art.system, &art.triple_set()).unwrap());
        assert!(is_spreading_set(&art.system, &art.base_set()).unwrap());
        for h in &art.hyperplane_sets {
            assert!(is_closed(&art.system, h).unwrap());
        }
    }

    #[test]
    fn difference_points_are_where_expected() {
        let art = section4_partial(4).unwrap();
        for k in 0..3 {
            let b = art.b_points[k];
            for (j, h) in art.hyperplane_sets.iter().enumerate() {
                assert_eq!(h.contains(b), j == k);
            }
        }
    }

    #[test]
    fn bad_n_rejected() {
        assert!(matches!(section4_partial(3), Err(Error::InvalidArgument(_))));
        assert!(matches!(section4_partial(7), Err(Error::TooLarge { .. })));
    }
}
