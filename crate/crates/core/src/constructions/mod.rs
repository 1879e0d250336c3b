//! Explicit systems: binary projective spaces, ternary affine spaces, a
//! subsystem-free STS(15), the perturbed projective space, and the
//! hyperplane-union partial system.

mod perturbed;
mod section4;
mod sts15;

pub use perturbed::{perturbed_pg, perturbed_subspace, perturbed_witness};
pub use section4::{section4_partial, Section4Artifacts};
pub use sts15::{subsystem_free_sts15, STS15_BACKTRACK_NODES, STS15_MAX_RESTARTS};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::system::{GeometryTag, Kind, Labels, Triple, TripleSystem, Variant};

fn check_order(what: &'static str, order: u128) -> Result<usize> {
    let cap = Limits::from_env().construct_order;
    if order > cap as u128 {
        return Err(Error::too_large(what, order, cap as u128));
    }
    Ok(order as usize)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Point index in PG(d,2) of the nonzero vector with bits `value`. Points are
/// ordered by Hamming weight, then by value, so `0..=d` are the unit vectors.
pub fn pg2_point(d: usize, value: usize) -> usize {
    debug_assert!(value != 0 && value >> (d + 1) == 0);
    let weight = value.count_ones() as usize;
    let offset: usize = (1..weight).map(|k| binom(d + 1, k)).sum();
    // colex rank among the vectors of this weight
    let mut rank = 0;
    let mut seen = 0;
    for bit in 0..=d {
        if value >> bit & 1 == 1 {
            seen += 1;
            rank += binom(bit, seen);
        }
    }
    offset + rank
}

/// Inverse of [`pg2_point`].
pub fn pg2_value(d: usize, point: usize) -> usize {
    let mut r = point;
    let mut weight = 1;
    while r >= binom(d + 1, weight) {
        r -= binom(d + 1, weight);
        weight += 1;
    }
    let mut value = 0;
    for i in (1..=weight).rev() {
        let mut c = i - 1;
        while binom(c + 1, i) <= r {
            c += 1;
        }
        value |= 1 << c;
        r -= binom(c, i);
    }
    value
}

/// Bits of `value`, most significant of `len` coordinates first.
pub fn binary_digits(value: usize, len: usize) -> Vec<u8> {
    (0..len).rev().map(|i| ((value >> i) & 1) as u8).collect()
}

/// PG(d,2): points are the nonzero vectors of F2^{d+1}, indexed as in
/// [`pg2_point`], and blocks are `{a, b, a+b}`.
pub fn pg2(d: usize) -> Result<TripleSystem> {
    if d == 0 {
        return Err(Error::InvalidArgument("pg2 needs d >= 1".into()));
    }
    if d + 1 >= 64 {
        return Err(Error::too_large("PG(d,2) order", u128::MAX, Limits::from_env().construct_order as u128));
    }
    let order = check_order("PG(d,2) order", (1u128 << (d + 1)) - 1)?;
    let mut triples = Vec::with_capacity(order * (order - 1) / 6);
    for a in 1..=order {
        for b in a + 1..=order {
            let c = a ^ b;
            if c > b {
                triples.push([pg2_point(d, a), pg2_point(d, b), pg2_point(d, c)]);
            }
        }
    }
    let labels: Labels = (0..order)
        .map(|p| (p, binary_digits(pg2_value(d, p), d + 1)))
        .collect();
    TripleSystem::build_tagged(
        order,
        triples,
        Kind::Steiner,
        GeometryTag::new(Variant::Pg2(d), Some(labels)),
    )
}

/// Base-3 digits of `index`, most significant of `len` coordinates first.
pub fn ternary_digits(mut index: usize, len: usize) -> Vec<u8> {
    let mut digits = vec![0u8; len];
    for slot in digits.iter_mut().rev() {
        *slot = (index % 3) as u8;
        index /= 3;
    }
    digits
}

pub fn ternary_index(digits: &[u8]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 3 + d as usize)
}

/// AG(d,3): points are F3^d (numbered by base-3 value), blocks are the
/// distinct triples summing to zero.
pub fn ag3(d: usize) -> Result<TripleSystem> {
    if d == 0 {
        return Err(Error::InvalidArgument("ag3 needs d >= 1".into()));
    }
    if d >= 40 {
        return Err(Error::too_large("AG(d,3) order", u128::MAX, Limits::from_env().construct_order as u128));
    }
    let order = check_order("AG(d,3) order", 3u128.pow(d as u32))?;
    let digits: Vec<Vec<u8>> = (0..order).map(|p| ternary_digits(p, d)).collect();
    let mut triples = Vec::with_capacity(order * (order - 1) / 6);
    for a in 0..order {
        for b in a + 1..order {
            let third: Vec<u8> = digits[a]
                .iter()
                .zip(&digits[b])
                .map(|(&x, &y)| (6 - x - y) % 3)
                .collect();
            let c = ternary_index(&third);
            if c > b {
                triples.push([a, b, c]);
            }
        }
    }
    let labels: Labels = digits.into_iter().enumerate().collect();
    TripleSystem::build_tagged(
        order,
        triples,
        Kind::Steiner,
        GeometryTag::new(Variant::Ag3(d), Some(labels)),
    )
}

/// Six points with blocks `{v, w, v'}`, `{v', w', v''}`, `{v'', w'', v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub edges: [usize; 3],
}

impl Triangle {
    pub fn blocks(&self) -> [Triple; 3] {
        let [v0, v1, v2] = self.vertices;
        let [w0, w1, w2] = self.edges;
        [[v0, w0, v1], [v1, w1, v2], [v2, w2, v0]]
    }
}

/// The lexicographically first triangle configuration.
pub fn find_triangle(ts: &TripleSystem) -> Result<Triangle> {
    ts.require_steiner()?;
    let n = ts.order();
    if n < 7 {
        return Err(Error::NoTriangle);
    }
    for v0 in 0..n {
        for v1 in v0 + 1..n {
            let w0 = ts.third_unchecked(v0, v1).ok_or(Error::NoTriangle)?;
            for v2 in v1 + 1..n {
                if v2 == w0 {
                    continue;
                }
                let w1 = ts.third_unchecked(v1, v2).ok_or(Error::NoTriangle)?;
                let w2 = ts.third_unchecked(v2, v0).ok_or(Error::NoTriangle)?;
                return Ok(Triangle {
                    vertices: [v0, v1, v2],
                    edges: [w0, w1, w2],
                });
            }
        }
    }
    Err(Error::NoTriangle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure_of;

    #[test]
    fn pg2_small_cases() {
        let s3 = pg2(1).unwrap();
        assert_eq!(s3.order(), 3);
        assert_eq!(s3.triples(), &[[0, 1, 2]]);
        let fano = pg2(2).unwrap();
        assert_eq!(fano.triples().len(), 7);
        assert!(fano.is_steiner());
        assert_eq!(fano.tag().label(2), Some(&[1u8, 0, 0][..]));
        assert_eq!(fano.tag().label(3), Some(&[0u8, 1, 1][..]));
        let pg3 = pg2(3).unwrap();
        assert_eq!((pg3.order(), pg3.triples().len()), (15, 35));
    }

    #[test]
    fn pg2_indexing_round_trips() {
        for d in 1..=6 {
            let order = (1 << (d + 1)) - 1;
            let mut seen = vec![false; order];
            for v in 1..=order {
                let p = pg2_point(d, v);
                assert!(!seen[p]);
                seen[p] = true;
                assert_eq!(pg2_value(d, p), v);
            }
            // unit vectors come first, then ascending within each weight
            for i in 0..=d {
                assert_eq!(pg2_point(d, 1 << i), i);
            }
            for p in 1..order {
                let (a, b) = (pg2_value(d, p - 1), pg2_value(d, p));
                assert!((a.count_ones(), a) < (b.count_ones(), b));
            }
        }
    }

    #[test]
    fn pg2_third_point_is_label_sum() {
        let fano = pg2(2).unwrap();
        // 001 + 010 = 011
        assert_eq!(
            fano.third_point(pg2_point(2, 1), pg2_point(2, 2)).unwrap(),
            Some(pg2_point(2, 3))
        );
    }

    #[test]
    fn ag3_small_cases() {
        assert_eq!(ag3(1).unwrap().triples(), &[[0, 1, 2]]);
        let ag2 = ag3(2).unwrap();
        assert_eq!((ag2.order(), ag2.triples().len()), (9, 12));
        let ag3_3 = ag3(3).unwrap();
        assert_eq!((ag3_3.order(), ag3_3.triples().len()), (27, 117));
    }

    #[test]
    fn too_large_rejected() {
        assert!(matches!(pg2(40), Err(Error::TooLarge { .. })));
        assert!(matches!(pg2(12), Err(Error::TooLarge { .. })));
        assert!(matches!(ag3(9), Err(Error::TooLarge { .. })));
        assert!(matches!(pg2(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn triangle_in_fano() {
        let fano = pg2(2).unwrap();
        let t = find_triangle(&fano).unwrap();
        for [a, b, c] in t.blocks() {
            assert!(fano.is_block(a, b, c));
        }
        // in PG the edge points are label sums
        let [v0, v1, v2] = t.vertices.map(|p| pg2_value(2, p));
        assert_eq!(t.edges.map(|p| pg2_value(2, p)), [v0 ^ v1, v1 ^ v2, v2 ^ v0]);
        let mut all: Vec<usize> = t.vertices.iter().chain(&t.edges).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 6);
        // the vertices are non-collinear
        assert_eq!(closure_of(&fano, &t.vertices).unwrap().len(), 7);
    }

    #[test]
    fn no_triangle_in_sts3() {
        assert_eq!(find_triangle(&pg2(1).unwrap()), Err(Error::NoTriangle));
    }

    #[test]
    fn digit_helpers() {
        assert_eq!(binary_digits(6, 4), vec![0, 1, 1, 0]);
        assert_eq!(ternary_digits(5, 3), vec![0, 1, 2]);
        assert_eq!(ternary_index(&[0, 1, 2]), 5);
    }
}
