use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{chain_complex_of, validate, SemiSimplicialSet, SsetError};
use crate::chains::ChainMap;
use crate::exact_linalg::IntegerMatrix;

/// A levelwise map `total -> base` that is a finite covering: it commutes
/// with faces, every base simplex has the same number of preimages, and
/// every face map restricts to a bijection between fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    total: SemiSimplicialSet,
    base: SemiSimplicialSet,
    projection: Vec<Vec<usize>>,
    sheets: usize,
}

impl Covering {
    pub fn new(total: SemiSimplicialSet, base: SemiSimplicialSet, projection: Vec<Vec<usize>>) -> Result<Self, SsetError> {
        validate(&total)?;
        validate(&base)?;
        let levels = total.num_levels().max(base.num_levels());
        if projection.len() != total.num_levels() {
            return Err(SsetError::ProjectionShape(projection.len().min(total.num_levels())));
        }
        for k in 0..total.num_levels() {
            if projection[k].len() != total.size(k) || projection[k].iter().any(|&b| b >= base.size(k)) {
                return Err(SsetError::ProjectionShape(k));
            }
        }
        for k in 1..total.num_levels() {
            for i in 0..=k {
                for e in 0..total.size(k) {
                    if projection[k - 1][total.face(k, i, e)] != base.face(k, i, projection[k][e]) {
                        return Err(SsetError::ProjectionNotSimplicial { level: k, face: i, simplex: e });
                    }
                }
            }
        }

        let fibers: Vec<Vec<Vec<usize>>> = (0..levels)
            .map(|k| {
                let mut f = vec![Vec::new(); base.size(k)];
                if k < total.num_levels() {
                    for (e, &b) in projection[k].iter().enumerate() {
                        f[b].push(e);
                    }
                }
                f
            })
            .collect();
        let sheets = fibers.first().and_then(|f| f.first()).map_or(0, Vec::len);
        for (k, level) in fibers.iter().enumerate() {
            if let Some((b, f)) = level.iter().enumerate().find(|(_, f)| f.len() != sheets) {
                return Err(SsetError::NonConstantFiber { level: k, simplex: b, expected: sheets, found: f.len() });
            }
        }
        for k in 1..total.num_levels() {
            for i in 0..=k {
                for (b, fiber) in fibers[k].iter().enumerate() {
                    let mut images: Vec<usize> = fiber.iter().map(|&e| total.face(k, i, e)).collect();
                    images.sort_unstable();
                    images.dedup();
                    // images already lie over d_i b; distinct and as many as the fiber
                    if images.len() != fiber.len() {
                        return Err(SsetError::FiberFaceNotBijective { level: k, face: i, simplex: b });
                    }
                }
            }
        }
        Ok(Covering { total, base, projection, sheets })
    }

    pub fn total(&self) -> &SemiSimplicialSet {
        &self.total
    }

    pub fn base(&self) -> &SemiSimplicialSet {
        &self.base
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn projection(&self) -> &[Vec<usize>] {
        &self.projection
    }
}

/// Transfer `C(base) -> C(total)`, sending a simplex to the sum of its preimages.
pub fn covering_transfer(p: &Covering) -> Result<ChainMap, SsetError> {
    let source = chain_complex_of(&p.base)?;
    let target = chain_complex_of(&p.total)?;
    let mut blocks = BTreeMap::new();
    for (k, proj) in p.projection.iter().enumerate() {
        let entries = proj.iter().enumerate().map(|(e, &b)| (e, b, BigInt::from(1)));
        blocks.insert(k as i64, IntegerMatrix::from_triplets(p.total.size(k), p.base.size(k), entries).expect("in range"));
    }
    let trf = ChainMap::new(source, target, blocks)?;
    trf.validate()?;
    Ok(trf)
}

/// The chain map `C(total) -> C(base)` induced by the projection.
pub fn covering_projection(p: &Covering) -> Result<ChainMap, SsetError> {
    let source = chain_complex_of(&p.total)?;
    let target = chain_complex_of(&p.base)?;
    let mut blocks = BTreeMap::new();
    for (k, proj) in p.projection.iter().enumerate() {
        let entries = proj.iter().enumerate().map(|(e, &b)| (b, e, BigInt::from(1)));
        blocks.insert(k as i64, IntegerMatrix::from_triplets(p.base.size(k), p.total.size(k), entries).expect("in range"));
    }
    let proj = ChainMap::new(source, target, blocks)?;
    proj.validate()?;
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::integral_cycle_basis;

    fn double_cover() -> Covering {
        // u0, u1; f0: u0 -> u1, f1: u1 -> u0 (d1 = source, d0 = target)
        let total = SemiSimplicialSet::new(vec![2, 2], vec![vec![], vec![vec![1, 0], vec![0, 1]]]).unwrap();
        Covering::new(total, SemiSimplicialSet::circle(), vec![vec![0, 0], vec![0, 0]]).unwrap()
    }

    fn scalar_map(c: &crate::chains::ChainComplex, n: i64) -> ChainMap {
        let blocks = c.degrees().map(|k| (k, IntegerMatrix::scalar(c.rank(k), BigInt::from(n)))).collect();
        ChainMap::new(c.clone(), c.clone(), blocks).unwrap()
    }

    #[test]
    fn circle_double_cover() {
        let p = double_cover();
        assert_eq!(p.sheets(), 2);
        let trf = covering_transfer(&p).unwrap();
        assert_eq!(trf.block(1), IntegerMatrix::from_i64(&[&[1], &[1]]));
        let proj = covering_projection(&p).unwrap();
        let composite = trf.compose(&proj).unwrap();
        assert_eq!(composite, scalar_map(trf.source(), 2));

        // H1 generators: e downstairs, ±(f0 + f1) upstairs.
        let z_up = integral_cycle_basis(proj.source(), 1);
        assert_eq!(z_up.shape(), (2, 1));
        let image = trf.block(1);
        assert!(image == z_up || image == z_up.neg());
        let down = proj.block(1).mul(&z_up).unwrap();
        assert_eq!(num_traits::Signed::abs(&down.get(0, 0).unwrap()), BigInt::from(2));
    }

    #[test]
    fn identity_cover() {
        let x = SemiSimplicialSet::from_facets(&[vec![0, 1, 2]]);
        let proj = x.sizes().iter().map(|&n| (0..n).collect()).collect();
        let p = Covering::new(x.clone(), x, proj).unwrap();
        let trf = covering_transfer(&p).unwrap();
        assert_eq!(trf, ChainMap::identity(trf.source()));
    }

    #[test]
    fn trivial_three_sheeted() {
        let b = SemiSimplicialSet::from_facets(&[vec![0, 1], vec![1, 2]]);
        let e = b.disjoint_union(&b).disjoint_union(&b);
        let proj = b.sizes().iter().map(|&n| (0..3 * n).map(|s| s % n).collect()).collect();
        let p = Covering::new(e, b, proj).unwrap();
        let trf = covering_transfer(&p).unwrap();
        let composite = trf.compose(&covering_projection(&p).unwrap()).unwrap();
        assert_eq!(composite, scalar_map(trf.source(), 3));
    }

    #[test]
    fn fiber_checks() {
        // two points over one point, edge only over one of them: non-constant fiber at level 1
        let base = SemiSimplicialSet::circle();
        let total = SemiSimplicialSet::new(vec![2, 1], vec![vec![], vec![vec![0], vec![0]]]).unwrap();
        let err = Covering::new(total, base.clone(), vec![vec![0, 0], vec![0]]);
        assert!(matches!(err, Err(SsetError::NonConstantFiber { level: 1, .. })));

        // both edges start and end at u0: d0 is not a bijection on fibers
        let total = SemiSimplicialSet::new(vec![2, 2], vec![vec![], vec![vec![0, 0], vec![0, 1]]]).unwrap();
        let err = Covering::new(total, base, vec![vec![0, 0], vec![0, 0]]);
        assert!(matches!(err, Err(SsetError::FiberFaceNotBijective { level: 1, face: 0, simplex: 0 })));
    }

    #[test]
    fn projection_must_commute() {
        let base = SemiSimplicialSet::from_facets(&[vec![0, 1]]);
        let total = base.clone();
        // swap the vertices but keep the edge
        let err = Covering::new(total, base, vec![vec![1, 0], vec![0]]);
        assert!(matches!(err, Err(SsetError::ProjectionNotSimplicial { level: 1, .. })));
    }
}
