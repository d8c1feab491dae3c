//! Seeded generators of small valid semi-simplicial sets and coverings,
//! used by property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Covering, SemiSimplicialSet};

/// Random semi-simplicial set with up to `max_dim + 1` levels and at most
/// `max_per_level` simplices per level.
///
/// Each new k-simplex picks its faces `d_0, d_1, ...` in turn among the
/// (k-1)-simplices compatible with the identities `d_i d_j = d_{j-1} d_i`
/// already fixed; a simplex with no compatible choice is dropped. Multiple
/// edges, loops and other non-simplicial gluings all occur.
pub fn random_semi_simplicial<R: Rng>(rng: &mut R, max_dim: usize, max_per_level: usize) -> SemiSimplicialSet {
    let mut sizes = vec![rng.gen_range(1..=max_per_level.max(1))];
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for k in 1..=max_dim {
        let attempts = rng.gen_range(0..=max_per_level);
        let mut level: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        let mut count = 0;
        for _ in 0..attempts {
            let mut chosen: Vec<usize> = Vec::with_capacity(k + 1);
            for j in 0..=k {
                let candidates: Vec<usize> = (0..sizes[k - 1])
                    .filter(|&c| {
                        k < 2 || (0..j).all(|i| faces[k - 1][i][c] == faces[k - 1][j - 1][chosen[i]])
                    })
                    .collect();
                match candidates.choose(rng) {
                    Some(&c) => chosen.push(c),
                    None => break,
                }
            }
            if chosen.len() == k + 1 {
                for (i, c) in chosen.into_iter().enumerate() {
                    level[i].push(c);
                }
                count += 1;
            }
        }
        if count == 0 {
            break;
        }
        sizes.push(count);
        faces.push(level);
    }
    SemiSimplicialSet::new(sizes, faces).expect("generated faces are in range")
}

/// Random `sheets`-fold covering of `base`.
///
/// Total simplices are pairs `(σ, s)` stored at `σ * sheets + s`; `d_0` moves
/// the sheet by a permutation attached to the first edge of `σ`, the other
/// faces keep it. Over a graph the edge permutations are arbitrary; in
/// higher dimensions they are coboundaries of random vertex permutations so
/// that the cocycle condition on triangles holds.
pub fn random_covering<R: Rng>(rng: &mut R, base: &SemiSimplicialSet, sheets: usize) -> Covering {
    let random_perm = |rng: &mut R| {
        let mut p: Vec<usize> = (0..sheets).collect();
        p.shuffle(rng);
        p
    };
    let edge_perm: Vec<Vec<usize>> = if base.num_levels() <= 2 {
        (0..base.size(1)).map(|_| random_perm(rng)).collect()
    } else {
        let vertex: Vec<Vec<usize>> = (0..base.size(0)).map(|_| random_perm(rng)).collect();
        (0..base.size(1))
            .map(|e| {
                let (head, tail) = (&vertex[base.face(1, 0, e)], &vertex[base.face(1, 1, e)]);
                let mut tail_inv = vec![0; sheets];
                for (a, &b) in tail.iter().enumerate() {
                    tail_inv[b] = a;
                }
                (0..sheets).map(|s| head[tail_inv[s]]).collect()
            })
            .collect()
    };
    let first_edge = |k: usize, mut s: usize| {
        for level in (2..=k).rev() {
            s = base.face(level, level, s);
        }
        s
    };
    let sizes: Vec<usize> = base.sizes().iter().map(|n| n * sheets).collect();
    let faces = (0..base.num_levels())
        .map(|k| {
            if k == 0 {
                return Vec::new();
            }
            (0..=k)
                .map(|i| {
                    (0..sizes[k])
                        .map(|idx| {
                            let (sigma, s) = (idx / sheets, idx % sheets);
                            let t = if i == 0 { edge_perm[first_edge(k, sigma)][s] } else { s };
                            base.face(k, i, sigma) * sheets + t
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let total = SemiSimplicialSet::new(sizes.clone(), faces).expect("in range");
    let projection = sizes.iter().map(|&n| (0..n).map(|idx| idx / sheets).collect()).collect();
    Covering::new(total, base.clone(), projection).expect("twisted product is a covering")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssets::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_sets_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = random_semi_simplicial(&mut rng, 4, 6);
            assert!(validate(&x).is_ok());
        }
    }

    #[test]
    fn generated_coverings_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = random_semi_simplicial(&mut rng, 3, 5);
            let sheets = rng.gen_range(1..=3);
            let p = random_covering(&mut rng, &x, sheets);
            assert_eq!(p.sheets(), sheets);
        }
    }

    #[test]
    fn higher_levels_appear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tallest = (0..100).map(|_| random_semi_simplicial(&mut rng, 4, 6).num_levels()).max();
        assert!(tallest >= Some(4));
    }
}
