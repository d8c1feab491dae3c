use super::{validate, PointedSemiSimplicialSet, SemiSimplicialSet, SsetError};

/// A set `X_{-1}` with a map `ε : X_0 -> X_{-1}` satisfying `ε d_0 = ε d_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    size: usize,
    map: Vec<usize>,
}

impl Augmentation {
    pub fn new(x: &SemiSimplicialSet, size: usize, map: Vec<usize>) -> Result<Self, SsetError> {
        if map.len() != x.size(0) || map.iter().any(|&v| v >= size) {
            return Err(SsetError::AugmentationShape { expected: x.size(0), found: map.len() });
        }
        if let Some(e) = (0..x.size(1)).find(|&e| map[x.face(1, 0, e)] != map[x.face(1, 1, e)]) {
            return Err(SsetError::AugmentationNotSimplicial(e));
        }
        Ok(Augmentation { size, map })
    }

    /// `X_{-1}` a single point.
    pub fn to_point(x: &SemiSimplicialSet) -> Self {
        Augmentation { size: 1, map: vec![0; x.size(0)] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// The pointed semi-simplicial set `X_{•-1}^+ ⋊ [•]` with `X_{-1}` empty.
///
/// Level `m` is the basepoint (index 0) together with pairs `(σ, j)` for
/// `σ ∈ X_{m-1}` and `0 <= j <= m`, stored at index `1 + σ (m + 1) + j`.
/// Faces:
///
/// ```text
/// d_i(σ, j) = (d_i σ, j - 1)    if i < j
///           = *                  if i = j
///           = (d_{i-1} σ, j)     if i > j
/// ```
///
/// Level 0 is the basepoint alone and every face out of level 1 is the
/// basepoint.
pub fn half_smash_construction(x: &SemiSimplicialSet) -> Result<PointedSemiSimplicialSet, SsetError> {
    build(x, None)
}

/// As [`half_smash_construction`], with `X_{-1}` and `d_0 : X_0 -> X_{-1}`
/// given by `aug`. Level 0 is the basepoint plus `(v, 0)` for `v ∈ X_{-1}`.
pub fn half_smash_augmented(x: &SemiSimplicialSet, aug: &Augmentation) -> Result<PointedSemiSimplicialSet, SsetError> {
    Augmentation::new(x, aug.size, aug.map.clone())?;
    build(x, Some(aug))
}

fn build(x: &SemiSimplicialSet, aug: Option<&Augmentation>) -> Result<PointedSemiSimplicialSet, SsetError> {
    validate(x)?;
    let levels = x.num_levels() + 1;
    let pair = |m: usize, sigma: usize, j: usize| 1 + sigma * (m + 1) + j;
    let below = |m: usize| if m == 0 { aug.map_or(0, |a| a.size) } else { x.size(m - 1) };
    // d_i on X_{m-1}, reaching into X_{-1} when m = 1
    let face_below = |m: usize, i: usize, sigma: usize| -> Option<usize> {
        if m == 1 {
            aug.map(|a| a.map[sigma])
        } else {
            Some(x.face(m - 1, i, sigma))
        }
    };
    let sizes: Vec<usize> = (0..levels).map(|m| 1 + below(m) * (m + 1)).collect();
    let mut faces = vec![Vec::new()];
    for m in 1..levels {
        let mut level_faces = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut face = vec![0; sizes[m]];
            for sigma in 0..below(m) {
                for j in 0..=m {
                    let target = match i.cmp(&j) {
                        std::cmp::Ordering::Equal => None,
                        std::cmp::Ordering::Less => face_below(m, i, sigma).map(|t| pair(m - 1, t, j - 1)),
                        std::cmp::Ordering::Greater => face_below(m, i - 1, sigma).map(|t| pair(m - 1, t, j)),
                    };
                    face[pair(m, sigma, j)] = target.unwrap_or(0);
                }
            }
            level_faces.push(face);
        }
        faces.push(level_faces);
    }
    let set = SemiSimplicialSet::new(sizes, faces)?;
    let basepoints = vec![0; set.num_levels()];
    PointedSemiSimplicialSet::new(set, basepoints)
}
