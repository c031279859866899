//! Pixel permutations standing in for a randomizing fiber bundle.
//!
//! `forward[k]` is the sensor index receiving scene pixel `k`. Maps are drawn
//! with a Fisher-Yates shuffle driven by ChaCha8 seeded from a `u64`, which is
//! reproducible across platforms.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::shutter::ShutterProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMap {
    forward: Vec<u32>,
    inverse: Vec<u32>,
    /// `None` for the identity (lens) map.
    seed: Option<u64>,
}

impl PermutationMap {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("permutation size must be at least 1"));
        }
        check_index_range(n)?;
        let forward: Vec<u32> = (0..n as u32).collect();
        Ok(Self { inverse: forward.clone(), forward, seed: None })
    }

    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("permutation size must be at least 1"));
        }
        check_index_range(n)?;
        let mut forward: Vec<u32> = (0..n as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        forward.shuffle(&mut rng);
        let mut map = Self::from_forward(forward)?;
        map.seed = Some(seed);
        Ok(map)
    }

    /// Validates an explicit index map.
    pub fn from_forward(forward: Vec<u32>) -> Result<Self> {
        let n = forward.len();
        if n == 0 {
            return Err(Error::param("permutation size must be at least 1"));
        }
        let mut inverse = vec![u32::MAX; n];
        for (k, &s) in forward.iter().enumerate() {
            let s = s as usize;
            if s >= n {
                return Err(Error::param(format!("index {s} out of range for size {n}")));
            }
            if inverse[s] != u32::MAX {
                return Err(Error::param(format!("index {s} appears twice")));
            }
            inverse[s] = k as u32;
        }
        Ok(Self { forward, inverse, seed: None })
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(k, &s)| k == s as usize)
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    /// Sensor index of scene pixel `k`.
    #[inline]
    pub fn sensor_of(&self, k: usize) -> usize {
        self.forward[k] as usize
    }

    /// Scene pixel landing on sensor index `s`.
    #[inline]
    pub fn scene_of(&self, s: usize) -> usize {
        self.inverse[s] as usize
    }

    /// Reorders `values`: forward places `values[k]` at `forward[k]`;
    /// inverse undoes it.
    pub fn apply<T: Copy>(&self, values: &[T], direction: Direction) -> Result<Vec<T>> {
        if values.len() != self.size() {
            return Err(Error::dim(format!(
                "sequence of length {} for permutation of size {}",
                values.len(),
                self.size()
            )));
        }
        let gather = match direction {
            Direction::Forward => &self.inverse,
            Direction::Inverse => &self.forward,
        };
        Ok(gather.iter().map(|&i| values[i as usize]).collect())
    }

    pub fn permute<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        self.apply(values, Direction::Forward)
    }

    pub fn unpermute<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        self.apply(values, Direction::Inverse)
    }
}

fn check_index_range(n: usize) -> Result<()> {
    if n > u32::MAX as usize {
        return Err(Error::param("permutation larger than 2^32 - 1 entries"));
    }
    Ok(())
}

/// Diagonal of `P^T S P` on the scene grid: scene pixel `k` integrates for
/// the exposure of the sensor row that `forward[k]` lies on.
pub fn conjugated_exposure(profile: &ShutterProfile, map: &PermutationMap, width: usize) -> Result<Vec<f64>> {
    if width == 0 || map.size() != profile.rows() * width {
        return Err(Error::dim(format!(
            "permutation of size {} does not cover a {}x{} sensor",
            map.size(),
            width,
            profile.rows()
        )));
    }
    Ok(map.forward().iter().map(|&s| profile.row_exposure(s as usize / width)).collect())
}
