use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::permutation::PermutationMap;

/// One nonzero of the system matrix: flux (DN/s per unit scene radiance)
/// arriving at `sensor` from calibration point `scene`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub sensor: u32,
    pub scene: u32,
    pub flux: f64,
}

/// Calibrated sensor-by-scene optical matrix.
///
/// Entries are kept sorted by `(scene, sensor)`. Pixels listed in
/// `invalid_pixels` carry no entries and are erased from every measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystemMatrix {
    n_sensor: usize,
    n_scene: usize,
    entries: Vec<Entry>,
    invalid_pixels: Vec<u32>,
}

impl SparseSystemMatrix {
    pub fn new(
        n_sensor: usize,
        n_scene: usize,
        mut entries: Vec<Entry>,
        invalid_pixels: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        if n_sensor == 0 || n_scene == 0 {
            return Err(Error::param("matrix dimensions must be nonzero"));
        }
        if n_sensor > u32::MAX as usize || n_scene > u32::MAX as usize {
            return Err(Error::param("matrix dimensions exceed u32 indexing"));
        }
        let invalid: BTreeSet<u32> = invalid_pixels.into_iter().collect();
        if let Some(&p) = invalid.iter().next_back() {
            if p as usize >= n_sensor {
                return Err(Error::param(format!("invalid pixel {p} out of range")));
            }
        }
        for e in &entries {
            if e.sensor as usize >= n_sensor || e.scene as usize >= n_scene {
                return Err(Error::param(format!(
                    "entry ({}, {}) outside {}x{}",
                    e.sensor, e.scene, n_sensor, n_scene
                )));
            }
            if !(e.flux.is_finite() && e.flux > 0.0) {
                return Err(Error::param(format!("entry flux {} must be positive", e.flux)));
            }
            if invalid.contains(&e.sensor) {
                return Err(Error::param(format!("invalid pixel {} has an entry", e.sensor)));
            }
        }
        entries.sort_by_key(|e| (e.scene, e.sensor));
        if entries.windows(2).any(|w| (w[0].scene, w[0].sensor) == (w[1].scene, w[1].sensor)) {
            return Err(Error::param("duplicate matrix entry"));
        }
        Ok(Self { n_sensor, n_scene, entries, invalid_pixels: invalid.into_iter().collect() })
    }

    /// Ideal permuting optics: scene point `k` lands on `map.forward[k]` with
    /// the given flux.
    pub fn from_permutation(map: &PermutationMap, flux: f64) -> Result<Self> {
        let entries =
            map.forward().iter().enumerate().map(|(k, &s)| Entry { sensor: s, scene: k as u32, flux }).collect();
        Self::new(map.size(), map.size(), entries, [])
    }

    pub fn n_sensor(&self) -> usize {
        self.n_sensor
    }

    pub fn n_scene(&self) -> usize {
        self.n_scene
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn invalid_pixels(&self) -> &[u32] {
        &self.invalid_pixels
    }

    pub fn column(&self, scene: usize) -> &[Entry] {
        let start = self.entries.partition_point(|e| (e.scene as usize) < scene);
        let end = self.entries.partition_point(|e| (e.scene as usize) <= scene);
        &self.entries[start..end]
    }

    pub fn max_entries_per_column(&self) -> usize {
        (0..self.n_scene).map(|k| self.column(k).len()).max().unwrap_or(0)
    }

    /// Rows restricted to `rows` (in order), re-indexed 0.., keeping all
    /// columns. Invalid pixels among the rows are carried over.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut remap = vec![u32::MAX; self.n_sensor];
        for (new, &old) in rows.iter().enumerate() {
            if old >= self.n_sensor {
                return Err(Error::param(format!("row {old} out of range")));
            }
            remap[old] = new as u32;
        }
        let entries = self
            .entries
            .iter()
            .filter(|e| remap[e.sensor as usize] != u32::MAX)
            .map(|e| Entry { sensor: remap[e.sensor as usize], ..*e })
            .collect();
        let invalid =
            self.invalid_pixels.iter().filter(|&&p| remap[p as usize] != u32::MAX).map(|&p| remap[p as usize]);
        Self::new(rows.len(), self.n_scene, entries, invalid)
    }
}
