//! Data association between world-frame crater observations and map craters:
//! greedy nearest-neighbor in ascending center distance, gated on position
//! and diameter, one-to-one, with a deterministic lowest-id tie-break.

use crate::error::{Error, Result};
use crate::types::{Crater, KppConfig};

/// Result of associating observations against a candidate crater set.
///
/// `unmatched_db_in_range` holds the ids of candidates left unmatched; the
/// caller supplies the in-range candidate subset, so "in range" reflects its
/// filtering.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchSet {
    /// (observation index, crater id) pairs; each index and id appears at most once.
    pub pairs: Vec<(usize, u64)>,
    pub unmatched_obs: Vec<usize>,
    pub unmatched_db_in_range: Vec<u64>,
}

/// Default association gates: 3-sigma position consistency plus a caller-
/// supplied motion uncertainty radius, and 3-sigma diameter consistency.
pub fn default_gates(kpp: &KppConfig, motion_uncertainty_radius: f64) -> (f64, f64) {
    (
        3.0 * kpp.crater_pos_sigma + motion_uncertainty_radius,
        3.0 * kpp.crater_size_sigma,
    )
}

/// Greedily match world-frame observations to candidate map craters.
///
/// A pair is admissible iff its center distance is within `gate_pos` and its
/// diameter difference within `gate_diam`. Admissible pairs are taken in
/// ascending distance order (ties broken by lowest crater id, then lowest
/// observation index), skipping any pair whose observation or crater is
/// already used.
pub fn associate(
    world_obs: &[Crater],
    candidates: &[Crater],
    gate_pos: f64,
    gate_diam: f64,
) -> Result<MatchSet> {
    if !(gate_pos > 0.0 && gate_diam > 0.0) {
        return Err(Error::Domain(format!(
            "association gates must be > 0, got {gate_pos} and {gate_diam}"
        )));
    }

    let mut admissible: Vec<(f64, u64, usize, usize)> = Vec::new();
    for (oi, o) in world_obs.iter().enumerate() {
        for (ci, c) in candidates.iter().enumerate() {
            let d = (o.x - c.x).hypot(o.y - c.y);
            if d <= gate_pos && (o.diameter - c.diameter).abs() <= gate_diam {
                admissible.push((d, c.id, oi, ci));
            }
        }
    }
    admissible.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut obs_used = vec![false; world_obs.len()];
    let mut db_used = vec![false; candidates.len()];
    let mut pairs = Vec::new();
    for (_, id, oi, ci) in admissible {
        if obs_used[oi] || db_used[ci] {
            continue;
        }
        obs_used[oi] = true;
        db_used[ci] = true;
        pairs.push((oi, id));
    }

    let unmatched_obs = (0..world_obs.len()).filter(|&i| !obs_used[i]).collect();
    let unmatched_db_in_range = candidates
        .iter()
        .zip(&db_used)
        .filter(|(_, used)| !**used)
        .map(|(c, _)| c.id)
        .collect();
    Ok(MatchSet { pairs, unmatched_obs, unmatched_db_in_range })
}
