//! 2.5D simulation environment: power-law crater field synthesis, the noisy
//! body-frame observation model with masking, and the dead-reckoning motion
//! model.
//!
//! Every function takes an explicit generator; a run that seeds one generator
//! and threads it through in a fixed order is bit-reproducible.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::world_to_body;
use crate::types::{Crater, CraterDb, KppConfig, ObservedCrater, Pose2D, wrap_angle};

/// Observed diameters are floored here instead of resampling when size noise
/// would drive them negative.
const MIN_OBSERVED_DIAMETER: f64 = 0.1;

/// One odometry increment: drive `distance` meters after turning by
/// `heading_change` radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Odometry {
    pub distance: f64,
    pub heading_change: f64,
}

/// Odometry corruption model: distance noise proportional to distance
/// traveled plus additive per-step heading noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionNoise {
    /// 1-sigma distance noise as a fraction of the commanded distance.
    pub distance_frac: f64,
    /// 1-sigma per-step heading noise, radians.
    pub heading_sigma: f64,
}

impl MotionNoise {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            distance_frac: cfg.kpp.motion_noise_frac,
            heading_sigma: cfg.heading_noise_sigma.to_radians(),
        }
    }
}

/// Inverse-CDF sample of the truncated power-law diameter distribution
/// (pdf proportional to 1/d on [min_diameter, max_diameter]).
pub fn sample_diameter(u: f64, kpp: &KppConfig) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("diameter sample input {u} outside [0, 1)")));
    }
    Ok(kpp.min_diameter * (kpp.max_diameter / kpp.min_diameter).powf(u))
}

/// Generate a synthetic crater field: centers uniform over the extent,
/// diameters from the truncated power law, ids 1..=n, no depth.
pub fn generate_crater_field<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Result<CraterDb> {
    let mut craters = Vec::with_capacity(cfg.n_craters);
    for i in 0..cfg.n_craters {
        let x = rng.random::<f64>() * cfg.extent.0;
        let y = rng.random::<f64>() * cfg.extent.1;
        let d = sample_diameter(rng.random::<f64>(), &cfg.kpp)?;
        craters.push(Crater::new(i as u64 + 1, x, y, d, None)?);
    }
    CraterDb::new(craters)
}

/// Remove floor(frac * n) craters uniformly at random. Ground detections of
/// the removed craters then act as false positives for the matcher. The
/// extent of the original database is kept.
pub fn mask_orbital<R: Rng>(db: &CraterDb, frac: f64, rng: &mut R) -> Result<CraterDb> {
    if !(0.0..=1.0).contains(&frac) {
        return Err(Error::Domain(format!("mask fraction {frac} outside [0, 1]")));
    }
    let n = db.len();
    let k = (frac * n as f64).floor() as usize;
    let mut removed = vec![false; n];
    for idx in rand::seq::index::sample(rng, n, k) {
        removed[idx] = true;
    }
    let craters = db
        .craters()
        .iter()
        .zip(&removed)
        .filter(|(_, r)| !**r)
        .map(|(c, _)| *c)
        .collect();
    CraterDb::with_extent(craters, db.extent())
}

/// Observe the crater field from the true pose: craters within sensing range
/// are transformed to the body frame and perturbed by Gaussian position and
/// size noise; a `ground_mask_frac` fraction is withheld as false negatives.
///
/// A post-noise gate drops the rare perturbed detection whose body-frame
/// range exceeds `sensing_range + 3 * crater_pos_sigma`.
pub fn observe<R: Rng>(
    truth: &Pose2D,
    db: &CraterDb,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Vec<ObservedCrater> {
    let kpp = &cfg.kpp;
    let pos_noise = Normal::new(0.0, kpp.crater_pos_sigma).expect("valid sigma");
    let size_noise = Normal::new(0.0, kpp.crater_size_sigma).expect("valid sigma");
    let hard_gate = kpp.sensing_range + 3.0 * kpp.crater_pos_sigma;

    let mut out = Vec::new();
    for c in db.craters() {
        if (c.x - truth.x).hypot(c.y - truth.y) > kpp.sensing_range {
            continue;
        }
        let body = world_to_body(truth, [c.x, c.y]);
        let x_body = body[0] + pos_noise.sample(rng);
        let y_body = body[1] + pos_noise.sample(rng);
        let diameter = (c.diameter + size_noise.sample(rng)).max(MIN_OBSERVED_DIAMETER);
        let obs = ObservedCrater { x_body, y_body, diameter };
        if obs.range() <= hard_gate {
            out.push(obs);
        }
    }

    let k = (cfg.ground_mask_frac * out.len() as f64).floor() as usize;
    if k > 0 {
        let mut withheld = vec![false; out.len()];
        for idx in rand::seq::index::sample(rng, out.len(), k) {
            withheld[idx] = true;
        }
        out = out
            .into_iter()
            .zip(&withheld)
            .filter(|(_, w)| !**w)
            .map(|(o, _)| o)
            .collect();
    }
    out
}

/// Advance a pose by an odometry increment: turn, then drive straight.
pub fn apply_odometry(pose: &Pose2D, od: &Odometry) -> Pose2D {
    let heading = wrap_angle(pose.heading + od.heading_change);
    Pose2D {
        x: pose.x + od.distance * heading.cos(),
        y: pose.y + od.distance * heading.sin(),
        heading,
    }
}

/// Advance the true pose by the commanded increment exactly and return the
/// corrupted odometry report the dead-reckoning track integrates.
pub fn propagate<R: Rng>(
    truth: &Pose2D,
    commanded: &Odometry,
    noise: &MotionNoise,
    rng: &mut R,
) -> (Pose2D, Odometry) {
    let new_truth = apply_odometry(truth, commanded);
    let d_sigma = noise.distance_frac * commanded.distance;
    let reported = Odometry {
        distance: commanded.distance
            + Normal::new(0.0, d_sigma).expect("valid sigma").sample(rng),
        heading_change: commanded.heading_change
            + Normal::new(0.0, noise.heading_sigma).expect("valid sigma").sample(rng),
    };
    (new_truth, reported)
}

/// Commanded traverse: `n_steps` increments of `step_length` with per-step
/// heading change uniform in +/- `heading_change_bound`. The caller starts
/// the rover aimed along the extent diagonal (see [`initial_pose`]).
pub fn build_trajectory<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<Odometry> {
    let bound = cfg.heading_change_bound.to_radians();
    (0..cfg.n_steps)
        .map(|_| Odometry {
            distance: cfg.step_length,
            heading_change: if bound > 0.0 {
                rng.random_range(-bound..bound)
            } else {
                0.0
            },
        })
        .collect()
}

/// Traverse start: the extent corner at the origin, aimed along the diagonal.
pub fn initial_pose(cfg: &ScenarioConfig) -> Pose2D {
    Pose2D::new(0.0, 0.0, cfg.extent.1.atan2(cfg.extent.0))
}
