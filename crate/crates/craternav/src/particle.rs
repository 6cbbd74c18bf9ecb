//! Non-parametric localizer: weighted pose hypotheses propagated through the
//! odometry noise model, weighted by crater IoU agreement against the map,
//! and systematically resampled every update.

use log::warn;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::assoc::associate;
use crate::error::{Error, Result};
use crate::geometry::{body_to_world, circle_iou, Circle, Mat2};
use crate::sim::{apply_odometry, MotionNoise, Odometry};
use crate::types::{Crater, CraterDb, KppConfig, ObservedCrater, Pose2D, wrap_angle};

/// Weight floor added to every likelihood score so the filter never depletes
/// when all hypotheses mismatch.
const SCORE_EPSILON: f64 = 1e-6;

/// One pose hypothesis with its probability mass.
#[derive(Clone, Copy, Debug)]
pub struct Particle {
    pub pose: Pose2D,
    pub weight: f64,
}

/// Fixed-size particle set cycled through predict / update / resample.
/// Weights sum to 1 after construction and after every update and resample.
#[derive(Clone, Debug)]
pub struct ParticleFilter {
    particles: Vec<Particle>,
}

impl ParticleFilter {
    /// Draw `n` particles from a Gaussian around the prior pose, with uniform
    /// weights.
    pub fn init<R: Rng>(
        prior: &Pose2D,
        pos_sigma: f64,
        heading_sigma: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("particle count must be >= 1".into()));
        }
        if !(pos_sigma >= 0.0 && heading_sigma >= 0.0) {
            return Err(Error::Domain("init sigmas must be >= 0".into()));
        }
        let pos = Normal::new(0.0, pos_sigma).expect("valid sigma");
        let hdg = Normal::new(0.0, heading_sigma).expect("valid sigma");
        let w = 1.0 / n as f64;
        let particles = (0..n)
            .map(|_| Particle {
                pose: Pose2D::new(
                    prior.x + pos.sample(rng),
                    prior.y + pos.sample(rng),
                    prior.heading + hdg.sample(rng),
                ),
                weight: w,
            })
            .collect();
        Ok(Self { particles })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }

    /// Advance every particle by the reported odometry plus per-particle
    /// process noise; weights are unchanged.
    pub fn predict<R: Rng>(&mut self, odometry: &Odometry, noise: &MotionNoise, rng: &mut R) {
        let frac = Normal::new(0.0, noise.distance_frac).expect("valid sigma");
        let hdg = Normal::new(0.0, noise.heading_sigma).expect("valid sigma");
        for p in &mut self.particles {
            let od = Odometry {
                distance: odometry.distance * (1.0 + frac.sample(rng)),
                heading_change: odometry.heading_change + hdg.sample(rng),
            };
            p.pose = apply_odometry(&p.pose, &od);
        }
    }

    /// Reweight particles by the average-IoU agreement between the
    /// observations projected through each particle pose and the map.
    ///
    /// Per particle the score is
    /// `(sum of matched IoU + undetected_in_range * (1 - P_d)) / (n_obs + undetected_in_range)`,
    /// which lies in [0, 1]; the new weight is proportional to the old weight
    /// times `score + 1e-6`, renormalized in a fixed reduction order.
    pub fn update(&mut self, obs: &[ObservedCrater], db: &CraterDb, kpp: &KppConfig) {
        if obs.is_empty() && db.is_empty() {
            return; // no information
        }

        // Gate: 3-sigma observation noise plus the current hypothesis spread,
        // so a near-correct particle still matches in low-noise worlds.
        let (_, cov) = self.estimate();
        let cloud_radius = (cov[0][0] + cov[1][1]).max(0.0).sqrt();
        let gate_pos = 3.0 * kpp.crater_pos_sigma + 3.0 * cloud_radius + 1e-9;
        let gate_diam = 3.0 * kpp.crater_size_sigma + 1e-9;

        let mut sum = 0.0;
        for p in &mut self.particles {
            let s = particle_score(&p.pose, obs, db, kpp, gate_pos, gate_diam);
            p.weight *= s + SCORE_EPSILON;
            sum += p.weight;
        }
        if sum > 0.0 {
            for p in &mut self.particles {
                p.weight /= sum;
            }
        } else {
            warn!("all particle weights vanished in update; resetting to uniform");
            let w = 1.0 / self.particles.len() as f64;
            for p in &mut self.particles {
                p.weight = w;
            }
        }
    }

    /// Systematic (low-variance) resampling; the particle count is preserved
    /// and all weights return to 1/n.
    pub fn resample<R: Rng>(&mut self, rng: &mut R) {
        let n = self.particles.len();
        let total = self.weight_sum();
        let weights: Vec<f64> = if total > 0.0 {
            self.particles.iter().map(|p| p.weight / total).collect()
        } else {
            warn!("resampling from uniform: all particle weights are zero");
            vec![1.0 / n as f64; n]
        };
        let indices = systematic_resample(&weights, n, rng);
        let w = 1.0 / n as f64;
        self.particles = indices
            .into_iter()
            .map(|i| Particle { pose: self.particles[i].pose, weight: w })
            .collect();
    }

    /// Weighted mean position, circular weighted mean heading, and the 2x2
    /// weighted position covariance.
    pub fn estimate(&self) -> (Pose2D, Mat2) {
        let total = self.weight_sum();
        let norm = if total > 0.0 { total } else { self.particles.len() as f64 };
        let uniform = total <= 0.0;

        let mut mx = 0.0;
        let mut my = 0.0;
        let mut sin_sum = 0.0;
        let mut cos_sum = 0.0;
        for p in &self.particles {
            let w = if uniform { 1.0 } else { p.weight } / norm;
            mx += w * p.pose.x;
            my += w * p.pose.y;
            sin_sum += w * p.pose.heading.sin();
            cos_sum += w * p.pose.heading.cos();
        }
        let heading = wrap_angle(sin_sum.atan2(cos_sum));

        let mut cov = [[0.0; 2]; 2];
        for p in &self.particles {
            let w = if uniform { 1.0 } else { p.weight } / norm;
            let dx = p.pose.x - mx;
            let dy = p.pose.y - my;
            cov[0][0] += w * dx * dx;
            cov[0][1] += w * dx * dy;
            cov[1][1] += w * dy * dy;
        }
        cov[1][0] = cov[0][1];
        (Pose2D { x: mx, y: my, heading }, cov)
    }
}

/// Average-IoU measurement score of a single pose hypothesis; in [0, 1].
fn particle_score(
    pose: &Pose2D,
    obs: &[ObservedCrater],
    db: &CraterDb,
    kpp: &KppConfig,
    gate_pos: f64,
    gate_diam: f64,
) -> f64 {
    let candidates = db.in_range(pose.x, pose.y, kpp.sensing_range);
    let world_obs: Vec<Crater> = obs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let w = body_to_world(pose, [o.x_body, o.y_body]);
            Crater { id: i as u64, x: w[0], y: w[1], diameter: o.diameter, depth: None }
        })
        .collect();

    let matches = associate(&world_obs, &candidates, gate_pos, gate_diam)
        .expect("gates are positive by construction");
    let n_undetected = matches.unmatched_db_in_range.len();
    let denom = obs.len() + n_undetected;
    if denom == 0 {
        // Nothing expected in range and nothing seen: fully consistent.
        return 1.0;
    }

    let mut iou_sum = 0.0;
    for &(oi, id) in &matches.pairs {
        let o = &world_obs[oi];
        let c = candidates.iter().find(|c| c.id == id).expect("matched id in candidates");
        let disk_o = Circle { cx: o.x, cy: o.y, r: o.diameter / 2.0 };
        let disk_c = Circle { cx: c.x, cy: c.y, r: c.diameter / 2.0 };
        iou_sum += circle_iou(&disk_o, &disk_c);
    }
    (iou_sum + n_undetected as f64 * (1.0 - kpp.detection_prob_pd)) / denom as f64
}

/// Systematic (low-variance) resampling: one uniform offset, `n_out` evenly
/// spaced cursors walked along the cumulative weights. Expects normalized
/// weights.
pub fn systematic_resample<R: Rng>(weights: &[f64], n_out: usize, rng: &mut R) -> Vec<usize> {
    assert!(!weights.is_empty() && n_out > 0);
    let step = 1.0 / n_out as f64;
    let start = rng.random::<f64>() * step;
    let mut indices = Vec::with_capacity(n_out);
    let mut i = 0;
    let mut cum = weights[0];
    for k in 0..n_out {
        let cursor = start + k as f64 * step;
        while cum < cursor && i + 1 < weights.len() {
            i += 1;
            cum += weights[i];
        }
        indices.push(i);
    }
    indices
}
