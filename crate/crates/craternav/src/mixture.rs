//! Parametric localizer: crater sets become isotropic Gaussian mixtures (one
//! component per crater, sigma = radius / 2) and the rover correction is the
//! planar translation minimizing a matching-based KL-divergence between the
//! ground and orbital mixtures. The loss curvature at the optimum doubles as
//! the standard-error estimate.

use crate::config::OptimizerConfig;
use crate::error::{Error, Result};
use crate::geometry::{body_to_world, Mat2, Vec2};
use crate::types::{Crater, CraterDb, KppConfig, ObservedCrater, Pose2D};

/// One isotropic 2-D Gaussian component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianComponent {
    pub mean: Vec2,
    /// Isotropic standard deviation, meters; strictly positive.
    pub sigma: f64,
    /// Mixture weight; strictly positive.
    pub weight: f64,
}

impl GaussianComponent {
    pub fn new(mean: Vec2, sigma: f64, weight: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("component sigma must be > 0, got {sigma}")));
        }
        if !(weight > 0.0) {
            return Err(Error::Domain(format!("component weight must be > 0, got {weight}")));
        }
        Ok(Self { mean, sigma, weight })
    }
}

/// A mixture of isotropic Gaussians; weights sum to 1 within 1e-9.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("mixture needs at least one component".into()));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(Self { components })
    }

    /// One component per crater: mean at the center, sigma = diameter / 4
    /// (half the radius), uniform weights.
    pub fn from_craters(craters: &[Crater]) -> Result<Self> {
        if craters.is_empty() {
            return Err(Error::Domain("cannot build a mixture from zero craters".into()));
        }
        let w = 1.0 / craters.len() as f64;
        let components = craters
            .iter()
            .map(|c| GaussianComponent::new([c.x, c.y], c.diameter / 4.0, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }
}

/// Closed-form KL divergence between two isotropic 2-D Gaussians, in nats:
/// `sigma_a^2/sigma_b^2 + |mu_a - mu_b|^2 / (2 sigma_b^2) - 1 + 2 ln(sigma_b/sigma_a)`.
pub fn gaussian_kl(a: &GaussianComponent, b: &GaussianComponent) -> f64 {
    let ratio = (a.sigma * a.sigma) / (b.sigma * b.sigma);
    let dx = a.mean[0] - b.mean[0];
    let dy = a.mean[1] - b.mean[1];
    let sq = dx * dx + dy * dy;
    ratio + sq / (2.0 * b.sigma * b.sigma) - 1.0 + 2.0 * (b.sigma / a.sigma).ln()
}

fn kl_shifted(a: &GaussianComponent, t: Vec2, b: &GaussianComponent) -> f64 {
    let shifted = GaussianComponent { mean: [a.mean[0] + t[0], a.mean[1] + t[1]], ..*a };
    gaussian_kl(&shifted, b)
}

/// For each component of `f` (shifted by `t`), the index of the component of
/// `g` minimizing `gaussian_kl - ln(weight)`.
pub fn match_components(f: &GaussianMixture, g: &GaussianMixture, t: Vec2) -> Vec<usize> {
    f.components
        .iter()
        .map(|a| {
            let mut best = 0;
            let mut best_cost = f64::INFINITY;
            for (bi, b) in g.components.iter().enumerate() {
                let cost = kl_shifted(a, t, b) - b.weight.ln();
                if cost < best_cost {
                    best_cost = cost;
                    best = bi;
                }
            }
            best
        })
        .collect()
}

/// Matching-based mixture KL under a fixed component matching.
pub fn matched_loss(
    f: &GaussianMixture,
    g: &GaussianMixture,
    t: Vec2,
    matching: &[usize],
) -> f64 {
    f.components
        .iter()
        .zip(matching)
        .map(|(a, &bi)| {
            let b = &g.components[bi];
            a.weight * (kl_shifted(a, t, b) + (a.weight / b.weight).ln())
        })
        .sum()
}

/// Analytic gradient of [`matched_loss`] with respect to the translation:
/// `sum_a pi_a (mu_a + t - mu_b) / sigma_b^2`.
pub fn matched_loss_gradient(
    f: &GaussianMixture,
    g: &GaussianMixture,
    t: Vec2,
    matching: &[usize],
) -> Vec2 {
    let mut grad = [0.0, 0.0];
    for (a, &bi) in f.components.iter().zip(matching) {
        let b = &g.components[bi];
        let inv = a.weight / (b.sigma * b.sigma);
        grad[0] += inv * (a.mean[0] + t[0] - b.mean[0]);
        grad[1] += inv * (a.mean[1] + t[1] - b.mean[1]);
    }
    grad
}

/// Matching-based approximation of KL(f || g); zero when the mixtures are
/// identical and nonnegative for equal-count uniform-weight mixtures.
pub fn gmm_kl_approx(f: &GaussianMixture, g: &GaussianMixture) -> f64 {
    let matching = match_components(f, g, [0.0, 0.0]);
    matched_loss(f, g, [0.0, 0.0], &matching)
}

/// Outcome of a translation fit.
#[derive(Clone, Copy, Debug)]
pub struct MatchResult {
    /// Optimal shift of the ground mixture onto the orbital mixture, meters.
    pub translation: Vec2,
    /// Loss value at the optimum, nats.
    pub loss: f64,
    /// Inverse loss Hessian at the optimum (the standard-error estimate), m^2.
    pub stderr_cov: Mat2,
    pub converged: bool,
    pub iterations: usize,
}

impl MatchResult {
    /// Placeholder for steps where no map craters were in range.
    pub fn no_information() -> Self {
        Self {
            translation: [0.0, 0.0],
            loss: 0.0,
            stderr_cov: [[0.0; 2]; 2],
            converged: false,
            iterations: 0,
        }
    }
}

const ARMIJO_C: f64 = 1e-4;
const STEP_FLOOR: f64 = 1e-10;

/// Minimize `L(t) = kl_approx(ground shifted by t, orbital)` by gradient
/// descent with backtracking line search from `t0`, re-matching components at
/// every evaluation. Converges when the gradient norm falls under
/// `opts.grad_tol` or the accepted step shrinks under 1e-10, capped at
/// `opts.max_iters` iterations.
pub fn match_translation(
    ground: &GaussianMixture,
    orbital: &GaussianMixture,
    t0: Vec2,
    opts: &OptimizerConfig,
) -> Result<MatchResult> {
    if !(t0[0].is_finite() && t0[1].is_finite()) {
        return Err(Error::Domain(format!("initial translation ({}, {}) not finite", t0[0], t0[1])));
    }
    let eval = |t: Vec2| -> f64 {
        let m = match_components(ground, orbital, t);
        matched_loss(ground, orbital, t, &m)
    };

    let mut t = t0;
    let mut loss = eval(t);
    if !loss.is_finite() {
        return Err(Error::Optimizer { msg: "loss not finite at start".into(), x: t0[0], y: t0[1] });
    }
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..opts.max_iters {
        iterations += 1;
        let matching = match_components(ground, orbital, t);
        loss = matched_loss(ground, orbital, t, &matching);
        let grad = matched_loss_gradient(ground, orbital, t, &matching);
        let gnorm = grad[0].hypot(grad[1]);
        if gnorm < opts.grad_tol {
            converged = true;
            break;
        }

        // The quadratic part of the loss has curvature sum(pi_a / sigma_b^2);
        // its inverse is the natural first trial step.
        let curvature: f64 = ground
            .components
            .iter()
            .zip(&matching)
            .map(|(a, &bi)| a.weight / (orbital.components[bi].sigma * orbital.components[bi].sigma))
            .sum();
        let mut alpha = 1.0 / curvature;

        let mut accepted = false;
        loop {
            let cand = [t[0] - alpha * grad[0], t[1] - alpha * grad[1]];
            let cand_loss = eval(cand);
            if !cand_loss.is_finite() {
                return Err(Error::Optimizer {
                    msg: "loss became non-finite during line search".into(),
                    x: t[0],
                    y: t[1],
                });
            }
            if cand_loss <= loss - ARMIJO_C * alpha * gnorm * gnorm {
                debug_assert!(cand_loss <= loss, "line search must not increase the loss");
                t = cand;
                loss = cand_loss;
                accepted = true;
                break;
            }
            alpha *= 0.5;
            if alpha * gnorm < STEP_FLOOR {
                break;
            }
        }
        if !accepted {
            // Step floor reached: no admissible descent left at this scale.
            converged = true;
            break;
        }
    }

    let stderr_cov = inverse_hessian(&eval, t, opts.hessian_step_m);
    Ok(MatchResult { translation: t, loss, stderr_cov, converged, iterations })
}

/// Inverse of the central-difference Hessian of `f` at `t` with step `h`.
fn inverse_hessian(f: &dyn Fn(Vec2) -> f64, t: Vec2, h: f64) -> Mat2 {
    let c = f(t);
    let fpx = f([t[0] + h, t[1]]);
    let fmx = f([t[0] - h, t[1]]);
    let fpy = f([t[0], t[1] + h]);
    let fmy = f([t[0], t[1] - h]);
    let fpp = f([t[0] + h, t[1] + h]);
    let fpm = f([t[0] + h, t[1] - h]);
    let fmp = f([t[0] - h, t[1] + h]);
    let fmm = f([t[0] - h, t[1] - h]);

    let hxx = (fpx - 2.0 * c + fmx) / (h * h);
    let hyy = (fpy - 2.0 * c + fmy) / (h * h);
    let hxy = (fpp - fpm - fmp + fmm) / (4.0 * h * h);

    let det = hxx * hyy - hxy * hxy;
    if !det.is_finite() || det.abs() < 1e-300 {
        return [[f64::INFINITY, 0.0], [0.0, f64::INFINITY]];
    }
    [[hyy / det, -hxy / det], [-hxy / det, hxx / det]]
}

/// One localization step of the parametric matcher.
///
/// Observations are projected into the world frame through the dead-reckoned
/// pose; the orbital mixture is built from map craters within
/// `sensing_range + 3 * crater_pos_sigma` of that pose; the fitted translation
/// corrects the position while the heading is kept. With no map craters in
/// range the pose is returned unchanged with `converged = false`.
pub fn gmm_localize(
    obs: &[ObservedCrater],
    dr_pose: &Pose2D,
    db: &CraterDb,
    kpp: &KppConfig,
    opts: &OptimizerConfig,
) -> Result<(Pose2D, MatchResult)> {
    if obs.is_empty() {
        return Err(Error::Domain("parametric localization needs at least one observation".into()));
    }
    let w = 1.0 / obs.len() as f64;
    let ground = GaussianMixture::new(
        obs.iter()
            .map(|o| {
                let p = body_to_world(dr_pose, [o.x_body, o.y_body]);
                GaussianComponent::new(p, o.diameter / 4.0, w)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;

    let in_range = db.in_range(dr_pose.x, dr_pose.y, kpp.sensing_range + 3.0 * kpp.crater_pos_sigma);
    if in_range.is_empty() {
        return Ok((*dr_pose, MatchResult::no_information()));
    }
    let orbital = GaussianMixture::from_craters(&in_range)?;

    let result = match_translation(&ground, &orbital, [0.0, 0.0], opts)?;
    let corrected = Pose2D {
        x: dr_pose.x + result.translation[0],
        y: dr_pose.y + result.translation[1],
        heading: dr_pose.heading,
    };
    Ok((corrected, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn crater(id: u64, x: f64, y: f64, d: f64) -> Crater {
        Crater::new(id, x, y, d, None).unwrap()
    }

    fn three_crater_mixture() -> GaussianMixture {
        GaussianMixture::from_craters(&[
            crater(1, 0.0, 0.0, 8.0),
            crater(2, 30.0, 5.0, 12.0),
            crater(3, 10.0, 28.0, 6.0),
        ])
        .unwrap()
    }

    #[test]
    fn mixture_from_craters_follows_sigma_rule() {
        let m = GaussianMixture::from_craters(&[crater(1, 0.0, 0.0, 8.0)]).unwrap();
        assert_eq!(m.components().len(), 1);
        assert_eq!(m.components()[0].mean, [0.0, 0.0]);
        assert_eq!(m.components()[0].sigma, 2.0);
        assert_eq!(m.components()[0].weight, 1.0);

        let m = GaussianMixture::from_craters(&[
            crater(1, 0.0, 0.0, 8.0),
            crater(2, 1.0, 0.0, 8.0),
            crater(3, 2.0, 0.0, 8.0),
            crater(4, 3.0, 0.0, 8.0),
        ])
        .unwrap();
        assert!(m.components().iter().all(|c| c.weight == 0.25));

        let m = GaussianMixture::from_craters(&[crater(1, 0.0, 0.0, 21.94)]).unwrap();
        assert!((m.components()[0].sigma - 5.485).abs() < 1e-12);

        assert!(GaussianMixture::from_craters(&[]).is_err());
    }

    #[test]
    fn gaussian_kl_closed_form_values() {
        let unit = |x: f64, y: f64| GaussianComponent::new([x, y], 1.0, 1.0).unwrap();
        assert_eq!(gaussian_kl(&unit(0.0, 0.0), &unit(0.0, 0.0)), 0.0);
        assert!((gaussian_kl(&unit(1.0, 0.0), &unit(0.0, 0.0)) - 0.5).abs() < 1e-12);

        let wide = GaussianComponent::new([0.0, 0.0], 2.0, 1.0).unwrap();
        let kl = gaussian_kl(&unit(0.0, 0.0), &wide);
        assert!((kl - 0.6362943611198906).abs() < 1e-12);
    }

    #[test]
    fn kl_approx_identity_and_shift() {
        let m = three_crater_mixture();
        assert_eq!(gmm_kl_approx(&m, &m), 0.0);

        let single = GaussianMixture::from_craters(&[crater(1, 0.0, 0.0, 4.0)]).unwrap();
        let shifted = GaussianMixture::from_craters(&[crater(1, 1.0, 0.0, 4.0)]).unwrap();
        assert!((gmm_kl_approx(&single, &shifted) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kl_approx_nonnegative_for_uniform_equal_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let k = rng.random_range(1..5usize);
            let make = |rng: &mut ChaCha8Rng| {
                GaussianMixture::from_craters(
                    &(0..k)
                        .map(|i| {
                            crater(
                                i as u64 + 1,
                                rng.random_range(-20.0..20.0),
                                rng.random_range(-20.0..20.0),
                                rng.random_range(4.0..20.0),
                            )
                        })
                        .collect::<Vec<_>>(),
                )
                .unwrap()
            };
            let f = make(&mut rng);
            let g = make(&mut rng);
            assert!(gmm_kl_approx(&f, &g) >= -1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let make = |rng: &mut ChaCha8Rng, k: usize| {
                GaussianMixture::from_craters(
                    &(0..k)
                        .map(|i| {
                            crater(
                                i as u64 + 1,
                                rng.random_range(-20.0..20.0),
                                rng.random_range(-20.0..20.0),
                                rng.random_range(4.0..20.0),
                            )
                        })
                        .collect::<Vec<_>>(),
                )
                .unwrap()
            };
            let kf = rng.random_range(1..5);
            let f = make(&mut rng, kf);
            let kg = rng.random_range(1..5);
            let g = make(&mut rng, kg);
            let t = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let matching = match_components(&f, &g, t);
            let grad = matched_loss_gradient(&f, &g, t, &matching);
            let h = 1e-5;
            let fd = [
                (matched_loss(&f, &g, [t[0] + h, t[1]], &matching)
                    - matched_loss(&f, &g, [t[0] - h, t[1]], &matching))
                    / (2.0 * h),
                (matched_loss(&f, &g, [t[0], t[1] + h], &matching)
                    - matched_loss(&f, &g, [t[0], t[1] - h], &matching))
                    / (2.0 * h),
            ];
            let scale = grad[0].hypot(grad[1]).max(1e-9);
            let err = (grad[0] - fd[0]).hypot(grad[1] - fd[1]) / scale;
            assert!(err < 1e-5, "gradient mismatch {err}");
        }
    }

    #[test]
    fn identity_match_stays_at_origin() {
        let m = three_crater_mixture();
        let r = match_translation(&m, &m, [0.0, 0.0], &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.translation[0].abs() < 1e-9 && r.translation[1].abs() < 1e-9);
        assert!(r.loss.abs() < 1e-12);
    }

    #[test]
    fn constructed_shift_is_recovered() {
        let ground = three_crater_mixture();
        let orbital = GaussianMixture::new(
            ground
                .components()
                .iter()
                .map(|c| GaussianComponent::new([c.mean[0] + 3.0, c.mean[1] - 2.0], c.sigma, c.weight).unwrap())
                .collect(),
        )
        .unwrap();
        let r = match_translation(&ground, &orbital, [0.0, 0.0], &OptimizerConfig::default()).unwrap();
        assert!(r.converged, "did not converge in {} iterations", r.iterations);
        assert!((r.translation[0] - 3.0).abs() < 1e-4, "tx = {}", r.translation[0]);
        assert!((r.translation[1] + 2.0).abs() < 1e-4, "ty = {}", r.translation[1]);
        assert!(r.loss.abs() < 1e-9);
        assert!(r.loss <= gmm_kl_approx(&ground, &orbital) + 1e-12);
    }

    #[test]
    fn single_component_stderr_is_sigma_squared_identity() {
        // sigma = 1 (diameter 4): the loss is |t - delta|^2 / 2, so the
        // Hessian is the identity and the standard error its inverse.
        let ground = GaussianMixture::from_craters(&[crater(1, 0.0, 0.0, 4.0)]).unwrap();
        let orbital = GaussianMixture::from_craters(&[crater(1, 0.5, -0.25, 4.0)]).unwrap();
        let r = match_translation(&ground, &orbital, [0.0, 0.0], &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.stderr_cov[0][0] - 1.0).abs() < 1e-6);
        assert!((r.stderr_cov[1][1] - 1.0).abs() < 1e-6);
        assert!(r.stderr_cov[0][1].abs() < 1e-6);
    }

    #[test]
    fn converged_hessians_are_psd_and_loss_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let make = |rng: &mut ChaCha8Rng, base: u64, k: usize| {
                GaussianMixture::from_craters(
                    &(0..k)
                        .map(|i| {
                            crater(
                                base + i as u64,
                                rng.random_range(-30.0..30.0),
                                rng.random_range(-30.0..30.0),
                                rng.random_range(4.0..20.0),
                            )
                        })
                        .collect::<Vec<_>>(),
                )
                .unwrap()
            };
            let k = rng.random_range(1..6);
            let ground = make(&mut rng, 1, k);
            let k_orb = rng.random_range(1..6);
            let orbital = make(&mut rng, 100, k_orb);
            let initial = gmm_kl_approx(&ground, &orbital);
            let r = match_translation(&ground, &orbital, [0.0, 0.0], &OptimizerConfig::default()).unwrap();
            assert!(r.loss <= initial + 1e-12);
            if r.converged {
                let m = r.stderr_cov;
                assert!((m[0][1] - m[1][0]).abs() < 1e-9);
                // Eigenvalues of a symmetric 2x2.
                let tr = m[0][0] + m[1][1];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                let lmin = tr / 2.0 - disc;
                assert!(lmin >= -1e-9, "stderr covariance not PSD: lambda_min = {lmin}");
            }
        }
    }

    #[test]
    fn overflowing_loss_reports_optimizer_error() {
        let m = three_crater_mixture();
        // A finite but astronomically large start overflows the quadratic term.
        let err = match_translation(&m, &m, [1e200, 0.0], &OptimizerConfig::default());
        assert!(matches!(err, Err(Error::Optimizer { .. })));
    }

    #[test]
    fn loss_is_translation_equivariant() {
        let ground = three_crater_mixture();
        let orbital = GaussianMixture::from_craters(&[
            crater(1, 2.0, 1.0, 8.0),
            crater(2, 33.0, 4.0, 12.0),
            crater(3, 8.0, 30.0, 6.0),
        ])
        .unwrap();
        let shift = |m: &GaussianMixture, dx: f64, dy: f64| {
            GaussianMixture::new(
                m.components()
                    .iter()
                    .map(|c| GaussianComponent::new([c.mean[0] + dx, c.mean[1] + dy], c.sigma, c.weight).unwrap())
                    .collect(),
            )
            .unwrap()
        };

        // Shifting both mixtures leaves the loss landscape unchanged.
        let g2 = shift(&ground, 16.0, -8.0);
        let o2 = shift(&orbital, 16.0, -8.0);
        for t in [[0.0, 0.0], [1.5, -2.0], [-4.0, 3.0]] {
            let m1 = match_components(&ground, &orbital, t);
            let m2 = match_components(&g2, &o2, t);
            let l1 = matched_loss(&ground, &orbital, t, &m1);
            let l2 = matched_loss(&g2, &o2, t, &m2);
            assert!((l1 - l2).abs() < 1e-9);
        }

        // Shifting only the orbital mixture shifts the argmin by the same amount.
        let opts = OptimizerConfig::default();
        let r1 = match_translation(&ground, &orbital, [0.0, 0.0], &opts).unwrap();
        let o3 = shift(&orbital, 4.0, 6.0);
        let r2 = match_translation(&ground, &o3, [0.0, 0.0], &opts).unwrap();
        assert!((r2.translation[0] - r1.translation[0] - 4.0).abs() < 1e-3);
        assert!((r2.translation[1] - r1.translation[1] - 6.0).abs() < 1e-3);
    }

    #[test]
    fn localize_recovers_dead_reckoning_offset() {
        let db = CraterDb::new(vec![
            crater(1, 20.0, 5.0, 8.0),
            crater(2, 5.0, 25.0, 12.0),
            crater(3, 32.0, 30.0, 6.0),
        ])
        .unwrap();
        let kpp = KppConfig::default();
        let opts = OptimizerConfig::default();
        let truth = Pose2D::new(10.0, 10.0, 0.4);
        let obs: Vec<ObservedCrater> = db
            .craters()
            .iter()
            .map(|c| {
                let b = crate::geometry::world_to_body(&truth, [c.x, c.y]);
                ObservedCrater { x_body: b[0], y_body: b[1], diameter: c.diameter }
            })
            .collect();

        // Dead reckoning equal to the truth: correction is essentially zero.
        let (pose, r) = gmm_localize(&obs, &truth, &db, &kpp, &opts).unwrap();
        assert!(r.converged);
        assert!(pose.distance_to(&truth) < 1e-4);

        // A 2 m dead-reckoning offset is recovered.
        let dr = Pose2D::new(truth.x + 1.2, truth.y - 1.6, truth.heading);
        let (pose, r) = gmm_localize(&obs, &dr, &db, &kpp, &opts).unwrap();
        assert!(r.converged);
        assert!(pose.distance_to(&truth) < 1e-3, "residual {}", pose.distance_to(&truth));

        // No orbital craters in range: flagged, pose unchanged.
        let far = Pose2D::new(500.0, 500.0, 0.0);
        let (pose, r) = gmm_localize(&obs, &far, &db, &kpp, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(pose, far);

        // No observations violates the precondition.
        assert!(gmm_localize(&[], &truth, &db, &kpp, &opts).is_err());
    }
}
