//! Independent numerical oracles for the acceptance suite. Nothing here may
//! call the implementation paths it checks.

use craternav::geometry::{Circle, Vec2};
use craternav::mixture::{match_components, matched_loss, GaussianComponent, GaussianMixture};

/// Disk intersection area by strip integration: the x-range where both disks
/// can overlap is split into `n` strips and the exact vertical chord overlap
/// is accumulated at each strip midpoint.
pub fn lens_area_oracle(a: &Circle, b: &Circle, n: usize) -> f64 {
    let x0 = (a.cx - a.r).max(b.cx - b.r);
    let x1 = (a.cx + a.r).min(b.cx + b.r);
    if x1 <= x0 {
        return 0.0;
    }
    let dx = (x1 - x0) / n as f64;
    let mut area = 0.0;
    for i in 0..n {
        let x = x0 + (i as f64 + 0.5) * dx;
        let ha = a.r * a.r - (x - a.cx) * (x - a.cx);
        let hb = b.r * b.r - (x - b.cx) * (x - b.cx);
        if ha <= 0.0 || hb <= 0.0 {
            continue;
        }
        let (ha, hb) = (ha.sqrt(), hb.sqrt());
        let top = (a.cy + ha).min(b.cy + hb);
        let bottom = (a.cy - ha).max(b.cy - hb);
        if top > bottom {
            area += (top - bottom) * dx;
        }
    }
    area
}

/// IoU derived from the strip-integration area oracle.
pub fn iou_oracle(a: &Circle, b: &Circle, n: usize) -> f64 {
    let inter = lens_area_oracle(a, b, n);
    inter / (std::f64::consts::PI * (a.r * a.r + b.r * b.r) - inter)
}

fn gaussian_log_pdf(c: &GaussianComponent, x: f64, y: f64) -> f64 {
    let dx = x - c.mean[0];
    let dy = y - c.mean[1];
    let s2 = c.sigma * c.sigma;
    -(dx * dx + dy * dy) / (2.0 * s2) - (2.0 * std::f64::consts::PI * s2).ln()
}

/// KL divergence between two isotropic Gaussians by 2-D Simpson quadrature
/// of `f ln(f/g)` over a 10-sigma box around `a`. Log densities are evaluated
/// analytically so the far tails never underflow inside the log ratio.
pub fn gaussian_kl_oracle(a: &GaussianComponent, b: &GaussianComponent, nodes: usize) -> f64 {
    let half = 10.0 * a.sigma;
    let n = if nodes % 2 == 0 { nodes + 1 } else { nodes }; // Simpson needs odd node counts
    let h = 2.0 * half / (n - 1) as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut total = 0.0;
    for i in 0..n {
        let x = a.mean[0] - half + i as f64 * h;
        let mut row = 0.0;
        for j in 0..n {
            let y = a.mean[1] - half + j as f64 * h;
            let log_fa = gaussian_log_pdf(a, x, y);
            let log_fb = gaussian_log_pdf(b, x, y);
            row += weight(j) * log_fa.exp() * (log_fa - log_fb);
        }
        total += weight(i) * row;
    }
    total * h * h / 9.0
}

/// Exhaustive grid search of the re-matched translation loss over a square
/// window; returns (best translation, best loss).
pub fn grid_search_translation(
    ground: &GaussianMixture,
    orbital: &GaussianMixture,
    center: Vec2,
    half_window: f64,
    step: f64,
) -> (Vec2, f64) {
    let n = (2.0 * half_window / step).round() as usize;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for i in 0..=n {
        let tx = center[0] - half_window + i as f64 * step;
        for j in 0..=n {
            let ty = center[1] - half_window + j as f64 * step;
            let t = [tx, ty];
            let matching = match_components(ground, orbital, t);
            let loss = matched_loss(ground, orbital, t, &matching);
            if loss < best.1 {
                best = (t, loss);
            }
        }
    }
    best
}
