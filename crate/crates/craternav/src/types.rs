//! Shared domain types: craters, the crater landmark database and its CSV
//! format, planar rover poses, and the sensing/noise configuration constants.
//!
//! All types are immutable value types after construction and safe to share
//! across threads. Coordinates are planar meters (x east, y north); headings
//! are radians wrapped to (-pi, pi].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Wrap an angle in radians to the half-open interval (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// A circular crater landmark: planar center, diameter, optional depth.
///
/// Depth is carried through the database format but unused by matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crater {
    pub id: u64,
    /// World east, meters.
    pub x: f64,
    /// World north, meters.
    pub y: f64,
    pub diameter: f64,
    pub depth: Option<f64>,
}

impl Crater {
    pub fn new(id: u64, x: f64, y: f64, diameter: f64, depth: Option<f64>) -> Result<Self> {
        if !(diameter > 0.0) {
            return Err(Error::Validation(format!(
                "crater {id} has nonpositive diameter {diameter}"
            )));
        }
        if let Some(d) = depth {
            if !(d >= 0.0) {
                return Err(Error::Validation(format!(
                    "crater {id} has negative depth {d}"
                )));
            }
        }
        Ok(Self { id, x, y, diameter, depth })
    }

    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }
}

/// Axis-aligned bounding rectangle in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extent {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Extent {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.min_x && x <= self.max_x && y >= self.min_y && y <= self.max_y
    }

    /// Degenerate empty extent used for databases with no craters.
    pub fn degenerate() -> Self {
        Self { min_x: 0.0, min_y: 0.0, max_x: 0.0, max_y: 0.0 }
    }
}

/// The orbital crater landmark database.
///
/// Invariants: crater ids are unique and every center lies inside `extent`.
/// The extent is the tight bounding box of the centers padded by the largest
/// crater radius, so whole disks are covered as well.
#[derive(Clone, Debug)]
pub struct CraterDb {
    craters: Vec<Crater>,
    extent: Extent,
}

impl CraterDb {
    pub fn new(craters: Vec<Crater>) -> Result<Self> {
        let mut ids: Vec<u64> = craters.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("duplicate crater id {}", w[0])));
        }
        for c in &craters {
            if !(c.diameter > 0.0) {
                return Err(Error::Validation(format!(
                    "crater {} has nonpositive diameter {}",
                    c.id, c.diameter
                )));
            }
            if let Some(d) = c.depth {
                if !(d >= 0.0) {
                    return Err(Error::Validation(format!(
                        "crater {} has negative depth {d}",
                        c.id
                    )));
                }
            }
        }
        let extent = Self::padded_extent(&craters);
        Ok(Self { craters, extent })
    }

    /// Build a database that keeps a caller-supplied extent (e.g. the extent
    /// of a larger database this one was filtered from).
    pub fn with_extent(craters: Vec<Crater>, extent: Extent) -> Result<Self> {
        let db = Self::new(craters)?;
        for c in db.craters() {
            if !extent.contains(c.x, c.y) {
                return Err(Error::Validation(format!(
                    "crater {} center ({}, {}) outside the supplied extent",
                    c.id, c.x, c.y
                )));
            }
        }
        Ok(Self { extent, ..db })
    }

    fn padded_extent(craters: &[Crater]) -> Extent {
        if craters.is_empty() {
            return Extent::degenerate();
        }
        let pad = craters.iter().map(Crater::radius).fold(0.0, f64::max);
        let mut e = Extent {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for c in craters {
            e.min_x = e.min_x.min(c.x);
            e.min_y = e.min_y.min(c.y);
            e.max_x = e.max_x.max(c.x);
            e.max_y = e.max_y.max(c.y);
        }
        Extent {
            min_x: e.min_x - pad,
            min_y: e.min_y - pad,
            max_x: e.max_x + pad,
            max_y: e.max_y + pad,
        }
    }

    pub fn craters(&self) -> &[Crater] {
        &self.craters
    }

    pub fn len(&self) -> usize {
        self.craters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.craters.is_empty()
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    /// Craters whose center lies within `range` meters of `(x, y)`.
    pub fn in_range(&self, x: f64, y: f64, range: f64) -> Vec<Crater> {
        self.craters
            .iter()
            .filter(|c| (c.x - x).hypot(c.y - y) <= range)
            .copied()
            .collect()
    }
}

const DB_HEADER: &str = "id,x_m,y_m,diameter_m,depth_m";

/// Load a crater database from its CSV format (`id,x_m,y_m,diameter_m,depth_m`,
/// depth column may be empty).
pub fn load_crater_db(path: impl AsRef<Path>) -> Result<CraterDb> {
    let text = std::fs::read_to_string(path)?;
    parse_crater_db(&text)
}

/// Parse the crater database CSV from a string. Line numbers in errors are
/// 1-based and count the header.
pub fn parse_crater_db(text: &str) -> Result<CraterDb> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == DB_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{DB_HEADER}`, found `{h}`"),
            })
        }
        None => return Err(Error::Parse { line: 1, msg: "empty file".into() }),
    }

    let mut craters = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let field = |i: usize, name: &str| -> Result<f64> {
            fields[i].trim().parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad {name} `{}`: {e}", fields[i]),
            })
        };
        let id = fields[0].trim().parse::<u64>().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad id `{}`: {e}", fields[0]),
        })?;
        let x = field(1, "x_m")?;
        let y = field(2, "y_m")?;
        let diameter = field(3, "diameter_m")?;
        let depth = if fields[4].trim().is_empty() {
            None
        } else {
            Some(field(4, "depth_m")?)
        };
        craters.push(Crater::new(id, x, y, diameter, depth)?);
    }
    CraterDb::new(craters)
}

/// Serialize a crater database to its CSV format. Floats are written with the
/// shortest representation that round-trips exactly, so save -> load is the
/// identity.
pub fn crater_db_to_csv(db: &CraterDb) -> String {
    let mut out = String::new();
    out.push_str(DB_HEADER);
    out.push('\n');
    for c in db.craters() {
        let _ = write!(out, "{},{},{},{},", c.id, c.x, c.y, c.diameter);
        if let Some(d) = c.depth {
            let _ = write!(out, "{d}");
        }
        out.push('\n');
    }
    out
}

/// Save a crater database as CSV (UTF-8, LF line endings).
pub fn save_crater_db(db: &CraterDb, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, crater_db_to_csv(db))?;
    Ok(())
}

/// Planar rover pose: position in meters plus heading in radians.
///
/// The heading is wrapped to (-pi, pi] by every constructor and arithmetic
/// helper in this crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: wrap_angle(heading) }
    }

    /// Euclidean distance between the positions of two poses.
    pub fn distance_to(&self, other: &Pose2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A crater detection in the rover body frame (x forward, y left).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservedCrater {
    pub x_body: f64,
    pub y_body: f64,
    pub diameter: f64,
}

impl ObservedCrater {
    pub fn range(&self) -> f64 {
        self.x_body.hypot(self.y_body)
    }
}

/// Key performance parameters: detection, sensing, and noise constants used
/// by the simulation and both localizers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KppConfig {
    /// Probability that a crater in range is detected.
    pub detection_prob_pd: f64,
    /// Sensor field-of-view range, meters.
    pub sensing_range: f64,
    /// Per-axis crater position measurement noise, meters (1 sigma).
    pub crater_pos_sigma: f64,
    /// Crater diameter measurement noise, meters (1 sigma).
    pub crater_size_sigma: f64,
    /// Odometry distance noise as a fraction of distance traveled.
    pub motion_noise_frac: f64,
    /// Smallest mappable crater diameter, meters.
    pub min_diameter: f64,
    /// Largest mappable crater diameter, meters.
    pub max_diameter: f64,
}

impl Default for KppConfig {
    fn default() -> Self {
        Self {
            detection_prob_pd: 0.5,
            sensing_range: 40.0,
            crater_pos_sigma: 3.0,
            crater_size_sigma: 1.0,
            motion_noise_frac: 0.02,
            min_diameter: 5.0,
            max_diameter: 20.0,
        }
    }
}

impl KppConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.detection_prob_pd) {
            return Err(Error::Validation(format!(
                "detection_prob_pd {} outside [0, 1]",
                self.detection_prob_pd
            )));
        }
        for (name, v) in [
            ("sensing_range", self.sensing_range),
            ("crater_pos_sigma", self.crater_pos_sigma),
            ("crater_size_sigma", self.crater_size_sigma),
            ("motion_noise_frac", self.motion_noise_frac),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Validation(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.min_diameter > 0.0 && self.min_diameter < self.max_diameter) {
            return Err(Error::Validation(format!(
                "need 0 < min_diameter < max_diameter, got {} and {}",
                self.min_diameter, self.max_diameter
            )));
        }
        Ok(())
    }
}
