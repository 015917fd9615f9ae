//! Kinematic chain conventions and brute-force reference computations.
//!
//! Links are indexed `0..N` from the lowest moving link (shank) to the
//! head-bearing link. Joint `n` connects link `n` to the link below it; the
//! link below joint 0 is the support (foot on the platform), which is
//! kinematically driven. Angles are measured from the earth vertical,
//! positive for forward lean, with gravity along `-y`:
//!
//! ```text
//! joint_angle[n] = space_angle[n] - space_angle[n - 1]   (space_angle[-1] = base tilt)
//! ```
//!
//! The oracle functions here deliberately use explicit forward kinematics
//! and direct summation so they stay independent of the recursive
//! estimators in [`crate::dec`].

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Direction of a link axis in the sagittal plane, `(sin a, cos a)`.
#[inline]
pub fn axis(angle: f64) -> Vec2 {
    Vec2::new(angle.sin(), angle.cos())
}

/// Planar cross product with the sign convention of forward-positive angles:
/// the torque about the origin of force `f` applied at `r`.
#[inline]
pub fn moment(r: &Vec2, f: &Vec2) -> f64 {
    r.y * f.x - r.x * f.y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// kg
    pub mass: f64,
    /// Joint-to-joint length, m.
    pub length: f64,
    /// Distance from the link's lower joint to its centre of mass, m.
    pub com_distance: f64,
    /// Moment of inertia about the link COM, kg·m².
    pub inertia_about_com: f64,
    /// N·m/rad
    pub passive_stiffness: f64,
    /// N·m·s/rad
    pub passive_damping: f64,
}

impl LinkParams {
    pub fn new(mass: f64, length: f64, com_distance: f64, inertia_about_com: f64) -> Self {
        Self {
            mass,
            length,
            com_distance,
            inertia_about_com,
            passive_stiffness: 0.0,
            passive_damping: 0.0,
        }
    }

    /// Collects every violated invariant, prefixed with `label`.
    pub fn violations(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        let finite = [
            self.mass,
            self.length,
            self.com_distance,
            self.inertia_about_com,
            self.passive_stiffness,
            self.passive_damping,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            out.push(format!("{label}: all parameters must be finite"));
            return out;
        }
        if self.mass <= 0.0 {
            out.push(format!("{label}.mass must be > 0 (got {})", self.mass));
        }
        if self.length <= 0.0 {
            out.push(format!("{label}.length must be > 0 (got {})", self.length));
        }
        if self.com_distance < 0.0 || self.com_distance > self.length {
            out.push(format!(
                "{label}.com_distance must lie in [0, length] (got {})",
                self.com_distance
            ));
        }
        if self.inertia_about_com < 0.0 {
            out.push(format!("{label}.inertia_about_com must be >= 0"));
        }
        if self.passive_stiffness < 0.0 {
            out.push(format!("{label}.passive_stiffness must be >= 0"));
        }
        if self.passive_damping < 0.0 {
            out.push(format!("{label}.passive_damping must be >= 0"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub links: Vec<LinkParams>,
    /// m/s²
    pub gravity: f64,
}

impl ChainConfig {
    pub fn new(links: Vec<LinkParams>) -> Self {
        Self {
            links,
            gravity: STANDARD_GRAVITY,
        }
    }

    /// Shank, thigh and head-arms-trunk for a body of the given mass and
    /// height, using the segment fractions of the standard anthropometric
    /// tables (Winter). Both legs are lumped into one shank and one thigh;
    /// the feet are the support link and carry no mass here.
    pub fn humanoid(body_mass: f64, body_height: f64) -> Self {
        let h = body_height;
        let seg = |mass_frac: f64, len_frac: f64, com_frac: f64, gyration: f64| {
            let mass = mass_frac * body_mass;
            let length = len_frac * h;
            let radius = gyration * length;
            LinkParams::new(mass, length, com_frac * length, mass * radius * radius)
        };
        let shank = seg(2.0 * 0.0465, 0.246, 0.567, 0.302);
        let thigh = seg(2.0 * 0.100, 0.245, 0.567, 0.323);
        // HAT: hip to vertex; COM at ~0.20 H above the hip, radius of
        // gyration taken over the trochanter-shoulder span (0.288 H).
        let hat_mass = 0.678 * body_mass;
        let hat_gyration = 0.496 * 0.288 * h;
        let hat = LinkParams::new(hat_mass, 0.47 * h, 0.20 * h, hat_mass * hat_gyration * hat_gyration);
        Self::new(vec![shank, thigh, hat])
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.links.iter().map(|l| l.mass).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.links.is_empty() {
            errs.push("chain.links must contain at least one link".to_string());
        }
        if !(self.gravity.is_finite() && self.gravity >= 0.0) {
            errs.push(format!("chain.gravity must be finite and >= 0 (got {})", self.gravity));
        }
        for (i, link) in self.links.iter().enumerate() {
            errs.extend(link.violations(&format!("chain.links[{}]", i + 1)));
        }
        errs
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            })
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::LinkIndex { index, len: self.len() })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPose {
    /// Link orientations in space, rad.
    pub space_angles: Vec<f64>,
    /// Support (platform) tilt, rad.
    pub base_tilt: f64,
    /// Horizontal position of the lowest joint, m.
    pub base_position: f64,
}

impl ChainPose {
    pub fn upright(n: usize) -> Self {
        Self {
            space_angles: vec![0.0; n],
            base_tilt: 0.0,
            base_position: 0.0,
        }
    }

    pub fn from_joint_angles(joint_angles: &[f64], base_tilt: f64) -> Self {
        Self {
            space_angles: cumulative(joint_angles, base_tilt),
            base_tilt,
            base_position: 0.0,
        }
    }

    pub fn joint_angles(&self) -> Vec<f64> {
        differences(&self.space_angles, self.base_tilt)
    }
}

fn cumulative(joint_angles: &[f64], base_tilt: f64) -> Vec<f64> {
    joint_angles
        .iter()
        .scan(base_tilt, |acc, q| {
            *acc += q;
            Some(*acc)
        })
        .collect()
}

fn differences(space_angles: &[f64], base_tilt: f64) -> Vec<f64> {
    let mut below = base_tilt;
    space_angles
        .iter()
        .map(|&a| {
            let q = a - below;
            below = a;
            q
        })
        .collect()
}

pub fn joint_to_space(config: &ChainConfig, joint_angles: &[f64], base_tilt: f64) -> Result<Vec<f64>> {
    config.check_len(joint_angles.len())?;
    Ok(cumulative(joint_angles, base_tilt))
}

pub fn space_to_joint(config: &ChainConfig, space_angles: &[f64], base_tilt: f64) -> Result<Vec<f64>> {
    config.check_len(space_angles.len())?;
    Ok(differences(space_angles, base_tilt))
}

/// Absolute positions of every joint (index `n` = lower joint of link `n`)
/// plus the top of the last link at index `N`.
pub fn joint_positions(config: &ChainConfig, pose: &ChainPose) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(config.len() + 1);
    let mut p = Vec2::new(pose.base_position, 0.0);
    out.push(p);
    for (link, &a) in config.links.iter().zip(&pose.space_angles) {
        p += link.length * axis(a);
        out.push(p);
    }
    out
}

/// Absolute COM position of every link.
pub fn link_com_positions(config: &ChainConfig, pose: &ChainPose) -> Vec<Vec2> {
    let joints = joint_positions(config, pose);
    config
        .links
        .iter()
        .zip(&pose.space_angles)
        .zip(&joints)
        .map(|((link, &a), j)| j + link.com_distance * axis(a))
        .collect()
}

/// COM of links `n..N` relative to joint `n`, and their total mass.
pub fn com_of_subchain_oracle(config: &ChainConfig, pose: &ChainPose, n: usize) -> Result<(Vec2, f64)> {
    config.check_index(n)?;
    config.check_len(pose.space_angles.len())?;
    let joints = joint_positions(config, pose);
    let coms = link_com_positions(config, pose);
    let mut weighted = Vec2::zeros();
    let mut mass = 0.0;
    for (link, c) in config.links.iter().zip(&coms).skip(n) {
        weighted += link.mass * (c - joints[n]);
        mass += link.mass;
    }
    Ok((weighted / mass, mass))
}

/// Moment of inertia of links `n..N` about joint `n` and about their
/// common COM.
pub fn inertia_of_subchain_oracle(config: &ChainConfig, pose: &ChainPose, n: usize) -> Result<(f64, f64)> {
    let (com, _) = com_of_subchain_oracle(config, pose, n)?;
    let joints = joint_positions(config, pose);
    let coms = link_com_positions(config, pose);
    let mut about_joint = 0.0;
    let mut about_com = 0.0;
    for (link, c) in config.links.iter().zip(&coms).skip(n) {
        let r = c - joints[n];
        about_joint += link.inertia_about_com + link.mass * r.norm_squared();
        about_com += link.inertia_about_com + link.mass * (r - com).norm_squared();
    }
    Ok((about_joint, about_com))
}
