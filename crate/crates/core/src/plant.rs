//! Ground-truth dynamics of a planar N-link inverted pendulum standing on a
//! kinematically driven platform.
//!
//! Generalised coordinates are the joint angles `q`. With the prescribed
//! base tilt `a0(t)` the link space angles are `theta = a0 + C q`, `C`
//! lower-triangular ones. The equations of motion are assembled in space
//! angles, where the mass matrix has the classic `a_ij cos(theta_i - theta_j)`
//! form, and projected onto joint coordinates with `C^T`:
//!
//! ```text
//! C^T Ms C q'' = tau - C^T (Ms 1 a0'' + coriolis + gravity + base_accel)
//! ```
//!
//! The platform rotates about the lowest joint and translates horizontally;
//! it is never affected by the body.

use nalgebra::{DMatrix, DVector};

use crate::chain::{axis, ChainConfig, LinkParams, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub time: f64,
}

impl PlantState {
    pub fn at_rest(joint_angles: Vec<f64>) -> Self {
        let n = joint_angles.len();
        Self {
            joint_angles,
            joint_velocities: vec![0.0; n],
            time: 0.0,
        }
    }

    pub fn upright(n: usize) -> Self {
        Self::at_rest(vec![0.0; n])
    }

    pub fn is_finite(&self) -> bool {
        self.joint_angles
            .iter()
            .chain(&self.joint_velocities)
            .all(|v| v.is_finite())
    }

    pub fn space_angles(&self, base_tilt: f64) -> Vec<f64> {
        self.joint_angles
            .iter()
            .scan(base_tilt, |acc, q| {
                *acc += q;
                Some(*acc)
            })
            .collect()
    }

    pub fn space_velocities(&self, base_velocity: f64) -> Vec<f64> {
        self.joint_velocities
            .iter()
            .scan(base_velocity, |acc, q| {
                *acc += q;
                Some(*acc)
            })
            .collect()
    }
}

/// Platform kinematics at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlatformInput {
    pub tilt: f64,
    pub tilt_velocity: f64,
    pub tilt_acceleration: f64,
    /// Horizontal acceleration of the platform (and the lowest joint), m/s².
    pub translation_acceleration: f64,
}

/// Analytic platform motion, sampled at arbitrary times by the integrator.
pub trait PlatformMotion {
    fn sample(&self, t: f64) -> PlatformInput;
}

impl PlatformMotion for PlatformInput {
    fn sample(&self, _t: f64) -> PlatformInput {
        *self
    }
}

impl<F: Fn(f64) -> PlatformInput> PlatformMotion for F {
    fn sample(&self, t: f64) -> PlatformInput {
        self(t)
    }
}

/// Horizontal point force on a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalForce {
    pub link: usize,
    /// Distance along the link from its lower joint, m.
    pub application_height: f64,
    /// N, positive forward.
    pub horizontal_force: f64,
}

/// Everything acting on the joints during one step besides gravity and
/// platform motion. Active torques are held constant over the step.
#[derive(Debug, Clone, Copy)]
pub struct JointInputs<'a> {
    pub active: &'a [f64],
    pub passive_setpoints: &'a [f64],
    pub forces: &'a [ExternalForce],
}

/// `b_i = m_i h_i + L_i * (mass above link i)`: first mass moment of
/// everything supported by link `i`, about its lower joint.
fn first_moments(config: &ChainConfig) -> Vec<f64> {
    let n = config.len();
    let mut out = vec![0.0; n];
    let mut above = 0.0;
    for i in (0..n).rev() {
        let l = &config.links[i];
        out[i] = l.mass * l.com_distance + l.length * above;
        above += l.mass;
    }
    out
}

/// Coefficients `a_ij` of the space-angle mass matrix,
/// `Ms_ij = a_ij cos(theta_i - theta_j)`.
fn coupling_coefficients(config: &ChainConfig) -> DMatrix<f64> {
    let n = config.len();
    let b = first_moments(config);
    let mut a = DMatrix::zeros(n, n);
    let mut above = 0.0;
    for i in (0..n).rev() {
        let l = &config.links[i];
        a[(i, i)] = l.inertia_about_com + l.mass * l.com_distance.powi(2) + l.length.powi(2) * above;
        above += l.mass;
        for j in i + 1..n {
            a[(i, j)] = l.length * b[j];
            a[(j, i)] = a[(i, j)];
        }
    }
    a
}

fn space_mass_matrix(coeffs: &DMatrix<f64>, theta: &[f64]) -> DMatrix<f64> {
    let n = theta.len();
    DMatrix::from_fn(n, n, |i, j| coeffs[(i, j)] * (theta[i] - theta[j]).cos())
}

/// `C^T A C` for a lower-triangular all-ones `C`.
fn project_matrix(ms: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ms.nrows();
    let mut rows = ms.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        for j in 0..n {
            rows[(i, j)] += rows[(i + 1, j)];
        }
    }
    for j in (0..n.saturating_sub(1)).rev() {
        for i in 0..n {
            rows[(i, j)] += rows[(i, j + 1)];
        }
    }
    rows
}

/// `C^T v`: suffix sums.
fn project_vector(v: &mut [f64]) {
    for i in (0..v.len().saturating_sub(1)).rev() {
        v[i] += v[i + 1];
    }
}

pub fn mass_matrix(config: &ChainConfig, state: &PlantState) -> DMatrix<f64> {
    let coeffs = coupling_coefficients(config);
    // only angle differences matter, so the base tilt drops out
    let theta = state.space_angles(0.0);
    project_matrix(&space_mass_matrix(&coeffs, &theta))
}

/// Velocity, gravity and platform-motion terms such that
/// `M q'' = tau_applied - bias`.
pub fn bias_and_gravity(config: &ChainConfig, state: &PlantState, platform: &PlatformInput) -> DVector<f64> {
    let coeffs = coupling_coefficients(config);
    let b = first_moments(config);
    let theta = state.space_angles(platform.tilt);
    let omega = state.space_velocities(platform.tilt_velocity);
    let n = theta.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let d = theta[i] - theta[j];
            acc += coeffs[(i, j)] * (d.cos() * platform.tilt_acceleration + d.sin() * omega[j] * omega[j]);
        }
        acc -= config.gravity * b[i] * theta[i].sin();
        acc += b[i] * platform.translation_acceleration * theta[i].cos();
        out[i] = acc;
    }
    project_vector(&mut out);
    DVector::from_vec(out)
}

/// Intrinsic joint impedance, acting without delay.
pub fn passive_torque(params: &LinkParams, joint_angle: f64, joint_velocity: f64, setpoint: f64) -> f64 {
    -params.passive_stiffness * (joint_angle - setpoint) - params.passive_damping * joint_velocity
}

fn external_torques_into(config: &ChainConfig, theta: &[f64], force: &ExternalForce, out: &mut [f64]) {
    // generalised force in space angles, then C^T
    let mut q = vec![0.0; theta.len()];
    for (i, slot) in q.iter_mut().enumerate().take(force.link + 1) {
        let arm = if i < force.link {
            config.links[i].length
        } else {
            force.application_height
        };
        *slot = force.horizontal_force * arm * theta[i].cos();
    }
    project_vector(&mut q);
    for (o, v) in out.iter_mut().zip(q) {
        *o += v;
    }
}

fn check_force(config: &ChainConfig, force: &ExternalForce) -> Result<()> {
    config.check_index(force.link)?;
    let len = config.links[force.link].length;
    if !(0.0..=len).contains(&force.application_height) {
        return Err(Error::invalid(format!(
            "force application height {} outside link {} (length {len})",
            force.application_height,
            force.link + 1
        )));
    }
    Ok(())
}

/// Joint torques produced by a horizontal point force.
pub fn apply_external_force(
    config: &ChainConfig,
    state: &PlantState,
    platform: &PlatformInput,
    force: &ExternalForce,
) -> Result<DVector<f64>> {
    check_force(config, force)?;
    let theta = state.space_angles(platform.tilt);
    let mut out = vec![0.0; config.len()];
    external_torques_into(config, &theta, force, &mut out);
    Ok(DVector::from_vec(out))
}

pub fn passive_torques(config: &ChainConfig, state: &PlantState, setpoints: &[f64]) -> Vec<f64> {
    config
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            passive_torque(
                l,
                state.joint_angles[i],
                state.joint_velocities[i],
                setpoints.get(i).copied().unwrap_or(0.0),
            )
        })
        .collect()
}

/// Joint accelerations for the given state and inputs.
pub fn joint_accelerations(
    config: &ChainConfig,
    state: &PlantState,
    inputs: &JointInputs<'_>,
    platform: &PlatformInput,
) -> DVector<f64> {
    let n = config.len();
    let m = mass_matrix(config, state);
    let bias = bias_and_gravity(config, state, platform);
    let theta = state.space_angles(platform.tilt);
    let mut tau = passive_torques(config, state, inputs.passive_setpoints);
    for (t, a) in tau.iter_mut().zip(inputs.active) {
        *t += a;
    }
    for f in inputs.forces {
        external_torques_into(config, &theta, f, &mut tau);
    }
    let rhs = DVector::from_vec(tau) - bias;
    match m.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        // Not reachable for physical parameters; keep going with LU so a
        // degenerate user chain surfaces as divergence rather than a panic.
        None => m.lu().solve(&rhs).unwrap_or_else(|| DVector::from_element(n, f64::NAN)),
    }
}

fn validate_inputs(config: &ChainConfig, state: &PlantState, inputs: &JointInputs<'_>) -> Result<()> {
    config.check_len(state.joint_angles.len())?;
    config.check_len(state.joint_velocities.len())?;
    config.check_len(inputs.active.len())?;
    for f in inputs.forces {
        check_force(config, f)?;
    }
    Ok(())
}

/// One fixed-step RK4 update. Platform motion is sampled at the stage
/// times; active torques, passive set points and forces are held.
pub fn step(
    config: &ChainConfig,
    state: &PlantState,
    inputs: &JointInputs<'_>,
    platform: &impl PlatformMotion,
    dt: f64,
) -> Result<PlantState> {
    validate_inputs(config, state, inputs)?;
    let t = state.time;
    let deriv = |s: &PlantState, time: f64| -> (Vec<f64>, Vec<f64>) {
        let p = platform.sample(time);
        let acc = joint_accelerations(config, s, inputs, &p);
        (s.joint_velocities.clone(), acc.iter().copied().collect())
    };
    let offset = |k: &(Vec<f64>, Vec<f64>), h: f64| PlantState {
        joint_angles: state.joint_angles.iter().zip(&k.0).map(|(q, d)| q + h * d).collect(),
        joint_velocities: state
            .joint_velocities
            .iter()
            .zip(&k.1)
            .map(|(v, d)| v + h * d)
            .collect(),
        time: t + h,
    };
    let k1 = deriv(state, t);
    let k2 = deriv(&offset(&k1, 0.5 * dt), t + 0.5 * dt);
    let k3 = deriv(&offset(&k2, 0.5 * dt), t + 0.5 * dt);
    let k4 = deriv(&offset(&k3, dt), t + dt);
    let combine = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    let next = PlantState {
        joint_angles: combine(&state.joint_angles, &k1.0, &k2.0, &k3.0, &k4.0),
        joint_velocities: combine(&state.joint_velocities, &k1.1, &k2.1, &k3.1, &k4.1),
        time: t + dt,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::Diverged { time: next.time })
    }
}

/// Kinetic plus gravitational energy, with the potential datum at the
/// height of the lowest joint. Rotation of the platform contributes to link
/// angular velocities; platform translation velocity is not tracked.
pub fn total_energy(config: &ChainConfig, state: &PlantState, platform: &PlatformInput) -> f64 {
    let coeffs = coupling_coefficients(config);
    let b = first_moments(config);
    let theta = state.space_angles(platform.tilt);
    let omega = state.space_velocities(platform.tilt_velocity);
    let ms = space_mass_matrix(&coeffs, &theta);
    let w = DVector::from_vec(omega);
    let kinetic = 0.5 * w.dot(&(&ms * &w));
    let potential: f64 = config.gravity * b.iter().zip(&theta).map(|(bi, t)| bi * t.cos()).sum::<f64>();
    kinetic + potential
}

/// Acceleration of the top of the last link, including platform
/// translation. Gravity is not included.
pub fn head_acceleration(
    config: &ChainConfig,
    state: &PlantState,
    joint_acc: &[f64],
    platform: &PlatformInput,
) -> Vec2 {
    let theta = state.space_angles(platform.tilt);
    let omega = state.space_velocities(platform.tilt_velocity);
    let mut alpha = platform.tilt_acceleration;
    let mut acc = Vec2::new(platform.translation_acceleration, 0.0);
    for (i, link) in config.links.iter().enumerate() {
        alpha += joint_acc[i];
        let (s, c) = theta[i].sin_cos();
        acc += link.length * (alpha * Vec2::new(c, -s) - omega[i] * omega[i] * axis(theta[i]));
    }
    acc
}
