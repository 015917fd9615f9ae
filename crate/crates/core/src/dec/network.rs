use crate::chain::{axis, moment, LinkParams, Vec2};
use crate::error::{Error, Result};
use crate::sensors::{DelayLine, SensorFrame};

use super::estimators::{
    aggregate_com, aggregate_inertia, dead_band, down_channel, estimate_external_acceleration,
    estimate_self_acceleration, fuse_prediction, inertial_torque, ExtTorqueEstimator, ExtTorqueInputs, LowPass,
    SecondDifference, TiltEstimator,
};
use super::servo::{servo_command, ServoParams, ServoState};
use super::setpoint::{SetPoint, SetPointMode};
use super::{EstimatorFlags, EstimatorParams};

/// Bus payload from module `n + 1` to module `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DownMsg {
    /// COM of the supported links relative to the sender's joint.
    pub com_above: Vec2,
    pub mass_above: f64,
    /// Inertia of the supported links about their common COM.
    pub inertia_above: f64,
    /// Space angle of the receiver's link.
    pub space_angle_down: f64,
    pub space_velocity_down: f64,
    /// Acceleration of the sender's joint produced by the links above it,
    /// relative to the head point.
    pub self_acceleration: Vec2,
    pub head_angular_acc: f64,
}

/// Bus payload from module `n - 1` to module `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpMsg {
    /// Processed space-angle estimate of the receiver's supporting link.
    pub space_angle_up: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleConfig {
    pub link: LinkParams,
    pub servo: ServoParams,
    pub estimator: EstimatorParams,
    pub flags: EstimatorFlags,
    pub setpoint: SetPoint,
}

/// Everything a module computed in one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModuleDiagnostics {
    /// Down-channelled space angle of this module's link.
    pub space_angle: f64,
    /// Reconstructed base tilt plus the joint angles up to this module.
    pub up_space_angle: f64,
    /// Processed space angle of the supporting link used for tilt
    /// compensation.
    pub support_estimate: f64,
    pub com: Vec2,
    pub mass: f64,
    pub inertia_star: f64,
    pub inertia_up: f64,
    pub self_acceleration: Vec2,
    pub external_acceleration: Vec2,
    /// Processed disturbance estimates, N·m.
    pub gravity_torque: f64,
    pub inertial_torque: f64,
    pub external_torque: f64,
    pub setpoint: f64,
    pub controlled: f64,
    /// Sum of the angle equivalents fed to the servo.
    pub compensation: f64,
    pub torque: f64,
}

#[derive(Debug, Clone)]
pub struct DecModule {
    config: ModuleConfig,
    servo: ServoState,
    ext: ExtTorqueEstimator,
    axis_history: SecondDifference,
    acceleration: LowPass<Vec2>,
    predicted: DelayLine<f64>,
}

impl DecModule {
    fn new(config: ModuleConfig, prediction_delay: usize) -> Self {
        Self {
            config,
            servo: ServoState::default(),
            ext: ExtTorqueEstimator::default(),
            axis_history: SecondDifference::default(),
            acceleration: LowPass::default(),
            predicted: DelayLine::new(prediction_delay, 0.0),
        }
    }

    pub fn config(&self) -> &ModuleConfig {
        &self.config
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub torques: Vec<f64>,
    pub modules: Vec<ModuleDiagnostics>,
    /// Position-level base tilt reconstructed by down-channelling.
    pub base_tilt_raw: f64,
    /// Thresholded, scaled and integrated base tilt.
    pub base_tilt_estimate: f64,
}

/// Per-module geometry from the down-pass.
#[derive(Debug, Clone, Copy, Default)]
struct Geometry {
    space_angle: f64,
    space_velocity: f64,
    com: Vec2,
    mass: f64,
    inertia_star: f64,
    inertia_up: f64,
    self_acceleration: Vec2,
}

/// Angular momentum about the lowest joint of `geometry` of the links it
/// supports, with velocities taken relative to that joint.
fn relative_momentum(links: &[LinkParams], geometry: &[Geometry]) -> f64 {
    let mut origin = Vec2::zeros();
    let mut origin_velocity = Vec2::zeros();
    let mut h = 0.0;
    let first = links.len() - geometry.len();
    for (link, g) in links[first..].iter().zip(geometry) {
        let u = axis(g.space_angle);
        let du = Vec2::new(u.y, -u.x) * g.space_velocity;
        let r = origin + u * link.com_distance;
        let v = origin_velocity + du * link.com_distance;
        h += link.inertia_about_com * g.space_velocity + link.mass * moment(&r, &v);
        origin += u * link.length;
        origin_velocity += du * link.length;
    }
    h
}

/// The chain of modules, ordered from the lowest joint to the head.
#[derive(Debug, Clone)]
pub struct DecNetwork {
    modules: Vec<DecModule>,
    gravity: f64,
    dt: f64,
    tick: u64,
    base: TiltEstimator,
    previous_vestibular: Option<Vec2>,
    previous_head_velocity: Option<f64>,
}

impl DecNetwork {
    /// `prediction_delay` is the delay, in ticks, of the sensory
    /// disturbance paths; predictions are aligned with it before fusion.
    pub fn new(modules: Vec<ModuleConfig>, gravity: f64, dt: f64, prediction_delay: usize) -> Self {
        Self {
            modules: modules
                .into_iter()
                .map(|c| DecModule::new(c, prediction_delay))
                .collect(),
            gravity,
            dt,
            tick: 0,
            base: TiltEstimator::default(),
            previous_vestibular: None,
            previous_head_velocity: None,
        }
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> &[DecModule] {
        &self.modules
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.dt
    }

    /// Set points of the joints' passive impedance: the commanded joint
    /// angle for joint-angle modules, the neutral position otherwise.
    pub fn passive_setpoints(&self, t: f64) -> Vec<f64> {
        self.modules
            .iter()
            .map(|m| match m.config.setpoint.mode {
                SetPointMode::JointAngle => m.config.setpoint.trajectory.value(t),
                _ => 0.0,
            })
            .collect()
    }

    /// One control tick: down-pass, base tilt processing, up-pass.
    pub fn control_tick(&mut self, frame: &SensorFrame) -> Result<TickOutput> {
        let n = self.modules.len();
        if frame.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: frame.len(),
            });
        }
        let dt = self.dt;
        let t = self.time();

        let head_angular_acc = self
            .previous_head_velocity
            .map_or(0.0, |w| (frame.head_space_velocity - w) / dt);
        self.previous_head_velocity = Some(frame.head_space_velocity);

        // down-pass
        let mut geometry = vec![Geometry::default(); n];
        let mut down: Option<DownMsg> = None;
        for k in (0..n).rev() {
            let (angle, velocity) = match &down {
                None => (frame.head_space_angle, frame.head_space_velocity),
                Some(d) => (d.space_angle_down, d.space_velocity_down),
            };
            let module = &mut self.modules[k];
            let link = &module.config.link;
            let com = aggregate_com(down.as_ref(), link, angle);
            let (inertia_star, inertia_up) = aggregate_inertia(down.as_ref(), link, angle, com);
            let above = down.map_or(Vec2::zeros(), |d| d.self_acceleration);
            let d2 = module.axis_history.push(angle, dt);
            let self_acceleration = estimate_self_acceleration(above, link.length, d2);
            geometry[k] = Geometry {
                space_angle: angle,
                space_velocity: velocity,
                com: com.0,
                mass: com.1,
                inertia_star,
                inertia_up,
                self_acceleration,
            };
            down = Some(DownMsg {
                com_above: com.0,
                mass_above: com.1,
                inertia_above: inertia_star,
                space_angle_down: down_channel(angle, frame.dec_joint_angles[k]),
                space_velocity_down: velocity - frame.dec_joint_velocities[k],
                self_acceleration,
                head_angular_acc,
            });
        }

        // base tilt: velocity-level down-channel, then dead band, gain and
        // integration at the lowest link
        let base_msg = down.expect("network has at least one module");
        let base_params = self.modules[0].config.estimator;
        let base_tilt_estimate = self.base.update(
            geometry[0].space_velocity,
            frame.dec_joint_velocities[0],
            &base_params,
            dt,
        );
        let base_tilt_raw = base_msg.space_angle_down;

        // The self-acceleration is a central difference for the previous
        // sample, so compare it with the previous vestibular sample.
        let vestibular = self.previous_vestibular.unwrap_or(frame.head_linear_acceleration);
        self.previous_vestibular = Some(frame.head_linear_acceleration);

        // Head acceleration not explained by rotation at any joint is
        // attributed to the support; every module compensates that.
        let external_acceleration = estimate_external_acceleration(vestibular, geometry[0].self_acceleration);

        let links: Vec<LinkParams> = self.modules.iter().map(|m| m.config.link.clone()).collect();

        // up-pass
        let mut up = UpMsg {
            space_angle_up: base_tilt_estimate,
        };
        let mut up_raw = base_tilt_raw;
        let mut torques = Vec::with_capacity(n);
        let mut diagnostics = Vec::with_capacity(n);
        for (k, g) in geometry.iter().enumerate() {
            let gravity = self.gravity;
            let module = &mut self.modules[k];
            let cfg = &module.config;
            let params = &cfg.estimator;
            let flags = cfg.flags;
            let weight = g.mass * gravity;
            up_raw += frame.dec_joint_angles[k];

            let degenerate = g.com.y <= 0.0;
            if degenerate && (flags.gravity || flags.acceleration || flags.external_torque) {
                return Err(Error::DegenerateGeometry {
                    module: k,
                    com_y: g.com.y,
                });
            }
            let to_angle = |torque: f64| if degenerate { 0.0 } else { torque / (weight * g.com.y) };

            // gravity, fused with any prediction of the self-produced part
            let gravity_raw = weight * g.com.x;
            let gravity_threshold = params.gravity_threshold * weight * g.com.norm();
            let (predicted_now, predicted_at_sample) = match cfg.setpoint.prediction {
                Some(p) => {
                    let now = p.torque(t);
                    (now, module.predicted.push(now))
                }
                None => (0.0, 0.0),
            };
            let gravity_torque = fuse_prediction(
                gravity_raw,
                predicted_now,
                predicted_at_sample,
                gravity_threshold,
                params.gravity_gain,
            );

            // support linear acceleration
            let smoothed = module
                .acceleration
                .update(external_acceleration, params.accel_lowpass_cutoff, dt);
            let processed_acc = Vec2::new(
                dead_band(smoothed.x, params.accel_threshold),
                dead_band(smoothed.y, params.accel_threshold),
            );
            let inertial = params.accel_gain * inertial_torque(processed_acc, g.com, g.mass);

            // contact forces: balance about the joint, which accelerates
            // with the support and with the links below it
            let joint_acceleration = vestibular - g.self_acceleration;
            let active = frame.active_torques[k];
            let (_, external_torque) = module.ext.update(
                &ExtTorqueInputs {
                    active,
                    passive: frame.joint_torques[k] - active,
                    gravity: gravity_raw,
                    inertial: inertial_torque(joint_acceleration, g.com, g.mass),
                    angular_momentum: relative_momentum(&links, &geometry[k..]),
                },
                params,
                dt,
            );

            let support = if flags.tilt { up.space_angle_up } else { 0.0 };
            let com_angle = if degenerate {
                g.space_angle
            } else {
                g.com.x.atan2(g.com.y)
            };
            let space_estimate = support + frame.joint_angles[k] + (com_angle - g.space_angle);
            let target = cfg.setpoint.trajectory.value(t);
            let (setpoint, controlled) = match cfg.setpoint.mode {
                SetPointMode::SpaceAngle => (target, space_estimate),
                SetPointMode::ComPosition => (target.atan2(g.com.y), space_estimate),
                SetPointMode::JointAngle => (target, frame.joint_angles[k]),
            };

            let mut compensation = 0.0;
            if flags.gravity {
                compensation += to_angle(gravity_torque);
            }
            let damped = compensation;
            if flags.acceleration {
                compensation += to_angle(inertial);
            }
            if flags.external_torque {
                compensation += to_angle(external_torque);
            }

            let torque = servo_command(
                setpoint,
                controlled,
                compensation,
                damped,
                &cfg.servo,
                &mut module.servo,
                dt,
            );
            torques.push(torque);
            diagnostics.push(ModuleDiagnostics {
                space_angle: g.space_angle,
                up_space_angle: up_raw,
                support_estimate: up.space_angle_up,
                com: g.com,
                mass: g.mass,
                inertia_star: g.inertia_star,
                inertia_up: g.inertia_up,
                self_acceleration: g.self_acceleration,
                external_acceleration,
                gravity_torque,
                inertial_torque: inertial,
                external_torque,
                setpoint,
                controlled,
                compensation,
                torque,
            });
            up = UpMsg {
                space_angle_up: up.space_angle_up + frame.dec_joint_angles[k],
            };
        }

        self.tick += 1;
        Ok(TickOutput {
            torques,
            modules: diagnostics,
            base_tilt_raw,
            base_tilt_estimate,
        })
    }
}
