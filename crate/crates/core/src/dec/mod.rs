//! Modular disturbance estimation and compensation.
//!
//! One module per joint. Each module treats everything above its joint as a
//! single inverted pendulum: it knows the combined COM, mass and inertia of
//! the links it supports (aggregated from the module above), and it
//! estimates four disturbances acting on that lumped body: support tilt,
//! gravity, support linear acceleration and external contact torque. The
//! estimates are converted to angle equivalents and fed to a local servo.
//!
//! Every control tick runs a down-pass (head to feet: space angles, COM,
//! inertia, self-produced acceleration) followed by an up-pass (feet to
//! head: processed support tilt, estimators, servo).

mod estimators;
mod network;
mod servo;
mod setpoint;

pub use estimators::{
    aggregate_com, aggregate_inertia, dead_band, down_channel, estimate_external_acceleration, estimate_gravity,
    estimate_self_acceleration, fuse_prediction, inertial_torque, ExtTorqueEstimator, ExtTorqueInputs, GravityEstimate,
    LowPass, SecondDifference, TiltEstimator,
};
pub use network::{DecModule, DecNetwork, DownMsg, ModuleConfig, ModuleDiagnostics, TickOutput, UpMsg};
pub use servo::{servo_command, ServoParams, ServoState};
pub use setpoint::{Prediction, SetPoint, SetPointMode, Trajectory};

use serde::{Deserialize, Serialize};

const DEG: f64 = std::f64::consts::PI / 180.0;

/// Thresholds, gains and filter settings of the four estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    /// Dead band on the support tilt velocity, rad/s.
    pub tilt_threshold: f64,
    pub tilt_gain: f64,
    /// Dead band on the gravity lean, expressed as an angle, rad.
    pub gravity_threshold: f64,
    pub gravity_gain: f64,
    /// Dead band on each component of the external acceleration, m/s².
    pub accel_threshold: f64,
    pub accel_gain: f64,
    /// First-order low-pass on the external acceleration estimate, Hz.
    pub accel_lowpass_cutoff: f64,
    /// Must stay below one: the estimate contains the module's own torque.
    pub ext_torque_gain: f64,
    /// Hz
    pub ext_torque_lowpass_cutoff: f64,
    /// N·m
    pub ext_torque_threshold: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            tilt_threshold: 0.18 * DEG,
            tilt_gain: 0.75,
            gravity_threshold: 0.0,
            gravity_gain: 1.0,
            accel_threshold: 0.0,
            accel_gain: 1.0,
            accel_lowpass_cutoff: 1.0,
            ext_torque_gain: 0.5,
            ext_torque_lowpass_cutoff: 1.0,
            ext_torque_threshold: 0.0,
        }
    }
}

impl EstimatorParams {
    pub fn violations(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        let checks = [
            ("tilt_threshold", self.tilt_threshold),
            ("gravity_threshold", self.gravity_threshold),
            ("accel_threshold", self.accel_threshold),
            ("ext_torque_threshold", self.ext_torque_threshold),
            ("tilt_gain", self.tilt_gain),
            ("gravity_gain", self.gravity_gain),
            ("accel_gain", self.accel_gain),
            ("ext_torque_gain", self.ext_torque_gain),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v >= 0.0) {
                out.push(format!("{label}.{name} must be finite and >= 0 (got {v})"));
            }
        }
        if self.ext_torque_gain >= 1.0 {
            out.push(format!(
                "{label}.ext_torque_gain must be < 1 (got {})",
                self.ext_torque_gain
            ));
        }
        for (name, v) in [
            ("accel_lowpass_cutoff", self.accel_lowpass_cutoff),
            ("ext_torque_lowpass_cutoff", self.ext_torque_lowpass_cutoff),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{label}.{name} must be > 0 (got {v})"));
            }
        }
        out
    }
}

/// Which estimates a module feeds to its servo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimatorFlags {
    pub tilt: bool,
    pub gravity: bool,
    pub acceleration: bool,
    pub external_torque: bool,
}

impl EstimatorFlags {
    pub const NONE: EstimatorFlags = EstimatorFlags {
        tilt: false,
        gravity: false,
        acceleration: false,
        external_torque: false,
    };
    pub const ALL: EstimatorFlags = EstimatorFlags {
        tilt: true,
        gravity: true,
        acceleration: true,
        external_torque: true,
    };
    pub const GRAVITY_TILT: EstimatorFlags = EstimatorFlags {
        tilt: true,
        gravity: true,
        acceleration: false,
        external_torque: false,
    };
}
