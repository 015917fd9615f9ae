use serde::{Deserialize, Serialize};

/// Local joint servo. `kp`, `ki` and `kd` are the total loop gains; the
/// reflexive (delayed, active) share is produced here, the passive share by
/// the joint's intrinsic stiffness and damping in the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoParams {
    /// N·m/rad
    pub kp: f64,
    /// N·m/(rad·s)
    pub ki: f64,
    /// N·m·s/rad
    pub kd: f64,
    pub reflexive_share: f64,
    pub passive_share: f64,
}

impl ServoParams {
    /// Defaults for a joint supporting `mass` with its COM `com_height`
    /// above the joint: proportional gain `m g h`, derivative 0.25 s and
    /// integral 0.05 /s relative to it.
    pub fn for_load(mass: f64, com_height: f64, gravity: f64) -> Self {
        let kp = mass * gravity * com_height;
        Self {
            kp,
            ki: 0.05 * kp,
            kd: 0.25 * kp,
            reflexive_share: 0.85,
            passive_share: 0.15,
        }
    }

    pub fn violations(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.kp.is_finite() && self.kp > 0.0) {
            out.push(format!("{label}.kp must be > 0 (got {})", self.kp));
        }
        if !(self.ki.is_finite() && self.ki >= 0.0) {
            out.push(format!("{label}.ki must be >= 0 (got {})", self.ki));
        }
        if !(self.kd.is_finite() && self.kd >= 0.0) {
            out.push(format!("{label}.kd must be >= 0 (got {})", self.kd));
        }
        if self.reflexive_share < 0.0 || self.passive_share < 0.0 {
            out.push(format!("{label}: servo shares must be >= 0"));
        }
        if (self.reflexive_share + self.passive_share - 1.0).abs() > 1e-9 {
            out.push(format!(
                "{label}: reflexive_share + passive_share must equal 1 (got {})",
                self.reflexive_share + self.passive_share
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServoState {
    pub integral: f64,
    previous_feedback: Option<f64>,
}

/// Active (reflexive) torque.
///
/// `disturbance` is the sum of the angle equivalents of all compensated
/// disturbance estimates; it shifts the proportional path so that the servo
/// produces torque opposing them. The integral acts on the tracking error
/// alone, otherwise it would slowly unwind the compensation. The derivative
/// acts on the controlled variable plus `damped_disturbance`, the part of the
/// compensation that is a smooth function of posture; set-point steps
/// therefore cause no kick.
pub fn servo_command(
    setpoint: f64,
    controlled: f64,
    disturbance: f64,
    damped_disturbance: f64,
    params: &ServoParams,
    state: &mut ServoState,
    dt: f64,
) -> f64 {
    let tracking = setpoint - controlled;
    let feedback = controlled + damped_disturbance;
    state.integral += tracking * dt;
    let rate = state.previous_feedback.map_or(0.0, |prev| (feedback - prev) / dt);
    state.previous_feedback = Some(feedback);
    params.reflexive_share * (params.kp * (tracking - disturbance) + params.ki * state.integral - params.kd * rate)
}
