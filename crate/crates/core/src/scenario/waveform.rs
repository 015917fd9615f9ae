use std::f64::consts::TAU;

use crate::chain::{ChainConfig, LinkParams};
use crate::dec::{Prediction, SetPoint, SetPointMode, Trajectory};
use crate::plant::{ExternalForce, PlatformInput, PlatformMotion};

/// Support-surface rotation about the lowest joint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TiltWaveform {
    #[default]
    None,
    /// `amplitude * sin(2 pi f t)`, rad.
    Sinusoid { amplitude: f64, frequency: f64 },
}

/// Horizontal support-surface acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TranslationWaveform {
    #[default]
    None,
    /// Displacement `amplitude * sin(2 pi f t)`, m.
    Sinusoid { amplitude: f64, frequency: f64 },
    /// Constant acceleration, m/s², over `[start, start + duration)`.
    Step {
        acceleration: f64,
        start: f64,
        duration: f64,
    },
}

pub fn sinusoid_tilt(amplitude: f64, frequency: f64) -> TiltWaveform {
    TiltWaveform::Sinusoid { amplitude, frequency }
}

impl TiltWaveform {
    /// `(angle, velocity, acceleration)` in closed form.
    pub fn sample(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            TiltWaveform::None => (0.0, 0.0, 0.0),
            TiltWaveform::Sinusoid { amplitude, frequency } => {
                let w = TAU * frequency;
                let (s, c) = (w * t).sin_cos();
                (amplitude * s, amplitude * w * c, -amplitude * w * w * s)
            }
        }
    }

    pub fn violations(&self) -> Vec<String> {
        match *self {
            TiltWaveform::None => vec![],
            TiltWaveform::Sinusoid { amplitude, frequency } => {
                let mut v = vec![];
                if !(amplitude.is_finite() && amplitude >= 0.0) {
                    v.push(format!(
                        "platform.tilt.amplitude_deg must be >= 0 (got {})",
                        amplitude.to_degrees()
                    ));
                }
                if !(frequency.is_finite() && frequency > 0.0) {
                    v.push(format!("platform.tilt.frequency_hz must be > 0 (got {frequency})"));
                }
                v
            }
        }
    }
}

impl TranslationWaveform {
    pub fn acceleration(&self, t: f64) -> f64 {
        match *self {
            TranslationWaveform::None => 0.0,
            TranslationWaveform::Sinusoid { amplitude, frequency } => {
                let w = TAU * frequency;
                -amplitude * w * w * (w * t).sin()
            }
            TranslationWaveform::Step {
                acceleration,
                start,
                duration,
            } => {
                if t >= start && t < start + duration {
                    acceleration
                } else {
                    0.0
                }
            }
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = vec![];
        match *self {
            TranslationWaveform::None => {}
            TranslationWaveform::Sinusoid { amplitude, frequency } => {
                if !amplitude.is_finite() {
                    v.push("platform.translation.amplitude_m must be finite".to_string());
                }
                if !(frequency.is_finite() && frequency > 0.0) {
                    v.push(format!(
                        "platform.translation.frequency_hz must be > 0 (got {frequency})"
                    ));
                }
            }
            TranslationWaveform::Step {
                acceleration,
                start,
                duration,
            } => {
                if !acceleration.is_finite() {
                    v.push("platform.translation.acceleration_ms2 must be finite".to_string());
                }
                if !(start.is_finite() && start >= 0.0) {
                    v.push(format!("platform.translation.start_s must be >= 0 (got {start})"));
                }
                if !(duration > 0.0) {
                    v.push(format!("platform.translation.duration_s must be > 0 (got {duration})"));
                }
            }
        }
        v
    }
}

/// Tilt and translation combined; this is what the integrator samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Platform {
    pub tilt: TiltWaveform,
    pub translation: TranslationWaveform,
}

impl PlatformMotion for Platform {
    fn sample(&self, t: f64) -> PlatformInput {
        let (tilt, tilt_velocity, tilt_acceleration) = self.tilt.sample(t);
        PlatformInput {
            tilt,
            tilt_velocity,
            tilt_acceleration,
            translation_acceleration: self.translation.acceleration(t),
        }
    }
}

/// A horizontal force applied over `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceEvent {
    pub force: ExternalForce,
    pub start: f64,
    pub duration: f64,
}

impl ForceEvent {
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start && t < self.start + self.duration
    }
}

/// Minimum-jerk lean of one module's set point from 0 to `target`, and the
/// matching feed-forward prediction of the gravity torque the lean will
/// produce about that module's joint.
///
/// `supported` are the links above the module's joint (inclusive of its own
/// link); the prediction scale is their `m g |COM|` in the upright pose.
pub fn voluntary_lean(
    mode: SetPointMode,
    target: f64,
    start: f64,
    ramp_duration: f64,
    supported: &[LinkParams],
    gravity: f64,
) -> SetPoint {
    if target == 0.0 {
        return SetPoint::constant(mode, 0.0);
    }
    let trajectory = Trajectory::MinimumJerk {
        from: 0.0,
        to: target,
        start_time: start,
        duration: ramp_duration,
    };
    let sub = ChainConfig {
        links: supported.to_vec(),
        gravity,
    };
    let (com, mass) = crate::chain::com_of_subchain_oracle(&sub, &crate::chain::ChainPose::upright(sub.len()), 0)
        .unwrap_or((crate::chain::Vec2::zeros(), 0.0));
    SetPoint {
        mode,
        trajectory,
        prediction: Some(Prediction {
            scale: mass * gravity * com.norm(),
            angle: trajectory,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    #[test]
    fn zero_amplitude_is_silent() {
        let w = sinusoid_tilt(0.0, 0.08);
        for k in 0..100 {
            assert_eq!(w.sample(k as f64 * 0.37), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn fig3_tilt_peak_velocity_and_quarter_period() {
        let w = sinusoid_tilt(4.0 * DEG, 0.08);
        let (_, v, _) = w.sample(0.0);
        assert_relative_eq!(v / DEG, 2.0 * std::f64::consts::PI * 0.08 * 4.0, epsilon = 1e-12);
        assert!((v / DEG - 2.011).abs() < 1e-3);
        assert_relative_eq!(w.sample(1.0 / (4.0 * 0.08)).0, 4.0 * DEG, epsilon = 1e-15);
    }

    #[test]
    fn tilt_derivatives_match_finite_differences() {
        let w = sinusoid_tilt(0.1, 0.3);
        let h = 1e-6;
        for t in [0.1, 0.9, 2.3] {
            let fd_v = (w.sample(t + h).0 - w.sample(t - h).0) / (2.0 * h);
            let fd_a = (w.sample(t + h).1 - w.sample(t - h).1) / (2.0 * h);
            assert_relative_eq!(w.sample(t).1, fd_v, max_relative = 1e-7);
            assert_relative_eq!(w.sample(t).2, fd_a, max_relative = 1e-6);
        }
    }

    #[test]
    fn step_translation_window() {
        let w = TranslationWaveform::Step {
            acceleration: 0.5,
            start: 1.0,
            duration: 2.0,
        };
        assert_eq!(w.acceleration(0.999), 0.0);
        assert_eq!(w.acceleration(1.0), 0.5);
        assert_eq!(w.acceleration(2.999), 0.5);
        assert_eq!(w.acceleration(3.0), 0.0);
        assert!(w.violations().is_empty());
    }

    #[test]
    fn lean_examples() {
        let trunk = [LinkParams::new(47.5, 0.8, 0.35, 3.0)];
        let zero = voluntary_lean(SetPointMode::SpaceAngle, 0.0, 0.0, 2.0, &trunk, 9.81);
        assert_eq!(zero.trajectory.value(5.0), 0.0);
        assert!(zero.prediction.is_none());

        let lean = voluntary_lean(SetPointMode::SpaceAngle, 4.0 * DEG, 1.0, 2.0, &trunk, 9.81);
        assert_relative_eq!(lean.trajectory.value(3.0), 4.0 * DEG, epsilon = 1e-15);
        assert_relative_eq!(lean.trajectory.value(2.0), 2.0 * DEG, epsilon = 1e-15);
        assert_eq!(lean.trajectory.derivatives(3.0), (0.0, 0.0));
        let p = lean.prediction.unwrap();
        assert_relative_eq!(p.scale, 47.5 * 9.81 * 0.35, epsilon = 1e-9);
        assert_relative_eq!(p.torque(10.0), 47.5 * 9.81 * 0.35 * (4.0 * DEG).sin(), epsilon = 1e-9);
    }
}
