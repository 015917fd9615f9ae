use serde::{Deserialize, Serialize};

/// What a module's servo regulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetPointMode {
    /// Orientation in space of the COM of all links above the joint.
    SpaceAngle,
    /// Horizontal offset of that COM from the joint, m.
    ComPosition,
    /// Joint angle.
    JointAngle,
}

/// Time course of a set point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trajectory {
    Constant(f64),
    /// Fifth-order minimum-jerk transition starting at `start_time`.
    MinimumJerk {
        from: f64,
        to: f64,
        start_time: f64,
        duration: f64,
    },
}

impl Trajectory {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Trajectory::Constant(v) => v,
            Trajectory::MinimumJerk {
                from,
                to,
                start_time,
                duration,
            } => {
                let s = ((t - start_time) / duration).clamp(0.0, 1.0);
                from + (to - from) * s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
            }
        }
    }

    /// First and second time derivatives.
    pub fn derivatives(&self, t: f64) -> (f64, f64) {
        match *self {
            Trajectory::Constant(_) => (0.0, 0.0),
            Trajectory::MinimumJerk {
                from,
                to,
                start_time,
                duration,
            } => {
                let s = (t - start_time) / duration;
                if !(0.0..=1.0).contains(&s) {
                    return (0.0, 0.0);
                }
                let d = to - from;
                let v = d * 30.0 * s * s * (1.0 - s) * (1.0 - s) / duration;
                let a = d * 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (duration * duration);
                (v, a)
            }
        }
    }
}

/// Predicted self-produced gravity disturbance, `scale * sin(angle(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// N·m, `m g |COM|` of the moving body.
    pub scale: f64,
    pub angle: Trajectory,
}

impl Prediction {
    pub fn torque(&self, t: f64) -> f64 {
        self.scale * self.angle.value(t).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetPoint {
    pub mode: SetPointMode,
    pub trajectory: Trajectory,
    pub prediction: Option<Prediction>,
}

impl SetPoint {
    pub fn constant(mode: SetPointMode, value: f64) -> Self {
        Self {
            mode,
            trajectory: Trajectory::Constant(value),
            prediction: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimum_jerk_boundaries() {
        let t = Trajectory::MinimumJerk {
            from: 0.0,
            to: 4.0,
            start_time: 1.0,
            duration: 2.0,
        };
        assert_eq!(t.value(0.0), 0.0);
        assert_eq!(t.value(3.0), 4.0);
        assert_eq!(t.value(10.0), 4.0);
        assert_relative_eq!(t.value(2.0), 2.0, epsilon = 1e-12);
        assert_eq!(t.derivatives(3.0), (0.0, 0.0));
        assert_eq!(t.derivatives(1.0), (0.0, 0.0));
        // velocity matches a finite difference of the position
        let h = 1e-6;
        let fd = (t.value(1.7 + h) - t.value(1.7 - h)) / (2.0 * h);
        assert_relative_eq!(t.derivatives(1.7).0, fd, max_relative = 1e-6);
        let fd2 = (t.derivatives(1.7 + h).0 - t.derivatives(1.7 - h).0) / (2.0 * h);
        assert_relative_eq!(t.derivatives(1.7).1, fd2, max_relative = 1e-5);
    }
}
