use crate::chain::{axis, moment, LinkParams, Vec2};
use crate::error::{Error, Result};

use super::network::DownMsg;
use super::EstimatorParams;

/// Continuous dead band: `sign(x) * max(0, |x| - threshold)`.
#[inline]
pub fn dead_band(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// Processed support-tilt estimate, integrated from the difference of the
/// supported link's space velocity and its joint velocity.
#[derive(Debug, Clone, Default)]
pub struct TiltEstimator {
    estimate: f64,
}

impl TiltEstimator {
    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn update(&mut self, link_space_velocity: f64, joint_velocity: f64, params: &EstimatorParams, dt: f64) -> f64 {
        let rate = link_space_velocity - joint_velocity;
        self.estimate += params.tilt_gain * dead_band(rate, params.tilt_threshold) * dt;
        self.estimate
    }
}

/// Space angle of the supporting link from the space angle of the link
/// above and the joint between them.
#[inline]
pub fn down_channel(space_angle_above: f64, joint_angle: f64) -> f64 {
    space_angle_above - joint_angle
}

/// COM of this link plus everything above, relative to this module's joint,
/// and the total mass.
pub fn aggregate_com(down: Option<&DownMsg>, link: &LinkParams, space_angle: f64) -> (Vec2, f64) {
    let u = axis(space_angle);
    let own = link.mass * link.com_distance * u;
    match down {
        None => (own / link.mass, link.mass),
        Some(d) => {
            let mass = d.mass_above + link.mass;
            let above = d.mass_above * (d.com_above + link.length * u);
            ((above + own) / mass, mass)
        }
    }
}

/// Inertia of this link plus everything above about the combined COM
/// (`J*`, passed down) and about this module's joint.
pub fn aggregate_inertia(
    down: Option<&DownMsg>,
    link: &LinkParams,
    space_angle: f64,
    com_self: (Vec2, f64),
) -> (f64, f64) {
    let (com, mass) = com_self;
    let u = axis(space_angle);
    let mut star = link.inertia_about_com + link.mass * (link.com_distance * u - com).norm_squared();
    if let Some(d) = down {
        let above = link.length * u + d.com_above;
        star += d.inertia_above + d.mass_above * (above - com).norm_squared();
    }
    (star, star + mass * com.norm_squared())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityEstimate {
    /// N·m, positive when pulling forward.
    pub torque: f64,
    /// Torque divided by `m g com_y`.
    pub angle_equivalent: f64,
}

pub fn estimate_gravity(com: Vec2, mass: f64, gravity: f64, params: &EstimatorParams) -> Result<GravityEstimate> {
    if com.y <= 0.0 {
        return Err(Error::DegenerateGeometry {
            module: 0,
            com_y: com.y,
        });
    }
    let lean = dead_band(com.x, params.gravity_threshold * com.norm());
    let torque = mass * gravity * lean * params.gravity_gain;
    Ok(GravityEstimate {
        torque,
        angle_equivalent: torque / (mass * gravity * com.y),
    })
}

/// Combines a predicted disturbance with the sensed one. The prediction is
/// used as-is (unity gain, no dead band); only the part of the sensed
/// estimate it failed to explain goes through threshold and gain. The
/// sensed sample is delayed, so it is compared with the prediction for the
/// same instant.
pub fn fuse_prediction(sensed: f64, predicted_now: f64, predicted_at_sample: f64, threshold: f64, gain: f64) -> f64 {
    predicted_now + gain * dead_band(sensed - predicted_at_sample, threshold)
}

/// Central second difference of `axis(angle)` over the last three samples.
#[derive(Debug, Clone, Default)]
pub struct SecondDifference {
    history: [Option<Vec2>; 3],
}

impl SecondDifference {
    /// Returns the second derivative at the previous sample once three
    /// samples are available.
    pub fn push(&mut self, angle: f64, dt: f64) -> Option<Vec2> {
        self.history = [self.history[1], self.history[2], Some(axis(angle))];
        match self.history {
            [Some(a), Some(b), Some(c)] => Some((c - 2.0 * b + a) / (dt * dt)),
            _ => None,
        }
    }
}

/// Acceleration of this module's joint relative to the head point produced
/// by the rotation of the links in between: `a_above + L * d²/dt² axis(a)`.
pub fn estimate_self_acceleration(above: Vec2, length: f64, axis_second_derivative: Option<Vec2>) -> Vec2 {
    match axis_second_derivative {
        Some(d2) => above + length * d2,
        None => Vec2::zeros(),
    }
}

/// The part of the vestibular head acceleration not explained by the
/// body's own joint rotations.
#[inline]
pub fn estimate_external_acceleration(vestibular: Vec2, self_acceleration: Vec2) -> Vec2 {
    vestibular - self_acceleration
}

/// Torque about the joint from the inertial pseudo-force `-m a` acting at
/// the COM. Equals `-m h a cos(a)` for a single link.
#[inline]
pub fn inertial_torque(external_acceleration: Vec2, com: Vec2, mass: f64) -> f64 {
    -mass * moment(&com, &external_acceleration)
}

/// First-order low-pass, discretised with backward Euler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LowPass<T> {
    value: T,
}

impl<T> LowPass<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::AddAssign,
{
    pub fn value(&self) -> T {
        self.value
    }

    pub fn update(&mut self, x: T, cutoff_hz: f64, dt: f64) -> T {
        let tau = 1.0 / (std::f64::consts::TAU * cutoff_hz);
        self.value += (x - self.value) * (dt / (tau + dt));
        self.value
    }
}

/// Inputs of the contact-torque estimate for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtTorqueInputs {
    /// Commanded active torque (efference copy).
    pub active: f64,
    pub passive: f64,
    pub gravity: f64,
    /// Torque of the pseudo-force from the joint's own acceleration.
    pub inertial: f64,
    /// Angular momentum of the supported links about the joint, measured
    /// relative to the joint.
    pub angular_momentum: f64,
}

/// Contact-torque estimator: the residual of the torque balance of the
/// supported links about their (accelerating) joint, with the momentum
/// rate finite-differenced.
#[derive(Debug, Clone, Default)]
pub struct ExtTorqueEstimator {
    filtered: LowPass<f64>,
    previous_momentum: Option<f64>,
}

impl ExtTorqueEstimator {
    pub fn estimate(&self) -> f64 {
        self.filtered.value()
    }

    /// Returns `(raw, processed)`.
    pub fn update(&mut self, inputs: &ExtTorqueInputs, params: &EstimatorParams, dt: f64) -> (f64, f64) {
        let momentum = inputs.angular_momentum;
        let rate = self.previous_momentum.map_or(0.0, |p| (momentum - p) / dt);
        self.previous_momentum = Some(momentum);
        let raw = rate - inputs.active - inputs.passive - inputs.gravity - inputs.inertial;
        let x = params.ext_torque_gain * dead_band(raw, params.ext_torque_threshold);
        (raw, self.filtered.update(x, params.ext_torque_lowpass_cutoff, dt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{com_of_subchain_oracle, inertia_of_subchain_oracle, ChainConfig, ChainPose};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    #[test]
    fn dead_band_examples() {
        assert_eq!(dead_band(0.0, 0.3), 0.0);
        assert_eq!(dead_band(0.1, 0.3), 0.0);
        assert_eq!(dead_band(-0.29, 0.3), 0.0);
        assert_relative_eq!(dead_band(0.5 * DEG, 0.18 * DEG), 0.32 * DEG, epsilon = 1e-15);
        assert_relative_eq!(dead_band(-0.5 * DEG, 0.18 * DEG), -0.32 * DEG, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn dead_band_is_odd_monotone_continuous(x in -10.0f64..10.0, y in -10.0f64..10.0, t in 0.0f64..5.0) {
            prop_assert_eq!(dead_band(-x, t), -dead_band(x, t));
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(dead_band(lo, t) <= dead_band(hi, t));
            // 1-Lipschitz, hence continuous
            prop_assert!((dead_band(x, t) - dead_band(y, t)).abs() <= (x - y).abs() + 1e-15);
            prop_assert_eq!(dead_band(x, t) == 0.0, x.abs() <= t);
        }
    }

    #[test]
    fn tilt_estimate_still_platform() {
        let p = EstimatorParams::default();
        let mut est = TiltEstimator::default();
        for _ in 0..1000 {
            est.update(0.0, 0.0, &p, 1e-3);
        }
        assert_eq!(est.estimate(), 0.0);
    }

    #[test]
    fn tilt_estimate_velocity_step() {
        let p = EstimatorParams::default();
        let mut est = TiltEstimator::default();
        // platform turning at 1 deg/s with the body upright: link space
        // velocity 0, joint velocity -1 deg/s
        for _ in 0..1000 {
            est.update(0.0, -DEG, &p, 1e-3);
        }
        assert_relative_eq!(est.estimate(), 0.75 * (1.0 - 0.18) * DEG, epsilon = 1e-12);
    }

    #[test]
    fn tilt_estimate_undercompensates_sinusoid() {
        let p = EstimatorParams::default();
        let (amp, f, dt) = (4.0 * DEG, 0.08, 1e-3);
        let w = 2.0 * std::f64::consts::PI * f;
        let mut est = TiltEstimator::default();
        let mut peak: f64 = 0.0;
        for k in 0..(5.0 / f / dt) as usize {
            let t = k as f64 * dt;
            est.update(amp * w * (w * t).cos(), 0.0, &p, dt);
            peak = peak.max(est.estimate().abs());
        }
        assert!(peak > 0.0 && peak < amp, "peak {}", peak / DEG);
    }

    #[test]
    fn down_channel_examples() {
        assert_eq!(down_channel(0.3, 0.0), 0.3);
        let head = 5.0 * DEG;
        let base = down_channel(down_channel(head, 3.0 * DEG), 2.0 * DEG);
        assert_relative_eq!(base, 0.0, epsilon = 1e-15);
    }

    fn msg(com_above: Vec2, mass_above: f64, inertia_above: f64) -> DownMsg {
        DownMsg {
            com_above,
            mass_above,
            inertia_above,
            ..DownMsg::default()
        }
    }

    #[test]
    fn aggregate_com_examples() {
        let link = LinkParams::new(3.0, 1.0, 0.4, 0.0);
        let (c, m) = aggregate_com(None, &link, 0.0);
        assert_relative_eq!(c, Vec2::new(0.0, 0.4));
        assert_eq!(m, 3.0);
        let above = msg(c, m, 0.0);
        let (c2, m2) = aggregate_com(Some(&above), &link, 0.0);
        assert_relative_eq!(c2.y, (0.4 + 1.0 + 0.4) / 2.0, epsilon = 1e-15);
        assert_eq!(c2.x, 0.0);
        assert_eq!(m2, 6.0);
    }

    #[test]
    fn aggregate_inertia_examples() {
        let link = LinkParams::new(1.0, 1.0, 0.5, 0.1);
        let com = aggregate_com(None, &link, 0.3);
        let (star, up) = aggregate_inertia(None, &link, 0.3, com);
        assert_relative_eq!(star, 0.1, epsilon = 1e-15);
        assert_relative_eq!(up, 0.35, epsilon = 1e-15);

        // point masses at 0.7 and 1.0 + 0.4 on a vertical chain
        let (m, d1, l1, d2) = (2.0, 0.7, 1.0, 0.4);
        let top = LinkParams::new(m, 1.0, d2, 0.0);
        let bottom = LinkParams::new(m, l1, d1, 0.0);
        let c_top = aggregate_com(None, &top, 0.0);
        let (s_top, _) = aggregate_inertia(None, &top, 0.0, c_top);
        let down = msg(c_top.0, c_top.1, s_top);
        let c = aggregate_com(Some(&down), &bottom, 0.0);
        let (_, up) = aggregate_inertia(Some(&down), &bottom, 0.0, c);
        assert_relative_eq!(up, m * d1 * d1 + m * (l1 + d2) * (l1 + d2), epsilon = 1e-12);
    }

    /// Runs the down-pass recursion over a whole chain.
    fn recursive(config: &ChainConfig, pose: &ChainPose) -> Vec<(Vec2, f64, f64, f64)> {
        let n = config.len();
        let mut out = vec![(Vec2::zeros(), 0.0, 0.0, 0.0); n];
        let mut down: Option<DownMsg> = None;
        for k in (0..n).rev() {
            let link = &config.links[k];
            let a = pose.space_angles[k];
            let com = aggregate_com(down.as_ref(), link, a);
            let (star, up) = aggregate_inertia(down.as_ref(), link, a, com);
            out[k] = (com.0, com.1, star, up);
            down = Some(msg(com.0, com.1, star));
        }
        out
    }

    proptest! {
        #[test]
        fn recursion_matches_brute_force(
            links in prop::collection::vec((0.1f64..50.0, 0.1f64..1.0, 0.0f64..1.0, 0.0f64..3.0), 1..=6),
            seed_angles in prop::collection::vec(-0.8f64..0.8, 6),
            tilt in -0.3f64..0.3,
        ) {
            let links: Vec<_> = links.into_iter().map(|(m, l, f, j)| LinkParams::new(m, l, f * l, j)).collect();
            let n = links.len();
            let config = ChainConfig::new(links);
            let pose = ChainPose { space_angles: seed_angles[..n].to_vec(), base_tilt: tilt, base_position: 0.0 };
            let rec = recursive(&config, &pose);
            for (k, r) in rec.iter().enumerate() {
                let (com, mass) = com_of_subchain_oracle(&config, &pose, k).unwrap();
                let (j_joint, j_com) = inertia_of_subchain_oracle(&config, &pose, k).unwrap();
                prop_assert!((r.0 - com).norm() < 1e-9);
                prop_assert!((r.1 - mass).abs() < 1e-12);
                prop_assert!((r.2 - j_com).abs() <= 1e-9 * j_com.max(1e-12));
                prop_assert!((r.3 - j_joint).abs() <= 1e-9 * j_joint);
            }
        }
    }

    #[test]
    fn gravity_examples() {
        let p = EstimatorParams::default();
        let g = estimate_gravity(Vec2::new(0.0, 0.9), 70.0, 9.81, &p).unwrap();
        assert_eq!(g.torque, 0.0);

        let a = 4.0 * DEG;
        let g = estimate_gravity(0.9 * Vec2::new(a.sin(), a.cos()), 70.0, 9.81, &p).unwrap();
        assert_relative_eq!(g.torque, 70.0 * 9.81 * 0.9 * a.sin(), epsilon = 1e-12);
        assert!((g.torque - 43.1).abs() < 0.05, "{}", g.torque);
        let linear = 70.0 * 9.81 * 0.9 * a;
        assert!((linear - g.torque).abs() / g.torque < 1e-3);
        assert_relative_eq!(g.angle_equivalent, a.tan(), epsilon = 1e-12);

        assert!(matches!(
            estimate_gravity(Vec2::new(0.1, -0.2), 1.0, 9.81, &p),
            Err(Error::DegenerateGeometry { .. })
        ));
    }

    #[test]
    fn gravity_threshold_and_gain() {
        let p = EstimatorParams {
            gravity_threshold: 1.0 * DEG,
            gravity_gain: 0.5,
            ..Default::default()
        };
        let small = 0.5 * DEG;
        let g = estimate_gravity(Vec2::new(small.sin(), small.cos()), 10.0, 9.81, &p).unwrap();
        assert_eq!(g.torque, 0.0);
    }

    #[test]
    fn prediction_fusion() {
        // perfect prediction leaves nothing for the sensed path
        assert_eq!(fuse_prediction(3.0, 5.0, 3.0, 0.0, 0.6), 5.0);
        // without prediction the sensed value passes with gain
        assert_relative_eq!(fuse_prediction(3.0, 0.0, 0.0, 0.0, 0.6), 1.8);
        assert_eq!(fuse_prediction(0.1, 0.0, 0.0, 0.2, 1.0), 0.0);
    }

    #[test]
    fn self_acceleration_examples() {
        let dt = 1e-3;
        let mut d = SecondDifference::default();
        assert!(d.push(0.2, dt).is_none());
        assert!(d.push(0.2, dt).is_none());
        let d2 = d.push(0.2, dt);
        assert_eq!(estimate_self_acceleration(Vec2::zeros(), 1.0, d2), Vec2::zeros());
        assert_eq!(
            estimate_self_acceleration(Vec2::new(1.0, 1.0), 1.0, None),
            Vec2::zeros()
        );

        // constant spin through the upright position
        let (w, l) = (0.8, 0.9);
        let mut d = SecondDifference::default();
        let mut last = None;
        for k in -1..=1 {
            last = d.push(w * k as f64 * dt, dt);
        }
        let a = estimate_self_acceleration(Vec2::zeros(), l, last);
        assert!(a.x.abs() < 1e-12);
        assert_relative_eq!(a.y, -l * w * w, max_relative = 1e-6);
    }

    #[test]
    fn second_difference_matches_analytic_on_sinusoid() {
        let (amp, w, dt) = (0.1, 2.0 * std::f64::consts::PI * 0.5, 1e-3);
        let angle = |t: f64| amp * (w * t).sin();
        let mut d = SecondDifference::default();
        let mut worst: f64 = 0.0;
        for k in 0..2000 {
            let t = k as f64 * dt;
            if let Some(d2) = d.push(angle(t), dt) {
                let tm = t - dt;
                let (a, v, acc) = (angle(tm), amp * w * (w * tm).cos(), -amp * w * w * (w * tm).sin());
                let exact = Vec2::new(acc * a.cos() - v * v * a.sin(), -acc * a.sin() - v * v * a.cos());
                worst = worst.max((d2 - exact).norm() / exact.norm().max(1e-3));
            }
        }
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn external_acceleration_examples() {
        let a = Vec2::new(0.3, -0.2);
        assert_eq!(estimate_external_acceleration(a, a), Vec2::zeros());

        // single link upright on a platform accelerating at 0.5 m/s²
        let (m, h, acc) = (70.0, 0.9, 0.5);
        let ext = estimate_external_acceleration(Vec2::new(acc, 0.0), Vec2::zeros());
        let t = inertial_torque(ext, Vec2::new(0.0, h), m);
        assert_relative_eq!(t, -acc * m * h, epsilon = 1e-12);
    }

    #[test]
    fn low_pass_settles_and_attenuates() {
        let mut f = LowPass::<f64>::default();
        for _ in 0..5000 {
            f.update(2.0, 1.0, 1e-3);
        }
        assert_relative_eq!(f.value(), 2.0, max_relative = 1e-9);

        let mut f = LowPass::<Vec2>::default();
        let mut peak: f64 = 0.0;
        for k in 0..20000 {
            let x = (std::f64::consts::TAU * 20.0 * k as f64 * 1e-3).sin();
            peak = peak.max(f.update(Vec2::new(x, 0.0), 1.0, 1e-3).x.abs());
        }
        assert!(peak < 0.1, "{peak}");
    }

    #[test]
    fn external_torque_static_balance() {
        let p = EstimatorParams {
            ext_torque_lowpass_cutoff: 1e6,
            ..Default::default()
        };
        let mut est = ExtTorqueEstimator::default();
        let gravity = 40.0;
        let passive = -6.0;
        let inputs = ExtTorqueInputs {
            active: -gravity - passive,
            passive,
            gravity,
            inertial: 0.0,
            angular_momentum: 0.0,
        };
        for _ in 0..10 {
            let (raw, out) = est.update(&inputs, &p, 1e-3);
            assert_eq!(raw, 0.0);
            assert_eq!(out, 0.0);
        }
    }

    #[test]
    fn external_torque_filters_a_constant_residual() {
        let p = EstimatorParams::default();
        let mut est = ExtTorqueEstimator::default();
        let inputs = ExtTorqueInputs {
            active: -10.0,
            ..Default::default()
        };
        let mut out = 0.0;
        for _ in 0..5000 {
            out = est.update(&inputs, &p, 1e-3).1;
        }
        assert_relative_eq!(out, 0.5 * 10.0, max_relative = 1e-6);
    }
}
