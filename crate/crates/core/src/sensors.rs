//! What the controller is allowed to see.
//!
//! Ground truth is taken from the plant each tick and routed through
//! per-channel transport delays and optional additive Gaussian noise.
//! Joint angles and velocities are delivered twice: once with the short
//! proprioceptive servo-loop delay and once with the longer delay of the
//! disturbance-estimation paths, so that down-channelling combines
//! vestibular and proprioceptive samples of the same instant.

use std::collections::VecDeque;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::chain::{ChainConfig, Vec2};
use crate::error::{Error, Result};
use crate::plant::{head_acceleration, PlantState, PlatformInput};

/// Fixed transport delay of `delay` ticks.
#[derive(Debug, Clone)]
pub struct DelayLine<T> {
    buffer: VecDeque<T>,
}

impl<T: Clone> DelayLine<T> {
    /// Pre-filled with `initial`, which is what the output reads until the
    /// first real sample has travelled through.
    pub fn new(delay: usize, initial: T) -> Self {
        let mut buffer = VecDeque::with_capacity(delay + 1);
        buffer.extend(std::iter::repeat_n(initial, delay));
        Self { buffer }
    }

    pub fn delay(&self) -> usize {
        self.buffer.len()
    }

    pub fn push(&mut self, sample: T) -> T {
        self.buffer.push_back(sample);
        self.buffer.pop_front().expect("buffer holds at least the new sample")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorFrame {
    pub head_space_angle: f64,
    pub head_space_velocity: f64,
    pub head_linear_acceleration: Vec2,
    /// Servo-loop proprioception.
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    /// Proprioception as seen by the disturbance estimators.
    pub dec_joint_angles: Vec<f64>,
    pub dec_joint_velocities: Vec<f64>,
    /// Measured joint torque (active plus passive).
    pub joint_torques: Vec<f64>,
    /// Efference copy of the commanded active torque.
    pub active_torques: Vec<f64>,
}

impl SensorFrame {
    pub fn zeros(n: usize) -> Self {
        Self {
            head_space_angle: 0.0,
            head_space_velocity: 0.0,
            head_linear_acceleration: Vec2::zeros(),
            joint_angles: vec![0.0; n],
            joint_velocities: vec![0.0; n],
            dec_joint_angles: vec![0.0; n],
            dec_joint_velocities: vec![0.0; n],
            joint_torques: vec![0.0; n],
            active_torques: vec![0.0; n],
        }
    }

    /// A noiseless, undelayed frame.
    pub fn from_truth(truth: &GroundTruth) -> Self {
        Self {
            head_space_angle: truth.head_space_angle,
            head_space_velocity: truth.head_space_velocity,
            head_linear_acceleration: truth.head_linear_acceleration,
            joint_angles: truth.joint_angles.clone(),
            joint_velocities: truth.joint_velocities.clone(),
            dec_joint_angles: truth.joint_angles.clone(),
            dec_joint_velocities: truth.joint_velocities.clone(),
            joint_torques: truth.joint_torques.clone(),
            active_torques: truth.active_torques.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.joint_angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joint_angles.is_empty()
    }
}

/// True kinematics and torques at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub head_space_angle: f64,
    pub head_space_velocity: f64,
    pub head_linear_acceleration: Vec2,
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub joint_torques: Vec<f64>,
    pub active_torques: Vec<f64>,
}

impl GroundTruth {
    /// `joint_acc` are the plant's joint accelerations at this instant;
    /// `active` and `passive` the torques acting at the joints.
    pub fn capture(
        config: &ChainConfig,
        state: &PlantState,
        platform: &PlatformInput,
        joint_acc: &[f64],
        active: &[f64],
        passive: &[f64],
    ) -> Self {
        let space = state.space_angles(platform.tilt);
        let omega = state.space_velocities(platform.tilt_velocity);
        Self {
            head_space_angle: *space.last().unwrap_or(&platform.tilt),
            head_space_velocity: *omega.last().unwrap_or(&platform.tilt_velocity),
            head_linear_acceleration: head_acceleration(config, state, joint_acc, platform),
            joint_angles: state.joint_angles.clone(),
            joint_velocities: state.joint_velocities.clone(),
            joint_torques: active.iter().zip(passive).map(|(a, p)| a + p).collect(),
            active_torques: active.to_vec(),
        }
    }
}

/// Delays in ticks per channel class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensorDelays {
    pub proprioceptive: usize,
    pub vestibular: usize,
    pub dec_proprioceptive: usize,
    pub torque: usize,
}

impl SensorDelays {
    pub const NONE: SensorDelays = SensorDelays {
        proprioceptive: 0,
        vestibular: 0,
        dec_proprioceptive: 0,
        torque: 0,
    };

    /// Servo loop sees proprioception after `proprioceptive_s`; every
    /// disturbance-estimation path sees its inputs after `lumped_s`.
    pub fn from_seconds(proprioceptive_s: f64, lumped_s: f64, dt: f64) -> Self {
        let ticks = |s: f64| (s / dt).round().max(0.0) as usize;
        let lumped = ticks(lumped_s);
        Self {
            proprioceptive: ticks(proprioceptive_s),
            vestibular: lumped,
            dec_proprioceptive: lumped,
            torque: lumped,
        }
    }
}

/// Standard deviations of additive Gaussian noise, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    pub head_angle: f64,
    pub head_velocity: f64,
    pub head_acceleration: f64,
    pub joint_angle: f64,
    pub joint_velocity: f64,
    pub torque: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Vestibular,
    Proprioceptive,
    Torque,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vestibular" => Ok(Channel::Vestibular),
            "proprioceptive" | "proprioception" => Ok(Channel::Proprioceptive),
            "torque" => Ok(Channel::Torque),
            _ => Err(Error::UnknownChannel(s.to_string())),
        }
    }
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Vestibular => "vestibular",
            Channel::Proprioceptive => "proprioceptive",
            Channel::Torque => "torque",
        }
    }
}

pub fn parse_channels<S: AsRef<str>>(names: &[S]) -> Result<Vec<Channel>> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}

/// Zeroes the listed channels. The efference copy is central, not sensed,
/// and survives torque ablation.
pub fn ablate(frame: &SensorFrame, which: &[Channel]) -> SensorFrame {
    let mut out = frame.clone();
    for ch in which {
        match ch {
            Channel::Vestibular => {
                out.head_space_angle = 0.0;
                out.head_space_velocity = 0.0;
                out.head_linear_acceleration = Vec2::zeros();
            }
            Channel::Proprioceptive => {
                for v in out
                    .joint_angles
                    .iter_mut()
                    .chain(out.joint_velocities.iter_mut())
                    .chain(out.dec_joint_angles.iter_mut())
                    .chain(out.dec_joint_velocities.iter_mut())
                {
                    *v = 0.0;
                }
            }
            Channel::Torque => out.joint_torques.iter_mut().for_each(|v| *v = 0.0),
        }
    }
    out
}

type Vestibular = (f64, f64, Vec2);
type Proprio = (Vec<f64>, Vec<f64>);

/// Per-run sensor pipeline.
#[derive(Debug, Clone)]
pub struct Sensors {
    vestibular: DelayLine<Vestibular>,
    proprio: DelayLine<Proprio>,
    dec_proprio: DelayLine<Proprio>,
    torque: DelayLine<Proprio>,
    noise: NoiseConfig,
    rng: ChaCha8Rng,
    ablated: Vec<Channel>,
}

impl Sensors {
    /// Delay lines are pre-filled with `initial`.
    pub fn new(delays: SensorDelays, noise: NoiseConfig, ablated: Vec<Channel>, initial: &GroundTruth) -> Self {
        let proprio = (initial.joint_angles.clone(), initial.joint_velocities.clone());
        Self {
            vestibular: DelayLine::new(
                delays.vestibular,
                (
                    initial.head_space_angle,
                    initial.head_space_velocity,
                    initial.head_linear_acceleration,
                ),
            ),
            proprio: DelayLine::new(delays.proprioceptive, proprio.clone()),
            dec_proprio: DelayLine::new(delays.dec_proprioceptive, proprio),
            torque: DelayLine::new(
                delays.torque,
                (initial.joint_torques.clone(), initial.active_torques.clone()),
            ),
            rng: ChaCha8Rng::seed_from_u64(noise.seed),
            noise,
            ablated,
        }
    }

    pub fn read(&mut self, truth: &GroundTruth) -> SensorFrame {
        let (angle, velocity, acc) = self.vestibular.push((
            truth.head_space_angle,
            truth.head_space_velocity,
            truth.head_linear_acceleration,
        ));
        let (qa, qv) = self
            .proprio
            .push((truth.joint_angles.clone(), truth.joint_velocities.clone()));
        let (dqa, dqv) = self
            .dec_proprio
            .push((truth.joint_angles.clone(), truth.joint_velocities.clone()));
        let (torques, active) = self
            .torque
            .push((truth.joint_torques.clone(), truth.active_torques.clone()));

        let mut frame = SensorFrame {
            head_space_angle: angle,
            head_space_velocity: velocity,
            head_linear_acceleration: acc,
            joint_angles: qa,
            joint_velocities: qv,
            dec_joint_angles: dqa,
            dec_joint_velocities: dqv,
            joint_torques: torques,
            active_torques: active,
        };
        self.add_noise(&mut frame);
        if self.ablated.is_empty() {
            frame
        } else {
            ablate(&frame, &self.ablated)
        }
    }

    fn add_noise(&mut self, f: &mut SensorFrame) {
        let n = self.noise;
        let rng = &mut self.rng;
        let mut perturb = |v: &mut f64, sd: f64| {
            if sd > 0.0 {
                *v += Normal::new(0.0, sd).expect("finite sd").sample(rng);
            }
        };
        perturb(&mut f.head_space_angle, n.head_angle);
        perturb(&mut f.head_space_velocity, n.head_velocity);
        perturb(&mut f.head_linear_acceleration.x, n.head_acceleration);
        perturb(&mut f.head_linear_acceleration.y, n.head_acceleration);
        for v in f.joint_angles.iter_mut().chain(f.dec_joint_angles.iter_mut()) {
            perturb(v, n.joint_angle);
        }
        for v in f.joint_velocities.iter_mut().chain(f.dec_joint_velocities.iter_mut()) {
            perturb(v, n.joint_velocity);
        }
        for v in f.joint_torques.iter_mut() {
            perturb(v, n.torque);
        }
    }
}
