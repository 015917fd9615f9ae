//! Experiment definition, co-simulation of plant and control network, and
//! post-run metrics.

mod metrics;
mod waveform;

pub use metrics::{compute_metrics, AnalysisSettings, RunMetrics};
pub use waveform::{sinusoid_tilt, voluntary_lean, ForceEvent, Platform, TiltWaveform, TranslationWaveform};

use crate::chain::{com_of_subchain_oracle, ChainConfig, ChainPose};
use crate::dec::{DecNetwork, EstimatorFlags, EstimatorParams, ModuleConfig, ModuleDiagnostics, ServoParams, SetPoint};
use crate::error::{Error, Result};
use crate::plant::{self, ExternalForce, JointInputs, PlantState, PlatformInput, PlatformMotion};
use crate::sensors::{Channel, GroundTruth, NoiseConfig, SensorDelays, Sensors};

/// Controller settings of one joint; the link model is taken from the
/// chain when the network is built.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerSettings {
    pub servo: ServoParams,
    pub estimator: EstimatorParams,
    pub flags: EstimatorFlags,
    pub setpoint: SetPoint,
}

/// Transport delays, s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySettings {
    /// Local servo loop.
    pub proprioceptive: f64,
    /// Every disturbance-estimation path.
    pub lumped: f64,
}

impl Default for DelaySettings {
    fn default() -> Self {
        Self {
            proprioceptive: 0.060,
            lumped: 0.180,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub chain: ChainConfig,
    /// s
    pub duration: f64,
    /// Plant and control step, s.
    pub dt: f64,
    pub platform: Platform,
    pub forces: Vec<ForceEvent>,
    /// One per joint, lowest first.
    pub controllers: Vec<ControllerSettings>,
    pub delays: DelaySettings,
    pub noise: NoiseConfig,
    pub ablated_channels: Vec<Channel>,
    pub initial_joint_angles: Vec<f64>,
    pub analysis: AnalysisSettings,
}

/// Default servo for every joint of `chain`: `kp = m g c_y` of the links the
/// joint supports in the upright pose, and the default integral, derivative
/// and share settings.
pub fn default_servos(chain: &ChainConfig) -> Vec<ServoParams> {
    let pose = ChainPose::upright(chain.len());
    (0..chain.len())
        .map(|k| {
            let (com, mass) = com_of_subchain_oracle(chain, &pose, k).expect("index in range");
            ServoParams::for_load(mass, com.y, chain.gravity)
        })
        .collect()
}

/// Sets each link's intrinsic impedance to the passive share of its joint's
/// servo gains, scaled by `factors` (1 for a standard joint).
pub fn apply_passive_impedance(chain: &mut ChainConfig, servos: &[ServoParams], factors: &[f64]) {
    for ((link, servo), f) in chain.links.iter_mut().zip(servos).zip(factors) {
        link.passive_stiffness = servo.passive_share * servo.kp * f;
        link.passive_damping = servo.passive_share * servo.kd * f;
    }
}

impl ScenarioConfig {
    /// Quiet stance of `chain` with default controllers in space-angle mode
    /// using `flags` at every joint. Passive impedance is derived from the
    /// servo gains.
    pub fn quiet(name: &str, mut chain: ChainConfig, duration: f64, flags: EstimatorFlags) -> Self {
        let servos = default_servos(&chain);
        let n = chain.len();
        apply_passive_impedance(&mut chain, &servos, &vec![1.0; n]);
        Self {
            name: name.to_string(),
            controllers: servos
                .into_iter()
                .map(|servo| ControllerSettings {
                    servo,
                    estimator: EstimatorParams::default(),
                    flags,
                    setpoint: SetPoint::constant(crate::dec::SetPointMode::SpaceAngle, 0.0),
                })
                .collect(),
            chain,
            duration,
            dt: 1e-3,
            platform: Platform::default(),
            forces: vec![],
            delays: DelaySettings::default(),
            noise: NoiseConfig::default(),
            ablated_channels: vec![],
            initial_joint_angles: vec![0.0; n],
            analysis: AnalysisSettings::default(),
        }
    }

    /// Every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.chain.violations();
        let n = self.chain.len();
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            v.push(format!("duration_s must be >= 0 (got {})", self.duration));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            v.push(format!("dt_s must be > 0 (got {})", self.dt));
        }
        v.extend(self.platform.tilt.violations());
        v.extend(self.platform.translation.violations());
        if self.controllers.len() != n {
            v.push(format!(
                "expected {n} module sections, one per joint (got {})",
                self.controllers.len()
            ));
        }
        for (k, c) in self.controllers.iter().enumerate() {
            let label = format!("module[{}]", k + 1);
            v.extend(c.servo.violations(&label));
            v.extend(c.estimator.violations(&label));
        }
        if self.initial_joint_angles.len() != n {
            v.push(format!(
                "initial joint angles: expected {n} values (got {})",
                self.initial_joint_angles.len()
            ));
        }
        for (i, f) in self.forces.iter().enumerate() {
            let label = format!("force[{}]", i + 1);
            if f.force.link >= n {
                v.push(format!("{label}.link {} out of range 1..={n}", f.force.link + 1));
            } else {
                let len = self.chain.links[f.force.link].length;
                if !(0.0..=len).contains(&f.force.application_height) {
                    v.push(format!(
                        "{label}.height_m {} outside link (length {len})",
                        f.force.application_height
                    ));
                }
            }
            if !f.force.horizontal_force.is_finite() {
                v.push(format!("{label}.force_n must be finite"));
            }
            if !(f.start.is_finite() && f.start >= 0.0) {
                v.push(format!("{label}.start_s must be >= 0"));
            }
            if !(f.duration > 0.0) {
                v.push(format!("{label}.duration_s must be > 0"));
            }
        }
        if !(self.delays.proprioceptive >= 0.0 && self.delays.lumped >= 0.0) {
            v.push("sensor delays must be >= 0".to_string());
        }
        let sds = [
            self.noise.head_angle,
            self.noise.head_velocity,
            self.noise.head_acceleration,
            self.noise.joint_angle,
            self.noise.joint_velocity,
            self.noise.torque,
        ];
        if sds.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            v.push("noise standard deviations must be finite and >= 0".to_string());
        }
        v.extend(self.analysis.violations());
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub fn ticks(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn sensor_delays(&self) -> SensorDelays {
        SensorDelays::from_seconds(self.delays.proprioceptive, self.delays.lumped, self.dt)
    }

    pub fn network(&self) -> DecNetwork {
        let modules = self
            .chain
            .links
            .iter()
            .zip(&self.controllers)
            .map(|(link, c)| ModuleConfig {
                link: link.clone(),
                servo: c.servo,
                estimator: c.estimator,
                flags: c.flags,
                setpoint: c.setpoint,
            })
            .collect();
        DecNetwork::new(modules, self.chain.gravity, self.dt, self.sensor_delays().vestibular)
    }

    /// Same scenario with every module's estimator flags replaced.
    pub fn with_flags(&self, flags: &[EstimatorFlags]) -> Self {
        let mut out = self.clone();
        for (c, f) in out.controllers.iter_mut().zip(flags) {
            c.flags = *f;
        }
        out
    }
}

/// One logged control tick.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub time: f64,
    pub platform: PlatformInput,
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub space_angles: Vec<f64>,
    pub active_torques: Vec<f64>,
    pub passive_torques: Vec<f64>,
    /// Whole-body COM relative to the lowest joint, horizontal, m.
    pub com_x: f64,
    pub base_tilt_estimate: f64,
    pub modules: Vec<ModuleDiagnostics>,
}

/// Every tick of one run, at fixed spacing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub links: usize,
    pub dt: f64,
    pub records: Vec<LogRecord>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub time: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub name: String,
    pub log: TrajectoryLog,
    pub metrics: RunMetrics,
    pub divergence: Option<Divergence>,
}

impl RunOutcome {
    pub fn is_stable(&self) -> bool {
        self.divergence.is_none() && self.metrics.stable
    }
}

/// Runs one experiment to completion or divergence.
///
/// Each tick samples the plant's ground truth, passes it through the sensor
/// pipeline, evaluates the control network, logs, and advances the plant by
/// one RK4 step with the new torques held. The head acceleration in the
/// ground truth uses the torques of the previous tick, which is what acts on
/// the body at that instant.
pub fn run_experiment(config: &ScenarioConfig) -> Result<RunOutcome> {
    config.validate()?;
    let chain = &config.chain;
    let n = chain.len();
    let dt = config.dt;
    let ticks = config.ticks();
    let platform = config.platform;
    let divergence_limit = config.analysis.divergence_limit;

    let mut network = config.network();
    let mut state = PlantState::at_rest(config.initial_joint_angles.clone());
    let mut active = vec![0.0; n];
    let mut forces: Vec<ExternalForce> = Vec::with_capacity(config.forces.len());

    let truth_at =
        |state: &PlantState, active: &[f64], passive: &[f64], forces: &[ExternalForce], setpoints: &[f64]| {
            let p = platform.sample(state.time);
            let inputs = JointInputs {
                active,
                passive_setpoints: setpoints,
                forces,
            };
            let acc = plant::joint_accelerations(chain, state, &inputs, &p);
            let acc: Vec<f64> = acc.iter().copied().collect();
            (p, GroundTruth::capture(chain, state, &p, &acc, active, passive))
        };

    let setpoints0 = network.passive_setpoints(0.0);
    let passive0 = plant::passive_torques(chain, &state, &setpoints0);
    let (_, initial_truth) = truth_at(&state, &active, &passive0, &[], &setpoints0);
    let mut sensors = Sensors::new(
        config.sensor_delays(),
        config.noise,
        config.ablated_channels.clone(),
        &initial_truth,
    );

    let mut log = TrajectoryLog {
        links: n,
        dt,
        records: Vec::with_capacity(ticks + 1),
    };
    let mut divergence = None;

    // a zero-length run simulates nothing, not even the initial tick
    let last_tick = if config.duration > 0.0 { ticks + 1 } else { 0 };
    for k in 0..last_tick {
        let t = k as f64 * dt;
        state.time = t;
        forces.clear();
        forces.extend(config.forces.iter().filter(|f| f.is_active(t)).map(|f| f.force));
        let setpoints = network.passive_setpoints(t);
        let passive = plant::passive_torques(chain, &state, &setpoints);
        let (p, truth) = truth_at(&state, &active, &passive, &forces, &setpoints);
        let frame = sensors.read(&truth);
        let tick = match network.control_tick(&frame) {
            Ok(tick) => tick,
            Err(Error::DegenerateGeometry { module, com_y }) => {
                divergence = Some(Divergence {
                    time: t,
                    reason: format!(
                        "estimated COM above joint {} fell below it (y = {com_y:.3} m)",
                        module + 1
                    ),
                });
                break;
            }
            Err(e) => return Err(e),
        };
        active.copy_from_slice(&tick.torques);

        let space = state.space_angles(p.tilt);
        let pose = ChainPose {
            space_angles: space.clone(),
            base_tilt: p.tilt,
            base_position: 0.0,
        };
        let com_x = com_of_subchain_oracle(chain, &pose, 0)?.0.x;
        log.records.push(LogRecord {
            time: t,
            platform: p,
            joint_angles: state.joint_angles.clone(),
            joint_velocities: state.joint_velocities.clone(),
            space_angles: space,
            active_torques: active.clone(),
            passive_torques: passive,
            com_x,
            base_tilt_estimate: tick.base_tilt_estimate,
            modules: tick.modules,
        });

        if let Some(worst) = log.records[k].space_angles.iter().map(|a| a.abs()).reduce(f64::max) {
            if worst > divergence_limit {
                divergence = Some(Divergence {
                    time: t,
                    reason: format!(
                        "link space angle {:.1} deg exceeded the {:.1} deg limit",
                        worst.to_degrees(),
                        divergence_limit.to_degrees()
                    ),
                });
                break;
            }
        }
        if k == ticks {
            break;
        }
        let inputs = JointInputs {
            active: &active,
            passive_setpoints: &setpoints,
            forces: &forces,
        };
        match plant::step(chain, &state, &inputs, &platform, dt) {
            Ok(next) => state = next,
            Err(Error::Diverged { time }) => {
                divergence = Some(Divergence {
                    time,
                    reason: "state became non-finite".to_string(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let metrics = compute_metrics(&log, &config.analysis, divergence.as_ref().map(|d| d.time));
    Ok(RunOutcome {
        name: config.name.clone(),
        log,
        metrics,
        divergence,
    })
}

/// Runs the same scenario with two flag assignments and returns the metrics
/// of `(flags_on, flags_off)`.
pub fn ablation_compare(
    config: &ScenarioConfig,
    flags_on: &[EstimatorFlags],
    flags_off: &[EstimatorFlags],
) -> Result<(RunMetrics, RunMetrics)> {
    let on = config.with_flags(flags_on);
    let off = config.with_flags(flags_off);
    let (a, b) = crate::batch::join(|| run_experiment(&on), || run_experiment(&off));
    Ok((a?.metrics, b?.metrics))
}
