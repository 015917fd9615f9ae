//! Scenario files.
//!
//! A scenario is a TOML document with a `schema_version` field. Angles are
//! given in degrees and joints/links are numbered from 1 (the joint on the
//! platform); everything is converted to radians and 0-based indices here.
//! Unknown keys are rejected so typos surface as errors with their line.

use std::path::Path;

use serde::Deserialize;

use crate::chain::{ChainConfig, LinkParams, STANDARD_GRAVITY};
use crate::dec::{EstimatorFlags, EstimatorParams, SetPoint, SetPointMode};
use crate::error::{Error, Result};
use crate::plant::ExternalForce;
use crate::scenario::{
    apply_passive_impedance, default_servos, voluntary_lean, AnalysisSettings, ControllerSettings, DelaySettings,
    ForceEvent, Platform, ScenarioConfig, TiltWaveform, TranslationWaveform,
};
use crate::sensors::{parse_channels, NoiseConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Names of the built-in scenarios.
pub const PRESETS: [&str; 5] = ["fig3", "fig4", "pull", "translation", "quiet"];

/// Source text of a built-in scenario.
pub fn preset_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig3" => include_str!("../presets/fig3.toml"),
        "fig4" => include_str!("../presets/fig4.toml"),
        "pull" => include_str!("../presets/pull.toml"),
        "translation" => include_str!("../presets/translation.toml"),
        "quiet" => include_str!("../presets/quiet.toml"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let text = preset_source(name).ok_or_else(|| Error::invalid(format!("no preset named {name:?}")))?;
    parse_scenario(text, name)
}

/// Reads a scenario file; the file stem is the default scenario name.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem)
}

/// Parses and validates a scenario document. `default_name` is used when
/// the document has no `name` key.
pub fn parse_scenario(text: &str, default_name: &str) -> Result<ScenarioConfig> {
    let file: ScenarioFile = toml::from_str(text)?;
    let config = file.build(default_name)?;
    config.validate()?;
    Ok(config)
}

fn deg(v: f64) -> f64 {
    v.to_radians()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    name: Option<String>,
    duration_s: f64,
    #[serde(default = "default_dt_ms")]
    dt_ms: f64,
    body: BodyFile,
    #[serde(default)]
    initial_joint_deg: Option<Vec<f64>>,
    #[serde(default)]
    platform: PlatformFile,
    #[serde(default, rename = "force")]
    forces: Vec<ForceFile>,
    #[serde(default)]
    sensors: SensorsFile,
    /// Applied to every module before its own section.
    #[serde(default)]
    defaults: ModuleFile,
    #[serde(default, rename = "module")]
    modules: Vec<ModuleFile>,
    #[serde(default)]
    analysis: AnalysisFile,
}

fn default_dt_ms() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyFile {
    /// `"humanoid"` (three links scaled from mass and height) or `"custom"`.
    model: String,
    mass_kg: Option<f64>,
    height_m: Option<f64>,
    gravity_ms2: Option<f64>,
    #[serde(default, rename = "link")]
    links: Vec<LinkFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkFile {
    mass_kg: f64,
    length_m: f64,
    com_m: f64,
    inertia_kgm2: f64,
    passive_stiffness_nm_per_rad: Option<f64>,
    passive_damping_nms_per_rad: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatformFile {
    tilt: Option<TiltFile>,
    translation: Option<TranslationFile>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum TiltFile {
    None,
    Sinusoid { amplitude_deg: f64, frequency_hz: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum TranslationFile {
    None,
    Sinusoid {
        amplitude_m: f64,
        frequency_hz: f64,
    },
    Step {
        acceleration_ms2: f64,
        #[serde(default)]
        start_s: f64,
        #[serde(default = "forever")]
        duration_s: f64,
    },
}

fn forever() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForceFile {
    link: usize,
    height_m: f64,
    force_n: f64,
    #[serde(default)]
    start_s: f64,
    #[serde(default = "forever")]
    duration_s: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorsFile {
    proprioceptive_delay_ms: Option<f64>,
    lumped_delay_ms: Option<f64>,
    #[serde(default)]
    ablate: Vec<String>,
    #[serde(default)]
    noise: NoiseFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    #[serde(default)]
    head_angle_deg: f64,
    #[serde(default)]
    head_velocity_deg_s: f64,
    #[serde(default)]
    head_acceleration_ms2: f64,
    #[serde(default)]
    joint_angle_deg: f64,
    #[serde(default)]
    joint_velocity_deg_s: f64,
    #[serde(default)]
    torque_nm: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleFile {
    /// 1-based; required in `[[module]]` sections.
    joint: Option<usize>,
    mode: Option<SetPointMode>,
    /// Any of `tilt`, `gravity`, `acceleration`, `external-torque`.
    estimators: Option<Vec<String>>,
    target_deg: Option<f64>,
    lean: Option<LeanFile>,
    /// Multiplies the derived passive stiffness and damping.
    passive_factor: Option<f64>,
    #[serde(default)]
    servo: ServoFile,
    #[serde(default)]
    estimator: EstimatorFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeanFile {
    target_deg: f64,
    #[serde(default = "default_lean_start")]
    start_s: f64,
    #[serde(default = "default_lean_ramp")]
    ramp_s: f64,
    #[serde(default = "yes")]
    prediction: bool,
}

fn default_lean_start() -> f64 {
    1.0
}

fn default_lean_ramp() -> f64 {
    2.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServoFile {
    kp: Option<f64>,
    ki: Option<f64>,
    kd: Option<f64>,
    reflexive_share: Option<f64>,
    passive_share: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorFile {
    tilt_threshold_deg_s: Option<f64>,
    tilt_gain: Option<f64>,
    gravity_threshold_deg: Option<f64>,
    gravity_gain: Option<f64>,
    accel_threshold_ms2: Option<f64>,
    accel_gain: Option<f64>,
    accel_cutoff_hz: Option<f64>,
    ext_torque_gain: Option<f64>,
    ext_torque_cutoff_hz: Option<f64>,
    ext_torque_threshold_nm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisFile {
    window_fraction: Option<f64>,
    stability_limit_deg: Option<f64>,
    divergence_limit_deg: Option<f64>,
    settling_band_deg: Option<f64>,
}

/// `b` where set, `a` otherwise.
fn overlay(a: &ModuleFile, b: &ModuleFile) -> ModuleFile {
    fn pick<T: Clone>(a: &Option<T>, b: &Option<T>) -> Option<T> {
        b.clone().or_else(|| a.clone())
    }
    ModuleFile {
        joint: b.joint,
        mode: pick(&a.mode, &b.mode),
        estimators: pick(&a.estimators, &b.estimators),
        target_deg: pick(&a.target_deg, &b.target_deg),
        lean: pick(&a.lean, &b.lean),
        passive_factor: pick(&a.passive_factor, &b.passive_factor),
        servo: ServoFile {
            kp: pick(&a.servo.kp, &b.servo.kp),
            ki: pick(&a.servo.ki, &b.servo.ki),
            kd: pick(&a.servo.kd, &b.servo.kd),
            reflexive_share: pick(&a.servo.reflexive_share, &b.servo.reflexive_share),
            passive_share: pick(&a.servo.passive_share, &b.servo.passive_share),
        },
        estimator: EstimatorFile {
            tilt_threshold_deg_s: pick(&a.estimator.tilt_threshold_deg_s, &b.estimator.tilt_threshold_deg_s),
            tilt_gain: pick(&a.estimator.tilt_gain, &b.estimator.tilt_gain),
            gravity_threshold_deg: pick(&a.estimator.gravity_threshold_deg, &b.estimator.gravity_threshold_deg),
            gravity_gain: pick(&a.estimator.gravity_gain, &b.estimator.gravity_gain),
            accel_threshold_ms2: pick(&a.estimator.accel_threshold_ms2, &b.estimator.accel_threshold_ms2),
            accel_gain: pick(&a.estimator.accel_gain, &b.estimator.accel_gain),
            accel_cutoff_hz: pick(&a.estimator.accel_cutoff_hz, &b.estimator.accel_cutoff_hz),
            ext_torque_gain: pick(&a.estimator.ext_torque_gain, &b.estimator.ext_torque_gain),
            ext_torque_cutoff_hz: pick(&a.estimator.ext_torque_cutoff_hz, &b.estimator.ext_torque_cutoff_hz),
            ext_torque_threshold_nm: pick(
                &a.estimator.ext_torque_threshold_nm,
                &b.estimator.ext_torque_threshold_nm,
            ),
        },
    }
}

pub fn parse_flags<S: AsRef<str>>(names: &[S]) -> Result<EstimatorFlags> {
    let mut flags = EstimatorFlags::NONE;
    let mut unknown = vec![];
    for n in names {
        match n.as_ref() {
            "tilt" => flags.tilt = true,
            "gravity" => flags.gravity = true,
            "acceleration" => flags.acceleration = true,
            "external-torque" => flags.external_torque = true,
            other => unknown.push(format!(
                "unknown estimator {other:?} (expected tilt, gravity, acceleration or external-torque)"
            )),
        }
    }
    if unknown.is_empty() {
        Ok(flags)
    } else {
        Err(Error::InvalidConfig(unknown))
    }
}

impl BodyFile {
    fn build(&self, problems: &mut Vec<String>) -> ChainConfig {
        let gravity = self.gravity_ms2.unwrap_or(STANDARD_GRAVITY);
        let mut chain = match self.model.as_str() {
            "humanoid" => {
                if !self.links.is_empty() {
                    problems.push("body.link entries are only allowed with model = \"custom\"".into());
                }
                ChainConfig::humanoid(self.mass_kg.unwrap_or(70.0), self.height_m.unwrap_or(1.75))
            }
            "custom" => {
                if self.mass_kg.is_some() || self.height_m.is_some() {
                    problems.push("body.mass_kg and body.height_m only apply to model = \"humanoid\"".into());
                }
                ChainConfig::new(
                    self.links
                        .iter()
                        .map(|l| LinkParams::new(l.mass_kg, l.length_m, l.com_m, l.inertia_kgm2))
                        .collect(),
                )
            }
            other => {
                problems.push(format!("body.model must be \"humanoid\" or \"custom\" (got {other:?})"));
                ChainConfig::new(vec![])
            }
        };
        chain.gravity = gravity;
        chain
    }
}

impl ScenarioFile {
    fn build(self, default_name: &str) -> Result<ScenarioConfig> {
        let mut problems = vec![];
        if self.schema_version != SCHEMA_VERSION {
            problems.push(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let mut chain = self.body.build(&mut problems);
        let n = chain.len();
        if n == 0 && problems.is_empty() {
            problems.push("body must have at least one link".into());
        }
        if !chain.violations().is_empty() || n == 0 {
            problems.extend(chain.violations());
            return Err(Error::InvalidConfig(problems));
        }

        // one resolved section per joint
        let mut sections = vec![self.defaults.clone(); n];
        let mut seen = vec![false; n];
        for m in &self.modules {
            match m.joint {
                Some(j) if (1..=n).contains(&j) => {
                    if seen[j - 1] {
                        problems.push(format!("module for joint {j} given twice"));
                    }
                    seen[j - 1] = true;
                    sections[j - 1] = overlay(&self.defaults, m);
                }
                Some(j) => problems.push(format!("module.joint {j} out of range 1..={n}")),
                None => problems.push("every [[module]] needs a joint number".into()),
            }
        }

        let mut servos = default_servos(&chain);
        let mut factors = vec![1.0; n];
        let mut controllers = Vec::with_capacity(n);
        for (k, s) in sections.iter().enumerate() {
            let servo = &mut servos[k];
            let kp_default = servo.kp;
            servo.kp = s.servo.kp.unwrap_or(kp_default);
            servo.ki = s.servo.ki.unwrap_or(0.05 * servo.kp);
            servo.kd = s.servo.kd.unwrap_or(0.25 * servo.kp);
            if let Some(r) = s.servo.reflexive_share {
                servo.reflexive_share = r;
                servo.passive_share = s.servo.passive_share.unwrap_or(1.0 - r);
            } else if let Some(p) = s.servo.passive_share {
                servo.passive_share = p;
                servo.reflexive_share = 1.0 - p;
            }
            factors[k] = s.passive_factor.unwrap_or(1.0);
            if !(factors[k].is_finite() && factors[k] >= 0.0) {
                problems.push(format!("module[{}].passive_factor must be >= 0", k + 1));
            }

            let d = EstimatorParams::default();
            let e = &s.estimator;
            let estimator = EstimatorParams {
                tilt_threshold: e.tilt_threshold_deg_s.map_or(d.tilt_threshold, deg),
                tilt_gain: e.tilt_gain.unwrap_or(d.tilt_gain),
                gravity_threshold: e.gravity_threshold_deg.map_or(d.gravity_threshold, deg),
                gravity_gain: e.gravity_gain.unwrap_or(d.gravity_gain),
                accel_threshold: e.accel_threshold_ms2.unwrap_or(d.accel_threshold),
                accel_gain: e.accel_gain.unwrap_or(d.accel_gain),
                accel_lowpass_cutoff: e.accel_cutoff_hz.unwrap_or(d.accel_lowpass_cutoff),
                ext_torque_gain: e.ext_torque_gain.unwrap_or(d.ext_torque_gain),
                ext_torque_lowpass_cutoff: e.ext_torque_cutoff_hz.unwrap_or(d.ext_torque_lowpass_cutoff),
                ext_torque_threshold: e.ext_torque_threshold_nm.unwrap_or(d.ext_torque_threshold),
            };
            let flags = match &s.estimators {
                None => EstimatorFlags::NONE,
                Some(names) => match parse_flags(names) {
                    Ok(f) => f,
                    Err(Error::InvalidConfig(v)) => {
                        problems.extend(v.into_iter().map(|m| format!("module[{}]: {m}", k + 1)));
                        EstimatorFlags::NONE
                    }
                    Err(e) => return Err(e),
                },
            };
            let mode = s.mode.unwrap_or(SetPointMode::SpaceAngle);
            let setpoint = match (&s.lean, s.target_deg) {
                (Some(_), Some(_)) => {
                    problems.push(format!("module[{}]: give either target_deg or lean, not both", k + 1));
                    SetPoint::constant(mode, 0.0)
                }
                (Some(l), None) => {
                    if !(l.ramp_s > 0.0) {
                        problems.push(format!("module[{}].lean.ramp_s must be > 0", k + 1));
                    }
                    let mut sp = voluntary_lean(
                        mode,
                        deg(l.target_deg),
                        l.start_s,
                        l.ramp_s.max(f64::MIN_POSITIVE),
                        &chain.links[k..],
                        chain.gravity,
                    );
                    if !l.prediction {
                        sp.prediction = None;
                    }
                    sp
                }
                (None, target) => {
                    // COM positions are metres, everything else degrees
                    let v = target.unwrap_or(0.0);
                    let v = if mode == SetPointMode::ComPosition { v } else { deg(v) };
                    SetPoint::constant(mode, v)
                }
            };
            controllers.push(ControllerSettings {
                servo: *servo,
                estimator,
                flags,
                setpoint,
            });
        }
        apply_passive_impedance(&mut chain, &servos, &factors);
        if self.body.model == "custom" {
            for (link, f) in chain.links.iter_mut().zip(&self.body.links) {
                if let Some(k) = f.passive_stiffness_nm_per_rad {
                    link.passive_stiffness = k;
                }
                if let Some(d) = f.passive_damping_nms_per_rad {
                    link.passive_damping = d;
                }
            }
        }

        let platform = Platform {
            tilt: match self.platform.tilt {
                None | Some(TiltFile::None) => TiltWaveform::None,
                Some(TiltFile::Sinusoid {
                    amplitude_deg,
                    frequency_hz,
                }) => TiltWaveform::Sinusoid {
                    amplitude: deg(amplitude_deg),
                    frequency: frequency_hz,
                },
            },
            translation: match self.platform.translation {
                None | Some(TranslationFile::None) => TranslationWaveform::None,
                Some(TranslationFile::Sinusoid {
                    amplitude_m,
                    frequency_hz,
                }) => TranslationWaveform::Sinusoid {
                    amplitude: amplitude_m,
                    frequency: frequency_hz,
                },
                Some(TranslationFile::Step {
                    acceleration_ms2,
                    start_s,
                    duration_s,
                }) => TranslationWaveform::Step {
                    acceleration: acceleration_ms2,
                    start: start_s,
                    duration: duration_s,
                },
            },
        };

        let mut forces = vec![];
        for (i, f) in self.forces.iter().enumerate() {
            if f.link == 0 || f.link > n {
                problems.push(format!("force[{}].link {} out of range 1..={n}", i + 1, f.link));
                continue;
            }
            forces.push(ForceEvent {
                force: ExternalForce {
                    link: f.link - 1,
                    application_height: f.height_m,
                    horizontal_force: f.force_n,
                },
                start: f.start_s,
                duration: f.duration_s,
            });
        }

        let ablated_channels = match parse_channels(&self.sensors.ablate) {
            Ok(c) => c,
            Err(e) => {
                problems.push(format!("sensors.ablate: {e}"));
                vec![]
            }
        };
        let nf = &self.sensors.noise;
        let noise = NoiseConfig {
            head_angle: deg(nf.head_angle_deg),
            head_velocity: deg(nf.head_velocity_deg_s),
            head_acceleration: nf.head_acceleration_ms2,
            joint_angle: deg(nf.joint_angle_deg),
            joint_velocity: deg(nf.joint_velocity_deg_s),
            torque: nf.torque_nm,
            seed: nf.seed,
        };
        let default_delays = DelaySettings::default();
        let delays = DelaySettings {
            proprioceptive: self
                .sensors
                .proprioceptive_delay_ms
                .map_or(default_delays.proprioceptive, |ms| ms / 1000.0),
            lumped: self
                .sensors
                .lumped_delay_ms
                .map_or(default_delays.lumped, |ms| ms / 1000.0),
        };

        let da = AnalysisSettings::default();
        let a = &self.analysis;
        let analysis = AnalysisSettings {
            window_fraction: a.window_fraction.unwrap_or(da.window_fraction),
            stability_limit: a.stability_limit_deg.map_or(da.stability_limit, deg),
            divergence_limit: a.divergence_limit_deg.map_or(da.divergence_limit, deg),
            settling_band: a.settling_band_deg.map_or(da.settling_band, deg),
        };

        let initial_joint_angles = match self.initial_joint_deg {
            Some(v) => v.into_iter().map(deg).collect(),
            None => vec![0.0; n],
        };

        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        Ok(ScenarioConfig {
            name: self.name.unwrap_or_else(|| default_name.to_string()),
            chain,
            duration: self.duration_s,
            dt: self.dt_ms / 1000.0,
            platform,
            forces,
            controllers,
            delays,
            noise,
            ablated_channels,
            initial_joint_angles,
            analysis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_preset_parses() {
        for name in PRESETS {
            let cfg = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, name);
            assert_eq!(cfg.chain.len(), 3);
        }
    }

    #[test]
    fn fig3_preset_assignment() {
        let cfg = preset("fig3").unwrap();
        assert_eq!(cfg.controllers[0].flags, EstimatorFlags::GRAVITY_TILT);
        for c in &cfg.controllers[1..] {
            assert!(c.flags.gravity && c.flags.tilt && c.flags.acceleration && !c.flags.external_torque);
        }
        assert_relative_eq!(cfg.delays.lumped, 0.18);
        assert_relative_eq!(cfg.delays.proprioceptive, 0.06);
        match cfg.platform.tilt {
            TiltWaveform::Sinusoid { amplitude, frequency } => {
                assert_relative_eq!(amplitude, 4f64.to_radians());
                assert_relative_eq!(frequency, 0.08);
            }
            other => panic!("{other:?}"),
        }
        // knee stiffer than the other joints relative to its own gains
        let ratio = |k: usize| cfg.chain.links[k].passive_stiffness / cfg.controllers[k].servo.kp;
        assert!(ratio(1) > 4.0 * ratio(0));
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let text = "schema_version = 1\nduration_s = \n";
        let msg = parse_scenario(text, "x").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = "schema_version = 1\nduration_s = 1.0\nbody = { model = \"humanoid\" }\ncolour = 3\n";
        let msg = parse_scenario(text, "x").unwrap_err().to_string();
        assert!(msg.contains("colour"), "{msg}");
    }

    #[test]
    fn semantic_errors_are_all_listed() {
        let text = r#"
schema_version = 2
duration_s = -1.0
body = { model = "humanoid" }
[[module]]
joint = 7
[[module]]
joint = 1
estimators = ["gravity", "magic"]
"#;
        match parse_scenario(text, "x") {
            Err(Error::InvalidConfig(v)) => {
                assert!(v.iter().any(|m| m.contains("schema_version")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("joint 7")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("magic")), "{v:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn custom_body_and_explicit_values() {
        let text = r#"
schema_version = 1
name = "sip"
duration_s = 2.0
initial_joint_deg = [1.0]
[body]
model = "custom"
[[body.link]]
mass_kg = 70.0
length_m = 1.8
com_m = 0.9
inertia_kgm2 = 8.0
passive_stiffness_nm_per_rad = 12.0
[[module]]
joint = 1
estimators = ["gravity"]
target_deg = 2.0
servo = { kp = 700.0 }
[[force]]
link = 1
height_m = 1.2
force_n = 10.0
start_s = 0.5
"#;
        let cfg = parse_scenario(text, "x").unwrap();
        assert_eq!(cfg.name, "sip");
        assert_eq!(cfg.chain.links[0].passive_stiffness, 12.0);
        assert_relative_eq!(cfg.chain.links[0].passive_damping, 0.15 * 0.25 * 700.0);
        assert_eq!(cfg.controllers[0].servo.kp, 700.0);
        assert_relative_eq!(cfg.controllers[0].setpoint.trajectory.value(0.0), 2f64.to_radians());
        assert_relative_eq!(cfg.initial_joint_angles[0], 1f64.to_radians());
        assert_eq!(cfg.forces[0].force.link, 0);
        assert!(cfg.forces[0].duration.is_infinite());
    }
}
