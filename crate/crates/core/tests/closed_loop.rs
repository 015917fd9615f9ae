use posture_core::chain::{com_of_subchain_oracle, ChainConfig, ChainPose, LinkParams};
use posture_core::dec::{EstimatorFlags, SetPoint, SetPointMode};
use posture_core::plant::ExternalForce;
use posture_core::scenario::{run_experiment, DelaySettings, ForceEvent, ScenarioConfig};

const DEG: f64 = std::f64::consts::PI / 180.0;

fn sip() -> ChainConfig {
    ChainConfig::new(vec![LinkParams::new(70.0, 1.8, 0.9, 8.0)])
}

#[test]
fn sip_set_point_step_settles_within_a_tenth_of_a_degree() {
    let mut cfg = ScenarioConfig::quiet("sip-step", sip(), 10.0, EstimatorFlags::GRAVITY_TILT);
    cfg.controllers[0].setpoint = SetPoint::constant(SetPointMode::SpaceAngle, 1.0 * DEG);
    let out = run_experiment(&cfg).unwrap();
    assert!(out.is_stable());
    let last = out.log.records.last().unwrap();
    let error = (last.space_angles[0] - 1.0 * DEG).abs() / DEG;
    assert!(error < 0.1, "still {error:.3} deg off after 10 s");
}

#[test]
fn sip_recovers_from_an_initial_lean() {
    let mut cfg = ScenarioConfig::quiet("sip-lean", sip(), 10.0, EstimatorFlags::GRAVITY_TILT);
    cfg.initial_joint_angles = vec![2.0 * DEG];
    let out = run_experiment(&cfg).unwrap();
    let last = out.log.records.last().unwrap();
    assert!(last.space_angles[0].abs() < 0.1 * DEG, "{}", last.space_angles[0] / DEG);
}

/// Without delays or noise the gravity estimate of every module is exactly
/// the weight of the links it supports times their COM's horizontal offset.
#[test]
fn gravity_estimates_match_the_true_supported_moment() {
    let mut cfg = ScenarioConfig::quiet(
        "identity",
        ChainConfig::humanoid(70.0, 1.75),
        2.0,
        EstimatorFlags::GRAVITY_TILT,
    );
    cfg.delays = DelaySettings {
        proprioceptive: 0.0,
        lumped: 0.0,
    };
    cfg.initial_joint_angles = vec![1.5 * DEG, -2.0 * DEG, 3.0 * DEG];
    let out = run_experiment(&cfg).unwrap();
    let mut checked = 0;
    for r in &out.log.records {
        let pose = ChainPose::from_joint_angles(&r.joint_angles, 0.0);
        for (k, m) in r.modules.iter().enumerate() {
            let (com, mass) = com_of_subchain_oracle(&cfg.chain, &pose, k).unwrap();
            let truth = mass * cfg.chain.gravity * com.x;
            assert!(
                (m.gravity_torque - truth).abs() < 1e-6,
                "t={} k={k}: {} vs {truth}",
                r.time,
                m.gravity_torque
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 3 * 2001);
}

/// A constant push on a servoed single link: once transients have died out
/// the contact-torque estimate is the applied moment times the estimator
/// gain.
#[test]
fn external_torque_estimate_converges_to_the_applied_moment() {
    let mut cfg = ScenarioConfig::quiet("push", sip(), 8.0, EstimatorFlags::GRAVITY_TILT);
    cfg.delays = DelaySettings {
        proprioceptive: 0.0,
        lumped: 0.0,
    };
    let (force, height) = (20.0, 1.2);
    cfg.forces = vec![ForceEvent {
        force: ExternalForce {
            link: 0,
            application_height: height,
            horizontal_force: force,
        },
        start: 0.5,
        duration: f64::INFINITY,
    }];
    let gain = cfg.controllers[0].estimator.ext_torque_gain;
    let out = run_experiment(&cfg).unwrap();
    let last = out.log.records.last().unwrap();
    let applied = force * height * last.space_angles[0].cos();
    let estimate = last.modules[0].external_torque;
    assert!(
        (estimate - gain * applied).abs() < 0.02 * gain * applied,
        "{estimate} vs {}",
        gain * applied
    );
}

#[test]
fn fig3_preset_runs_deterministically() {
    let mut cfg = posture_core::config::preset("fig3").unwrap();
    cfg.duration = 5.0;
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.log, b.log);
}
