//! Many independent runs at once. With the `parallel` feature the runs are
//! spread over a rayon pool; without it everything runs on the calling
//! thread in order. Each individual run is always sequential, so results
//! are identical either way.

use crate::error::{Error, Result};
use crate::scenario::{run_experiment, RunOutcome, ScenarioConfig};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs two closures, concurrently when the `parallel` feature is on.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// Maps `f` over `items`, in parallel when the feature is on. Output order
/// follows input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn run_batch_sequential(configs: &[ScenarioConfig]) -> Vec<Result<RunOutcome>> {
    configs.iter().map(run_experiment).collect()
}

/// Runs on the global pool (all cores).
pub fn run_batch(configs: &[ScenarioConfig]) -> Vec<Result<RunOutcome>> {
    par_map(configs, run_experiment)
}

/// Runs on a dedicated pool of `jobs` workers; `jobs <= 1` runs in order on
/// the calling thread.
pub fn run_batch_with_jobs(configs: &[ScenarioConfig], jobs: usize) -> Vec<Result<RunOutcome>> {
    if jobs <= 1 {
        return run_batch_sequential(configs);
    }
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| run_batch(configs)),
            Err(_) => run_batch_sequential(configs),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(configs)
    }
}

/// Bracket on the smallest lumped delay that destabilizes a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBracket {
    /// Largest delay found stable, s.
    pub stable: f64,
    /// Smallest delay found unstable, s.
    pub unstable: f64,
}

fn stable_with_delay(config: &ScenarioConfig, delay: f64) -> Result<bool> {
    let mut c = config.clone();
    c.delays.lumped = delay;
    Ok(run_experiment(&c)?.is_stable())
}

/// Narrows `[lo, hi]` (stable at `lo`, unstable at `hi`) by evaluating
/// `sections - 1` interior delays per round, in parallel, until the bracket
/// is no wider than `tolerance`. Assumes stability is monotone in the delay.
pub fn bisect_lumped_delay(
    config: &ScenarioConfig,
    lo: f64,
    hi: f64,
    tolerance: f64,
    sections: usize,
) -> Result<DelayBracket> {
    let sections = sections.max(2);
    if !stable_with_delay(config, lo)? {
        return Err(Error::invalid(format!("scenario is already unstable at {lo} s delay")));
    }
    if stable_with_delay(config, hi)? {
        return Err(Error::invalid(format!("scenario is still stable at {hi} s delay")));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tolerance {
        let probes: Vec<f64> = (1..sections)
            .map(|i| lo + (hi - lo) * i as f64 / sections as f64)
            .collect();
        let results = par_map(&probes, |d| stable_with_delay(config, *d));
        let mut next = (lo, hi);
        for (d, r) in probes.iter().zip(results) {
            if r? {
                next.0 = *d;
            } else {
                next.1 = *d;
                break;
            }
        }
        (lo, hi) = next;
    }
    Ok(DelayBracket {
        stable: lo,
        unstable: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainConfig;
    use crate::dec::EstimatorFlags;
    use crate::scenario::sinusoid_tilt;

    fn configs() -> Vec<ScenarioConfig> {
        (0..4)
            .map(|k| {
                let mut c = ScenarioConfig::quiet(
                    &format!("run{k}"),
                    ChainConfig::humanoid(70.0, 1.75),
                    1.0,
                    EstimatorFlags::GRAVITY_TILT,
                );
                c.platform.tilt = sinusoid_tilt((k as f64 + 1.0).to_radians(), 0.5);
                c
            })
            .collect()
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let cs = configs();
        let a = run_batch(&cs);
        let b = run_batch_sequential(&cs);
        let c = run_batch_with_jobs(&cs, 3);
        for ((x, y), z) in a.iter().zip(&b).zip(&c) {
            let (x, y, z) = (x.as_ref().unwrap(), y.as_ref().unwrap(), z.as_ref().unwrap());
            assert_eq!(x, y);
            assert_eq!(x, z);
        }
        assert_eq!(a[2].as_ref().unwrap().name, "run2");
    }

    #[test]
    fn join_returns_both() {
        assert_eq!(join(|| 1, || "b"), (1, "b"));
    }
}
