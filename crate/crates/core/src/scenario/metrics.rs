use super::TrajectoryLog;

const DEG: f64 = std::f64::consts::PI / 180.0;

/// Post-run analysis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    /// Trailing fraction of the run used for steady-state metrics.
    pub window_fraction: f64,
    /// A run is stable when every link stays within this space angle, rad.
    pub stability_limit: f64,
    /// The simulation stops once any link exceeds this space angle, rad.
    pub divergence_limit: f64,
    /// Band around the final mean used for the settling time, rad.
    pub settling_band: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            window_fraction: 0.5,
            stability_limit: 15.0 * DEG,
            divergence_limit: 60.0 * DEG,
            settling_band: 0.1 * DEG,
        }
    }
}

impl AnalysisSettings {
    pub fn violations(&self) -> Vec<String> {
        let mut v = vec![];
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            v.push(format!(
                "analysis.window_fraction must be in (0, 1] (got {})",
                self.window_fraction
            ));
        }
        if !(self.stability_limit > 0.0) {
            v.push("analysis.stability_limit_deg must be > 0".to_string());
        }
        if !(self.divergence_limit >= self.stability_limit) {
            v.push("analysis.divergence_limit_deg must be >= stability_limit_deg".to_string());
        }
        if !(self.settling_band > 0.0) {
            v.push("analysis.settling_band_deg must be > 0".to_string());
        }
        v
    }
}

/// Summary of one run. Angles in degrees, lengths in metres.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    /// Per link, over the analysis window.
    pub peak_to_peak_deg: Vec<f64>,
    /// Half the peak-to-peak value.
    pub amplitude_deg: Vec<f64>,
    pub mean_space_deg: Vec<f64>,
    pub platform_peak_to_peak_deg: f64,
    /// Largest `|com_x|` over the window.
    pub com_excursion_m: f64,
    pub com_mean_m: f64,
    pub com_rms_m: f64,
    /// Largest link space angle over the whole run.
    pub max_abs_space_deg: f64,
    pub stable: bool,
    /// Last time any link left the settling band around its window mean.
    pub settling_time_s: Option<f64>,
    pub diverged_at_s: Option<f64>,
    pub simulated_s: f64,
}

impl RunMetrics {
    /// Flat `(key, value)` pairs in a fixed order.
    pub fn key_values(&self) -> Vec<(String, f64)> {
        let mut out = vec![];
        for (k, v) in self.peak_to_peak_deg.iter().enumerate() {
            out.push((format!("peak_to_peak_deg_{}", k + 1), *v));
        }
        for (k, v) in self.amplitude_deg.iter().enumerate() {
            out.push((format!("amplitude_deg_{}", k + 1), *v));
        }
        for (k, v) in self.mean_space_deg.iter().enumerate() {
            out.push((format!("mean_space_deg_{}", k + 1), *v));
        }
        out.push(("platform_peak_to_peak_deg".into(), self.platform_peak_to_peak_deg));
        out.push(("com_excursion_m".into(), self.com_excursion_m));
        out.push(("com_mean_m".into(), self.com_mean_m));
        out.push(("com_rms_m".into(), self.com_rms_m));
        out.push(("max_abs_space_deg".into(), self.max_abs_space_deg));
        out.push(("stable".into(), if self.stable { 1.0 } else { 0.0 }));
        out.push(("settling_time_s".into(), self.settling_time_s.unwrap_or(f64::NAN)));
        out.push(("diverged_at_s".into(), self.diverged_at_s.unwrap_or(f64::NAN)));
        out.push(("simulated_s".into(), self.simulated_s));
        out
    }
}

pub fn compute_metrics(log: &TrajectoryLog, settings: &AnalysisSettings, diverged_at: Option<f64>) -> RunMetrics {
    let n = log.links;
    let records = &log.records;
    if records.is_empty() {
        return RunMetrics {
            peak_to_peak_deg: vec![0.0; n],
            amplitude_deg: vec![0.0; n],
            mean_space_deg: vec![0.0; n],
            stable: diverged_at.is_none(),
            diverged_at_s: diverged_at,
            ..Default::default()
        };
    }
    let start = ((1.0 - settings.window_fraction) * records.len() as f64).floor() as usize;
    let window = &records[start.min(records.len() - 1)..];
    let count = window.len() as f64;

    let mut p2p = vec![0.0; n];
    let mut mean = vec![0.0; n];
    for k in 0..n {
        let (lo, hi, sum) = window
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), r| {
                let a = r.space_angles[k];
                (lo.min(a), hi.max(a), s + a)
            });
        p2p[k] = (hi - lo) / DEG;
        mean[k] = sum / count;
    }
    let (plo, phi) = window.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.platform.tilt), hi.max(r.platform.tilt))
    });

    let com_excursion = window.iter().map(|r| r.com_x.abs()).fold(0.0, f64::max);
    let com_mean = window.iter().map(|r| r.com_x).sum::<f64>() / count;
    let com_rms = (window.iter().map(|r| r.com_x * r.com_x).sum::<f64>() / count).sqrt();
    let max_abs = records
        .iter()
        .flat_map(|r| r.space_angles.iter())
        .map(|a| a.abs())
        .fold(0.0, f64::max);

    let settling = records
        .iter()
        .rev()
        .find(|r| {
            r.space_angles
                .iter()
                .zip(&mean)
                .any(|(a, m)| (a - m).abs() > settings.settling_band)
        })
        .map(|r| r.time + log.dt);
    let settling_time_s = match settling {
        None => Some(0.0),
        // never settled inside the window
        Some(t) if t > window[0].time => None,
        Some(t) => Some(t),
    };

    RunMetrics {
        amplitude_deg: p2p.iter().map(|v| v / 2.0).collect(),
        peak_to_peak_deg: p2p,
        mean_space_deg: mean.iter().map(|m| m / DEG).collect(),
        platform_peak_to_peak_deg: (phi - plo) / DEG,
        com_excursion_m: com_excursion,
        com_mean_m: com_mean,
        com_rms_m: com_rms,
        max_abs_space_deg: max_abs / DEG,
        stable: diverged_at.is_none() && max_abs < settings.stability_limit,
        settling_time_s,
        diverged_at_s: diverged_at,
        simulated_s: records.last().map_or(0.0, |r| r.time),
    }
}
