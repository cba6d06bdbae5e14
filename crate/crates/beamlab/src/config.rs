//! Experiment configuration, read from JSON. Angles are in degrees here and converted to
//! radians at the harness boundary.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use beamlab_core::Method;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Beampattern,
    SinrVsSnr,
    SinrVsSnapshots,
    SinrVsInr,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Beampattern,
        Experiment::SinrVsSnr,
        Experiment::SinrVsSnapshots,
        Experiment::SinrVsInr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Beampattern => "beampattern",
            Experiment::SinrVsSnr => "sinr_vs_snr",
            Experiment::SinrVsSnapshots => "sinr_vs_snapshots",
            Experiment::SinrVsInr => "sinr_vs_inr",
        }
    }

    /// Label of the swept quantity.
    pub fn x_label(self) -> &'static str {
        match self {
            Experiment::Beampattern | Experiment::SinrVsSnr => "snr_db",
            Experiment::SinrVsSnapshots => "snapshots",
            Experiment::SinrVsInr => "inr_db",
        }
    }

    /// Whether the DoA and sensor-position mismatch draws apply.
    pub fn uses_mismatch(self) -> bool {
        self != Experiment::Beampattern
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment {s:?}")))
    }
}

/// Extended dimension: a fixed `L`, or `"auto"` for the normalized-error search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LSetting {
    Fixed(usize),
    Auto,
}

impl Serialize for LSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LSetting::Fixed(l) => s.serialize_u64(*l as u64),
            LSetting::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for LSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Fixed(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Fixed(l) => Ok(LSetting::Fixed(l)),
            Raw::Word(w) if w == "auto" => Ok(LSetting::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected an integer or \"auto\", got {w:?}"
            ))),
        }
    }
}

fn serialize_methods<S: Serializer>(methods: &[Method], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(methods.iter().map(|m| m.name()))
}

fn deserialize_methods<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Method>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    parse_methods(names.iter().map(String::as_str)).map_err(serde::de::Error::custom)
}

/// Parses method names, rejecting unknown ones and dropping duplicates.
pub fn parse_methods<'a>(names: impl IntoIterator<Item = &'a str>) -> std::result::Result<Vec<Method>, String> {
    let mut out = Vec::new();
    for name in names {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let m: Method = name.parse().map_err(|_| format!("unknown method {name:?}"))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub m: usize,
    pub l: LSetting,
    /// Upper end of the `"auto"` search; defaults to `8 m`.
    pub l_max: Option<usize>,
    pub k: usize,
    pub trials: usize,
    /// Input SNR for the experiments that do not sweep it.
    pub snr_db: f64,
    /// Input INR for the experiments that do not sweep it; defaults to 30 dB for the
    /// beampattern experiment and 10 dB for the sweeps.
    pub inr_db: Option<f64>,
    pub snr_grid_db: Vec<f64>,
    pub inr_grid_db: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub presumed_soi_deg: f64,
    pub interferers_deg: Vec<f64>,
    pub sector_halfwidth_deg: f64,
    pub doa_mismatch_halfwidth_deg: f64,
    pub position_error_halfwidth_wl: f64,
    pub delta: f64,
    pub seed: u64,
    #[serde(serialize_with = "serialize_methods", deserialize_with = "deserialize_methods")]
    pub methods: Vec<Method>,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    /// Apply position errors to virtual elements as well.
    pub perturb_virtual: bool,
    /// Estimate the interferer directions from each trial's Capon spectrum instead of
    /// using `interferers_deg` for the dimension search.
    pub estimate_interferers: bool,
    pub capon_samples: usize,
    pub beampattern_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::SinrVsSnr,
            m: 10,
            l: LSetting::Fixed(20),
            l_max: None,
            k: 50,
            trials: 100,
            snr_db: 10.0,
            inr_db: None,
            snr_grid_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            inr_grid_db: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            k_grid: vec![10, 20, 30, 50, 100, 200, 500],
            presumed_soi_deg: 0.0,
            interferers_deg: vec![-30.0, 30.0],
            sector_halfwidth_deg: 6.0,
            doa_mismatch_halfwidth_deg: 6.0,
            position_error_halfwidth_wl: 0.05,
            delta: 0.05,
            seed: 1,
            methods: Method::ALL.to_vec(),
            workers: 0,
            perturb_virtual: false,
            estimate_interferers: false,
            capon_samples: beamlab_core::baselines::DEFAULT_CAPON_SAMPLES,
            beampattern_points: beamlab_core::metrics::DEFAULT_BEAMPATTERN_POINTS,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for one experiment.
    pub fn for_experiment(experiment: Experiment) -> Self {
        Self {
            experiment,
            ..Self::default()
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| HarnessError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn effective_inr_db(&self) -> f64 {
        self.inr_db.unwrap_or(match self.experiment {
            Experiment::Beampattern => 30.0,
            _ => 10.0,
        })
    }

    pub fn effective_l_max(&self) -> usize {
        self.l_max.unwrap_or(8 * self.m)
    }

    /// Values of the swept variable.
    pub fn x_values(&self) -> Vec<f64> {
        match self.experiment {
            Experiment::Beampattern => vec![self.snr_db],
            Experiment::SinrVsSnr => self.snr_grid_db.clone(),
            Experiment::SinrVsSnapshots => self.k_grid.iter().map(|&k| k as f64).collect(),
            Experiment::SinrVsInr => self.inr_grid_db.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.m < 2 {
            return fail("m must be at least 2");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        match self.l {
            LSetting::Fixed(l) if l < self.m => return fail("l must be at least m"),
            LSetting::Auto if self.effective_l_max() < self.m => return fail("l_max must be at least m"),
            _ => {}
        }
        let grid_empty = match self.experiment {
            Experiment::Beampattern => false,
            Experiment::SinrVsSnr => self.snr_grid_db.is_empty(),
            Experiment::SinrVsSnapshots => self.k_grid.is_empty(),
            Experiment::SinrVsInr => self.inr_grid_db.is_empty(),
        };
        if grid_empty {
            return fail("the swept grid is empty");
        }
        if self.experiment == Experiment::SinrVsSnapshots && self.k_grid.contains(&0) {
            return fail("snapshot counts must be positive");
        }
        let all_db = self.snr_grid_db.iter().chain(&self.inr_grid_db).chain([&self.snr_db]);
        if all_db.chain(self.inr_db.as_ref()).any(|v| !v.is_finite()) {
            return fail("power levels must be finite");
        }
        let angles = self.interferers_deg.iter().chain([&self.presumed_soi_deg]);
        if angles.clone().any(|a| !(a.abs() < 90.0)) {
            return fail("directions must lie strictly between -90 and 90 degrees");
        }
        if self.uses_mismatch() {
            let extreme = angles
                .map(|a| a.abs() + self.doa_mismatch_halfwidth_deg)
                .fold(0.0, f64::max);
            if extreme >= 90.0 {
                return fail("DoA mismatch can push a source to endfire");
            }
        }
        if !(self.sector_halfwidth_deg >= 0.0 && self.sector_halfwidth_deg < 90.0) {
            return fail("sector_halfwidth_deg must lie in [0, 90)");
        }
        if !(self.doa_mismatch_halfwidth_deg >= 0.0) {
            return fail("doa_mismatch_halfwidth_deg must be nonnegative");
        }
        if !(self.position_error_halfwidth_wl >= 0.0 && self.position_error_halfwidth_wl <= 0.25) {
            return fail("position_error_halfwidth_wl must lie in [0, 0.25]");
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return fail("delta must lie in (0, 1]");
        }
        if self.capon_samples < 2 {
            return fail("capon_samples must be at least 2");
        }
        if self.beampattern_points == 0 {
            return fail("beampattern_points must be positive");
        }
        if self.interferers_deg.is_empty() && (self.l == LSetting::Auto || self.estimate_interferers) {
            return fail("the dimension search needs at least one interferer");
        }
        Ok(())
    }

    fn uses_mismatch(&self) -> bool {
        self.experiment.uses_mismatch()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_json_with_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "sinr_vs_inr", "l": "auto", "methods": ["lcssp", "optimal"]}"#)
                .unwrap();
        assert_eq!(cfg.experiment, Experiment::SinrVsInr);
        assert_eq!(cfg.l, LSetting::Auto);
        assert_eq!(cfg.methods, vec![Method::Lcssp, Method::Optimal]);
        assert_eq!(cfg.k, 50);
        assert_eq!(cfg.effective_inr_db(), 10.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_fields_and_methods() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"trails": 3}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"methods": ["ipnc_est"]}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"l": "big"}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ExperimentConfig::for_experiment(Experiment::Beampattern);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.effective_inr_db(), 30.0);
    }

    #[test]
    fn validation_errors() {
        let bad = [
            ExperimentConfig {
                trials: 0,
                ..Default::default()
            },
            ExperimentConfig {
                l: LSetting::Fixed(5),
                ..Default::default()
            },
            ExperimentConfig {
                snr_grid_db: Vec::new(),
                ..Default::default()
            },
            ExperimentConfig {
                interferers_deg: vec![88.0],
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
