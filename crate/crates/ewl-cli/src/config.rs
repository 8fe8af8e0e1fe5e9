//! Run configuration: built-in defaults, flat TOML config files, and
//! command-line overrides, merged with precedence flags > file > defaults.
//!
//! Every output directory gets a `manifest.toml` recording the resolved
//! configuration plus `manifest_*` provenance keys. A manifest is itself a
//! valid config file: the provenance keys are accepted and ignored on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ewl_core::estimator::Frat5Clamp;
use ewl_core::fares::FareStructure;
use ewl_core::harness::{Scale, SweepSpec, ETA_REFERENCE, FRAT5_INTERVAL};
use ewl_core::simulator::{
    EpisodeConfig, PolicyKind, DEFAULT_HORIZON, DEFAULT_NU, DEFAULT_STEPS,
};

use crate::error::{usage, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Episode,
    SweepEta,
    SweepFrat5,
    Detailed,
    Render,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Episode => "episode",
            Command::SweepEta => "sweep-eta",
            Command::SweepFrat5 => "sweep-frat5",
            Command::Detailed => "detailed",
            Command::Render => "render",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "episode" => Ok(Command::Episode),
            "sweep-eta" => Ok(Command::SweepEta),
            "sweep-frat5" => Ok(Command::SweepFrat5),
            "detailed" => Ok(Command::Detailed),
            "render" => Ok(Command::Render),
            other => Err(usage(format!("unknown command {other:?}"))),
        }
    }
}

/// Raw key-value layer: what a config file, the CLI flags, or a manifest can
/// say. All keys optional; unknown keys are rejected.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub scale: Option<String>,
    pub workers: Option<usize>,
    pub policy: Option<String>,
    pub frat5: Option<f64>,
    pub eta: Option<f64>,
    pub fares: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub nu: Option<f64>,
    pub clamp_min: Option<f64>,
    pub clamp_max: Option<f64>,
    pub steps: Option<usize>,
    pub eta_samples: Option<usize>,
    pub eta_values: Option<Vec<f64>>,
    pub episodes: Option<usize>,
    pub frat5_points: Option<Vec<f64>>,
    pub frat5_interval: Option<(f64, f64)>,
    /// Provenance written into manifests; ignored when a manifest is reused
    /// as a config file.
    pub manifest_command: Option<String>,
    pub manifest_git: Option<String>,
    pub manifest_wall_seconds: Option<f64>,
}

impl FileConfig {
    /// Merges two layers; `self` wins.
    pub fn or(self, fallback: FileConfig) -> FileConfig {
        FileConfig {
            out: self.out.or(fallback.out),
            seed: self.seed.or(fallback.seed),
            scale: self.scale.or(fallback.scale),
            workers: self.workers.or(fallback.workers),
            policy: self.policy.or(fallback.policy),
            frat5: self.frat5.or(fallback.frat5),
            eta: self.eta.or(fallback.eta),
            fares: self.fares.or(fallback.fares),
            horizon: self.horizon.or(fallback.horizon),
            nu: self.nu.or(fallback.nu),
            clamp_min: self.clamp_min.or(fallback.clamp_min),
            clamp_max: self.clamp_max.or(fallback.clamp_max),
            steps: self.steps.or(fallback.steps),
            eta_samples: self.eta_samples.or(fallback.eta_samples),
            eta_values: self.eta_values.or(fallback.eta_values),
            episodes: self.episodes.or(fallback.episodes),
            frat5_points: self.frat5_points.or(fallback.frat5_points),
            frat5_interval: self.frat5_interval.or(fallback.frat5_interval),
            manifest_command: self.manifest_command.or(fallback.manifest_command),
            manifest_git: self.manifest_git.or(fallback.manifest_git),
            manifest_wall_seconds: self.manifest_wall_seconds.or(fallback.manifest_wall_seconds),
        }
    }
}

/// Parses a flat TOML config file. Missing file or bad keys are usage
/// errors.
pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("config file {}: {e}", path.display())))
}

/// Fully resolved run description; validated before any simulation starts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub out: PathBuf,
    pub seed: u64,
    pub scale: Scale,
    /// Worker threads; 0 keeps the library default (all cores).
    pub workers: usize,
    pub policy: PolicyKind,
    pub frat5: f64,
    pub eta: f64,
    pub fares: Vec<f64>,
    pub horizon: usize,
    pub nu: f64,
    pub clamp_min: f64,
    pub clamp_max: f64,
    pub steps: usize,
    /// Overrides the scale preset when set.
    pub eta_samples: Option<usize>,
    /// Explicit sweep values; empty means sample per preset.
    pub eta_values: Vec<f64>,
    /// Episodes per parameter point, overriding the scale preset.
    pub episodes: Option<usize>,
    /// Explicit grid points; empty means the preset grid.
    pub frat5_points: Vec<f64>,
    pub frat5_interval: (f64, f64),
}

impl RunConfig {
    pub fn from_parts(command: Command, f: FileConfig) -> Result<RunConfig> {
        let scale = match f.scale.as_deref() {
            None => Scale::Desk,
            Some(s) => s
                .parse::<Scale>()
                .map_err(|e| usage(e.to_string()))?,
        };
        let policy = match f.policy.as_deref() {
            None => PolicyKind::Unified,
            Some(s) => s
                .parse::<PolicyKind>()
                .map_err(|e| usage(e.to_string()))?,
        };
        let default_clamp = Frat5Clamp::default();
        let ladder = FareStructure::default_ladder();
        let default_fares: Vec<f64> = (0..ladder.n())
            .map(|i| ladder.fare_dollars(i).expect("index in range"))
            .collect();
        let config = RunConfig {
            command,
            out: f.out.unwrap_or_else(|| PathBuf::from("results")),
            seed: f.seed.unwrap_or(42),
            scale,
            workers: f.workers.unwrap_or(0),
            policy,
            frat5: f.frat5.unwrap_or(2.56),
            eta: f.eta.unwrap_or(ETA_REFERENCE),
            fares: f.fares.unwrap_or(default_fares),
            horizon: f.horizon.unwrap_or(DEFAULT_HORIZON),
            nu: f.nu.unwrap_or(DEFAULT_NU),
            clamp_min: f.clamp_min.unwrap_or_else(|| default_clamp.min()),
            clamp_max: f.clamp_max.unwrap_or_else(|| default_clamp.max()),
            steps: f.steps.unwrap_or(DEFAULT_STEPS),
            eta_samples: f.eta_samples,
            eta_values: f.eta_values.unwrap_or_default(),
            episodes: f.episodes,
            frat5_points: f.frat5_points.unwrap_or_default(),
            frat5_interval: f.frat5_interval.unwrap_or(FRAT5_INTERVAL),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        match self.command {
            Command::Render => Ok(()),
            Command::Episode => self.episode_config().map(|_| ()),
            Command::SweepEta | Command::SweepFrat5 | Command::Detailed => {
                self.sweep_spec().map(|_| ())
            }
        }
    }

    /// Episode description; also the per-episode template of sweeps.
    pub fn episode_config(&self) -> Result<EpisodeConfig> {
        let structure =
            FareStructure::from_dollars(&self.fares).map_err(|e| usage(e.to_string()))?;
        let clamp = Frat5Clamp::new(self.clamp_min, self.clamp_max)
            .map_err(|e| usage(e.to_string()))?;
        let config = EpisodeConfig {
            structure,
            horizon: self.horizon,
            nu_true: self.nu,
            frat5_true: self.frat5,
            clamp,
            eta: self.eta,
            steps: self.steps,
            policy_kind: self.policy,
            seed: self.seed,
        };
        config.validate().map_err(|e| usage(e.to_string()))?;
        Ok(config)
    }

    /// Sweep description for the three experiment commands: the scale preset
    /// with any explicit overrides applied.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let mut spec = match self.command {
            Command::SweepEta => SweepSpec::eta_sweep(self.scale, self.seed),
            Command::SweepFrat5 => SweepSpec::frat5_grid(self.scale, self.seed),
            Command::Detailed => SweepSpec::detailed(self.scale, self.seed),
            other => {
                return Err(usage(format!(
                    "{} is not a sweep command",
                    other.as_str()
                )))
            }
        };
        spec.base = self.episode_config()?;
        spec.eta_fixed = self.eta;
        spec.frat5_interval = self.frat5_interval;
        if let Some(k) = self.eta_samples {
            spec.eta_samples = k;
        }
        if !self.eta_values.is_empty() {
            spec.eta_values = self.eta_values.clone();
        }
        if let Some(k) = self.episodes {
            spec.episodes_per_point = k;
        }
        if !self.frat5_points.is_empty() {
            spec.frat5_points = self.frat5_points.clone();
        }
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }

    /// The raw layer equivalent of this config, with every key spelled out.
    pub fn to_file(&self) -> FileConfig {
        FileConfig {
            out: Some(self.out.clone()),
            seed: Some(self.seed),
            scale: Some(self.scale.as_str().into()),
            workers: Some(self.workers),
            policy: Some(self.policy.as_str().into()),
            frat5: Some(self.frat5),
            eta: Some(self.eta),
            fares: Some(self.fares.clone()),
            horizon: Some(self.horizon),
            nu: Some(self.nu),
            clamp_min: Some(self.clamp_min),
            clamp_max: Some(self.clamp_max),
            steps: Some(self.steps),
            eta_samples: self.eta_samples,
            eta_values: (!self.eta_values.is_empty()).then(|| self.eta_values.clone()),
            episodes: self.episodes,
            frat5_points: (!self.frat5_points.is_empty()).then(|| self.frat5_points.clone()),
            frat5_interval: Some(self.frat5_interval),
            manifest_command: None,
            manifest_git: None,
            manifest_wall_seconds: None,
        }
    }
}

/// Renders the manifest for a finished run.
pub fn manifest_toml(config: &RunConfig, wall_seconds: f64) -> String {
    let mut file = config.to_file();
    file.manifest_command = Some(config.command.as_str().into());
    file.manifest_git = Some(env!("EWL_GIT_DESCRIBE").into());
    file.manifest_wall_seconds = Some(wall_seconds);
    toml::to_string_pretty(&file).expect("flat keys always serialize")
}

pub fn write_manifest(config: &RunConfig, wall_seconds: f64) -> Result<()> {
    fs::write(
        config.out.join(MANIFEST_FILE),
        manifest_toml(config, wall_seconds),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CliError;

    fn defaults(command: Command) -> RunConfig {
        RunConfig::from_parts(command, FileConfig::default()).unwrap()
    }

    #[test]
    fn defaults_resolve_for_every_command() {
        for command in [
            Command::Episode,
            Command::SweepEta,
            Command::SweepFrat5,
            Command::Detailed,
            Command::Render,
        ] {
            let c = defaults(command);
            assert_eq!(c.seed, 42);
            assert_eq!(c.scale, Scale::Desk);
            assert_eq!(c.horizon, 22);
            assert_eq!(c.fares.len(), 10);
        }
    }

    #[test]
    fn manifest_round_trips_to_equal_config() {
        let mut file = FileConfig::default();
        file.seed = Some(7);
        file.eta = Some(900.0);
        file.episodes = Some(12);
        file.frat5_points = Some(vec![2.1, 3.7]);
        let config = RunConfig::from_parts(Command::Detailed, file).unwrap();
        let text = manifest_toml(&config, 1.25);
        let parsed: FileConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed.manifest_command.as_deref(), Some("detailed"));
        let reloaded = RunConfig::from_parts(Command::Detailed, parsed).unwrap();
        assert_eq!(reloaded, config);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<FileConfig>("sed = 7\n").unwrap_err();
        assert!(err.to_string().contains("sed"));
    }

    #[test]
    fn cli_layer_wins_over_file_layer() {
        let cli = FileConfig {
            seed: Some(1),
            ..FileConfig::default()
        };
        let file = FileConfig {
            seed: Some(2),
            eta: Some(3.0),
            ..FileConfig::default()
        };
        let merged = cli.or(file);
        assert_eq!(merged.seed, Some(1));
        assert_eq!(merged.eta, Some(3.0));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let bad_frat5 = FileConfig {
            frat5: Some(0.9),
            ..FileConfig::default()
        };
        match RunConfig::from_parts(Command::Episode, bad_frat5) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("frat5"), "{msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }
        let bad_policy = FileConfig {
            policy: Some("aggressive".into()),
            ..FileConfig::default()
        };
        assert!(matches!(
            RunConfig::from_parts(Command::Episode, bad_policy),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn sweep_spec_applies_overrides() {
        let file = FileConfig {
            episodes: Some(9),
            eta_values: Some(vec![0.0, 100.0]),
            ..FileConfig::default()
        };
        let config = RunConfig::from_parts(Command::SweepEta, file).unwrap();
        let spec = config.sweep_spec().unwrap();
        assert_eq!(spec.episodes_per_point, 9);
        assert_eq!(spec.eta_values, vec![0.0, 100.0]);
    }
}
