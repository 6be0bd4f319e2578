use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Sensing,
    Completion,
    Image,
    OnebitSynth,
    OnebitMovielens,
    BenchSvd,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Sensing => "sensing",
            Task::Completion => "completion",
            Task::Image => "image",
            Task::OnebitSynth => "onebit-synth",
            Task::OnebitMovielens => "onebit-movielens",
            Task::BenchSvd => "bench-svd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    #[default]
    Gaussian,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Link {
    #[default]
    Logistic,
    Probit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Regularized bi-factored descent.
    #[default]
    Bfgd,
    BfgdSmooth,
    Svp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    #[default]
    Spectral,
    Random,
}

fn default_sample_factor() -> f64 {
    10.0
}

fn default_noise_sigma() -> f64 {
    0.244
}

fn default_alpha() -> f64 {
    1.0
}

fn default_trials() -> usize {
    5
}

/// One experiment, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output file stem; defaults to the task name.
    #[serde(default)]
    pub name: Option<String>,
    pub task: Task,
    /// Inferred from the input for ingestion tasks.
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    pub rank: usize,
    /// `C` in `p = C·n·r`.
    #[serde(default = "default_sample_factor")]
    pub sample_factor: f64,
    #[serde(default)]
    pub map: MapKind,
    /// Observed fraction for completion, image and 1-bit tasks.
    #[serde(default)]
    pub observe_fraction: Option<f64>,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    #[serde(default)]
    pub link: Link,
    /// `‖X*‖_∞` for synthetic 1-bit instances.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub reg_coefficient: Option<f64>,
    #[serde(default)]
    pub init: InitKind,
    #[serde(default)]
    pub init_seed: Option<u64>,
    /// SVP step; defaults to 1/3.
    #[serde(default)]
    pub mu_step: Option<f64>,
    #[serde(default)]
    pub image_path: Option<PathBuf>,
    #[serde(default)]
    pub ratings_path: Option<PathBuf>,
    #[serde(default)]
    pub holdout: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Fill the `elapsed_s` trace column. Off by default so that reruns are
    /// byte-identical.
    #[serde(default)]
    pub record_elapsed: bool,
}

impl ExperimentConfig {
    /// A config with all optional fields at their defaults.
    pub fn new(task: Task, m: usize, n: usize, rank: usize) -> Self {
        Self {
            name: None,
            task,
            m,
            n,
            rank,
            sample_factor: default_sample_factor(),
            map: MapKind::default(),
            observe_fraction: None,
            noise_sigma: default_noise_sigma(),
            link: Link::default(),
            alpha: default_alpha(),
            solver: SolverKind::default(),
            seed: 0,
            tol: None,
            max_iters: None,
            step: None,
            lambda: None,
            reg_coefficient: None,
            init: InitKind::default(),
            init_seed: None,
            mu_step: None,
            image_path: None,
            ratings_path: None,
            holdout: 0,
            trials: default_trials(),
            record_elapsed: false,
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn stem(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.task.as_str().to_string())
    }

    /// Observed fraction, with the task's default when unset.
    pub fn fraction(&self) -> f64 {
        self.observe_fraction.unwrap_or(match self.task {
            Task::Image => 0.35,
            _ => 0.25,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.rank == 0 {
            return bad("rank must be positive".into());
        }
        let synthetic = matches!(self.task, Task::Sensing | Task::Completion | Task::OnebitSynth | Task::BenchSvd);
        if synthetic && self.m == 0 {
            return bad(format!("task {} needs m > 0", self.task.as_str()));
        }
        if synthetic && self.task != Task::BenchSvd && self.n == 0 {
            return bad(format!("task {} needs n > 0", self.task.as_str()));
        }
        let f = self.fraction();
        if !(f > 0.0 && f <= 1.0) {
            return bad(format!("observe_fraction must lie in (0, 1], got {f}"));
        }
        if !(self.sample_factor > 0.0) {
            return bad(format!("sample_factor must be positive, got {}", self.sample_factor));
        }
        if !(self.noise_sigma > 0.0) {
            return bad(format!("noise_sigma must be positive, got {}", self.noise_sigma));
        }
        if !(self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.task == Task::Image && self.image_path.is_none() {
            return bad("image task needs image_path".into());
        }
        if self.task == Task::OnebitMovielens && self.ratings_path.is_none() {
            return bad("onebit-movielens task needs ratings_path".into());
        }
        Ok(())
    }

    /// Seed of the task's RNG stream: `seed + hash(task)`.
    pub fn stream_seed(&self) -> u64 {
        self.seed.wrapping_add(task_hash(self.task.as_str()))
    }
}

/// 64-bit FNV-1a; stable across platforms and toolchains.
pub fn task_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
