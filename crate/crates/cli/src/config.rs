use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hoplab_core::hulls::{MEMBERSHIP_TOL, RANK_TOL};
use hoplab_core::ops::Window;
use hoplab_core::reps::{RepKind, DEFAULT_THETA};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Group,
    Ops,
    Averaging,
    Hulls,
    Spectral,
    Fibers,
    Reps,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Group,
        Suite::Ops,
        Suite::Averaging,
        Suite::Hulls,
        Suite::Spectral,
        Suite::Fibers,
        Suite::Reps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Ops => "ops",
            Suite::Averaging => "averaging",
            Suite::Hulls => "hulls",
            Suite::Spectral => "spectral",
            Suite::Fibers => "fibers",
            Suite::Reps => "reps",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| ConfigError::new("suite", format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub membership: f64,
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: RANK_TOL,
            membership: MEMBERSHIP_TOL,
            exact: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub window: Window,
    pub theta: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub suites: Vec<Suite>,
    /// Largest power in the spectral suite.
    pub nmax: u32,
    /// Truncation size for the representation suite.
    pub dim: usize,
    /// Word-length cap for generated algebras; `None` means `2 * dim`.
    pub cap: Option<usize>,
    /// Restricts the representation suite to one kind.
    pub kind: Option<RepKind>,
    /// Degree per factor for the fiber suite.
    pub fiber_degree: usize,
    /// Record wall times; they make reports differ between runs.
    pub timings: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip, default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Json
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            window: Window::default(),
            theta: DEFAULT_THETA,
            seed: 0x5eed,
            tolerances: Tolerances::default(),
            suites: Suite::ALL.to_vec(),
            nmax: 4,
            dim: 16,
            cap: None,
            kind: None,
            fiber_degree: hoplab_core::fibers::DEFAULT_DEGREE,
            timings: false,
            output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = &self.window;
        Window::new(w.w_min, w.w_max, w.u_max, w.v_max)
            .map_err(|e| ConfigError::new("window", e.to_string()))?;
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(ConfigError::new(
                "theta",
                format!("{} is not in (0, 1)", self.theta),
            ));
        }
        for (field, t) in [
            ("tol-rank", self.tolerances.rank),
            ("tol-mem", self.tolerances.membership),
            ("tol-exact", self.tolerances.exact),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(ConfigError::new(field, format!("{t} is not in (0, 1)")));
            }
        }
        if self.nmax == 0 {
            return Err(ConfigError::new("nmax", "must be at least 1"));
        }
        if self.dim < 4 {
            return Err(ConfigError::new(
                "dim",
                format!("{} is below the minimum 4", self.dim),
            ));
        }
        if self.cap == Some(0) {
            return Err(ConfigError::new("cap", "must be at least 1"));
        }
        if self.fiber_degree < 2 {
            return Err(ConfigError::new("fiber-degree", "must be at least 2"));
        }
        if self.suites.is_empty() {
            return Err(ConfigError::new("suite", "no suite selected"));
        }
        Ok(())
    }

    pub fn cap(&self) -> usize {
        self.cap.unwrap_or(2 * self.dim)
    }
}

/// Parses `w_min,w_max,u_max,v_max`.
pub fn parse_window(s: &str) -> Result<Window, ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(ConfigError::new(
            "window",
            format!("expected four comma-separated integers, got {s:?}"),
        ));
    }
    let mut vals = [0i64; 4];
    for (slot, p) in vals.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| ConfigError::new("window", format!("{p:?} is not an integer")))?;
    }
    Window::new(vals[0], vals[1], vals[2], vals[3])
        .map_err(|e| ConfigError::new("window", e.to_string()))
}
