//! Run configuration and the field sources it names.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ymlattice_core::solver::SolverConfig;
use ymlattice_core::{
    random_connection, random_gauge, sum_gauge, Cochain, Connection, Domain, GaugeField, SumProfile, Topology,
};

use crate::CliError;

/// Where the starting connection comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectionSource {
    Zero,
    /// λ-coordinates uniform in `[-amplitude, amplitude]`, seeded by the run seed.
    Random,
    File(PathBuf),
}

/// Where the gauge field comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeSource {
    Identity,
    /// Independent random SU(2) element per site.
    Random,
    /// Random SU(2) element per sum label; satisfies the pairing conditions.
    SumProfile,
    File(PathBuf),
}

fn parse_source<T: Clone>(s: &str, named: &[(&str, T)], what: &str) -> Result<T, String> {
    if s == "file:" {
        return Err(format!("{what} source `file:` needs a path"));
    }
    named
        .iter()
        .find(|(name, _)| *name == s)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| {
            let names: Vec<_> = named.iter().map(|(n, _)| *n).collect();
            format!("unknown {what} source `{s}`; expected one of {names:?} or file:<path>")
        })
}

impl std::str::FromStr for ConnectionSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(path) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
            return Ok(Self::File(path.into()));
        }
        parse_source(s, &[("zero", Self::Zero), ("random", Self::Random)], "connection")
    }
}

impl std::str::FromStr for GaugeSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(path) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
            return Ok(Self::File(path.into()));
        }
        parse_source(
            s,
            &[
                ("identity", Self::Identity),
                ("random", Self::Random),
                ("sum_profile", Self::SumProfile),
            ],
            "gauge",
        )
    }
}

impl fmt::Display for ConnectionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Random => f.write_str("random"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl fmt::Display for GaugeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Random => f.write_str("random"),
            Self::SumProfile => f.write_str("sum_profile"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}
string_serde!(ConnectionSource);
string_serde!(GaugeSource);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub topology: Topology,
    pub sizes: [usize; 4],
    pub seed: u64,
    /// Coordinate bound of a random connection.
    pub amplitude: f64,
    pub connection: ConnectionSource,
    pub gauge: GaugeSource,
    /// `solver.seed` is replaced by `seed` when a run starts.
    pub solver: SolverConfig,
    /// Path of the JSON report; the final connection of a relaxation goes
    /// next to it with the extension `.connection.json`.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Sphere,
            sizes: [2, 2, 2, 2],
            seed: 7,
            amplitude: 1.0,
            connection: ConnectionSource::Random,
            gauge: GaugeSource::SumProfile,
            solver: SolverConfig::default(),
            output: None,
        }
    }
}

pub const DEFAULT_REPORT_PATH: &str = "ymlattice-report.json";

impl RunConfig {
    /// Parses a config; relative file sources are resolved against `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        if let Some(base) = base {
            let rebase = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            if let ConnectionSource::File(p) = &mut cfg.connection {
                rebase(p);
            }
            if let GaugeSource::File(p) = &mut cfg.gauge {
                rebase(p);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        Domain::new(self.sizes, self.topology).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks everything that can be checked without touching files.
    pub fn validate(&self) -> Result<Domain, CliError> {
        let domain = self.domain()?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(CliError::Config(format!(
                "amplitude must be finite and ≥ 0, got {}",
                self.amplitude
            )));
        }
        self.solver.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(domain)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            ..self.solver.clone()
        }
    }

    pub fn report_path(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| DEFAULT_REPORT_PATH.into())
    }

    pub fn connection_output_path(&self) -> PathBuf {
        self.report_path().with_extension("connection.json")
    }

    pub fn build_connection(&self, domain: Domain) -> Result<Connection, CliError> {
        match &self.connection {
            ConnectionSource::Zero => Ok(Connection::zero(domain)),
            ConnectionSource::Random => {
                random_connection(domain, self.amplitude, self.seed).map_err(|e| CliError::Config(e.to_string()))
            }
            ConnectionSource::File(path) => {
                let form = read_form(path, &domain, 1)?;
                Connection::new(form).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn build_gauge(&self, domain: Domain) -> Result<GaugeField, CliError> {
        let seed = self.seed.wrapping_add(GAUGE_SEED_OFFSET);
        match &self.gauge {
            GaugeSource::Identity => Ok(GaugeField::identity(domain)),
            GaugeSource::Random => Ok(random_gauge(domain, seed)),
            GaugeSource::SumProfile => Ok(sum_gauge(domain, SumProfile::Random, seed)),
            GaugeSource::File(path) => {
                let form = read_form(path, &domain, 0)?;
                GaugeField::new(form).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }
}

/// Keeps the gauge draws independent of the connection draws.
pub const GAUGE_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

fn read_form(path: &Path, domain: &Domain, degree: usize) -> Result<Cochain, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Cochain::deserialize_expecting(&bytes, domain, degree)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
