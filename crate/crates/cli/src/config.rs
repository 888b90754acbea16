//! Experiment configuration: systems, target labels and the flag/config-file
//! merge.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spinprep_core::mitigation::{DEFAULT_KS, MitigationMethod};
use spinprep_core::sim::{MAX_STATEVECTOR_QUBITS, NoiseModel, Shots};
use spinprep_core::{CouplingTree, HalfInt, TreeShape, enumerate_states};

use crate::error::{CliError, Result};
use crate::format::NoiseJson;

/// Noise model used when no `--noise` file is given.
pub const DEFAULT_NOISE_JSON: &str = include_str!("../data/default_noise.json");

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Chain(usize),
    Bowtie,
}

impl System {
    pub fn n_qubits(self) -> usize {
        match self {
            System::Chain(n) => n,
            System::Bowtie => 5,
        }
    }

    pub fn shape(self) -> TreeShape {
        match self {
            System::Chain(n) => TreeShape::chain(n).expect("chain length checked at parse time"),
            System::Bowtie => TreeShape::bowtie(),
        }
    }

    /// Every `(tree, m)` state of the system in canonical order.
    pub fn states(self) -> Result<Vec<(CouplingTree, HalfInt)>> {
        Ok(enumerate_states(&self.shape())?)
    }

    /// Label keys for the internal nodes in post-order.
    pub fn label_keys(self) -> Vec<String> {
        match self {
            System::Chain(n) => (2..=n).map(|k| if k == n { "l".to_string() } else { prefix_key(k) }).collect(),
            System::Bowtie => ["lL", "lLC", "lR", "l"].map(String::from).to_vec(),
        }
    }

    /// Parses `"l01=1,l=3/2,m=-1/2"` style labels.
    pub fn parse_target(self, text: &str) -> Result<(CouplingTree, HalfInt)> {
        let mut pairs = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("expected key=value in target, got {part:?}")))?;
            let v: HalfInt = v.parse()?;
            pairs.push((k.trim().to_string(), v));
        }
        let keys = self.label_keys();
        let lookup = |key: &str, alias: Option<&str>| {
            pairs
                .iter()
                .find(|(k, _)| k == key || Some(k.as_str()) == alias)
                .map(|&(_, v)| v)
                .ok_or_else(|| CliError::config(format!("target is missing {key:?}")))
        };
        if let Some((k, _)) = pairs
            .iter()
            .find(|(k, _)| k != "m" && !keys.contains(k) && !(matches!(self, System::Chain(n) if *k == prefix_key(n))))
        {
            return Err(CliError::config(format!("unknown label {k:?} for this system (expected {keys:?} and m)")));
        }
        let full = match self {
            System::Chain(n) => Some(prefix_key(n)),
            System::Bowtie => None,
        };
        let mut spins = Vec::with_capacity(keys.len());
        for key in &keys {
            let alias = if key == "l" { full.as_deref() } else { None };
            spins.push(lookup(key, alias)?);
        }
        let m = lookup("m", None)?;
        let tree = CouplingTree::from_shape(&self.shape(), &spins)?;
        spinprep_core::SpinLabel::new(tree.spin(), m)?;
        Ok((tree, m))
    }

    pub fn format_target(self, tree: &CouplingTree, m: HalfInt) -> String {
        let mut parts: Vec<String> =
            self.label_keys().iter().zip(tree.labels()).map(|(k, l)| format!("{k}={l}")).collect();
        parts.push(format!("m={m}"));
        parts.join(",")
    }
}

fn prefix_key(k: usize) -> String {
    let mut s = String::from("l");
    for q in 0..k {
        s.push_str(&q.to_string());
    }
    s
}

impl FromStr for System {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "bowtie-5" || s == "bowtie" {
            return Ok(System::Bowtie);
        }
        let n = s
            .strip_prefix("chain-")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| CliError::config(format!("unknown system {s:?} (expected chain-N or bowtie-5)")))?;
        if !(1..=MAX_STATEVECTOR_QUBITS).contains(&n) {
            return Err(CliError::config(format!("chain length must be 1..={MAX_STATEVECTOR_QUBITS}, got {n}")));
        }
        Ok(System::Chain(n))
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Chain(n) => write!(f, "chain-{n}"),
            System::Bowtie => f.write_str("bowtie-5"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Erc,
    VqeRy,
    VqeTimeevo,
}

impl Method {
    pub fn default_depth(self) -> usize {
        match self {
            Method::Erc => 0,
            Method::VqeRy => 3,
            Method::VqeTimeevo => 2,
        }
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erc" => Ok(Method::Erc),
            "vqe-ry" => Ok(Method::VqeRy),
            "vqe-timeevo" => Ok(Method::VqeTimeevo),
            _ => Err(CliError::config(format!("unknown method {s:?} (expected erc, vqe-ry or vqe-timeevo)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Erc => "erc",
            Method::VqeRy => "vqe-ry",
            Method::VqeTimeevo => "vqe-timeevo",
        })
    }
}

/// `"exact"`, `0` (also exact) or a positive shot count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotsArg(pub Shots);

impl FromStr for ShotsArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotsArg(Shots::Exact));
        }
        match s.parse::<u64>() {
            Ok(0) => Ok(ShotsArg(Shots::Exact)),
            Ok(k) => Ok(ShotsArg(Shots::Finite(k))),
            Err(_) => Err(CliError::config(format!("shots must be a count or \"exact\", got {s:?}"))),
        }
    }
}

impl Serialize for ShotsArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Finite(k) => s.serialize_u64(k),
        }
    }
}

impl<'de> Deserialize<'de> for ShotsArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(k) => Ok(ShotsArg(if k == 0 { Shots::Exact } else { Shots::Finite(k) })),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MitigationArg {
    #[default]
    Cls,
    Inversion,
}

impl From<MitigationArg> for MitigationMethod {
    fn from(m: MitigationArg) -> Self {
        match m {
            MitigationArg::Cls => MitigationMethod::ConstrainedLeastSquares,
            MitigationArg::Inversion => MitigationMethod::Inversion,
        }
    }
}

impl FromStr for MitigationArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cls" => Ok(MitigationArg::Cls),
            "inversion" => Ok(MitigationArg::Inversion),
            _ => Err(CliError::config(format!("unknown mitigation method {s:?} (expected cls or inversion)"))),
        }
    }
}

/// Every setting a command may read. Missing fields take defaults; the JSON
/// config file uses the same field names as the long flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: Option<String>,
    pub target: Option<String>,
    pub method: Option<Method>,
    pub depth: Option<usize>,
    pub reps: Option<usize>,
    pub noise: Option<PathBuf>,
    pub shots: Option<ShotsArg>,
    pub ks: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub em: Option<bool>,
    pub re: Option<bool>,
    pub mitigation: Option<MitigationArg>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            system: other.system.or(self.system),
            target: other.target.or(self.target),
            method: other.method.or(self.method),
            depth: other.depth.or(self.depth),
            reps: other.reps.or(self.reps),
            noise: other.noise.or(self.noise),
            shots: other.shots.or(self.shots),
            ks: other.ks.or(self.ks),
            seed: other.seed.or(self.seed),
            restarts: other.restarts.or(self.restarts),
            em: other.em.or(self.em),
            re: other.re.or(self.re),
            mitigation: other.mitigation.or(self.mitigation),
            out: other.out.or(self.out),
        }
    }
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(serialize_with = "display")]
    pub system: System,
    /// `None` runs every state of the system.
    pub target: Option<String>,
    pub method: Method,
    pub depth: usize,
    pub reps: usize,
    pub noise_path: Option<PathBuf>,
    pub noise: NoiseJson,
    pub shots: ShotsArg,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub em: bool,
    pub re: bool,
    pub mitigation: MitigationArg,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile) -> Result<Self> {
        let system: System = file.system.as_deref().ok_or_else(|| CliError::config("--system is required"))?.parse()?;
        let method = file.method.unwrap_or(Method::Erc);
        let noise = match &file.noise {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
                serde_json::from_str::<NoiseJson>(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
            }
            None => serde_json::from_str(DEFAULT_NOISE_JSON).expect("bundled noise file parses"),
        };
        noise.to_model()?;
        let ks = file.ks.unwrap_or_else(|| DEFAULT_KS.to_vec());
        let reps = file.reps.unwrap_or(1);
        if reps == 0 {
            return Err(CliError::config("--reps must be at least 1"));
        }
        let restarts = file.restarts.unwrap_or(DEFAULT_RESTARTS);
        if restarts == 0 {
            return Err(CliError::config("--restarts must be at least 1"));
        }
        let cfg = ExperimentConfig {
            system,
            target: file.target.filter(|t| !t.trim().is_empty() && t.trim() != "all"),
            method,
            depth: file.depth.unwrap_or(method.default_depth()),
            reps,
            noise_path: file.noise,
            noise,
            shots: file.shots.unwrap_or(ShotsArg(Shots::Finite(DEFAULT_SHOTS))),
            ks,
            seed: file.seed.unwrap_or(0),
            restarts,
            em: file.em.unwrap_or(true),
            re: file.re.unwrap_or(true),
            mitigation: file.mitigation.unwrap_or_default(),
            out: file.out,
        };
        // Labels are checked before any simulation starts.
        cfg.targets()?;
        Ok(cfg)
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise.to_model().expect("validated in resolve")
    }

    pub fn targets(&self) -> Result<Vec<(CouplingTree, HalfInt)>> {
        match &self.target {
            Some(t) => Ok(vec![self.system.parse_target(t)?]),
            None => self.system.states(),
        }
    }
}
