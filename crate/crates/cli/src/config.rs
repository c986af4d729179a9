//! Flat `key = value` experiment configurations.
//!
//! One entry per line, `#` starts a comment, lists are comma separated.
//! Every file needs `schema_version = 1` and a `kind`; the remaining keys
//! depend on the kind (see [`crate::experiments::KINDS`]). Unknown and
//! repeated keys are rejected.

use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

/// Diagnostics collected while reading a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration:\n  {}", .0.join("\n  "))]
pub struct ConfigError(pub Vec<String>);

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        Self(vec![msg.into()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    NormIdentity,
    Isometry,
    Moments,
    SpdeDistributed,
    SpdeBoundary,
    ThresholdSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        Self::NormIdentity,
        Self::Isometry,
        Self::Moments,
        Self::SpdeDistributed,
        Self::SpdeBoundary,
        Self::ThresholdSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NormIdentity => "norm-identity",
            Self::Isometry => "isometry",
            Self::Moments => "moments",
            Self::SpdeDistributed => "spde-distributed",
            Self::SpdeBoundary => "spde-boundary",
            Self::ThresholdSweep => "threshold-sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind '{s}'"))
    }
}

/// A parsed configuration. Keys are consumed by the typed getters; whatever
/// is left over when [`ExperimentConfig::finish`] runs is reported as unknown.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub name: Option<String>,
    pub output: Option<PathBuf>,
    /// key → (line number, raw value)
    entries: BTreeMap<String, (usize, String)>,
    used: BTreeSet<String>,
    canonical: String,
    errors: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// SHA-256 of the normalized `key = value` lines, in hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn consume(&mut self, key: &str) -> Option<(usize, String)> {
        self.used.insert(key.to_string());
        self.entries.get(key).cloned()
    }

    fn parse_at<T: FromStr>(&mut self, key: &str, line: usize, raw: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("line {line}: {key}: cannot parse '{raw}': {e}"));
                None
            }
        }
    }

    /// Required scalar.
    pub fn required<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match self.consume(key) {
            Some((l, raw)) => self.parse_at(key, l, &raw),
            None => {
                self.errors.push(format!("{key}: required key is missing"));
                None
            }
        }
    }

    /// Optional scalar with a default.
    pub fn optional<T: FromStr>(&mut self, key: &str, default: T) -> T
    where
        T::Err: fmt::Display,
    {
        self.maybe(key).unwrap_or(default)
    }

    /// Optional scalar without a default.
    pub fn maybe<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let (l, raw) = self.consume(key)?;
        self.parse_at(key, l, &raw)
    }

    /// Required non-empty comma-separated list.
    pub fn list<T: FromStr>(&mut self, key: &str) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        match self.consume(key) {
            Some((l, raw)) => self.parse_list(key, l, &raw),
            None => {
                self.errors.push(format!("{key}: required key is missing"));
                Vec::new()
            }
        }
    }

    /// Optional list; absent means `default`, present must be non-empty.
    pub fn optional_list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        match self.consume(key) {
            Some((l, raw)) => self.parse_list(key, l, &raw),
            None => default,
        }
    }

    fn parse_list<T: FromStr>(&mut self, key: &str, line: usize, raw: &str) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        let items: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if items.is_empty() {
            self.errors.push(format!("line {line}: {key}: empty parameter grid"));
        }
        items
            .into_iter()
            .filter_map(|item| self.parse_at(key, line, item))
            .collect()
    }

    /// Records a validation failure for `key`.
    pub fn reject(&mut self, key: &str, msg: impl fmt::Display) {
        match self.entries.get(key) {
            Some((l, _)) => self.errors.push(format!("line {l}: {key}: {msg}")),
            None => self.errors.push(format!("{key}: {msg}")),
        }
    }

    /// Fails on parse errors and on keys no getter asked for.
    pub fn finish(mut self) -> Result<(), ConfigError> {
        for (key, (line, _)) in &self.entries {
            if !self.used.contains(key) {
                self.errors
                    .push(format!("line {line}: unknown key '{key}' for kind {}", self.kind));
            }
        }
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(std::mem::take(&mut self.errors)))
        }
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut errors = Vec::new();
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(format!("line {line_no}: expected 'key = value', got '{line}'"));
                continue;
            };
            let key = k.trim().to_string();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                errors.push(format!("line {line_no}: invalid key '{}'", k.trim()));
                continue;
            }
            if let Some((first, _)) = entries.get(&key) {
                errors.push(format!("line {line_no}: key '{key}' repeats line {first}"));
                continue;
            }
            entries.insert(key, (line_no, v.trim().to_string()));
        }
        let canonical: String = entries.iter().map(|(k, (_, v))| format!("{k} = {v}\n")).collect();

        let take = |entries: &mut BTreeMap<String, (usize, String)>, key: &str| entries.remove(key);
        match take(&mut entries, "schema_version") {
            None => errors.push("schema_version: required key is missing".into()),
            Some((l, v)) => match v.parse::<u32>() {
                Ok(SCHEMA_VERSION) => {}
                Ok(other) => errors.push(format!(
                    "line {l}: schema_version {other} is not supported (expected {SCHEMA_VERSION})"
                )),
                Err(e) => errors.push(format!("line {l}: schema_version: {e}")),
            },
        }
        let kind = match take(&mut entries, "kind") {
            None => {
                errors.push("kind: required key is missing".into());
                None
            }
            Some((l, v)) => match v.parse::<ExperimentKind>() {
                Ok(k) => Some(k),
                Err(e) => {
                    errors.push(format!("line {l}: {e}"));
                    None
                }
            },
        };
        let name = take(&mut entries, "name").map(|(_, v)| v);
        let output = take(&mut entries, "output").map(|(_, v)| PathBuf::from(v));
        match kind {
            Some(kind) if errors.is_empty() => Ok(Self {
                kind,
                name,
                output,
                entries,
                used: BTreeSet::new(),
                canonical,
                errors,
            }),
            _ => Err(ConfigError(errors)),
        }
    }
}

/// `a:b` pairs such as `fbm:0.3` or `0.6:2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair<A, B>(pub A, pub B);

impl<A: FromStr, B: FromStr> FromStr for Pair<A, B>
where
    A::Err: fmt::Display,
    B::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected 'a:b', got '{s}'"))?;
        Ok(Pair(
            a.trim().parse().map_err(|e| format!("{e}"))?,
            b.trim().parse().map_err(|e| format!("{e}"))?,
        ))
    }
}

/// `a:b:c` triples such as `1:0.4:0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple<A, B, C>(pub A, pub B, pub C);

impl<A: FromStr, B: FromStr, C: FromStr> FromStr for Triple<A, B, C>
where
    A::Err: fmt::Display,
    B::Err: fmt::Display,
    C::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected 'a:b:c', got '{s}'"));
        };
        Ok(Triple(
            a.parse().map_err(|e| format!("{e}"))?,
            b.parse().map_err(|e| format!("{e}"))?,
            c.parse().map_err(|e| format!("{e}"))?,
        ))
    }
}
