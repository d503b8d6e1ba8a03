//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! id        = block_uniform
//! matrix    = block:n=2000,k=1000
//! samplers  = uniform, nnz_practical
//! fractions = 0.01, 0.02, 0.05
//! trials    = 50
//! targets   = 1, 4, n
//! seed      = 7
//! output    = results.csv
//! ```
//!
//! Targets are 1-based ranks in descending order: `1` is the largest
//! eigenvalue, `n` the smallest and `n-K` the (K+1)-th smallest.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::spec::MatrixSpec;
use crate::error::{Error, Result};
use crate::estimators::SamplerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetIndex {
    Rank(usize),
    /// `n - k`, counted from the smallest eigenvalue.
    FromBottom(usize),
}

impl TargetIndex {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let r = match self {
            TargetIndex::Rank(r) => r,
            TargetIndex::FromBottom(k) => n.saturating_sub(k),
        };
        if r == 0 || r > n {
            return Err(Error::config(
                "targets",
                format!("target `{self}` is outside 1..={n}"),
            ));
        }
        Ok(r)
    }
}

impl FromStr for TargetIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::config("targets", format!("cannot parse target `{s}`"));
        if s == "n" {
            return Ok(TargetIndex::FromBottom(0));
        }
        if let Some(rest) = s.strip_prefix("n-") {
            return rest.trim().parse().map(TargetIndex::FromBottom).map_err(|_| bad());
        }
        s.parse().map(TargetIndex::Rank).map_err(|_| bad())
    }
}

impl fmt::Display for TargetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetIndex::Rank(r) => write!(f, "{r}"),
            TargetIndex::FromBottom(0) => write!(f, "n"),
            TargetIndex::FromBottom(k) => write!(f, "n-{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub matrix: MatrixSpec,
    pub samplers: Vec<SamplerKind>,
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub targets: Vec<TargetIndex>,
    pub seed: u64,
    /// Constant of the practical nnz threshold.
    pub c2: f64,
    /// Constant used by the theorem-mode zeroing rules.
    pub c2_theorem: f64,
    pub eps: f64,
    pub entrywise_p: f64,
    pub output: Option<PathBuf>,
    /// Write wall-clock times into `elapsed_ms`; off by default so that
    /// output files are reproducible byte for byte.
    pub record_timing: bool,
}

pub const KEYS: [&str; 13] = [
    "id",
    "matrix",
    "samplers",
    "fractions",
    "trials",
    "targets",
    "seed",
    "c2",
    "c2_theorem",
    "eps",
    "entrywise_p",
    "output",
    "record_timing",
];

fn parse_scalar<T: FromStr>(field: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("invalid value `{}`", raw.trim())))
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    /// Config with defaults for everything except the matrix.
    pub fn new(matrix: MatrixSpec) -> Self {
        ExperimentConfig {
            id: "experiment".into(),
            matrix,
            samplers: vec![SamplerKind::Uniform],
            fractions: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3],
            trials: 50,
            targets: vec![
                TargetIndex::Rank(1),
                TargetIndex::Rank(4),
                TargetIndex::FromBottom(0),
            ],
            seed: 0,
            c2: 0.1,
            c2_theorem: 64.0,
            eps: 0.5,
            entrywise_p: 0.5,
            output: None,
            record_timing: false,
        }
    }

    /// Parses `key = value` lines. Later keys override earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = Self::parse_pairs(text)?;
        Self::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Raw `(key, value)` pairs of a config file, in file order.
    pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config("config", format!("line {}: expected `key = value`", lineno + 1))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Builds a config from key/value pairs; `matrix` is required.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let matrix = pairs
            .iter()
            .rev()
            .find(|(k, _)| *k == "matrix")
            .ok_or_else(|| Error::config("matrix", "missing"))?;
        let mut cfg = ExperimentConfig::new(MatrixSpec::parse(matrix.1)?);
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "id" => self.id = raw.trim().to_string(),
            "matrix" => self.matrix = MatrixSpec::parse(raw)?,
            "samplers" => {
                self.samplers = split_list(raw)
                    .map(|name| {
                        SamplerKind::from_name(name).ok_or_else(|| {
                            Error::config("samplers", format!("unknown sampler `{name}`"))
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "fractions" => {
                self.fractions = split_list(raw)
                    .map(|f| parse_scalar("fractions", f))
                    .collect::<Result<_>>()?
            }
            "targets" => self.targets = split_list(raw).map(str::parse).collect::<Result<_>>()?,
            "trials" => self.trials = parse_scalar(key, raw)?,
            "seed" => self.seed = parse_scalar(key, raw)?,
            "c2" => self.c2 = parse_scalar(key, raw)?,
            "c2_theorem" => self.c2_theorem = parse_scalar(key, raw)?,
            "eps" => self.eps = parse_scalar(key, raw)?,
            "entrywise_p" => self.entrywise_p = parse_scalar(key, raw)?,
            "output" => {
                let raw = raw.trim();
                self.output = (!raw.is_empty()).then(|| PathBuf::from(raw));
            }
            "record_timing" => self.record_timing = parse_scalar(key, raw)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains([',', '"', '\n', '\r']) {
            return Err(Error::config("id", "must be non-empty without commas, quotes or newlines"));
        }
        if self.samplers.is_empty() {
            return Err(Error::config("samplers", "empty list"));
        }
        if self.fractions.is_empty() {
            return Err(Error::config("fractions", "empty list"));
        }
        if let Some(f) = self.fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::config("fractions", format!("{f} is outside (0, 1]")));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.targets.is_empty() {
            return Err(Error::config("targets", "empty list"));
        }
        for (field, v) in [("c2", self.c2), ("c2_theorem", self.c2_theorem), ("eps", self.eps)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("{v} must be positive")));
            }
        }
        if !(self.entrywise_p > 0.0 && self.entrywise_p <= 1.0) {
            return Err(Error::config("entrywise_p", format!("{} is outside (0, 1]", self.entrywise_p)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        # block reproduction
        id = blk
        matrix = block:n=40,k=20
        samplers = uniform, nnz_practical,norm
        fractions = 0.1, 0.5,1
        trials = 3
        targets = 1, 4, n, n-1
        seed = 9   # trailing comment
        output = out.csv
    ";

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.id, "blk");
        assert_eq!(cfg.matrix, MatrixSpec::Block { n: 40, k: 20 });
        assert_eq!(
            cfg.samplers,
            vec![SamplerKind::Uniform, SamplerKind::NnzPractical, SamplerKind::NormTheorem]
        );
        assert_eq!(cfg.fractions, vec![0.1, 0.5, 1.0]);
        assert_eq!(cfg.trials, 3);
        assert_eq!(
            cfg.targets,
            vec![
                TargetIndex::Rank(1),
                TargetIndex::Rank(4),
                TargetIndex::FromBottom(0),
                TargetIndex::FromBottom(1)
            ]
        );
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.c2, 0.1);
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
        assert!(!cfg.record_timing);
    }

    fn field_of(text: &str) -> String {
        match ExperimentConfig::parse(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        let base = "matrix = block:n=4,k=2\n";
        assert_eq!(field_of("trials = 3"), "matrix");
        assert_eq!(field_of(&format!("{base}trials = 0")), "trials");
        assert_eq!(field_of(&format!("{base}trials = x")), "trials");
        assert_eq!(field_of(&format!("{base}fractions = 0.1, 1.5")), "fractions");
        assert_eq!(field_of(&format!("{base}fractions = 0")), "fractions");
        assert_eq!(field_of(&format!("{base}samplers = uniform, magic")), "samplers");
        assert_eq!(field_of(&format!("{base}targets = 1, top")), "targets");
        assert_eq!(field_of(&format!("{base}c2 = -1")), "c2");
        assert_eq!(field_of(&format!("{base}bogus = 1")), "bogus");
        assert_eq!(field_of(&format!("{base}id = a,b")), "id");
        assert_eq!(field_of("matrix = warp:n=3"), "matrix");
    }

    #[test]
    fn target_resolution() {
        assert_eq!(TargetIndex::Rank(1).resolve(10).unwrap(), 1);
        assert_eq!(TargetIndex::FromBottom(0).resolve(10).unwrap(), 10);
        assert_eq!(TargetIndex::FromBottom(3).resolve(10).unwrap(), 7);
        assert!(TargetIndex::Rank(11).resolve(10).is_err());
        assert!(TargetIndex::FromBottom(10).resolve(10).is_err());
        assert!(TargetIndex::Rank(0).resolve(10).is_err());
        for t in ["1", "n", "n-4"] {
            assert_eq!(t.parse::<TargetIndex>().unwrap().to_string(), t);
        }
    }
}
