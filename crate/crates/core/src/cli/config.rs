//! Pipeline configuration, read from JSON. Every field has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counter::DEFAULT_COUNT_BUDGET;
use crate::quartic::DEFAULT_PROBE_BUDGET;

/// A curve on the reduction whose class is fed to the quotient trick and
/// the Gram matrix. Its genus and degree are inputs; containment in the
/// surface is checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownCurve {
    pub label: String,
    /// Equations in `x, y, z, w` cutting out the curve.
    pub equations: Vec<String>,
    pub degree: i64,
    #[serde(default)]
    pub genus: i64,
    /// Frobenius permutes `orbit` conjugates cyclically.
    #[serde(default = "one_u32")]
    pub orbit: u32,
    #[serde(default = "one_i8")]
    pub sign: i8,
}

fn one_u32() -> u32 {
    1
}

fn one_i8() -> i8 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeConfig {
    pub p: u64,
    /// Counts over `GF(p^n)` for `n = 1..=max_n`.
    pub max_n: u32,
    #[serde(default)]
    pub known: Vec<KnownCurve>,
    /// Include the hyperplane class among the known classes.
    #[serde(default = "yes")]
    pub hyperplane: bool,
    /// Intersection numbers between distinct known curves.
    #[serde(default)]
    pub pairings: Vec<(String, String, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub primes: Vec<PrimeConfig>,
    pub threads: Option<usize>,
    /// Cap on `p^{2n}` per count.
    pub count_budget: u64,
    /// Cap on `p^{3k}` for searches over `P^3(GF(p^k))`.
    pub probe_budget: u64,
    /// Deepest extension searched for singular points.
    pub probe_depth: u32,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    /// `verify` recounts `n = 1..=spot_check_n` at every prime.
    pub spot_check_n: u32,
    /// Good primes in the reduction-mod-p torsion test.
    pub reduction_primes: usize,
    /// Search: candidates sampled per prime.
    pub search_budget: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            primes: vec![
                PrimeConfig {
                    p: 2,
                    max_n: 10,
                    known: vec![KnownCurve {
                        label: "C".into(),
                        equations: vec!["w".into(), "z^2 + x*y".into()],
                        degree: 2,
                        genus: 0,
                        orbit: 1,
                        sign: 1,
                    }],
                    hyperplane: true,
                    pairings: vec![],
                },
                PrimeConfig {
                    p: 3,
                    max_n: 10,
                    known: vec![KnownCurve {
                        label: "L".into(),
                        equations: vec!["w".into(), "z".into()],
                        degree: 1,
                        genus: 0,
                        orbit: 1,
                        sign: 1,
                    }],
                    hyperplane: true,
                    pairings: vec![],
                },
            ],
            threads: None,
            count_budget: DEFAULT_COUNT_BUDGET as u64,
            probe_budget: DEFAULT_PROBE_BUDGET as u64,
            probe_depth: 4,
            seed: 0,
            cache_dir: None,
            spot_check_n: 4,
            reduction_primes: crate::genus1::torsion::DEFAULT_REDUCTION_PRIMES,
            search_budget: 8,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("parsing {0}: {1}")]
    Json(PathBuf, serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.into(), e))?;
        let c: Config = serde_json::from_str(&text).map_err(|e| ConfigError::Json(path.into(), e))?;
        c.validate()?;
        Ok(c)
    }

    /// The rank argument compares two distinct primes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.primes.len() != 2 {
            return Err(ConfigError::Invalid(format!(
                "exactly two primes are compared, got {}",
                self.primes.len()
            )));
        }
        if self.primes[0].p == self.primes[1].p {
            return Err(ConfigError::Invalid(format!(
                "both reductions are taken at p = {}; distinct primes are required",
                self.primes[0].p
            )));
        }
        for pc in &self.primes {
            if !crate::arith::is_prime_u64(pc.p) {
                return Err(ConfigError::Invalid(format!("{} is not prime", pc.p)));
            }
            if pc.max_n == 0 {
                return Err(ConfigError::Invalid(format!("max_n = 0 at p = {}", pc.p)));
            }
        }
        Ok(())
    }

    pub fn prime(&self, p: u64) -> Option<&PrimeConfig> {
        self.primes.iter().find(|c| c.p == p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_validate() {
        let c = Config::default();
        c.validate().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Config>(&s).unwrap(), c);
        // missing fields take defaults
        let partial: Config = serde_json::from_str(r#"{"seed": 7}"#).unwrap();
        assert_eq!(partial.seed, 7);
        assert_eq!(partial.primes, c.primes);
    }

    #[test]
    fn same_prime_rejected() {
        let mut c = Config::default();
        c.primes[1].p = 2;
        assert!(c.validate().is_err());
        c.primes[1].p = 4;
        assert!(c.validate().is_err());
    }
}
