use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{greedy_partition, mix_and_match_dimension, Partition, UserSpec, REPETITIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Private,
    Limited,
    HeteroSamples,
    HeteroComm,
    MixAndMatch,
}

impl ProtocolKind {
    /// Whether users contribute more than one sample.
    pub fn uses_sample_counts(self) -> bool {
        matches!(self, Self::HeteroSamples | Self::MixAndMatch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMode {
    Null,
    Spike,
    Spread,
    RandomDirection,
}

impl MeanMode {
    pub const ALL: [MeanMode; 4] = [Self::Null, Self::Spike, Self::Spread, Self::RandomDirection];

    pub fn index(self) -> u64 {
        self as u64
    }

    pub fn is_null(self) -> bool {
        self == Self::Null
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Null => "null",
            Self::Spike => "spike",
            Self::Spread => "spread",
            Self::RandomDirection => "random_direction",
        }
    }
}

impl fmt::Display for MeanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_modes() -> Vec<MeanMode> {
    MeanMode::ALL.to_vec()
}

/// One experiment: dimension, distance, shared-bit budget, protocol and users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub d: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub s: usize,
    pub protocol: ProtocolKind,
    pub users: Vec<UserSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
    #[serde(default = "default_modes")]
    pub mean_modes: Vec<MeanMode>,
}

impl PopulationConfig {
    pub fn new(d: usize, epsilon: f64, s: usize, protocol: ProtocolKind, users: Vec<UserSpec>) -> Self {
        Self {
            d,
            epsilon,
            s,
            protocol,
            users,
            partition: None,
            mean_modes: default_modes(),
        }
    }

    /// `n` identical users.
    pub fn homogeneous(d: usize, epsilon: f64, s: usize, protocol: ProtocolKind, n: usize, m: usize, ell: usize) -> Self {
        Self::new(d, epsilon, s, protocol, vec![UserSpec { m, ell }; n])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| Error::Parameter(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn n(&self) -> usize {
        self.users.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Dimension("d must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if self.users.is_empty() {
            return Err(Error::Parameter("users must be nonempty".into()));
        }
        for u in &self.users {
            u.validate()?;
        }
        if self.mean_modes.is_empty() {
            return Err(Error::Parameter("mean_modes must be nonempty".into()));
        }
        if let Some(p) = &self.partition {
            if self.protocol != ProtocolKind::MixAndMatch {
                return Err(Error::Parameter(
                    "a partition only applies to mix_and_match".into(),
                ));
            }
            p.validate(self.n())?;
        }
        Ok(())
    }

    /// The common budget of fixed-budget protocols.
    pub fn uniform_ell(&self) -> Result<usize> {
        let ell = self.users[0].ell;
        if self.users.iter().any(|u| u.ell != ell) {
            return Err(Error::Parameter(format!(
                "{:?} needs a common budget for all users",
                self.protocol
            )));
        }
        Ok(ell)
    }

    pub fn max_ell(&self) -> usize {
        self.users.iter().map(|u| u.ell).max().unwrap_or(0)
    }

    /// The configured partition, or the greedy one for the protocol's `7 L`.
    pub fn resolved_partition(&self) -> Result<Partition> {
        match &self.partition {
            Some(p) => Ok(p.clone()),
            None => {
                let dim = mix_and_match_dimension(self.d, self.s, self.max_ell())?;
                greedy_partition(&self.users, REPETITIONS * dim)
            }
        }
    }

    /// The user list repeated `factor` times (a given partition is repeated
    /// with shifted indices).
    pub fn scaled(&self, factor: usize) -> Self {
        let n = self.n();
        let mut out = self.clone();
        out.users = (0..factor).flat_map(|_| self.users.iter().copied()).collect();
        out.partition = self.partition.as_ref().map(|p| {
            Partition::new(
                (0..factor)
                    .flat_map(|r| p.groups.iter().map(move |g| g.iter().map(|&k| k + r * n).collect()))
                    .collect(),
            )
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_json() {
        let c = PopulationConfig::from_json(
            r#"{"d": 16, "epsilon": 0.5, "protocol": "hetero_comm", "users": [{"m": 1, "ell": 8}, {"m": 1, "ell": 16}]}"#,
        )
        .unwrap();
        assert_eq!(c.s, 0);
        assert_eq!(c.mean_modes, MeanMode::ALL.to_vec());
        assert_eq!(c.max_ell(), 16);
        assert!(c.uniform_ell().is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let base = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 4, 1, 2);
        let mut c = base.clone();
        c.epsilon = 0.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.users.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.partition = Some(Partition::singletons(4));
        assert!(c.validate().is_err());
        assert!(PopulationConfig::from_json(r#"{"d": 8}"#).is_err());
    }

    #[test]
    fn scaling_shifts_partition() {
        let mut c = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::MixAndMatch, 3, 7, 56);
        c.partition = Some(Partition::new(vec![vec![0, 2], vec![1]]));
        let big = c.scaled(2);
        assert_eq!(big.n(), 6);
        assert_eq!(
            big.partition.unwrap().groups,
            vec![vec![0, 2], vec![1], vec![3, 5], vec![4]]
        );
    }

    #[test]
    fn json_roundtrip() {
        let mut c = PopulationConfig::homogeneous(8, 0.5, 56, ProtocolKind::MixAndMatch, 2, 7, 56);
        c.partition = Some(Partition::singletons(2));
        assert_eq!(PopulationConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
