//! Pairwise win probabilities from pre-tournament ranks.
//!
//! Team `i` beats team `j` with probability `1 / (1 + ((i + beta) / (j + beta))^alpha)`.
//! The ratio is formed before exponentiation so large exponents stay finite.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Number of participating teams.
pub const TEAMS: usize = 24;

/// Pre-tournament rank, 1 = strongest. Doubles as the team identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PreRank(u8);

impl PreRank {
    pub fn new(value: i64) -> Result<Self> {
        if (1..=TEAMS as i64).contains(&value) {
            Ok(PreRank(value as u8))
        } else {
            Err(SimError::InvalidRank(value))
        }
    }

    /// Builds a rank from a zero-based index. Panics if `index >= 24`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < TEAMS, "team index {index} out of range");
        PreRank(index as u8 + 1)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    /// All 24 ranks in strength order.
    pub fn all() -> impl Iterator<Item = PreRank> + Clone {
        (0..TEAMS).map(PreRank::from_index)
    }
}

impl TryFrom<u8> for PreRank {
    type Error = SimError;

    fn try_from(value: u8) -> Result<Self> {
        PreRank::new(value as i64)
    }
}

impl From<PreRank> for u8 {
    fn from(rank: PreRank) -> u8 {
        rank.0
    }
}

impl fmt::Display for PreRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthParams {
    /// Dispersion exponent; larger values separate the teams more.
    pub alpha: f64,
    /// Offset that damps the advantage of the very top ranks.
    pub beta: f64,
}

impl StrengthParams {
    pub const BASELINE: StrengthParams = StrengthParams { alpha: 4.0, beta: 24.0 };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let params = StrengthParams { alpha, beta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !value.is_finite() || value < 0.0 {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

impl Default for StrengthParams {
    fn default() -> Self {
        StrengthParams::BASELINE
    }
}

/// Source of match-win probabilities for a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WinModel {
    /// Rank-based model parameterized by `(alpha, beta)`.
    Jackson(StrengthParams),
    /// Every match is a coin flip.
    Uniform,
    /// The better-ranked team always wins.
    Deterministic,
}

impl WinModel {
    pub fn matrix(&self) -> Result<ProbabilityMatrix> {
        match self {
            WinModel::Jackson(params) => ProbabilityMatrix::from_params(*params),
            WinModel::Uniform => Ok(ProbabilityMatrix::uniform()),
            WinModel::Deterministic => Ok(ProbabilityMatrix::deterministic()),
        }
    }
}

impl Default for WinModel {
    fn default() -> Self {
        WinModel::Jackson(StrengthParams::BASELINE)
    }
}

impl fmt::Display for WinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WinModel::Jackson(p) => write!(f, "alpha={} beta={}", p.alpha, p.beta),
            WinModel::Uniform => f.write_str("uniform"),
            WinModel::Deterministic => f.write_str("deterministic"),
        }
    }
}

/// Probability that `i` defeats `j`.
pub fn win_probability(i: PreRank, j: PreRank, params: StrengthParams) -> Result<f64> {
    params.validate()?;
    Ok(jackson(i, j, params))
}

fn jackson(i: PreRank, j: PreRank, params: StrengthParams) -> f64 {
    if i == j {
        return 0.5;
    }
    let ratio = (f64::from(i.0) + params.beta) / (f64::from(j.0) + params.beta);
    1.0 / (1.0 + ratio.powf(params.alpha))
}

/// Precomputed 24x24 table of win probabilities; row = first team.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    entries: [[f64; TEAMS]; TEAMS],
}

impl ProbabilityMatrix {
    pub fn from_params(params: StrengthParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::from_fn(|i, j| jackson(i, j, params)))
    }

    /// Every match is a coin flip.
    pub fn uniform() -> Self {
        Self::from_fn(|_, _| 0.5)
    }

    /// The better-ranked team always wins.
    pub fn deterministic() -> Self {
        Self::from_fn(|i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Greater => 0.0,
        })
    }

    /// Builds a matrix from the upper triangle of `f`; the lower triangle is
    /// filled by complementarity and the diagonal is 0.5.
    pub fn from_fn(mut f: impl FnMut(PreRank, PreRank) -> f64) -> Self {
        let mut entries = [[0.5; TEAMS]; TEAMS];
        for i in PreRank::all() {
            for j in PreRank::all().skip(i.index() + 1) {
                let p = f(i, j);
                entries[i.index()][j.index()] = p;
                entries[j.index()][i.index()] = 1.0 - p;
            }
        }
        ProbabilityMatrix { entries }
    }

    pub fn get(&self, i: PreRank, j: PreRank) -> f64 {
        self.entries[i.index()][j.index()]
    }

    pub fn row(&self, i: PreRank) -> &[f64; TEAMS] {
        &self.entries[i.index()]
    }
}

/// Convenience wrapper matching the free-function form of [`win_probability`].
pub fn probability_matrix(params: StrengthParams) -> Result<ProbabilityMatrix> {
    ProbabilityMatrix::from_params(params)
}
