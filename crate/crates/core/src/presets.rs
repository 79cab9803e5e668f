//! Named experiment presets and the model validation suite.

use std::fmt;

use crate::draw::SeedingPolicy;
use crate::engine::Played;
use crate::error::Result;
use crate::format::{FormatId, Stage};
use crate::mc::{simulate, Design, Observer, SimulationConfig};
use crate::metrics::PLACES;
use crate::strength::{PreRank, StrengthParams, WinModel, TEAMS};

/// Sample sizes at which the convergence study reports.
pub const CONVERGENCE_CHECKPOINTS: [u64; 13] = [
    1_000, 2_500, 5_000, 10_000, 25_000, 50_000, 100_000, 250_000, 500_000, 1_000_000, 2_500_000, 5_000_000, 10_000_000,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentPreset {
    Baseline,
    SensitivityAlpha,
    SensitivityBeta,
    Convergence,
    Validation,
}

impl ExperimentPreset {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentPreset::Baseline => "baseline",
            ExperimentPreset::SensitivityAlpha => "sensitivity_alpha",
            ExperimentPreset::SensitivityBeta => "sensitivity_beta",
            ExperimentPreset::Convergence => "convergence",
            ExperimentPreset::Validation => "validation",
        }
    }

    /// Named configurations; the name doubles as an output subdirectory.
    /// Validation is handled by [`run_validation`] and expands to nothing.
    pub fn configs(self, runs: u64, seed: u64, threads: Option<usize>) -> Result<Vec<(String, SimulationConfig)>> {
        let make = |name: String, model: WinModel, designs: Vec<Design>| {
            let mut c = SimulationConfig::new(runs, seed, model, designs);
            c.threads = threads;
            (name, c)
        };
        let jackson = |a: f64, b: f64| StrengthParams::new(a, b).map(WinModel::Jackson);
        Ok(match self {
            ExperimentPreset::Baseline => {
                vec![make("baseline".into(), WinModel::default(), Design::all_standard())]
            }
            ExperimentPreset::SensitivityAlpha => [3.0, 5.0]
                .into_iter()
                .map(|a| Ok(make(format!("alpha_{a}"), jackson(a, 24.0)?, Design::all_standard())))
                .collect::<Result<_>>()?,
            ExperimentPreset::SensitivityBeta => [18.0, 36.0]
                .into_iter()
                .map(|b| Ok(make(format!("beta_{b}"), jackson(4.0, b)?, Design::all_standard())))
                .collect::<Result<_>>()?,
            ExperimentPreset::Convergence => vec![make(
                "convergence".into(),
                WinModel::default(),
                vec![Design::new(FormatId::KO, SeedingPolicy::Random)],
            )],
            ExperimentPreset::Validation => Vec::new(),
        })
    }
}

impl fmt::Display for ExperimentPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Checkpoints of the convergence study that do not exceed `runs`. When
/// `runs` falls between checkpoints it is appended as the last one.
pub fn convergence_checkpoints(runs: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = CONVERGENCE_CHECKPOINTS.iter().copied().filter(|&c| c <= runs).collect();
    if cps.last() != Some(&runs) {
        cps.push(runs);
    }
    cps
}

/// Per-design statistics gathered by the validation suite.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureStats {
    pub runs: u64,
    /// `[team][place]` counts.
    pub places: Vec<[u64; PLACES]>,
    /// Runs whose top four were ranks 1 to 4 in order.
    pub ordered_top_four: u64,
    /// Runs in which ranks 1 and 2 met in a semifinal.
    pub top_two_semifinal: u64,
    /// Weakest pre-rank ever seen in a semifinal.
    pub max_semifinal_rank: u8,
}

impl StructureStats {
    fn new() -> Self {
        StructureStats {
            places: vec![[0; PLACES]; TEAMS],
            ..Default::default()
        }
    }

    fn observe(&mut self, played: &Played) {
        self.runs += 1;
        let places = played.result.places();
        for (k, team) in places.iter().enumerate() {
            self.places[team.index()][k] += 1;
        }
        if places.iter().enumerate().all(|(k, t)| t.index() == k) {
            self.ordered_top_four += 1;
        }
        let (one, two) = (PreRank::from_index(0), PreRank::from_index(1));
        let semis = played.log.matches().iter().filter(|m| m.stage == Stage::Semifinal);
        if semis.clone().any(|m| m.involves(one) && m.involves(two)) {
            self.top_two_semifinal += 1;
        }
        for m in semis {
            self.max_semifinal_rank = self.max_semifinal_rank.max(m.home.value()).max(m.away.value());
        }
    }

    fn merge(&mut self, other: &Self) {
        self.runs += other.runs;
        for (a, b) in self.places.iter_mut().zip(&other.places) {
            for k in 0..PLACES {
                a[k] += b[k];
            }
        }
        self.ordered_top_four += other.ordered_top_four;
        self.top_two_semifinal += other.top_two_semifinal;
        self.max_semifinal_rank = self.max_semifinal_rank.max(other.max_semifinal_rank);
    }

    pub fn place_frequency(&self, team: PreRank, place: usize) -> f64 {
        self.places[team.index()][place] as f64 / self.runs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureObserver(pub Vec<StructureStats>);

impl Observer for StructureObserver {
    fn observe(&mut self, _run: u64, design_index: usize, played: &Played) {
        self.0[design_index].observe(played);
    }

    fn merge(&mut self, later: Self) {
        for (a, b) in self.0.iter_mut().zip(&later.0) {
            StructureStats::merge(a, b);
        }
    }
}

/// Structure statistics for each design of `config`.
pub fn structure_stats(config: &SimulationConfig) -> Result<Vec<StructureStats>> {
    let n = config.designs.len();
    Ok(simulate(config, 0..config.runs, || {
        StructureObserver(vec![StructureStats::new(); n])
    })?
    .0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Largest pre-rank that can reach a semifinal under the deterministic model
/// with a random draw.
pub fn semifinal_rank_bound(format: FormatId) -> Option<u8> {
    match format {
        FormatId::KO => Some(7),
        FormatId::G64 | FormatId::G66 => Some(14),
        FormatId::G46 => Some(6),
        _ => None,
    }
}

/// Sanity checks of the engine under degenerate strength models.
pub fn run_validation(runs: u64, seed: u64, threads: Option<usize>) -> Result<Vec<CheckOutcome>> {
    let cfg = |model: WinModel, designs: Vec<Design>| {
        let mut c = SimulationConfig::new(runs, seed, model, designs);
        c.threads = threads;
        c
    };
    let mut out = Vec::new();

    let designs = Design::all_standard();
    let stats = structure_stats(&cfg(WinModel::Uniform, designs.clone()))?;
    for (design, s) in designs.iter().zip(&stats) {
        let worst = PreRank::all()
            .flat_map(|t| (0..PLACES).map(move |k| (t, k)))
            .map(|(t, k)| (s.place_frequency(t, k) - 1.0 / TEAMS as f64).abs())
            .fold(0.0, f64::max);
        out.push(CheckOutcome {
            name: format!("uniform placements {design}"),
            passed: worst <= 0.005,
            detail: format!("max |freq - 1/24| = {worst:.5}"),
        });
    }

    let seeded = |f| Design::new(f, SeedingPolicy::Seeded);
    let random = |f| Design::new(f, SeedingPolicy::Random);
    let designs = vec![
        seeded(FormatId::G66),
        seeded(FormatId::G46),
        seeded(FormatId::KO),
        seeded(FormatId::G64),
        random(FormatId::KO),
        random(FormatId::G64),
        random(FormatId::G66),
        random(FormatId::G46),
    ];
    let stats = structure_stats(&cfg(WinModel::Deterministic, designs.clone()))?;
    for (design, s) in designs.iter().zip(&stats) {
        match (design.seeding, design.format) {
            (SeedingPolicy::Seeded, FormatId::G66 | FormatId::G46) => out.push(CheckOutcome {
                name: format!("deterministic places {design}"),
                passed: s.ordered_top_four == s.runs,
                detail: format!("{} of {} runs finish 1-2-3-4", s.ordered_top_four, s.runs),
            }),
            (SeedingPolicy::Seeded, _) => {
                let freq = s.top_two_semifinal as f64 / s.runs as f64;
                out.push(CheckOutcome {
                    name: format!("deterministic 1 v 2 semifinal {design}"),
                    passed: (freq - 1.0 / 3.0).abs() <= 0.01,
                    detail: format!("frequency {freq:.4}"),
                });
            }
            (SeedingPolicy::Random, f) => {
                let bound = semifinal_rank_bound(f).unwrap_or(0);
                out.push(CheckOutcome {
                    name: format!("deterministic weakest semifinalist {design}"),
                    passed: s.max_semifinal_rank == bound,
                    detail: format!("max rank {} (bound {bound})", s.max_semifinal_rank),
                });
            }
        }
    }
    Ok(out)
}
