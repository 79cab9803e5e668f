//! Parallel Monte Carlo driver.
//!
//! Runs are independent: run `i` derives all its randomness from
//! `(master_seed, i)`. One pair of outcome tables is drawn per run and shared
//! by every design (common random numbers); group draws and tie-breaks use
//! substreams tagged by the design itself, so adding or removing a design
//! never changes another design's results. Runs are processed in fixed-size
//! chunks and chunk results are merged in chunk order.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::draw::{draw_groups, SeedingPolicy};
use crate::engine::{play_with, Played, TableOracle};
use crate::error::{Result, SimError};
use crate::format::{FormatId, FormatSpec};
use crate::metrics::{Accumulator, MetricsReport};
use crate::outcomes::{generate_outcomes, substream, OutcomeTables, StreamKind};
use crate::strength::{ProbabilityMatrix, WinModel};

/// A tournament format together with its seeding policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Design {
    pub format: FormatId,
    pub seeding: SeedingPolicy,
}

impl Design {
    pub const fn new(format: FormatId, seeding: SeedingPolicy) -> Self {
        Design { format, seeding }
    }

    /// The nine columns of the baseline comparison: RR, then each group
    /// format seeded and unseeded.
    pub fn all_standard() -> Vec<Design> {
        let mut designs = vec![Design::new(FormatId::RR, SeedingPolicy::Random)];
        for format in &FormatId::STANDARD[1..] {
            for seeding in SeedingPolicy::BOTH {
                designs.push(Design::new(*format, seeding));
            }
        }
        designs
    }

    /// Column label such as `KO/S`; the round robin has no draw and is just `RR`.
    pub fn label(&self) -> String {
        match self.format {
            FormatId::RR => "RR".to_string(),
            f => format!("{f}/{}", self.seeding.short()),
        }
    }

    /// File-name friendly label, e.g. `ko_seeded`.
    pub fn slug(&self) -> String {
        match self.format {
            FormatId::RR => "rr".to_string(),
            f => format!("{}_{}", f.name().to_ascii_lowercase(), self.seeding),
        }
    }

    fn tag(&self) -> u16 {
        let seeding = match self.format {
            FormatId::RR => 0,
            _ => self.seeding.code(),
        };
        u16::from(self.format.code()) << 8 | u16::from(seeding)
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub runs: u64,
    pub master_seed: u64,
    pub model: WinModel,
    pub designs: Vec<Design>,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(runs: u64, master_seed: u64, model: WinModel, designs: Vec<Design>) -> Self {
        SimulationConfig {
            runs,
            master_seed,
            model,
            designs,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(SimError::Config("run count must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(SimError::Config("thread count must be positive".into()));
        }
        if let WinModel::Jackson(params) = self.model {
            params.validate()?;
        }
        Ok(())
    }
}

/// Per-run hook for anything beyond the standard metrics.
pub trait Observer: Send {
    fn observe(&mut self, run_index: u64, design_index: usize, played: &Played);

    /// Folds a later chunk into this one.
    fn merge(&mut self, later: Self)
    where
        Self: Sized;
}

/// Standard metric accumulators, one per design.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsObserver(pub Vec<Accumulator>);

impl Observer for MetricsObserver {
    fn observe(&mut self, _run: u64, design_index: usize, played: &Played) {
        self.0[design_index].accumulate(&played.result);
    }

    fn merge(&mut self, later: Self) {
        for (a, b) in self.0.iter_mut().zip(&later.0) {
            a.merge(b);
        }
    }
}

const CHUNK_RUNS: u64 = 2048;

/// Outcome tables of run `run_index`.
pub fn run_outcomes(matrix: &ProbabilityMatrix, master_seed: u64, run_index: u64) -> OutcomeTables {
    generate_outcomes(matrix, &mut substream(master_seed, run_index, StreamKind::Outcomes, 0))
}

/// Plays one design in one run, exactly as the driver does.
pub fn replay(
    design: Design,
    spec: &FormatSpec,
    outcomes: &OutcomeTables,
    master_seed: u64,
    run_index: u64,
) -> Result<Played> {
    let tag = design.tag();
    let assignment = draw_groups(
        design.seeding,
        spec,
        &mut substream(master_seed, run_index, StreamKind::Draw, tag),
    );
    let mut tie_rng = substream(master_seed, run_index, StreamKind::TieBreak, tag);
    let mut oracle = TableOracle {
        tables: outcomes,
        tie_rng: &mut tie_rng,
    };
    play_with(spec, &assignment, &mut oracle).map_err(|e| e.in_run(run_index))
}

/// Runs `runs` through every design of `config`, feeding an observer built by `make`.
pub fn simulate<O, F>(config: &SimulationConfig, runs: Range<u64>, make: F) -> Result<O>
where
    O: Observer,
    F: Fn() -> O + Sync,
{
    config.validate()?;
    let matrix = config.model.matrix()?;
    let specs: Vec<(Design, FormatSpec)> = config
        .designs
        .iter()
        .map(|d| Ok((*d, d.format.spec()?)))
        .collect::<Result<_>>()?;

    let chunk = |start: u64| -> Result<O> {
        let mut obs = make();
        for run in start..(start + CHUNK_RUNS).min(runs.end) {
            let outcomes = run_outcomes(&matrix, config.master_seed, run);
            for (index, (design, spec)) in specs.iter().enumerate() {
                let played = replay(*design, spec, &outcomes, config.master_seed, run)?;
                obs.observe(run, index, &played);
            }
        }
        Ok(obs)
    };
    let starts: Vec<u64> = runs.clone().step_by(CHUNK_RUNS as usize).collect();
    let work = || starts.par_iter().map(|&s| chunk(s)).collect::<Result<Vec<O>>>();
    let parts = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut total = make();
    for part in parts {
        total.merge(part);
    }
    Ok(total)
}

fn fresh_metrics(config: &SimulationConfig) -> impl Fn() -> MetricsObserver + Sync + '_ {
    move || MetricsObserver(vec![Accumulator::new(); config.designs.len()])
}

fn reports(config: &SimulationConfig, acc: &MetricsObserver) -> Result<Vec<MetricsReport>> {
    config
        .designs
        .iter()
        .zip(&acc.0)
        .map(|(d, a)| a.finalize(*d, config.model, config.master_seed))
        .collect()
}

/// One report per design, in `config.designs` order.
pub fn run_experiment(config: &SimulationConfig) -> Result<Vec<MetricsReport>> {
    let acc = simulate(config, 0..config.runs, fresh_metrics(config))?;
    reports(config, &acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub runs: u64,
    pub reports: Vec<MetricsReport>,
}

/// Reports after the first `c` runs for each checkpoint `c`, from one growing
/// sample. `config.runs` is ignored.
pub fn convergence_trace(config: &SimulationConfig, checkpoints: &[u64]) -> Result<Vec<Checkpoint>> {
    if checkpoints.first() == Some(&0) || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimError::Config(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    let mut cfg = config.clone();
    cfg.runs = checkpoints.last().copied().unwrap_or(1);
    let mut running = fresh_metrics(&cfg)();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut done = 0;
    for &cp in checkpoints {
        running.merge(simulate(&cfg, done..cp, fresh_metrics(&cfg))?);
        done = cp;
        out.push(Checkpoint {
            runs: cp,
            reports: reports(&cfg, &running)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strength::StrengthParams;

    fn cfg(runs: u64, designs: Vec<Design>) -> SimulationConfig {
        SimulationConfig::new(runs, 2024, WinModel::Jackson(StrengthParams::BASELINE), designs)
    }

    #[test]
    fn labels() {
        let all = Design::all_standard();
        let labels: Vec<String> = all.iter().map(Design::label).collect();
        assert_eq!(
            labels,
            ["RR", "KO/S", "KO/R", "G64/S", "G64/R", "G66/S", "G66/R", "G46/S", "G46/R"]
        );
        assert_eq!(all[1].slug(), "ko_seeded");
        let tags: std::collections::HashSet<u16> = all.iter().map(Design::tag).collect();
        assert_eq!(tags.len(), all.len());
    }

    #[test]
    fn zero_runs_rejected() {
        let err = run_experiment(&cfg(0, Design::all_standard())).unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let designs = vec![Design::new(FormatId::G46, SeedingPolicy::Random)];
        let mut one = cfg(5000, designs.clone());
        one.threads = Some(1);
        let mut four = cfg(5000, designs);
        four.threads = Some(4);
        assert_eq!(run_experiment(&one).unwrap(), run_experiment(&four).unwrap());
    }

    #[test]
    fn checkpoints_must_increase() {
        let c = cfg(1, vec![Design::new(FormatId::KO, SeedingPolicy::Random)]);
        assert!(convergence_trace(&c, &[10, 10]).is_err());
        assert!(convergence_trace(&c, &[0, 10]).is_err());
    }

    #[test]
    fn trace_matches_direct_runs() {
        let designs = vec![Design::new(FormatId::KO, SeedingPolicy::Random)];
        let trace = convergence_trace(&cfg(1, designs.clone()), &[1000, 5000]).unwrap();
        for cp in &trace {
            let direct = run_experiment(&cfg(cp.runs, designs.clone())).unwrap();
            assert_eq!(cp.reports, direct);
        }
    }
}
