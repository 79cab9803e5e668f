//! Monte Carlo comparison of 24-team handball championship designs.
//!
//! Five designs are modelled: a single round robin ([`FormatId::RR`]), four
//! groups of six feeding a knockout ([`FormatId::KO`]), and three two-stage
//! group formats with carry-over ([`FormatId::G64`], [`FormatId::G66`],
//! [`FormatId::G46`]). Each runs under a seeded or fully random group draw.
//!
//! ```
//! use tourney_sim::{run_experiment, Design, FormatId, SeedingPolicy, SimulationConfig, WinModel};
//!
//! let config = SimulationConfig::new(
//!     2_000,
//!     42,
//!     WinModel::default(),
//!     vec![Design::new(FormatId::G66, SeedingPolicy::Seeded)],
//! );
//! let reports = run_experiment(&config).unwrap();
//! assert!(reports[0].avg_rank_place[0].value < 6.0);
//! ```

pub mod cli;
pub mod draw;
pub mod engine;
pub mod error;
pub mod exact;
pub mod format;
pub mod mc;
pub mod metrics;
pub mod outcomes;
pub mod presets;
pub mod report;
pub mod strength;

pub use draw::{draw_groups, identity_draw, GroupAssignment, SeedingPolicy};
pub use engine::{
    match_count_distribution, play_group, play_tournament, play_with, total_matches, GroupStanding, MatchLog, Played,
    PlayedMatch, TournamentResult,
};
pub use error::{Result, SimError};
pub use format::{FormatId, FormatSpec, Stage};
pub use mc::{convergence_trace, run_experiment, simulate, Checkpoint, Design, Observer, SimulationConfig};
pub use metrics::{Accumulator, Estimate, MetricsReport};
pub use outcomes::{generate_outcomes, OutcomeTables};
pub use strength::{probability_matrix, win_probability, PreRank, ProbabilityMatrix, StrengthParams, WinModel};
