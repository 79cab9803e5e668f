//! Exact outcome distributions for small formats.
//!
//! The engine is replayed once per complete sequence of choices (match winners
//! and tie orders), depth first, with each leaf weighted by its probability.
//! Only practical when the number of matches is small.

use crate::draw::GroupAssignment;
use crate::engine::{play_with, Oracle, TournamentResult};
use crate::error::{Result, SimError};
use crate::format::FormatSpec;
use crate::mc::Design;
use crate::metrics::{MetricsReport, Tally};
use crate::strength::{PreRank, ProbabilityMatrix, WinModel};

struct Scripted<'a> {
    matrix: &'a ProbabilityMatrix,
    script: &'a [usize],
    choices: Vec<usize>,
    branching: Vec<usize>,
    weight: f64,
}

impl Scripted<'_> {
    fn next_choice(&mut self, branches: usize) -> usize {
        let choice = self.script.get(self.choices.len()).copied().unwrap_or(0);
        debug_assert!(choice < branches);
        self.choices.push(choice);
        self.branching.push(branches);
        choice
    }
}

impl Oracle for Scripted<'_> {
    fn winner(&mut self, a: PreRank, b: PreRank, _meeting: usize) -> PreRank {
        let p = self.matrix.get(a, b);
        if self.next_choice(2) == 0 {
            self.weight *= p;
            a
        } else {
            self.weight *= 1.0 - p;
            b
        }
    }

    fn break_tie(&mut self, block: &mut [PreRank]) {
        let n = block.len();
        let count: usize = (1..=n).product();
        let mut code = self.next_choice(count);
        self.weight /= count as f64;
        // Decode `code` as the lexicographic permutation index (factorial base).
        let mut pool = block.to_vec();
        for (i, slot) in block.iter_mut().enumerate() {
            let f: usize = (1..n - i).product();
            *slot = pool.remove(code / f);
            code %= f;
        }
    }
}

/// All tournament results with their probabilities. Fails if more than
/// `max_leaves` choice sequences would be needed.
pub fn outcome_distribution(
    format: &FormatSpec,
    assignment: &GroupAssignment,
    matrix: &ProbabilityMatrix,
    max_leaves: usize,
) -> Result<Vec<(TournamentResult, f64)>> {
    let mut out = Vec::new();
    let mut script: Vec<usize> = Vec::new();
    loop {
        if out.len() >= max_leaves {
            return Err(SimError::Config(format!(
                "exact enumeration exceeds {max_leaves} leaves"
            )));
        }
        let mut oracle = Scripted {
            matrix,
            script: &script,
            choices: Vec::new(),
            branching: Vec::new(),
            weight: 1.0,
        };
        let played = play_with(format, assignment, &mut oracle)?;
        if oracle.weight > 0.0 {
            out.push((played.result, oracle.weight));
        }
        let Scripted {
            mut choices, branching, ..
        } = oracle;
        // Advance the odometer at the deepest decision that has room.
        let Some(depth) = (0..choices.len()).rev().find(|&i| choices[i] + 1 < branching[i]) else {
            break;
        };
        choices.truncate(depth + 1);
        choices[depth] += 1;
        script = choices;
    }
    Ok(out)
}

/// Exact metrics for one fixed assignment.
pub fn exact_report(
    format: &FormatSpec,
    assignment: &GroupAssignment,
    design: Design,
    model: WinModel,
    max_leaves: usize,
) -> Result<MetricsReport> {
    let matrix = model.matrix()?;
    let mut tally = Tally::<f64>::new();
    for (result, w) in outcome_distribution(format, assignment, &matrix, max_leaves)? {
        tally.add(&result, w);
    }
    tally.finalize_exact(design, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw::identity_draw;
    use crate::strength::StrengthParams;

    #[test]
    fn probabilities_sum_to_one() {
        let spec = FormatSpec::mini_round_robin(4).unwrap();
        let m = ProbabilityMatrix::from_params(StrengthParams::BASELINE).unwrap();
        let dist = outcome_distribution(&spec, &identity_draw(&spec), &m, 1 << 16).unwrap();
        let total: f64 = dist.iter().map(|d| d.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_four_team_group_is_symmetric() {
        let spec = FormatSpec::mini_round_robin(4).unwrap();
        let dist = outcome_distribution(&spec, &identity_draw(&spec), &ProbabilityMatrix::uniform(), 1 << 16).unwrap();
        for team in 0..4 {
            let p: f64 = dist
                .iter()
                .filter(|(r, _)| r.champion.index() == team)
                .map(|d| d.1)
                .sum();
            assert!((p - 0.25).abs() < 1e-12, "{team}: {p}");
        }
    }

    #[test]
    fn leaf_limit() {
        let spec = FormatSpec::mini_round_robin(4).unwrap();
        let err = outcome_distribution(&spec, &identity_draw(&spec), &ProbabilityMatrix::uniform(), 3);
        assert!(err.is_err());
    }
}
