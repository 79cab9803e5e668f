//! Success measures over many tournaments.
//!
//! Monte Carlo tallies use integer counts so merging worker results is exact
//! and order-free; probabilities and means are formed once, in [`Tally::finalize`].
//! The same tally over `f64` weights turns an exact outcome distribution into
//! a report.

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::engine::TournamentResult;
use crate::error::{Result, SimError};
use crate::mc::Design;
use crate::strength::{PreRank, WinModel, TEAMS};

pub const PLACES: usize = 4;

pub trait Weight: Copy + Default + AddAssign + PartialOrd {
    fn scale(self, k: u64) -> Self;
    fn to_f64(self) -> f64;
}

impl Weight for u64 {
    fn scale(self, k: u64) -> Self {
        self * k
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Weight for f64 {
    fn scale(self, k: u64) -> Self {
        self * k as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// Running sums for one design.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally<W> {
    total: W,
    /// `place_counts[place][team]`.
    place_counts: [[W; TEAMS]; PLACES],
    rank_sum: [W; PLACES],
    rank_sq_sum: [W; PLACES],
    finals: W,
    /// Histogram of the better finalist's rank.
    best_finalist: [W; TEAMS],
    top_two_finals: W,
    quality_sum: W,
    quality_sq_sum: W,
    balance_sum: W,
    balance_sq_sum: W,
}

impl<W: Weight> Default for Tally<W> {
    fn default() -> Self {
        let z = W::default();
        Tally {
            total: z,
            place_counts: [[z; TEAMS]; PLACES],
            rank_sum: [z; PLACES],
            rank_sq_sum: [z; PLACES],
            finals: z,
            best_finalist: [z; TEAMS],
            top_two_finals: z,
            quality_sum: z,
            quality_sq_sum: z,
            balance_sum: z,
            balance_sq_sum: z,
        }
    }
}

/// Integer-count tally used by the Monte Carlo engine.
pub type Accumulator = Tally<u64>;

impl<W: Weight> Tally<W> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> W {
        self.total
    }

    /// Adds one tournament with weight `w` (1 for a simulated run).
    pub fn add(&mut self, result: &TournamentResult, w: W) {
        self.total += w;
        for (place, team) in result.places().into_iter().enumerate() {
            let rank = team.value() as u64;
            self.place_counts[place][team.index()] += w;
            self.rank_sum[place] += w.scale(rank);
            self.rank_sq_sum[place] += w.scale(rank * rank);
        }
        if let Some([a, b]) = result.finalists {
            let (hi, lo) = (a.min(b), a.max(b));
            let quality = (hi.value() + lo.value()) as u64;
            let balance = (lo.value() - hi.value()) as u64;
            self.finals += w;
            self.best_finalist[hi.index()] += w;
            if hi.value() == 1 && lo.value() == 2 {
                self.top_two_finals += w;
            }
            self.quality_sum += w.scale(quality);
            self.quality_sq_sum += w.scale(quality * quality);
            self.balance_sum += w.scale(balance);
            self.balance_sq_sum += w.scale(balance * balance);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.total += other.total;
        for (mine, theirs) in self.place_counts.iter_mut().zip(&other.place_counts) {
            add_all(mine, theirs);
        }
        add_all(&mut self.rank_sum, &other.rank_sum);
        add_all(&mut self.rank_sq_sum, &other.rank_sq_sum);
        self.finals += other.finals;
        add_all(&mut self.best_finalist, &other.best_finalist);
        self.top_two_finals += other.top_two_finals;
        self.quality_sum += other.quality_sum;
        self.quality_sq_sum += other.quality_sq_sum;
        self.balance_sum += other.balance_sum;
        self.balance_sq_sum += other.balance_sq_sum;
    }

    /// Turns sums into probabilities and means. `sample_size` enables
    /// standard errors; pass `None` for exact distributions.
    fn report(&self, design: Design, model: WinModel, seed: u64, sample_size: Option<u64>) -> Result<MetricsReport> {
        if self.total <= W::default() {
            return Err(SimError::EmptySample);
        }
        let n = self.total.to_f64();
        let se = |sum: W, sq: W| -> f64 {
            match sample_size {
                Some(count) => {
                    let mean = sum.to_f64() / n;
                    let var = (sq.to_f64() / n - mean * mean).max(0.0);
                    (var / count as f64).sqrt()
                }
                None => 0.0,
            }
        };
        let estimate = |sum: W, sq: W| Estimate {
            value: sum.to_f64() / n,
            se: se(sum, sq),
        };

        let win_prob_best_p = cumulative(&self.place_counts[0], n);
        let placement_prob = (0..TEAMS)
            .map(|t| std::array::from_fn(|place| self.place_counts[place][t].to_f64() / n))
            .collect();
        let avg_rank_place = std::array::from_fn(|p| estimate(self.rank_sum[p], self.rank_sq_sum[p]));
        let has_finals = self.finals > W::default();
        Ok(MetricsReport {
            design,
            model,
            seed,
            runs: sample_size.unwrap_or(0),
            win_prob_best_p,
            final_reach_prob_best_p: has_finals.then(|| cumulative(&self.best_finalist, n)),
            avg_rank_place,
            placement_prob,
            final_quality: has_finals.then(|| estimate(self.quality_sum, self.quality_sq_sum)),
            final_balance: has_finals.then(|| estimate(self.balance_sum, self.balance_sq_sum)),
            top_two_final: has_finals.then(|| self.top_two_finals.to_f64() / n),
        })
    }
}

impl Accumulator {
    pub fn runs(&self) -> u64 {
        self.total
    }

    /// Record one simulated tournament.
    pub fn accumulate(&mut self, result: &TournamentResult) {
        self.add(result, 1);
    }

    pub fn finalize(&self, design: Design, model: WinModel, seed: u64) -> Result<MetricsReport> {
        self.report(design, model, seed, Some(self.total))
    }
}

impl Tally<f64> {
    /// Report for an exact outcome distribution; standard errors are zero and `runs` is 0.
    pub fn finalize_exact(&self, design: Design, model: WinModel) -> Result<MetricsReport> {
        self.report(design, model, 0, None)
    }
}

fn add_all<W: Weight>(into: &mut [W], from: &[W]) {
    for (a, b) in into.iter_mut().zip(from) {
        *a += *b;
    }
}

fn cumulative<W: Weight>(hist: &[W; TEAMS], n: f64) -> Vec<f64> {
    let mut running = 0.0;
    hist.iter()
        .map(|c| {
            running += c.to_f64();
            running / n
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Standard error of the mean; 0 for exact values.
    pub se: f64,
}

/// Estimated success measures of one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub design: Design,
    pub model: WinModel,
    pub seed: u64,
    /// Number of simulated runs; 0 for exact reports.
    pub runs: u64,
    /// Entry `p-1`: probability that the champion is among the best `p` teams.
    pub win_prob_best_p: Vec<f64>,
    /// Entry `p-1`: probability that one of the best `p` teams plays the final.
    pub final_reach_prob_best_p: Option<Vec<f64>>,
    /// Mean pre-tournament rank of places one to four.
    pub avg_rank_place: [Estimate; PLACES],
    /// `placement_prob[team - 1][place - 1]`.
    pub placement_prob: Vec<[f64; PLACES]>,
    /// Sum of the finalists' ranks.
    pub final_quality: Option<Estimate>,
    /// Absolute difference of the finalists' ranks.
    pub final_balance: Option<Estimate>,
    /// Probability that the final is team 1 against team 2.
    pub top_two_final: Option<f64>,
}

impl MetricsReport {
    pub fn win_prob_best(&self, p: usize) -> f64 {
        self.win_prob_best_p[p - 1]
    }

    pub fn final_reach_best(&self, p: usize) -> Option<f64> {
        self.final_reach_prob_best_p.as_ref().map(|v| v[p - 1])
    }

    pub fn placement(&self, team: PreRank, place: usize) -> f64 {
        self.placement_prob[team.index()][place - 1]
    }

    /// Binomial standard error for a probability from this report.
    pub fn prob_se(&self, p: f64) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            (p * (1.0 - p) / self.runs as f64).sqrt()
        }
    }

    fn check_comparable(&self, reference: &MetricsReport) -> Result<()> {
        if self.model != reference.model || self.runs != reference.runs || self.seed != reference.seed {
            return Err(SimError::Comparability(format!(
                "{} ({:?}, N={}, seed={}) vs {} ({:?}, N={}, seed={})",
                self.design,
                self.model,
                self.runs,
                self.seed,
                reference.design,
                reference.model,
                reference.runs,
                reference.seed
            )));
        }
        Ok(())
    }

    /// Best-`p` win probability minus the reference's, for `p = 1..=24`.
    pub fn win_prob_diff(&self, reference: &MetricsReport) -> Result<Vec<f64>> {
        self.check_comparable(reference)?;
        Ok(self
            .win_prob_best_p
            .iter()
            .zip(&reference.win_prob_best_p)
            .map(|(a, b)| a - b)
            .collect())
    }

    /// Per-team placement probabilities minus the reference's.
    pub fn placement_diff(&self, reference: &MetricsReport) -> Result<Vec<[f64; PLACES]>> {
        self.check_comparable(reference)?;
        Ok(self
            .placement_prob
            .iter()
            .zip(&reference.placement_prob)
            .map(|(a, b)| std::array::from_fn(|k| a[k] - b[k]))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw::SeedingPolicy;
    use crate::format::FormatId;
    use crate::strength::StrengthParams;

    fn r(v: i64) -> PreRank {
        PreRank::new(v).unwrap()
    }

    fn result(places: [i64; 4], finalists: Option<[i64; 2]>) -> TournamentResult {
        TournamentResult {
            champion: r(places[0]),
            runner_up: r(places[1]),
            third: r(places[2]),
            fourth: r(places[3]),
            finalists: finalists.map(|[a, b]| [r(a), r(b)]),
        }
    }

    fn design() -> Design {
        Design::new(FormatId::KO, SeedingPolicy::Seeded)
    }

    fn model() -> WinModel {
        WinModel::Jackson(StrengthParams::BASELINE)
    }

    #[test]
    fn best_possible_final() {
        let mut acc = Accumulator::new();
        acc.accumulate(&result([1, 2, 3, 4], Some([1, 2])));
        let rep = acc.finalize(design(), model(), 0).unwrap();
        assert_eq!(rep.final_quality.unwrap().value, 3.0);
        assert_eq!(rep.final_balance.unwrap().value, 1.0);
        assert!(rep.win_prob_best_p.iter().all(|&p| p == 1.0));
        assert!(rep.final_reach_prob_best_p.as_ref().unwrap().iter().all(|&p| p == 1.0));
        assert_eq!(rep.top_two_final, Some(1.0));
    }

    #[test]
    fn weak_final() {
        let mut acc = Accumulator::new();
        acc.accumulate(&result([5, 9, 2, 7], Some([9, 5])));
        let rep = acc.finalize(design(), model(), 0).unwrap();
        for p in 1..=24 {
            let hit = if p >= 5 { 1.0 } else { 0.0 };
            assert_eq!(rep.win_prob_best(p), hit);
            assert_eq!(rep.final_reach_best(p), Some(hit));
        }
        assert_eq!(rep.final_quality.unwrap().value, 14.0);
        assert_eq!(rep.final_balance.unwrap().value, 4.0);
        assert_eq!(rep.avg_rank_place.map(|e| e.value), [5.0, 9.0, 2.0, 7.0]);
        assert_eq!(rep.top_two_final, Some(0.0));
    }

    #[test]
    fn round_robin_has_no_final_metrics() {
        let mut acc = Accumulator::new();
        acc.accumulate(&result([1, 2, 3, 4], None));
        let rep = acc
            .finalize(Design::new(FormatId::RR, SeedingPolicy::Random), model(), 0)
            .unwrap();
        assert!(rep.final_quality.is_none() && rep.final_balance.is_none());
        assert!(rep.final_reach_prob_best_p.is_none() && rep.top_two_final.is_none());
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(
            Accumulator::new().finalize(design(), model(), 0),
            Err(SimError::EmptySample)
        );
        assert_eq!(
            Tally::<f64>::new().finalize_exact(design(), model()),
            Err(SimError::EmptySample)
        );
    }

    #[test]
    fn merge_equals_sequential() {
        let results = [
            result([1, 2, 3, 4], Some([1, 2])),
            result([3, 1, 8, 2], Some([3, 1])),
            result([6, 4, 2, 1], Some([4, 6])),
        ];
        let mut seq = Accumulator::new();
        results.iter().for_each(|r| seq.accumulate(r));
        let mut left = Accumulator::new();
        left.accumulate(&results[0]);
        let mut right = Accumulator::new();
        results[1..].iter().for_each(|r| right.accumulate(r));
        right.merge(&left);
        assert_eq!(seq, right);
    }

    #[test]
    fn standard_errors() {
        let mut acc = Accumulator::new();
        acc.accumulate(&result([1, 2, 3, 4], Some([1, 2])));
        acc.accumulate(&result([3, 2, 1, 4], Some([3, 2])));
        let rep = acc.finalize(design(), model(), 0).unwrap();
        // champion ranks 1 and 3: mean 2, population variance 1, se = sqrt(1/2)
        let e = rep.avg_rank_place[0];
        assert_eq!(e.value, 2.0);
        assert!((e.se - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(rep.avg_rank_place[1].se, 0.0);
        assert!((rep.prob_se(0.5) - 0.5f64 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diffs() {
        let mut acc = Accumulator::new();
        acc.accumulate(&result([2, 1, 3, 4], Some([1, 2])));
        let rep = acc.finalize(design(), model(), 9).unwrap();
        assert!(rep.win_prob_diff(&rep).unwrap().iter().all(|&d| d == 0.0));
        assert!(rep.placement_diff(&rep).unwrap().iter().flatten().all(|&d| d == 0.0));

        let mut other = rep.clone();
        other.seed = 10;
        assert!(matches!(rep.win_prob_diff(&other), Err(SimError::Comparability(_))));
        let mut other = rep.clone();
        other.model = WinModel::Uniform;
        assert!(rep.placement_diff(&other).is_err());
    }
}
