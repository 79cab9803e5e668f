//! The exact enumerator against an engine-free brute force.

mod common;

use common::brute_force;
use tourney_sim::exact::exact_report;
use tourney_sim::{identity_draw, Design, FormatId, FormatSpec, SeedingPolicy, StrengthParams, WinModel};

fn compare(spec: &FormatSpec, alpha: f64, beta: f64, medal_games: bool) {
    let model = if alpha == 0.0 {
        WinModel::Uniform
    } else {
        WinModel::Jackson(StrengthParams::new(alpha, beta).unwrap())
    };
    let design = Design::new(FormatId::Custom, SeedingPolicy::Seeded);
    let report = exact_report(spec, &identity_draw(spec), design, model, 1 << 20).unwrap();
    let expected = brute_force(alpha, beta, medal_games);
    for (team, (got_row, want_row)) in report.placement_prob.iter().zip(&expected).enumerate() {
        for (place, (got, want)) in got_row.iter().zip(want_row).enumerate() {
            assert!(
                (got - want).abs() < 1e-12,
                "alpha {alpha} beta {beta} team {} place {}: {got} vs {want}",
                team + 1,
                place + 1
            );
        }
    }
    let mean_rank: f64 = (0..4).map(|t| (t + 1) as f64 * expected[t][0]).sum();
    assert!((report.avg_rank_place[0].value - mean_rank).abs() < 1e-12);
}

#[test]
fn round_robin_matches_brute_force() {
    for (alpha, beta) in [(4.0, 24.0), (2.5, 1.0), (0.0, 24.0), (9.0, 0.5)] {
        compare(&FormatSpec::mini_round_robin(4).unwrap(), alpha, beta, false);
    }
}

#[test]
fn medal_games_match_brute_force() {
    for (alpha, beta) in [(4.0, 24.0), (2.5, 1.0), (0.0, 24.0), (9.0, 0.5)] {
        compare(&FormatSpec::mini_with_medal_games(), alpha, beta, true);
    }
}

#[test]
fn brute_force_is_a_distribution() {
    let probs = brute_force(3.0, 2.0, true);
    for row in probs {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
