//! Text renderings of metric reports.
//!
//! Every function here is a pure function of its inputs: fixed precision,
//! no clock, no locale.

use std::fmt::Write as _;

use serde_json::Value;

use crate::engine::match_count_distribution;
use crate::error::Result;
use crate::format::FormatId;
use crate::mc::{Checkpoint, Design};
use crate::metrics::{MetricsReport, PLACES};
use crate::strength::PreRank;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Csv,
    Json,
    Table,
    /// Per-figure `(x, y)` series.
    FigData,
}

impl Emit {
    pub fn extension(self) -> &'static str {
        match self {
            Emit::Csv | Emit::FigData => "csv",
            Emit::Json => "json",
            Emit::Table => "txt",
        }
    }
}

/// One `(metric, value, se)` row of a single-design report.
fn report_rows(report: &MetricsReport) -> Vec<(String, f64, f64)> {
    let mut rows = Vec::new();
    for (k, e) in report.avg_rank_place.iter().enumerate() {
        rows.push((format!("avg_rank_place_{}", k + 1), e.value, e.se));
    }
    for (p, &v) in report.win_prob_best_p.iter().enumerate() {
        rows.push((format!("win_prob_best_p_{}", p + 1), v, report.prob_se(v)));
    }
    if let Some(series) = &report.final_reach_prob_best_p {
        for (p, &v) in series.iter().enumerate() {
            rows.push((format!("final_reach_prob_best_p_{}", p + 1), v, report.prob_se(v)));
        }
    }
    if let Some(e) = report.final_quality {
        rows.push(("final_quality".into(), e.value, e.se));
    }
    if let Some(e) = report.final_balance {
        rows.push(("final_balance".into(), e.value, e.se));
    }
    if let Some(v) = report.top_two_final {
        rows.push(("top_two_final".into(), v, report.prob_se(v)));
    }
    for (t, row) in report.placement_prob.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            rows.push((
                format!("placement_prob_team_{}_place_{}", t + 1, k + 1),
                v,
                report.prob_se(v),
            ));
        }
    }
    rows
}

pub fn report_csv(report: &MetricsReport) -> String {
    let mut out = String::from("metric,value,se,n\n");
    for (name, value, se) in report_rows(report) {
        let _ = writeln!(out, "{name},{value:.6},{se:.6},{}", report.runs);
    }
    out
}

fn round6(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            serde_json::Number::from_f64((x * 1e6).round() / 1e6).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round6).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round6(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to six decimals.
pub fn report_json(report: &MetricsReport) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut text = serde_json::to_string_pretty(&round6(value)).expect("value serializes");
    text.push('\n');
    text
}

pub fn report_table(report: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}  ({}, N = {}, seed = {})",
        report.design, report.model, report.runs, report.seed
    );
    for (k, e) in report.avg_rank_place.iter().enumerate() {
        let _ = writeln!(out, "  Average rank of #{}: {:.2} (se {:.2})", k + 1, e.value, e.se);
    }
    let _ = writeln!(
        out,
        "  Proportion of wins for the highest ranked: {:.2}",
        report.win_prob_best(1)
    );
    match (report.final_quality, report.final_balance) {
        (Some(q), Some(b)) => {
            let _ = writeln!(out, "  Expected quality of the final: {:.2}", q.value);
            let _ = writeln!(out, "  Expected competitive balance of the final: {:.2}", b.value);
        }
        _ => {
            let _ = writeln!(out, "  Expected quality of the final: ---");
            let _ = writeln!(out, "  Expected competitive balance of the final: ---");
        }
    }
    out
}

pub fn render_report(report: &MetricsReport, emit: Emit) -> String {
    match emit {
        Emit::Csv | Emit::FigData => report_csv(report),
        Emit::Json => report_json(report),
        Emit::Table => report_table(report),
    }
}

/// Row labels of the comparison table, in order.
pub const SUMMARY_ROWS: [&str; 10] = [
    "Min. games",
    "Max. games",
    "Total games",
    "Average rank of #1",
    "Average rank of #2",
    "Average rank of #3",
    "Average rank of #4",
    "Proportion of wins for the highest ranked",
    "Expected quality of the final",
    "Expected competitive balance of the final",
];

/// Cells of the comparison table; `None` renders as `---`.
fn summary_column(report: &MetricsReport) -> Result<Vec<Option<f64>>> {
    let dist = match_count_distribution(&report.design.format.spec()?)?;
    let min = dist.keys().next().copied().unwrap_or(0) as f64;
    let max = dist.keys().next_back().copied().unwrap_or(0) as f64;
    let total = dist.iter().map(|(m, t)| m * t).sum::<u32>() as f64 / 2.0;
    let mut col = vec![Some(min), Some(max), Some(total)];
    col.extend(report.avg_rank_place.iter().map(|e| Some(e.value)));
    col.push(Some(report.win_prob_best(1)));
    col.push(report.final_quality.map(|e| e.value));
    col.push(report.final_balance.map(|e| e.value));
    Ok(col)
}

/// Comparison of several designs, one column per report.
pub fn summary(reports: &[MetricsReport], emit: Emit) -> Result<String> {
    let columns = reports.iter().map(summary_column).collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = reports.iter().map(|r| r.design.label()).collect();
    let mut out = String::new();
    match emit {
        Emit::Json => {
            let rows: Vec<Value> = SUMMARY_ROWS
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    let cells: serde_json::Map<String, Value> = labels
                        .iter()
                        .zip(&columns)
                        .map(|(l, c)| (l.clone(), c[i].map_or(Value::Null, Value::from)))
                        .collect();
                    serde_json::json!({ "metric": name, "values": cells })
                })
                .collect();
            out = serde_json::to_string_pretty(&round6(Value::Array(rows))).expect("summary serializes");
            out.push('\n');
        }
        Emit::Table => {
            let width = SUMMARY_ROWS.iter().map(|s| s.len()).max().unwrap_or(0);
            let _ = write!(out, "{:width$}", "");
            for l in &labels {
                let _ = write!(out, " {l:>7}");
            }
            out.push('\n');
            for (i, name) in SUMMARY_ROWS.iter().enumerate() {
                let _ = write!(out, "{name:width$}");
                for c in &columns {
                    match c[i] {
                        Some(v) if i < 3 => {
                            let _ = write!(out, " {:>7}", v as u32);
                        }
                        Some(v) => {
                            let _ = write!(out, " {v:>7.2}");
                        }
                        None => {
                            let _ = write!(out, " {:>7}", "---");
                        }
                    }
                }
                out.push('\n');
            }
        }
        Emit::Csv | Emit::FigData => {
            out.push_str("metric");
            for l in &labels {
                let _ = write!(out, ",{l}");
            }
            out.push('\n');
            if reports.is_empty() {
                return Ok(out);
            }
            for (i, name) in SUMMARY_ROWS.iter().enumerate() {
                out.push_str(name);
                for c in &columns {
                    match c[i] {
                        Some(v) if i < 3 => {
                            let _ = write!(out, ",{}", v as u32);
                        }
                        Some(v) => {
                            let _ = write!(out, ",{v:.6}");
                        }
                        None => out.push_str(",---"),
                    }
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// A named plot-data file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureData {
    pub name: &'static str,
    pub csv: String,
}

fn find(reports: &[MetricsReport], design: Design) -> Option<&MetricsReport> {
    reports.iter().find(|r| r.design == design)
}

/// Plot series for the probability figures. Series needing a reference
/// design (RR for differences in win probability, KO with the same seeding for
/// placement differences) are skipped when the reference is absent.
pub fn figure_data(reports: &[MetricsReport]) -> Result<Vec<FigureData>> {
    let mut win = String::from("series,p,probability\n");
    let mut reach = String::from("series,p,probability\n");
    let mut win_vs_rr = String::from("series,p,difference\n");
    let mut place_vs_ko = String::from("series,place,rank,difference\n");
    let rr = reports.iter().find(|r| r.design.format == FormatId::RR);
    for rep in reports {
        let label = rep.design.label();
        for p in 1..=12 {
            let _ = writeln!(win, "{label},{p},{:.6}", rep.win_prob_best(p));
        }
        if let Some(series) = &rep.final_reach_prob_best_p {
            for (p, v) in series.iter().enumerate().take(8) {
                let _ = writeln!(reach, "{label},{},{v:.6}", p + 1);
            }
        }
        if let (Some(rr), true) = (rr, rep.design.format != FormatId::RR) {
            for (p, d) in rep.win_prob_diff(rr)?.iter().enumerate().take(12) {
                let _ = writeln!(win_vs_rr, "{label},{},{d:.6}", p + 1);
            }
        }
        let ko = Design::new(FormatId::KO, rep.design.seeding);
        if let (Some(ko), true) = (
            find(reports, ko),
            !matches!(rep.design.format, FormatId::KO | FormatId::RR),
        ) {
            let diff = rep.placement_diff(ko)?;
            for place in 0..PLACES {
                for (team, row) in PreRank::all().zip(&diff) {
                    let _ = writeln!(place_vs_ko, "{label},{},{team},{:.6}", place + 1, row[place]);
                }
            }
        }
    }
    Ok(vec![
        FigureData {
            name: "fig_win_prob_best_p",
            csv: win,
        },
        FigureData {
            name: "fig_win_prob_vs_rr",
            csv: win_vs_rr,
        },
        FigureData {
            name: "fig_final_reach_best_p",
            csv: reach,
        },
        FigureData {
            name: "fig_placement_vs_ko",
            csv: place_vs_ko,
        },
    ])
}

/// Convergence series: team 1 win proportion and 1-vs-2 final proportion per checkpoint.
pub fn convergence_csv(trace: &[Checkpoint]) -> String {
    let mut out = String::from("design,runs,win_prob_team_1,top_two_final\n");
    for cp in trace {
        for rep in &cp.reports {
            let top_two = rep.top_two_final.map_or("---".to_string(), |v| format!("{v:.6}"));
            let _ = writeln!(
                out,
                "{},{},{:.6},{top_two}",
                rep.design.label(),
                cp.runs,
                rep.win_prob_best(1)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw::SeedingPolicy;
    use crate::mc::{run_experiment, SimulationConfig};
    use crate::strength::WinModel;

    fn reports() -> Vec<MetricsReport> {
        let designs = vec![
            Design::new(FormatId::RR, SeedingPolicy::Random),
            Design::new(FormatId::KO, SeedingPolicy::Seeded),
            Design::new(FormatId::G66, SeedingPolicy::Seeded),
        ];
        run_experiment(&SimulationConfig::new(500, 1, WinModel::default(), designs)).unwrap()
    }

    #[test]
    fn summary_rows_in_order() {
        let text = summary(&reports(), Emit::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "metric,RR,KO/S,G66/S");
        let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(names, SUMMARY_ROWS);
        assert_eq!(lines[1], "Min. games,23,5,5");
        assert_eq!(lines[3], "Total games,276,76,82");
        assert!(lines[9].starts_with("Expected quality of the final,---,"));
    }

    #[test]
    fn empty_summary_is_header_only() {
        assert_eq!(summary(&[], Emit::Csv).unwrap(), "metric\n");
    }

    #[test]
    fn table_uses_two_decimals() {
        let text = summary(&reports(), Emit::Table).unwrap();
        let row = text.lines().find(|l| l.starts_with("Average rank of #1")).unwrap();
        for cell in row.split_whitespace().skip(4) {
            assert_eq!(cell.split('.').nth(1).map(str::len), Some(2), "{row}");
        }
    }

    #[test]
    fn csv_report_shape() {
        let text = report_csv(&reports()[1]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("metric,value,se,n"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("avg_rank_place_1,"));
        assert!(first.ends_with(",500"));
        assert!(text.contains("\nfinal_quality,"));
    }

    #[test]
    fn json_report_round_trips_to_six_decimals() {
        let rep = &reports()[2];
        let back: MetricsReport = serde_json::from_str(&report_json(rep)).unwrap();
        assert_eq!(back.design, rep.design);
        for (a, b) in back.win_prob_best_p.iter().zip(&rep.win_prob_best_p) {
            assert!((a - b).abs() <= 5e-7);
        }
    }

    #[test]
    fn figure_series() {
        let figs = figure_data(&reports()).unwrap();
        let vs_rr = &figs.iter().find(|f| f.name == "fig_win_prob_vs_rr").unwrap().csv;
        // two non-RR designs, p = 1..12
        assert_eq!(vs_rr.lines().count(), 1 + 2 * 12);
        let vs_ko = &figs.iter().find(|f| f.name == "fig_placement_vs_ko").unwrap().csv;
        assert_eq!(vs_ko.lines().count(), 1 + 4 * 24);
        let reach = &figs.iter().find(|f| f.name == "fig_final_reach_best_p").unwrap().csv;
        assert_eq!(reach.lines().count(), 1 + 2 * 8);
    }
}
