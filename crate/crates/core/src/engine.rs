//! Plays one tournament: group stages with carry-over, then the bracket.
//!
//! The engine never draws randomness itself. Match results and tie orders come
//! from an [`Oracle`], so the same code runs Monte Carlo replications (backed by
//! [`OutcomeTables`]) and exact enumeration (see [`crate::exact`]).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::draw::{identity_draw, GroupAssignment};
use crate::error::{Result, SimError};
use crate::format::{FormatSpec, Slot, Source, Stage, FINAL, THIRD_PLACE};
use crate::outcomes::{OutcomeTables, MAX_MEETINGS};
use crate::strength::{PreRank, TEAMS};

/// Supplies match winners and the order of teams tied on points.
pub trait Oracle {
    /// Winner of the `meeting`-th encounter (0-based) between `a` and `b`.
    fn winner(&mut self, a: PreRank, b: PreRank, meeting: usize) -> PreRank;

    /// Reorders a block of teams level on points. The block arrives sorted by rank.
    fn break_tie(&mut self, block: &mut [PreRank]);
}

/// Reads results from pre-drawn tables and breaks ties with a uniform shuffle.
pub struct TableOracle<'a, R: ?Sized> {
    pub tables: &'a OutcomeTables,
    pub tie_rng: &'a mut R,
}

impl<R: Rng + ?Sized> Oracle for TableOracle<'_, R> {
    fn winner(&mut self, a: PreRank, b: PreRank, meeting: usize) -> PreRank {
        self.tables.winner(meeting, a, b)
    }

    fn break_tie(&mut self, block: &mut [PreRank]) {
        block.shuffle(self.tie_rng);
    }
}

/// Better rank always wins; ties keep rank order. Used for structural checks.
pub struct StrongerWins;

impl Oracle for StrongerWins {
    fn winner(&mut self, a: PreRank, b: PreRank, _meeting: usize) -> PreRank {
        a.min(b)
    }

    fn break_tie(&mut self, _block: &mut [PreRank]) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayedMatch {
    pub home: PreRank,
    pub away: PreRank,
    pub winner: PreRank,
    pub stage: Stage,
    /// 0 for a first meeting, 1 for a rematch.
    pub meeting: u8,
}

impl PlayedMatch {
    pub fn loser(&self) -> PreRank {
        if self.winner == self.home {
            self.away
        } else {
            self.home
        }
    }

    pub fn involves(&self, team: PreRank) -> bool {
        self.home == team || self.away == team
    }
}

/// Every match actually played in one tournament, in order.
#[derive(Debug, Clone)]
pub struct MatchLog {
    matches: Vec<PlayedMatch>,
    meetings: [[u8; TEAMS]; TEAMS],
}

impl Default for MatchLog {
    fn default() -> Self {
        MatchLog {
            matches: Vec::with_capacity(96),
            meetings: [[0; TEAMS]; TEAMS],
        }
    }
}

impl MatchLog {
    pub fn matches(&self) -> &[PlayedMatch] {
        &self.matches
    }

    pub fn meetings(&self, a: PreRank, b: PreRank) -> u8 {
        self.meetings[a.index()][b.index()]
    }

    /// Number of matches each team played, indexed by rank - 1.
    pub fn matches_per_team(&self) -> [u32; TEAMS] {
        let mut counts = [0u32; TEAMS];
        for m in &self.matches {
            counts[m.home.index()] += 1;
            counts[m.away.index()] += 1;
        }
        counts
    }

    /// Teams that played at least one match in `stage`, sorted by rank.
    pub fn teams_in_stage(&self, stage: Stage) -> Vec<PreRank> {
        let mut teams: Vec<PreRank> = self
            .matches
            .iter()
            .filter(|m| m.stage == stage)
            .flat_map(|m| [m.home, m.away])
            .collect();
        teams.sort_unstable();
        teams.dedup();
        teams
    }

    fn play(&mut self, oracle: &mut impl Oracle, a: PreRank, b: PreRank, stage: Stage) -> Result<PlayedMatch> {
        if a == b {
            return Err(SimError::structural(format!("team {a} scheduled against itself")));
        }
        let meeting = self.meetings[a.index()][b.index()] as usize;
        if meeting >= MAX_MEETINGS {
            return Err(SimError::structural(format!(
                "teams {a} and {b} would meet a third time ({stage:?})"
            )));
        }
        let winner = oracle.winner(a, b, meeting);
        debug_assert!(winner == a || winner == b);
        self.meetings[a.index()][b.index()] += 1;
        self.meetings[b.index()][a.index()] += 1;
        let played = PlayedMatch {
            home: a,
            away: b,
            winner,
            stage,
            meeting: meeting as u8,
        };
        self.matches.push(played);
        Ok(played)
    }
}

/// Final order of one round-robin group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStanding {
    pub label: char,
    /// `(team, points)` from first to last place.
    pub entries: Vec<(PreRank, u32)>,
}

impl GroupStanding {
    /// Team at 1-based `position`.
    pub fn at(&self, position: usize) -> Option<PreRank> {
        position.checked_sub(1).and_then(|i| self.entries.get(i)).map(|e| e.0)
    }

    pub fn teams(&self) -> impl Iterator<Item = PreRank> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn points_of(&self, team: PreRank) -> Option<u32> {
        self.entries.iter().find(|e| e.0 == team).map(|e| e.1)
    }
}

pub const POINTS_PER_WIN: u32 = 2;

/// Plays a round-robin group. Pairs covered by `carried` keep their earlier
/// result; every other pair meets once. Returns the standing and all results
/// that count in it, carried ones first.
pub fn play_group(
    label: char,
    members: &[PreRank],
    carried: &[PlayedMatch],
    stage: Stage,
    oracle: &mut impl Oracle,
    log: &mut MatchLog,
) -> Result<(GroupStanding, Vec<PlayedMatch>)> {
    let inside = |t: PreRank| members.contains(&t);
    let mut results: Vec<PlayedMatch> = Vec::with_capacity(members.len() * members.len() / 2);
    for c in carried {
        if !inside(c.home) || !inside(c.away) {
            return Err(SimError::structural(format!(
                "carried result {}-{} is not inside group {label}",
                c.home, c.away
            )));
        }
        if results.iter().any(|r| same_pair(r, c.home, c.away)) {
            return Err(SimError::structural(format!(
                "pair {}-{} carried twice into group {label}",
                c.home, c.away
            )));
        }
        results.push(*c);
    }
    let already = results.len();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if results[..already].iter().any(|r| same_pair(r, a, b)) {
                continue;
            }
            results.push(log.play(oracle, a, b, stage)?);
        }
    }

    let mut entries: Vec<(PreRank, u32)> = members
        .iter()
        .map(|&t| {
            let wins = results.iter().filter(|r| r.winner == t).count() as u32;
            (t, POINTS_PER_WIN * wins)
        })
        .collect();
    entries.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut start = 0;
    while start < entries.len() {
        let points = entries[start].1;
        let end = start + entries[start..].iter().take_while(|e| e.1 == points).count();
        if end - start > 1 {
            let mut block: Vec<PreRank> = entries[start..end].iter().map(|e| e.0).collect();
            oracle.break_tie(&mut block);
            for (slot, team) in entries[start..end].iter_mut().zip(block) {
                slot.0 = team;
            }
        }
        start = end;
    }
    Ok((GroupStanding { label, entries }, results))
}

fn same_pair(m: &PlayedMatch, a: PreRank, b: PreRank) -> bool {
    (m.home == a && m.away == b) || (m.home == b && m.away == a)
}

/// Top four and finalists of one tournament.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TournamentResult {
    pub champion: PreRank,
    pub runner_up: PreRank,
    pub third: PreRank,
    pub fourth: PreRank,
    /// Absent when no final is played (round robin).
    pub finalists: Option<[PreRank; 2]>,
}

impl TournamentResult {
    pub fn places(&self) -> [PreRank; 4] {
        [self.champion, self.runner_up, self.third, self.fourth]
    }
}

/// A played tournament with its full match log.
#[derive(Debug, Clone)]
pub struct Played {
    pub result: TournamentResult,
    pub standings: Vec<GroupStanding>,
    pub log: MatchLog,
}

/// Plays `format` on `assignment` reading results from `outcomes` and
/// breaking group ties with `tie_rng`.
pub fn play_tournament<R: Rng + ?Sized>(
    format: &FormatSpec,
    assignment: &GroupAssignment,
    outcomes: &OutcomeTables,
    tie_rng: &mut R,
) -> Result<TournamentResult> {
    let mut oracle = TableOracle {
        tables: outcomes,
        tie_rng,
    };
    play_with(format, assignment, &mut oracle).map(|p| p.result)
}

/// Plays `format` on `assignment` with an arbitrary oracle and keeps the log.
pub fn play_with(format: &FormatSpec, assignment: &GroupAssignment, oracle: &mut impl Oracle) -> Result<Played> {
    assignment.validate_for(format)?;
    let mut log = MatchLog::default();
    let mut standings: Vec<GroupStanding> = Vec::new();
    let mut prelim_results: Vec<PlayedMatch> = Vec::new();

    for (label, members) in format.prelim_labels().zip(&assignment.groups) {
        let (standing, results) = play_group(label, members, &[], Stage::Preliminary, oracle, &mut log)?;
        standings.push(standing);
        prelim_results.extend(results);
    }

    if let Some(main) = &format.main {
        for group in &main.groups {
            let members = group
                .members
                .iter()
                .map(|&slot| resolve_slot(&standings, slot))
                .collect::<Result<Vec<_>>>()?;
            let carried: Vec<PlayedMatch> = prelim_results
                .iter()
                .filter(|m| members.contains(&m.home) && members.contains(&m.away))
                .copied()
                .collect();
            let (standing, _) = play_group(group.label, &members, &carried, Stage::Main, oracle, &mut log)?;
            standings.push(standing);
        }
    }

    let result = if format.bracket.is_empty() {
        let last = standings
            .last()
            .ok_or_else(|| SimError::structural("no group stage played"))?;
        let place = |p| {
            last.at(p)
                .ok_or_else(|| SimError::structural(format!("group {} has no place {p}", last.label)))
        };
        TournamentResult {
            champion: place(1)?,
            runner_up: place(2)?,
            third: place(3)?,
            fourth: place(4)?,
            finalists: None,
        }
    } else {
        play_bracket(format, &standings, oracle, &mut log)?
    };

    Ok(Played { result, standings, log })
}

fn resolve_slot(standings: &[GroupStanding], slot: Slot) -> Result<PreRank> {
    standings
        .iter()
        .rev()
        .find(|s| s.label == slot.group)
        .and_then(|s| s.at(slot.position as usize))
        .ok_or_else(|| SimError::structural(format!("standing {slot} does not exist")))
}

fn play_bracket(
    format: &FormatSpec,
    standings: &[GroupStanding],
    oracle: &mut impl Oracle,
    log: &mut MatchLog,
) -> Result<TournamentResult> {
    let mut decided: Vec<(&str, PlayedMatch)> = Vec::with_capacity(format.bracket.len());
    let resolve = |decided: &[(&str, PlayedMatch)], src: &Source| -> Result<PreRank> {
        match src {
            Source::Standing(slot) => resolve_slot(standings, *slot),
            Source::Winner(label) | Source::Loser(label) => {
                let m = decided
                    .iter()
                    .find(|(l, _)| l == label)
                    .map(|(_, m)| m)
                    .ok_or_else(|| SimError::structural(format!("match {label} not played yet")))?;
                Ok(if matches!(src, Source::Winner(_)) {
                    m.winner
                } else {
                    m.loser()
                })
            }
        }
    };
    for bm in &format.bracket {
        let home = resolve(&decided, &bm.home)?;
        let away = resolve(&decided, &bm.away)?;
        let played = log.play(oracle, home, away, bm.stage)?;
        decided.push((bm.label.as_str(), played));
    }
    let find = |label: &str| {
        decided
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, m)| *m)
            .ok_or_else(|| SimError::structural(format!("bracket has no match {label}")))
    };
    let fin = find(FINAL)?;
    let bronze = find(THIRD_PLACE)?;
    Ok(TournamentResult {
        champion: fin.winner,
        runner_up: fin.loser(),
        third: bronze.winner,
        fourth: bronze.loser(),
        finalists: Some([fin.home, fin.away]),
    })
}

/// How many teams play how many matches; identical for every outcome.
pub fn match_count_distribution(format: &FormatSpec) -> Result<BTreeMap<u32, u32>> {
    let played = play_with(format, &identity_draw(format), &mut StrongerWins)?;
    Ok(distribution_of(&played.log, format.team_count()))
}

pub(crate) fn distribution_of(log: &MatchLog, teams: usize) -> BTreeMap<u32, u32> {
    let mut dist = BTreeMap::new();
    for count in &log.matches_per_team()[..teams] {
        *dist.entry(*count).or_insert(0) += 1;
    }
    dist
}

/// Total number of matches in one tournament of `format`.
pub fn total_matches(format: &FormatSpec) -> Result<u32> {
    Ok(match_count_distribution(format)?
        .iter()
        .map(|(matches, teams)| matches * teams)
        .sum::<u32>()
        / 2)
}
