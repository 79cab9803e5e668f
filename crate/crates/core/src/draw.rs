//! Allocation of teams into preliminary groups.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::format::FormatSpec;
use crate::strength::PreRank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedingPolicy {
    /// Pot `m` holds ranks `(m-1)k+1 ..= mk`; every group gets one team per pot.
    Seeded,
    /// Uniformly random partition into equal groups.
    Random,
}

impl SeedingPolicy {
    pub const BOTH: [SeedingPolicy; 2] = [SeedingPolicy::Seeded, SeedingPolicy::Random];

    pub fn short(self) -> &'static str {
        match self {
            SeedingPolicy::Seeded => "S",
            SeedingPolicy::Random => "R",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            SeedingPolicy::Seeded => 1,
            SeedingPolicy::Random => 2,
        }
    }
}

impl fmt::Display for SeedingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedingPolicy::Seeded => "seeded",
            SeedingPolicy::Random => "random",
        })
    }
}

impl FromStr for SeedingPolicy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "seeded" | "s" => Ok(SeedingPolicy::Seeded),
            "random" | "unseeded" | "r" => Ok(SeedingPolicy::Random),
            other => Err(SimError::Config(format!("unknown seeding policy `{other}`"))),
        }
    }
}

/// Preliminary groups in label order (`A`, `B`, ...). Member order inside a
/// group carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub groups: Vec<Vec<PreRank>>,
}

impl GroupAssignment {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group_size(&self) -> usize {
        self.groups.first().map_or(0, Vec::len)
    }

    /// Index of the group holding `team`.
    pub fn group_of(&self, team: PreRank) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&team))
    }

    /// Checks that the groups partition ranks `1..=n` into equal sizes matching `format`.
    pub fn validate_for(&self, format: &FormatSpec) -> Result<()> {
        let k = format.prelim.groups;
        let size = format.prelim.group_size;
        if self.groups.len() != k || self.groups.iter().any(|g| g.len() != size) {
            return Err(SimError::structural(format!(
                "assignment shape does not match {}: expected {k} groups of {size}",
                format.id
            )));
        }
        let mut seen = [false; crate::strength::TEAMS];
        for &team in self.groups.iter().flatten() {
            if team.index() >= k * size || std::mem::replace(&mut seen[team.index()], true) {
                return Err(SimError::structural(format!(
                    "assignment is not a partition (team {team})"
                )));
            }
        }
        Ok(())
    }
}

fn teams_of(format: &FormatSpec) -> Vec<PreRank> {
    (0..format.team_count()).map(PreRank::from_index).collect()
}

/// Draws preliminary groups for `format` under `policy`.
pub fn draw_groups<R: Rng + ?Sized>(policy: SeedingPolicy, format: &FormatSpec, rng: &mut R) -> GroupAssignment {
    let k = format.prelim.groups;
    let size = format.prelim.group_size;
    let mut teams = teams_of(format);
    let mut groups: Vec<Vec<PreRank>> = (0..k).map(|_| Vec::with_capacity(size)).collect();
    match policy {
        SeedingPolicy::Seeded => {
            for pot in teams.chunks_mut(k) {
                pot.shuffle(rng);
                for (group, &team) in groups.iter_mut().zip(pot.iter()) {
                    group.push(team);
                }
            }
        }
        SeedingPolicy::Random => {
            teams.shuffle(rng);
            for (group, chunk) in groups.iter_mut().zip(teams.chunks(size)) {
                group.extend_from_slice(chunk);
            }
        }
    }
    GroupAssignment { groups }
}

/// Deterministic seeded draw: rank `r` goes to group `(r-1) mod k`.
pub fn identity_draw(format: &FormatSpec) -> GroupAssignment {
    let k = format.prelim.groups;
    let mut groups: Vec<Vec<PreRank>> = vec![Vec::new(); k];
    for team in teams_of(format) {
        groups[team.index() % k].push(team);
    }
    GroupAssignment { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pot_ok(a: &GroupAssignment) -> bool {
        let k = a.group_count();
        a.groups.iter().all(|g| {
            let mut pots: Vec<usize> = g.iter().map(|t| t.index() / k).collect();
            pots.sort_unstable();
            pots == (0..g.len()).collect::<Vec<_>>()
        })
    }

    #[test]
    fn seeded_draws_respect_pots() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in [FormatSpec::ko(), FormatSpec::g46()] {
            for _ in 0..500 {
                let a = draw_groups(SeedingPolicy::Seeded, &spec, &mut rng);
                a.validate_for(&spec).unwrap();
                assert!(pot_ok(&a));
            }
        }
    }

    #[test]
    fn identity_draw_is_seeded_and_fixed() {
        let spec = FormatSpec::ko();
        let a = identity_draw(&spec);
        a.validate_for(&spec).unwrap();
        assert!(pot_ok(&a));
        let a_members: Vec<u8> = a.groups[0].iter().map(|t| t.value()).collect();
        assert_eq!(a_members, [1, 5, 9, 13, 17, 21]);
    }

    #[test]
    fn random_draw_co_membership_frequency() {
        // Team 2 takes one of the 23 remaining slots; 5 of them are in team 1's group.
        let spec = FormatSpec::ko();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut together = 0;
        for _ in 0..n {
            let a = draw_groups(SeedingPolicy::Random, &spec, &mut rng);
            let one = PreRank::from_index(0);
            let two = PreRank::from_index(1);
            if a.group_of(one) == a.group_of(two) {
                together += 1;
            }
        }
        let freq = together as f64 / n as f64;
        assert!((freq - 5.0 / 23.0).abs() < 0.01, "{freq}");
    }

    #[test]
    fn validate_rejects_broken_partitions() {
        let spec = FormatSpec::ko();
        let mut a = identity_draw(&spec);
        a.groups[1][0] = a.groups[0][0];
        assert!(a.validate_for(&spec).is_err());
        let a = identity_draw(&FormatSpec::g46());
        assert!(a.validate_for(&spec).is_err());
    }

    #[test]
    fn policy_names() {
        assert_eq!("Seeded".parse::<SeedingPolicy>().unwrap(), SeedingPolicy::Seeded);
        assert_eq!("unseeded".parse::<SeedingPolicy>().unwrap(), SeedingPolicy::Random);
        assert!("pots".parse::<SeedingPolicy>().is_err());
    }
}
