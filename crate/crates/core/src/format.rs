//! Declarative descriptions of the tournament designs.
//!
//! A design is a preliminary group stage, an optional main-round group stage
//! with carry-over, and a bracket whose slots point at group standings or at
//! earlier bracket matches. The wiring is plain data so it can be dumped,
//! reviewed and round-tripped through JSON.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::strength::TEAMS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FormatId {
    /// Single round robin among all 24 teams.
    RR,
    /// Four groups of six, then a 16-team knockout.
    KO,
    /// Four groups of six, four main groups of four, group winners to semifinals.
    G64,
    /// Four groups of six, two main groups of six, top two to semifinals.
    G66,
    /// Six groups of four, two main groups of six, top four to quarterfinals.
    G46,
    /// User-defined wiring (not one of the championship designs).
    Custom,
}

impl FormatId {
    /// The five designs compared by the experiments, reference design first.
    pub const STANDARD: [FormatId; 5] = [FormatId::RR, FormatId::KO, FormatId::G64, FormatId::G66, FormatId::G46];

    pub fn name(self) -> &'static str {
        match self {
            FormatId::RR => "RR",
            FormatId::KO => "KO",
            FormatId::G64 => "G64",
            FormatId::G66 => "G66",
            FormatId::G46 => "G46",
            FormatId::Custom => "CUSTOM",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            FormatId::RR => 1,
            FormatId::KO => 2,
            FormatId::G64 => 3,
            FormatId::G66 => 4,
            FormatId::G46 => 5,
            FormatId::Custom => 0xff,
        }
    }

    /// The built-in wiring for this design.
    pub fn spec(self) -> Result<FormatSpec> {
        Ok(match self {
            FormatId::RR => FormatSpec::round_robin(),
            FormatId::KO => FormatSpec::ko(),
            FormatId::G64 => FormatSpec::g64(),
            FormatId::G66 => FormatSpec::g66(),
            FormatId::G46 => FormatSpec::g46(),
            FormatId::Custom => return Err(SimError::Config("custom formats have no built-in wiring".into())),
        })
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatId {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RR" => Ok(FormatId::RR),
            "KO" => Ok(FormatId::KO),
            "G64" => Ok(FormatId::G64),
            "G66" => Ok(FormatId::G66),
            "G46" => Ok(FormatId::G46),
            other => Err(SimError::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// A final group position such as `A1` (winner of group A) or `Y4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub group: char,
    /// 1-based finishing position.
    pub position: u8,
}

impl Slot {
    pub const fn new(group: char, position: u8) -> Self {
        Slot { group, position }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.group, self.position)
    }
}

impl FromStr for Slot {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let group = chars
            .next()
            .filter(|c| c.is_ascii_uppercase())
            .ok_or_else(|| SimError::Config(format!("bad slot `{s}`")))?;
        let position: u8 = chars
            .as_str()
            .parse()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| SimError::Config(format!("bad slot `{s}`")))?;
        Ok(Slot { group, position })
    }
}

/// Where a bracket participant comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Source {
    Standing(Slot),
    Winner(String),
    Loser(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Standing(slot) => write!(f, "{slot}"),
            Source::Winner(label) => write!(f, "W/{label}"),
            Source::Loser(label) => write!(f, "L/{label}"),
        }
    }
}

impl FromStr for Source {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(label) = s.strip_prefix("W/") {
            Ok(Source::Winner(label.to_string()))
        } else if let Some(label) = s.strip_prefix("L/") {
            Ok(Source::Loser(label.to_string()))
        } else {
            s.parse().map(Source::Standing)
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Slot);
string_serde!(Source);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Preliminary,
    Main,
    RoundOf16,
    Quarterfinal,
    Semifinal,
    Final,
    ThirdPlace,
}

impl Stage {
    /// Stages in which two teams may meet for the second time.
    pub fn allows_rematch(self) -> bool {
        matches!(self, Stage::Semifinal | Stage::Final | Stage::ThirdPlace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStage {
    pub groups: usize,
    pub group_size: usize,
    /// Teams advancing from each group; 0 when this stage decides the placings.
    pub qualifiers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainGroup {
    pub label: char,
    /// Preliminary standings forming this group. Results among members who
    /// shared a preliminary group are carried over.
    pub members: Vec<Slot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainRound {
    pub groups: Vec<MainGroup>,
    pub qualifiers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketMatch {
    pub label: String,
    pub stage: Stage,
    pub home: Source,
    pub away: Source,
}

impl BracketMatch {
    fn new(label: &str, stage: Stage, home: &str, away: &str) -> Self {
        BracketMatch {
            label: label.to_string(),
            stage,
            home: home.parse().expect("static source"),
            away: away.parse().expect("static source"),
        }
    }
}

/// Full description of one tournament design.
///
/// When `bracket` is empty the standing of the last group stage (which must be
/// a single group) decides places one to four and no final is recorded.
/// Otherwise the bracket must contain matches labelled `F` (final) and, if
/// `third_place` is set, `BM` (third-place game).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub id: FormatId,
    pub prelim: GroupStage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub main: Option<MainRound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bracket: Vec<BracketMatch>,
    pub third_place: bool,
}

pub const FINAL: &str = "F";
pub const THIRD_PLACE: &str = "BM";

fn slots(list: &[&str]) -> Vec<Slot> {
    list.iter().map(|s| s.parse().expect("static slot")).collect()
}

fn semis_and_medals(sf1: (&str, &str), sf2: (&str, &str)) -> Vec<BracketMatch> {
    vec![
        BracketMatch::new("SF1", Stage::Semifinal, sf1.0, sf1.1),
        BracketMatch::new("SF2", Stage::Semifinal, sf2.0, sf2.1),
        BracketMatch::new(FINAL, Stage::Final, "W/SF1", "W/SF2"),
        BracketMatch::new(THIRD_PLACE, Stage::ThirdPlace, "L/SF1", "L/SF2"),
    ]
}

impl FormatSpec {
    pub fn round_robin() -> Self {
        FormatSpec {
            id: FormatId::RR,
            prelim: GroupStage {
                groups: 1,
                group_size: TEAMS,
                qualifiers: 0,
            },
            main: None,
            bracket: Vec::new(),
            third_place: false,
        }
    }

    pub fn ko() -> Self {
        let r16 = [
            ("R1", "A1", "B4"),
            ("R2", "C3", "D2"),
            ("R3", "A3", "B2"),
            ("R4", "C1", "D4"),
            ("R5", "A4", "B1"),
            ("R6", "C2", "D3"),
            ("R7", "A2", "B3"),
            ("R8", "C4", "D1"),
        ];
        let mut bracket: Vec<BracketMatch> = r16
            .iter()
            .map(|(l, h, a)| BracketMatch::new(l, Stage::RoundOf16, h, a))
            .collect();
        for q in 1..=4 {
            bracket.push(BracketMatch::new(
                &format!("QF{q}"),
                Stage::Quarterfinal,
                &format!("W/R{}", 2 * q - 1),
                &format!("W/R{}", 2 * q),
            ));
        }
        bracket.extend(semis_and_medals(("W/QF1", "W/QF2"), ("W/QF3", "W/QF4")));
        FormatSpec {
            id: FormatId::KO,
            prelim: GroupStage {
                groups: 4,
                group_size: 6,
                qualifiers: 4,
            },
            main: None,
            bracket,
            third_place: true,
        }
    }

    pub fn g64() -> Self {
        let groups = vec![
            MainGroup {
                label: 'X',
                members: slots(&["A1", "A3", "B2", "B4"]),
            },
            MainGroup {
                label: 'V',
                members: slots(&["A2", "A4", "B1", "B3"]),
            },
            MainGroup {
                label: 'U',
                members: slots(&["C1", "C3", "D2", "D4"]),
            },
            MainGroup {
                label: 'Y',
                members: slots(&["C2", "C4", "D1", "D3"]),
            },
        ];
        FormatSpec {
            id: FormatId::G64,
            prelim: GroupStage {
                groups: 4,
                group_size: 6,
                qualifiers: 4,
            },
            main: Some(MainRound { groups, qualifiers: 1 }),
            bracket: semis_and_medals(("X1", "U1"), ("Y1", "V1")),
            third_place: true,
        }
    }

    pub fn g66() -> Self {
        let groups = vec![
            MainGroup {
                label: 'X',
                members: slots(&["A1", "A2", "A3", "B1", "B2", "B3"]),
            },
            MainGroup {
                label: 'Y',
                members: slots(&["C1", "C2", "C3", "D1", "D2", "D3"]),
            },
        ];
        FormatSpec {
            id: FormatId::G66,
            prelim: GroupStage {
                groups: 4,
                group_size: 6,
                qualifiers: 3,
            },
            main: Some(MainRound { groups, qualifiers: 2 }),
            bracket: semis_and_medals(("X1", "Y2"), ("X2", "Y1")),
            third_place: true,
        }
    }

    pub fn g46() -> Self {
        let groups = vec![
            MainGroup {
                label: 'X',
                members: slots(&["A1", "A2", "B1", "B2", "C1", "C2"]),
            },
            MainGroup {
                label: 'Y',
                members: slots(&["D1", "D2", "E1", "E2", "F1", "F2"]),
            },
        ];
        let mut bracket = vec![
            BracketMatch::new("QF1", Stage::Quarterfinal, "X1", "Y4"),
            BracketMatch::new("QF2", Stage::Quarterfinal, "X3", "Y2"),
            BracketMatch::new("QF3", Stage::Quarterfinal, "X2", "Y3"),
            BracketMatch::new("QF4", Stage::Quarterfinal, "X4", "Y1"),
        ];
        bracket.extend(semis_and_medals(("W/QF1", "W/QF2"), ("W/QF3", "W/QF4")));
        FormatSpec {
            id: FormatId::G46,
            prelim: GroupStage {
                groups: 6,
                group_size: 4,
                qualifiers: 2,
            },
            main: Some(MainRound { groups, qualifiers: 4 }),
            bracket,
            third_place: true,
        }
    }

    /// A single round robin among teams `1..=teams` (4 to 24), no final.
    pub fn mini_round_robin(teams: usize) -> Result<Self> {
        let spec = FormatSpec {
            id: FormatId::Custom,
            prelim: GroupStage {
                groups: 1,
                group_size: teams,
                qualifiers: 0,
            },
            main: None,
            bracket: Vec::new(),
            third_place: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Four teams play a round robin; first meets second in the final and
    /// third meets fourth for the bronze.
    pub fn mini_with_medal_games() -> Self {
        FormatSpec {
            id: FormatId::Custom,
            prelim: GroupStage {
                groups: 1,
                group_size: 4,
                qualifiers: 4,
            },
            main: None,
            bracket: vec![
                BracketMatch::new(FINAL, Stage::Final, "A1", "A2"),
                BracketMatch::new(THIRD_PLACE, Stage::ThirdPlace, "A3", "A4"),
            ],
            third_place: true,
        }
    }

    /// Team count implied by the preliminary stage.
    pub fn team_count(&self) -> usize {
        self.prelim.groups * self.prelim.group_size
    }

    pub fn has_final(&self) -> bool {
        !self.bracket.is_empty()
    }

    /// Preliminary group labels, `A`, `B`, ...
    pub fn prelim_labels(&self) -> impl Iterator<Item = char> {
        (0..self.prelim.groups).map(|g| (b'A' + g as u8) as char)
    }

    /// Checks internal consistency of the wiring.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::Config(msg));
        let teams = self.team_count();
        if self.prelim.groups == 0 || self.prelim.group_size == 0 {
            return bad("preliminary stage needs at least one non-empty group".into());
        }
        if teams > TEAMS {
            return bad(format!("{teams} teams exceed the {TEAMS}-team universe"));
        }
        if self.prelim.groups > 26 {
            return bad("too many preliminary groups".into());
        }
        let prelim_labels: Vec<char> = self.prelim_labels().collect();
        let mut known_groups: Vec<(char, usize, usize)> = Vec::new();
        if let Some(main) = &self.main {
            let mut seen = Vec::new();
            for group in &main.groups {
                for slot in &group.members {
                    if !prelim_labels.contains(&slot.group) || slot.position as usize > self.prelim.qualifiers {
                        return bad(format!("main group {} uses unknown slot {slot}", group.label));
                    }
                    if seen.contains(slot) {
                        return bad(format!("slot {slot} used twice in the main round"));
                    }
                    seen.push(*slot);
                }
                if prelim_labels.contains(&group.label) {
                    return bad(format!("main group label {} clashes", group.label));
                }
                known_groups.push((group.label, group.members.len(), main.qualifiers));
            }
        } else {
            for &label in &prelim_labels {
                known_groups.push((label, self.prelim.group_size, self.prelim.qualifiers));
            }
        }

        if self.bracket.is_empty() {
            if known_groups.len() != 1 {
                return bad("without a bracket the last group stage must be a single group".into());
            }
            if known_groups[0].1 < 4 {
                return bad("a deciding group needs at least four teams".into());
            }
            if self.third_place {
                return bad("third-place game requires a bracket".into());
            }
            return Ok(());
        }

        let mut labels: Vec<&str> = Vec::new();
        let mut standing_uses = Vec::new();
        let mut winner_uses = Vec::new();
        let mut loser_uses = Vec::new();
        for m in &self.bracket {
            if labels.contains(&m.label.as_str()) {
                return bad(format!("duplicate bracket label {}", m.label));
            }
            for src in [&m.home, &m.away] {
                match src {
                    Source::Standing(slot) => {
                        let ok = known_groups
                            .iter()
                            .any(|&(g, size, q)| g == slot.group && (slot.position as usize) <= q.min(size));
                        if !ok {
                            return bad(format!("{}: slot {slot} does not qualify", m.label));
                        }
                        if standing_uses.contains(slot) {
                            return bad(format!("slot {slot} used twice in the bracket"));
                        }
                        standing_uses.push(*slot);
                    }
                    Source::Winner(l) | Source::Loser(l) => {
                        if !labels.contains(&l.as_str()) {
                            return bad(format!("{} refers to later or unknown match {l}", m.label));
                        }
                        let uses = if matches!(src, Source::Winner(_)) {
                            &mut winner_uses
                        } else {
                            &mut loser_uses
                        };
                        if uses.contains(l) {
                            return bad(format!("result of {l} used twice"));
                        }
                        uses.push(l.clone());
                    }
                }
            }
            labels.push(&m.label);
        }
        if !labels.contains(&FINAL) {
            return bad("bracket has no final".into());
        }
        if !self.third_place || !labels.contains(&THIRD_PLACE) {
            return bad("a bracket needs a third-place game to fill places 3 and 4".into());
        }
        let expected: usize = known_groups.iter().map(|&(_, size, q)| q.min(size)).sum();
        if standing_uses.len() != expected {
            return bad(format!(
                "bracket seats {} group qualifiers but {expected} advance",
                standing_uses.len()
            ));
        }
        Ok(())
    }
}
