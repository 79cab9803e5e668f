//! Pre-drawn match outcomes and per-run random substreams.
//!
//! Every run draws two complete outcome tables, one for the first and one for
//! the second meeting of each pair, and every design played in that run reads
//! the same tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::strength::{PreRank, ProbabilityMatrix, TEAMS};

/// A pair can meet at most this many times in one tournament.
pub const MAX_MEETINGS: usize = 2;

/// Win indicators for the first and second meeting of every pair.
///
/// Bit `j` of `wins[m][i]` is set iff team `i` beats team `j` in meeting `m`.
/// Exactly one direction is set for each unordered pair; the diagonal is unused.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeTables {
    wins: [[u32; TEAMS]; MAX_MEETINGS],
}

impl OutcomeTables {
    /// Tables in which `decide(meeting, i, j)` says whether `i` beats `j`, for `i < j`.
    pub fn from_fn(mut decide: impl FnMut(usize, PreRank, PreRank) -> bool) -> Self {
        let mut wins = [[0u32; TEAMS]; MAX_MEETINGS];
        for (meeting, table) in wins.iter_mut().enumerate() {
            for i in 0..TEAMS {
                for j in (i + 1)..TEAMS {
                    if decide(meeting, PreRank::from_index(i), PreRank::from_index(j)) {
                        table[i] |= 1 << j;
                    } else {
                        table[j] |= 1 << i;
                    }
                }
            }
        }
        OutcomeTables { wins }
    }

    /// The better-ranked team wins every meeting.
    pub fn stronger_wins() -> Self {
        Self::from_fn(|_, _, _| true)
    }

    /// Whether `a` beats `b` in meeting `meeting` (0 = first, 1 = second).
    pub fn beats(&self, meeting: usize, a: PreRank, b: PreRank) -> bool {
        debug_assert_ne!(a, b);
        self.wins[meeting][a.index()] & (1 << b.index()) != 0
    }

    pub fn winner(&self, meeting: usize, a: PreRank, b: PreRank) -> PreRank {
        if self.beats(meeting, a, b) {
            a
        } else {
            b
        }
    }
}

/// Draws both tables. Pairs are visited row-major over `i < j`, the whole
/// first table before the second, one uniform per pair.
pub fn generate_outcomes<R: Rng + ?Sized>(matrix: &ProbabilityMatrix, rng: &mut R) -> OutcomeTables {
    OutcomeTables::from_fn(|_, i, j| rng.random::<f64>() < matrix.get(i, j))
}

/// Independent random streams used within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Outcomes,
    Draw,
    TieBreak,
}

impl StreamKind {
    fn code(self) -> u8 {
        match self {
            StreamKind::Outcomes => 1,
            StreamKind::Draw => 2,
            StreamKind::TieBreak => 3,
        }
    }
}

const DOMAIN: &[u8; 8] = b"tourney1";

/// Counter-based substream for `(master_seed, run_index, kind, tag)`.
///
/// The key is built from the seed, stream kind and tag; the run index selects
/// the ChaCha stream. Any run can be regenerated without touching the others.
pub fn substream(master_seed: u64, run_index: u64, kind: StreamKind, tag: u16) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8] = kind.code();
    key[10..12].copy_from_slice(&tag.to_le_bytes());
    key[24..].copy_from_slice(DOMAIN);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(run_index);
    rng
}
