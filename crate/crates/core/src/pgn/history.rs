use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::{GameRecord, YearMonth};

const MAGIC: &[u8; 8] = b"PVHIDX01";
const MAX_NAME_BYTES: u32 = 1 << 16;

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a history index (bad magic)")]
    BadMagic,
    #[error("corrupt history index: {0}")]
    Corrupt(String),
}

/// Games played per player per calendar month.
///
/// Built in one pass over the archive and merged across shards. Persisted as
/// a sorted binary table: magic, entry count (u64 LE), then per entry the
/// player name (u32 LE length + UTF-8), year (u16 LE), month (u8) and count
/// (u32 LE), ordered by (player, month) with no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlayerHistoryIndex {
    counts: BTreeMap<(String, YearMonth), u32>,
}

impl PlayerHistoryIndex {
    pub fn new() -> PlayerHistoryIndex {
        PlayerHistoryIndex::default()
    }

    pub fn build<'a, I: IntoIterator<Item = &'a GameRecord>>(records: I) -> PlayerHistoryIndex {
        let mut index = PlayerHistoryIndex::new();
        for r in records {
            index.add_game(r);
        }
        index
    }

    pub fn add_game(&mut self, record: &GameRecord) {
        self.add(&record.white, record.utc_month, 1);
        self.add(&record.black, record.utc_month, 1);
    }

    pub fn add(&mut self, player: &str, month: YearMonth, games: u32) {
        let slot = self.counts.entry((player.to_string(), month)).or_insert(0);
        *slot = slot.saturating_add(games);
    }

    pub fn merge(&mut self, other: PlayerHistoryIndex) {
        for ((player, month), n) in other.counts {
            let slot = self.counts.entry((player, month)).or_insert(0);
            *slot = slot.saturating_add(n);
        }
    }

    pub fn count(&self, player: &str, month: YearMonth) -> u32 {
        self.counts.get(&(player.to_string(), month)).copied().unwrap_or(0)
    }

    /// Games in the `months` calendar months strictly before `month`.
    pub fn window_total(&self, player: &str, month: YearMonth, months: u32) -> u64 {
        let end = month.ordinal();
        let start = end.saturating_sub(months);
        let (Some(lo), Some(hi)) = (YearMonth::from_ordinal(start), YearMonth::from_ordinal(end)) else {
            return 0;
        };
        if start == end {
            return 0;
        }
        self.counts
            .range((player.to_string(), lo)..(player.to_string(), hi))
            .map(|(_, n)| u64::from(*n))
            .sum()
    }

    pub fn player_total(&self, player: &str) -> u64 {
        self.entries()
            .filter(|(p, _, _)| *p == player)
            .map(|(_, _, n)| u64::from(n))
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, YearMonth, u32)> {
        self.counts.iter().map(|((p, m), n)| (p.as_str(), *m, *n))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.counts.len() as u64).to_le_bytes())?;
        for ((player, month), n) in &self.counts {
            let name = player.as_bytes();
            out.write_all(&(name.len() as u32).to_le_bytes())?;
            out.write_all(name)?;
            out.write_all(&month.year.to_le_bytes())?;
            out.write_all(&[month.month])?;
            out.write_all(&n.to_le_bytes())?;
        }
        out.flush()
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<PlayerHistoryIndex, HistoryError> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(HistoryError::BadMagic);
        }
        let mut buf8 = [0u8; 8];
        input.read_exact(&mut buf8).map_err(truncated)?;
        let entries = u64::from_le_bytes(buf8);
        let mut counts = BTreeMap::new();
        let mut previous: Option<(String, YearMonth)> = None;
        for i in 0..entries {
            let mut buf4 = [0u8; 4];
            input.read_exact(&mut buf4).map_err(truncated)?;
            let len = u32::from_le_bytes(buf4);
            if len > MAX_NAME_BYTES {
                return Err(HistoryError::Corrupt(format!("entry {i}: name length {len}")));
            }
            let mut name = vec![0u8; len as usize];
            input.read_exact(&mut name).map_err(truncated)?;
            let name = String::from_utf8(name)
                .map_err(|_| HistoryError::Corrupt(format!("entry {i}: name is not UTF-8")))?;
            let mut buf2 = [0u8; 2];
            input.read_exact(&mut buf2).map_err(truncated)?;
            let mut buf1 = [0u8; 1];
            input.read_exact(&mut buf1).map_err(truncated)?;
            let month = YearMonth::new(u16::from_le_bytes(buf2), buf1[0])
                .ok_or_else(|| HistoryError::Corrupt(format!("entry {i}: bad month {}", buf1[0])))?;
            input.read_exact(&mut buf4).map_err(truncated)?;
            let n = u32::from_le_bytes(buf4);
            let key = (name, month);
            if previous.as_ref().is_some_and(|p| *p >= key) {
                return Err(HistoryError::Corrupt(format!("entry {i}: keys not strictly sorted")));
            }
            previous = Some(key.clone());
            counts.insert(key, n);
        }
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(HistoryError::Corrupt("trailing bytes".into()));
        }
        Ok(PlayerHistoryIndex { counts })
    }
}

fn truncated(e: io::Error) -> HistoryError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        HistoryError::Corrupt("truncated".into())
    } else {
        HistoryError::Io(e)
    }
}
