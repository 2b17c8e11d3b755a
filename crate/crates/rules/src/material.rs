use crate::position::Position;
use crate::types::{Color, Role, Square};

/// Passed-pawn rank buckets, relative to the pawn's owner.
pub const PASSED_BUCKETS: [&str; 4] = ["2-4", "5", "6", "7"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SideCounts {
    pub pawns: u32,
    pub knights: u32,
    pub bishops: u32,
    pub rooks: u32,
    pub queens: u32,
    pub kings: u32,
    /// Passed pawns on relative ranks 2-4, 5, 6 and 7.
    pub passed: [u32; 4],
}

impl SideCounts {
    pub fn role(&self, role: Role) -> u32 {
        match role {
            Role::Pawn => self.pawns,
            Role::Knight => self.knights,
            Role::Bishop => self.bishops,
            Role::Rook => self.rooks,
            Role::Queen => self.queens,
            Role::King => self.kings,
        }
    }

    fn bump(&mut self, role: Role) {
        match role {
            Role::Pawn => self.pawns += 1,
            Role::Knight => self.knights += 1,
            Role::Bishop => self.bishops += 1,
            Role::Rook => self.rooks += 1,
            Role::Queen => self.queens += 1,
            Role::King => self.kings += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.pawns + self.knights + self.bishops + self.rooks + self.queens + self.kings
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaterialCounts {
    pub white: SideCounts,
    pub black: SideCounts,
}

/// White-minus-black differences of [`MaterialCounts`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaterialDelta {
    pub pawn: i32,
    pub knight: i32,
    pub bishop: i32,
    pub rook: i32,
    pub queen: i32,
    pub king: i32,
    pub passed: [i32; 4],
}

impl MaterialCounts {
    pub fn side(&self, color: Color) -> &SideCounts {
        match color {
            Color::White => &self.white,
            Color::Black => &self.black,
        }
    }

    pub fn delta(&self) -> MaterialDelta {
        let d = |r: Role| self.white.role(r) as i32 - self.black.role(r) as i32;
        let mut passed = [0; 4];
        for (i, p) in passed.iter_mut().enumerate() {
            *p = self.white.passed[i] as i32 - self.black.passed[i] as i32;
        }
        MaterialDelta {
            pawn: d(Role::Pawn),
            knight: d(Role::Knight),
            bishop: d(Role::Bishop),
            rook: d(Role::Rook),
            queen: d(Role::Queen),
            king: d(Role::King),
            passed,
        }
    }
}

/// Bucket index for a passed pawn on the given relative rank, if any.
pub fn passed_bucket(relative_rank: u8) -> Option<usize> {
    match relative_rank {
        2..=4 => Some(0),
        5 => Some(1),
        6 => Some(2),
        7 => Some(3),
        _ => None,
    }
}

/// A pawn is passed when no opposing pawn stands on its own or an adjacent
/// file anywhere ahead of it. The same definition is used for every variant.
pub fn is_passed(pos: &Position, sq: Square, color: Color) -> bool {
    let enemy = color.other();
    let fwd = color.forward();
    let mut rank = sq.rank() as i8 + fwd;
    while (0..8).contains(&rank) {
        for df in -1..=1 {
            let file = sq.file() as i8 + df;
            if let Some(s) = Square::try_from_coords(file, rank) {
                if pos
                    .piece_at(s)
                    .is_some_and(|p| p.color == enemy && p.role == Role::Pawn)
                {
                    return false;
                }
            }
        }
        rank += fwd;
    }
    true
}

impl Position {
    pub fn material_counts(&self) -> MaterialCounts {
        let mut counts = MaterialCounts::default();
        for (sq, p) in self.pieces() {
            let side = match p.color {
                Color::White => &mut counts.white,
                Color::Black => &mut counts.black,
            };
            side.bump(p.role);
            if p.role == Role::Pawn && is_passed(self, sq, p.color) {
                if let Some(b) = passed_bucket(sq.relative_rank(p.color)) {
                    side.passed[b] += 1;
                }
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Variant;

    #[test]
    fn passed_pawn_example_deltas() {
        let pos = Position::from_fen(
            "5k2/6p1/1p4qp/p1pPp1p1/b1P1Pn2/2P5/2Q3PP/3BB1K1 w",
            Variant::Standard,
        )
        .unwrap();
        let d = pos.material_counts().delta();
        assert_eq!(d.pawn, -1);
        assert_eq!(d.passed, [-1, 1, 0, 0]);
    }

    #[test]
    fn start_is_balanced() {
        for v in Variant::ALL {
            if v == Variant::Horde {
                continue;
            }
            let d = Position::start(v).material_counts().delta();
            assert_eq!(d, MaterialDelta::default(), "{v}");
        }
    }

    #[test]
    fn buckets() {
        assert_eq!(passed_bucket(1), None);
        assert_eq!(passed_bucket(2), Some(0));
        assert_eq!(passed_bucket(4), Some(0));
        assert_eq!(passed_bucket(5), Some(1));
        assert_eq!(passed_bucket(7), Some(3));
        assert_eq!(passed_bucket(8), None);
    }
}
