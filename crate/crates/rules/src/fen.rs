//! FEN reading and writing.
//!
//! Castling rights accept `KQkq`, X-FEN (outermost rook) and Shredder-FEN
//! file letters. Chess960 positions are written with file letters; all other
//! variants with `KQkq`. The halfmove and fullmove fields are optional on input.

use thiserror::Error;

use crate::position::{Castling, CastlingSide, Position};
use crate::types::{Color, Piece, Role, Square, Variant};

pub const STANDARD_START_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
pub const HORDE_START_FEN: &str =
    "rnbqkbnr/pppppppp/8/1PP2PP1/PPPPPPPP/PPPPPPPP/PPPPPPPP/PPPPPPPP w kq - 0 1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FenError {
    #[error("missing board field")]
    Empty,
    #[error("board field must have 8 ranks")]
    RankCount,
    #[error("rank {0} does not describe 8 files")]
    RankWidth(usize),
    #[error("invalid piece character {0:?}")]
    PieceChar(char),
    #[error("invalid side to move {0:?}")]
    Turn(String),
    #[error("invalid castling field {0:?}")]
    Castling(String),
    #[error("invalid en passant square {0:?}")]
    EnPassant(String),
    #[error("invalid move counter {0:?}")]
    Counter(String),
    #[error("pawn on a promotion rank")]
    PawnOnBackRank,
    #[error("expected exactly one king per side")]
    KingCount,
    #[error("too many fields")]
    TrailingFields,
}

impl Position {
    pub fn from_fen(fen: &str, variant: Variant) -> Result<Position, FenError> {
        let mut fields = fen.split_ascii_whitespace();
        let board_field = fields.next().ok_or(FenError::Empty)?;
        let mut pos = Position::empty(variant);

        // Lichess exports some variants with a trailing "[...]" pocket or "~" markers; none apply here.
        let ranks: Vec<&str> = board_field.split('/').collect();
        if ranks.len() != 8 {
            return Err(FenError::RankCount);
        }
        for (i, rank_text) in ranks.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file: u8 = 0;
            for c in rank_text.chars() {
                if let Some(d) = c.to_digit(10) {
                    if d == 0 || d > 8 {
                        return Err(FenError::RankWidth(rank as usize + 1));
                    }
                    file += d as u8;
                } else {
                    let piece = Piece::from_fen_char(c).ok_or(FenError::PieceChar(c))?;
                    if file >= 8 {
                        return Err(FenError::RankWidth(rank as usize + 1));
                    }
                    pos.board[Square::from_coords(file, rank).index()] = Some(piece);
                    file += 1;
                }
                if file > 8 {
                    return Err(FenError::RankWidth(rank as usize + 1));
                }
            }
            if file != 8 {
                return Err(FenError::RankWidth(rank as usize + 1));
            }
        }

        pos.turn = match fields.next() {
            None | Some("w") => Color::White,
            Some("b") => Color::Black,
            Some(other) => return Err(FenError::Turn(other.to_string())),
        };

        let castling_field = fields.next().unwrap_or("-");
        pos.castling = parse_castling(&pos, castling_field)?;

        pos.ep_square = match fields.next() {
            None | Some("-") => None,
            Some(text) => {
                let sq: Square = text
                    .parse()
                    .map_err(|_| FenError::EnPassant(text.to_string()))?;
                if sq.rank() != 2 && sq.rank() != 5 {
                    return Err(FenError::EnPassant(text.to_string()));
                }
                Some(sq)
            }
        };

        let halfmove = match fields.next() {
            None => 0,
            Some(t) => t.parse::<u32>().map_err(|_| FenError::Counter(t.to_string()))?,
        };
        let fullmove = match fields.next() {
            None => 1,
            Some(t) => t
                .parse::<u32>()
                .ok()
                .filter(|n| (1..=100_000).contains(n))
                .ok_or_else(|| FenError::Counter(t.to_string()))?,
        };
        if fields.next().is_some() {
            return Err(FenError::TrailingFields);
        }
        pos.halfmove_clock = halfmove;
        pos.ply = 2 * (fullmove - 1) + u32::from(pos.turn == Color::Black);

        validate(&pos)?;
        Ok(pos)
    }

    pub fn to_fen(&self) -> String {
        let mut out = String::with_capacity(90);
        out.push_str(&self.board_fen());
        out.push(' ');
        out.push(self.turn.char());
        out.push(' ');
        out.push_str(&castling_text(self));
        out.push(' ');
        match self.ep_square {
            Some(sq) => out.push_str(&sq.to_string()),
            None => out.push('-'),
        }
        out.push_str(&format!(" {} {}", self.halfmove_clock, self.fullmove_number()));
        out
    }

    /// Board field and side to move only, e.g. `"8/8/8/8/8/8/8/K6k w"`.
    pub fn short_fen(&self) -> String {
        format!("{} {}", self.board_fen(), self.turn.char())
    }

    pub fn board_fen(&self) -> String {
        let mut out = String::with_capacity(72);
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.board[Square::from_coords(file, rank).index()] {
                    None => empty += 1,
                    Some(p) => {
                        if empty > 0 {
                            out.push(char::from_digit(empty, 10).expect("digit"));
                            empty = 0;
                        }
                        out.push(p.fen_char());
                    }
                }
            }
            if empty > 0 {
                out.push(char::from_digit(empty, 10).expect("digit"));
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out
    }
}

fn validate(pos: &Position) -> Result<(), FenError> {
    for (sq, p) in pos.pieces() {
        if p.role == Role::Pawn {
            let promo_rank = sq.relative_rank(p.color) == 8;
            let back_rank = sq.relative_rank(p.color) == 1;
            // Horde white pawns legitimately start on the first rank.
            let horde_ok = pos.variant == Variant::Horde && p.color == Color::White && back_rank;
            if promo_rank || (back_rank && !horde_ok) {
                return Err(FenError::PawnOnBackRank);
            }
        }
    }
    let kings = |c| pos.count(c, Role::King);
    match pos.variant {
        Variant::Standard | Variant::Chess960 => {
            if kings(Color::White) != 1 || kings(Color::Black) != 1 {
                return Err(FenError::KingCount);
            }
        }
        // An exploded king ends the game, so a terminal Atomic position may lack one.
        Variant::Atomic => {
            if kings(Color::White) > 1 || kings(Color::Black) > 1 {
                return Err(FenError::KingCount);
            }
        }
        Variant::Horde => {
            if kings(Color::White) != 0 || kings(Color::Black) != 1 {
                return Err(FenError::KingCount);
            }
        }
        Variant::Antichess => {}
    }
    Ok(())
}

fn parse_castling(pos: &Position, field: &str) -> Result<Castling, FenError> {
    let mut castling = Castling::none();
    if field == "-" {
        return Ok(castling);
    }
    let err = || FenError::Castling(field.to_string());
    for c in field.chars() {
        let color = if c.is_ascii_uppercase() {
            Color::White
        } else {
            Color::Black
        };
        let back = color.back_rank();
        let king = pos
            .pieces()
            .find(|(sq, p)| p.color == color && p.role == Role::King && sq.rank() == back)
            .map(|(sq, _)| sq)
            .ok_or_else(err)?;
        let rook_at = |f: u8| {
            pos.piece_at(Square::from_coords(f, back)) == Some(Piece::new(color, Role::Rook))
        };
        let (side, file) = match c.to_ascii_lowercase() {
            'k' => {
                let f = (king.file() + 1..8).rev().find(|&f| rook_at(f)).ok_or_else(err)?;
                (CastlingSide::King, f)
            }
            'q' => {
                let f = (0..king.file()).find(|&f| rook_at(f)).ok_or_else(err)?;
                (CastlingSide::Queen, f)
            }
            l @ 'a'..='h' => {
                let f = l as u8 - b'a';
                if !rook_at(f) || f == king.file() {
                    return Err(err());
                }
                let side = if f > king.file() {
                    CastlingSide::King
                } else {
                    CastlingSide::Queen
                };
                (side, f)
            }
            _ => return Err(err()),
        };
        if castling.rook_file(color, side).is_some() {
            return Err(err());
        }
        castling.set(color, side, Some(file));
    }
    Ok(castling)
}

fn castling_text(pos: &Position) -> String {
    let c = pos.castling();
    if c.is_empty() {
        return "-".to_string();
    }
    let mut out = String::new();
    for color in [Color::White, Color::Black] {
        for side in [CastlingSide::King, CastlingSide::Queen] {
            let Some(file) = c.rook_file(color, side) else {
                continue;
            };
            let ch = if pos.variant() == Variant::Chess960 || !is_outermost(pos, color, side, file)
            {
                (b'a' + file) as char
            } else if side == CastlingSide::King {
                'k'
            } else {
                'q'
            };
            out.push(match color {
                Color::White => ch.to_ascii_uppercase(),
                Color::Black => ch,
            });
        }
    }
    out
}

/// Whether the castling rook is the outermost rook on its side, so `K`/`Q` identify it.
fn is_outermost(pos: &Position, color: Color, side: CastlingSide, file: u8) -> bool {
    let back = color.back_rank();
    let rook_at =
        |f: u8| pos.piece_at(Square::from_coords(f, back)) == Some(Piece::new(color, Role::Rook));
    match side {
        CastlingSide::King => (file + 1..8).all(|f| !rook_at(f)),
        CastlingSide::Queen => (0..file).all(|f| !rook_at(f)),
    }
}
