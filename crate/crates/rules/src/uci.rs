use thiserror::Error;

use crate::position::{CastlingSide, Position};
use crate::types::{Move, Role, Square, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UciMoveError {
    #[error("malformed UCI move {0:?}")]
    Syntax(String),
}

/// Parses UCI move text against a position. Standard-style castling
/// (`e1g1`) is converted to king-takes-rook; `e1h1` is accepted as is.
pub fn parse_uci(pos: &Position, text: &str) -> Result<Move, UciMoveError> {
    let err = || UciMoveError::Syntax(text.to_string());
    if !text.is_ascii() || !(4..=5).contains(&text.len()) {
        return Err(err());
    }
    let from: Square = text[0..2].parse().map_err(|_| err())?;
    let to: Square = text[2..4].parse().map_err(|_| err())?;
    let promotion = match text.as_bytes().get(4) {
        None => None,
        Some(&c) => match Role::from_char(c as char) {
            Some(Role::Pawn) | None => return Err(err()),
            Some(r) => Some(r),
        },
    };
    if from == to {
        return Err(err());
    }
    let mut mv = Move {
        from,
        to,
        promotion,
    };
    // King moving two files along its back rank onto a non-rook: standard castling notation.
    if pos.variant() != Variant::Antichess {
        if let Some(king) = pos.piece_at(from) {
            if king.role == Role::King
                && from.rank() == king.color.back_rank()
                && to.rank() == from.rank()
                && from.file().abs_diff(to.file()) == 2
                && pos.piece_at(to).is_none_or(|p| p.role != Role::Rook || p.color != king.color)
            {
                let side = if to.file() > from.file() {
                    CastlingSide::King
                } else {
                    CastlingSide::Queen
                };
                if let Some(rook_file) = pos.castling().rook_file(king.color, side) {
                    mv.to = Square::from_coords(rook_file, from.rank());
                }
            }
        }
    }
    Ok(mv)
}

/// Writes UCI move text. Castling is written king-to-destination except in Chess960.
pub fn to_uci(pos: &Position, mv: &Move) -> String {
    let mut to = mv.to;
    if pos.variant() != Variant::Chess960 && pos.is_castle(mv) {
        let side = if mv.to.file() > mv.from.file() {
            CastlingSide::King
        } else {
            CastlingSide::Queen
        };
        to = Square::from_coords(side.king_to_file(), mv.from.rank());
    }
    let mut out = format!("{}{}", mv.from, to);
    if let Some(r) = mv.promotion {
        out.push(r.char());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_castling_maps_to_rook_square() {
        let pos = Position::from_fen(
            "r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1",
            Variant::Standard,
        )
        .unwrap();
        let mv = parse_uci(&pos, "e1g1").unwrap();
        assert_eq!(mv.to, "h1".parse().unwrap());
        assert_eq!(to_uci(&pos, &mv), "e1g1");
        let mv = parse_uci(&pos, "e1c1").unwrap();
        assert_eq!(mv.to, "a1".parse().unwrap());
        let after = pos.play(&mv).unwrap();
        assert_eq!(after.board_fen(), "r3k2r/pppppppp/8/8/8/8/PPPPPPPP/2KR3R");
    }

    #[test]
    fn promotions_and_errors() {
        let pos = Position::from_fen("8/P7/8/8/8/8/8/K6k w", Variant::Standard).unwrap();
        let mv = parse_uci(&pos, "a7a8q").unwrap();
        assert_eq!(mv.promotion, Some(Role::Queen));
        assert_eq!(to_uci(&pos, &mv), "a7a8q");
        for bad in ["", "a7", "a7a8p", "a7a7", "z1a2", "a7a8qq", "é1a2"] {
            assert!(parse_uci(&pos, bad).is_err(), "{bad}");
        }
    }
}
