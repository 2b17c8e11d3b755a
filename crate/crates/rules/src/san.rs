//! Standard algebraic notation.

use thiserror::Error;

use crate::position::{CastlingSide, Position};
use crate::types::{Move, Role, Square, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SanError {
    #[error("unparseable SAN {0:?}")]
    Unparseable(String),
    #[error("SAN {0:?} matches more than one legal move")]
    Ambiguous(String),
    #[error("SAN {0:?} matches no legal move")]
    NoMatchingMove(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SanKind {
    Castle(CastlingSide),
    Normal {
        role: Role,
        file: Option<u8>,
        rank: Option<u8>,
        capture: bool,
        to: Square,
        promotion: Option<Role>,
    },
}

fn parse_syntax(text: &str) -> Option<SanKind> {
    let core = text.trim_end_matches(['+', '#', '!', '?']);
    if matches!(core, "O-O" | "0-0") {
        return Some(SanKind::Castle(CastlingSide::King));
    }
    if matches!(core, "O-O-O" | "0-0-0") {
        return Some(SanKind::Castle(CastlingSide::Queen));
    }
    let b = core.as_bytes();
    if b.len() < 2 || !core.is_ascii() {
        return None;
    }
    let mut i = 0;
    let role = match b[0] {
        b'N' => Role::Knight,
        b'B' => Role::Bishop,
        b'R' => Role::Rook,
        b'Q' => Role::Queen,
        b'K' => Role::King,
        _ => Role::Pawn,
    };
    if role != Role::Pawn {
        i = 1;
    }
    // promotion suffix: "=Q" or bare "Q"
    let mut end = b.len();
    let mut promotion = None;
    if end >= 2 && b[end - 2] == b'=' {
        promotion = Some(Role::from_char(b[end - 1] as char)?);
        end -= 2;
    } else if role == Role::Pawn && end >= 3 && b[end - 1].is_ascii_uppercase() {
        promotion = Some(Role::from_char(b[end - 1] as char)?);
        end -= 1;
    }
    if promotion == Some(Role::Pawn) {
        return None;
    }
    if end < i + 2 {
        return None;
    }
    let to: Square = core[end - 2..end].parse().ok()?;
    let mid = &b[i..end - 2];
    let mut file = None;
    let mut rank = None;
    let mut capture = false;
    for (k, &c) in mid.iter().enumerate() {
        match c {
            b'a'..=b'h' if file.is_none() && rank.is_none() && !capture => file = Some(c - b'a'),
            b'1'..=b'8' if rank.is_none() && !capture => rank = Some(c - b'1'),
            b'x' if !capture => capture = true,
            b'-' if k == mid.len() - 1 => {}
            _ => return None,
        }
    }
    Some(SanKind::Normal {
        role,
        file,
        rank,
        capture,
        to,
        promotion,
    })
}

/// Resolves SAN text to a move. Candidates are filtered by pseudo-legal
/// movement first; king safety is only consulted to break ties, so that
/// replaying trusted movetext stays cheap.
pub fn parse_san(pos: &Position, text: &str) -> Result<Move, SanError> {
    let kind = parse_syntax(text.trim()).ok_or_else(|| SanError::Unparseable(text.to_string()))?;
    let us = pos.turn();
    let candidates: Vec<Move> = match kind {
        SanKind::Castle(side) => {
            let Some(king) = pos
                .pieces()
                .find(|(sq, p)| p.color == us && p.role == Role::King && sq.rank() == us.back_rank())
                .map(|(sq, _)| sq)
            else {
                return Err(SanError::NoMatchingMove(text.to_string()));
            };
            let mut moves = Vec::new();
            pos.pseudo_moves_from(king, &mut moves);
            moves
                .into_iter()
                .filter(|m| {
                    pos.is_castle(m)
                        && match side {
                            CastlingSide::King => m.to.file() > m.from.file(),
                            CastlingSide::Queen => m.to.file() < m.from.file(),
                        }
                })
                .collect()
        }
        SanKind::Normal {
            role,
            file,
            rank,
            capture: _,
            to,
            promotion,
        } => {
            let mut moves = Vec::new();
            for (sq, p) in pos.pieces() {
                if p.color != us || p.role != role {
                    continue;
                }
                if file.is_some_and(|f| sq.file() != f) || rank.is_some_and(|r| sq.rank() != r) {
                    continue;
                }
                pos.pseudo_moves_from(sq, &mut moves);
            }
            moves
                .into_iter()
                .filter(|m| m.to == to && m.promotion == promotion && !pos.is_castle(m))
                .collect()
        }
    };
    match candidates.len() {
        0 => Err(SanError::NoMatchingMove(text.to_string())),
        1 => Ok(candidates[0]),
        _ => {
            let legal = pos.legal_moves();
            let mut remaining = candidates.into_iter().filter(|m| legal.contains(m));
            match (remaining.next(), remaining.next()) {
                (Some(m), None) => Ok(m),
                (None, _) => Err(SanError::NoMatchingMove(text.to_string())),
                (Some(_), Some(_)) => Err(SanError::Ambiguous(text.to_string())),
            }
        }
    }
}

/// Writes SAN for a legal move, with minimal disambiguation and check/mate suffixes.
pub fn to_san(pos: &Position, mv: &Move) -> String {
    let mut out = String::new();
    let Some(piece) = pos.piece_at(mv.from) else {
        return crate::uci::to_uci(pos, mv);
    };
    if pos.is_castle(mv) {
        out.push_str(if mv.to.file() > mv.from.file() {
            "O-O"
        } else {
            "O-O-O"
        });
    } else {
        let capture = pos.is_capture_unchecked(mv);
        if piece.role == Role::Pawn {
            if capture {
                out.push((b'a' + mv.from.file()) as char);
            }
        } else {
            out.push(piece.role.upper_char());
            let legal = pos.legal_moves();
            let others: Vec<&Move> = legal
                .iter()
                .filter(|m| {
                    m.to == mv.to
                        && m.from != mv.from
                        && !pos.is_castle(m)
                        && pos.piece_at(m.from) == Some(piece)
                })
                .collect();
            if !others.is_empty() {
                let file_unique = others.iter().all(|m| m.from.file() != mv.from.file());
                let rank_unique = others.iter().all(|m| m.from.rank() != mv.from.rank());
                if file_unique {
                    out.push((b'a' + mv.from.file()) as char);
                } else if rank_unique {
                    out.push((b'1' + mv.from.rank()) as char);
                } else {
                    out.push_str(&mv.from.to_string());
                }
            }
        }
        if capture {
            out.push('x');
        }
        out.push_str(&mv.to.to_string());
        if let Some(r) = mv.promotion {
            out.push('=');
            out.push(r.upper_char());
        }
    }
    let next = pos.make_unchecked(mv).0;
    if next.variant().royal_king() {
        let them = pos.turn().other();
        let exploded = next.variant() == Variant::Atomic && next.king_square(them).is_none();
        if exploded || (next.in_check(them) && next.legal_moves().is_empty()) {
            out.push('#');
        } else if next.in_check(them) {
            out.push('+');
        }
    }
    out
}
