//! Board representation and move application for standard chess, Chess960,
//! Atomic, Antichess and Horde.
//!
//! [`Position`] is a small copyable value. Moves replayed from game records
//! go through [`Position::play`], which checks piece movement but not king
//! safety; [`Position::play_strict`] checks full legality and is meant for
//! positions where moves are being chosen.

mod fen;
mod material;
mod position;
mod san;
mod types;
mod uci;

pub use fen::{FenError, HORDE_START_FEN, STANDARD_START_FEN};
pub use material::{is_passed, passed_bucket, MaterialCounts, MaterialDelta, SideCounts, PASSED_BUCKETS};
pub use position::{chess960_back_rank, Castling, CastlingSide, IllegalMove, Outcome, Position};
pub use san::{parse_san, to_san, SanError};
pub use types::{Color, Move, MoveEffect, Piece, Role, Square, Variant};
pub use uci::{parse_uci, to_uci, UciMoveError};
