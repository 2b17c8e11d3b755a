use thiserror::Error;

use crate::types::{Color, Move, MoveEffect, Piece, Role, Square, Variant};

const KNIGHT_STEPS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
const KING_STEPS: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("no piece on {0}")]
    EmptySquare(Square),
    #[error("piece on {0} does not belong to the side to move")]
    WrongColor(Square),
    #[error("piece on {from} cannot move to {to}")]
    Unreachable { from: Square, to: Square },
    #[error("promotion is missing or not allowed for {from}{to}")]
    BadPromotion { from: Square, to: Square },
    #[error("{uci} is not legal in {variant}")]
    VariantRule { uci: String, variant: Variant },
}

/// Castling side. Kingside castles towards the h-file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CastlingSide {
    King,
    Queen,
}

impl CastlingSide {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn king_to_file(self) -> u8 {
        match self {
            CastlingSide::King => 6,
            CastlingSide::Queen => 2,
        }
    }

    pub fn rook_to_file(self) -> u8 {
        match self {
            CastlingSide::King => 5,
            CastlingSide::Queen => 3,
        }
    }
}

/// Castling rights, stored as the file of the rook that may castle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Castling {
    rooks: [[Option<u8>; 2]; 2],
}

impl Castling {
    pub fn none() -> Castling {
        Castling::default()
    }

    pub fn standard() -> Castling {
        Castling {
            rooks: [[Some(7), Some(0)]; 2],
        }
    }

    pub fn rook_file(&self, color: Color, side: CastlingSide) -> Option<u8> {
        self.rooks[color.index()][side.index()]
    }

    pub fn set(&mut self, color: Color, side: CastlingSide, file: Option<u8>) {
        self.rooks[color.index()][side.index()] = file;
    }

    pub fn clear_color(&mut self, color: Color) {
        self.rooks[color.index()] = [None, None];
    }

    pub fn is_empty(&self) -> bool {
        self.rooks.iter().flatten().all(Option::is_none)
    }
}

/// Terminal state of a game as decided by the rules on the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Decisive { winner: Color },
    Draw,
}

/// A replayable board state for any supported variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub(crate) board: [Option<Piece>; 64],
    pub(crate) turn: Color,
    pub(crate) castling: Castling,
    pub(crate) ep_square: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) ply: u32,
    pub(crate) variant: Variant,
}

impl Position {
    pub fn empty(variant: Variant) -> Position {
        Position {
            board: [None; 64],
            turn: Color::White,
            castling: Castling::none(),
            ep_square: None,
            halfmove_clock: 0,
            ply: 0,
            variant,
        }
    }

    /// Starting position of a variant. Chess960 uses the standard arrangement
    /// (opening 518); see [`Position::chess960`] for the others.
    pub fn start(variant: Variant) -> Position {
        let fen = match variant {
            Variant::Horde => crate::fen::HORDE_START_FEN,
            _ => crate::fen::STANDARD_START_FEN,
        };
        let mut pos = Position::from_fen(fen, variant).expect("valid start FEN");
        if variant == Variant::Antichess {
            pos.castling = Castling::none();
        }
        pos
    }

    /// Chess960 opening by Scharnagl number (0..960; 518 is the standard arrangement).
    pub fn chess960(id: u16) -> Option<Position> {
        let back = chess960_back_rank(id)?;
        let mut pos = Position::empty(Variant::Chess960);
        let mut castling = Castling::none();
        let mut king_file = 0;
        for (file, role) in back.iter().enumerate() {
            if *role == Role::King {
                king_file = file as u8;
            }
        }
        for (file, role) in back.iter().enumerate() {
            let file = file as u8;
            pos.board[Square::from_coords(file, 0).index()] = Some(Piece::new(Color::White, *role));
            pos.board[Square::from_coords(file, 7).index()] = Some(Piece::new(Color::Black, *role));
            pos.board[Square::from_coords(file, 1).index()] = Some(Piece::new(Color::White, Role::Pawn));
            pos.board[Square::from_coords(file, 6).index()] = Some(Piece::new(Color::Black, Role::Pawn));
            if *role == Role::Rook {
                let side = if file > king_file {
                    CastlingSide::King
                } else {
                    CastlingSide::Queen
                };
                castling.set(Color::White, side, Some(file));
                castling.set(Color::Black, side, Some(file));
            }
        }
        pos.castling = castling;
        Some(pos)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn turn(&self) -> Color {
        self.turn
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn castling(&self) -> Castling {
        self.castling
    }

    pub fn ep_square(&self) -> Option<Square> {
        self.ep_square
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.ply / 2 + 1
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    pub fn set_piece(&mut self, sq: Square, piece: Option<Piece>) {
        self.board[sq.index()] = piece;
    }

    /// Removes the piece on `sq`, dropping any castling right that relied on it.
    pub fn remove_piece(&mut self, sq: Square) -> Option<Piece> {
        let piece = self.board[sq.index()].take()?;
        let color = piece.color;
        if sq.rank() == color.back_rank() {
            match piece.role {
                Role::King => self.castling.clear_color(color),
                Role::Rook => {
                    for side in [CastlingSide::King, CastlingSide::Queen] {
                        if self.castling.rook_file(color, side) == Some(sq.file()) {
                            self.castling.set(color, side, None);
                        }
                    }
                }
                _ => {}
            }
        }
        Some(piece)
    }

    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        Square::all().filter_map(move |sq| self.board[sq.index()].map(|p| (sq, p)))
    }

    pub fn count(&self, color: Color, role: Role) -> usize {
        self.board
            .iter()
            .flatten()
            .filter(|p| p.color == color && p.role == role)
            .count()
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        self.pieces()
            .find(|(_, p)| p.color == color && p.role == Role::King)
            .map(|(sq, _)| sq)
    }

    /// Whether any piece of `by` attacks `sq`. In Atomic kings never attack
    /// because a king may not capture.
    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        attacked_on(&self.board, sq, by, self.variant != Variant::Atomic)
    }

    /// Whether `color` is in check. Always false for Antichess and for a side without a king.
    pub fn in_check(&self, color: Color) -> bool {
        if !self.variant.royal_king() {
            return false;
        }
        let Some(king) = self.king_square(color) else {
            return false;
        };
        if self.variant == Variant::Atomic {
            if let Some(other) = self.king_square(color.other()) {
                if other.distance(king) == 1 {
                    return false;
                }
            }
        }
        self.is_attacked(king, color.other())
    }

    fn promotion_roles(&self) -> &'static [Role] {
        if self.variant == Variant::Antichess {
            &[Role::Queen, Role::Rook, Role::Bishop, Role::Knight, Role::King]
        } else {
            &[Role::Queen, Role::Rook, Role::Bishop, Role::Knight]
        }
    }

    /// Pseudo-legal moves of the piece on `from`: piece movement, blocking
    /// and variant move shapes, but no check or forced-capture rules.
    pub fn pseudo_moves_from(&self, from: Square, out: &mut Vec<Move>) {
        let Some(piece) = self.board[from.index()] else {
            return;
        };
        if piece.color != self.turn {
            return;
        }
        let us = piece.color;
        let atomic = self.variant == Variant::Atomic;
        match piece.role {
            Role::Pawn => self.pawn_moves(from, us, out),
            Role::Knight => {
                for (df, dr) in KNIGHT_STEPS {
                    if let Some(to) = from.offset(df, dr) {
                        if self.board[to.index()].is_none_or(|p| p.color != us) {
                            out.push(Move::new(from, to));
                        }
                    }
                }
            }
            Role::King => {
                for (df, dr) in KING_STEPS {
                    if let Some(to) = from.offset(df, dr) {
                        match self.board[to.index()] {
                            None => out.push(Move::new(from, to)),
                            Some(p) if p.color != us && !atomic => out.push(Move::new(from, to)),
                            _ => {}
                        }
                    }
                }
                self.castling_moves(from, us, out);
            }
            Role::Bishop => self.slider_moves(from, us, &BISHOP_DIRS, out),
            Role::Rook => self.slider_moves(from, us, &ROOK_DIRS, out),
            Role::Queen => {
                self.slider_moves(from, us, &BISHOP_DIRS, out);
                self.slider_moves(from, us, &ROOK_DIRS, out);
            }
        }
    }

    fn slider_moves(&self, from: Square, us: Color, dirs: &[(i8, i8)], out: &mut Vec<Move>) {
        for &(df, dr) in dirs {
            let mut cur = from;
            while let Some(to) = cur.offset(df, dr) {
                match self.board[to.index()] {
                    None => out.push(Move::new(from, to)),
                    Some(p) => {
                        if p.color != us {
                            out.push(Move::new(from, to));
                        }
                        break;
                    }
                }
                cur = to;
            }
        }
    }

    fn push_pawn_move(&self, from: Square, to: Square, us: Color, out: &mut Vec<Move>) {
        if to.relative_rank(us) == 8 {
            for &role in self.promotion_roles() {
                out.push(Move::with_promotion(from, to, role));
            }
        } else {
            out.push(Move::new(from, to));
        }
    }

    fn pawn_moves(&self, from: Square, us: Color, out: &mut Vec<Move>) {
        let fwd = us.forward();
        if let Some(one) = from.offset(0, fwd) {
            if self.board[one.index()].is_none() {
                self.push_pawn_move(from, one, us, out);
                let rel = from.relative_rank(us);
                let double_ok =
                    rel == 2 || (rel == 1 && self.variant == Variant::Horde && us == Color::White);
                if double_ok {
                    if let Some(two) = one.offset(0, fwd) {
                        if self.board[two.index()].is_none() {
                            out.push(Move::new(from, two));
                        }
                    }
                }
            }
        }
        for df in [-1, 1] {
            if let Some(to) = from.offset(df, fwd) {
                match self.board[to.index()] {
                    Some(p) if p.color != us => self.push_pawn_move(from, to, us, out),
                    None if Some(to) == self.ep_square => out.push(Move::new(from, to)),
                    _ => {}
                }
            }
        }
    }

    fn castling_moves(&self, king: Square, us: Color, out: &mut Vec<Move>) {
        if self.variant == Variant::Antichess || king.rank() != us.back_rank() {
            return;
        }
        for side in [CastlingSide::King, CastlingSide::Queen] {
            let Some(rook_file) = self.castling.rook_file(us, side) else {
                continue;
            };
            let rook = Square::from_coords(rook_file, us.back_rank());
            if self.board[rook.index()] != Some(Piece::new(us, Role::Rook)) {
                continue;
            }
            let on_side = match side {
                CastlingSide::King => rook.file() > king.file(),
                CastlingSide::Queen => rook.file() < king.file(),
            };
            if !on_side {
                continue;
            }
            let king_to = Square::from_coords(side.king_to_file(), us.back_rank());
            let rook_to = Square::from_coords(side.rook_to_file(), us.back_rank());
            let lo = king.file().min(rook.file()).min(king_to.file()).min(rook_to.file());
            let hi = king.file().max(rook.file()).max(king_to.file()).max(rook_to.file());
            let clear = (lo..=hi).all(|f| {
                let sq = Square::from_coords(f, us.back_rank());
                sq == king || sq == rook || self.board[sq.index()].is_none()
            });
            if clear {
                out.push(Move::new(king, rook));
            }
        }
    }

    pub fn pseudo_moves(&self) -> Vec<Move> {
        let mut out = Vec::with_capacity(64);
        for sq in Square::all() {
            self.pseudo_moves_from(sq, &mut out);
        }
        out
    }

    /// Whether `mv` is a castling move (king onto its own rook) in this position.
    pub fn is_castle(&self, mv: &Move) -> bool {
        if self.variant == Variant::Antichess {
            return false;
        }
        match (self.board[mv.from.index()], self.board[mv.to.index()]) {
            (Some(k), Some(r)) => {
                k.role == Role::King && r.role == Role::Rook && k.color == r.color
            }
            _ => false,
        }
    }

    /// Whether a pseudo-legal move also satisfies king safety and the
    /// variant's move restrictions (except Antichess forced captures, which
    /// depend on the whole move list).
    fn is_safe(&self, mv: &Move) -> bool {
        let us = self.turn;
        if self.is_castle(mv) && self.variant.royal_king() {
            let side = if mv.to.file() > mv.from.file() {
                CastlingSide::King
            } else {
                CastlingSide::Queen
            };
            let king_to = Square::from_coords(side.king_to_file(), us.back_rank());
            if self.in_check(us) {
                return false;
            }
            // Every square the king crosses must be safe with the castling rook lifted.
            let mut lifted = self.board;
            lifted[mv.from.index()] = None;
            lifted[mv.to.index()] = None;
            let (lo, hi) = if king_to.file() >= mv.from.file() {
                (mv.from.file(), king_to.file())
            } else {
                (king_to.file(), mv.from.file())
            };
            for f in lo..=hi {
                let sq = Square::from_coords(f, us.back_rank());
                if attacked_on(&lifted, sq, us.other(), self.variant != Variant::Atomic) {
                    if self.variant == Variant::Atomic {
                        // adjacent kings shield each other
                        if let Some(them) = self.king_square(us.other()) {
                            if them.distance(sq) == 1 {
                                continue;
                            }
                        }
                    }
                    return false;
                }
            }
        }
        let (next, _) = self.make_unchecked(mv);
        match self.variant {
            Variant::Antichess => true,
            Variant::Atomic => {
                if next.king_square(us).is_none() {
                    return false;
                }
                if next.king_square(us.other()).is_none() {
                    return true;
                }
                !next.in_check(us)
            }
            _ => !next.in_check(us),
        }
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves: Vec<Move> = self
            .pseudo_moves()
            .into_iter()
            .filter(|m| self.is_safe(m))
            .collect();
        if self.variant == Variant::Antichess && moves.iter().any(|m| self.is_capture_unchecked(m)) {
            moves.retain(|m| self.is_capture_unchecked(m));
        }
        moves
    }

    pub(crate) fn is_capture_unchecked(&self, mv: &Move) -> bool {
        if self.is_castle(mv) {
            return false;
        }
        match self.board[mv.to.index()] {
            Some(p) => p.color != self.turn,
            None => {
                Some(mv.to) == self.ep_square
                    && self.board[mv.from.index()].is_some_and(|p| p.role == Role::Pawn)
                    && mv.from.file() != mv.to.file()
            }
        }
    }

    /// Checks the move against pseudo-legal movement of the piece on its origin square.
    fn validate_shape(&self, mv: &Move) -> Result<(), IllegalMove> {
        let piece = self.board[mv.from.index()].ok_or(IllegalMove::EmptySquare(mv.from))?;
        if piece.color != self.turn {
            return Err(IllegalMove::WrongColor(mv.from));
        }
        let mut candidates = Vec::with_capacity(28);
        self.pseudo_moves_from(mv.from, &mut candidates);
        if candidates.contains(mv) {
            return Ok(());
        }
        let same_target = candidates.iter().any(|m| m.to == mv.to);
        if same_target {
            Err(IllegalMove::BadPromotion {
                from: mv.from,
                to: mv.to,
            })
        } else {
            Err(IllegalMove::Unreachable {
                from: mv.from,
                to: mv.to,
            })
        }
    }

    /// Replay-grade application: the move must be a pseudo-legal move of the
    /// side to move. King safety is not re-verified.
    pub fn play(&self, mv: &Move) -> Result<Position, IllegalMove> {
        self.play_with_effect(mv).map(|(p, _)| p)
    }

    pub fn play_with_effect(&self, mv: &Move) -> Result<(Position, MoveEffect), IllegalMove> {
        self.validate_shape(mv)?;
        Ok(self.make_unchecked(mv))
    }

    /// Full-legality application used when moves are chosen rather than replayed.
    pub fn play_strict(&self, mv: &Move) -> Result<Position, IllegalMove> {
        self.validate_shape(mv)?;
        if !self.legal_moves().contains(mv) {
            return Err(IllegalMove::VariantRule {
                uci: crate::uci::to_uci(self, mv),
                variant: self.variant,
            });
        }
        Ok(self.make_unchecked(mv).0)
    }

    /// Whether `mv` removes at least one opposing piece.
    pub fn is_capture(&self, mv: &Move) -> Result<bool, IllegalMove> {
        self.validate_shape(mv)?;
        Ok(self.is_capture_unchecked(mv))
    }

    pub(crate) fn make_unchecked(&self, mv: &Move) -> (Position, MoveEffect) {
        let piece = self.board[mv.from.index()].expect("move from an occupied square");
        let us = piece.color;
        let mut next = *self;
        let mut effect = MoveEffect::default();
        next.ep_square = None;

        if self.is_castle(mv) {
            let side = if mv.to.file() > mv.from.file() {
                CastlingSide::King
            } else {
                CastlingSide::Queen
            };
            let rook = next.board[mv.to.index()];
            next.board[mv.from.index()] = None;
            next.board[mv.to.index()] = None;
            next.board[Square::from_coords(side.king_to_file(), us.back_rank()).index()] = Some(piece);
            next.board[Square::from_coords(side.rook_to_file(), us.back_rank()).index()] = rook;
            next.castling.clear_color(us);
            effect.castle = true;
            next.halfmove_clock += 1;
        } else {
            let target = self.board[mv.to.index()];
            let en_passant = piece.role == Role::Pawn
                && target.is_none()
                && Some(mv.to) == self.ep_square
                && mv.from.file() != mv.to.file();
            let captured_sq = if en_passant {
                mv.to.offset(0, -us.forward())
            } else if target.is_some() {
                Some(mv.to)
            } else {
                None
            };
            next.board[mv.from.index()] = None;
            if let Some(csq) = captured_sq {
                if let Some(victim) = next.board[csq.index()].take() {
                    effect.removed.push((csq, victim));
                }
                effect.capture = true;
                effect.en_passant = en_passant;
            }
            let placed = match mv.promotion {
                Some(role) => Piece::new(us, role),
                None => piece,
            };
            next.board[mv.to.index()] = Some(placed);

            if self.variant == Variant::Atomic && effect.capture {
                next.board[mv.to.index()] = None;
                effect.removed.push((mv.to, placed));
                for (df, dr) in KING_STEPS {
                    if let Some(n) = mv.to.offset(df, dr) {
                        if let Some(p) = next.board[n.index()] {
                            if p.role != Role::Pawn {
                                next.board[n.index()] = None;
                                effect.removed.push((n, p));
                            }
                        }
                    }
                }
            }

            if piece.role == Role::Pawn && mv.from.rank().abs_diff(mv.to.rank()) == 2 {
                if mv.from.relative_rank(us) == 2 {
                    next.ep_square = mv.from.offset(0, us.forward());
                }
            }
            if piece.role == Role::Pawn || effect.capture {
                next.halfmove_clock = 0;
            } else {
                next.halfmove_clock += 1;
            }
            if piece.role == Role::King {
                next.castling.clear_color(us);
            }
        }

        for color in [Color::White, Color::Black] {
            let back = color.back_rank();
            let king_home = next
                .pieces()
                .any(|(sq, p)| p.color == color && p.role == Role::King && sq.rank() == back);
            if !king_home {
                next.castling.clear_color(color);
                continue;
            }
            for side in [CastlingSide::King, CastlingSide::Queen] {
                if let Some(file) = next.castling.rook_file(color, side) {
                    let sq = Square::from_coords(file, back);
                    if next.board[sq.index()] != Some(Piece::new(color, Role::Rook)) {
                        next.castling.set(color, side, None);
                    }
                }
            }
        }

        next.turn = us.other();
        next.ply += 1;
        (next, effect)
    }

    /// Rules-decided end of game, if any. Draws by repetition, the fifty-move
    /// rule or insufficient material are the caller's business.
    pub fn outcome(&self) -> Option<Outcome> {
        let us = self.turn;
        match self.variant {
            Variant::Atomic => {
                for color in [Color::White, Color::Black] {
                    if self.king_square(color).is_none() {
                        return Some(Outcome::Decisive {
                            winner: color.other(),
                        });
                    }
                }
            }
            Variant::Horde => {
                if !self.pieces().any(|(_, p)| p.color == Color::White) {
                    return Some(Outcome::Decisive {
                        winner: Color::Black,
                    });
                }
            }
            _ => {}
        }
        if !self.legal_moves().is_empty() {
            return None;
        }
        if self.variant == Variant::Antichess {
            return Some(Outcome::Decisive { winner: us });
        }
        if self.in_check(us) {
            Some(Outcome::Decisive { winner: us.other() })
        } else {
            Some(Outcome::Draw)
        }
    }

    /// Neither side can possibly deliver mate (standard-rule variants only).
    pub fn insufficient_material(&self) -> bool {
        if !matches!(self.variant, Variant::Standard | Variant::Chess960) {
            return false;
        }
        let mut minors = 0;
        for (_, p) in self.pieces() {
            match p.role {
                Role::King => {}
                Role::Knight | Role::Bishop => minors += 1,
                _ => return false,
            }
        }
        minors <= 1
    }
}

fn attacked_on(board: &[Option<Piece>; 64], sq: Square, by: Color, kings_attack: bool) -> bool {
    let is = |s: Square, roles: &[Role]| {
        board[s.index()].is_some_and(|p| p.color == by && roles.contains(&p.role))
    };
    // a pawn of `by` attacks sq from one rank behind (from by's viewpoint)
    for df in [-1, 1] {
        if let Some(s) = sq.offset(df, -by.forward()) {
            if is(s, &[Role::Pawn]) {
                return true;
            }
        }
    }
    for (df, dr) in KNIGHT_STEPS {
        if let Some(s) = sq.offset(df, dr) {
            if is(s, &[Role::Knight]) {
                return true;
            }
        }
    }
    if kings_attack {
        for (df, dr) in KING_STEPS {
            if let Some(s) = sq.offset(df, dr) {
                if is(s, &[Role::King]) {
                    return true;
                }
            }
        }
    }
    for (dirs, roles) in [
        (&ROOK_DIRS, [Role::Rook, Role::Queen]),
        (&BISHOP_DIRS, [Role::Bishop, Role::Queen]),
    ] {
        for &(df, dr) in dirs {
            let mut cur = sq;
            while let Some(s) = cur.offset(df, dr) {
                if let Some(p) = board[s.index()] {
                    if p.color == by && roles.contains(&p.role) {
                        return true;
                    }
                    break;
                }
                cur = s;
            }
        }
    }
    false
}

/// Back-rank arrangement for a Chess960 opening, using Scharnagl numbering.
pub fn chess960_back_rank(id: u16) -> Option<[Role; 8]> {
    if id >= 960 {
        return None;
    }
    let mut rank: [Option<Role>; 8] = [None; 8];
    let mut n = id as usize;
    rank[(n % 4) * 2 + 1] = Some(Role::Bishop);
    n /= 4;
    rank[(n % 4) * 2] = Some(Role::Bishop);
    n /= 4;
    let q = n % 6;
    n /= 6;
    let free = |rank: &[Option<Role>; 8], k: usize| {
        rank.iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .nth(k)
            .map(|(i, _)| i)
            .expect("free square")
    };
    let qi = free(&rank, q);
    rank[qi] = Some(Role::Queen);
    const KNIGHTS: [(usize, usize); 10] = [
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 3),
        (2, 4),
        (3, 4),
    ];
    let (a, b) = KNIGHTS[n];
    let ka = free(&rank, a);
    let kb = free(&rank, b);
    rank[ka] = Some(Role::Knight);
    rank[kb] = Some(Role::Knight);
    for role in [Role::Rook, Role::King, Role::Rook] {
        let i = free(&rank, 0);
        rank[i] = Some(role);
    }
    Some(rank.map(|r| r.expect("filled")))
}
