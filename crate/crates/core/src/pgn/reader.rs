use std::collections::BTreeMap;
use std::io::{self, BufRead, Read};

use piecevalue_rules::Variant;
use serde::Serialize;

use super::{GameRecord, ParseError};

/// Longest accepted line; longer lines are consumed and the game is marked bad.
pub const MAX_LINE_BYTES: usize = 1 << 20;
/// Movetext budget per game.
pub const MAX_MOVETEXT_BYTES: usize = 1 << 20;
const MAX_TAGS: usize = 256;
const MAX_VARIATION_DEPTH: usize = 64;

/// A game as it appears in the archive, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGame {
    pub tags: Vec<(String, String)>,
    pub moves: Vec<String>,
    /// Result token that ended the movetext, if any.
    pub movetext_result: Option<String>,
    /// First lexical problem seen while reading this game.
    pub syntax_error: Option<String>,
}

impl RawGame {
    pub fn tag(&self, name: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn fail(&mut self, message: impl Into<String>) {
        if self.syntax_error.is_none() {
            self.syntax_error = Some(message.into());
        }
    }

    fn is_empty(&self) -> bool {
        self.tags.is_empty() && self.moves.is_empty() && self.movetext_result.is_none() && self.syntax_error.is_none()
    }
}

#[derive(Default)]
struct Lexer {
    comment: bool,
    variation_depth: usize,
    movetext_bytes: usize,
}

impl Lexer {
    fn feed(&mut self, game: &mut RawGame, line: &str) {
        self.movetext_bytes += line.len();
        if self.movetext_bytes > MAX_MOVETEXT_BYTES {
            game.fail("movetext too long");
            return;
        }
        let mut rest = line;
        while !rest.is_empty() {
            if self.comment {
                match rest.find('}') {
                    Some(i) => {
                        self.comment = false;
                        rest = &rest[i + 1..];
                        continue;
                    }
                    None => return,
                }
            }
            rest = rest.trim_start();
            let Some(c) = rest.chars().next() else { return };
            match c {
                '{' => {
                    self.comment = true;
                    rest = &rest[1..];
                }
                ';' => return,
                '}' => {
                    game.fail("unbalanced '}'");
                    rest = &rest[1..];
                }
                '(' => {
                    self.variation_depth += 1;
                    if self.variation_depth > MAX_VARIATION_DEPTH {
                        game.fail("variations nested too deeply");
                    }
                    rest = &rest[1..];
                }
                ')' => {
                    if self.variation_depth == 0 {
                        game.fail("unbalanced ')'");
                    } else {
                        self.variation_depth -= 1;
                    }
                    rest = &rest[1..];
                }
                _ => {
                    let end = rest
                        .find(|ch: char| ch.is_whitespace() || "{};()".contains(ch))
                        .unwrap_or(rest.len());
                    let (token, tail) = rest.split_at(end);
                    rest = tail;
                    if self.variation_depth == 0 {
                        self.token(game, token);
                    }
                }
            }
        }
    }

    fn token(&mut self, game: &mut RawGame, token: &str) {
        if token.starts_with('$') {
            return;
        }
        if matches!(token, "1-0" | "0-1" | "1/2-1/2" | "*") {
            if game.movetext_result.is_some() {
                game.fail("second result token");
            }
            game.movetext_result = Some(token.to_string());
            return;
        }
        // Move numbers, possibly glued to the move ("12.e4", "12...Nf6").
        let token = token.trim_start_matches(|c: char| c.is_ascii_digit());
        let token = token.trim_start_matches('.');
        let token = token.trim_end_matches(['!', '?']);
        if token.is_empty() {
            return;
        }
        if game.movetext_result.is_some() {
            game.fail("move after result");
            return;
        }
        game.moves.push(token.to_string());
    }
}

fn parse_tag(line: &str) -> Option<(String, String)> {
    let inner = line.trim().strip_prefix('[')?.strip_suffix(']')?;
    let inner = inner.trim_start();
    let name_end = inner.find(|c: char| c.is_whitespace() || c == '"')?;
    let (name, rest) = inner.split_at(name_end);
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let body = rest.trim().strip_prefix('"')?.strip_suffix('"')?;
    let mut value = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => value.push(chars.next()?),
            '"' => return None,
            _ => value.push(c),
        }
    }
    Some((name.to_string(), value))
}

/// Splits a PGN byte stream into [`RawGame`]s. Invalid UTF-8 is replaced, not fatal.
pub struct RawGameReader<R> {
    input: R,
    line: Vec<u8>,
    pending: Option<RawGame>,
    done: bool,
}

impl<R: BufRead> RawGameReader<R> {
    pub fn new(input: R) -> RawGameReader<R> {
        RawGameReader {
            input,
            line: Vec::new(),
            pending: None,
            done: false,
        }
    }

    /// Reads one line into `self.line`. `None` at end of input, `Some(true)` if the line was cut.
    fn read_line(&mut self) -> io::Result<Option<bool>> {
        self.line.clear();
        let n = (&mut self.input)
            .take(MAX_LINE_BYTES as u64)
            .read_until(b'\n', &mut self.line)?;
        if n == 0 {
            return Ok(None);
        }
        let mut overlong = false;
        if n == MAX_LINE_BYTES && self.line.last() != Some(&b'\n') {
            overlong = true;
            let mut sink = Vec::new();
            loop {
                sink.clear();
                let m = (&mut self.input)
                    .take(MAX_LINE_BYTES as u64)
                    .read_until(b'\n', &mut sink)?;
                if m == 0 || sink.last() == Some(&b'\n') {
                    break;
                }
            }
        }
        Ok(Some(overlong))
    }

    pub fn next_game(&mut self) -> io::Result<Option<RawGame>> {
        if self.done {
            return Ok(None);
        }
        let mut game = self.pending.take().unwrap_or_default();
        let mut lexer = Lexer::default();
        let mut in_movetext = !game.moves.is_empty();
        loop {
            let Some(overlong) = self.read_line()? else {
                self.done = true;
                return Ok((!game.is_empty()).then_some(game));
            };
            let text = String::from_utf8_lossy(&self.line);
            let text = text.trim_end_matches(['\n', '\r']);
            if overlong {
                game.fail("line too long");
                in_movetext = true;
                continue;
            }
            if text.starts_with('%') {
                continue;
            }
            let trimmed = text.trim_start();
            if trimmed.starts_with('[') && !lexer.comment {
                if in_movetext {
                    let mut next = RawGame::default();
                    match parse_tag(trimmed) {
                        Some(tag) => next.tags.push(tag),
                        None => next.fail("malformed tag line"),
                    }
                    self.pending = Some(next);
                    return Ok(Some(game));
                }
                if game.tags.len() >= MAX_TAGS {
                    game.fail("too many tags");
                } else {
                    match parse_tag(trimmed) {
                        Some(tag) => game.tags.push(tag),
                        None => game.fail("malformed tag line"),
                    }
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            in_movetext = true;
            lexer.feed(&mut game, text);
        }
    }
}

impl<R: BufRead> Iterator for RawGameReader<R> {
    type Item = io::Result<RawGame>;

    fn next(&mut self) -> Option<io::Result<RawGame>> {
        self.next_game().transpose()
    }
}

/// Tallies for a pass over an archive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StreamStats {
    pub games_seen: u64,
    pub records: u64,
    pub skipped: u64,
    /// Skips by error kind.
    pub skip_reasons: BTreeMap<String, u64>,
}

/// Iterator over validated games. Errors are I/O failures only.
pub struct GameStream<R> {
    raw: RawGameReader<R>,
    variant: Variant,
    stats: StreamStats,
    last_error: Option<ParseError>,
}

impl<R> GameStream<R> {
    pub fn stats(&self) -> &StreamStats {
        &self.stats
    }

    /// The most recent per-game error, for diagnostics.
    pub fn last_error(&self) -> Option<&ParseError> {
        self.last_error.as_ref()
    }
}

impl<R: BufRead> Iterator for GameStream<R> {
    type Item = io::Result<GameRecord>;

    fn next(&mut self) -> Option<io::Result<GameRecord>> {
        loop {
            let raw = match self.raw.next_game() {
                Ok(Some(raw)) => raw,
                Ok(None) => return None,
                Err(e) => return Some(Err(e)),
            };
            self.stats.games_seen += 1;
            match GameRecord::from_raw(&raw, self.variant) {
                Ok(record) => {
                    self.stats.records += 1;
                    return Some(Ok(record));
                }
                Err(e) => {
                    log::debug!("skipping game {}: {e}", self.stats.games_seen);
                    self.stats.skipped += 1;
                    *self.stats.skip_reasons.entry(e.kind().to_string()).or_default() += 1;
                    self.last_error = Some(e);
                }
            }
        }
    }
}

/// Streams validated games of `variant` from concatenated PGN.
pub fn stream_games<R: BufRead>(source: R, variant: Variant) -> GameStream<R> {
    GameStream {
        raw: RawGameReader::new(source),
        variant,
        stats: StreamStats::default(),
        last_error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_escapes() {
        assert_eq!(
            parse_tag(r#"[Event "a \"b\" \\ c"]"#),
            Some(("Event".into(), r#"a "b" \ c"#.into()))
        );
        assert_eq!(parse_tag(r#"[Event "open]"#), None);
        assert_eq!(parse_tag("[ \"x\"]"), None);
    }

    #[test]
    fn movetext_lexing() {
        let pgn = "[A \"1\"]\n\n1. e4 {a comment\nover lines} e5 (1... c5 2. Nf3 (2. c3)) 2.Nf3 $1 Nc6?! ; rest\n3... a6 1-0\n";
        let games: Vec<_> = RawGameReader::new(pgn.as_bytes()).collect::<io::Result<_>>().unwrap();
        assert_eq!(games.len(), 1);
        assert_eq!(games[0].moves, ["e4", "e5", "Nf3", "Nc6", "a6"]);
        assert_eq!(games[0].movetext_result.as_deref(), Some("1-0"));
        assert!(games[0].syntax_error.is_none());
    }

    #[test]
    fn stray_closing_brace_is_an_error_not_a_hang() {
        let pgn = "[Event \"x\"]\n}[Black \"b\"]\n\n1. e4 } e5 1-0\n";
        let games: Vec<_> = RawGameReader::new(pgn.as_bytes()).collect::<io::Result<_>>().unwrap();
        assert_eq!(games.len(), 1);
        assert_eq!(games[0].syntax_error.as_deref(), Some("unbalanced '}'"));
        assert!(games[0].moves.ends_with(&["e4".to_string(), "e5".to_string()]));
    }

    #[test]
    fn splits_games_without_blank_lines() {
        let pgn = "[A \"1\"]\n1. e4 *\n[A \"2\"]\n[B \"3\"]\n1. d4 *";
        let games: Vec<_> = RawGameReader::new(pgn.as_bytes()).collect::<io::Result<_>>().unwrap();
        assert_eq!(games.len(), 2);
        assert_eq!(games[1].tag("B"), Some("3"));
        assert_eq!(games[1].moves, ["d4"]);
    }

    #[test]
    fn invalid_utf8_is_not_fatal() {
        let mut pgn = b"[White \"".to_vec();
        pgn.extend_from_slice(&[0xff, 0xfe]);
        pgn.extend_from_slice(b"\"]\n\n1. e4 *\n");
        let games: Vec<_> = RawGameReader::new(&pgn[..]).collect::<io::Result<_>>().unwrap();
        assert_eq!(games.len(), 1);
        assert_eq!(games[0].moves, ["e4"]);
    }
}
