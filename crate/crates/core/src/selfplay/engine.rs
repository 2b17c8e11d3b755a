use std::io::{self, BufRead, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use piecevalue_rules::{parse_uci, to_uci, Position, Variant};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("engine did not answer within {0:?}")]
    Timeout(Duration),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("engine i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub move_time: Duration,
    pub depth: u32,
}

/// A move-choosing player. Moves are exchanged in UCI notation.
pub trait Engine {
    fn new_game(&mut self, variant: Variant) -> Result<(), EngineError>;
    /// Chooses a move for the side to move after `moves` from `start_fen`.
    fn best_move(&mut self, start_fen: &str, moves: &[String], limits: &SearchLimits) -> Result<String, EngineError>;
}

/// How the built-in engine picks among legal moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockPolicy {
    FirstLegal,
    /// Uniformly random, reseeded from the position history every move.
    Random { seed: u64 },
}

/// In-process engine for tests and dry runs.
#[derive(Debug, Clone)]
pub struct MockEngine {
    pub policy: MockPolicy,
    variant: Variant,
}

impl MockEngine {
    pub fn new(policy: MockPolicy) -> MockEngine {
        MockEngine {
            policy,
            variant: Variant::Standard,
        }
    }

    /// Picks a move in `pos`, or `None` if there is no legal move.
    pub fn choose(&self, pos: &Position, history_len: usize) -> Option<String> {
        let legal = pos.legal_moves();
        let mv = match self.policy {
            MockPolicy::FirstLegal => legal.first()?,
            MockPolicy::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(history_len as u64);
                legal.choose(&mut rng)?
            }
        };
        Some(to_uci(pos, mv))
    }
}

fn replay_uci(start_fen: &str, moves: &[String], variant: Variant) -> Result<Position, String> {
    let mut pos = Position::from_fen(start_fen, variant).map_err(|e| e.to_string())?;
    for m in moves {
        let mv = parse_uci(&pos, m).map_err(|e| e.to_string())?;
        pos = pos.play_strict(&mv).map_err(|e| e.to_string())?;
    }
    Ok(pos)
}

impl Engine for MockEngine {
    fn new_game(&mut self, variant: Variant) -> Result<(), EngineError> {
        self.variant = variant;
        Ok(())
    }

    fn best_move(&mut self, start_fen: &str, moves: &[String], _limits: &SearchLimits) -> Result<String, EngineError> {
        let pos = replay_uci(start_fen, moves, self.variant).map_err(EngineError::Protocol)?;
        self.choose(&pos, moves.len())
            .ok_or_else(|| EngineError::Protocol("no legal move in position".into()))
    }
}

/// Client for an engine speaking the UCI protocol.
///
/// Engine output is read on a helper thread so every wait can time out.
pub struct UciEngine<W: Write> {
    lines: Receiver<io::Result<String>>,
    input: W,
    /// Extra allowance on top of the move time before a search is abandoned.
    pub grace: Duration,
    strength: Option<u32>,
    child: Option<Child>,
}

impl<W: Write> UciEngine<W> {
    /// Wraps an engine's output and input streams and performs the handshake.
    pub fn new<R: BufRead + Send + 'static>(output: R, input: W, strength: Option<u32>) -> Result<UciEngine<W>, EngineError> {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in output.lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut engine = UciEngine {
            lines: rx,
            input,
            grace: Duration::from_secs(10),
            strength,
            child: None,
        };
        engine.handshake()?;
        Ok(engine)
    }

    fn send(&mut self, line: &str) -> Result<(), EngineError> {
        log::trace!("> {line}");
        writeln!(self.input, "{line}")?;
        self.input.flush()?;
        Ok(())
    }

    fn recv(&mut self, timeout: Duration) -> Result<String, EngineError> {
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => {
                log::trace!("< {line}");
                Ok(line)
            }
            Ok(Err(e)) => Err(EngineError::Io(e)),
            Err(RecvTimeoutError::Timeout) => Err(EngineError::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(EngineError::Protocol("engine closed its output".into())),
        }
    }

    fn wait_for(&mut self, token: &str, timeout: Duration) -> Result<String, EngineError> {
        loop {
            let line = self.recv(timeout)?;
            if line.split_whitespace().next() == Some(token) {
                return Ok(line);
            }
        }
    }

    fn handshake(&mut self) -> Result<(), EngineError> {
        let t = self.grace;
        self.send("uci")?;
        self.wait_for("uciok", t)?;
        if let Some(elo) = self.strength {
            self.send("setoption name UCI_LimitStrength value true")?;
            self.send(&format!("setoption name UCI_Elo value {elo}"))?;
        }
        self.send("isready")?;
        self.wait_for("readyok", t)?;
        Ok(())
    }
}

impl UciEngine<ChildStdin> {
    /// Starts an engine executable.
    pub fn spawn(program: &str, args: &[String], strength: Option<u32>) -> Result<UciEngine<ChildStdin>, EngineError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = io::BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut engine = UciEngine::new(stdout, stdin, strength)?;
        engine.child = Some(child);
        Ok(engine)
    }
}

impl<W: Write> Drop for UciEngine<W> {
    fn drop(&mut self) {
        let _ = self.send("quit");
        if let Some(mut child) = self.child.take() {
            thread::sleep(Duration::from_millis(20));
            if !matches!(child.try_wait(), Ok(Some(_))) {
                let _ = child.kill();
            }
            let _ = child.wait();
        }
    }
}

impl<W: Write> Engine for UciEngine<W> {
    fn new_game(&mut self, variant: Variant) -> Result<(), EngineError> {
        let t = self.grace;
        if variant == Variant::Chess960 {
            self.send("setoption name UCI_Chess960 value true")?;
        }
        self.send("ucinewgame")?;
        self.send("isready")?;
        self.wait_for("readyok", t)?;
        Ok(())
    }

    fn best_move(&mut self, start_fen: &str, moves: &[String], limits: &SearchLimits) -> Result<String, EngineError> {
        let mut cmd = format!("position fen {start_fen}");
        if !moves.is_empty() {
            cmd.push_str(" moves ");
            cmd.push_str(&moves.join(" "));
        }
        self.send(&cmd)?;
        self.send(&format!(
            "go movetime {} depth {}",
            limits.move_time.as_millis(),
            limits.depth
        ))?;
        let line = self.wait_for("bestmove", limits.move_time + self.grace)?;
        line.split_whitespace()
            .nth(1)
            .map(str::to_string)
            .ok_or_else(|| EngineError::Protocol(format!("bestmove without a move: {line:?}")))
    }
}

/// Answers UCI commands on `input` with the mock engine until `quit` or end of input.
pub fn serve_uci<R: BufRead, W: Write>(input: R, mut output: W, policy: MockPolicy) -> io::Result<()> {
    let engine = MockEngine::new(policy);
    let mut variant = Variant::Standard;
    let mut position: Option<(Position, usize)> = None;
    for line in input.lines() {
        let line = line?;
        let mut words = line.split_whitespace();
        match words.next() {
            Some("uci") => {
                writeln!(output, "id name piecevalue-mock")?;
                writeln!(output, "option name UCI_Elo type spin default 1600 min 1600 max 2800")?;
                writeln!(output, "option name UCI_LimitStrength type check default false")?;
                writeln!(output, "option name UCI_Chess960 type check default false")?;
                writeln!(output, "uciok")?;
            }
            Some("isready") => writeln!(output, "readyok")?,
            Some("setoption") => {
                if line.contains("UCI_Chess960") {
                    variant = if line.trim_end().ends_with("true") {
                        Variant::Chess960
                    } else {
                        Variant::Standard
                    };
                }
            }
            Some("ucinewgame") => position = None,
            Some("position") => {
                let rest: Vec<&str> = words.collect();
                let split = rest.iter().position(|w| *w == "moves").unwrap_or(rest.len());
                let fen = match rest.first() {
                    Some(&"startpos") => piecevalue_rules::STANDARD_START_FEN.to_string(),
                    Some(&"fen") => rest[1..split].join(" "),
                    _ => {
                        position = None;
                        continue;
                    }
                };
                let moves: Vec<String> = rest.get(split + 1..).unwrap_or(&[]).iter().map(|s| s.to_string()).collect();
                position = replay_uci(&fen, &moves, variant).ok().map(|p| (p, moves.len()));
            }
            Some("go") => {
                let best = position
                    .as_ref()
                    .and_then(|(p, n)| engine.choose(p, *n))
                    .unwrap_or_else(|| "0000".into());
                writeln!(output, "bestmove {best}")?;
            }
            Some("quit") => break,
            _ => {}
        }
        output.flush()?;
    }
    Ok(())
}
