//! Command-line front end: position and game notation, query commands and
//! report export.

use std::fmt::Write as _;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::game::{GameRef, GameStore};
use crate::nim::NimPosition;
use crate::oracle::{Bounds, ClassReport, ContextKind, Oracle, VerifyReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            src: text.as_bytes(),
            at: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.src.len() && self.src[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.at).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{}'", c as char)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn natural(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.at;
        while self.at < self.src.len() && self.src[self.at].is_ascii_digit() {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.unexpected("a heap size"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.at]).expect("ascii digits");
        digits
            .parse()
            .map_err(|_| ParseError::new(start, format!("heap size {digits} is too large")))
    }

    fn unexpected(&mut self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(c) if c.is_ascii() => {
                ParseError::new(self.at, format!("expected {wanted}, found '{}'", c as char))
            }
            Some(_) => ParseError::new(self.at, format!("expected {wanted}, found non-ASCII input")),
            None => ParseError::new(self.at, format!("expected {wanted}, found end of input")),
        }
    }
}

/// Parses `a+b+...` into a normalized position. Empty input is `(·)`.
pub fn parse_position(text: &str) -> Result<NimPosition, ParseError> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Ok(NimPosition::zero());
    }
    let mut heaps = vec![cur.natural()?];
    while cur.eat(b'+') {
        heaps.push(cur.natural()?);
    }
    if !cur.at_end() {
        return Err(cur.unexpected("'+' or end of input"));
    }
    Ok(NimPosition::new(heaps))
}

/// Canonical text of a position: `1+1+4`, or `0` for `(·)`.
pub fn format_position(p: &NimPosition) -> String {
    p.to_string()
}

/// Parses a game expression into `store`.
///
/// ```text
/// game  := atom ('+' atom)*
/// atom  := '*' natural? | natural | '{' list '|' list '}' | '(' game ')'
/// list  := empty | game (',' game)*
/// ```
///
/// Numerals are Nim heaps, so `3` and `*3` are the same game.
pub fn parse_game(text: &str, store: &mut GameStore) -> Result<GameRef, ParseError> {
    let mut cur = Cursor::new(text);
    let g = game(&mut cur, store)?;
    if !cur.at_end() {
        return Err(cur.unexpected("'+' or end of input"));
    }
    Ok(g)
}

fn game(cur: &mut Cursor<'_>, store: &mut GameStore) -> Result<GameRef, ParseError> {
    let mut g = atom(cur, store)?;
    while cur.eat(b'+') {
        let h = atom(cur, store)?;
        g = store.sum(g, h);
    }
    Ok(g)
}

fn atom(cur: &mut Cursor<'_>, store: &mut GameStore) -> Result<GameRef, ParseError> {
    match cur.peek() {
        Some(b'*') => {
            cur.at += 1;
            let n = match cur.peek() {
                Some(c) if c.is_ascii_digit() => cur.natural()?,
                _ => 1,
            };
            Ok(store.nim_heap(n))
        }
        Some(c) if c.is_ascii_digit() => {
            let n = cur.natural()?;
            Ok(store.nim_heap(n))
        }
        Some(b'{') => {
            cur.at += 1;
            let left = list(cur, store, b'|')?;
            cur.expect(b'|')?;
            let right = list(cur, store, b'}')?;
            cur.expect(b'}')?;
            Ok(store.make_game(left, right))
        }
        Some(b'(') => {
            cur.at += 1;
            let g = game(cur, store)?;
            cur.expect(b')')?;
            Ok(g)
        }
        _ => Err(cur.unexpected("a game")),
    }
}

fn list(cur: &mut Cursor<'_>, store: &mut GameStore, close: u8) -> Result<Vec<GameRef>, ParseError> {
    let mut out = Vec::new();
    if cur.peek() == Some(close) {
        return Ok(out);
    }
    out.push(game(cur, store)?);
    while cur.eat(b',') {
        out.push(game(cur, store)?);
    }
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "misere", version, about = "Misère-play equivalence of Nim positions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Context {
    Impartial,
    Partizan,
}

impl From<Context> for ContextKind {
    fn from(c: Context) -> Self {
        match c {
            Context::Impartial => ContextKind::Impartial,
            Context::Partizan => ContextKind::Partizan,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Adding1,
    PartizanSingletons,
    ReducedFibers,
    Lemmas,
    Specialization,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Misère outcome of a Nim position by the closed-form rule.
    Outcome {
        position: String,
        /// Also search the game tree and fail on disagreement.
        #[arg(long)]
        check: bool,
    },
    /// Reduced form of a Nim position.
    Reduce { position: String },
    /// Decide equivalence of two Nim positions.
    Equiv {
        first: String,
        second: String,
        #[arg(long, value_enum)]
        context: Context,
        /// On inequivalence, search for a distinguishing context.
        #[arg(long)]
        witness: bool,
        /// Birthday bound of the generic contexts searched by --witness.
        #[arg(long, default_value_t = 3)]
        birthday: u32,
    },
    /// Decide whether the first game is >= the second under misère play.
    Ge { first: String, second: String },
    /// Winning moves from a Nim position.
    BestMove { position: String },
    /// Partition all positions within bounds into equivalence classes.
    Classify {
        #[arg(long)]
        max_heaps: usize,
        #[arg(long)]
        max_size: u32,
        #[arg(long, value_enum)]
        context: Context,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a verification suite; exits 1 on any violation.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// `N` for adding1, `HEAPS,SIZE` for the others.
        #[arg(long)]
        bounds: Option<String>,
    },
}

/// Exit status and captured streams of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(stderr: String) -> Self {
        CommandOutput {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs one command line. `args` includes the program name.
pub fn run_command<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutput::ok(text),
                _ => CommandOutput::usage(text),
            };
        }
    };
    match execute(cli.command) {
        Ok(out) => CommandOutput::ok(out),
        Err(Failure::Usage(msg)) => CommandOutput::usage(format!("error: {msg}\n")),
        Err(Failure::Verification(out)) => CommandOutput {
            code: 1,
            stdout: out,
            stderr: "verification failed\n".into(),
        },
    }
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Outcome { position, check } => {
            let p = parse_position(&position)?;
            let closed = p.closed_outcome();
            if check {
                let mut store = GameStore::new();
                let g = p.to_game(&mut store);
                let tree = store.misere_outcome(g);
                if tree != closed {
                    return Err(Failure::Verification(format!(
                        "{closed}\ntree search gives {tree}\n"
                    )));
                }
            }
            Ok(format!("{closed}\n"))
        }
        Command::Reduce { position } => {
            let p = parse_position(&position)?;
            Ok(format!("{}\n", p.reduced_form()))
        }
        Command::Equiv {
            first,
            second,
            context,
            witness,
            birthday,
        } => {
            let p = parse_position(&first)?;
            let q = parse_position(&second)?;
            let kind = ContextKind::from(context);
            let mut oracle = Oracle::default();
            if witness && birthday > oracle.config().impartial_birthday_limit {
                return Err(Failure::Usage(format!(
                    "--birthday {birthday} exceeds the limit {}",
                    oracle.config().impartial_birthday_limit
                )));
            }
            let equivalent = oracle.equivalent(&p, &q, kind);
            let mut out = String::from(if equivalent {
                "equivalent\n"
            } else {
                "inequivalent\n"
            });
            if witness && !equivalent {
                let bounds = Bounds {
                    max_heaps: p.len().max(q.len()),
                    max_size: p.heaps().iter().chain(q.heaps()).copied().max().unwrap_or(0),
                };
                let contexts = oracle
                    .context_universe(kind, birthday, bounds)
                    .map_err(|e| Failure::Usage(e.to_string()))?;
                let (g, h) = (oracle.game(&p), oracle.game(&q));
                let found = oracle
                    .refute_equiv(g, h, &contexts)
                    .map_err(|e| Failure::Usage(e.to_string()))?;
                match found {
                    Some(x) => writeln!(out, "witness: {}", oracle.describe(x)).unwrap(),
                    None => out.push_str("witness: none found\n"),
                }
            }
            Ok(out)
        }
        Command::Ge { first, second } => {
            let mut oracle = Oracle::default();
            let g = parse_game(&first, &mut oracle.store)?;
            let h = parse_game(&second, &mut oracle.store)?;
            let ge = oracle.cache.partizan_ge(&oracle.store, g, h);
            Ok(format!("{ge}\n"))
        }
        Command::BestMove { position } => {
            let p = parse_position(&position)?;
            let moves = p.best_moves();
            if moves.is_empty() {
                if p.is_zero() {
                    Ok("none (no moves)\n".into())
                } else {
                    Ok("none (P-position)\n".into())
                }
            } else {
                Ok(moves.iter().map(|m| format!("{m}\n")).collect())
            }
        }
        Command::Classify {
            max_heaps,
            max_size,
            context,
            format,
        } => {
            let mut oracle = Oracle::default();
            let report = oracle
                .classify(max_heaps, max_size, context.into())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(match format {
                Format::Json => report_json(&report),
                Format::Csv => report_csv(&report),
            })
        }
        Command::Verify { suite, bounds } => {
            let mut oracle = Oracle::default();
            let report = run_suite(&mut oracle, suite, bounds.as_deref())?;
            let mut out = String::new();
            for v in &report.violations {
                writeln!(out, "violation: {v}").unwrap();
            }
            let verdict = if report.holds() { "holds" } else { "FAILS" };
            writeln!(
                out,
                "{}: {verdict} ({} checks, {} violations)",
                report.suite,
                report.checked,
                report.violations.len()
            )
            .unwrap();
            if report.holds() {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
    }
}

fn run_suite(
    oracle: &mut Oracle,
    suite: Suite,
    bounds: Option<&str>,
) -> Result<VerifyReport, Failure> {
    let budget = |e: crate::oracle::OracleError| Failure::Usage(e.to_string());
    if suite == Suite::Adding1 {
        let max_n = match bounds {
            None => 15,
            Some(b) => b
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("invalid bound '{b}', expected N")))?,
        };
        return oracle.verify_adding_one(max_n).map_err(budget);
    }
    let (default_heaps, default_size) = match suite {
        Suite::ReducedFibers => (3, 5),
        Suite::Lemmas => (4, 6),
        _ => (3, 4),
    };
    let (heaps, size) = match bounds {
        None => (default_heaps, default_size),
        Some(b) => parse_pair(b)?,
    };
    match suite {
        Suite::ReducedFibers => oracle.verify_reduced_fibers(heaps, size),
        Suite::PartizanSingletons => oracle.verify_partizan_singletons(heaps, size),
        Suite::Lemmas => oracle.verify_order_lemmas(heaps, size),
        Suite::Specialization => oracle.verify_specialization(heaps, size),
        Suite::Adding1 => unreachable!(),
    }
    .map_err(budget)
}

fn parse_pair(b: &str) -> Result<(usize, u32), Failure> {
    let bad = || Failure::Usage(format!("invalid bounds '{b}', expected HEAPS,SIZE"));
    let (heaps, size) = b.split_once(',').ok_or_else(bad)?;
    Ok((
        heaps.trim().parse().map_err(|_| bad())?,
        size.trim().parse().map_err(|_| bad())?,
    ))
}

/// Pretty JSON with a trailing newline.
pub fn report_json(report: &ClassReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// One row per member: `class,representative,member`.
pub fn report_csv(report: &ClassReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "representative", "member"])
        .expect("in-memory write");
    for (i, class) in report.classes.iter().enumerate() {
        let rep = class.representative.to_string();
        for m in &class.members {
            w.write_record([i.to_string(), rep.clone(), m.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}


#[cfg(test)]
mod tests {
    use super::*;

    fn pos(h: &[u32]) -> NimPosition {
        NimPosition::new(h.iter().copied())
    }

    #[test]
    fn positions() {
        assert_eq!(parse_position("4+1+0+1"), Ok(pos(&[1, 1, 4])));
        assert_eq!(parse_position("0+0+0"), Ok(NimPosition::zero()));
        assert_eq!(parse_position("3 + 5"), Ok(pos(&[3, 5])));
        assert_eq!(parse_position(""), Ok(NimPosition::zero()));
        assert_eq!(parse_position("  0 "), Ok(NimPosition::zero()));
    }

    #[test]
    fn position_errors() {
        assert_eq!(parse_position("1+-2").unwrap_err().offset, 2);
        assert_eq!(parse_position("1+").unwrap_err().offset, 2);
        assert_eq!(parse_position("a").unwrap_err().offset, 0);
        assert_eq!(parse_position("3 4").unwrap_err().offset, 2);
        assert!(parse_position("99999999999").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_position(&pos(&[1, 1, 4])), "1+1+4");
        assert_eq!(format_position(&NimPosition::zero()), "0");
    }

    #[test]
    fn games() {
        let mut s = GameStore::new();
        let three = s.nim_heap(3);
        assert_eq!(parse_game("*3", &mut s), Ok(three));
        assert_eq!(parse_game("3", &mut s), Ok(three));
        let one = s.nim_heap(1);
        assert_eq!(parse_game("*", &mut s), Ok(one));
        let z = s.zero();
        let g = s.make_game([z], []);
        assert_eq!(parse_game("{0|}", &mut s), Ok(g));
        assert_eq!(parse_game("{ 0 , 0 | }", &mut s), Ok(g));
        let tw = pos(&[1, 2]).to_game(&mut s);
        assert_eq!(parse_game("2+1", &mut s), Ok(tw));
        let h = s.sum(g, tw);
        assert_eq!(parse_game("{0|}+(1+2)", &mut s), Ok(h));
        assert!(parse_game("{0", &mut s).is_err());
        assert!(parse_game("", &mut s).is_err());
    }

    #[test]
    fn display_round_trips_through_parser() {
        let mut s = GameStore::new();
        for text in ["{0,*1|0}", "{|{0|}}", "*4", "{*2|*2,{|}}"] {
            let g = parse_game(text, &mut s).unwrap();
            let shown = s.display(g);
            assert_eq!(parse_game(&shown, &mut s), Ok(g));
        }
    }
}
