//! Proof scripts, in a plain line format and in a Rocq-like dialect.
//!
//! Plain format, one step per line, `#` starts a comment:
//!
//! ```text
//! unfold mn
//! trans-l M·x·N·M·N ;; m·[n·M ; x]·N ;; m·n
//! rewrite nx
//! rewrite <- nA
//! close
//! ```

use std::fmt::Write;

use thiserror::Error;

use super::{Direction, Located, Side, Step};
use crate::syntax::{parse_term, EqKind, Goal, MorTerm, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError { line, message: message.into() }
}

fn term(goal: &Goal, text: &str, line: usize) -> Result<MorTerm, ScriptError> {
    parse_term(text, &goal.resolver()).map_err(|e: ParseError| err(line + e.line.saturating_sub(1), e.to_string()))
}

fn ident(s: &str, line: usize) -> Result<String, ScriptError> {
    let s = s.trim();
    if s.is_empty() || !s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        return Err(err(line, format!("expected a name, found {s:?}")));
    }
    Ok(s.to_string())
}

fn rewrite_args(rest: &str, line: usize) -> Result<Step, ScriptError> {
    let rest = rest.trim();
    let (dir, name) = if let Some(n) = rest.strip_prefix("<-") {
        (Direction::Backward, n)
    } else if let Some(n) = rest.strip_prefix("->") {
        (Direction::Forward, n)
    } else if let Some(n) = rest.strip_prefix('-') {
        (Direction::Backward, n)
    } else {
        (Direction::Forward, rest)
    };
    Ok(Step::Rewrite { hyp: ident(name, line)?, dir })
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

pub fn parse_neutral(text: &str, goal: &Goal) -> Result<Vec<Located>, ScriptError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (cmd, rest) = split_word(body);
        let step = match cmd {
            "unfold" => Step::Unfold { name: ident(rest, line)? },
            "trans" | "trans-l" => Step::Trans { side: Side::Lhs, term: term(goal, rest, line)? },
            "trans-r" => Step::Trans { side: Side::Rhs, term: term(goal, rest, line)? },
            "rewrite" => rewrite_args(rest, line)?,
            "close" if rest.trim().is_empty() => Step::Close,
            _ => return Err(err(line, format!("unknown command {cmd:?}"))),
        };
        out.push(Located { line, step });
    }
    Ok(out)
}

pub fn to_neutral(steps: &[Step]) -> String {
    let mut s = String::new();
    for step in steps {
        let _ = match step {
            Step::Unfold { name } => writeln!(s, "unfold {name}"),
            Step::Trans { side: Side::Lhs, term } => writeln!(s, "trans-l {term}"),
            Step::Trans { side: Side::Rhs, term } => writeln!(s, "trans-r {term}"),
            Step::Rewrite { hyp, dir: Direction::Forward } => writeln!(s, "rewrite {hyp}"),
            Step::Rewrite { hyp, dir: Direction::Backward } => writeln!(s, "rewrite <- {hyp}"),
            Step::Close => writeln!(s, "close"),
        };
    }
    s
}

/// Splits on `.` at parenthesis depth 0 followed by whitespace or the end.
fn sentences(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut line = 1;
    let mut depth = 0i32;
    let mut chars = text.chars().peekable();
    let mut in_comment = 0;
    while let Some(c) = chars.next() {
        if c == '\n' {
            line += 1;
        }
        if c == '(' && chars.peek() == Some(&'*') {
            chars.next();
            in_comment += 1;
            continue;
        }
        if in_comment > 0 {
            if c == '*' && chars.peek() == Some(&')') {
                chars.next();
                in_comment -= 1;
            }
            continue;
        }
        if cur.trim().is_empty() && !c.is_whitespace() {
            start = line;
        }
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '.' if depth == 0 && chars.peek().is_none_or(|n| n.is_whitespace()) => {
                out.push((start, std::mem::take(&mut cur).trim().to_string()));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push((start, cur.trim().to_string()));
    }
    out
}

fn strip_parens(s: &str) -> Option<&str> {
    let s = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    // the outer parentheses must enclose the whole term
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return None,
            ')' => depth -= 1,
            _ => {}
        }
    }
    Some(s)
}

fn split_equation(s: &str) -> Option<(&str, &str)> {
    for op in ["≡'", "=='", "≡", "=="] {
        if let Some(i) = s.find(op) {
            return Some((&s[..i], &s[i + op.len()..]));
        }
    }
    None
}

pub fn parse_rocq(text: &str, goal: &Goal) -> Result<Vec<Located>, ScriptError> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, MorTerm)> = None;
    let mut finished = false;
    for (line, s) in sentences(text) {
        if finished {
            return Err(err(line, "text after Qed"));
        }
        let (cmd, rest) = split_word(&s);
        if let Some((tl, t)) = pending.take() {
            let side = match s.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["mcat"] => Side::Lhs,
                ["2:", "mcat"] => Side::Rhs,
                _ => return Err(err(line, "transitivity must be followed by `mcat.` or `2: mcat.`")),
            };
            out.push(Located { line: tl, step: Step::Trans { side, term: t } });
            continue;
        }
        match cmd {
            "Lemma" | "Theorem" => {
                let (_, stmt) = rest.split_once(':').ok_or_else(|| err(line, "expected `Lemma name: statement`"))?;
                let (l, r) = split_equation(stmt).ok_or_else(|| err(line, "expected an equation"))?;
                let (l, r) = (term(goal, l, line)?, term(goal, r, line)?);
                if l != goal.conclusion.lhs || r != goal.conclusion.rhs {
                    return Err(err(line, "the statement differs from the goal"));
                }
            }
            "Proof" => {}
            "Qed" | "Defined" => finished = true,
            "unfold" => out.push(Located { line, step: Step::Unfold { name: ident(rest, line)? } }),
            "rewrite" => out.push(Located { line, step: rewrite_args(rest, line)? }),
            "transitivity" => {
                let inner = strip_parens(rest).ok_or_else(|| err(line, "expected `transitivity (term)`"))?;
                pending = Some((line, term(goal, inner, line)?));
            }
            "mcat" if rest.trim().is_empty() => out.push(Located { line, step: Step::Close }),
            _ => return Err(err(line, format!("unknown tactic {cmd:?}"))),
        }
    }
    if pending.is_some() {
        return Err(err(0, "script ends after transitivity"));
    }
    Ok(out)
}

pub fn to_rocq(goal: &Goal, steps: &[Step]) -> String {
    let c = &goal.conclusion;
    let op = match c.kind {
        EqKind::Strict => "≡",
        EqKind::UpToCast => "≡'",
    };
    let mut s = String::new();
    let _ = writeln!(s, "Lemma {}: {} {op} {}.", c.name.as_deref().unwrap_or("goal"), c.lhs, c.rhs);
    s.push_str("Proof.\n");
    for (i, step) in steps.iter().enumerate() {
        // a blank line before each group of steps
        let after_unfold = i > 0 && matches!(steps[i - 1], Step::Unfold { .. });
        let opens = match step {
            Step::Trans { .. } | Step::Close => true,
            Step::Unfold { .. } => false,
            Step::Rewrite { .. } => after_unfold,
        };
        if i > 0 && opens {
            s.push('\n');
        }
        let _ = match step {
            Step::Unfold { name } => writeln!(s, "  unfold {name}."),
            Step::Trans { side: Side::Lhs, term } => writeln!(s, "  transitivity ({term}). mcat."),
            Step::Trans { side: Side::Rhs, term } => writeln!(s, "  transitivity ({term}). 2: mcat."),
            Step::Rewrite { hyp, dir: Direction::Forward } => writeln!(s, "  rewrite {hyp}."),
            Step::Rewrite { hyp, dir: Direction::Backward } => writeln!(s, "  rewrite -{hyp}."),
            Step::Close => writeln!(s, "  mcat."),
        };
    }
    s.push_str("Qed.\n");
    s
}
