//! The batch commands: check, replay, render and extract.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use moncat::diagram::{diagram_of_term, extract_expr, layout, render_svg, DiagramJson, ExtractError, StyleSheet};
use moncat::normalize::{decide_equal, Verdict};
use moncat::rewrite::{parse_neutral, parse_rocq, replay, FailureAt, Located, ProofState, ScriptError};
use moncat::syntax::typing::{Context, TypeError};
use moncat::syntax::{parse_goal, Equation, Goal, MorTerm, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("goal: {0}")]
    Parse(#[from] ParseError),
    #[error("goal: {0}")]
    Type(#[from] TypeError),
    #[error("script: {0}")]
    Script(#[from] ScriptError),
    #[error("{0}")]
    Extract(#[from] ExtractError),
    #[error("script: {0}")]
    Replay(#[from] FailureAt),
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScriptFormat {
    Neutral,
    Rocq,
}

impl FromStr for ScriptFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "neutral" => Ok(ScriptFormat::Neutral),
            "rocq" => Ok(ScriptFormat::Rocq),
            _ => Err(format!("unknown format {s:?}, expected neutral or rocq")),
        }
    }
}

impl ScriptFormat {
    /// `.v` files are Rocq scripts, everything else is the plain format.
    pub fn guess(path: &Path) -> ScriptFormat {
        if path.extension().is_some_and(|e| e == "v") {
            ScriptFormat::Rocq
        } else {
            ScriptFormat::Neutral
        }
    }

    pub fn parse(self, text: &str, goal: &Goal) -> Result<Vec<Located>, ScriptError> {
        match self {
            ScriptFormat::Neutral => parse_neutral(text, goal),
            ScriptFormat::Rocq => parse_rocq(text, goal),
        }
    }
}

/// Verdicts for the conclusion and for each hypothesis taken on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub conclusion: (String, Verdict),
    pub hypotheses: Vec<(String, Verdict)>,
}

impl CheckReport {
    /// 0 if equal, 1 if not, 2 if undecided.
    pub fn exit_code(&self) -> u8 {
        match self.conclusion.1 {
            Verdict::Equal => 0,
            Verdict::NotEqual => 1,
            Verdict::Unknown => 2,
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Equal => "Equal",
        Verdict::NotEqual => "NotEqual",
        Verdict::Unknown => "Unknown",
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.hypotheses {
            writeln!(f, "hypothesis {name}: {}", verdict_word(*v))?;
        }
        write!(f, "conclusion {}: {}", self.conclusion.0, verdict_word(self.conclusion.1))
    }
}

fn label(eq: &Equation, fallback: &str) -> String {
    eq.name.clone().unwrap_or_else(|| fallback.to_string())
}

fn decide(ctx: &Context, eq: &Equation) -> Result<Verdict, TypeError> {
    let te = ctx.typecheck_equation(eq)?;
    Ok(decide_equal(ctx, &te.lhs, &te.rhs))
}

pub fn check(goal_text: &str) -> Result<CheckReport, CliError> {
    let goal = parse_goal(goal_text)?;
    let ctx = Context::from_goal(&goal)?;
    let mut hypotheses = Vec::new();
    for (i, h) in goal.hypotheses.iter().enumerate() {
        hypotheses.push((label(h, &format!("h{i}")), decide(&ctx, h)?));
    }
    let conclusion = (label(&goal.conclusion, "goal"), decide(&ctx, &goal.conclusion)?);
    Ok(CheckReport { conclusion, hypotheses })
}

/// Replays a script. The outer error is for unreadable input, the inner
/// one for a step that fails.
pub fn replay_script(
    goal_text: &str,
    script: &str,
    format: ScriptFormat,
) -> Result<Result<ProofState, FailureAt>, CliError> {
    let goal = parse_goal(goal_text)?;
    let steps = format.parse(script, &goal)?;
    Ok(replay(&goal, &steps))
}

/// Writes one SVG per side of every hypothesis and of the conclusion.
/// Returns the files written, in order.
pub fn render(goal_text: &str, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let goal = parse_goal(goal_text)?;
    let ctx = Context::from_goal(&goal)?;
    let style = StyleSheet::from_signature(&goal.signature);
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_owned(), source })?;
    let mut eqs: Vec<(String, &Equation)> =
        goal.hypotheses.iter().enumerate().map(|(i, h)| (label(h, &format!("h{i}")), h)).collect();
    eqs.push(("conclusion".to_string(), &goal.conclusion));
    let mut written = Vec::new();
    for (name, eq) in eqs {
        let te = ctx.typecheck_equation(eq)?;
        for (side, t) in [("lhs", &te.lhs), ("rhs", &te.rhs)] {
            let l = layout(&diagram_of_term(&ctx, t))?;
            let path = out.join(format!("{name}_{side}.svg"));
            write(&path, &render_svg(&l, &style))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// The two sides of the conclusion, after the script if one is given, as
/// read back from their diagrams.
pub struct Extracted {
    pub lhs: MorTerm,
    pub rhs: MorTerm,
    pub diagrams: [DiagramJson; 2],
}

pub fn extract(goal_text: &str, script: Option<(&str, ScriptFormat)>) -> Result<Extracted, CliError> {
    let goal = parse_goal(goal_text)?;
    let ctx = Context::from_goal(&goal)?;
    let (lhs, rhs) = match script {
        Some((text, format)) => {
            let st = replay(&goal, &format.parse(text, &goal)?)?;
            (st.lhs, st.rhs)
        }
        None => (goal.conclusion.lhs.clone(), goal.conclusion.rhs.clone()),
    };
    let eq = Equation { name: None, lhs, rhs, kind: goal.conclusion.kind };
    let te = ctx.typecheck_equation(&eq)?;
    let side = |t| -> Result<(MorTerm, DiagramJson), CliError> {
        let l = layout(&diagram_of_term(&ctx, t))?;
        Ok((extract_expr(&ctx, &l.diagram)?, DiagramJson::from_layout(&l)))
    };
    let (l, lj) = side(&te.lhs)?;
    let (r, rj) = side(&te.rhs)?;
    Ok(Extracted { lhs: l, rhs: r, diagrams: [lj, rj] })
}

/// Writes `lhs.json` and `rhs.json` into `out`.
pub fn write_diagrams(e: &Extracted, out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_owned(), source })?;
    for (name, d) in ["lhs", "rhs"].iter().zip(&e.diagrams) {
        let text = serde_json::to_string_pretty(d).expect("diagram JSON serializes");
        write(&out.join(format!("{name}.json")), &text)?;
    }
    Ok(())
}
