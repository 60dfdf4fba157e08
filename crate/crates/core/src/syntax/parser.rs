//! Line-oriented goal files and the term grammar.
//!
//! Precedence, loosest first: `;` / `;;` (left associative), `·` (right
//! associative), `cast`, `⊗` (objects only, right associative).

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::lexer::{Lexer, Token, TokenKind};
use super::{
    Definition, EqKind, Equation, GeneratorDecl, Goal, MorTerm, ObjTree, Signature, Structural, Style, RESERVED,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Lexical(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("expected {0}, found end of line")]
    UnexpectedEnd(&'static str),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("`{0}` is already declared")]
    DuplicateName(String),
    #[error("`{0}` is a reserved name")]
    Reserved(String),
    #[error("`{0}` is not a morphism")]
    NotAMorphism(String),
    #[error("malformed equation: {0}")]
    MalformedEquation(&'static str),
    #[error("missing conclusion after the separator line")]
    MissingConclusion,
    #[error("only one conclusion is allowed")]
    ExtraConclusion,
}

/// How identifiers in morphism position are interpreted.
#[derive(Clone, Debug)]
pub struct Resolver<'a> {
    signature: &'a Signature,
    definitions: HashSet<String>,
}

impl<'a> Resolver<'a> {
    pub fn new<'d>(signature: &'a Signature, definitions: impl IntoIterator<Item = &'d str>) -> Self {
        Resolver { signature, definitions: definitions.into_iter().map(str::to_string).collect() }
    }

    fn morphism(&self, name: &str) -> Option<MorTerm> {
        if self.signature.has_object(name) {
            Some(MorTerm::Id(ObjTree::atom(name)))
        } else if self.signature.generator(name).is_some() || self.definitions.contains(name) {
            Some(MorTerm::gen(name))
        } else {
            None
        }
    }
}

struct Cursor<'t> {
    toks: &'t [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'t> Cursor<'t> {
    fn new(toks: &'t [Token], line: usize, end_col: usize) -> Self {
        Cursor { toks, pos: 0, line, end_col }
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, off: usize) -> Option<&'t TokenKind> {
        self.toks.get(self.pos + off).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        match self.toks.get(self.pos) {
            Some(t) => ParseError { line: t.line, col: t.col, kind },
            None => ParseError { line: self.line, col: self.end_col, kind },
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some(t) => self.error_here(ParseErrorKind::Unexpected { expected, found: describe(&t.kind) }),
            None => self.error_here(ParseErrorKind::UnexpectedEnd(expected)),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self, what: &'static str) -> Result<&'t str, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

fn describe(k: &TokenKind) -> String {
    match k {
        TokenKind::Ident(s) => format!("`{s}`"),
        TokenKind::One => "`1`".into(),
        TokenKind::Otimes => "`⊗`".into(),
        TokenKind::Dot => "`·`".into(),
        TokenKind::Semi => "`;`".into(),
        TokenKind::SemiSemi => "`;;`".into(),
        TokenKind::Equiv => "`≡`".into(),
        TokenKind::EquivPrime => "`≡'`".into(),
        TokenKind::Arrow => "`~>`".into(),
        TokenKind::Colon => "`:`".into(),
        TokenKind::Define => "`:=`".into(),
        TokenKind::LBracket => "`[`".into(),
        TokenKind::RBracket => "`]`".into(),
        TokenKind::LParen => "`(`".into(),
        TokenKind::RParen => "`)`".into(),
        TokenKind::Comma => "`,`".into(),
        TokenKind::Tilde => "`~`".into(),
        TokenKind::At => "`@`".into(),
        TokenKind::Assign => "`=`".into(),
    }
}

/// Object expressions. With `declare`, unknown atoms are added to the signature.
struct ObjParser<'s> {
    sig: &'s mut Signature,
    declare: bool,
    reserved_names: &'s HashSet<String>,
}

impl ObjParser<'_> {
    fn obj(&mut self, c: &mut Cursor<'_>) -> Result<ObjTree, ParseError> {
        let head = self.primary(c)?;
        if c.peek() == Some(&TokenKind::Otimes) {
            c.bump();
            let rest = self.obj(c)?;
            Ok(ObjTree::tensor(head, rest))
        } else {
            Ok(head)
        }
    }

    fn primary(&mut self, c: &mut Cursor<'_>) -> Result<ObjTree, ParseError> {
        match c.peek() {
            Some(TokenKind::One) => {
                c.bump();
                Ok(ObjTree::Unit)
            }
            Some(TokenKind::LParen) => {
                c.bump();
                let t = self.obj(c)?;
                c.expect(TokenKind::RParen, "`)`")?;
                Ok(t)
            }
            Some(TokenKind::Ident(name)) => {
                if self.sig.has_object(name) {
                    c.bump();
                    return Ok(ObjTree::atom(name.as_str()));
                }
                if !self.declare {
                    return Err(c.error_here(ParseErrorKind::UnknownIdentifier(name.clone())));
                }
                if RESERVED.contains(&name.as_str()) {
                    return Err(c.error_here(ParseErrorKind::Reserved(name.clone())));
                }
                if self.reserved_names.contains(name.as_str()) {
                    return Err(c.error_here(ParseErrorKind::DuplicateName(name.clone())));
                }
                c.bump();
                self.sig.add_object(name);
                Ok(ObjTree::atom(name.as_str()))
            }
            _ => Err(c.unexpected("an object")),
        }
    }
}

struct TermParser<'r> {
    resolver: &'r Resolver<'r>,
}

impl TermParser<'_> {
    fn term(&self, c: &mut Cursor<'_>) -> Result<MorTerm, ParseError> {
        let mut acc = self.tensor(c)?;
        loop {
            match c.peek() {
                Some(TokenKind::Semi) => {
                    c.bump();
                    let rhs = self.tensor(c)?;
                    acc = MorTerm::comp(acc, rhs);
                }
                Some(TokenKind::SemiSemi) => {
                    c.bump();
                    let rhs = self.tensor(c)?;
                    acc = MorTerm::strict_comp(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn tensor(&self, c: &mut Cursor<'_>) -> Result<MorTerm, ParseError> {
        let head = self.prefix(c)?;
        if c.peek() == Some(&TokenKind::Dot) {
            c.bump();
            let rest = self.tensor(c)?;
            Ok(MorTerm::tensor(head, rest))
        } else {
            Ok(head)
        }
    }

    fn prefix(&self, c: &mut Cursor<'_>) -> Result<MorTerm, ParseError> {
        if let Some(TokenKind::Ident(kw)) = c.peek() {
            if kw == "cast" {
                c.bump();
                let body = self.prefix(c)?;
                return Ok(MorTerm::cast(body));
            }
        }
        self.objchain(c)
    }

    /// A primary, possibly followed by `⊗`-joined identities.
    fn objchain(&self, c: &mut Cursor<'_>) -> Result<MorTerm, ParseError> {
        let start = c.pos;
        let head = self.primary(c)?;
        if c.peek() != Some(&TokenKind::Otimes) {
            return Ok(head);
        }
        let MorTerm::Id(head_obj) = head else {
            c.pos = start;
            return Err(c.error_here(ParseErrorKind::Unexpected {
                expected: "an object before `⊗`",
                found: "a morphism".into(),
            }));
        };
        c.bump();
        let rest = self.objchain(c)?;
        match rest {
            MorTerm::Id(rest_obj) => Ok(MorTerm::Id(ObjTree::tensor(head_obj, rest_obj))),
            _ => Err(c.error_here(ParseErrorKind::Unexpected {
                expected: "an object after `⊗`",
                found: "a morphism".into(),
            })),
        }
    }

    fn primary(&self, c: &mut Cursor<'_>) -> Result<MorTerm, ParseError> {
        match c.peek() {
            Some(TokenKind::One) => {
                c.bump();
                Ok(MorTerm::Id(ObjTree::Unit))
            }
            Some(TokenKind::LParen) => {
                c.bump();
                let t = self.term(c)?;
                c.expect(TokenKind::RParen, "`)`")?;
                Ok(t)
            }
            Some(TokenKind::LBracket) => {
                c.bump();
                let t = self.term(c)?;
                c.expect(TokenKind::RBracket, "`]`")?;
                Ok(MorTerm::boxed(t))
            }
            Some(TokenKind::Ident(name)) => {
                let structural = match name.as_str() {
                    "assoc" | "α" => Some(3),
                    "unitl" | "λ" | "unitr" | "ρ" => Some(1),
                    _ => None,
                };
                if let Some(n) = structural {
                    if c.peek_at(1) == Some(&TokenKind::LBracket) {
                        return self.structural(c, name, n);
                    }
                }
                match self.resolver.morphism(name) {
                    Some(t) => {
                        c.bump();
                        Ok(t)
                    }
                    None => Err(c.error_here(ParseErrorKind::UnknownIdentifier(name.clone()))),
                }
            }
            _ => Err(c.unexpected("a morphism")),
        }
    }

    fn structural(&self, c: &mut Cursor<'_>, name: &str, n: usize) -> Result<MorTerm, ParseError> {
        c.bump();
        c.expect(TokenKind::LBracket, "`[`")?;
        let mut sig = self.resolver.signature.clone();
        let none = HashSet::new();
        let mut op = ObjParser { sig: &mut sig, declare: false, reserved_names: &none };
        let mut args = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                c.expect(TokenKind::Comma, "`,`")?;
            }
            args.push(op.obj(c)?);
        }
        c.expect(TokenKind::RBracket, "`]`")?;
        let mut it = args.into_iter();
        let mut s = match name {
            "assoc" | "α" => {
                let (a, b, cc) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                Structural::assoc(a, b, cc)
            }
            "unitl" | "λ" => Structural::unitl(it.next().unwrap()),
            _ => Structural::unitr(it.next().unwrap()),
        };
        while c.peek() == Some(&TokenKind::Tilde) {
            c.bump();
            s = s.inverted();
        }
        Ok(MorTerm::Structural(s))
    }
}

fn lex_line(text: &str, line: usize) -> Result<(Vec<Token>, usize), ParseError> {
    let toks = Lexer::new(text, line).tokenize()?;
    let end_col = text.chars().count() + 1;
    Ok((toks, end_col))
}

/// Parses a standalone term (e.g. from a proof script) against a goal's names.
pub fn parse_term(text: &str, resolver: &Resolver<'_>) -> Result<MorTerm, ParseError> {
    let (toks, end) = lex_line(text, 1)?;
    let mut c = Cursor::new(&toks, 1, end);
    let t = TermParser { resolver }.term(&mut c)?;
    c.finish()?;
    Ok(t)
}

/// Parses a standalone object expression; every atom must be declared.
pub fn parse_obj(text: &str, signature: &Signature) -> Result<ObjTree, ParseError> {
    let (toks, end) = lex_line(text, 1)?;
    let mut c = Cursor::new(&toks, 1, end);
    let mut sig = signature.clone();
    let none = HashSet::new();
    let t = ObjParser { sig: &mut sig, declare: false, reserved_names: &none }.obj(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn is_separator(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.chars().all(|c| c == '=')
}

#[derive(Default)]
struct GoalBuilder {
    sig: Signature,
    hypotheses: Vec<Equation>,
    definitions: Vec<Definition>,
    names: HashSet<String>,
}

impl GoalBuilder {
    fn claim(&mut self, name: &str, c: &Cursor<'_>, at: usize) -> Result<(), ParseError> {
        let err = |kind| ParseError { line: c.toks[at].line, col: c.toks[at].col, kind };
        if RESERVED.contains(&name) {
            return Err(err(ParseErrorKind::Reserved(name.into())));
        }
        if !self.names.insert(name.to_string()) {
            return Err(err(ParseErrorKind::DuplicateName(name.into())));
        }
        Ok(())
    }

    fn resolver(&self) -> Resolver<'_> {
        Resolver::new(&self.sig, self.definitions.iter().map(|d| d.name.as_str()))
    }

    fn equation(&self, c: &mut Cursor<'_>, name: Option<String>) -> Result<Equation, ParseError> {
        let resolver = self.resolver();
        let tp = TermParser { resolver: &resolver };
        let lhs = tp.term(c)?;
        let kind = match c.peek() {
            Some(TokenKind::Equiv) => EqKind::Strict,
            Some(TokenKind::EquivPrime) => EqKind::UpToCast,
            _ => return Err(c.unexpected("`≡` or `≡'`")),
        };
        c.bump();
        let rhs = tp.term(c)?;
        c.finish()?;
        Ok(Equation { name, lhs, rhs, kind })
    }

    fn declaration(&mut self, c: &mut Cursor<'_>) -> Result<(), ParseError> {
        let name = c.ident("a declaration name")?.to_string();
        match c.peek() {
            Some(TokenKind::Define) => {
                self.claim(&name, c, 0)?;
                c.bump();
                let resolver = self.resolver();
                let body = TermParser { resolver: &resolver }.term(c)?;
                c.finish()?;
                self.definitions.push(Definition { name, body });
                Ok(())
            }
            Some(TokenKind::Colon) => {
                c.bump();
                let rest = &c.toks[c.pos..];
                if let [Token { kind: TokenKind::Ident(kw), .. }] = rest {
                    if kw == "object" {
                        if self.sig.has_object(&name) {
                            return Err(ParseError {
                                line: c.toks[0].line,
                                col: c.toks[0].col,
                                kind: ParseErrorKind::DuplicateName(name),
                            });
                        }
                        self.claim(&name, c, 0)?;
                        self.sig.add_object(&name);
                        c.bump();
                        return Ok(());
                    }
                }
                let has = |k: &TokenKind| rest.iter().any(|t| &t.kind == k);
                if has(&TokenKind::Arrow) {
                    self.claim(&name, c, 0)?;
                    self.generator(c, name)
                } else if has(&TokenKind::Equiv) || has(&TokenKind::EquivPrime) {
                    self.claim(&name, c, 0)?;
                    let eq = self.equation(c, Some(name))?;
                    self.hypotheses.push(eq);
                    Ok(())
                } else {
                    Err(c.error_here(ParseErrorKind::MalformedEquation(
                        "expected `object`, a typing `~>` or an equation",
                    )))
                }
            }
            _ => Err(c.unexpected("`:` or `:=`")),
        }
    }

    fn generator(&mut self, c: &mut Cursor<'_>, name: String) -> Result<(), ParseError> {
        let reserved = self.names.clone();
        let mut op = ObjParser { sig: &mut self.sig, declare: true, reserved_names: &reserved };
        let source = op.obj(c)?;
        c.expect(TokenKind::Arrow, "`~>`")?;
        let target = op.obj(c)?;
        for o in source.atoms().chain(target.atoms()) {
            self.names.insert(o.to_string());
        }
        let mut style = Style::default();
        if c.peek() == Some(&TokenKind::At) {
            c.bump();
            loop {
                let key = c.ident("a style key")?.to_string();
                c.expect(TokenKind::Assign, "`=`")?;
                let value = c.ident("a style value")?.to_string();
                match key.as_str() {
                    "shape" => style.shape = Some(value),
                    "color" | "colour" => style.color = Some(value),
                    _ => {
                        return Err(c.error_here(ParseErrorKind::Unexpected {
                            expected: "`shape` or `color`",
                            found: format!("`{key}`"),
                        }))
                    }
                }
                if c.peek() == Some(&TokenKind::Comma) {
                    c.bump();
                } else {
                    break;
                }
            }
        }
        c.finish()?;
        self.sig.generators.push(GeneratorDecl { name, source, target, style });
        Ok(())
    }
}

/// Parses a goal document.
pub fn parse_goal(text: &str) -> Result<Goal, ParseError> {
    let mut b = GoalBuilder::default();
    let mut conclusion: Option<Equation> = None;
    let mut after_separator = false;
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        if is_separator(raw) {
            if after_separator {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseErrorKind::Unexpected { expected: "a conclusion", found: "a second separator".into() },
                });
            }
            after_separator = true;
            continue;
        }
        let (toks, end) = lex_line(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, line_no, end);
        if !after_separator {
            b.declaration(&mut c)?;
            continue;
        }
        if conclusion.is_some() {
            return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::ExtraConclusion });
        }
        let name = match (c.peek(), c.peek_at(1)) {
            (Some(TokenKind::Ident(n)), Some(TokenKind::Colon)) => {
                let n = n.clone();
                b.claim(&n, &c, 0)?;
                c.bump();
                c.bump();
                Some(n)
            }
            _ => None,
        };
        conclusion = Some(b.equation(&mut c, name)?);
    }
    let conclusion =
        conclusion.ok_or(ParseError { line: last_line, col: 1, kind: ParseErrorKind::MissingConclusion })?;
    Ok(Goal { signature: b.sig, hypotheses: b.hypotheses, definitions: b.definitions, conclusion })
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.signature.objects {
            writeln!(f, "{o} : object")?;
        }
        for g in &self.signature.generators {
            write!(f, "{} : {} ~> {}", g.name, g.source, g.target)?;
            let mut tags = Vec::new();
            if let Some(s) = &g.style.shape {
                tags.push(format!("shape={s}"));
            }
            if let Some(col) = &g.style.color {
                tags.push(format!("color={col}"));
            }
            if !tags.is_empty() {
                write!(f, " @{}", tags.join(","))?;
            }
            writeln!(f)?;
        }
        for h in &self.hypotheses {
            writeln!(f, "{}", h)?;
        }
        for d in &self.definitions {
            writeln!(f, "{} := {}", d.name, d.body)?;
        }
        writeln!(f, "===")?;
        writeln!(f, "{}", self.conclusion)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n} : ")?;
        }
        let eq = match self.kind {
            EqKind::Strict => "≡",
            EqKind::UpToCast => "≡'",
        };
        write!(f, "{} {eq} {}", self.lhs, self.rhs)
    }
}
