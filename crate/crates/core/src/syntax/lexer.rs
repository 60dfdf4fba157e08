use super::parser::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// The unit object `1`.
    One,
    /// `⊗` or `*`
    Otimes,
    /// `·` or `.`
    Dot,
    Semi,
    SemiSemi,
    /// `≡` or `==`
    Equiv,
    /// `≡'` or `=='`
    EquivPrime,
    /// `~>` or `->`
    Arrow,
    Colon,
    Define,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Tilde,
    At,
    Assign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

/// Tokenizer for one line (or one fragment) of goal syntax.
pub struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col_base: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, line: usize) -> Self {
        Lexer { chars: src.char_indices().peekable(), line, col_base: 1, src }
    }

    fn col(&self, byte: usize) -> usize {
        self.col_base + self.src[..byte].chars().count()
    }

    fn err(&self, byte: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col: self.col(byte), kind }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(pos, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
                continue;
            }
            if c == '#' {
                break;
            }
            let kind = self.lex_one(pos, c)?;
            out.push(Token { kind, line: self.line, col: self.col(pos) });
        }
        Ok(out)
    }

    fn next_is(&mut self, c: char) -> bool {
        if self.chars.peek().map(|&(_, d)| d) == Some(c) {
            self.chars.next();
            true
        } else {
            false
        }
    }

    fn lex_one(&mut self, pos: usize, c: char) -> Result<TokenKind, ParseError> {
        self.chars.next();
        let kind = match c {
            '⊗' | '*' => TokenKind::Otimes,
            '·' | '.' | '∙' => TokenKind::Dot,
            ';' => {
                if self.next_is(';') {
                    TokenKind::SemiSemi
                } else {
                    TokenKind::Semi
                }
            }
            '≡' => {
                if self.next_is('\'') || self.next_is('′') {
                    TokenKind::EquivPrime
                } else {
                    TokenKind::Equiv
                }
            }
            '=' => {
                if self.next_is('=') {
                    if self.next_is('\'') {
                        TokenKind::EquivPrime
                    } else {
                        TokenKind::Equiv
                    }
                } else {
                    TokenKind::Assign
                }
            }
            '~' => {
                if self.next_is('>') {
                    TokenKind::Arrow
                } else {
                    TokenKind::Tilde
                }
            }
            '-' => {
                if self.next_is('>') {
                    TokenKind::Arrow
                } else {
                    return Err(self.err(pos, ParseErrorKind::Lexical('-')));
                }
            }
            ':' => {
                if self.next_is('=') {
                    TokenKind::Define
                } else {
                    TokenKind::Colon
                }
            }
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ',' => TokenKind::Comma,
            '@' => TokenKind::At,
            '1' => {
                if matches!(self.chars.peek(), Some(&(_, d)) if d.is_alphanumeric()) {
                    return Err(self.err(pos, ParseErrorKind::Lexical(c)));
                }
                TokenKind::One
            }
            c if is_ident_start(c) => {
                let mut end = pos + c.len_utf8();
                while let Some(&(p, d)) = self.chars.peek() {
                    if is_ident_continue(d) {
                        end = p + d.len_utf8();
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(self.src[pos..end].to_string())
            }
            other => return Err(self.err(pos, ParseErrorKind::Lexical(other))),
        };
        Ok(kind)
    }
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && c != '·'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}
