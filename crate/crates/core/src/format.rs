//! The problem file format.
//!
//! ```text
//! # comment
//! level 1
//! kb {
//!   fatherOf(Sally)=Frank | fatherOf(Sally)=Fred
//!   fatherOf(Sally)!=Frank | rich(Frank)=T
//!   fatherOf(Sally)!=Fred | rich(Fred)=T
//! }
//! query {
//!   rich(Frank)=T | rich(Fred)=T
//! }
//! ```
//!
//! One clause per line inside `kb`. Formula precedence is `~` and `B k`,
//! then `&`, then `|`; binary operators associate to the left. `level` is
//! written only for objective queries and defaults to 0 when absent.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lang::{is_generated_symbol, Clause, Formula, Literal, Name, Term, FRESH_NAME};
use crate::solver::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrintError {
    #[error("the empty clause cannot be written in a problem file")]
    EmptyClause,
    #[error("`{0}` cannot be written in a problem file")]
    ReservedName(String),
    #[error("instance is ill-formed: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eq,
    Neq,
    Bar,
    Amp,
    Tilde,
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Token {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        match c {
            '\n' => {
                push(Tok::Newline);
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => push(Tok::LBrace),
            '}' => push(Tok::RBrace),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            ',' => push(Tok::Comma),
            '=' => push(Tok::Eq),
            '|' => push(Tok::Bar),
            '&' => push(Tok::Amp),
            '~' => push(Tok::Tilde),
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Neq);
                    i += 2;
                    col += 2;
                    continue;
                }
                return Err(err(line, col, "expected `!=`".into()));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    return Err(err(line, col, format!("malformed token starting `{digits}`")));
                }
                let value = digits
                    .parse::<u32>()
                    .map_err(|_| err(line, col, format!("number `{digits}` is too large")))?;
                push(Tok::Nat(value));
                col += i - start;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '@' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                if ident == "@" {
                    return Err(err(line, col, "`@` must start an identifier".into()));
                }
                push(Tok::Ident(ident));
                col += i - start;
                continue;
            }
            other => {
                return Err(err(line, col, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    skip_newlines: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&mut self) -> &Token {
        if self.skip_newlines {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if tok.tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error_at(tok: &Token, message: String) -> ParseError {
        ParseError {
            line: tok.line,
            column: tok.column,
            message,
        }
    }

    fn unexpected(&mut self, wanted: &str) -> ParseError {
        let tok = self.peek().clone();
        Self::error_at(&tok, format!("expected {wanted}, found {}", tok.tok.describe()))
    }

    fn expect(&mut self, want: Tok) -> PResult<Token> {
        if self.peek().tok == want {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn skip_blank_lines(&mut self) {
        while self.toks[self.pos].tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn identifier(&mut self, what: &str) -> PResult<(String, Token)> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Ident(s) => {
                let s = s.clone();
                check_user_identifier(&s, &tok)?;
                self.bump();
                Ok((s, tok))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let (symbol, _) = self.identifier("a function term")?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            loop {
                let (name, _) = self.identifier("a name")?;
                args.push(Name::new(&name));
                match self.peek().tok {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        Ok(Term::new(&symbol, &args))
    }

    fn literal(&mut self) -> PResult<Literal> {
        let term = self.term()?;
        let positive = match self.peek().tok {
            Tok::Eq => true,
            Tok::Neq => false,
            _ => return Err(self.unexpected("`=` or `!=`")),
        };
        self.bump();
        let (name, _) = self.identifier("a name")?;
        Ok(Literal::new(term, Name::new(&name), positive))
    }

    fn clause_line(&mut self) -> PResult<Clause> {
        let mut lits = vec![self.literal()?];
        while self.peek().tok == Tok::Bar {
            self.bump();
            lits.push(self.literal()?);
        }
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
            }
            Tok::RBrace => {}
            _ => return Err(self.unexpected("`|` or end of line")),
        }
        Ok(Clause::new(lits))
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut left = self.conjunction()?;
        while self.peek().tok == Tok::Bar {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut left = self.unary()?;
        while self.peek().tok == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "B" && matches!(self.toks.get(self.pos + 1), Some(Token { tok: Tok::Nat(_), .. })) => {
                self.bump();
                let level = match self.bump().tok {
                    Tok::Nat(k) => k,
                    _ => unreachable!("checked above"),
                };
                let body = self.unary()?;
                if !body.is_objective() {
                    return Err(Self::error_at(
                        &tok,
                        "belief operators cannot be nested".into(),
                    ));
                }
                Ok(Formula::Believe(level, Box::new(body)))
            }
            Tok::Ident(_) => Ok(Formula::lit(self.literal()?)),
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn check_user_identifier(s: &str, tok: &Token) -> PResult<()> {
    if s.starts_with('@') && (s == FRESH_NAME || !is_generated_symbol(s)) {
        return Err(Parser::error_at(
            tok,
            format!("identifier `{s}` is reserved"),
        ));
    }
    Ok(())
}

pub fn parse_problem(text: &str) -> Result<Instance, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        skip_newlines: false,
    };
    let mut level: Option<(u32, Token)> = None;
    loop {
        p.skip_blank_lines();
        let tok = p.peek().clone();
        match &tok.tok {
            Tok::Ident(s) if s == "level" => {
                p.bump();
                let value = match p.peek().tok {
                    Tok::Nat(k) => k,
                    _ => return Err(p.unexpected("a level number")),
                };
                p.bump();
                if level.is_some() {
                    return Err(Parser::error_at(&tok, "duplicate `level` directive".into()));
                }
                level = Some((value, tok));
                match p.peek().tok {
                    Tok::Newline | Tok::Eof => {}
                    _ => return Err(p.unexpected("end of line")),
                }
            }
            Tok::Ident(s) if s == "kb" => break,
            _ => return Err(p.unexpected("`level` or `kb`")),
        }
    }
    p.bump();
    p.expect(Tok::LBrace)?;
    let mut kb = Vec::new();
    loop {
        p.skip_blank_lines();
        if p.peek().tok == Tok::RBrace {
            p.bump();
            break;
        }
        kb.push(p.clause_line()?);
    }
    p.skip_blank_lines();
    match &p.peek().tok {
        Tok::Ident(s) if s == "query" => {
            p.bump();
        }
        _ => return Err(p.unexpected("`query`")),
    }
    p.skip_newlines = true;
    p.expect(Tok::LBrace)?;
    let query = p.formula()?;
    p.expect(Tok::RBrace)?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    let level = match level {
        Some((_, tok)) if !query.is_objective() => {
            return Err(Parser::error_at(
                &tok,
                "`level` cannot be combined with belief operators in the query".into(),
            ));
        }
        Some((k, _)) => k,
        None => 0,
    };
    Ok(Instance { kb, query, level })
}

/// Parses a single literal such as `rich(Frank)=T` or `f!=n`.
pub fn parse_literal(text: &str) -> Result<Literal, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        skip_newlines: true,
    };
    let l = p.literal()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(l)
}

/// Parses a formula in query syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        skip_newlines: true,
    };
    let f = p.formula()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Canonical text of an instance; `parse_problem` inverts it exactly.
pub fn print_problem(inst: &Instance) -> Result<String, PrintError> {
    inst.validate()
        .map_err(|e| PrintError::Invalid(e.to_string()))?;
    let check = |l: &Literal| -> Result<(), PrintError> {
        let syms = std::iter::once(l.term().symbol().as_str())
            .chain(std::iter::once(l.name().as_str()))
            .chain(l.term().args().iter().map(|n| n.as_str()));
        for s in syms {
            if s.starts_with('@') && (s == FRESH_NAME || !is_generated_symbol(s)) {
                return Err(PrintError::ReservedName(s.to_string()));
            }
        }
        Ok(())
    };
    let mut out = String::new();
    if inst.query.is_objective() {
        let _ = writeln!(out, "level {}", inst.level);
    }
    out.push_str("kb {\n");
    for c in &inst.kb {
        if c.is_empty() {
            return Err(PrintError::EmptyClause);
        }
        for l in c.iter() {
            check(l)?;
        }
        let _ = writeln!(out, "  {c}");
    }
    out.push_str("}\n");
    let mut bad = None;
    inst.query.for_each_literal(&mut |l| {
        if bad.is_none() {
            bad = check(l).err();
        }
    });
    if let Some(e) = bad {
        return Err(e);
    }
    let _ = write!(out, "query {{\n  {}\n}}\n", inst.query);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{father, FATHER_TEXT};

    #[test]
    fn father_file() {
        let inst = parse_problem(FATHER_TEXT).unwrap();
        assert_eq!(inst, father(1));
        let printed = print_problem(&inst).unwrap();
        assert_eq!(parse_problem(&printed).unwrap(), inst);
    }

    #[test]
    fn canonical_print() {
        let text = "# c\nlevel 2\n\nkb {\n g=T|f=T  # trailing\n\n f != T\n}\nquery { h=T &\n  (g=T | f=T) }\n";
        let inst = parse_problem(text).unwrap();
        let printed = print_problem(&inst).unwrap();
        assert_eq!(
            printed,
            "level 2\nkb {\n  f=T | g=T\n  f!=T\n}\nquery {\n  h=T & (g=T | f=T)\n}\n"
        );
    }

    #[test]
    fn nested_belief_rejected() {
        let e = parse_problem("kb {\n}\nquery { B 1 B 0 f=T }\n").unwrap_err();
        assert!(e.message.contains("nested"), "{e}");
        assert_eq!((e.line, e.column), (3, 9));
    }

    #[test]
    fn level_conflicts_with_belief_atoms() {
        let e = parse_problem("level 1\nkb {\n}\nquery { B 1 f=T }\n").unwrap_err();
        assert!(e.message.contains("level"), "{e}");
        let ok = parse_problem("kb {\n}\nquery { ~B 1 f=T | B 0 g=T }\n").unwrap();
        assert_eq!(ok.level, 0);
        assert!(!ok.query.is_objective());
    }

    #[test]
    fn reserved_identifiers() {
        for bad in ["f=@fresh", "@x=T", "f(@fresh)=T"] {
            let text = format!("kb {{\n  {bad}\n}}\nquery {{ g=T }}\n");
            let e = parse_problem(&text).unwrap_err();
            assert!(e.message.contains("reserved"), "{bad}: {e}");
        }
        let ok = "kb {\n  @o1_1=@t | f!=T\n}\nquery { @o1_1=@t }\n";
        assert!(parse_problem(ok).is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_problem("kb {\n  f=T |\n}\nquery { f=T }\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_problem("kb {\n  f=T\n}\nquery { f=T\n").unwrap_err();
        assert!(e.message.contains("end of input"), "{e}");
        let e = parse_problem("kb {\n  f!T\n}\nquery { f=T }").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(parse_problem("kb {} query { f=T } extra").is_err());
    }

    #[test]
    fn b_is_an_ordinary_identifier_without_level() {
        let f = parse_formula("B=T | B(x)=y").unwrap();
        assert_eq!(f.to_string(), "B=T | B(x)=y");
    }

    #[test]
    fn empty_clause_cannot_be_printed() {
        let inst = Instance {
            kb: vec![Clause::empty()],
            query: parse_formula("f=T").unwrap(),
            level: 0,
        };
        assert_eq!(print_problem(&inst), Err(PrintError::EmptyClause));
    }

    #[test]
    fn negation_forms_round_trip() {
        for text in ["~f=T", "~~f=T", "~(f=T | g=T)", "f=T & g=T & h=T", "f=T & (g=T & h=T)", "~(~f=T | ~g=T) | h=T"] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
