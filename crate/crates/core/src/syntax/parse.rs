//! Textual syntax for programs, theories and goals.
//!
//! Program files consist of `%` comments, declaration directives and rules:
//!
//! ```text
//! #rulepreds w/1 m/2.
//! #constraintpreds fi/1 e_cls/1.
//! #constants a b c d e f.
//! #theory geo.
//!
//! w(X) :- m(X,Y), ~w(Y).
//! m(c,f) :- { not fi(f) }.
//! ```
//!
//! Constraints between `{ }` use the grammar
//! `true | false | atom | t = u | not C | C and C | C or C | exists X,Y: C`
//! with `or` binding weakest, then `and`, then `not`/`exists`; an `exists`
//! body extends as far to the right as possible. Variables start with an
//! upper-case letter or `_`; everything else lower-case is a constant,
//! function or predicate name. `~` negates rule literals, `not` negates
//! constraints; the two negations never mix.
//!
//! Theory files hold universally quantified clauses over the constraint
//! predicates: `fi(X) -> e_cls(X).`, facts `fi(b).`, and optionally
//! `conj -> lit or lit` with `not` allowed on either side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::constraint::Constraint;
use super::program::{Atom, Goal, HybridProgram, HybridRule, Literal, Signature};
use super::term::{Term, Variable};

/// Words that cannot be used as predicate, function or constant names.
const RESERVED: &[&str] = &["true", "false", "not", "and", "or", "exists"];

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

/// Parsed form of a theory file: declarations plus universal clauses.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct TheoryDecls {
    pub name: Option<String>,
    pub constraint_preds: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub clauses: Vec<TheoryClause>,
}

/// A universally quantified clause `body -> head`, body a conjunction and
/// head a disjunction of possibly negated constraint atoms. Facts have an
/// empty body; integrity constraints an empty head.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TheoryClause {
    pub body: Vec<(bool, Atom)>,
    pub head: Vec<(bool, Atom)>,
}

impl fmt::Display for TheoryClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |f: &mut fmt::Formatter<'_>, (pos, atom): &(bool, Atom)| {
            if !*pos {
                f.write_str("not ")?;
            }
            write!(f, "{atom}")
        };
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            lit(f, l)?;
        }
        if !self.body.is_empty() {
            f.write_str(" -> ")?;
        }
        if self.head.is_empty() {
            f.write_str("false")?;
        }
        for (i, l) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            lit(f, l)?;
        }
        f.write_str(".")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Var(String),
    Int(usize),
    Directive(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    If,    // :-
    Colon, // :
    Tilde,
    Eq,
    Arrow, // ->
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Var(s) => write!(f, "variable `{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Directive(s) => write!(f, "`#{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '~' => Tok::Tilde,
                '=' => Tok::Eq,
                '/' => Tok::Slash,
                ':' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::If
                    } else {
                        Tok::Colon
                    }
                }
                '-' => {
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(ParseError {
                            line,
                            col,
                            message: "unexpected `-`".into(),
                        });
                    }
                }
                '#' => {
                    let word = self.ident_tail(String::new());
                    if word.is_empty() {
                        return Err(ParseError {
                            line,
                            col,
                            message: "expected directive name after `#`".into(),
                        });
                    }
                    Tok::Directive(word)
                }
                c if c.is_ascii_digit() => {
                    let mut s = c.to_string();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_digit() {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Int(s.parse().map_err(|_| ParseError {
                        line,
                        col,
                        message: "integer too large".into(),
                    })?)
                }
                c if c.is_ascii_uppercase() || c == '_' => {
                    Tok::Var(self.ident_tail(c.to_string()))
                }
                c if c.is_ascii_lowercase() => Tok::Ident(self.ident_tail(c.to_string())),
                other => {
                    return Err(ParseError {
                        line,
                        col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push((tok, line, col));
        }
    }

    fn ident_tail(&mut self, mut s: String) -> String {
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: Lexer::new(text).tokens()?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                if RESERVED.contains(&s.as_str()) {
                    return Err(self.err(format!("`{s}` is a reserved word")));
                }
                self.next();
                Ok(s)
            }
            other => Err(self.err(format!("expected {what}, found {other}"))),
        }
    }

    // --- terms -----------------------------------------------------------

    fn term(&mut self, sig: &mut SigBuilder) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.next();
                Ok(Term::var(name))
            }
            Tok::Ident(_) => {
                let here = self.here();
                let name = self.ident("a term")?;
                if self.peek() == &Tok::LParen {
                    self.next();
                    let mut args = vec![self.term(sig)?];
                    while self.peek() == &Tok::Comma {
                        self.next();
                        args.push(self.term(sig)?);
                    }
                    self.expect(&Tok::RParen)?;
                    sig.function(&name, args.len(), here)?;
                    Ok(Term::app(name, args))
                } else {
                    sig.function(&name, 0, here)?;
                    Ok(Term::constant(name))
                }
            }
            other => Err(self.err(format!("expected a term, found {other}"))),
        }
    }

    fn atom(&mut self, sig: &mut SigBuilder, kind: PredKind) -> Result<Atom, ParseError> {
        let here = self.here();
        let name = self.ident("a predicate name")?;
        let mut args = Vec::new();
        if self.peek() == &Tok::LParen {
            self.next();
            args.push(self.term(sig)?);
            while self.peek() == &Tok::Comma {
                self.next();
                args.push(self.term(sig)?);
            }
            self.expect(&Tok::RParen)?;
        }
        sig.predicate(&name, args.len(), kind, here)?;
        Ok(Atom::new(name, args))
    }

    // --- constraints -------------------------------------------------------

    fn constraint(&mut self, sig: &mut SigBuilder) -> Result<Constraint, ParseError> {
        let mut parts = vec![self.constraint_and(sig)?];
        while self.peek() == &Tok::Ident("or".into()) {
            self.next();
            parts.push(self.constraint_and(sig)?);
        }
        Ok(Constraint::or(parts))
    }

    fn constraint_and(&mut self, sig: &mut SigBuilder) -> Result<Constraint, ParseError> {
        let mut parts = vec![self.constraint_unary(sig)?];
        while self.peek() == &Tok::Ident("and".into()) {
            self.next();
            parts.push(self.constraint_unary(sig)?);
        }
        Ok(Constraint::and(parts))
    }

    fn constraint_unary(&mut self, sig: &mut SigBuilder) -> Result<Constraint, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                self.next();
                Ok(self.constraint_unary(sig)?.negated())
            }
            Tok::Ident(s) if s == "exists" => {
                self.next();
                let mut vars = Vec::new();
                loop {
                    match self.next() {
                        Tok::Var(v) => vars.push(Variable::new(v)),
                        other => {
                            return Err(self.err(format!("expected a variable, found {other}")))
                        }
                    }
                    if self.peek() == &Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::Colon)?;
                Ok(Constraint::exists(vars, self.constraint(sig)?))
            }
            Tok::Ident(s) if s == "true" => {
                self.next();
                Ok(Constraint::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.next();
                Ok(Constraint::False)
            }
            Tok::LParen => {
                self.next();
                let c = self.constraint(sig)?;
                self.expect(&Tok::RParen)?;
                Ok(c)
            }
            Tok::Var(_) => {
                // a bare variable must be the left side of an equation
                let l = self.term(sig)?;
                self.expect(&Tok::Eq)?;
                let r = self.term(sig)?;
                Ok(Constraint::Eq(l, r))
            }
            Tok::Ident(_) => {
                // either a constraint atom or the left side of an equation
                let here = self.here();
                let name = self.ident("a constraint")?;
                let mut args = Vec::new();
                if self.peek() == &Tok::LParen {
                    self.next();
                    args.push(self.term(sig)?);
                    while self.peek() == &Tok::Comma {
                        self.next();
                        args.push(self.term(sig)?);
                    }
                    self.expect(&Tok::RParen)?;
                }
                if self.peek() == &Tok::Eq {
                    self.next();
                    sig.function(&name, args.len(), here)?;
                    let r = self.term(sig)?;
                    Ok(Constraint::Eq(Term::app(name, args), r))
                } else {
                    sig.predicate(&name, args.len(), PredKind::Constraint, here)?;
                    Ok(Constraint::Atom(name, args))
                }
            }
            other => Err(self.err(format!("expected a constraint, found {other}"))),
        }
    }

    // --- rules and goals --------------------------------------------------

    fn literal(&mut self, sig: &mut SigBuilder) -> Result<Literal, ParseError> {
        if self.peek() == &Tok::Tilde {
            self.next();
            Ok(Literal::negative(self.atom(sig, PredKind::Rule)?))
        } else {
            Ok(Literal::positive(self.atom(sig, PredKind::Rule)?))
        }
    }

    fn rule(&mut self, sig: &mut SigBuilder) -> Result<HybridRule, ParseError> {
        let head = self.atom(sig, PredKind::Rule)?;
        let mut constraint = Constraint::True;
        let mut body = Vec::new();
        if self.peek() == &Tok::If {
            self.next();
            if self.peek() == &Tok::LBrace {
                self.next();
                constraint = self.constraint(sig)?;
                self.expect(&Tok::RBrace)?;
                if self.peek() == &Tok::Comma {
                    self.next();
                    body = self.literals(sig)?;
                }
            } else {
                body = self.literals(sig)?;
            }
        }
        self.expect(&Tok::Dot)?;
        Ok(HybridRule {
            head,
            constraint,
            body,
        })
    }

    fn literals(&mut self, sig: &mut SigBuilder) -> Result<Vec<Literal>, ParseError> {
        let mut out = vec![self.literal(sig)?];
        while self.peek() == &Tok::Comma {
            self.next();
            out.push(self.literal(sig)?);
        }
        Ok(out)
    }

    fn pred_decls(&mut self) -> Result<Vec<(String, usize, (u32, u32))>, ParseError> {
        let mut out = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let here = self.here();
            let name = self.ident("a predicate name")?;
            self.expect(&Tok::Slash)?;
            let arity = match self.next() {
                Tok::Int(n) => n,
                other => return Err(self.err(format!("expected an arity, found {other}"))),
            };
            out.push((name, arity, here));
        }
        self.expect(&Tok::Dot)?;
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum PredKind {
    Rule,
    Constraint,
}

/// Accumulates and checks the signature while parsing. When `frozen` is set
/// (goal parsing against an existing program) no new predicates, constants
/// or function symbols may be introduced.
struct SigBuilder {
    sig: Signature,
    frozen: bool,
}

impl SigBuilder {
    fn new() -> Self {
        SigBuilder {
            sig: Signature::default(),
            frozen: false,
        }
    }

    fn frozen(sig: Signature) -> Self {
        SigBuilder { sig, frozen: true }
    }

    fn declare(
        &mut self,
        name: String,
        arity: usize,
        kind: PredKind,
        at: (u32, u32),
    ) -> Result<(), ParseError> {
        if RESERVED.contains(&name.as_str()) {
            return Err(err_at(at, format!("`{name}` is a reserved word")));
        }
        let (own, other) = match kind {
            PredKind::Rule => (&mut self.sig.rule_preds, &self.sig.constraint_preds),
            PredKind::Constraint => (&mut self.sig.constraint_preds, &self.sig.rule_preds),
        };
        if other.contains_key(&name) {
            return Err(err_at(
                at,
                format!("predicate `{name}` declared as both rule and constraint predicate"),
            ));
        }
        if let Some(&a) = own.get(&name) {
            if a != arity {
                return Err(err_at(
                    at,
                    format!("predicate `{name}` redeclared with arity {arity}, was {a}"),
                ));
            }
        }
        own.insert(name, arity);
        Ok(())
    }

    fn predicate(
        &mut self,
        name: &str,
        arity: usize,
        kind: PredKind,
        at: (u32, u32),
    ) -> Result<(), ParseError> {
        let map = match kind {
            PredKind::Rule => &self.sig.rule_preds,
            PredKind::Constraint => &self.sig.constraint_preds,
        };
        match map.get(name) {
            Some(&a) if a == arity => Ok(()),
            Some(&a) => Err(err_at(
                at,
                format!("predicate `{name}` used with arity {arity}, declared with {a}"),
            )),
            None => {
                let what = match kind {
                    PredKind::Rule => "rule",
                    PredKind::Constraint => "constraint",
                };
                Err(err_at(
                    at,
                    format!("undeclared {what} predicate `{name}/{arity}`"),
                ))
            }
        }
    }

    fn function(&mut self, name: &str, arity: usize, at: (u32, u32)) -> Result<(), ParseError> {
        let known = if arity == 0 {
            if self.sig.functions.contains_key(name) {
                return Err(err_at(
                    at,
                    format!("`{name}` used both as a constant and as a function symbol"),
                ));
            }
            self.sig.constants.contains(name)
        } else {
            if self.sig.constants.contains(name) {
                return Err(err_at(
                    at,
                    format!("`{name}` used both as a constant and as a function symbol"),
                ));
            }
            match self.sig.functions.get(name) {
                Some(&a) if a != arity => {
                    return Err(err_at(
                        at,
                        format!("function symbol `{name}` used with arity {arity}, was {a}"),
                    ));
                }
                Some(_) => true,
                None => false,
            }
        };
        if !known {
            if self.frozen {
                return Err(err_at(
                    at,
                    format!("unknown symbol `{name}` (not part of the program alphabet)"),
                ));
            }
            if arity == 0 {
                self.sig.constants.insert(name.to_string());
            } else {
                self.sig.functions.insert(name.to_string(), arity);
            }
        }
        Ok(())
    }
}

fn err_at(at: (u32, u32), message: String) -> ParseError {
    ParseError {
        line: at.0,
        col: at.1,
        message,
    }
}

/// Parses a program file.
pub fn parse_program(text: &str) -> Result<HybridProgram, ParseError> {
    let mut p = Parser::new(text)?;
    let mut sig = SigBuilder::new();
    let mut rules = Vec::new();
    let mut theory_ref = None;
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.next();
                match d.as_str() {
                    "rulepreds" | "constraintpreds" => {
                        let kind = if d == "rulepreds" {
                            PredKind::Rule
                        } else {
                            PredKind::Constraint
                        };
                        for (name, arity, at) in p.pred_decls()? {
                            sig.declare(name, arity, kind, at)?;
                        }
                    }
                    "constants" => {
                        while matches!(p.peek(), Tok::Ident(_)) {
                            let here = p.here();
                            let name = p.ident("a constant")?;
                            sig.function(&name, 0, here)?;
                        }
                        p.expect(&Tok::Dot)?;
                    }
                    "theory" => {
                        let name = p.ident("a theory name")?;
                        p.expect(&Tok::Dot)?;
                        theory_ref = Some(name);
                    }
                    other => return Err(p.err(format!("unknown directive `#{other}`"))),
                }
            }
            _ => rules.push(p.rule(&mut sig)?),
        }
    }
    Ok(HybridProgram {
        rules,
        signature: sig.sig,
        theory_ref,
    })
}

/// Parses a goal against the alphabet of an existing program.
pub fn parse_goal(text: &str, signature: &Signature) -> Result<Goal, ParseError> {
    let mut p = Parser::new(text)?;
    let mut sig = SigBuilder::frozen(signature.clone());
    let mut constraint = Constraint::True;
    let mut literals = Vec::new();
    if p.peek() == &Tok::LBrace {
        p.next();
        constraint = p.constraint(&mut sig)?;
        p.expect(&Tok::RBrace)?;
        if p.peek() == &Tok::Comma {
            p.next();
        }
    }
    if p.peek() != &Tok::Eof {
        literals = p.literals(&mut sig)?;
    }
    if p.peek() != &Tok::Eof {
        return Err(p.err(format!("unexpected {} after goal", p.peek())));
    }
    Ok(Goal {
        constraint,
        literals,
    })
}

/// Parses a theory file. Constraint predicates may be declared or inferred
/// from use; arities must be consistent either way.
pub fn parse_theory(text: &str) -> Result<TheoryDecls, ParseError> {
    let mut p = Parser::new(text)?;
    let mut decls = TheoryDecls::default();
    let mut sig = SigBuilder::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.next();
                match d.as_str() {
                    "theory" => {
                        let name = p.ident("a theory name")?;
                        p.expect(&Tok::Dot)?;
                        decls.name = Some(name);
                    }
                    "constraintpreds" => {
                        for (name, arity, at) in p.pred_decls()? {
                            sig.declare(name, arity, PredKind::Constraint, at)?;
                        }
                    }
                    "constants" => {
                        while matches!(p.peek(), Tok::Ident(_)) {
                            let here = p.here();
                            let name = p.ident("a constant")?;
                            sig.function(&name, 0, here)?;
                        }
                        p.expect(&Tok::Dot)?;
                    }
                    other => return Err(p.err(format!("unknown directive `#{other}`"))),
                }
            }
            _ => {
                decls.clauses.push(parse_clause(&mut p, &mut sig)?);
            }
        }
    }
    decls.constraint_preds = sig.sig.constraint_preds;
    decls.constants = sig.sig.constants;
    if !sig.sig.functions.is_empty() {
        let (name, arity) = sig.sig.functions.iter().next().unwrap();
        return Err(ParseError {
            line: 1,
            col: 1,
            message: format!(
                "theory clauses must not use function symbols of arity > 0 (found `{name}/{arity}`)"
            ),
        });
    }
    Ok(decls)
}

fn theory_lit(p: &mut Parser, sig: &mut SigBuilder) -> Result<(bool, Atom), ParseError> {
    if p.peek() == &Tok::Ident("not".into()) {
        p.next();
        Ok((false, theory_atom(p, sig)?))
    } else {
        Ok((true, theory_atom(p, sig)?))
    }
}

fn theory_atom(p: &mut Parser, sig: &mut SigBuilder) -> Result<Atom, ParseError> {
    let here = p.here();
    let name = p.ident("a constraint predicate")?;
    let mut args = Vec::new();
    if p.peek() == &Tok::LParen {
        p.next();
        args.push(p.term(sig)?);
        while p.peek() == &Tok::Comma {
            p.next();
            args.push(p.term(sig)?);
        }
        p.expect(&Tok::RParen)?;
    }
    // theory predicates may be inferred from use
    if !sig.sig.constraint_preds.contains_key(&name) {
        sig.declare(name.clone(), args.len(), PredKind::Constraint, here)?;
    } else {
        sig.predicate(&name, args.len(), PredKind::Constraint, here)?;
    }
    Ok(Atom::new(name, args))
}

fn parse_clause(p: &mut Parser, sig: &mut SigBuilder) -> Result<TheoryClause, ParseError> {
    let mut first = vec![theory_lit(p, sig)?];
    while p.peek() == &Tok::Ident("and".into()) {
        p.next();
        first.push(theory_lit(p, sig)?);
    }
    let clause = if p.peek() == &Tok::Arrow {
        p.next();
        let mut head = Vec::new();
        if p.peek() == &Tok::Ident("false".into()) {
            p.next();
        } else {
            head.push(theory_lit(p, sig)?);
            while p.peek() == &Tok::Ident("or".into()) {
                p.next();
                head.push(theory_lit(p, sig)?);
            }
        }
        TheoryClause { body: first, head }
    } else {
        if first.len() > 1 {
            return Err(p.err("a conjunction must be followed by `->`".to_string()));
        }
        TheoryClause {
            body: Vec::new(),
            head: first,
        }
    };
    p.expect(&Tok::Dot)?;
    Ok(clause)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAME: &str = "\
% winning positions of the token game
#rulepreds w/1 m/2.
#constants a b c d e f.
w(X) :- m(X,Y), ~w(Y).
m(b,a). m(a,b). m(a,c). m(c,d). m(d,e). m(c,f). m(e,f).
";

    #[test]
    fn parses_plain_rule_with_true_constraint() {
        let p = parse_program(GAME).unwrap();
        assert_eq!(p.rules.len(), 8);
        assert_eq!(p.rules[0].constraint, Constraint::True);
        assert_eq!(p.rules[0].body.len(), 2);
        assert!(!p.rules[0].body[1].positive);
        assert!(p.is_datalog());
        assert_eq!(p.signature.constants.len(), 6);
    }

    #[test]
    fn parses_constraint_block() {
        let text = "\
#rulepreds m/2.
#constraintpreds e_cls/1.
m(e,f) :- { e_cls(f) }.
";
        let p = parse_program(text).unwrap();
        assert_eq!(
            p.rules[0].constraint,
            Constraint::atom("e_cls", vec![Term::constant("f")])
        );
    }

    #[test]
    fn syntax_error_locates_unclosed_paren() {
        let text = "#rulepreds p/0 q/2.\np :- q(X,X.\n";
        let err = parse_program(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("expected"), "{}", err.message);
    }

    #[test]
    fn rejects_predicate_in_both_alphabets() {
        let text = "#rulepreds p/1.\n#constraintpreds p/1.\np(a).\n";
        let err = parse_program(text).unwrap_err();
        assert!(err.message.contains("both"), "{}", err.message);
    }

    #[test]
    fn rejects_arity_clash() {
        let text = "#rulepreds p/1.\np(a,b).\n";
        let err = parse_program(text).unwrap_err();
        assert!(err.message.contains("arity"), "{}", err.message);
    }

    #[test]
    fn rejects_undeclared_predicate() {
        let err = parse_program("p(a).\n").unwrap_err();
        assert!(err.message.contains("undeclared"), "{}", err.message);
    }

    #[test]
    fn parses_goal_with_constraint_block() {
        let p = parse_program(GAME).unwrap();
        let g = parse_goal("{ X = c } w(X), ~w(Y)", &p.signature).unwrap();
        assert_eq!(g.literals.len(), 2);
        assert_eq!(g.constraint, Constraint::eq(Term::var("X"), Term::constant("c")));
    }

    #[test]
    fn goal_rejects_unknown_constant() {
        let p = parse_program(GAME).unwrap();
        let err = parse_goal("w(zzz)", &p.signature).unwrap_err();
        assert!(err.message.contains("unknown symbol"), "{}", err.message);
    }

    #[test]
    fn parses_theory_clauses() {
        let text = "\
#theory geo.
#constraintpreds fi/1 e_cls/1.
fi(X) -> e_cls(X).
fi(b).
e_cls(c).
";
        let t = parse_theory(text).unwrap();
        assert_eq!(t.name.as_deref(), Some("geo"));
        assert_eq!(t.clauses.len(), 3);
        assert_eq!(t.clauses[0].body.len(), 1);
        assert_eq!(t.clauses[1].body.len(), 0);
    }

    #[test]
    fn theory_rejects_existential_style_syntax() {
        // no quantifiers in theory clauses: `exists` is not part of the grammar
        let err = parse_theory("#constraintpreds q/1.\nexists X: q(X).\n").unwrap_err();
        assert!(err.message.contains("reserved"), "{}", err.message);
    }

    #[test]
    fn constraint_precedence_and_exists_scope() {
        let text = "\
#rulepreds p/0.
#constraintpreds q/1 r/1.
#constants a.
p :- { not q(a) and r(a) or exists X: q(X) and r(X) }.
";
        let p = parse_program(text).unwrap();
        match &p.rules[0].constraint {
            Constraint::Or(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(parts[0], Constraint::And(_)));
                assert!(matches!(parts[1], Constraint::Exists(_, _)));
            }
            other => panic!("unexpected parse: {other}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let p = parse_program(GAME).unwrap();
        let q = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }
}
