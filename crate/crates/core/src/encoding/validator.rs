//! A parser for the ASP-Core-2 language without aggregates and queries,
//! with a rule safety check on top.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ValidationError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Const(String),
    Var(String),
    Anon,
    Num(i64),
    Str(String),
    Func(String, Vec<Term>),
    Neg(Box<Term>),
    Bin(Box<Term>, char, Box<Term>),
}

impl Term {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Func(_, args) => args.iter().for_each(|a| a.vars(out)),
            Term::Neg(t) => t.vars(out),
            Term::Bin(a, _, b) => {
                a.vars(out);
                b.vars(out);
            }
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub strong_neg: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    fn vars(&self, out: &mut BTreeSet<String>) {
        self.args.iter().for_each(|a| a.vars(out));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Pos(Atom),
    Not(Atom),
    Builtin(Term, String, Term),
}

impl Literal {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Literal::Pos(a) | Literal::Not(a) => a.vars(out),
            Literal::Builtin(l, _, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Disjunction(Vec<Atom>),
    Choice {
        lower: Option<(Term, String)>,
        elements: Vec<ChoiceElement>,
        upper: Option<(String, Term)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    /// `head :- body.`; a constraint when `head` is `None`.
    Rule { head: Option<Head>, body: Vec<Literal> },
    Weak {
        body: Vec<Literal>,
        weight: Term,
        level: Option<Term>,
        terms: Vec<Term>,
    },
}

impl Statement {
    /// The atom of a ground fact, if this statement is one.
    pub fn as_fact(&self) -> Option<&Atom> {
        match self {
            Statement::Rule {
                head: Some(Head::Disjunction(atoms)),
                body,
            } if atoms.len() == 1 && body.is_empty() => Some(&atoms[0]),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Tok {
    Id(String),
    Var(String),
    Anon,
    Num(i64),
    Str(String),
    Not,
    If,
    WeakIf,
    Dot,
    Comma,
    Semi,
    Colon,
    Bar,
    At,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Op(String),
    Arith(char),
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ValidationError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ValidationError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if word == "_" {
                Tok::Anon
            } else if word == "not" {
                Tok::Not
            } else if c.is_ascii_lowercase() {
                Tok::Id(word)
            } else if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                return Err(err(l0, c0, format!("bad identifier `{word}`")));
            };
            out.push(Spanned { tok, line: l0, column: c0 });
            continue;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let n = digits
                .parse()
                .map_err(|_| err(l0, c0, format!("number `{digits}` out of range")))?;
            out.push(Spanned { tok: Tok::Num(n), line: l0, column: c0 });
            continue;
        } else if c == '"' {
            let start = i;
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(l0, c0, "unterminated string".into())),
                    Some('\\') if i + 1 < chars.len() => {
                        s.push(chars[i]);
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            col += i - start;
            out.push(Spanned { tok: Tok::Str(s), line: l0, column: c0 });
            continue;
        } else if two == ":-" {
            advance(2, &mut i, &mut col);
            Tok::If
        } else if two == ":~" {
            advance(2, &mut i, &mut col);
            Tok::WeakIf
        } else if ["!=", "<>", "<=", ">="].contains(&two.as_str()) {
            advance(2, &mut i, &mut col);
            Tok::Op(if two == "<>" { "!=".into() } else { two })
        } else {
            advance(1, &mut i, &mut col);
            match c {
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '|' => Tok::Bar,
                '@' => Tok::At,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '=' | '<' | '>' => Tok::Op(c.to_string()),
                '+' | '-' | '*' | '/' | '\\' => Tok::Arith(c),
                _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

type PResult<T> = Result<T, ValidationError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.column));
        Err(ValidationError {
            line,
            column,
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat(&Tok::If) {
            let body = self.body()?;
            self.expect(Tok::Dot, "`.` after constraint")?;
            return Ok(Statement::Rule { head: None, body });
        }
        if self.eat(&Tok::WeakIf) {
            let body = self.body()?;
            self.expect(Tok::Dot, "`.` after weak constraint body")?;
            self.expect(Tok::LBracket, "`[`")?;
            let weight = self.term()?;
            let level = if self.eat(&Tok::At) { Some(self.term()?) } else { None };
            let mut terms = Vec::new();
            while self.eat(&Tok::Comma) {
                terms.push(self.term()?);
            }
            self.expect(Tok::RBracket, "`]`")?;
            return Ok(Statement::Weak {
                body,
                weight,
                level,
                terms,
            });
        }
        let head = self.head()?;
        let body = if self.eat(&Tok::If) { self.body()? } else { Vec::new() };
        self.expect(Tok::Dot, "`.` at end of rule")?;
        Ok(Statement::Rule { head: Some(head), body })
    }

    fn is_choice_head(&self) -> bool {
        let mut k = 0;
        let mut depth = 0usize;
        while let Some(t) = self.peek_at(k) {
            match t {
                Tok::LBrace if depth == 0 => return true,
                Tok::LParen => depth += 1,
                Tok::RParen => depth = depth.saturating_sub(1),
                Tok::If | Tok::Dot | Tok::Bar | Tok::Semi => return false,
                _ => {}
            }
            k += 1;
        }
        false
    }

    fn head(&mut self) -> PResult<Head> {
        if self.is_choice_head() {
            let lower = if self.peek() == Some(&Tok::LBrace) {
                None
            } else {
                let t = self.term()?;
                Some((t, self.binop()?))
            };
            self.expect(Tok::LBrace, "`{`")?;
            let mut elements = Vec::new();
            if self.peek() != Some(&Tok::RBrace) {
                loop {
                    let atom = self.classical()?;
                    let condition = if self.eat(&Tok::Colon) { self.body()? } else { Vec::new() };
                    elements.push(ChoiceElement { atom, condition });
                    if !self.eat(&Tok::Semi) {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
            let upper = if matches!(self.peek(), Some(Tok::Op(_))) {
                let op = self.binop()?;
                Some((op, self.term()?))
            } else {
                None
            };
            return Ok(Head::Choice { lower, elements, upper });
        }
        let mut atoms = vec![self.classical()?];
        while self.eat(&Tok::Bar) {
            atoms.push(self.classical()?);
        }
        Ok(Head::Disjunction(atoms))
    }

    fn binop(&mut self) -> PResult<String> {
        match self.peek().cloned() {
            Some(Tok::Op(o)) => {
                self.pos += 1;
                Ok(o)
            }
            _ => self.error("expected comparison operator"),
        }
    }

    fn body(&mut self) -> PResult<Vec<Literal>> {
        let mut lits = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> PResult<Literal> {
        if self.eat(&Tok::Not) {
            return Ok(Literal::Not(self.classical()?));
        }
        let looks_atom = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Arith('-')), Some(Tok::Id(_))) => true,
            (Some(Tok::Id(_)), _) => true,
            _ => false,
        };
        if looks_atom {
            let save = self.pos;
            let atom = self.classical()?;
            if !matches!(self.peek(), Some(Tok::Op(_)) | Some(Tok::Arith(_))) {
                return Ok(Literal::Pos(atom));
            }
            self.pos = save;
        }
        let l = self.term()?;
        let op = self.binop()?;
        let r = self.term()?;
        Ok(Literal::Builtin(l, op, r))
    }

    fn classical(&mut self) -> PResult<Atom> {
        let strong_neg = self.eat(&Tok::Arith('-'));
        let predicate = match self.peek().cloned() {
            Some(Tok::Id(p)) => {
                self.pos += 1;
                p
            }
            _ => return self.error("expected predicate name"),
        };
        let args = if self.eat(&Tok::LParen) {
            let a = self.terms()?;
            self.expect(Tok::RParen, "`)`")?;
            a
        } else {
            Vec::new()
        };
        Ok(Atom {
            strong_neg,
            predicate,
            args,
        })
    }

    fn terms(&mut self) -> PResult<Vec<Term>> {
        let mut v = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            v.push(self.term()?);
        }
        Ok(v)
    }

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        while let Some(Tok::Arith(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Term::Bin(Box::new(lhs), c, Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Arith(c @ ('*' | '/' | '\\'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Term::Bin(Box::new(lhs), c, Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Arith('-')) {
            return Ok(Term::Neg(Box::new(self.unary()?)));
        }
        let Some(tok) = self.peek().cloned() else {
            return self.error("expected term");
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Num(n) => Term::Num(n),
            Tok::Str(s) => Term::Str(s),
            Tok::Var(v) => Term::Var(v),
            Tok::Anon => Term::Anon,
            Tok::Id(name) => {
                if self.eat(&Tok::LParen) {
                    let args = self.terms()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Term::Func(name, args)
                } else {
                    Term::Const(name)
                }
            }
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                t
            }
            _ => {
                self.pos -= 1;
                return self.error("expected term");
            }
        })
    }
}

fn positive_vars(lits: &[Literal]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for l in lits {
        if let Literal::Pos(a) = l {
            a.vars(&mut out);
        }
    }
    out
}

fn all_vars(lits: &[Literal]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    lits.iter().for_each(|l| l.vars(&mut out));
    out
}

fn check_safety(st: &Statement) -> Result<(), String> {
    let (body, mut needed) = match st {
        Statement::Rule { body, .. } | Statement::Weak { body, .. } => (body, all_vars(body)),
    };
    let bound = positive_vars(body);
    match st {
        Statement::Rule {
            head: Some(Head::Disjunction(atoms)),
            ..
        } => atoms.iter().for_each(|a| a.vars(&mut needed)),
        Statement::Rule {
            head: Some(Head::Choice { lower, elements, upper }),
            ..
        } => {
            for t in lower.iter().map(|(t, _)| t).chain(upper.iter().map(|(_, t)| t)) {
                t.vars(&mut needed);
            }
            for e in elements {
                let mut local = BTreeSet::new();
                e.atom.vars(&mut local);
                local.extend(all_vars(&e.condition));
                let mut ok = bound.clone();
                ok.extend(positive_vars(&e.condition));
                if let Some(v) = local.difference(&ok).next() {
                    return Err(format!("unsafe variable `{v}` in choice element"));
                }
            }
        }
        Statement::Weak {
            weight, level, terms, ..
        } => {
            weight.vars(&mut needed);
            level.iter().chain(terms).for_each(|t| t.vars(&mut needed));
        }
        Statement::Rule { head: None, .. } => {}
    }
    match needed.difference(&bound).next() {
        Some(v) => Err(format!("unsafe variable `{v}`")),
        None => Ok(()),
    }
}

/// Parses a program and checks that every rule is safe.
pub fn parse_program(text: &str) -> Result<Vec<Statement>, ValidationError> {
    let toks = tokenize(text)?;
    let lines = text.lines().count().max(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (lines, text.lines().last().map_or(1, |l| l.chars().count() + 1)),
    };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let (line, column) = (p.toks[p.pos].line, p.toks[p.pos].column);
        let st = p.statement()?;
        check_safety(&st).map_err(|message| ValidationError { line, column, message })?;
        out.push(st);
    }
    Ok(out)
}

/// Counts of what a valid program contains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramSummary {
    pub facts: usize,
    pub rules: usize,
    pub constraints: usize,
    pub weak_constraints: usize,
    /// Distinct numeric weak-constraint levels in order of first use.
    pub weak_levels: Vec<i64>,
}

pub fn validate_program(text: &str) -> Result<ProgramSummary, ValidationError> {
    let mut s = ProgramSummary::default();
    for st in parse_program(text)? {
        match &st {
            _ if st.as_fact().is_some() => s.facts += 1,
            Statement::Rule { head: None, .. } => s.constraints += 1,
            Statement::Rule { .. } => s.rules += 1,
            Statement::Weak { level, .. } => {
                s.weak_constraints += 1;
                let l = match level {
                    Some(Term::Num(n)) => *n,
                    None => 0,
                    Some(_) => continue,
                };
                if !s.weak_levels.contains(&l) {
                    s.weak_levels.push(l);
                }
            }
        }
    }
    Ok(s)
}
