//! Recursive-descent parser for the program, interpretation and template
//! text formats.
//!
//! ```text
//! clause   := atom "." | atom ":-" atomlist "."
//! atomlist := atom ("," atom)*
//! atom     := pred | pred "(" term ("," term)* ")"
//! term     := VARIABLE | CONSTANT | functor "(" term ("," term)* ")"
//!           | functor "^" exponent "(" term ")"
//! exponent := INTEGER | "{" "n" ("+" INTEGER)? "}"     (braces: templates only)
//! ```
//!
//! `%` starts a comment running to the end of the line.

use crate::error::{Error, Position, Result};
use crate::syntax::{Atom, GroundAtom, HornClause, Interpretation, Name, Program, Signature, Term};

/// Largest accepted `f^k` exponent. Deeper terms overflow recursive printers.
pub const MAX_EXPONENT: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Neck,
    Caret,
    Plus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Position)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }
    while let Some(&c) = chars.peek() {
        let at = Position { line, column };
        match c {
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            c if c.is_whitespace() => {
                bump!();
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let tok = if c.is_ascii_lowercase() { Tok::Lower(s) } else { Tok::Upper(s) };
                out.push((tok, at));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let n = s.parse().map_err(|_| Error::Syntax {
                    at,
                    message: format!("integer literal `{s}` is too large"),
                })?;
                out.push((Tok::Int(n), at));
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    out.push((Tok::Neck, at));
                } else {
                    return Err(Error::Syntax { at, message: "expected `:-`".into() });
                }
            }
            _ => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '^' => Tok::Caret,
                    '+' => Tok::Plus,
                    other => {
                        return Err(Error::Syntax {
                            at,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                };
                bump!();
                out.push((tok, at));
            }
        }
    }
    out.push((Tok::Eof, Position { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    pos: usize,
    /// Value substituted for the meta exponent `n`; `None` outside templates.
    index: Option<u64>,
    used_index: bool,
    /// Counter naming each `_` as a fresh variable.
    anonymous: usize,
}

impl Parser {
    fn new(text: &str, index: Option<u64>) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, index, used_index: false, anonymous: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> Position {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        Error::Syntax {
            at: self.at(),
            message: format!("expected {what}, found {}", self.peek().describe()),
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn clause(&mut self) -> Result<(HornClause, Position)> {
        let at = self.at();
        if *self.peek() == Tok::Neck {
            return Err(Error::GoalClause { at });
        }
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.eat(&Tok::Neck) {
            body.push(self.atom()?);
            while self.eat(&Tok::Comma) {
                body.push(self.atom()?);
            }
        }
        self.expect(Tok::Dot, "`.` ending the clause")?;
        Ok((HornClause::new(head, body), at))
    }

    fn atom(&mut self) -> Result<Atom> {
        let predicate = match self.peek() {
            Tok::Lower(s) => s.clone(),
            _ => return Err(self.unexpected("a predicate name")),
        };
        self.advance();
        let args = if *self.peek() == Tok::LParen { self.arglist()? } else { Vec::new() };
        Ok(Atom::new(&predicate, args))
    }

    fn arglist(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Upper(v) if v == "_" => {
                self.advance();
                self.anonymous += 1;
                Ok(Term::Var(format!("_{}", self.anonymous).into()))
            }
            Tok::Upper(v) => {
                self.advance();
                Ok(Term::Var(v.into()))
            }
            Tok::Lower(name) => {
                self.advance();
                match self.peek() {
                    Tok::LParen => Ok(Term::App(name.into(), self.arglist()?)),
                    Tok::Caret => {
                        self.advance();
                        let exp_at = self.at();
                        let k = self.exponent()?;
                        if k == 0 {
                            return Err(Error::Syntax {
                                at: exp_at,
                                message: "exponent must be a positive integer".into(),
                            });
                        }
                        if k > MAX_EXPONENT {
                            return Err(Error::Syntax {
                                at: exp_at,
                                message: format!("exponent {k} exceeds the limit {MAX_EXPONENT}"),
                            });
                        }
                        let args_at = self.at();
                        let mut args = self.arglist()?;
                        if args.len() != 1 {
                            return Err(Error::Syntax {
                                at: args_at,
                                message: format!("`{name}^k(..)` takes exactly one argument"),
                            });
                        }
                        let inner = args.pop().expect("one argument");
                        let f: Name = name.into();
                        Ok((0..k).fold(inner, |t, _| Term::App(f.clone(), vec![t])))
                    }
                    _ => Ok(Term::Const(name.into())),
                }
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn exponent(&mut self) -> Result<u64> {
        match self.peek().clone() {
            Tok::Int(k) => {
                self.advance();
                Ok(k)
            }
            Tok::LBrace => {
                let at = self.at();
                self.advance();
                match self.peek() {
                    Tok::Lower(s) if s == "n" => {
                        self.advance();
                    }
                    _ => return Err(self.unexpected("the sequence index `n`")),
                }
                let offset = if self.eat(&Tok::Plus) {
                    match self.advance() {
                        Tok::Int(c) => c,
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("an integer offset"));
                        }
                    }
                } else {
                    0
                };
                self.expect(Tok::RBrace, "`}`")?;
                let n = self.index.ok_or_else(|| Error::Syntax {
                    at,
                    message: "the meta exponent `{n}` is only allowed in sequence templates".into(),
                })?;
                self.used_index = true;
                n.checked_add(offset).ok_or_else(|| Error::Syntax {
                    at,
                    message: "exponent overflow".into(),
                })
            }
            _ => Err(self.unexpected("an exponent")),
        }
    }
}

type Located = Vec<(HornClause, Option<Position>)>;

fn clauses(text: &str, index: Option<u64>) -> Result<(Located, bool)> {
    let mut p = Parser::new(text, index)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        let (c, at) = p.clause()?;
        out.push((c, Some(at)));
    }
    Ok((out, p.used_index))
}

/// Parses a whole program. Variant clauses are collapsed and arities are
/// checked across the program.
pub fn parse_program(text: &str) -> Result<Program> {
    let (cs, _) = clauses(text, None)?;
    Program::with_positions(cs)
}

/// Parses text that must contain exactly one clause.
pub fn parse_clause(text: &str) -> Result<HornClause> {
    let (mut cs, _) = clauses(text, None)?;
    single(&mut cs, text)
}

fn single(cs: &mut Vec<(HornClause, Option<Position>)>, text: &str) -> Result<HornClause> {
    match cs.len() {
        1 => {
            let (c, _) = cs.pop().expect("one clause");
            // arity consistency within the clause
            Signature::new().add_clause(&c, None)?;
            Ok(c)
        }
        n => Err(Error::Syntax {
            at: Position { line: 1, column: 1 },
            message: format!("expected exactly one clause in `{}`, found {n}", text.trim()),
        }),
    }
}

/// Parses a clause template, substituting `index` for the meta exponent `n`.
/// Also reports whether the template mentions `n` at all.
pub(crate) fn parse_template(text: &str, index: u64) -> Result<(HornClause, bool)> {
    let (mut cs, used) = clauses(text, Some(index))?;
    Ok((single(&mut cs, text)?, used))
}

/// Parses one atom, with an optional trailing `.`.
pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut p = Parser::new(text, None)?;
    let atom = p.atom()?;
    p.eat(&Tok::Dot);
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }
    Signature::new().add_atom(&atom, None)?;
    Ok(atom)
}

pub fn parse_ground_atom(text: &str) -> Result<GroundAtom> {
    GroundAtom::new(parse_atom(text)?)
}

/// Parses an interpretation file: ground atoms separated by whitespace or
/// newlines, each optionally terminated by `.`.
pub fn parse_interpretation(text: &str) -> Result<Interpretation> {
    let mut p = Parser::new(text, None)?;
    let mut sig = Signature::new();
    let mut atoms = Vec::new();
    while !p.at_eof() {
        let at = p.at();
        let atom = p.atom()?;
        p.eat(&Tok::Dot);
        if !atom.is_ground() {
            return Err(Error::NonGround { atom: atom.to_string(), at: Some(at) });
        }
        sig.add_atom(&atom, Some(at))?;
        atoms.push(GroundAtom::new_unchecked(atom));
    }
    Ok(Interpretation::new(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rule_and_fact() {
        let p = parse_program("p(f(X)) :- p(X).\np(f(a)).").unwrap();
        assert_eq!(p.rules().count(), 1);
        assert_eq!(p.facts().count(), 1);
        assert_eq!(p.clauses()[1].to_string(), "p(f(a)).");
    }

    #[test]
    fn empty_text_is_empty_program() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn rule_without_facts() {
        let p = parse_program("p(X) :- p(f(X)).").unwrap();
        assert_eq!(p.rules().count(), 1);
        assert_eq!(p.facts().count(), 0);
    }

    #[test]
    fn exponent_shorthand_expands() {
        let c = parse_clause("p(f^3(a)).").unwrap();
        assert_eq!(c.to_string(), "p(f(f(f(a)))).");
        let c = parse_clause("p(f^2(X)) :- p(X).").unwrap();
        assert_eq!(c.to_string(), "p(f(f(X))) :- p(X).");
    }

    #[test]
    fn zero_exponent_rejected() {
        assert!(matches!(parse_clause("p(f^0(a))."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn shorthand_needs_one_argument() {
        assert!(matches!(parse_clause("p(g^2(a,b))."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_program("p(a).\nq(b) :- p(a)\n").unwrap_err();
        match err {
            Error::Syntax { at, .. } => assert_eq!(at, Position { line: 3, column: 1 }),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_program("p(a).\n  p(#).").unwrap_err();
        assert_eq!(err.position(), Some(Position { line: 2, column: 5 }));
    }

    #[test]
    fn goal_clause_rejected() {
        let err = parse_program("p(a).\n:- p(a).").unwrap_err();
        assert_eq!(err, Error::GoalClause { at: Position { line: 2, column: 1 } });
    }

    #[test]
    fn arity_error_names_symbol_and_position() {
        let err = parse_program("p(a).\np(a, b).").unwrap_err();
        match err {
            Error::Arity { symbol, at, .. } => {
                assert_eq!(symbol, "p");
                assert_eq!(at, Some(Position { line: 2, column: 1 }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_zero_ary_atoms() {
        let p = parse_program("q. % a fact\nr :- q, s(a).\ns(a).").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.clauses()[1].to_string(), "r :- q, s(a).");
    }

    #[test]
    fn meta_exponent_only_in_templates() {
        assert!(parse_clause("p(f^{n}(a)).").is_err());
        let (c, used) = parse_template("p(f^{n}(a)).", 3).unwrap();
        assert!(used);
        assert_eq!(c.to_string(), "p(f(f(f(a)))).");
        let (c, used) = parse_template("p(f^{n+2}(a)) :- q.", 1).unwrap();
        assert!(used);
        assert_eq!(c.head.to_string(), "p(f(f(f(a))))");
        let (_, used) = parse_template("p(f^2(a)).", 1).unwrap();
        assert!(!used);
    }

    #[test]
    fn interpretation_file() {
        let i = parse_interpretation("% stage\np(f(a))\np(a).\np(f^2(a))\n").unwrap();
        let got: Vec<_> = i.iter().map(|a| a.to_string()).collect();
        assert_eq!(got, ["p(a)", "p(f(a))", "p(f(f(a)))"]);
        let err = parse_interpretation("p(a)\np(X)").unwrap_err();
        assert!(matches!(err, Error::NonGround { at: Some(Position { line: 2, column: 1 }), .. }));
    }

    #[test]
    fn ground_atom_query() {
        let q = parse_ground_atom("p(f^3(a))").unwrap();
        assert_eq!(q.level(), 5);
        assert!(parse_ground_atom("p(X)").is_err());
        assert!(parse_ground_atom("p(a) q(b)").is_err());
    }
}
