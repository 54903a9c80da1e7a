use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{Atom, GroundAtom, HornClause, Name, Term};
use crate::error::{Error, Position, Result, SymbolKind};

/// Constants, function symbols and predicates in use, with their arities.
///
/// Constants share the function-symbol namespace as 0-ary functors, so `a`
/// and `a(b)` in the same program is an arity clash.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub constants: BTreeSet<Name>,
    pub functors: BTreeMap<Name, usize>,
    pub predicates: BTreeMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.constants.insert(name.into());
        self
    }

    pub fn with_functor(mut self, name: &str, arity: usize) -> Self {
        self.functors.insert(name.into(), arity);
        self
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.predicates.insert(name.into(), arity);
        self
    }

    fn function_arity(&self, name: &str) -> Option<usize> {
        if self.constants.contains(name) {
            Some(0)
        } else {
            self.functors.get(name).copied()
        }
    }

    fn add_function(&mut self, name: &Name, arity: usize, at: Option<Position>) -> Result<()> {
        match self.function_arity(name) {
            Some(expected) if expected != arity => Err(Error::Arity {
                kind: SymbolKind::Function,
                symbol: name.to_string(),
                expected,
                found: arity,
                at,
            }),
            Some(_) => Ok(()),
            None => {
                if arity == 0 {
                    self.constants.insert(name.clone());
                } else {
                    self.functors.insert(name.clone(), arity);
                }
                Ok(())
            }
        }
    }

    pub(crate) fn add_term(&mut self, term: &Term, at: Option<Position>) -> Result<()> {
        match term {
            Term::Var(_) => Ok(()),
            Term::Const(c) => self.add_function(c, 0, at),
            Term::App(f, args) => {
                self.add_function(f, args.len(), at)?;
                args.iter().try_for_each(|a| self.add_term(a, at))
            }
        }
    }

    pub(crate) fn add_atom(&mut self, atom: &Atom, at: Option<Position>) -> Result<()> {
        match self.predicates.get(&atom.predicate) {
            Some(&expected) if expected != atom.arity() => {
                return Err(Error::Arity {
                    kind: SymbolKind::Predicate,
                    symbol: atom.predicate.to_string(),
                    expected,
                    found: atom.arity(),
                    at,
                })
            }
            Some(_) => {}
            None => {
                self.predicates.insert(atom.predicate.clone(), atom.arity());
            }
        }
        atom.args.iter().try_for_each(|t| self.add_term(t, at))
    }

    pub(crate) fn add_clause(&mut self, clause: &HornClause, at: Option<Position>) -> Result<()> {
        clause.atoms().try_for_each(|a| self.add_atom(a, at))
    }

    /// Union of two signatures; fails on an arity clash.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for c in &other.constants {
            out.add_function(c, 0, None)?;
        }
        for (f, &n) in &other.functors {
            out.add_function(f, n, None)?;
        }
        for (p, &n) in &other.predicates {
            match out.predicates.get(p) {
                Some(&expected) if expected != n => {
                    return Err(Error::Arity {
                        kind: SymbolKind::Predicate,
                        symbol: p.to_string(),
                        expected,
                        found: n,
                        at: None,
                    })
                }
                Some(_) => {}
                None => {
                    out.predicates.insert(p.clone(), n);
                }
            }
        }
        Ok(out)
    }

    pub fn of_atoms<'a>(atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Result<Signature> {
        let mut sig = Signature::new();
        for a in atoms {
            sig.add_atom(a.as_atom(), None)?;
        }
        Ok(sig)
    }

    pub fn max_predicate_arity(&self) -> usize {
        self.predicates.values().copied().max().unwrap_or(0)
    }
}

/// A finite Horn program. Clauses that are variants of each other (equal up
/// to variable renaming) are stored once, keeping the first spelling.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<HornClause>,
    signature: Signature,
}

impl Program {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(clauses: impl IntoIterator<Item = HornClause>) -> Result<Self> {
        Self::with_positions(clauses.into_iter().map(|c| (c, None)))
    }

    pub(crate) fn with_positions(
        clauses: impl IntoIterator<Item = (HornClause, Option<Position>)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut signature = Signature::new();
        let mut kept = Vec::new();
        for (clause, at) in clauses {
            signature.add_clause(&clause, at)?;
            if seen.insert(clause.normalized()) {
                kept.push(clause);
            }
        }
        Ok(Program { clauses: kept, signature })
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn facts(&self) -> impl Iterator<Item = &HornClause> {
        self.clauses.iter().filter(|c| c.is_fact())
    }

    pub fn rules(&self) -> impl Iterator<Item = &HornClause> {
        self.clauses.iter().filter(|c| !c.is_fact())
    }

    /// Normalized clause set; two programs are equal as clause sets iff
    /// these are equal.
    pub fn clause_set(&self) -> BTreeSet<HornClause> {
        self.clauses.iter().map(HornClause::normalized).collect()
    }

    pub fn contains(&self, clause: &HornClause) -> bool {
        let n = clause.normalized();
        self.clauses.iter().any(|c| c.normalized() == n)
    }

    /// Highest level among ground facts, if there are any.
    pub fn max_fact_level(&self) -> Option<u32> {
        self.facts().filter(|c| c.head.is_ground()).map(|c| c.head.level()).max()
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clause_set() == other.clause_set()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variants_are_stored_once() {
        let c = |v: &str| {
            HornClause::new(
                Atom::new("p", vec![Term::var(v)]),
                vec![Atom::new("p", vec![Term::app("f", vec![Term::var(v)])])],
            )
        };
        let p = Program::new([c("X"), c("Y"), c("X")]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.clauses()[0], c("X"));
    }

    #[test]
    fn arity_clash_names_symbol() {
        let c1 = HornClause::fact(Atom::new("p", vec![Term::constant("a")]));
        let c2 = HornClause::fact(Atom::new("p", vec![Term::constant("a"), Term::constant("b")]));
        let err = Program::new([c1.clone(), c2]).unwrap_err();
        assert!(matches!(err, Error::Arity { ref symbol, expected: 1, found: 2, .. } if symbol == "p"));

        let c3 = HornClause::fact(Atom::new("q", vec![Term::app("a", vec![Term::constant("b")])]));
        let err = Program::new([c1, c3]).unwrap_err();
        assert!(matches!(err, Error::Arity { kind: SymbolKind::Function, ref symbol, .. } if symbol == "a"));
    }

    #[test]
    fn signature_collects_symbols() {
        let c = HornClause::new(
            Atom::new("p", vec![Term::app("f", vec![Term::var("X")])]),
            vec![Atom::new("q", vec![Term::var("X"), Term::constant("a")])],
        );
        let p = Program::new([c]).unwrap();
        let sig = p.signature();
        assert_eq!(sig.constants.len(), 1);
        assert_eq!(sig.functors.get("f"), Some(&1));
        assert_eq!(sig.predicates.get("q"), Some(&2));
        assert_eq!(sig.max_predicate_arity(), 2);
    }

    #[test]
    fn merge_detects_clash() {
        let a = Signature::new().with_constant("a").with_predicate("p", 1);
        let b = Signature::new().with_functor("f", 1).with_predicate("p", 2);
        assert!(a.merge(&b).is_err());
        let c = Signature::new().with_functor("f", 1).with_predicate("q", 0);
        let m = a.merge(&c).unwrap();
        assert_eq!(m.predicates.len(), 2);
    }
}
