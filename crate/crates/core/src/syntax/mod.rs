//! Terms, atoms and Horn clauses.
//!
//! Ground atoms carry their level (expression-tree height) and canonical
//! spelling, so that sets of ground atoms can be kept in the canonical order
//! `(level, predicate, spelling)` without recomputing either.

mod interpretation;
mod program;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use interpretation::{bounded_base, ground_terms_up_to, Interpretation};
pub use program::{Program, Signature};

use crate::error::{Error, Result};

/// Interned-ish symbol name; cloning is a reference-count bump.
pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Const(Name),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.into())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Self {
        debug_assert!(!args.is_empty());
        Term::App(functor.into(), args)
    }

    /// `f^k(t)`: the unary functor `f` applied `k` times to `t`.
    pub fn iterate(functor: &str, k: u64, inner: Term) -> Self {
        let name: Name = functor.into();
        (0..k).fold(inner, |t, _| Term::App(name.clone(), vec![t]))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Height of the expression tree. Constants and variables have height 1.
    pub fn height(&self) -> u32 {
        let mut max = 1;
        let mut stack = vec![(self, 1u32)];
        while let Some((t, h)) = stack.pop() {
            max = max.max(h);
            if let Term::App(_, args) = t {
                stack.extend(args.iter().map(|a| (a, h + 1)));
            }
        }
        max
    }

    /// Visits this term and every subterm, outermost first, left to right.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.visit(f);
            }
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        self.visit(&mut |t| {
            if let Term::Var(v) = t {
                out.insert(v);
            }
        });
    }

    fn rename(&self, map: &mut BTreeMap<Name, Name>) -> Term {
        match self {
            Term::Var(v) => {
                let next = map.len();
                let fresh = map
                    .entry(v.clone())
                    .or_insert_with(|| format!("V{next}").into());
                Term::Var(fresh.clone())
            }
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }

    fn write_to(&self, out: &mut String) {
        match self {
            Term::Var(n) | Term::Const(n) => out.push_str(n),
            Term::App(f, args) => {
                out.push_str(f);
                write_args(args, out);
            }
        }
    }
}

fn write_args(args: &[Term], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        a.write_to(out);
    }
    out.push(')');
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// An atom whose arguments may contain variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Level of the atom: one more than its highest argument; 1 for 0-ary atoms.
    /// Variables count as height 1, which only matters for diagnostics.
    pub fn level(&self) -> u32 {
        1 + self.args.iter().map(Term::height).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for a in &self.args {
            a.collect_vars(&mut out);
        }
        out
    }

    /// All subterms of all arguments.
    pub fn subterms(&self) -> HashSet<&Term> {
        let mut out = HashSet::new();
        for a in &self.args {
            a.visit(&mut |t| {
                out.insert(t);
            });
        }
        out
    }

    fn rename(&self, map: &mut BTreeMap<Name, Name>) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.rename(map)).collect(),
        }
    }

    fn write_to(&self, out: &mut String) {
        out.push_str(&self.predicate);
        if !self.args.is_empty() {
            write_args(&self.args, out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// A variable-free atom, i.e. an element of the Herbrand base.
///
/// Equality and hashing go through the canonical spelling; ordering is
/// `(level, predicate, spelling)`.
#[derive(Clone)]
pub struct GroundAtom(Arc<GroundInner>);

struct GroundInner {
    atom: Atom,
    level: u32,
    text: String,
}

impl GroundAtom {
    /// Fails with [`Error::NonGround`] when `atom` contains a variable.
    pub fn new(atom: Atom) -> Result<Self> {
        if !atom.is_ground() {
            return Err(Error::NonGround { atom: atom.to_string(), at: None });
        }
        Ok(Self::new_unchecked(atom))
    }

    pub(crate) fn new_unchecked(atom: Atom) -> Self {
        debug_assert!(atom.is_ground());
        let level = atom.level();
        let mut text = String::new();
        atom.write_to(&mut text);
        GroundAtom(Arc::new(GroundInner { atom, level, text }))
    }

    pub fn predicate(&self) -> &str {
        &self.0.atom.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.0.atom.args
    }

    pub fn as_atom(&self) -> &Atom {
        &self.0.atom
    }

    pub fn level(&self) -> u32 {
        self.0.level
    }

    pub fn as_str(&self) -> &str {
        &self.0.text
    }

    /// Every subterm of every argument, closed under the subterm relation.
    pub fn subterms(&self) -> BTreeSet<Term> {
        self.0.atom.subterms().into_iter().cloned().collect()
    }
}

impl PartialEq for GroundAtom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.text == other.0.text
    }
}

impl Eq for GroundAtom {}

impl Hash for GroundAtom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.text.hash(state);
    }
}

impl Ord for GroundAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .level
            .cmp(&other.0.level)
            .then_with(|| self.0.atom.predicate.cmp(&other.0.atom.predicate))
            .then_with(|| self.0.text.cmp(&other.0.text))
    }
}

impl PartialOrd for GroundAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.text)
    }
}

impl fmt::Debug for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroundAtom({})", self.0.text)
    }
}

/// `head :- body.` with exactly one head atom; an empty body is a fact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HornClause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl HornClause {
    pub fn new(head: Atom, body: Vec<Atom>) -> Self {
        HornClause { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        HornClause { head, body: Vec::new() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn body_vars(&self) -> BTreeSet<&str> {
        self.body.iter().flat_map(|b| b.vars()).collect()
    }

    /// The clause with its variables renamed to `V0, V1, ...` in order of
    /// first occurrence (head first, then body left to right). Two clauses
    /// are variants of each other iff their normalized forms are equal.
    pub fn normalized(&self) -> HornClause {
        let mut map = BTreeMap::new();
        let head = self.head.rename(&mut map);
        let body = self.body.iter().map(|b| b.rename(&mut map)).collect();
        HornClause { head, body }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter())
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}
