use std::collections::BTreeSet;
use std::fmt;

use super::{Atom, GroundAtom, Signature, Term};
use crate::error::{Error, Result};

/// A finite Herbrand interpretation: a set of ground atoms, optionally marked
/// as the truncation of a larger interpretation to atoms of level ≤ `depth_bound`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    atoms: BTreeSet<GroundAtom>,
    depth_bound: Option<u32>,
}

impl Interpretation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(atoms: impl IntoIterator<Item = GroundAtom>) -> Self {
        Interpretation { atoms: atoms.into_iter().collect(), depth_bound: None }
    }

    /// Fails with [`Error::AboveDepth`] if any atom has level above `depth`.
    pub fn with_depth_bound(atoms: impl IntoIterator<Item = GroundAtom>, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidDepth(depth));
        }
        let atoms: BTreeSet<_> = atoms.into_iter().collect();
        if let Some(a) = atoms.iter().find(|a| a.level() > depth) {
            return Err(Error::AboveDepth { atom: a.to_string(), level: a.level(), depth });
        }
        Ok(Interpretation { atoms, depth_bound: Some(depth) })
    }

    pub(crate) fn from_parts(atoms: BTreeSet<GroundAtom>, depth_bound: Option<u32>) -> Self {
        debug_assert!(depth_bound.is_none_or(|d| atoms.iter().all(|a| a.level() <= d)));
        Interpretation { atoms, depth_bound }
    }

    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.atoms
    }

    pub fn into_atoms(self) -> BTreeSet<GroundAtom> {
        self.atoms
    }

    pub fn depth_bound(&self) -> Option<u32> {
        self.depth_bound
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    /// Highest atom level present, 0 for the empty set.
    pub fn max_level(&self) -> u32 {
        self.atoms.iter().map(GroundAtom::level).max().unwrap_or(0)
    }

    /// Atoms of level ≤ `depth`, marked with that bound.
    pub fn truncate(&self, depth: u32) -> Interpretation {
        Interpretation {
            atoms: self.atoms.iter().filter(|a| a.level() <= depth).cloned().collect(),
            depth_bound: Some(self.depth_bound.map_or(depth, |d| d.min(depth))),
        }
    }

    pub fn intersection(&self, other: &Interpretation) -> Interpretation {
        Interpretation {
            atoms: self.atoms.intersection(&other.atoms).cloned().collect(),
            depth_bound: min_bound(self.depth_bound, other.depth_bound),
        }
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        Interpretation {
            atoms: self.atoms.union(&other.atoms).cloned().collect(),
            depth_bound: min_bound(self.depth_bound, other.depth_bound),
        }
    }

    /// `self` with membership of `atom` flipped.
    pub fn toggle(&self, atom: &GroundAtom) -> Interpretation {
        let mut atoms = self.atoms.clone();
        if !atoms.remove(atom) {
            atoms.insert(atom.clone());
        }
        Interpretation { atoms, depth_bound: self.depth_bound }
    }

    pub fn symmetric_difference<'a>(
        &'a self,
        other: &'a Interpretation,
    ) -> impl Iterator<Item = &'a GroundAtom> {
        self.atoms.symmetric_difference(&other.atoms)
    }
}

fn min_bound(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

impl FromIterator<GroundAtom> for Interpretation {
    fn from_iter<T: IntoIterator<Item = GroundAtom>>(iter: T) -> Self {
        Interpretation::new(iter)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

/// All ground terms of height ≤ `max_height` over the signature, grouped by
/// height and sorted by spelling within a height.
pub fn ground_terms_up_to(sig: &Signature, max_height: u32) -> Vec<Term> {
    let mut all: Vec<Term> = Vec::new();
    if max_height == 0 {
        return all;
    }
    let mut layer: Vec<Term> = sig.constants.iter().map(|c| Term::Const(c.clone())).collect();
    // index in `all` where the previous layer starts
    let mut prev_start = 0;
    all.extend(layer.iter().cloned());
    for _ in 1..max_height {
        layer.clear();
        for (f, &arity) in &sig.functors {
            for_each_tuple(&all, arity, &mut |tuple| {
                // at least one argument must come from the newest layer
                if tuple.iter().any(|&i| i >= prev_start) {
                    layer.push(Term::App(f.clone(), tuple.iter().map(|&i| all[i].clone()).collect()));
                }
            });
        }
        if layer.is_empty() {
            break;
        }
        layer.sort_by_cached_key(|t| t.to_string());
        prev_start = all.len();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Calls `f` on every index tuple of length `arity` over `0..pool.len()`.
fn for_each_tuple<T>(pool: &[T], arity: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx = vec![0usize; arity];
    if arity == 0 {
        f(&idx);
        return;
    }
    if pool.is_empty() {
        return;
    }
    loop {
        f(&idx);
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < pool.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// The finite slice `HB_{≤depth}` of the Herbrand base: every ground atom over
/// the signature whose level is at most `depth`, in canonical order.
pub fn bounded_base(sig: &Signature, depth: u32) -> Result<Interpretation> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    if sig.constants.is_empty() {
        return Err(Error::NoConstants);
    }
    let terms = ground_terms_up_to(sig, depth - 1);
    let mut atoms = BTreeSet::new();
    for (p, &arity) in &sig.predicates {
        for_each_tuple(&terms, arity, &mut |tuple| {
            let args = tuple.iter().map(|&i| terms[i].clone()).collect();
            atoms.insert(GroundAtom::new_unchecked(Atom { predicate: p.clone(), args }));
        });
    }
    Ok(Interpretation { atoms, depth_bound: Some(depth) })
}
