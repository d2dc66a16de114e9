use std::collections::BTreeMap;

use crate::arena::MonoId;
use crate::order::Var;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbiguityKind {
    /// `a·lm(f) = lm(g)·d`: a suffix of `lm(g)` is a prefix of `lm(f)`.
    LeftOverlap,
    /// `lm(f)·b = c·lm(g)`: a suffix of `lm(f)` is a prefix of `lm(g)`.
    RightOverlap,
    /// `lm(f) = c·lm(g)·d`.
    FContainsG,
    /// `a·lm(f)·b = lm(g)`.
    GContainsF,
}

/// `(a⊗b, c⊗d, f, g)` with `a·lm(f)·b = c·lm(g)·d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambiguity {
    pub kind: AmbiguityKind,
    pub a: MonoId,
    pub b: MonoId,
    pub c: MonoId,
    pub d: MonoId,
    pub f: usize,
    pub g: usize,
    pub degree: usize,
}

/// Word-level description of an ambiguity before its cofactors are interned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityShape {
    pub kind: AmbiguityKind,
    pub a: Vec<Var>,
    pub b: Vec<Var>,
    pub c: Vec<Var>,
    pub d: Vec<Var>,
}

impl AmbiguityShape {
    pub fn degree(&self, lm_f: &[Var]) -> usize {
        self.a.len() + lm_f.len() + self.b.len()
    }
}

/// All ambiguities of `f` (leading word `u`) and `g` (leading word `v`).
///
/// For `f = g` only the left-overlap form is produced: the right overlaps are
/// the same S-polynomials up to sign.
pub fn overlap_shapes(u: &[Var], v: &[Var], same: bool) -> Vec<AmbiguityShape> {
    let mut out = Vec::new();
    // a·u = v·d with 1 ≤ |a| < |v| and d nonempty
    for alen in 1..v.len() {
        let shared = v.len() - alen;
        if shared < u.len() && u[..shared] == v[alen..] {
            out.push(AmbiguityShape {
                kind: AmbiguityKind::LeftOverlap,
                a: v[..alen].to_vec(),
                b: Vec::new(),
                c: Vec::new(),
                d: u[shared..].to_vec(),
            });
        }
    }
    if same {
        return out;
    }
    // u·b = c·v with 1 ≤ |b| < |v| and c nonempty
    for blen in 1..v.len() {
        let shared = v.len() - blen;
        if shared < u.len() && u[u.len() - shared..] == v[..shared] {
            out.push(AmbiguityShape {
                kind: AmbiguityKind::RightOverlap,
                a: Vec::new(),
                b: v[shared..].to_vec(),
                c: u[..u.len() - shared].to_vec(),
                d: Vec::new(),
            });
        }
    }
    // u = c·v·d
    if v.len() <= u.len() {
        for start in 0..=(u.len() - v.len()) {
            if u[start..start + v.len()] == *v {
                out.push(AmbiguityShape {
                    kind: AmbiguityKind::FContainsG,
                    a: Vec::new(),
                    b: Vec::new(),
                    c: u[..start].to_vec(),
                    d: u[start + v.len()..].to_vec(),
                });
            }
        }
    }
    // a·u·b = v
    if u.len() <= v.len() {
        for start in 0..=(v.len() - u.len()) {
            if v[start..start + u.len()] == *u {
                out.push(AmbiguityShape {
                    kind: AmbiguityKind::GContainsF,
                    a: v[..start].to_vec(),
                    b: v[start + u.len()..].to_vec(),
                    c: Vec::new(),
                    d: Vec::new(),
                });
            }
        }
    }
    out
}

/// Pending ambiguities keyed by degree. Ambiguities above the degree bound
/// are counted and dropped.
#[derive(Debug, Clone, Default)]
pub struct PairQueue {
    by_degree: BTreeMap<usize, Vec<Ambiguity>>,
    degree_bound: Option<usize>,
    discarded: usize,
}

impl PairQueue {
    pub fn new(degree_bound: Option<usize>) -> Self {
        PairQueue {
            by_degree: BTreeMap::new(),
            degree_bound,
            discarded: 0,
        }
    }

    /// Returns whether the ambiguity was kept.
    pub fn push(&mut self, amb: Ambiguity) -> bool {
        if self.degree_bound.is_some_and(|bound| amb.degree > bound) {
            self.discarded += 1;
            return false;
        }
        self.by_degree.entry(amb.degree).or_default().push(amb);
        true
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.by_degree.keys().next().copied()
    }

    /// Removes and returns all ambiguities of minimal degree.
    pub fn pop_min(&mut self) -> Option<(usize, Vec<Ambiguity>)> {
        self.by_degree.pop_first()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Ambiguity) -> bool) -> usize {
        let mut removed = 0;
        for list in self.by_degree.values_mut() {
            let before = list.len();
            list.retain(&mut keep);
            removed += before - list.len();
        }
        self.by_degree.retain(|_, list| !list.is_empty());
        removed
    }

    pub fn len(&self) -> usize {
        self.by_degree.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_degree.is_empty()
    }

    /// Number of ambiguities dropped by the degree bound.
    pub fn discarded(&self) -> usize {
        self.discarded
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ambiguity> {
        self.by_degree.values().flatten()
    }
}
