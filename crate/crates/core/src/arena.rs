//! Append-only interning stores for monomials, polynomials and coefficient
//! sequences.
//!
//! Every element is identified by a stable index. New elements are built in
//! a scratch region at the tip of their store; if an equal element is already
//! known the scratch is discarded, otherwise it is committed. Polynomials keep
//! their monomials in strictly descending order and refer to a shared
//! coefficient sequence, so monomial multiples of one polynomial share their
//! coefficients.

use std::cmp::Ordering;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::order::{MonomialOrder, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffSeqId(pub u32);

/// Interned words over the variables `1..=nvars`.
#[derive(Debug, Clone)]
pub struct MonomialStore {
    nvars: usize,
    letters: Vec<Var>,
    /// `offsets[i]..offsets[i + 1]` spells monomial `i`.
    offsets: Vec<usize>,
    index: FxHashMap<Box<[Var]>, MonoId>,
}

impl MonomialStore {
    pub fn new(nvars: usize) -> Self {
        MonomialStore {
            nvars,
            letters: Vec::with_capacity(1 << 12),
            offsets: vec![0],
            index: FxHashMap::default(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn tip(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn word(&self, m: MonoId) -> &[Var] {
        let i = m.0 as usize;
        &self.letters[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, m: MonoId) -> usize {
        let i = m.0 as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn intern(&mut self, word: &[Var]) -> Result<MonoId> {
        if let Some(&bad) = word
            .iter()
            .find(|&&v| v == 0 || v as usize > self.nvars)
        {
            return Err(Error::Input(format!("undeclared variable id {bad}")));
        }
        self.letters.truncate(self.tip());
        self.letters.extend_from_slice(word);
        Ok(self.finish_scratch())
    }

    pub fn one(&mut self) -> MonoId {
        self.intern(&[]).expect("empty word is valid")
    }

    /// Concatenation `a·b`.
    pub fn multiply(&mut self, a: MonoId, b: MonoId) -> MonoId {
        let one = self.empty_id();
        self.multiply3(a, b, one)
    }

    /// Concatenation `a·m·b`, assembled in the scratch region.
    pub fn multiply3(&mut self, a: MonoId, m: MonoId, b: MonoId) -> MonoId {
        let tip = self.tip();
        self.letters.truncate(tip);
        for id in [a, m, b] {
            let i = id.0 as usize;
            let (start, end) = (self.offsets[i], self.offsets[i + 1]);
            self.letters.extend_from_within(start..end);
        }
        self.finish_scratch()
    }

    /// Index of the empty word if it has been interned, else a fresh one.
    fn empty_id(&mut self) -> MonoId {
        match self.index.get(&[][..]) {
            Some(&id) => id,
            None => self.one(),
        }
    }

    /// Looks up the scratch word; commits it when new, discards it otherwise.
    fn finish_scratch(&mut self) -> MonoId {
        let tip = self.tip();
        if let Some(&id) = self.index.get(&self.letters[tip..]) {
            self.letters.truncate(tip);
            return id;
        }
        let id = MonoId(self.len() as u32);
        self.index
            .insert(self.letters[tip..].to_vec().into_boxed_slice(), id);
        self.offsets.push(self.letters.len());
        id
    }

    pub fn lookup(&self, word: &[Var]) -> Option<MonoId> {
        self.index.get(word).copied()
    }
}

/// Deduplicated coefficient sequences.
#[derive(Debug, Clone)]
pub struct CoefficientPool<C> {
    seqs: Vec<Box<[C]>>,
    index: FxHashMap<Box<[C]>, CoeffSeqId>,
}

impl<C: Clone + Eq + Hash> Default for CoefficientPool<C> {
    fn default() -> Self {
        CoefficientPool {
            seqs: Vec::new(),
            index: FxHashMap::default(),
        }
    }
}

impl<C: Clone + Eq + Hash> CoefficientPool<C> {
    pub fn intern(&mut self, coeffs: &[C]) -> CoeffSeqId {
        if let Some(&id) = self.index.get(coeffs) {
            return id;
        }
        let id = CoeffSeqId(self.seqs.len() as u32);
        let boxed: Box<[C]> = coeffs.into();
        self.index.insert(boxed.clone(), id);
        self.seqs.push(boxed);
        id
    }

    pub fn get(&self, id: CoeffSeqId) -> &[C] {
        &self.seqs[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PolyEntry {
    start: u32,
    len: u32,
    coeffs: CoeffSeqId,
}

/// Monomials, polynomials and coefficients under one monomial ordering.
#[derive(Debug, Clone)]
pub struct Arena<C> {
    pub monomials: MonomialStore,
    order: MonomialOrder,
    coeffs: CoefficientPool<C>,
    terms: Vec<MonoId>,
    polys: Vec<PolyEntry>,
    poly_index: FxHashMap<(Box<[MonoId]>, CoeffSeqId), PolyId>,
}

impl<C: Clone + Eq + Hash> Arena<C> {
    pub fn new(order: MonomialOrder) -> Self {
        let mut monomials = MonomialStore::new(order.nvars());
        monomials.one();
        Arena {
            monomials,
            order,
            coeffs: CoefficientPool::default(),
            terms: Vec::new(),
            polys: Vec::new(),
            poly_index: FxHashMap::default(),
        }
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn coefficient_pool(&self) -> &CoefficientPool<C> {
        &self.coeffs
    }

    pub fn one(&mut self) -> MonoId {
        self.monomials.one()
    }

    pub fn intern_monomial(&mut self, word: &[Var]) -> Result<MonoId> {
        self.monomials.intern(word)
    }

    pub fn multiply_monomials(&mut self, a: MonoId, b: MonoId) -> MonoId {
        self.monomials.multiply(a, b)
    }

    pub fn word(&self, m: MonoId) -> &[Var] {
        self.monomials.word(m)
    }

    pub fn compare(&self, a: MonoId, b: MonoId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.order
            .compare(self.monomials.word(a), self.monomials.word(b))
    }

    pub fn poly_count(&self) -> usize {
        self.polys.len()
    }

    /// Interns `Σ c·m`. Terms are sorted strictly descending; coefficients must
    /// be nonzero (checked by the caller's field) and monomials distinct.
    pub fn intern_polynomial(&mut self, terms: &[(C, MonoId)]) -> Result<PolyId> {
        let mut sorted: Vec<(C, MonoId)> = terms.to_vec();
        sorted.sort_by(|x, y| self.compare(y.1, x.1));
        if sorted.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(Error::Input(
                "duplicate monomial in term list; combine like terms first".into(),
            ));
        }
        let coeffs: Vec<C> = sorted.iter().map(|(c, _)| c.clone()).collect();
        let seq = self.coeffs.intern(&coeffs);
        let tip = self.terms.len();
        self.terms.extend(sorted.iter().map(|(_, m)| *m));
        Ok(self.finish_poly(tip, seq))
    }

    /// `v·f·w`, sharing `f`'s coefficient sequence.
    pub fn multiply_polynomial(&mut self, v: MonoId, f: PolyId, w: MonoId) -> PolyId {
        let entry = self.polys[f.0 as usize];
        let tip = self.terms.len();
        for k in 0..entry.len as usize {
            let m = self.terms[entry.start as usize + k];
            let product = self.monomials.multiply3(v, m, w);
            self.terms.push(product);
        }
        self.finish_poly(tip, entry.coeffs)
    }

    fn finish_poly(&mut self, tip: usize, seq: CoeffSeqId) -> PolyId {
        let key = (self.terms[tip..].to_vec().into_boxed_slice(), seq);
        if let Some(&id) = self.poly_index.get(&key) {
            self.terms.truncate(tip);
            return id;
        }
        let id = PolyId(self.polys.len() as u32);
        self.polys.push(PolyEntry {
            start: tip as u32,
            len: (self.terms.len() - tip) as u32,
            coeffs: seq,
        });
        self.poly_index.insert(key, id);
        id
    }

    pub fn monomials_of(&self, f: PolyId) -> &[MonoId] {
        let e = self.polys[f.0 as usize];
        &self.terms[e.start as usize..(e.start + e.len) as usize]
    }

    pub fn coefficients_of(&self, f: PolyId) -> &[C] {
        self.coeffs.get(self.polys[f.0 as usize].coeffs)
    }

    pub fn coefficient_handle(&self, f: PolyId) -> CoeffSeqId {
        self.polys[f.0 as usize].coeffs
    }

    pub fn terms(&self, f: PolyId) -> impl Iterator<Item = (&C, MonoId)> {
        self.coefficients_of(f)
            .iter()
            .zip(self.monomials_of(f).iter().copied())
    }

    pub fn len(&self, f: PolyId) -> usize {
        self.polys[f.0 as usize].len as usize
    }

    pub fn is_zero(&self, f: PolyId) -> bool {
        self.len(f) == 0
    }

    pub fn lm(&self, f: PolyId) -> Result<MonoId> {
        self.monomials_of(f)
            .first()
            .copied()
            .ok_or_else(|| Error::Domain("leading monomial of the zero polynomial".into()))
    }

    pub fn lc(&self, f: PolyId) -> Result<&C> {
        self.coefficients_of(f)
            .first()
            .ok_or_else(|| Error::Domain("leading coefficient of the zero polynomial".into()))
    }
}
