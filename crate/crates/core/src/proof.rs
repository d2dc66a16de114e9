//! Cofactor certificates `g = Σ λ·a·f·b` for basis elements.
//!
//! An incremental certificate may cite inputs and earlier basis elements; a
//! full certificate cites inputs only. [`verify`] re-expands a certificate
//! with plain word arithmetic and compares it to its target, without touching
//! the F4 machinery.

use rustc_hash::FxHashMap;

use crate::arena::{Arena, MonoId, PolyId};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    /// Zero-based index into the input polynomials.
    Input(usize),
    /// Zero-based index into the basis.
    Basis(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertTerm<E> {
    pub coeff: E,
    pub left: MonoId,
    pub source: Source,
    pub right: MonoId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate<E> {
    /// Basis index of the certified polynomial.
    pub target: usize,
    pub terms: Vec<CertTerm<E>>,
}

impl<E> Certificate<E> {
    pub fn is_full(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.source, Source::Input(_)))
    }
}

/// Which certificates a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProofMode {
    #[default]
    None,
    Incremental,
    Full,
}

/// A matrix row `left · basis[basis] · right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowSource {
    pub left: MonoId,
    pub basis: usize,
    pub right: MonoId,
}

/// Reads an incremental certificate off one row of the transform `T` with
/// `T·A = rref(A)`, scaled by `scale`.
pub fn track_incremental<F: Field>(
    field: &F,
    target: usize,
    transform: &SparseRow<F::Elem>,
    rows: &[RowSource],
    scale: &F::Elem,
) -> Certificate<F::Elem> {
    let terms = transform
        .iter()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(i, c)| {
            let src = rows[i as usize];
            CertTerm {
                coeff: field.mul(c, scale),
                left: src.left,
                source: Source::Basis(src.basis),
                right: src.right,
            }
        })
        .collect();
    Certificate { target, terms }
}

/// Replaces every basis reference by that element's full certificate.
///
/// `expanded[k]` must already be a full certificate for every cited basis
/// element `k`.
pub fn expand_to_input<F: Field>(
    field: &F,
    arena: &mut Arena<F::Elem>,
    cert: &Certificate<F::Elem>,
    expanded: &[Certificate<F::Elem>],
) -> Result<Certificate<F::Elem>> {
    let mut acc: FxHashMap<(MonoId, usize, MonoId), F::Elem> = FxHashMap::default();
    let mut order: Vec<(MonoId, usize, MonoId)> = Vec::new();
    let mut add = |key: (MonoId, usize, MonoId), c: F::Elem| {
        match acc.get_mut(&key) {
            Some(v) => *v = field.add(v, &c),
            None => {
                order.push(key);
                acc.insert(key, c);
            }
        }
    };
    for term in &cert.terms {
        match term.source {
            Source::Input(j) => add((term.left, j, term.right), term.coeff.clone()),
            Source::Basis(k) => {
                let inner = expanded
                    .get(k)
                    .filter(|_| k < cert.target)
                    .ok_or_else(|| {
                        Error::Internal(format!(
                            "certificate of g{} cites g{} before it is expanded",
                            cert.target + 1,
                            k + 1
                        ))
                    })?;
                for t in &inner.terms {
                    let Source::Input(j) = t.source else {
                        return Err(Error::Internal(format!(
                            "certificate of g{} is not over the inputs",
                            k + 1
                        )));
                    };
                    let left = arena.multiply_monomials(term.left, t.left);
                    let right = arena.multiply_monomials(t.right, term.right);
                    add((left, j, right), field.mul(&term.coeff, &t.coeff));
                }
            }
        }
    }
    let terms = order
        .into_iter()
        .filter_map(|key| {
            let c = acc.remove(&key).unwrap();
            (!field.is_zero(&c)).then_some(CertTerm {
                coeff: c,
                left: key.0,
                source: Source::Input(key.1),
                right: key.2,
            })
        })
        .collect();
    Ok(Certificate {
        target: cert.target,
        terms,
    })
}

/// Checks `Σ λ·a·f·b = basis[target]` exactly.
pub fn verify<F: Field>(
    field: &F,
    arena: &mut Arena<F::Elem>,
    cert: &Certificate<F::Elem>,
    inputs: &[PolyId],
    basis: &[PolyId],
) -> Result<bool> {
    let target = *basis.get(cert.target).ok_or_else(|| {
        Error::Format(format!("target g{} is not a basis element", cert.target + 1))
    })?;
    let mut acc: FxHashMap<MonoId, F::Elem> = FxHashMap::default();
    for term in &cert.terms {
        let source = match term.source {
            Source::Input(j) => inputs.get(j),
            Source::Basis(k) => basis.get(k),
        }
        .copied()
        .ok_or_else(|| Error::Format(format!("dangling source {:?}", term.source)))?;
        let summands: Vec<(F::Elem, MonoId)> = arena
            .terms(source)
            .map(|(c, m)| (c.clone(), m))
            .collect();
        for (c, m) in summands {
            let word = arena.monomials.multiply3(term.left, m, term.right);
            let value = field.mul(&term.coeff, &c);
            let slot = acc.entry(word).or_insert_with(|| field.zero());
            *slot = field.add(slot, &value);
        }
    }
    for (c, m) in arena.terms(target) {
        let slot = acc.entry(m).or_insert_with(|| field.zero());
        *slot = field.sub(slot, c);
    }
    Ok(acc.values().all(|v| field.is_zero(v)))
}
