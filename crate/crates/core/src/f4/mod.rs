//! The noncommutative F4 driver.
//!
//! Each iteration takes every pending ambiguity of minimal degree, expands
//! both sides `a·f·b` and `c·g·d` into matrix rows, closes the row set under
//! reducers for every divisible monomial, reduces the resulting Macaulay
//! matrix to reduced row echelon form and adds every row whose leading
//! monomial is not divisible by a basis leading monomial. The loop stops when
//! no ambiguity is left or one of the termination controls (degree bound,
//! iteration limit) fires, in which case the basis is partial.

mod ambiguity;
mod gm;

pub use ambiguity::{overlap_shapes, Ambiguity, AmbiguityKind, AmbiguityShape, PairQueue};
pub use gm::{has_chain, is_redundant};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::arena::{Arena, MonoId, PolyId};
use crate::error::{Error, Result};
use crate::field::{EchelonOptions, Field};
use crate::linalg::{Echelon, SparseMatrix, SparseRow};
use crate::proof::{expand_to_input, track_incremental, CertTerm, Certificate, ProofMode, RowSource, Source};
use crate::trie::PrefixTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbConfig {
    /// Ambiguities of larger degree are discarded.
    pub degree_bound: Option<usize>,
    pub max_iterations: Option<usize>,
    pub gm_filter: bool,
    pub proof: ProofMode,
    pub threads: usize,
    pub tracer: bool,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig {
            degree_bound: None,
            max_iterations: None,
            gm_filter: false,
            proof: ProofMode::None,
            threads: 1,
            tracer: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The queue emptied and nothing was discarded: the basis is a Gröbner basis.
    Complete,
    /// Stopped by the degree bound or the iteration limit.
    Truncated,
}

/// Per-iteration record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationStats {
    pub degree: usize,
    /// Minimal degree present in the queue when the batch was popped.
    pub queue_min_degree: usize,
    pub ambiguities: usize,
    pub rows: usize,
    pub columns: usize,
    pub new_elements: usize,
}

#[derive(Debug, Clone)]
pub struct GbOutput<E> {
    pub basis: Vec<PolyId>,
    pub status: Status,
    pub certificates: Option<Vec<Certificate<E>>>,
    pub iterations: Vec<IterationStats>,
    pub discarded_ambiguities: usize,
    pub filtered_ambiguities: usize,
}

/// Rows of one Macaulay matrix with their column map.
#[derive(Debug, Clone)]
pub struct MacaulayMatrix<E> {
    pub sources: Vec<RowSource>,
    pub polys: Vec<PolyId>,
    /// Strictly descending monomials.
    pub columns: Vec<MonoId>,
    pub matrix: SparseMatrix<E>,
}

/// Computes a (partial) Gröbner basis of the ideal generated by `inputs`.
pub fn compute_gb<F: Field>(
    field: &F,
    arena: &mut Arena<F::Elem>,
    inputs: &[PolyId],
    config: &GbConfig,
) -> Result<GbOutput<F::Elem>> {
    let mut engine = Engine::new(field, arena, config);
    for &f in inputs {
        engine.add_input(f)?;
    }
    engine.run()?;
    engine.finish(inputs)
}

/// State of one Gröbner basis computation.
pub struct Engine<'a, F: Field> {
    field: &'a F,
    arena: &'a mut Arena<F::Elem>,
    config: GbConfig,
    basis: Vec<PolyId>,
    lms: Vec<MonoId>,
    trie: PrefixTree,
    queue: PairQueue,
    certificates: Vec<Certificate<F::Elem>>,
    inputs: usize,
    iterations: Vec<IterationStats>,
    filtered: usize,
    stopped_early: bool,
}

impl<'a, F: Field> Engine<'a, F> {
    pub fn new(field: &'a F, arena: &'a mut Arena<F::Elem>, config: &GbConfig) -> Self {
        Engine {
            field,
            arena,
            config: config.clone(),
            basis: Vec::new(),
            lms: Vec::new(),
            trie: PrefixTree::new(),
            queue: PairQueue::new(config.degree_bound),
            certificates: Vec::new(),
            inputs: 0,
            iterations: Vec::new(),
            filtered: 0,
            stopped_early: false,
        }
    }

    pub fn basis(&self) -> &[PolyId] {
        &self.basis
    }

    pub fn queue(&self) -> &PairQueue {
        &self.queue
    }

    pub fn trie(&self) -> &PrefixTree {
        &self.trie
    }

    pub fn arena(&mut self) -> &mut Arena<F::Elem> {
        self.arena
    }

    fn proof_enabled(&self) -> bool {
        self.config.proof != ProofMode::None
    }

    /// Adds an input polynomial (made monic) to the basis.
    pub fn add_input(&mut self, f: PolyId) -> Result<usize> {
        if self.arena.is_zero(f) {
            return Err(Error::Input("zero polynomial in input".into()));
        }
        let lc = self.arena.lc(f)?.clone();
        let inv = self.field.inv(&lc).expect("nonzero leading coefficient");
        let monic = self.scale(f, &inv)?;
        let index = self.basis.len();
        if self.proof_enabled() {
            let one = self.arena.one();
            self.certificates.push(Certificate {
                target: index,
                terms: vec![CertTerm {
                    coeff: inv,
                    left: one,
                    source: Source::Input(self.inputs),
                    right: one,
                }],
            });
        }
        self.inputs += 1;
        self.add_element(monic);
        Ok(index)
    }

    fn scale(&mut self, f: PolyId, c: &F::Elem) -> Result<PolyId> {
        if self.field.is_one(c) {
            return Ok(f);
        }
        let terms: Vec<(F::Elem, MonoId)> = self
            .arena
            .terms(f)
            .map(|(x, m)| (self.field.mul(x, c), m))
            .collect();
        self.arena.intern_polynomial(&terms)
    }

    fn add_element(&mut self, poly: PolyId) -> usize {
        let index = self.basis.len();
        let lm = self.arena.lm(poly).expect("nonzero basis element");
        self.basis.push(poly);
        self.lms.push(lm);
        self.trie.insert(self.arena.word(lm), index);
        if self.config.gm_filter {
            self.filtered += self.gm_filter(index);
        }
        for f in 0..=index {
            for amb in self.ambiguities(f, index) {
                if self.config.gm_filter && has_chain(self.arena, &self.lms, &self.trie, &amb) {
                    self.filtered += 1;
                    continue;
                }
                self.queue.push(amb);
            }
        }
        index
    }

    /// Ambiguities of basis elements `f` and `g`.
    pub fn ambiguities(&mut self, f: usize, g: usize) -> Vec<Ambiguity> {
        let u = self.arena.word(self.lms[f]).to_vec();
        let v = self.arena.word(self.lms[g]).to_vec();
        overlap_shapes(&u, &v, f == g)
            .into_iter()
            .map(|s| Ambiguity {
                kind: s.kind,
                degree: s.degree(&u),
                a: self.arena.intern_monomial(&s.a).expect("letters from basis"),
                b: self.arena.intern_monomial(&s.b).expect("letters from basis"),
                c: self.arena.intern_monomial(&s.c).expect("letters from basis"),
                d: self.arena.intern_monomial(&s.d).expect("letters from basis"),
                f,
                g,
            })
            .collect()
    }

    /// Removes queued ambiguities made redundant by the new element `h`.
    pub fn gm_filter(&mut self, h: usize) -> usize {
        let arena = &*self.arena;
        let lms = &self.lms;
        self.queue
            .retain(|amb| !is_redundant(arena, lms, amb, h))
    }

    /// `(1/lc(f))·a·f·b − (1/lc(g))·c·g·d`.
    pub fn s_polynomial(&mut self, amb: &Ambiguity) -> Result<PolyId> {
        let left = self.arena.multiply_polynomial(amb.a, self.basis[amb.f], amb.b);
        let right = self.arena.multiply_polynomial(amb.c, self.basis[amb.g], amb.d);
        let lf = self.field.inv(self.arena.lc(left)?).unwrap();
        let lg = self.field.inv(self.arena.lc(right)?).unwrap();
        let mut acc: FxHashMap<MonoId, F::Elem> = FxHashMap::default();
        for (c, m) in self.arena.terms(left) {
            let v = self.field.mul(c, &lf);
            let slot = acc.entry(m).or_insert_with(|| self.field.zero());
            *slot = self.field.add(slot, &v);
        }
        for (c, m) in self.arena.terms(right) {
            let v = self.field.mul(c, &lg);
            let slot = acc.entry(m).or_insert_with(|| self.field.zero());
            *slot = self.field.sub(slot, &v);
        }
        let terms: Vec<(F::Elem, MonoId)> = acc
            .into_iter()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(m, c)| (c, m))
            .collect();
        self.arena.intern_polynomial(&terms)
    }

    /// Closes `batch` under reducer rows: every monomial divisible by a basis
    /// leading monomial gets exactly one row `v·g·w` with that leading monomial.
    pub fn symbolic_preprocess(&mut self, batch: &[RowSource]) -> Vec<(RowSource, PolyId)> {
        let mut rows: Vec<(RowSource, PolyId)> = Vec::new();
        let mut present: FxHashSet<RowSource> = FxHashSet::default();
        for &src in batch {
            if present.insert(src) {
                let poly = self
                    .arena
                    .multiply_polynomial(src.left, self.basis[src.basis], src.right);
                rows.push((src, poly));
            }
        }
        let mut seen: FxHashSet<MonoId> = FxHashSet::default();
        let mut next = 0;
        while next < rows.len() {
            let poly = rows[next].1;
            next += 1;
            let monomials = self.arena.monomials_of(poly).to_vec();
            for m in monomials {
                if !seen.insert(m) {
                    continue;
                }
                let Some(hit) = self.trie.find_divisor(self.arena.word(m)) else {
                    continue;
                };
                let word = self.arena.word(m);
                let (v, w) = (
                    word[..hit.start].to_vec(),
                    word[hit.start + hit.len..].to_vec(),
                );
                let src = RowSource {
                    left: self.arena.intern_monomial(&v).expect("known letters"),
                    basis: hit.basis_index,
                    right: self.arena.intern_monomial(&w).expect("known letters"),
                };
                if present.insert(src) {
                    let poly = self
                        .arena
                        .multiply_polynomial(src.left, self.basis[src.basis], src.right);
                    rows.push((src, poly));
                }
            }
        }
        rows
    }

    /// Lays the rows out as a sparse matrix over descending monomial columns.
    pub fn build_matrix(&self, rows: &[(RowSource, PolyId)]) -> MacaulayMatrix<F::Elem> {
        let mut columns: Vec<MonoId> = rows
            .iter()
            .flat_map(|&(_, p)| self.arena.monomials_of(p).iter().copied())
            .collect::<FxHashSet<_>>()
            .into_iter()
            .collect();
        columns.sort_by(|&a, &b| self.arena.compare(b, a));
        let position: FxHashMap<MonoId, u32> = columns
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32))
            .collect();
        let matrix_rows = rows
            .iter()
            .map(|&(_, p)| {
                SparseRow::from_pairs(
                    self.arena
                        .terms(p)
                        .map(|(c, m)| (position[&m], c.clone())),
                )
            })
            .collect();
        MacaulayMatrix {
            sources: rows.iter().map(|&(s, _)| s).collect(),
            polys: rows.iter().map(|&(_, p)| p).collect(),
            matrix: SparseMatrix {
                ncols: columns.len(),
                rows: matrix_rows,
            },
            columns,
        }
    }

    /// Adds every reduced row whose leading monomial has no divisor among the
    /// leading monomials of the basis before this call, smallest leading
    /// monomial first. Elements added by the same call do not exclude each
    /// other.
    pub fn update_basis(
        &mut self,
        reduced: &Echelon<F::Elem>,
        matrix: &MacaulayMatrix<F::Elem>,
    ) -> Result<Vec<usize>> {
        let before = self.basis.len();
        let mut added = Vec::new();
        for (r, row) in reduced.rows.iter().enumerate().rev() {
            let Some(lead) = row.lead() else { continue };
            let lm = matrix.columns[lead as usize];
            let divisible = self
                .trie
                .find_all_divisors(self.arena.word(lm))
                .iter()
                .any(|m| m.basis_index < before);
            if divisible {
                continue;
            }
            let terms: Vec<(F::Elem, MonoId)> = row
                .iter()
                .map(|(c, v)| (v.clone(), matrix.columns[c as usize]))
                .collect();
            let poly = self.arena.intern_polynomial(&terms)?;
            let index = self.basis.len();
            if self.proof_enabled() {
                let transform = reduced
                    .transforms
                    .as_ref()
                    .and_then(|t| t.get(r))
                    .ok_or_else(|| Error::Internal("missing transform row".into()))?;
                let one = self.field.one();
                self.certificates.push(track_incremental(
                    self.field,
                    index,
                    transform,
                    &matrix.sources,
                    &one,
                ));
            }
            self.add_element(poly);
            added.push(index);
        }
        Ok(added)
    }

    /// One F4 iteration. Returns `false` when the queue is empty.
    pub fn step(&mut self) -> Result<bool> {
        let Some(queue_min) = self.queue.min_degree() else {
            return Ok(false);
        };
        let (degree, batch) = self.queue.pop_min().expect("nonempty queue");
        let mut sources = Vec::with_capacity(2 * batch.len());
        for amb in &batch {
            sources.push(RowSource { left: amb.a, basis: amb.f, right: amb.b });
            sources.push(RowSource { left: amb.c, basis: amb.g, right: amb.d });
        }
        let rows = self.symbolic_preprocess(&sources);
        let matrix = self.build_matrix(&rows);
        let options = EchelonOptions {
            threads: self.config.threads,
            tracer: self.config.tracer,
            want_transform: self.proof_enabled(),
        };
        let reduced = self.field.echelon(&matrix.matrix, &options)?;
        let added = self.update_basis(&reduced, &matrix)?;
        self.iterations.push(IterationStats {
            degree,
            queue_min_degree: queue_min,
            ambiguities: batch.len(),
            rows: matrix.matrix.nrows(),
            columns: matrix.columns.len(),
            new_elements: added.len(),
        });
        Ok(true)
    }

    pub fn run(&mut self) -> Result<()> {
        loop {
            if self
                .config
                .max_iterations
                .is_some_and(|limit| self.iterations.len() >= limit)
            {
                self.stopped_early = !self.queue.is_empty();
                return Ok(());
            }
            if !self.step()? {
                return Ok(());
            }
        }
    }

    pub fn status(&self) -> Status {
        if self.stopped_early || !self.queue.is_empty() || self.queue.discarded() > 0 {
            Status::Truncated
        } else {
            Status::Complete
        }
    }

    /// Reduces `f` by the current basis until no monomial is divisible.
    pub fn normal_form(&mut self, f: PolyId) -> Result<PolyId> {
        let mut acc: FxHashMap<MonoId, F::Elem> =
            self.arena.terms(f).map(|(c, m)| (m, c.clone())).collect();
        loop {
            let mut reducible: Vec<MonoId> = acc
                .keys()
                .copied()
                .filter(|&m| self.trie.find_divisor(self.arena.word(m)).is_some())
                .collect();
            if reducible.is_empty() {
                break;
            }
            reducible.sort_by(|&a, &b| self.arena.compare(b, a));
            let m = reducible[0];
            let coeff = acc.remove(&m).unwrap();
            let hit = self.trie.find_divisor(self.arena.word(m)).unwrap();
            let word = self.arena.word(m);
            let (v, w) = (word[..hit.start].to_vec(), word[hit.start + hit.len..].to_vec());
            let v = self.arena.intern_monomial(&v)?;
            let w = self.arena.intern_monomial(&w)?;
            let reducer = self
                .arena
                .multiply_polynomial(v, self.basis[hit.basis_index], w);
            let terms: Vec<(F::Elem, MonoId)> = self
                .arena
                .terms(reducer)
                .skip(1)
                .map(|(c, m)| (c.clone(), m))
                .collect();
            for (c, mm) in terms {
                let delta = self.field.mul(&coeff, &c);
                let slot = acc.entry(mm).or_insert_with(|| self.field.zero());
                *slot = self.field.sub(slot, &delta);
                if self.field.is_zero(slot) {
                    acc.remove(&mm);
                }
            }
        }
        let terms: Vec<(F::Elem, MonoId)> = acc.into_iter().map(|(m, c)| (c, m)).collect();
        self.arena.intern_polynomial(&terms)
    }

    pub fn finish(self, inputs: &[PolyId]) -> Result<GbOutput<F::Elem>> {
        let status = self.status();
        let certificates = match self.config.proof {
            ProofMode::None => None,
            ProofMode::Incremental => Some(self.certificates),
            ProofMode::Full => {
                let mut expanded: Vec<Certificate<F::Elem>> = Vec::with_capacity(self.certificates.len());
                for cert in &self.certificates {
                    let full = expand_to_input(self.field, self.arena, cert, &expanded)?;
                    expanded.push(full);
                }
                Some(expanded)
            }
        };
        debug_assert!(inputs.len() == self.inputs);
        Ok(GbOutput {
            basis: self.basis,
            status,
            certificates,
            iterations: self.iterations,
            discarded_ambiguities: self.queue.discarded(),
            filtered_ambiguities: self.filtered,
        })
    }
}
