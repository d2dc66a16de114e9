//! Weighted block orderings with unit weight vectors.
//!
//! Every variable belongs to exactly one block. The weight of a word is the
//! vector of per-block letter counts; words are compared by weight (block 1
//! first) and ties are broken by a left-to-right comparison of variable ids.
//! A single block gives the degree-lexicographic ordering.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Variable identifier. Ids are 1-based and ascend with the ordering.
pub type Var = u32;

/// Per-block letter counts of a word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightVector(pub Vec<u32>);

impl WeightVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    /// `block_of[v - 1]` is the zero-based block of variable `v`.
    block_of: Vec<u32>,
    blocks: usize,
}

impl MonomialOrder {
    /// Degree-lexicographic ordering on `nvars` variables.
    pub fn deglex(nvars: usize) -> Self {
        MonomialOrder {
            block_of: vec![0; nvars],
            blocks: 1,
        }
    }

    /// Block ordering from 1-based block indices, one per variable in
    /// declaration order. Block 1 has the highest elimination priority.
    pub fn blocks(block_indices: &[u32]) -> Result<Self> {
        if block_indices.is_empty() {
            return Ok(Self::deglex(0));
        }
        if let Some(pos) = block_indices.iter().position(|&b| b == 0) {
            return Err(Error::Config(format!(
                "variable {} has block index 0; blocks are numbered from 1",
                pos + 1
            )));
        }
        let blocks = *block_indices.iter().max().unwrap() as usize;
        Ok(MonomialOrder {
            block_of: block_indices.iter().map(|&b| b - 1).collect(),
            blocks,
        })
    }

    pub fn nvars(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    /// 1-based block index of a variable.
    pub fn block_index(&self, var: Var) -> u32 {
        self.block_of[var as usize - 1] + 1
    }

    pub fn is_deglex(&self) -> bool {
        self.blocks == 1
    }

    pub fn weight(&self, word: &[Var]) -> WeightVector {
        let mut counts = vec![0u32; self.blocks];
        for &v in word {
            counts[self.block_of[v as usize - 1] as usize] += 1;
        }
        WeightVector(counts)
    }

    pub fn compare(&self, a: &[Var], b: &[Var]) -> Ordering {
        if self.blocks == 1 {
            return a.len().cmp(&b.len()).then_with(|| a.cmp(b));
        }
        self.weight(a)
            .cmp(&self.weight(b))
            .then_with(|| a.cmp(b))
    }

    /// Whether `compare(v, w)` agrees with `compare(a·v·b, a·w·b)`.
    pub fn multiplicativity_check(&self, a: &[Var], v: &[Var], w: &[Var], b: &[Var]) -> bool {
        let wrap = |m: &[Var]| -> Vec<Var> { a.iter().chain(m).chain(b).copied().collect() };
        self.compare(v, w) == self.compare(&wrap(v), &wrap(w))
    }
}
