//! Prefix tree over the leading monomials of the basis.
//!
//! Subword divisibility is answered by starting a root descent at every
//! position of the query word. Nodes live in one contiguous vector and are
//! never removed.

use crate::order::Var;

#[derive(Debug, Clone, Default)]
struct Node {
    /// Sorted by letter.
    children: Vec<(Var, u32)>,
    /// Basis elements whose leading monomial ends here, in insertion order.
    terminals: Vec<usize>,
}

/// A match `w = a·lm(g)·b` with `|a| = start` and `|lm(g)| = len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorMatch {
    pub basis_index: usize,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone)]
pub struct PrefixTree {
    nodes: Vec<Node>,
}

impl Default for PrefixTree {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixTree {
    pub fn new() -> Self {
        PrefixTree {
            nodes: vec![Node::default()],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn child(&self, node: u32, letter: Var) -> Option<u32> {
        let children = &self.nodes[node as usize].children;
        children
            .binary_search_by_key(&letter, |&(l, _)| l)
            .ok()
            .map(|i| children[i].1)
    }

    /// Inserts a leading monomial. The empty word marks the root, making every
    /// word divisible.
    pub fn insert(&mut self, lm: &[Var], basis_index: usize) {
        let mut node = 0u32;
        for &letter in lm {
            node = match self.child(node, letter) {
                Some(next) => next,
                None => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    let children = &mut self.nodes[node as usize].children;
                    let pos = children.partition_point(|&(l, _)| l < letter);
                    children.insert(pos, (letter, next));
                    next
                }
            };
        }
        let terminals = &mut self.nodes[node as usize].terminals;
        if !terminals.contains(&basis_index) {
            terminals.push(basis_index);
        }
    }

    pub fn contains_word(&self, word: &[Var]) -> bool {
        self.walk(word)
            .is_some_and(|n| !self.nodes[n as usize].terminals.is_empty())
    }

    fn walk(&self, word: &[Var]) -> Option<u32> {
        word.iter()
            .try_fold(0u32, |node, &letter| self.child(node, letter))
    }

    /// The leftmost, then shortest, divisor of `w`. Among basis elements with
    /// the same leading monomial the earliest inserted wins.
    pub fn find_divisor(&self, w: &[Var]) -> Option<DivisorMatch> {
        (0..=w.len()).find_map(|start| self.shortest_from(w, start))
    }

    fn shortest_from(&self, w: &[Var], start: usize) -> Option<DivisorMatch> {
        let mut node = 0u32;
        let mut len = 0;
        loop {
            if let Some(&g) = self.nodes[node as usize].terminals.first() {
                return Some(DivisorMatch {
                    basis_index: g,
                    start,
                    len,
                });
            }
            let &letter = w.get(start + len)?;
            node = self.child(node, letter)?;
            len += 1;
        }
    }

    /// Every `(g, start)` with `w = a·lm(g)·b`, by increasing position and
    /// then increasing length.
    pub fn find_all_divisors(&self, w: &[Var]) -> Vec<DivisorMatch> {
        let mut out = Vec::new();
        for start in 0..=w.len() {
            let mut node = 0u32;
            let mut len = 0;
            loop {
                for &g in &self.nodes[node as usize].terminals {
                    out.push(DivisorMatch {
                        basis_index: g,
                        start,
                        len,
                    });
                }
                let Some(&letter) = w.get(start + len) else {
                    break;
                };
                match self.child(node, letter) {
                    Some(next) => node = next,
                    None => break,
                }
                len += 1;
            }
        }
        out
    }

    /// Every inserted word, as `(word, basis index)` pairs in depth-first order.
    pub fn words(&self) -> Vec<(Vec<Var>, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(0u32, Vec::new())];
        while let Some((node, prefix)) = stack.pop() {
            for &g in &self.nodes[node as usize].terminals {
                out.push((prefix.clone(), g));
            }
            for &(letter, child) in self.nodes[node as usize].children.iter().rev() {
                let mut next = prefix.clone();
                next.push(letter);
                stack.push((child, next));
            }
        }
        out
    }
}
