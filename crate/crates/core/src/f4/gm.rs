//! Chain criterion for noncommutative ambiguities.
//!
//! An ambiguity of `f` and `g` over the word `W` is dropped when the leading
//! monomial of a third element `h` occurs in `W` so that both `(f, h)` and
//! `(g, h)` are either disjoint inside `W` or overlap on a strictly shorter
//! subword. Both smaller ambiguities then have lower degree and are handled
//! first.

use std::hash::Hash;

use super::Ambiguity;
use crate::arena::{Arena, MonoId};
use crate::order::Var;
use crate::trie::PrefixTree;

fn resolved_below(x: (usize, usize), h: (usize, usize), total: usize) -> bool {
    let (xs, xe) = x;
    let (hs, he) = h;
    let disjoint = xe <= hs || he <= xs;
    disjoint || xe.max(he) - xs.min(hs) < total
}

/// Whether some occurrence of `lm(h)` in the ambiguity word makes `amb`
/// redundant.
pub fn is_redundant<C: Clone + Eq + Hash>(
    arena: &Arena<C>,
    lms: &[MonoId],
    amb: &Ambiguity,
    h: usize,
) -> bool {
    if h == amb.f || h == amb.g {
        return false;
    }
    let shape = Shape::of(arena, lms, amb);
    let t = arena.word(lms[h]);
    if t.len() > shape.word.len() {
        return false;
    }
    (0..=shape.word.len() - t.len())
        .filter(|&s| shape.word[s..s + t.len()] == *t)
        .any(|s| shape.chain_through(s, t.len()))
}

/// Whether any basis element other than `f` and `g` makes `amb` redundant.
pub fn has_chain<C: Clone + Eq + Hash>(
    arena: &Arena<C>,
    lms: &[MonoId],
    trie: &PrefixTree,
    amb: &Ambiguity,
) -> bool {
    let shape = Shape::of(arena, lms, amb);
    trie.find_all_divisors(&shape.word)
        .into_iter()
        .filter(|m| m.basis_index != amb.f && m.basis_index != amb.g)
        .any(|m| shape.chain_through(m.start, m.len))
}

struct Shape {
    word: Vec<Var>,
    f_span: (usize, usize),
    g_span: (usize, usize),
}

impl Shape {
    fn of<C: Clone + Eq + Hash>(arena: &Arena<C>, lms: &[MonoId], amb: &Ambiguity) -> Self {
        let (a, u, b) = (arena.word(amb.a), arena.word(lms[amb.f]), arena.word(amb.b));
        let (c, v) = (arena.word(amb.c), arena.word(lms[amb.g]));
        Shape {
            word: a.iter().chain(u).chain(b).copied().collect(),
            f_span: (a.len(), a.len() + u.len()),
            g_span: (c.len(), c.len() + v.len()),
        }
    }

    fn chain_through(&self, start: usize, len: usize) -> bool {
        let h = (start, start + len);
        let n = self.word.len();
        resolved_below(self.f_span, h, n) && resolved_below(self.g_span, h, n)
    }
}
