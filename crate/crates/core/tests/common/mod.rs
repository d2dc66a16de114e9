//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;

use ncgb::arena::{Arena, PolyId};
use ncgb::f4::{compute_gb, GbConfig, GbOutput};
use ncgb::field::Field;
use ncgb::io::{parse_problem, ProblemFile};
use ncgb::linalg::{SparseMatrix, SparseRow};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};

pub type Word = Vec<u32>;

// ---------------------------------------------------------------------------
// dense elimination

/// Textbook Gauss-Jordan elimination mod p on a dense matrix. Returns the
/// nonzero rows of the reduced echelon form, top to bottom.
pub fn dense_rref_mod_p(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for v in a[rank].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..ncols {
                    a[r][c] = (a[r][c] + (p - f) * a[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    a.truncate(rank);
    a
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Exact Gauss-Jordan elimination over Q. Rows are kept as primitive integer
/// vectors (denominators cleared, content removed) and turned back into
/// fractions at the end.
pub fn dense_rref_q(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    use num_integer::Integer;
    use num_traits::{One, Signed};
    let ncols = rows.first().map_or(0, Vec::len);
    let primitive = |row: &mut Vec<BigInt>| {
        let g = row.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        if !g.is_zero() && !g.is_one() {
            for v in row.iter_mut() {
                *v /= &g;
            }
        }
    };
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
            let mut row: Vec<BigInt> = r.iter().map(|v| v.numer() * (&l / v.denom())).collect();
            primitive(&mut row);
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pr);
        let pivot_row = a[rank].clone();
        let p = &pivot_row[col];
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let g = p.gcd(&a[r][col]);
                let (mp, mr) = (p / &g, &a[r][col] / &g);
                for c in 0..ncols {
                    let v = &a[r][c] * &mp - &pivot_row[c] * &mr;
                    a[r][c] = v;
                }
                primitive(&mut a[r]);
            }
        }
        rank += 1;
    }
    a.truncate(rank);
    a.into_iter()
        .map(|mut row| {
            if row.iter().find(|v| !v.is_zero()).unwrap().is_negative() {
                row.iter_mut().for_each(|v| *v = -&*v);
            }
            let lead = row.iter().find(|v| !v.is_zero()).unwrap().clone();
            row.into_iter().map(|v| BigRational::new(v, lead.clone())).collect()
        })
        .collect()
}

pub fn to_dense<E: Clone>(m: &SparseMatrix<E>, zero: &E) -> Vec<Vec<E>> {
    m.rows
        .iter()
        .map(|row| {
            let mut dense = vec![zero.clone(); m.ncols];
            for (c, v) in row.iter() {
                dense[c as usize] = v.clone();
            }
            dense
        })
        .collect()
}

pub fn rows_to_dense<E: Clone>(rows: &[SparseRow<E>], ncols: usize, zero: &E) -> Vec<Vec<E>> {
    to_dense(
        &SparseMatrix {
            ncols,
            rows: rows.to_vec(),
        },
        zero,
    )
}

pub fn random_sparse_zp(rng: &mut impl Rng, max_rows: usize, max_cols: usize, p: u32) -> SparseMatrix<u32> {
    let nrows = rng.gen_range(1..=max_rows);
    let ncols = rng.gen_range(1..=max_cols);
    let density = rng.gen_range(0.01..=0.10);
    let mut rows = Vec::with_capacity(nrows);
    for _ in 0..nrows {
        let mut row = SparseRow::new();
        for c in 0..ncols {
            if rng.gen_bool(density) {
                row.cols.push(c as u32);
                row.vals.push(rng.gen_range(1..p));
            }
        }
        rows.push(row);
    }
    // duplicate and combined rows make the rank deficient
    if nrows > 2 && rng.gen_bool(0.5) {
        let src = rows[0].clone();
        rows[nrows - 1] = src;
    }
    SparseMatrix { ncols, rows }
}

pub fn random_sparse_q(rng: &mut impl Rng, max_rows: usize, max_cols: usize, max_entry: i64) -> SparseMatrix<BigRational> {
    let nrows = rng.gen_range(1..=max_rows);
    let ncols = rng.gen_range(1..=max_cols);
    let density = rng.gen_range(0.05..=0.5);
    let mut rows = Vec::with_capacity(nrows);
    for _ in 0..nrows {
        let mut row = SparseRow::new();
        for c in 0..ncols {
            if rng.gen_bool(density) {
                let mut n = 0;
                while n == 0 {
                    n = rng.gen_range(-max_entry..=max_entry);
                }
                let d = rng.gen_range(1..=max_entry);
                row.cols.push(c as u32);
                row.vals.push(BigRational::new(BigInt::from(n), BigInt::from(d)));
            }
        }
        rows.push(row);
    }
    if nrows > 3 && rng.gen_bool(0.5) {
        // a rational combination of two rows
        let (a, b) = (&rows[0], &rows[1]);
        let s = BigRational::new(BigInt::from(rng.gen_range(1..=max_entry)), BigInt::from(rng.gen_range(1..=max_entry)));
        let mut dense = vec![BigRational::zero(); ncols];
        for (c, v) in a.iter() {
            dense[c as usize] += v;
        }
        for (c, v) in b.iter() {
            dense[c as usize] += v * &s;
        }
        rows[nrows - 1] = SparseRow::from_pairs(
            dense
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c as u32, v)),
        );
    }
    SparseMatrix { ncols, rows }
}

// ---------------------------------------------------------------------------
// noncommutative polynomials

/// Degree-lexicographic comparison with smaller variable ids smaller.
pub fn deglex(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A polynomial as a map from words to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<E> {
    pub terms: HashMap<Word, E>,
}

impl<E: Clone> Poly<E> {
    pub fn zero() -> Self {
        Poly { terms: HashMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_arena(arena: &Arena<E>, f: PolyId) -> Self
    where
        E: Clone + Eq + std::hash::Hash,
    {
        Poly {
            terms: arena.terms(f).map(|(c, m)| (arena.word(m).to_vec(), c.clone())).collect(),
        }
    }

    pub fn leading(&self, cmp: &impl Fn(&[u32], &[u32]) -> Ordering) -> Option<(&Word, &E)> {
        self.terms.iter().max_by(|x, y| cmp(x.0, y.0))
    }

    pub fn add_scaled<F: Field<Elem = E>>(&mut self, field: &F, c: &E, a: &[u32], g: &Poly<E>, b: &[u32]) {
        for (w, gc) in &g.terms {
            let word: Word = a.iter().chain(w).chain(b).copied().collect();
            let v = field.mul(c, gc);
            let slot = self.terms.entry(word.clone()).or_insert_with(|| field.zero());
            *slot = field.add(slot, &v);
            if field.is_zero(slot) {
                self.terms.remove(&word);
            }
        }
    }
}

/// First occurrence of `v` as a subword of `w`, by plain scanning.
pub fn find_subword(w: &[u32], v: &[u32]) -> Option<usize> {
    if v.len() > w.len() {
        return None;
    }
    (0..=w.len() - v.len()).find(|&s| w[s..s + v.len()] == *v)
}

/// Full reduction of `f` by `g`: repeatedly cancels the largest monomial
/// that has a divisor among the leading monomials.
pub fn reduce<F: Field>(
    field: &F,
    f: &Poly<F::Elem>,
    basis: &[Poly<F::Elem>],
    cmp: &impl Fn(&[u32], &[u32]) -> Ordering,
) -> Poly<F::Elem> {
    let leads: Vec<(Word, F::Elem)> = basis
        .iter()
        .map(|g| {
            let (w, c) = g.leading(cmp).expect("nonzero basis element");
            (w.clone(), c.clone())
        })
        .collect();
    let mut r = f.clone();
    loop {
        let mut words: Vec<&Word> = r.terms.keys().collect();
        words.sort_by(|x, y| cmp(y, x));
        let hit = words.into_iter().find_map(|w| {
            leads
                .iter()
                .enumerate()
                .find_map(|(k, (lw, _))| find_subword(w, lw).map(|s| (w.clone(), k, s)))
        });
        let Some((w, k, s)) = hit else {
            return r;
        };
        let c = r.terms[&w].clone();
        let (lw, lc) = &leads[k];
        let factor = field.neg(&field.mul(&c, &field.inv(lc).unwrap()));
        let (a, b) = (w[..s].to_vec(), w[s + lw.len()..].to_vec());
        r.add_scaled(field, &factor, &a, &basis[k], &b);
    }
}

/// Every overlap or inclusion of the leading words of `basis[i]` and
/// `basis[j]`, as `(a, b, c, d)` with `a·lm_i·b = c·lm_j·d`.
pub fn ambiguity_placements(u: &[u32], v: &[u32], same: bool) -> Vec<(Word, Word, Word, Word)> {
    let mut out = Vec::new();
    let (lu, lv) = (u.len() as isize, v.len() as isize);
    // v placed at offset t relative to u; the two must share a letter
    for t in (1 - lv)..lu {
        if same && t == 0 {
            continue;
        }
        let start = t.min(0);
        let end = (t + lv).max(lu);
        let n = (end - start) as usize;
        let mut w = vec![0u32; n];
        let iu = (-start) as usize;
        let iv = (t - start) as usize;
        w[iu..iu + u.len()].copy_from_slice(u);
        let consistent = v.iter().enumerate().all(|(k, &l)| {
            let pos = iv + k;
            if pos >= iu && pos < iu + u.len() {
                w[pos] == l
            } else {
                w[pos] = l;
                true
            }
        });
        if !consistent {
            continue;
        }
        out.push((
            w[..iu].to_vec(),
            w[iu + u.len()..].to_vec(),
            w[..iv].to_vec(),
            w[iv + v.len()..].to_vec(),
        ));
    }
    out
}

/// Diamond-lemma check: every S-polynomial of an ambiguity of degree at most
/// `bound` reduces to zero. Returns a description of the first failure.
pub fn diamond_check<F: Field>(
    field: &F,
    basis: &[Poly<F::Elem>],
    bound: Option<usize>,
    cmp: &impl Fn(&[u32], &[u32]) -> Ordering,
) -> Result<usize, String> {
    let mut checked = 0;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let (u, uc) = basis[i].leading(cmp).unwrap();
            let (v, vc) = basis[j].leading(cmp).unwrap();
            for (a, b, c, d) in ambiguity_placements(u, v, i == j) {
                if bound.is_some_and(|bd| a.len() + u.len() + b.len() > bd) {
                    continue;
                }
                let mut s = Poly::zero();
                s.add_scaled(field, &field.inv(uc).unwrap(), &a, &basis[i], &b);
                s.add_scaled(field, &field.neg(&field.inv(vc).unwrap()), &c, &basis[j], &d);
                let r = reduce(field, &s, basis, cmp);
                if !r.is_zero() {
                    return Err(format!("ambiguity ({i}, {j}) over {a:?}|{u:?}|{b:?} does not resolve"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

// ---------------------------------------------------------------------------
// problem corpus

#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub text: String,
    pub bound: Option<usize>,
}

fn system(name: &str, text: &str, bound: Option<usize>) -> System {
    System {
        name: name.into(),
        text: text.into(),
        bound,
    }
}

/// Small systems: commutators, braid-like relations and random quadratics.
pub fn corpus() -> Vec<System> {
    let mut out = vec![
        system("commutator", "vars x y\npoly y*x - x*y\n", None),
        system("commutative3", "vars x y z\npoly y*x - x*y\npoly z*x - x*z\npoly z*y - y*z\n", None),
        system("xyx", "vars x y\npoly x*y*x - x*y\n", Some(8)),
        system("braid2", "vars x y\npoly y*x*y - x*y*x\n", Some(8)),
        system("braid3", "vars a b c\npoly b*a*b - a*b*a\npoly c*b*c - b*c*b\npoly c*a - a*c\n", Some(7)),
        system("s3", "vars x y\npoly x^2 - 1\npoly y^2 - 1\npoly y*x*y - x*y*x\n", Some(8)),
        system("weyl", "vars x d\npoly d*x - x*d - 1\n", None),
        system("qplane", "vars x y\npoly y*x - 2*x*y\n", None),
        system("quantum_sl", "vars e f k\npoly k*e - 3*e*k\npoly f*k - 3*k*f\npoly f*e - e*f + k\n", Some(6)),
        system("cyclic_squares", "vars x y z\npoly x^2 - y*z\npoly y^2 - z*x\npoly z^2 - x*y\n", Some(8)),
        system("rotation", "vars x y z\npoly x*y - z\npoly y*z - x\npoly z*x - y\n", Some(8)),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for k in 0..5 {
        out.push(random_quadratic(&mut rng, k));
    }
    out
}

fn random_quadratic(rng: &mut impl Rng, k: usize) -> System {
    let names = ["x", "y", "z"];
    let nvars = rng.gen_range(2..=3);
    let npolys = rng.gen_range(1..=2);
    let mut text = format!("vars {}\n", names[..nvars].join(" "));
    for _ in 0..npolys {
        let mut words: Vec<String> = Vec::new();
        while words.len() < 3 {
            let len = if words.is_empty() { 2 } else { rng.gen_range(0..=2) };
            let w = if len == 0 {
                "1".to_string()
            } else {
                (0..len).map(|_| names[rng.gen_range(0..nvars)]).collect::<Vec<_>>().join("*")
            };
            if !words.contains(&w) {
                words.push(w);
            }
        }
        let terms: Vec<String> = words
            .iter()
            .map(|w| {
                let c = rng.gen_range(1..=5);
                let sign = if rng.gen_bool(0.5) { "-" } else { "+" };
                format!("{sign} {c}*{w}")
            })
            .collect();
        text.push_str(&format!("poly {}\n", terms.join(" ").trim_start_matches("+ ")));
    }
    System {
        name: format!("random{k}"),
        text,
        bound: Some(6),
    }
}

// ---------------------------------------------------------------------------
// running the library

pub struct Run<F: Field> {
    pub problem: ProblemFile,
    pub arena: Arena<F::Elem>,
    pub inputs: Vec<PolyId>,
    pub output: GbOutput<F::Elem>,
}

pub fn run_system<F: Field>(field: &F, sys: &System, config: &GbConfig) -> Run<F> {
    let problem = parse_problem(&sys.text).unwrap_or_else(|e| panic!("{}: {e}", sys.name));
    let mut arena = Arena::new(problem.order.clone());
    let inputs = problem.intern(field, &mut arena).unwrap();
    let config = GbConfig {
        degree_bound: sys.bound,
        ..config.clone()
    };
    let output = compute_gb(field, &mut arena, &inputs, &config).unwrap();
    Run {
        problem,
        arena,
        inputs,
        output,
    }
}

impl<F: Field> Run<F> {
    pub fn basis(&self) -> Vec<Poly<F::Elem>> {
        self.output.basis.iter().map(|&g| Poly::from_arena(&self.arena, g)).collect()
    }

    pub fn input_polys(&self) -> Vec<Poly<F::Elem>> {
        self.inputs.iter().map(|&f| Poly::from_arena(&self.arena, f)).collect()
    }

    /// Sorted leading words of the basis.
    pub fn leading_words(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self
            .output
            .basis
            .iter()
            .map(|&g| self.arena.word(self.arena.lm(g).unwrap()).to_vec())
            .collect();
        out.sort();
        out
    }
}

/// Rational number `n/d`.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_monic<F: Field>(field: &F, arena: &Arena<F::Elem>, g: PolyId) -> bool {
    field.is_one(arena.lc(g).unwrap())
}
