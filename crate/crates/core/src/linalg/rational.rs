//! Multi-modular reduced row echelon form over Q.
//!
//! The matrix is scaled row-wise to integers, reduced modulo several 31-bit
//! primes, and the modular results with the maximal pivot structure are
//! lifted by Chinese remaindering and rational reconstruction. A lifted
//! matrix `R` is accepted only when `H(dR) · H(A') · n < Π p`, where `d`
//! clears the denominators of `R`; this makes the result exact. Otherwise the
//! prime set is enlarged and the loop repeats.
//!
//! The tracer records which rows vanished during the first modular run and
//! drops them from all later runs.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::is_prime_u32;
use crate::linalg::zp::rref_mod_p;
use crate::linalg::{Echelon, SparseMatrix, SparseRow};

/// First prime: the Mersenne prime 2^31 - 1.
pub const FIRST_PRIME: u32 = 2_147_483_647;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiModularConfig {
    pub threads: usize,
    pub tracer: bool,
    pub initial_primes: usize,
}

impl Default for MultiModularConfig {
    fn default() -> Self {
        MultiModularConfig {
            threads: 1,
            tracer: true,
            initial_primes: 2,
        }
    }
}

/// Integer matrix obtained by scaling each row by the LCM of its denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub ncols: usize,
    pub rows: Vec<SparseRow<BigInt>>,
    /// The per-row scale factors.
    pub scales: Vec<BigInt>,
}

impl IntegerMatrix {
    /// H(A): maximum absolute entry, 0 for the zero matrix.
    pub fn height(&self) -> BigInt {
        self.rows
            .iter()
            .flat_map(|r| r.vals.iter())
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    fn reduce_mod(&self, p: u32, skip: &[bool]) -> SparseMatrix<u32> {
        let modulus = BigInt::from(p);
        let rows = self
            .rows
            .iter()
            .zip(skip)
            .filter(|(_, &s)| !s)
            .map(|(row, _)| {
                SparseRow::from_pairs(row.iter().filter_map(|(c, v)| {
                    let r = v.mod_floor(&modulus).to_u32().unwrap();
                    (r != 0).then_some((c, r))
                }))
            })
            .collect();
        SparseMatrix {
            ncols: self.ncols,
            rows,
        }
    }
}

pub fn clear_denominators(a: &SparseMatrix<BigRational>) -> IntegerMatrix {
    let mut rows = Vec::with_capacity(a.rows.len());
    let mut scales = Vec::with_capacity(a.rows.len());
    for row in &a.rows {
        let scale = row
            .vals
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints = SparseRow {
            cols: row.cols.clone(),
            vals: row
                .vals
                .iter()
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect(),
        };
        rows.push(ints);
        scales.push(scale);
    }
    IntegerMatrix {
        ncols: a.ncols,
        rows,
        scales,
    }
}

/// Ascending pivot columns of a modular echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotVector(pub Vec<u32>);

impl PivotVector {
    /// Longer vectors are larger; among equal lengths the vector with the
    /// earlier pivot columns is larger (a bad prime pushes pivots right).
    pub fn cmp_maximality(&self, other: &PivotVector) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Distinct primes below 2^31 with their running product.
#[derive(Debug, Clone)]
pub struct PrimeSet {
    primes: Vec<u32>,
    product: BigInt,
}

impl PrimeSet {
    pub fn new(primes: Vec<u32>) -> Result<Self> {
        let mut seen = primes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != primes.len() {
            return Err(Error::Config("duplicate primes in prime set".into()));
        }
        if let Some(&bad) = primes.iter().find(|&&p| !is_prime_u32(p) || p as u64 >= 1 << 31) {
            return Err(Error::Config(format!("{bad} is not a prime below 2^31")));
        }
        let product = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        Ok(PrimeSet { primes, product })
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn product(&self) -> &BigInt {
        &self.product
    }
}

/// Descending primes below 2^31, starting at 2^31 - 1.
#[derive(Debug, Clone)]
pub struct PrimeSource {
    next: u32,
}

impl Default for PrimeSource {
    fn default() -> Self {
        PrimeSource { next: FIRST_PRIME }
    }
}

impl Iterator for PrimeSource {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.next >= 2 {
            let candidate = self.next;
            self.next -= 1;
            if is_prime_u32(candidate) {
                return Some(candidate);
            }
        }
        None
    }
}

/// The unique `x` in `[0, Π p)` with `x ≡ residues[i] (mod p_i)`.
pub fn crt_combine(residues: &[u32], moduli: &PrimeSet) -> Result<BigInt> {
    if residues.len() != moduli.primes.len() {
        return Err(Error::Config("residue and modulus counts differ".into()));
    }
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &p) in residues.iter().zip(&moduli.primes) {
        x = crt_step(&x, &m, r, p);
        m *= p;
    }
    Ok(x)
}

/// Extends `x mod m` by `r mod p` (Garner step).
fn crt_step(x: &BigInt, m: &BigInt, r: u32, p: u32) -> BigInt {
    let pb = BigInt::from(p);
    let x_mod_p = x.mod_floor(&pb).to_u64().unwrap();
    let m_mod_p = m.mod_floor(&pb).to_u32().unwrap();
    let m_inv = crate::linalg::zp::inverse_mod(m_mod_p, p) as u64;
    let diff = (r as u64 + p as u64 - x_mod_p) % p as u64;
    let t = diff * m_inv % p as u64;
    x + m * t
}

/// Rational reconstruction with bounds `N = D = floor(sqrt(M / 2))`.
///
/// Returns the unique `a/b` with `|a| ≤ N`, `0 < b ≤ D`, `gcd(b, M) = 1` and
/// `a ≡ x·b (mod M)`, or `None` if there is none.
pub fn rational_reconstruct(x: &BigInt, modulus: &BigInt) -> Option<BigRational> {
    let bound = (modulus / 2u32).sqrt();
    let (mut r0, mut r1) = (modulus.clone(), x.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !t1.gcd(modulus).is_one() {
        return None;
    }
    let (num, den) = if t1.sign() == Sign::Minus {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    Some(BigRational::new(num, den))
}

/// Rows to drop in every modular run after the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tracer {
    pub prime: u32,
    pub zero_rows: Vec<usize>,
}

impl Tracer {
    pub fn build(prime: u32, zero_rows: Vec<usize>) -> Self {
        Tracer { prime, zero_rows }
    }

    /// Row mask: `true` for rows the tracer zeroes out.
    pub fn mask(&self, nrows: usize) -> Vec<bool> {
        let mut skip = vec![false; nrows];
        for &r in &self.zero_rows {
            skip[r] = true;
        }
        skip
    }

    /// The matrix with traced rows removed.
    pub fn apply<E: Clone>(&self, matrix: &SparseMatrix<E>) -> SparseMatrix<E> {
        let skip = self.mask(matrix.rows.len());
        SparseMatrix {
            ncols: matrix.ncols,
            rows: matrix
                .rows
                .iter()
                .zip(&skip)
                .filter(|(_, &s)| !s)
                .map(|(r, _)| r.clone())
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiModularOutput {
    pub echelon: Echelon<BigRational>,
    /// Primes whose images were combined into the accepted result.
    pub primes_used: Vec<u32>,
    pub tracer: Option<Tracer>,
}

#[derive(Debug, Clone)]
pub(crate) struct ModularImage {
    pub prime: u32,
    pub echelon: Echelon<u32>,
}

/// Exact reduced row echelon form of a rational matrix.
pub fn rref_multimodular(
    a: &SparseMatrix<BigRational>,
    config: &MultiModularConfig,
) -> Result<MultiModularOutput> {
    rref_multimodular_with(a, config, |_, image| image)
}

/// Same as [`rref_multimodular`], with a hook applied to each modular image
/// before it enters the lifting step.
pub(crate) fn rref_multimodular_with(
    a: &SparseMatrix<BigRational>,
    config: &MultiModularConfig,
    mut inspect: impl FnMut(usize, ModularImage) -> ModularImage,
) -> Result<MultiModularOutput> {
    let int = clear_denominators(a);
    let height = int.height();
    let nrows = a.rows.len();
    let ncols_big = BigInt::from(a.ncols.max(1));
    if height.is_zero() {
        return Ok(MultiModularOutput {
            echelon: Echelon {
                nrows,
                ncols: a.ncols,
                rows: Vec::new(),
                transforms: None,
            },
            primes_used: Vec::new(),
            tracer: None,
        });
    }

    let mut source = PrimeSource::default();
    let mut images: Vec<ModularImage> = Vec::new();
    let mut tracer: Option<Tracer> = None;
    let mut target = config.initial_primes.max(1);
    let mut run_index = 0;

    loop {
        while images.len() < target {
            let p = source
                .next()
                .ok_or_else(|| Error::Internal("ran out of 31-bit primes".into()))?;
            let pb = BigInt::from(p);
            if int.scales.iter().any(|s| s.is_multiple_of(&pb)) {
                continue;
            }
            let skip = match &tracer {
                Some(t) => t.mask(nrows),
                None => vec![false; nrows],
            };
            let reduced = int.reduce_mod(p, &skip);
            let out = rref_mod_p(&reduced, p, config.threads, false)?;
            if config.tracer && tracer.is_none() {
                tracer = Some(Tracer::build(p, out.zero_rows.clone()));
            }
            let mut echelon = out.echelon;
            echelon.nrows = nrows;
            let image = inspect(run_index, ModularImage { prime: p, echelon });
            run_index += 1;
            images.push(image);
        }

        let best = images
            .iter()
            .map(|im| PivotVector(im.echelon.pivots()))
            .max_by(|x, y| x.cmp_maximality(y))
            .expect("at least one image");
        let chosen: Vec<&ModularImage> = images
            .iter()
            .filter(|im| PivotVector(im.echelon.pivots()) == best)
            .collect();
        let primes = PrimeSet::new(chosen.iter().map(|im| im.prime).collect())?;

        if let Some(rows) = lift(&chosen, &primes, &best) {
            let common = rows
                .iter()
                .flat_map(|r| r.vals.iter())
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let scaled_height = rows
                .iter()
                .flat_map(|r| r.vals.iter())
                .map(|v| (v.numer() * (&common / v.denom())).abs())
                .max()
                .unwrap_or_else(BigInt::zero);
            if scaled_height * &height * &ncols_big < *primes.product() {
                return Ok(MultiModularOutput {
                    echelon: Echelon {
                        nrows,
                        ncols: a.ncols,
                        rows,
                        transforms: None,
                    },
                    primes_used: primes.primes().to_vec(),
                    tracer,
                });
            }
        }
        target = images.len() * 2;
    }
}

/// Entry-wise CRT and rational reconstruction of images sharing one pivot vector.
fn lift(
    images: &[&ModularImage],
    primes: &PrimeSet,
    pivots: &PivotVector,
) -> Option<Vec<SparseRow<BigRational>>> {
    let mut rows = Vec::with_capacity(pivots.0.len());
    let k = images.len();
    let mut cursors = vec![0usize; k];
    for (ri, &pivot) in pivots.0.iter().enumerate() {
        let mut row = SparseRow::new();
        row.cols.push(pivot);
        row.vals.push(BigRational::one());
        // Merge the k sparse rows column by column.
        for c in cursors.iter_mut() {
            *c = 1;
        }
        loop {
            let col = images
                .iter()
                .zip(&cursors)
                .filter_map(|(im, &cur)| im.echelon.rows[ri].cols.get(cur).copied())
                .min();
            let Some(col) = col else { break };
            let mut residues = Vec::with_capacity(k);
            for (im, cur) in images.iter().zip(cursors.iter_mut()) {
                let r = &im.echelon.rows[ri];
                if r.cols.get(*cur) == Some(&col) {
                    residues.push(r.vals[*cur]);
                    *cur += 1;
                } else {
                    residues.push(0);
                }
            }
            let x = crt_combine(&residues, primes).ok()?;
            let value = rational_reconstruct(&x, primes.product())?;
            if !value.is_zero() {
                row.cols.push(col);
                row.vals.push(value);
            }
        }
        rows.push(row);
    }
    Some(rows)
}
