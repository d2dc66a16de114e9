//! Reduced row echelon form over Z_p for primes p < 2^31.
//!
//! Rows are first permuted into staircase order. The forward phase walks the
//! rows top-down: a row whose leading column has no pivot yet becomes a pivot
//! row; any other row is copied into a dense buffer of signed 64-bit
//! accumulators and reduced by every known pivot in ascending column order.
//! Modular reduction is delayed: after each fused multiply-subtract a
//! negative accumulator is lifted by p² without branching, and the full
//! reduction happens once per entry. The backward phase then clears every
//! pivot column above and below its pivot.
//!
//! With more than one thread, rows are handed out from a shared counter.
//! Each worker owns its dense buffer and registers pivots with a
//! compare-and-swap on the shared pivot array; a worker that loses the race
//! reloads its row and keeps reducing. The reduced echelon form is unique, so
//! the output does not depend on the schedule.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::is_prime_u32;
use crate::linalg::{Echelon, SparseMatrix, SparseRow};

const NO_PIVOT: usize = usize::MAX;

/// Mersenne exponents for which the shift-and-mask reduction is used.
pub const MERSENNE_EXPONENTS: [u32; 4] = [13, 17, 19, 31];

/// Lifts a negative accumulator by p² without a conditional branch.
///
/// Requires `v > -p²`; the result is congruent to `v` and nonnegative.
#[inline(always)]
pub fn branchfree_fix(v: i64, p: u64) -> i64 {
    v + ((v >> 63) & (p * p) as i64)
}

/// `v mod (2^b - 1)` for `v < 2^(2b)`, using shifts, adds and a mask only.
#[inline(always)]
pub fn mersenne_reduce(v: u64, b: u32) -> u64 {
    let p = (1u64 << b) - 1;
    let v1 = v + 1;
    let z = ((v1 >> b) + v1) >> b;
    (v + z) & p
}

/// The Mersenne exponent `b` if `p = 2^b - 1` with `b` in [`MERSENNE_EXPONENTS`].
pub fn mersenne_exponent(p: u32) -> Option<u32> {
    let q = p as u64 + 1;
    if !q.is_power_of_two() {
        return None;
    }
    let b = q.trailing_zeros();
    MERSENNE_EXPONENTS.contains(&b).then_some(b)
}

/// Modular inverse of a nonzero residue by the extended Euclidean algorithm.
pub fn inverse_mod(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} is not invertible modulo {p}");
    t0.rem_euclid(p as i64) as u32
}

/// Scales a nonzero row so its first value is 1.
pub fn normalize_row(row: &mut SparseRow<u32>, p: u32) {
    let Some(&first) = row.vals.first() else {
        return;
    };
    if first == 1 {
        return;
    }
    let inv = inverse_mod(first, p) as u64;
    for v in &mut row.vals {
        *v = ((*v as u64 * inv) % p as u64) as u32;
    }
}

/// Row permutation into staircase order: ascending leading column, ties by
/// original index, zero rows last.
pub fn staircase_sort<E>(matrix: &SparseMatrix<E>) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..matrix.rows.len()).collect();
    perm.sort_by_key(|&i| (matrix.rows[i].lead().unwrap_or(u32::MAX), i));
    perm
}

trait Reducer: Copy + Send + Sync {
    fn reduce(&self, v: u64) -> u64;
}

#[derive(Clone, Copy)]
struct StandardModulus(u64);

impl Reducer for StandardModulus {
    #[inline(always)]
    fn reduce(&self, v: u64) -> u64 {
        v % self.0
    }
}

#[derive(Clone, Copy)]
struct MersenneModulus(u32);

impl Reducer for MersenneModulus {
    #[inline(always)]
    fn reduce(&self, v: u64) -> u64 {
        mersenne_reduce(v, self.0)
    }
}

/// Result of [`rref_mod_p`].
#[derive(Debug, Clone)]
pub struct ZpEchelon {
    pub echelon: Echelon<u32>,
    /// Input rows that reduced to zero during the forward phase. With more
    /// than one thread the choice among linearly dependent rows depends on
    /// scheduling; the echelon form does not.
    pub zero_rows: Vec<usize>,
}

/// Reduced row echelon form of `matrix` over Z_p.
///
/// With `want_transform`, each output row also carries the combination of
/// input rows that produces it.
pub fn rref_mod_p(
    matrix: &SparseMatrix<u32>,
    p: u32,
    threads: usize,
    want_transform: bool,
) -> Result<ZpEchelon> {
    if !is_prime_u32(p) || p as u64 >= 1 << 31 {
        return Err(Error::Config(format!(
            "modulus {p} is not a prime below 2^31"
        )));
    }
    for row in &matrix.rows {
        if let Some(&bad) = row.vals.iter().find(|&&v| v >= p) {
            return Err(Error::Domain(format!("entry {bad} is not reduced modulo {p}")));
        }
        if row.cols.iter().any(|&c| c as usize >= matrix.ncols) {
            return Err(Error::Domain("column index out of range".into()));
        }
    }
    if want_transform {
        let augmented = matrix.augment_identity(&1);
        let out = eliminate(&augmented, p, threads)?;
        return Ok(ZpEchelon {
            echelon: out.echelon.split_augmented(matrix.ncols),
            zero_rows: out.zero_rows,
        });
    }
    eliminate(matrix, p, threads)
}

fn eliminate(matrix: &SparseMatrix<u32>, p: u32, threads: usize) -> Result<ZpEchelon> {
    match mersenne_exponent(p) {
        Some(b) => Ok(eliminate_with(matrix, p, threads, MersenneModulus(b))),
        None => Ok(eliminate_with(matrix, p, threads, StandardModulus(p as u64))),
    }
}

struct Forward<R> {
    rows: Vec<SparseRow<u32>>,
    ncols: usize,
    p: u64,
    reducer: R,
    pivots: Vec<AtomicUsize>,
    pivot_rows: Vec<OnceLock<SparseRow<u32>>>,
    next: AtomicUsize,
    zero: Vec<OnceLock<()>>,
}

fn eliminate_with<R: Reducer>(
    matrix: &SparseMatrix<u32>,
    p: u32,
    threads: usize,
    reducer: R,
) -> ZpEchelon {
    let n = matrix.ncols;
    let perm = staircase_sort(matrix);
    let rows: Vec<SparseRow<u32>> = perm
        .iter()
        .map(|&i| {
            let row = &matrix.rows[i];
            SparseRow::from_pairs(row.iter().filter(|(_, &v)| v != 0).map(|(c, &v)| (c, v)))
        })
        .collect();
    let m = rows.len();
    let forward = Forward {
        rows,
        ncols: n,
        p: p as u64,
        reducer,
        pivots: (0..n).map(|_| AtomicUsize::new(NO_PIVOT)).collect(),
        pivot_rows: (0..n).map(|_| OnceLock::new()).collect(),
        next: AtomicUsize::new(0),
        zero: (0..m).map(|_| OnceLock::new()).collect(),
    };

    let threads = threads.max(1);
    if threads == 1 || m < 2 {
        forward.work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| forward.work());
            }
        });
    }

    let mut zero_rows: Vec<usize> = (0..m)
        .filter(|&i| forward.zero[i].get().is_some())
        .map(|i| perm[i])
        .collect();
    zero_rows.sort_unstable();

    let mut by_column: Vec<Option<SparseRow<u32>>> = forward
        .pivot_rows
        .into_iter()
        .map(|cell| cell.into_inner())
        .collect();
    backward(&mut by_column, n, p as u64, reducer);

    ZpEchelon {
        echelon: Echelon {
            nrows: m,
            ncols: n,
            rows: by_column.into_iter().flatten().collect(),
            transforms: None,
        },
        zero_rows,
    }
}

impl<R: Reducer> Forward<R> {
    fn work(&self) {
        let mut buffer = vec![0i64; self.ncols];
        loop {
            let i = self.next.fetch_add(1, Ordering::Relaxed);
            if i >= self.rows.len() {
                break;
            }
            self.reduce_row(i, &mut buffer);
        }
    }

    fn pivot_row(&self, col: usize) -> Option<&SparseRow<u32>> {
        if self.pivots[col].load(Ordering::Acquire) == NO_PIVOT {
            return None;
        }
        // The registering thread publishes the row right after its CAS.
        loop {
            if let Some(row) = self.pivot_rows[col].get() {
                return Some(row);
            }
            std::thread::yield_now();
        }
    }

    fn try_register(&self, col: usize, row_index: usize, row: SparseRow<u32>) -> bool {
        let won = self.pivots[col]
            .compare_exchange(NO_PIVOT, row_index, Ordering::AcqRel, Ordering::Acquire)
            .is_ok();
        if won {
            self.pivot_rows[col]
                .set(row)
                .expect("pivot slot written once");
        }
        won
    }

    fn reduce_row(&self, i: usize, buffer: &mut [i64]) {
        let source = &self.rows[i];
        let Some(lead) = source.lead() else {
            let _ = self.zero[i].set(());
            return;
        };
        if self.pivots[lead as usize].load(Ordering::Acquire) == NO_PIVOT {
            let mut row = source.clone();
            normalize_row(&mut row, self.p as u32);
            if self.try_register(lead as usize, i, row) {
                return;
            }
        }

        load(buffer, source);
        let mut start = lead as usize;
        loop {
            let candidate = self.reduce_dense(buffer, start);
            let Some(col) = candidate else {
                let _ = self.zero[i].set(());
                return;
            };
            let mut row = collect(buffer, col);
            normalize_row(&mut row, self.p as u32);
            if self.try_register(col, i, row.clone()) {
                return;
            }
            // Lost the race for this column: reduce further by the new pivot.
            load(buffer, &row);
            start = col;
        }
    }

    /// Reduces buffer entries from `start` by all known pivots. Returns the
    /// first surviving column; every entry is left fully reduced.
    fn reduce_dense(&self, buffer: &mut [i64], start: usize) -> Option<usize> {
        let p = self.p;
        let mut candidate = None;
        for j in start..self.ncols {
            if buffer[j] == 0 {
                continue;
            }
            let v = self.reducer.reduce(buffer[j] as u64);
            buffer[j] = v as i64;
            if v == 0 {
                continue;
            }
            match self.pivot_row(j) {
                Some(pivot) => {
                    subtract_multiple(buffer, pivot, v, p);
                    buffer[j] = 0;
                }
                None => {
                    if candidate.is_none() {
                        candidate = Some(j);
                    }
                }
            }
        }
        candidate
    }
}

#[inline]
fn load(buffer: &mut [i64], row: &SparseRow<u32>) {
    for (c, &v) in row.iter() {
        buffer[c as usize] = v as i64;
    }
}

/// `buffer -= factor * pivot` on the entries after the pivot's leading one.
#[inline]
fn subtract_multiple(buffer: &mut [i64], pivot: &SparseRow<u32>, factor: u64, p: u64) {
    for (&c, &val) in pivot.cols[1..].iter().zip(&pivot.vals[1..]) {
        let slot = &mut buffer[c as usize];
        *slot = branchfree_fix(*slot - (factor * val as u64) as i64, p);
        debug_assert!(*slot >= 0 && (*slot as u64) < p * p + p);
    }
}

/// Moves the (already reduced) buffer entries from `from` into a sparse row
/// and clears them.
fn collect(buffer: &mut [i64], from: usize) -> SparseRow<u32> {
    let mut row = SparseRow::new();
    for (j, slot) in buffer.iter_mut().enumerate().skip(from) {
        if *slot != 0 {
            row.cols.push(j as u32);
            row.vals.push(*slot as u32);
            *slot = 0;
        }
    }
    row
}

/// Clears every pivot column outside its pivot row, processing pivots from
/// the rightmost column leftwards so each row is reduced by final rows only.
fn backward<R: Reducer>(by_column: &mut [Option<SparseRow<u32>>], ncols: usize, p: u64, reducer: R) {
    let mut buffer = vec![0i64; ncols];
    for j in (0..ncols).rev() {
        let Some(row) = by_column[j].take() else {
            continue;
        };
        if row.len() == 1 {
            by_column[j] = Some(row);
            continue;
        }
        load(&mut buffer, &row);
        for k in (j + 1)..ncols {
            if buffer[k] == 0 {
                continue;
            }
            let v = reducer.reduce(buffer[k] as u64);
            buffer[k] = v as i64;
            if v == 0 {
                continue;
            }
            if let Some(pivot) = &by_column[k] {
                subtract_multiple(&mut buffer, pivot, v, p);
                buffer[k] = 0;
            }
        }
        by_column[j] = Some(collect(&mut buffer, j));
    }
}
