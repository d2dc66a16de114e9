//! Coefficient fields: prime fields of characteristic below 2^31 and the rationals.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::rational::{rref_multimodular, MultiModularConfig};
use crate::linalg::zp::{inverse_mod, rref_mod_p};
use crate::linalg::{Echelon, SparseMatrix};

/// Settings forwarded to the matrix reduction of one F4 iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EchelonOptions {
    pub threads: usize,
    pub tracer: bool,
    pub want_transform: bool,
}

impl Default for EchelonOptions {
    fn default() -> Self {
        EchelonOptions {
            threads: 1,
            tracer: true,
            want_transform: false,
        }
    }
}

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    /// 0 for the rationals.
    fn characteristic(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of `num / den`; `None` when `den` vanishes in the field.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Self::Elem>;
    /// Canonical signed rational representative, used for printing.
    fn to_ratio(&self, a: &Self::Elem) -> BigRational;
    /// Reduced row echelon form of `matrix`.
    fn echelon(
        &self,
        matrix: &SparseMatrix<Self::Elem>,
        options: &EchelonOptions,
    ) -> Result<Echelon<Self::Elem>>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_ratio(&BigInt::from(v), &BigInt::one())
            .expect("unit denominator")
    }
}

/// Deterministic primality test for 32-bit integers by trial division.
pub fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Z_p for a prime p < 2^31. Elements are residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::Config(format!(
                "characteristic {p} is not below 2^31"
            )));
        }
        if !is_prime_u32(p as u32) {
            return Err(Error::Config(format!("characteristic {p} is not prime")));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn characteristic(&self) -> u32 {
        self.p
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.p as u64 - *b as u64) % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        (*a != 0).then(|| inverse_mod(*a, self.p))
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<u32> {
        let p = BigInt::from(self.p);
        let n = num.mod_floor(&p).to_u32().unwrap();
        let d = den.mod_floor(&p).to_u32().unwrap();
        self.inv(&d).map(|di| self.mul(&n, &di))
    }
    fn to_ratio(&self, a: &u32) -> BigRational {
        let v = if *a > self.p / 2 {
            *a as i64 - self.p as i64
        } else {
            *a as i64
        };
        BigRational::from_integer(BigInt::from(v))
    }
    fn echelon(&self, matrix: &SparseMatrix<u32>, options: &EchelonOptions) -> Result<Echelon<u32>> {
        rref_mod_p(matrix, self.p, options.threads, options.want_transform)
            .map(|out| out.echelon)
    }
}

/// The rationals, reduced through the multi-modular echelon form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn characteristic(&self) -> u32 {
        0
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<BigRational> {
        (!den.is_zero()).then(|| BigRational::new(num.clone(), den.clone()))
    }
    fn to_ratio(&self, a: &BigRational) -> BigRational {
        a.clone()
    }
    fn echelon(
        &self,
        matrix: &SparseMatrix<BigRational>,
        options: &EchelonOptions,
    ) -> Result<Echelon<BigRational>> {
        let config = MultiModularConfig {
            threads: options.threads,
            tracer: options.tracer,
            ..MultiModularConfig::default()
        };
        if options.want_transform {
            let augmented = matrix.augment_identity(&BigRational::one());
            let out = rref_multimodular(&augmented, &config)?;
            Ok(out.echelon.split_augmented(matrix.ncols))
        } else {
            rref_multimodular(matrix, &config).map(|out| out.echelon)
        }
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
