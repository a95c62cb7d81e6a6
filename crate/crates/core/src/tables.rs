//! Precomputed prime and squarefree flags, filled once per run and shared
//! read-only by the search and survey drivers.

use thiserror::Error;

use crate::bits::Bits;

/// Hard cap on the table bound: two bitsets of this many bits stay around
/// one gigabyte.
pub const MAX_TABLE_BOUND: u64 = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("table bound must be at least 2, got {0}")]
    BoundTooSmall(u64),
    #[error("table bound {bound} exceeds the configured maximum {max}")]
    BoundExceedsBudget { bound: u64, max: u64 },
}

/// Prime and squarefree flags for every integer up to a bound.
pub struct NumberTables {
    bound: u64,
    prime: Bits,
    squarefree: Bits,
}

impl NumberTables {
    /// Sieves both tables up to `bound` (inclusive).
    pub fn build(bound: u64) -> Result<NumberTables, TableError> {
        if bound < 2 {
            return Err(TableError::BoundTooSmall(bound));
        }
        if bound > MAX_TABLE_BOUND {
            return Err(TableError::BoundExceedsBudget {
                bound,
                max: MAX_TABLE_BOUND,
            });
        }
        let len = bound + 1;
        // composite / non-squarefree marks, inverted on query
        let mut composite = Bits::new(len);
        let mut squarish = Bits::new(len);
        composite.set(0);
        composite.set(1);
        squarish.set(0);
        let mut p = 2u64;
        while p * p <= bound {
            if !composite.get(p) {
                let mut m = p * p;
                while m <= bound {
                    composite.set(m);
                    m += p;
                }
            }
            p += 1;
        }
        let mut d = 2u64;
        while d * d <= bound {
            if !composite.get(d) {
                let step = d * d;
                let mut m = step;
                while m <= bound {
                    squarish.set(m);
                    m += step;
                }
            }
            d += 1;
        }
        // store positive flags
        let mut prime = Bits::new(len);
        let mut squarefree = Bits::new(len);
        for n in 0..len {
            if !composite.get(n) {
                prime.set(n);
            }
            if !squarish.get(n) {
                squarefree.set(n);
            }
        }
        Ok(NumberTables {
            bound,
            prime,
            squarefree,
        })
    }

    #[inline]
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Prime flag; falls back to a direct primality test past the bound.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.bound {
            self.prime.get(n)
        } else {
            crate::arith::is_prime(n)
        }
    }

    /// Squarefree flag; falls back to trial division past the bound.
    #[inline]
    pub fn is_squarefree(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        if n <= self.bound {
            self.squarefree.get(n)
        } else {
            crate::arith::is_squarefree(n)
        }
    }

    /// Primes in `[2, bound]`, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.bound).filter(move |&n| self.prime.get(n))
    }

    /// Primes in `[lo, hi]`, ascending; transparently extends past the bound.
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        (lo.max(2)..=hi).filter(move |&n| self.is_prime(n))
    }
}
