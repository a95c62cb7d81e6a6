//! The two domain types everything else consumes: a positive diagonal
//! ternary quadratic form and an arithmetic progression.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::squarefree_part;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("form coefficients must be positive, got ({0}, {1}, {2})")]
    NonPositiveCoefficient(u64, u64, u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgressionError {
    #[error("progression modulus and residue must be positive, got k={0}, l={1}")]
    NonPositive(u64, u64),
}

/// A positive diagonal ternary form `a x^2 + b y^2 + c z^2`, coefficients
/// kept sorted `a <= b <= c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[u64; 3]", try_from = "[u64; 3]")]
pub struct Form {
    a: u64,
    b: u64,
    c: u64,
}

impl Form {
    /// Builds a form from coefficients in any order; rejects non-positive ones.
    pub fn new(a: u64, b: u64, c: u64) -> Result<Form, FormError> {
        if a == 0 || b == 0 || c == 0 {
            return Err(FormError::NonPositiveCoefficient(a, b, c));
        }
        let mut t = [a, b, c];
        t.sort_unstable();
        Ok(Form {
            a: t[0],
            b: t[1],
            c: t[2],
        })
    }

    #[inline]
    pub fn a(&self) -> u64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> u64 {
        self.b
    }

    #[inline]
    pub fn c(&self) -> u64 {
        self.c
    }

    #[inline]
    pub fn coefficients(&self) -> [u64; 3] {
        [self.a, self.b, self.c]
    }

    /// The discriminant `a * b * c`.
    #[inline]
    pub fn discriminant(&self) -> u64 {
        self.a * self.b * self.c
    }

    /// Value of the form at a point.
    #[inline]
    pub fn eval(&self, x: u64, y: u64, z: u64) -> u64 {
        self.a * x * x + self.b * y * y + self.c * z * z
    }

    /// Replaces each coefficient by its squarefree part and re-sorts.
    ///
    /// Any integer represented by the original form is still represented
    /// after normalizing (scaling a variable absorbs the square divisor),
    /// so universality over a progression is preserved in that direction.
    pub fn normalize_squarefree(&self) -> Form {
        Form::new(
            squarefree_part(self.a),
            squarefree_part(self.b),
            squarefree_part(self.c),
        )
        .expect("squarefree part of a positive integer is positive")
    }

    /// True iff all three coefficients are squarefree.
    pub fn has_squarefree_coefficients(&self) -> bool {
        crate::arith::is_squarefree(self.a)
            && crate::arith::is_squarefree(self.b)
            && crate::arith::is_squarefree(self.c)
    }

    /// The form with every coefficient multiplied by `d`.
    pub fn scale(&self, d: u64) -> Result<Form, FormError> {
        Form::new(self.a * d, self.b * d, self.c * d)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\u{27e8}{},{},{}\u{27e9}", self.a, self.b, self.c)
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({},{},{})", self.a, self.b, self.c)
    }
}

impl From<Form> for [u64; 3] {
    fn from(q: Form) -> [u64; 3] {
        q.coefficients()
    }
}

impl TryFrom<[u64; 3]> for Form {
    type Error = FormError;

    fn try_from(t: [u64; 3]) -> Result<Form, FormError> {
        Form::new(t[0], t[1], t[2])
    }
}

/// The arithmetic progression `{ k x + l : x >= 0 }`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Progression {
    modulus: u64,
    residue: u64,
}

impl Progression {
    pub fn new(modulus: u64, residue: u64) -> Result<Progression, ProgressionError> {
        if modulus == 0 || residue == 0 {
            return Err(ProgressionError::NonPositive(modulus, residue));
        }
        Ok(Progression { modulus, residue })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn residue(&self) -> u64 {
        self.residue
    }

    /// Membership: `n >= l` and `n ≡ l (mod k)`.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        n >= self.residue && (n - self.residue) % self.modulus == 0
    }

    /// Number of elements `<= bound`.
    pub fn count_upto(&self, bound: u64) -> u64 {
        if bound < self.residue {
            0
        } else {
            (bound - self.residue) / self.modulus + 1
        }
    }

    /// Elements `<= bound`, ascending.
    pub fn elements_upto(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        let k = self.modulus;
        let l = self.residue;
        (0..self.count_upto(bound)).map(move |i| l + i * k)
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{{{},{}}}", self.modulus, self.residue)
    }
}
