//! Place-by-place analysis of diagonal ternary forms: quadratic residue
//! symbols, Hilbert symbols, anisotropy tests and the two constructive
//! results built on them (the companion form `<1,q,p>` anisotropic exactly
//! at one prime, and the scaled witness for arbitrary progressions).

use thiserror::Error;

use crate::arith::{factorize, gcd, is_prime, is_squarefree, valuation};
use crate::form::Form;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the modulus {k} divides the residue {l}; no almost-universal witness exists")]
    ResidueDivisibleByModulus { k: u64, l: u64 },
}

/// A place of the rationals: the real place or a finite prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Infinity => write!(f, "infinity"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`: 0 if `p | a`, +1 for
/// nonzero quadratic residues, -1 otherwise.
///
/// Computed by the binary reciprocity algorithm in O(log p) steps.
///
/// Panics on even or composite `p`.
pub fn legendre_symbol(a: i64, p: u64) -> i32 {
    assert!(p > 2 && p % 2 == 1, "legendre_symbol requires an odd prime, got {p}");
    assert!(is_prime(p), "legendre_symbol requires a prime modulus, got {p}");
    jacobi(a.rem_euclid(p as i64) as u64, p)
}

/// Jacobi symbol for odd positive `n`; equals the Legendre symbol when `n`
/// is prime.
fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

#[inline]
fn sign_exponent_half(u: i64) -> u32 {
    // (u - 1) / 2 mod 2 for odd u; u - 1 is even so truncation is exact
    (((u - 1) / 2).rem_euclid(2)) as u32
}

#[inline]
fn sign_exponent_eighth(u: i64) -> u32 {
    // (u^2 - 1) / 8 mod 2 for odd u
    (((u * u - 1) / 8) % 2) as u32
}

fn split_valuation(n: i64, p: u64) -> (u32, i64) {
    debug_assert!(n != 0);
    let (v, m) = valuation(n.unsigned_abs(), p);
    (v, if n < 0 { -(m as i64) } else { m as i64 })
}

/// Hilbert symbol `(a, b)_v`: +1 iff `z^2 = a x^2 + b y^2` has a nontrivial
/// solution over the completion at `v`, evaluated by the closed form in
/// valuations and residue symbols.
///
/// At the real place the symbol is -1 exactly when both arguments are
/// negative. At an odd prime, with `a = p^alpha u` and `b = p^beta w`,
/// `(a,b)_p = (-1)^(alpha beta eps(p)) (u/p)^beta (w/p)^alpha`.
/// At 2, `(a,b)_2 = (-1)^(eps(u)eps(w) + alpha omega(w) + beta omega(u))`,
/// where `eps(u) = (u-1)/2` and `omega(u) = (u^2-1)/8` mod 2.
///
/// Panics if either argument is zero or the finite place is not prime.
pub fn hilbert_symbol(a: i64, b: i64, v: Place) -> i32 {
    assert!(a != 0 && b != 0, "hilbert_symbol requires nonzero arguments");
    match v {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let e = sign_exponent_half(u) * sign_exponent_half(w)
                + alpha * sign_exponent_eighth(w)
                + beta * sign_exponent_eighth(u);
            if e % 2 == 1 {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            assert!(is_prime(p), "hilbert_symbol at a non-prime place {p}");
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let eps = ((p - 1) / 2 % 2) as u32;
            let mut s = 1i32;
            if (alpha * beta * eps) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre_symbol(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre_symbol(w, p);
            }
            s
        }
    }
}

/// True iff the form has no nontrivial zero over the completion at `v`.
///
/// A positive form is always anisotropic at the real place. At a finite
/// prime, `<a,b,c>` is isotropic exactly when `(-ab, -ac)_p = +1`
/// (multiply a zero through by `a` to see the equivalence), and a prime
/// not dividing `2abc` is always isotropic.
pub fn is_anisotropic(q: &Form, v: Place) -> bool {
    match v {
        Place::Infinity => true,
        Place::Finite(p) => {
            assert!(is_prime(p), "is_anisotropic at a non-prime place {p}");
            if (2 * q.discriminant()) % p != 0 {
                return false;
            }
            let a = q.a() as i64;
            let b = q.b() as i64;
            let c = q.c() as i64;
            hilbert_symbol(-a * b, -a * c, Place::Finite(p)) == -1
        }
    }
}

/// The finite places at which the form is anisotropic, ascending.
///
/// Only primes dividing `2 abc` are candidates.
pub fn anisotropic_places(q: &Form) -> Vec<u64> {
    let mut out = Vec::new();
    for (p, _) in factorize(2 * q.discriminant()) {
        if is_anisotropic(q, Place::Finite(p)) {
            out.push(p);
        }
    }
    out
}

/// Outcome of the companion construction: `<1,q,p>` anisotropic exactly
/// at `p`, with `q = 1` or a prime distinct from `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompanionResult {
    pub p: u64,
    pub q: u64,
    pub form: Form,
}

/// Builds the companion form for a prime `p`:
///
/// * `p = 2` -> `<1,1,2>`,
/// * `p ≡ 3 (mod 8)` -> `<1,1,p>`,
/// * `p ≡ 5, 7 (mod 8)` -> `<1,2,p>`,
/// * `p ≡ 1 (mod 8)` -> `<1,q,p>` for the smallest prime `q ≡ 3 (mod 4)`
///   with `(q/p) = -1`.
///
/// The result is re-verified to be anisotropic exactly at `{p}` before it
/// is returned; a verification failure is an internal bug and panics.
pub fn companion_form(p: u64) -> Result<CompanionResult, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    let q = if p == 2 {
        1
    } else {
        match p % 8 {
            3 => 1,
            5 | 7 => 2,
            _ => smallest_nonresidue_prime(p), // p ≡ 1 (mod 8)
        }
    };
    let form = Form::new(1, q, p).expect("companion coefficients are positive");
    let places = anisotropic_places(&form);
    assert_eq!(
        places,
        vec![p],
        "companion verification failed for p={p}: {form} is anisotropic at {places:?}"
    );
    Ok(CompanionResult { p, q, form })
}

/// Smallest prime `q ≡ 3 (mod 4)` that is a quadratic non-residue mod `p`.
fn smallest_nonresidue_prime(p: u64) -> u64 {
    let mut q = 3u64;
    loop {
        if is_prime(q) && legendre_symbol(q as i64, p) == -1 {
            return q;
        }
        q += 4;
    }
}

/// A scaled companion form witnessing almost-universality over `S_{k,l}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlmostUniversalWitness {
    /// `gcd(k, l)`; the witness is the companion form scaled by this.
    pub scale: u64,
    /// The prime dividing `k / scale` but not `l / scale` that the
    /// companion was built for.
    pub prime: u64,
    pub companion: CompanionResult,
    /// The scaled form `scale * <1, q, prime>`.
    pub form: Form,
}

/// Produces a form that misses at most finitely many elements of `S_{k,l}`,
/// for any `k` not dividing `l`:
/// take `d = gcd(k,l)`, pick the smallest prime `p | k/d` (automatically
/// `p` does not divide `l/d`), and scale the companion of `p` by `d`.
pub fn almost_universal_witness(k: u64, l: u64) -> Result<AlmostUniversalWitness, LocalError> {
    assert!(k >= 1 && l >= 1, "progression parameters must be positive");
    if l % k == 0 {
        return Err(LocalError::ResidueDivisibleByModulus { k, l });
    }
    let d = gcd(k, l);
    let k0 = k / d;
    debug_assert!(k0 > 1);
    let p = factorize(k0)[0].0;
    debug_assert!((l / d) % p != 0);
    let companion = companion_form(p)?;
    let form = companion
        .form
        .scale(d)
        .expect("scaling by a positive integer keeps coefficients positive");
    Ok(AlmostUniversalWitness {
        scale: d,
        prime: p,
        companion,
        form,
    })
}

/// True iff the values `a x^2 + b y^2` cover every nonzero class mod `p`.
/// Direct double loop over residues.
///
/// Panics unless `p` is an odd prime not dividing `a b`.
pub fn binary_residue_coverage(a: u64, b: u64, p: u64) -> bool {
    assert!(p > 2 && is_prime(p), "binary_residue_coverage requires an odd prime");
    assert!(
        a % p != 0 && b % p != 0,
        "binary_residue_coverage requires p to divide neither coefficient"
    );
    let mut seen = vec![false; p as usize];
    let mut missing = p - 1;
    for x in 0..p {
        let ax = (a * x % p) * x % p;
        for y in 0..p {
            let v = (ax + (b * y % p) * y) % p;
            if v != 0 && !seen[v as usize] {
                seen[v as usize] = true;
                missing -= 1;
                if missing == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// True iff the discriminant is squarefree. In the one-anisotropic-odd-prime
/// setting this rules out spinor exceptions, so the gap set is finite; forms
/// failing the test may miss whole congruence classes.
pub fn spinor_safe(q: &Form) -> bool {
    is_squarefree(q.discriminant())
}
