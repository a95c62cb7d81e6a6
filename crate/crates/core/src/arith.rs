//! Elementary integer utilities shared by every other module: exact square
//! roots, primality, squarefree tests and factorization by trial division.
//!
//! Everything here works on `u64`. Sieve bounds are capped at 2^52 elsewhere,
//! so squares and products stay comfortably inside the type.

/// Floor of the square root, exact for all `u64`.
#[inline]
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// Ceiling of the square root, exact for all `u64`.
#[inline]
pub fn ceil_sqrt(n: u64) -> u64 {
    if n == 0 {
        0
    } else {
        (n - 1).isqrt() + 1
    }
}

/// True iff `n` is a perfect square (isqrt round-trip).
#[inline]
pub fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` with u128 intermediates.
pub fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        exp >>= 1;
        base = mul_mod(base, base, modulus);
    }
    acc
}

/// Deterministic Miller-Rabin, valid for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    // this base set decides primality for every n < 3.3 * 10^24
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True iff no prime square divides `n`. Trial division; intended for the
/// small numbers (coefficients, discriminants) this crate deals in.
pub fn is_squarefree(n: u64) -> bool {
    assert!(n >= 1, "is_squarefree is defined for positive integers");
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return false;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    true
}

/// `n` divided by its largest square divisor.
pub fn squarefree_part(n: u64) -> u64 {
    assert!(n >= 1, "squarefree_part is defined for positive integers");
    let mut m = n;
    let mut out = 1u64;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            if e % 2 == 1 {
                out *= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out * m
}

/// Prime factorization as (prime, exponent) pairs, ascending.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut m = n;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// p-adic valuation of `n` (n > 0), plus the unit part `n / p^v`.
pub fn valuation(n: u64, p: u64) -> (u32, u64) {
    debug_assert!(n > 0 && p >= 2);
    let mut v = 0u32;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    (v, m)
}
