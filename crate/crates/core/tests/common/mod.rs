//! Brute-force oracles shared by the integration and acceptance suites.
//! Everything here decides by exhaustive search, independent of the closed
//! forms and windowed sieves it cross-checks.

#![allow(dead_code)]

use std::collections::BTreeSet;

use tqf_core::arith::valuation;
use tqf_core::sieve::represents;
use tqf_core::Form;

/// Modular solvability workspace for one prime power `p^m`.
///
/// Solvability of `a x^2 + b y^2 + c z^2 = 0` over the p-adic integers is
/// decided by searching for a primitive solution
/// modulo `p^m`: by the one-variable lifting lemma, a solution whose unit
/// coordinate sits on a coefficient of valuation `v` lifts once
/// `m >= 2 (v_p(2) + v) + 1`. Coefficients are first reduced modulo squares
/// of `p` (a square scale of one variable, which never changes solvability),
/// so `v <= 1` and the worst modulus stays small.
pub struct ZpOracle {
    p: u64,
    modulus: u64,
}

fn strip_square_part(t: i64, p: u64) -> i64 {
    let (v, u) = valuation(t.unsigned_abs(), p);
    let sign = if t < 0 { -1 } else { 1 };
    sign * (p.pow(v % 2) * u) as i64
}

impl ZpOracle {
    pub fn new(p: u64) -> ZpOracle {
        let vp2 = if p == 2 { 1 } else { 0 };
        let m = 2 * (vp2 + 1) + 1;
        ZpOracle {
            p,
            modulus: p.pow(m),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn reduce(&self, t: i64) -> u64 {
        strip_square_part(t, self.p).rem_euclid(self.modulus as i64) as u64
    }

    /// Bitsets over `[0, p^m)` of the values `c z^2`, for any `z` and for
    /// unit `z`.
    pub fn cz_tables(&self, c: i64) -> (Vec<u64>, Vec<u64>) {
        let mm = self.modulus;
        let cu = self.reduce(c);
        let words = (mm as usize).div_ceil(64);
        let mut any = vec![0u64; words];
        let mut unit = vec![0u64; words];
        for z in 0..=mm / 2 {
            let t = cu * z % mm * z % mm;
            any[(t / 64) as usize] |= 1 << (t % 64);
            if z % self.p != 0 {
                unit[(t / 64) as usize] |= 1 << (t % 64);
            }
        }
        (any, unit)
    }

    /// Bitsets over `[0, p^m)` of `-(a x^2 + b y^2)`, for pairs with x or y
    /// a unit, and for all pairs.
    pub fn pair_tables(&self, a: i64, b: i64) -> (Vec<u64>, Vec<u64>) {
        let mm = self.modulus;
        let au = self.reduce(a);
        let bu = self.reduce(b);
        let half = (mm / 2) as usize;
        let mut by2 = vec![0u64; half + 1];
        let mut yunit = vec![false; half + 1];
        for y in 0..=half as u64 {
            by2[y as usize] = bu * y % mm * y % mm;
            yunit[y as usize] = y % self.p != 0;
        }
        let words = (mm as usize).div_ceil(64);
        let mut r_unit = vec![0u64; words];
        let mut r_any = vec![0u64; words];
        for x in 0..=mm / 2 {
            let ax = au * x % mm * x % mm;
            let xu = x % self.p != 0;
            for y in 0..=half {
                let mut v = ax + by2[y];
                if v >= mm {
                    v -= mm;
                }
                let r = if v == 0 { 0 } else { mm - v };
                r_any[(r / 64) as usize] |= 1 << (r % 64);
                if xu || yunit[y] {
                    r_unit[(r / 64) as usize] |= 1 << (r % 64);
                }
            }
        }
        (r_unit, r_any)
    }

    /// True iff `a x^2 + b y^2 + c z^2 = 0` has a nontrivial p-adic zero,
    /// given precomputed tables.
    pub fn solvable_with(
        &self,
        pair: &(Vec<u64>, Vec<u64>),
        cz: &(Vec<u64>, Vec<u64>),
    ) -> bool {
        let (r_unit, r_any) = pair;
        let (cz_any, cz_unit) = cz;
        // x-or-y unit with any z, or any (x, y) with unit z
        r_unit.iter().zip(cz_any).any(|(x, y)| x & y != 0)
            || r_any.iter().zip(cz_unit).any(|(x, y)| x & y != 0)
    }

    pub fn solvable(&self, a: i64, b: i64, c: i64) -> bool {
        let pair = self.pair_tables(a, b);
        let cz = self.cz_tables(c);
        self.solvable_with(&pair, &cz)
    }
}

/// Brute-force Hilbert symbol: `z^2 = a x^2 + b y^2` solvable at `p`.
pub fn hilbert_bruteforce(a: i64, b: i64, p: u64) -> i32 {
    if ZpOracle::new(p).solvable(a, b, -1) {
        1
    } else {
        -1
    }
}

/// Brute-force anisotropy of a positive diagonal ternary at a finite prime.
pub fn anisotropic_bruteforce(form: &Form, p: u64) -> bool {
    let [a, b, c] = form.coefficients();
    !ZpOracle::new(p).solvable(a as i64, b as i64, c as i64)
}

/// Represented set over `[0, n_max]` by the plain triple loop.
pub fn represented_set_bruteforce(form: &Form, n_max: u64) -> Vec<bool> {
    let [a, b, c] = form.coefficients();
    let mut rep = vec![false; (n_max + 1) as usize];
    let mut x = 0u64;
    while a * x * x <= n_max {
        let s1 = a * x * x;
        let mut y = 0u64;
        while s1 + b * y * y <= n_max {
            let s2 = s1 + b * y * y;
            let mut z = 0u64;
            while s2 + c * z * z <= n_max {
                rep[(s2 + c * z * z) as usize] = true;
                z += 1;
            }
            y += 1;
        }
        x += 1;
    }
    rep
}

/// The classical exceptional set `{4^k (8n + 7)}` up to `n_max`, sorted.
pub fn three_squares_exceptions(n_max: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    let mut scale = 1u64;
    while scale * 7 <= n_max {
        let mut v = scale * 7;
        while v <= n_max {
            out.insert(v);
            v += scale * 8;
        }
        scale *= 4;
    }
    out.into_iter().collect()
}

/// Squares modulo `p` by direct enumeration.
pub fn residue_squares(p: u64) -> BTreeSet<u64> {
    (1..p).map(|x| x * x % p).collect()
}

/// Unpruned reference search: every sorted triple with coefficients up to
/// `coeff_max` (no squarefree or divisibility filters) is certified against
/// `S_{p,l} ∩ [0, bound]`; survivors are returned squarefree-normalized and
/// deduplicated. Certification point-tests a prefix with the independent
/// single-value test and only escalates forms that clear it.
pub fn unpruned_survivors(p: u64, l: u64, coeff_max: u64, bound: u64) -> BTreeSet<Form> {
    let prefix = 2_000.min(bound);
    let mut out = BTreeSet::new();
    for a in 1..=coeff_max {
        for b in a..=coeff_max {
            for c in b..=coeff_max {
                let form = Form::new(a, b, c).unwrap();
                let mut alive = true;
                let mut n = l;
                while n <= prefix {
                    if represents(&form, n).is_none() {
                        alive = false;
                        break;
                    }
                    n += p;
                }
                if !alive {
                    continue;
                }
                let gaps = tqf_core::sieve::sieve_progression(
                    &form,
                    p,
                    l,
                    bound,
                    &tqf_core::BlockPlan::default(),
                )
                .unwrap();
                if gaps.is_empty() {
                    out.insert(form.normalize_squarefree());
                }
            }
        }
    }
    out
}
