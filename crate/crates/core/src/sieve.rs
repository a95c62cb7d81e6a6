//! Enumeration of represented integers: full-range bitmaps, congruence-
//! restricted scans over an arithmetic progression, and single-value
//! representation tests with witnesses.
//!
//! All sieves are exact: a bit is set iff nonnegative integers x, y, z with
//! `a x^2 + b y^2 + c z^2 = n` exist. The engines walk (x, y) pairs and
//! sweep z-ranges per pair, restricted to the current window, so work is
//! proportional to the number of lattice points, not to the bound cubed.

use std::io::{self, Read, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{ceil_sqrt, is_square, isqrt};
use crate::bits::{Bits, WORD_BITS};
use crate::form::Form;

/// Sieve bounds above this would push squares past what u64 tracks exactly.
pub const MAX_SIEVE_BOUND: u64 = 1 << 52;

/// Default memory budget for bitmap allocations: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Default block width, in bitmap bits.
pub const DEFAULT_BLOCK_BITS: u64 = 1 << 22;

/// Largest supported progression modulus (the z-residue table is O(k)).
pub const MAX_PROGRESSION_MODULUS: u64 = 1 << 24;

const DUMP_MAGIC: [u8; 4] = *b"TQF1";
const DUMP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("bound {bound} exceeds the maximum sieve bound {max}")]
    BoundTooLarge { bound: u64, max: u64 },
    #[error("allocation of {required} bytes exceeds the memory budget of {budget} bytes")]
    MemoryBudget { required: u64, budget: u64 },
    #[error("progression modulus {0} exceeds the supported maximum {1}")]
    ModulusTooLarge(u64, u64),
    #[error("progression parameters must be positive, got k={0}, l={1}")]
    InvalidProgression(u64, u64),
}

/// Windowing parameters for blocked sieving. Blocks are independent work
/// units processed in parallel; any block size yields the same bitmap.
#[derive(Clone, Copy, Debug)]
pub struct BlockPlan {
    /// Window width in bitmap bits; rounded up to a multiple of 64.
    pub block_bits: u64,
    /// Upper limit on bitmap plus table allocations, in bytes.
    pub memory_budget: u64,
}

impl Default for BlockPlan {
    fn default() -> Self {
        BlockPlan {
            block_bits: DEFAULT_BLOCK_BITS,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl BlockPlan {
    pub fn new(block_bits: u64, memory_budget: u64) -> Self {
        BlockPlan {
            block_bits,
            memory_budget,
        }
    }

    /// Splits an index range roughly evenly over `workers`, respecting the
    /// configured maximum block width.
    pub fn sized_for(index_count: u64, workers: usize) -> Self {
        let per = index_count.div_ceil(workers.max(1) as u64 * 4).max(WORD_BITS);
        BlockPlan {
            block_bits: per.min(DEFAULT_BLOCK_BITS),
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    /// Block width in words, honoring the minimum window of `2 * c` values.
    fn block_words(&self, form: &Form, values_per_bit: u64) -> usize {
        let floor_bits = (2 * form.c()).div_ceil(values_per_bit);
        let bits = self.block_bits.max(floor_bits).max(WORD_BITS);
        bits.div_ceil(WORD_BITS) as usize
    }

    fn check_budget(&self, bytes: u64) -> Result<(), SieveError> {
        if bytes > self.memory_budget {
            return Err(SieveError::MemoryBudget {
                required: bytes,
                budget: self.memory_budget,
            });
        }
        Ok(())
    }
}

/// Membership bitmap of the represented set of a form over `[0, bound]`.
pub struct RepBitmap {
    form: Form,
    bound: u64,
    bits: Bits,
}

impl RepBitmap {
    #[inline]
    pub fn form(&self) -> &Form {
        &self.form
    }

    #[inline]
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// True iff `n` is represented; `n` must be within the bound.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.bound, "query {n} outside sieve bound {}", self.bound);
        self.bits.get(n)
    }

    pub fn count_represented(&self) -> u64 {
        self.bits.count_ones()
    }

    /// Integers in `[0, bound]` not represented, ascending.
    pub fn unrepresented(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_zeros()
    }

    /// Serializes as a 16-byte header (magic `TQF1`, version, bound as
    /// little-endian u64) followed by the raw little-endian 64-bit words;
    /// bit `i` of word `w` is integer `64 w + i`.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&self.bound.to_le_bytes())?;
        for word in self.bits.words() {
            w.write_all(&word.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a bitmap previously written by [`RepBitmap::write_to`]. The
    /// form is not part of the file format and must be supplied.
    pub fn read_from<R: Read>(form: Form, mut r: R) -> io::Result<RepBitmap> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != DUMP_MAGIC {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad bitmap magic"));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)?;
        let version = u32::from_le_bytes(buf4);
        if version != DUMP_VERSION {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("unsupported bitmap version {version}"),
            ));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let bound = u64::from_le_bytes(buf8);
        let nwords = (bound + 1).div_ceil(WORD_BITS) as usize;
        let mut words = Vec::with_capacity(nwords);
        for _ in 0..nwords {
            r.read_exact(&mut buf8)?;
            words.push(u64::from_le_bytes(buf8));
        }
        Ok(RepBitmap {
            form,
            bound,
            bits: Bits::from_words(words, bound + 1),
        })
    }
}

/// Walks the (x, y) pairs with `a x^2 + b y^2 < hi`, keeping the value and
/// its residue mod `k` incrementally.
#[inline]
fn for_each_pair<F: FnMut(u64, u64)>(a: u64, b: u64, k: u64, hi: u64, mut f: F) {
    let b2k = (2 * b) % k;
    let mut x = 0u64;
    loop {
        let s1 = a * x * x;
        if s1 >= hi {
            break;
        }
        let mut s = s1;
        let mut sm = s1 % k;
        let mut d = b;
        let mut dm = b % k;
        while s < hi {
            f(s, sm);
            s += d;
            d += 2 * b;
            sm += dm;
            if sm >= k {
                sm -= k;
            }
            dm += b2k;
            if dm >= k {
                dm -= k;
            }
        }
        x += 1;
    }
}

#[inline]
fn mark(words: &mut [u64], i: u64) {
    words[(i / WORD_BITS) as usize] |= 1u64 << (i % WORD_BITS);
}

/// Marks every represented value in `[lo, hi)` into `words` (bit `v - lo`).
fn mark_window(form: &Form, lo: u64, hi: u64, words: &mut [u64]) {
    let [a, b, c] = form.coefficients();
    let mut x = 0u64;
    loop {
        let s1 = a * x * x;
        if s1 >= hi {
            break;
        }
        let mut y = 0u64;
        loop {
            let s = s1 + b * y * y;
            if s >= hi {
                break;
            }
            let z_lo = if s >= lo {
                0
            } else {
                ceil_sqrt((lo - s).div_ceil(c))
            };
            let mut v = s + c * z_lo * z_lo;
            let mut step = c * (2 * z_lo + 1);
            while v < hi {
                mark(words, v - lo);
                v += step;
                step += 2 * c;
            }
            y += 1;
        }
        x += 1;
    }
}

/// Exact represented-set bitmap of the form over `[0, bound]`.
///
/// Blocked and parallel: bitmap words are split into disjoint windows, each
/// marked independently, so the result does not depend on the block size or
/// the number of workers.
pub fn sieve_all(form: &Form, bound: u64, plan: &BlockPlan) -> Result<RepBitmap, SieveError> {
    if bound > MAX_SIEVE_BOUND {
        return Err(SieveError::BoundTooLarge {
            bound,
            max: MAX_SIEVE_BOUND,
        });
    }
    let len = bound + 1;
    plan.check_budget(len.div_ceil(WORD_BITS) * 8)?;
    let mut bits = Bits::new(len);
    let block_words = plan.block_words(form, 1);
    bits.words_mut()
        .par_chunks_mut(block_words)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let lo = ci as u64 * block_words as u64 * WORD_BITS;
            let hi = (lo + chunk.len() as u64 * WORD_BITS).min(len);
            mark_window(form, lo, hi, chunk);
        });
    Ok(RepBitmap { form: *form, bound, bits })
}

/// Flattened map from a residue `t` to the z-classes with `c z^2 ≡ t (mod k)`.
struct ZClasses {
    offsets: Vec<u32>,
    classes: Vec<u32>,
}

impl ZClasses {
    fn build(c: u64, k: u64) -> ZClasses {
        let ku = k as usize;
        let mut counts = vec![0u32; ku + 1];
        for z in 0..k {
            let t = (c % k * z % k * z) % k;
            counts[t as usize + 1] += 1;
        }
        for i in 0..ku {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut classes = vec![0u32; ku];
        for z in 0..k {
            let t = (c % k * z % k * z) % k;
            classes[fill[t as usize] as usize] = z as u32;
            fill[t as usize] += 1;
        }
        ZClasses { offsets, classes }
    }

    #[inline]
    fn row(&self, t: u64) -> &[u32] {
        &self.classes[self.offsets[t as usize] as usize..self.offsets[t as usize + 1] as usize]
    }
}

/// Marks represented members of `S_{k,l}` with index in `[i_lo, i_hi)` into
/// `words` (bit `(v - l)/k - i_lo`). Requires `c ≡ 0 (mod k)`: then a value
/// lands in the progression iff `a x^2 + b y^2 ≡ l (mod k)`, and every z
/// contributes.
fn mark_progression_window_aligned(
    form: &Form,
    k: u64,
    l: u64,
    i_lo: u64,
    i_hi: u64,
    words: &mut [u64],
) {
    let [a, b, c] = form.coefficients();
    let ck = c / k;
    let lo_v = l + i_lo * k;
    let hi_v = l + i_hi * k;
    let l_mod = l % k;
    for_each_pair(a, b, k, hi_v, |s, sm| {
        if sm != l_mod {
            return;
        }
        let z_lo = if s >= lo_v {
            0
        } else {
            ceil_sqrt((lo_v - s).div_ceil(c))
        };
        let mut v = s + c * z_lo * z_lo;
        if v >= hi_v {
            return;
        }
        let mut i = (v - l) / k - i_lo;
        let mut istep = ck * (2 * z_lo + 1);
        while v < hi_v {
            mark(words, i);
            v += istep * k;
            i += istep;
            istep += 2 * ck;
        }
    });
}

/// General progression window: per (x, y) pair only the z-classes solving
/// `c z^2 ≡ l - s (mod k)` are swept, each with stride `k`.
fn mark_progression_window(
    form: &Form,
    k: u64,
    l: u64,
    i_lo: u64,
    i_hi: u64,
    zc: &ZClasses,
    words: &mut [u64],
) {
    let [a, b, c] = form.coefficients();
    let lo_v = l + i_lo * k;
    let hi_v = l + i_hi * k;
    let l_mod = l % k;
    for_each_pair(a, b, k, hi_v, |s, sm| {
        let t = if l_mod >= sm { l_mod - sm } else { l_mod + k - sm };
        for &z0 in zc.row(t) {
            let z0 = z0 as u64;
            let z_min = if s >= lo_v {
                0
            } else {
                ceil_sqrt((lo_v - s).div_ceil(c))
            };
            let z = if z_min <= z0 {
                z0
            } else {
                z0 + (z_min - z0).div_ceil(k) * k
            };
            let mut v = s + c * z * z;
            if v >= hi_v {
                continue;
            }
            let mut i = (v - l) / k - i_lo;
            // z advances by k, so the value step is c k (2z + k) and the
            // index step is that divided by k, both updated incrementally
            let mut istep = c * (2 * z + k);
            while v < hi_v {
                mark(words, i);
                v += istep * k;
                i += istep;
                istep += 2 * c * k;
            }
        }
    });
}

/// Elements of `S_{k,l} ∩ [0, bound]` *not* represented by the form,
/// ascending. Exact; mirrors the congruence-restriction trick of fixing the
/// residue of `a x^2 + b y^2` and sweeping z.
pub fn sieve_progression(
    form: &Form,
    k: u64,
    l: u64,
    bound: u64,
    plan: &BlockPlan,
) -> Result<Vec<u64>, SieveError> {
    if k == 0 || l == 0 {
        return Err(SieveError::InvalidProgression(k, l));
    }
    if k > MAX_PROGRESSION_MODULUS {
        return Err(SieveError::ModulusTooLarge(k, MAX_PROGRESSION_MODULUS));
    }
    if bound > MAX_SIEVE_BOUND {
        return Err(SieveError::BoundTooLarge {
            bound,
            max: MAX_SIEVE_BOUND,
        });
    }
    if bound < l {
        return Ok(Vec::new());
    }
    let count = (bound - l) / k + 1;
    plan.check_budget(count.div_ceil(WORD_BITS) * 8 + 8 * k)?;
    let mut bits = Bits::new(count);
    let block_words = plan.block_words(form, k);
    let aligned = form.c() % k == 0;
    let zc = if aligned {
        None
    } else {
        Some(ZClasses::build(form.c(), k))
    };
    bits.words_mut()
        .par_chunks_mut(block_words)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let i_lo = ci as u64 * block_words as u64 * WORD_BITS;
            let i_hi = (i_lo + chunk.len() as u64 * WORD_BITS).min(count);
            match &zc {
                None => mark_progression_window_aligned(form, k, l, i_lo, i_hi, chunk),
                Some(zc) => mark_progression_window(form, k, l, i_lo, i_hi, zc, chunk),
            }
        });
    Ok(bits.iter_zeros().map(|i| l + i * k).collect())
}

/// Single-value representation test. Returns the lexicographically first
/// witness (x, y, z) with nonnegative entries, or None.
pub fn represents(form: &Form, n: u64) -> Option<(u64, u64, u64)> {
    let [a, b, c] = form.coefficients();
    let mut x = 0u64;
    while a * x * x <= n {
        let r1 = n - a * x * x;
        let mut y = 0u64;
        while b * y * y <= r1 {
            let r = r1 - b * y * y;
            if r % c == 0 && is_square(r / c) {
                return Some((x, y, isqrt(r / c)));
            }
            y += 1;
        }
        x += 1;
    }
    None
}

/// A rank-1 or rank-2 slice of a diagonal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubForm {
    Unary(u64),
    Binary(u64, u64),
}

impl SubForm {
    pub fn represents(&self, n: u64) -> bool {
        match *self {
            SubForm::Unary(a) => n % a == 0 && is_square(n / a),
            SubForm::Binary(a, b) => {
                let mut x = 0u64;
                while a * x * x <= n {
                    let r = n - a * x * x;
                    if r % b == 0 && is_square(r / b) {
                        return true;
                    }
                    x += 1;
                }
                false
            }
        }
    }
}

impl std::fmt::Display for SubForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SubForm::Unary(a) => write!(f, "\u{27e8}{a}\u{27e9}"),
            SubForm::Binary(a, b) => write!(f, "\u{27e8}{a},{b}\u{27e9}"),
        }
    }
}

/// Outcome of a least-missing-element search along a progression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EValue {
    /// The least element of `S_{k,l}` the sub-form fails to represent.
    Found(u64),
    /// Everything up to the cap was represented. For rank <= 2 forms this
    /// means the cap was too small, not that no such element exists.
    Exhausted,
}

/// Least element of `S_{k,l} ∩ [0, n_max]` not represented by the sub-form.
pub fn first_unrepresented(f: &SubForm, k: u64, l: u64, n_max: u64) -> EValue {
    assert!(k >= 1 && l >= 1, "progression parameters must be positive");
    let mut n = l;
    while n <= n_max {
        if !f.represents(n) {
            return EValue::Found(n);
        }
        n += k;
    }
    EValue::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(a: u64, b: u64, c: u64) -> Form {
        Form::new(a, b, c).unwrap()
    }

    fn plan() -> BlockPlan {
        BlockPlan::default()
    }

    #[test]
    fn three_squares_unrepresented_up_to_100() {
        let bm = sieve_all(&form(1, 1, 1), 100, &plan()).unwrap();
        let missing: Vec<u64> = bm.unrepresented().collect();
        assert_eq!(
            missing,
            vec![7, 15, 23, 28, 31, 39, 47, 55, 60, 63, 71, 79, 87, 92, 95]
        );
    }

    #[test]
    fn one_one_two_covers_all_odds() {
        let bm = sieve_all(&form(1, 1, 2), 10_000, &plan()).unwrap();
        for n in (1..=10_000u64).step_by(2) {
            assert!(bm.contains(n), "odd {n} should be represented");
        }
    }

    #[test]
    fn bound_zero_marks_only_zero() {
        let bm = sieve_all(&form(3, 5, 7), 0, &plan()).unwrap();
        assert!(bm.contains(0));
        assert_eq!(bm.count_represented(), 1);
    }

    #[test]
    fn budget_violation_reported() {
        let tight = BlockPlan::new(DEFAULT_BLOCK_BITS, 16);
        assert!(matches!(
            sieve_all(&form(1, 1, 1), 1 << 20, &tight),
            Err(SieveError::MemoryBudget { .. })
        ));
    }

    #[test]
    fn progression_eight_seven_all_missing_for_three_squares() {
        let gaps = sieve_progression(&form(1, 1, 1), 8, 7, 1000, &plan()).unwrap();
        let expected: Vec<u64> = (0..).map(|i| 7 + 8 * i).take_while(|&n| n <= 1000).collect();
        assert_eq!(gaps, expected);
    }

    #[test]
    fn progression_respects_residue_above_modulus() {
        // l > k: elements start at l, not at l mod k
        let gaps = sieve_progression(&form(1, 1, 1), 8, 15, 200, &plan()).unwrap();
        let expected: Vec<u64> = (0..).map(|i| 15 + 8 * i).take_while(|&n| n <= 200).collect();
        assert_eq!(gaps, expected);
        let gaps = sieve_progression(&form(1, 1, 2), 2, 11, 300, &plan()).unwrap();
        assert!(gaps.is_empty());
    }

    #[test]
    fn progression_unaligned_modulus_matches_direct_test() {
        // k does not divide any coefficient: exercises the z-class path
        let q = form(2, 3, 7);
        for (k, l) in [(5u64, 1u64), (5, 4), (12, 7), (9, 2)] {
            let gaps = sieve_progression(&q, k, l, 4000, &plan()).unwrap();
            let direct: Vec<u64> = (0..)
                .map(|i| l + k * i)
                .take_while(|&n| n <= 4000)
                .filter(|&n| represents(&q, n).is_none())
                .collect();
            assert_eq!(gaps, direct, "k={k} l={l}");
        }
    }

    #[test]
    fn represents_examples() {
        assert_eq!(represents(&form(1, 2, 101), 98), Some((0, 7, 0)));
        assert_eq!(represents(&form(1, 1, 1), 7), None);
        assert_eq!(represents(&form(9, 11, 13), 0), Some((0, 0, 0)));
    }

    #[test]
    fn witness_evaluates_back() {
        let q = form(2, 3, 10);
        for n in 0..500u64 {
            if let Some((x, y, z)) = represents(&q, n) {
                assert_eq!(q.eval(x, y, z), n);
            }
        }
    }

    #[test]
    fn first_unrepresented_examples() {
        assert_eq!(
            first_unrepresented(&SubForm::Unary(1), 5, 1, 1_000_000),
            EValue::Found(6)
        );
        assert_eq!(
            first_unrepresented(&SubForm::Binary(1, 1), 7, 3, 1_000_000),
            EValue::Found(3)
        );
        assert_eq!(
            first_unrepresented(&SubForm::Unary(1), 2, 1, 1_000_000),
            EValue::Found(3)
        );
        assert_eq!(
            first_unrepresented(&SubForm::Unary(1), 1, 1, 10),
            EValue::Found(2)
        );
    }

    #[test]
    fn exhausted_is_an_outcome() {
        // S_{4,1} ∩ [0,9] = {1, 5, 9}, all sums of two squares
        assert_eq!(
            first_unrepresented(&SubForm::Binary(1, 1), 4, 1, 9),
            EValue::Exhausted
        );
    }

    #[test]
    fn dump_round_trip() {
        let q = form(1, 1, 1);
        let bm = sieve_all(&q, 100, &plan()).unwrap();
        let mut buf = Vec::new();
        bm.write_to(&mut buf).unwrap();
        assert_eq!(&buf[0..4], b"TQF1");
        assert_eq!(buf.len(), 16 + 2 * 8); // 101 bits -> 2 words
        let back = RepBitmap::read_from(q, buf.as_slice()).unwrap();
        assert_eq!(back.bound(), 100);
        assert_eq!(
            back.unrepresented().collect::<Vec<_>>(),
            bm.unrepresented().collect::<Vec<_>>()
        );
    }

    #[test]
    fn dump_header_layout() {
        let bm = sieve_all(&form(1, 1, 1), 7, &plan()).unwrap();
        let mut buf = Vec::new();
        bm.write_to(&mut buf).unwrap();
        // magic, version 1, bound 7, then one word with bits {0..6} set (7 missing)
        assert_eq!(&buf[0..4], b"TQF1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 7);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 0x7f);
    }
}
