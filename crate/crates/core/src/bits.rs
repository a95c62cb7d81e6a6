//! Packed bit array used by the number tables and the representation sieves.

pub(crate) const WORD_BITS: u64 = 64;

/// Fixed-length bitset backed by `u64` words, bit `i` in word `i / 64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: u64,
}

impl Bits {
    pub fn new(len: u64) -> Self {
        let nwords = len.div_ceil(WORD_BITS) as usize;
        Bits {
            words: vec![0u64; nwords],
            len,
        }
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        debug_assert!(i < self.len);
        self.words[(i / WORD_BITS) as usize] |= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i / WORD_BITS) as usize] & (1u64 << (i % WORD_BITS)) != 0
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn from_words(words: Vec<u64>, len: u64) -> Self {
        debug_assert_eq!(words.len() as u64, len.div_ceil(WORD_BITS));
        Bits { words, len }
    }

    /// Indices of clear bits, ascending.
    pub fn iter_zeros(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let base = wi as u64 * WORD_BITS;
            let len = self.len;
            ZeroIter { word: !w, base }.take_while(move |&i| i < len)
        })
    }
}

struct ZeroIter {
    word: u64,
    base: u64,
}

impl Iterator for ZeroIter {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as u64;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}
