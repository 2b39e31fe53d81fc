//! Packed binary vectors of power-of-two length with 1-based indexing.

use std::fmt;

const WORD: usize = 64;

/// Masks selecting bit positions `p` with `p & h == 0`, for `h = 1, 2, ..., 32`.
const BUTTERFLY_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// A binary vector of length `N = 2^m`, packed into 64-bit words.
///
/// Position `i` (1-based) lives in bit `(i - 1) % 64` of word `(i - 1) / 64`.
/// Bits past `N` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    /// All-zero vector. `len` must be a power of two.
    pub fn zeros(len: usize) -> Self {
        assert!(len.is_power_of_two(), "bit row length {len} is not a power of two");
        BitRow {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut row = Self::zeros(len);
        for w in row.words.iter_mut() {
            *w = u64::MAX;
        }
        row.clear_tail();
        row
    }

    /// Builds a row from 0/1 values in position order.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut row = Self::zeros(bits.len());
        for (p, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                row.words[p / WORD] |= 1 << (p % WORD);
            }
        }
        row
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut row = Self::zeros(len);
        row.set(i, true);
        row
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!((1..=self.len).contains(&i));
        let p = i - 1;
        (self.words[p / WORD] >> (p % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!((1..=self.len).contains(&i), "position {i} outside 1..={}", self.len);
        let p = i - 1;
        let mask = 1u64 << (p % WORD);
        if value {
            self.words[p / WORD] |= mask;
        } else {
            self.words[p / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let p = i - 1;
        self.words[p / WORD] ^= 1 << (p % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Hamming weight via popcount.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming weight by scanning each position. Slow; used to cross-check [`BitRow::weight`].
    pub fn weight_naive(&self) -> usize {
        (1..=self.len).filter(|&i| self.get(i)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// 1-based positions of the set bits, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + b + 1)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (1..=self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Concatenation `[self, other]`; both halves must have equal length.
    pub fn concat(&self, other: &BitRow) -> BitRow {
        assert_eq!(self.len, other.len);
        let mut out = BitRow::zeros(self.len * 2);
        for i in 1..=self.len {
            if self.get(i) {
                out.set(i, true);
            }
            if other.get(i) {
                out.set(self.len + i, true);
            }
        }
        out
    }

    /// In-place multiplication by `F^{⊗m}` with `F = [[1,0],[1,1]]`, `N = 2^m = self.len()`.
    pub fn polar_transform(&mut self) {
        polar_transform_words(&mut self.words, self.len);
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Butterfly `x = v·F^{⊗m}` over packed words: at every stage `h`, the first half of each
/// `2h` block absorbs the second half.
pub(crate) fn polar_transform_words(words: &mut [u64], len: usize) {
    let mut h = 1usize;
    while h < len {
        if h < WORD {
            let mask = BUTTERFLY_MASKS[h.trailing_zeros() as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> h) & mask;
            }
        } else {
            let hw = h / WORD;
            let mut j = 0;
            while j < words.len() {
                for t in j..j + hw {
                    words[t] ^= words[t + hw];
                }
                j += 2 * hw;
            }
        }
        h <<= 1;
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow(")?;
        for i in 1..=self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}
