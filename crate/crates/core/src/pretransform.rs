//! Unit upper-triangular pre-transformations `T` (so that `x = u·T·F_N`).
//!
//! Only rows of information indices are stored; frozen rows never reach a codeword because
//! `u` vanishes there. Each stored row holds the off-diagonal part (columns `j > i`); the
//! diagonal is implicitly one.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::bits::BitRow;
use crate::construction::CodeConfig;
use crate::error::{Error, Result};
use crate::polar::encode;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreTransform {
    info_set: Vec<usize>,
    info_mask: BitRow,
    rows: Vec<BitRow>,
}

impl PreTransform {
    /// `T = I`, recovering the plain polar code on `config`.
    pub fn identity(config: &CodeConfig) -> Self {
        let n = config.n();
        let mut info_mask = BitRow::zeros(n);
        for &i in config.info_set() {
            info_mask.set(i, true);
        }
        PreTransform {
            info_set: config.info_set().to_vec(),
            info_mask,
            rows: vec![BitRow::zeros(n); config.k()],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.info_mask.len()
    }

    #[inline]
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Off-diagonal rows, parallel to [`PreTransform::info_set`].
    #[inline]
    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    #[inline]
    pub fn is_info(&self, i: usize) -> bool {
        i >= 1 && i <= self.n() && self.info_mask.get(i)
    }

    fn slot(&self, i: usize) -> Option<usize> {
        self.info_set.binary_search(&i).ok()
    }

    /// Off-diagonal part of row `i`, if `i` is an information index.
    pub fn row(&self, i: usize) -> Option<&BitRow> {
        self.slot(i).map(|s| &self.rows[s])
    }

    /// `T_ij`. Rows of frozen indices read as identity rows.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        if j < i {
            return false;
        }
        self.row(i).is_some_and(|r| r.get(j))
    }

    /// Sets an off-diagonal entry `T_ij`, `i` an information index and `j > i`.
    pub fn set_entry(&mut self, i: usize, j: usize, value: bool) -> Result<()> {
        let n = self.n();
        if j <= i || j > n {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) is not strictly above the diagonal of a {n}x{n} matrix"
            )));
        }
        let s = self
            .slot(i)
            .ok_or_else(|| Error::InvalidArgument(format!("row {i} is not an information row")))?;
        self.rows[s].set(j, value);
        Ok(())
    }

    /// Flips `T_ij` without bounds checks beyond debug assertions.
    pub(crate) fn flip_entry(&mut self, slot: usize, j: usize) {
        debug_assert!(j > self.info_set[slot]);
        self.rows[slot].flip(j);
    }

    /// Every stored row is zero on and left of its diagonal.
    pub fn is_unit_upper_triangular(&self) -> bool {
        self.info_set
            .iter()
            .zip(&self.rows)
            .all(|(&i, r)| r.ones_positions().all(|j| j > i))
    }

    /// Generator rows `g^(I_j) = (e_{I_j}·T)·F_N`, in information-set order.
    pub fn generator_rows(&self) -> Vec<BitRow> {
        self.info_set
            .iter()
            .map(|&i| encode(&BitRow::unit(self.n(), i), self).expect("unit vector on information row"))
            .collect()
    }
}

/// Identity pre-transformation.
pub fn identity_transform(config: &CodeConfig) -> PreTransform {
    PreTransform::identity(config)
}

/// Draws every free entry `T_ij` (`i ∈ A`, `j > i`) as a fair coin.
///
/// Generator: Xoshiro256++ seeded through `seed_from_u64` (SplitMix64 state expansion).
/// Bits are taken least-significant first from successive `next_u64` outputs and assigned to
/// entries in row-major order: information rows ascending, columns `i+1..=N` ascending.
pub fn random_transform(config: &CodeConfig, seed: u64) -> PreTransform {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut t = PreTransform::identity(config);
    let n = config.n();
    let mut word = 0u64;
    let mut left = 0u32;
    for (slot, &i) in config.info_set().iter().enumerate() {
        for j in i + 1..=n {
            if left == 0 {
                word = rng.next_u64();
                left = 64;
            }
            if word & 1 == 1 {
                t.flip_entry(slot, j);
            }
            word >>= 1;
            left -= 1;
        }
    }
    debug_assert!(t.is_unit_upper_triangular());
    t
}

/// Seed of sample `index` derived from `master`: the `index`-th output of a SplitMix64
/// stream started at `master`. Independent of how samples are scheduled across workers.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut z = master.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Binary polynomial read from a bit string (leftmost character first) or `0x` hex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bits: Vec<u8> = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            let v = u128::from_str_radix(hex, 16).map_err(|_| Error::InvalidPolynomial(text.into()))?;
            if v == 0 {
                return Err(Error::InvalidPolynomial(text.into()));
            }
            let width = 128 - v.leading_zeros();
            (0..width).rev().map(|b| ((v >> b) & 1) as u8).collect()
        } else {
            text.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::InvalidPolynomial(text.into())),
                })
                .collect::<Result<_>>()?
        };
        if bits.is_empty() {
            return Err(Error::InvalidPolynomial(text.into()));
        }
        Ok(BitString(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

/// Upper-triangular Toeplitz transform: `T_{i,i+j} = c_j` for `0 <= j <= L`, clipped at `N`.
pub fn pac_transform(config: &CodeConfig, conv_coeffs: &[u8]) -> Result<PreTransform> {
    if conv_coeffs.first() != Some(&1) {
        return Err(Error::InvalidPolynomial(format!(
            "convolution coefficients must start with c_0 = 1, got {conv_coeffs:?}"
        )));
    }
    let n = config.n();
    let mut t = PreTransform::identity(config);
    for (slot, &i) in config.info_set().iter().enumerate() {
        for (j, &c) in conv_coeffs.iter().enumerate().skip(1) {
            if c & 1 == 1 && i + j <= n {
                t.flip_entry(slot, i + j);
            }
        }
    }
    debug_assert!(t.is_unit_upper_triangular());
    Ok(t)
}

/// CRC-aided code from `K' = K + r` selected indices and a degree-`r` generator `g(D)`
/// given highest coefficient first.
///
/// The `K` smallest selected indices carry the message, the `r` largest the check bits
/// (dynamic frozen). Check bits are the remainder of `D^r·m(D)` modulo `g(D)`, message bit
/// `p` (in index order) being the coefficient of `D^{K-1-p}` and check bit `t` that of
/// `D^{r-1-t}`. Row `p` of `T` marks the check positions that depend on message bit `p`.
pub fn crc_transform(
    outer: &CodeConfig,
    k: usize,
    generator: &[u8],
) -> Result<(CodeConfig, PreTransform)> {
    let k_prime = outer.k();
    if k == 0 || k >= k_prime {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= K < K' for a CRC code, got K = {k}, K' = {k_prime}"
        )));
    }
    let r = k_prime - k;
    let lead = generator.iter().position(|&b| b == 1).ok_or_else(|| {
        Error::InvalidPolynomial("generator polynomial is zero".into())
    })?;
    let g = &generator[lead..];
    let degree = g.len() - 1;
    if degree != r {
        return Err(Error::DegreeMismatch { degree, expected: r });
    }
    let info: Vec<usize> = outer.info_set()[..k].to_vec();
    let checks = &outer.info_set()[k..];
    let config = CodeConfig::new(outer.n(), info)?;
    let mut t = PreTransform::identity(&config);

    // remainder of D^e mod g as r coefficients, index 0 = D^{r-1}; start at e = r
    let low: Vec<u8> = g[1..].to_vec();
    let mut rem = low.clone();
    // message bit p = K-1 pairs with D^r, so walk p downward
    for p in (0..k).rev() {
        for (t_idx, &bit) in rem.iter().enumerate() {
            if bit == 1 {
                t.flip_entry(p, checks[t_idx]);
            }
        }
        // multiply by D: shift toward the high end, reduce by g when D^r appears
        let carry = rem[0];
        rem.rotate_left(1);
        rem[r - 1] = 0;
        if carry == 1 {
            for (x, &c) in rem.iter_mut().zip(&low) {
                *x ^= c;
            }
        }
    }
    debug_assert!(t.is_unit_upper_triangular());
    Ok((config, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_pw, construct_rm};

    #[test]
    fn identity_has_no_off_diagonal_entries() {
        let cfg = CodeConfig::new(4, vec![3, 4]).unwrap();
        let t = identity_transform(&cfg);
        assert!(t.rows().iter().all(BitRow::is_zero));
        assert!(t.is_unit_upper_triangular());
        let x = encode(&BitRow::from_bits(&[0, 0, 1, 1]), &t).unwrap();
        assert_eq!(x.to_bits(), vec![0, 1, 0, 1]);
        assert!(t.entry(3, 3) && !t.entry(3, 4) && !t.entry(4, 3));
    }

    #[test]
    fn random_transform_is_seeded_and_triangular() {
        let cfg = construct_pw(64, 32).unwrap();
        let a = random_transform(&cfg, 42);
        let b = random_transform(&cfg, 42);
        assert_eq!(a, b);
        assert_ne!(a, random_transform(&cfg, 43));
        assert!(a.is_unit_upper_triangular());

        let single = CodeConfig::new(2, vec![2]).unwrap();
        assert_eq!(random_transform(&single, 1), random_transform(&single, 999));
        assert_eq!(random_transform(&single, 1), identity_transform(&single));
    }

    #[test]
    fn random_entries_are_fair() {
        let cfg = CodeConfig::new(4, vec![3, 4]).unwrap();
        let ones = (0..10_000u64)
            .filter(|&s| random_transform(&cfg, s).entry(3, 4))
            .count();
        let mean = ones as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&mean), "mean {mean}");
    }

    #[test]
    fn derived_seeds_follow_splitmix_stream() {
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(7);
        for k in 0..5 {
            assert_eq!(derive_seed(7, k), rng.next_u64());
        }
    }

    #[test]
    fn pac_examples() {
        let cfg = construct_rm(4, 4).unwrap();
        assert_eq!(pac_transform(&cfg, &[1]).unwrap(), identity_transform(&cfg));
        let t = pac_transform(&CodeConfig::new(4, vec![3, 4]).unwrap(), &[1, 1]).unwrap();
        assert!(t.entry(3, 4));

        let cfg = construct_rm(128, 128).unwrap();
        let t = pac_transform(&cfg, &[1, 0, 1, 1, 0, 1, 1]).unwrap();
        for i in 1..=128 - 6 {
            let support: Vec<usize> = t.row(i).unwrap().ones_positions().map(|j| j - i).collect();
            assert_eq!(support, vec![2, 3, 5, 6], "row {i}");
        }
        assert_eq!(t.row(126).unwrap().ones_positions().collect::<Vec<_>>(), vec![128]);
        assert!(pac_transform(&cfg, &[0, 1]).is_err());
        assert!(pac_transform(&cfg, &[]).is_err());
    }

    #[test]
    fn crc_single_parity() {
        let outer = CodeConfig::new(2, vec![1, 2]).unwrap();
        let (cfg, t) = crc_transform(&outer, 1, &[1, 1]).unwrap();
        assert_eq!(cfg.info_set(), &[1]);
        assert!(t.entry(1, 2));
    }

    #[test]
    fn crc_parity_column_sums_all_information_rows() {
        let outer = construct_pw(32, 12).unwrap();
        let (cfg, t) = crc_transform(&outer, 11, &[1, 1]).unwrap();
        let parity = outer.info_set()[11];
        assert!(cfg.info_set().iter().all(|&i| t.entry(i, parity)));
        assert!(t.rows().iter().all(|r| r.weight() == 1));
    }

    fn crc_bits_by_division(msg: &[u8], g: &[u8]) -> Vec<u8> {
        let r = g.len() - 1;
        let mut reg: Vec<u8> = msg.iter().copied().chain(std::iter::repeat_n(0, r)).collect();
        for p in 0..msg.len() {
            if reg[p] == 1 {
                for (q, &c) in g.iter().enumerate() {
                    reg[p + q] ^= c;
                }
            }
        }
        reg[msg.len()..].to_vec()
    }

    #[test]
    fn crc_columns_match_long_division() {
        let g = BitString::parse("1000011").unwrap();
        let outer = construct_pw(128, 70).unwrap();
        let (cfg, t) = crc_transform(&outer, 64, g.bits()).unwrap();
        assert_eq!(cfg.k(), 64);
        assert!(t.is_unit_upper_triangular());
        let checks = &outer.info_set()[64..];
        for p in 0..64 {
            let mut msg = vec![0u8; 64];
            msg[p] = 1;
            let crc = crc_bits_by_division(&msg, g.bits());
            for (tt, &c) in checks.iter().enumerate() {
                assert_eq!(t.entry(cfg.info_set()[p], c), crc[tt] == 1, "p={p} t={tt}");
            }
        }
    }

    #[test]
    fn crc_errors() {
        let outer = construct_pw(16, 8).unwrap();
        assert!(matches!(
            crc_transform(&outer, 6, &[1, 1]),
            Err(Error::DegreeMismatch { degree: 1, expected: 2 })
        ));
        assert!(crc_transform(&outer, 8, &[1]).is_err());
        assert!(crc_transform(&outer, 7, &[0, 0]).is_err());
    }

    #[test]
    fn bit_strings() {
        assert_eq!(BitString::parse("1000011").unwrap().bits(), &[1, 0, 0, 0, 0, 1, 1]);
        assert_eq!(BitString::parse("0x43").unwrap().bits(), &[1, 0, 0, 0, 0, 1, 1]);
        assert_eq!(BitString::parse("0x5b").unwrap().bits(), &[1, 0, 1, 1, 0, 1, 1]);
        assert!(BitString::parse("10a").is_err());
        assert!(BitString::parse("").is_err());
        assert!(BitString::parse("0x0").is_err());
    }

    #[test]
    fn set_entry_checks_bounds() {
        let cfg = CodeConfig::new(8, vec![4, 6]).unwrap();
        let mut t = identity_transform(&cfg);
        assert!(t.set_entry(4, 4, true).is_err());
        assert!(t.set_entry(4, 9, true).is_err());
        assert!(t.set_entry(5, 6, true).is_err());
        t.set_entry(4, 8, true).unwrap();
        assert!(t.entry(4, 8));
    }
}
