//! Exact coset spectra and ensemble-average weight spectra of pre-transformed polar codes.
//!
//! For a row `i` of `F_N` the pre-transformed generator row
//! `g^(i) = f^(i) ⊕ Σ_{j>i} T_ij f^(j)` is uniform over the polar coset
//! `C_N^(i)(0, 1)` when the `T_ij` are fair coins, so its weight distribution is
//! `A_d(m, i) / 2^(N-i)` where `A_d` counts coset members of weight `d`.
//!
//! The counts obey, with `h = 2^(m-1)`:
//!
//! ```text
//! i <= h:  A_d(m, i) = Σ_{d' <= d, d-d' even} A_d'(m-1, i) · 2^d' · C(h - d', (d - d')/2)
//! i >  h:  A_d(m, i) = A_{d/2}(m-1, i-h)   for even d, 0 otherwise
//! ```
//!
//! from `A_1(1,1) = 2`, `A_2(1,2) = 1`. Everything is carried in big integers: counts reach
//! `2^(N-1)` and the matching probabilities drop to `2^-(N-1)`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::construction::{min_row_weight, CodeConfig};
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::polar::{weight_of, MAX_M};

/// Weight distribution of the coset `C_N^(i)(0, 1)`, truncated at `d_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSpectrum {
    m: u32,
    i: usize,
    counts: Vec<BigUint>,
}

impl CosetSpectrum {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn index(&self) -> usize {
        self.i
    }

    pub fn d_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// `A_d` for `d` in `0..=d_max`.
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// `A_d`, or zero past the truncation point.
    pub fn count(&self, d: usize) -> BigUint {
        self.counts.get(d).cloned().unwrap_or_default()
    }

    /// `P(m, i, d) = A_d / 2^(N-i)`.
    pub fn probability(&self, d: usize) -> DyadicRational {
        let n = 1usize << self.m;
        DyadicRational::new(self.count(d), (n - self.i) as u64)
    }
}

/// Pascal triangle rows `C(n, k)` for `n <= n_max`, `k <= k_max`.
struct Binomials {
    k_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl Binomials {
    fn new(n_max: usize, k_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let width = n.min(k_max) + 1;
            let mut row = Vec::with_capacity(width);
            row.push(BigUint::one());
            for k in 1..width {
                let prev = &rows[n - 1];
                let a = &prev[k - 1];
                let c = match prev.get(k) {
                    Some(b) => a + b,
                    None => a.clone(),
                };
                row.push(c);
            }
            rows.push(row);
        }
        Binomials { k_max, rows }
    }

    fn get(&self, n: usize, k: usize) -> BigUint {
        debug_assert!(k <= self.k_max);
        self.rows[n].get(k).cloned().unwrap_or_default()
    }
}

/// Multipliers `2^d' · C(h - d', k)` for one recursion level.
struct LevelKernel {
    rows: Vec<Vec<BigUint>>,
}

impl LevelKernel {
    fn new(half: usize, prev_cap: usize, cap: usize, binom: &Binomials) -> Self {
        let rows = (0..=prev_cap)
            .map(|dp| {
                let kmax = (cap.saturating_sub(dp)) / 2;
                (0..=kmax)
                    .map(|k| binom.get(half - dp, k) << dp)
                    .collect()
            })
            .collect();
        LevelKernel { rows }
    }

    fn convolve(&self, prev: &[BigUint], cap: usize) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); cap + 1];
        for (dp, a) in prev.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, mult) in self.rows[dp].iter().enumerate() {
                let d = dp + 2 * k;
                if d > cap {
                    break;
                }
                if !mult.is_zero() {
                    out[d] += a * mult;
                }
            }
        }
        out
    }
}

fn double_weights(prev: &[BigUint], cap: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); cap + 1];
    for d in (0..=cap).step_by(2) {
        if let Some(a) = prev.get(d / 2) {
            out[d] = a.clone();
        }
    }
    out
}

fn base_level(cap: usize) -> [Vec<BigUint>; 2] {
    let mut r1 = vec![BigUint::zero(); cap + 1];
    let mut r2 = vec![BigUint::zero(); cap + 1];
    if cap >= 1 {
        r1[1] = BigUint::from(2u32);
    }
    if cap >= 2 {
        r2[2] = BigUint::one();
    }
    [r1, r2]
}

fn level_cap(level: u32, d_max: usize) -> usize {
    d_max.min(1 << level)
}

fn check_coset_args(m: u32, i: usize, d_max: usize) -> Result<usize> {
    if m == 0 || m > MAX_M {
        return Err(Error::InvalidLength(1usize.checked_shl(m).unwrap_or(0)));
    }
    let n = 1usize << m;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if d_max > n {
        return Err(Error::WeightOutOfRange { weight: d_max, n });
    }
    Ok(n)
}

/// Coset spectrum `A_d(m, i)` for `d <= d_max`, following the recursion chain of `i` alone.
pub fn coset_spectrum(m: u32, i: usize, d_max: usize) -> Result<CosetSpectrum> {
    let n = check_coset_args(m, i, d_max)?;
    let path = i - 1;
    let binom = Binomials::new(n / 2, d_max / 2);
    let mut counts = base_level(level_cap(1, d_max))[path & 1].clone();
    for level in 2..=m {
        let half = 1usize << (level - 1);
        let cap = level_cap(level, d_max);
        counts = if (path >> (level - 1)) & 1 == 1 {
            double_weights(&counts, cap)
        } else {
            LevelKernel::new(half, level_cap(level - 1, d_max), cap, &binom).convolve(&counts, cap)
        };
    }
    Ok(CosetSpectrum { m, i, counts })
}

/// All coset spectra at length `2^m`, truncated at `d_max`, built level by level so each
/// level-`(m-1)` row is shared by the two level-`m` rows derived from it.
#[derive(Clone, Debug)]
pub struct SpectrumTable {
    m: u32,
    d_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl SpectrumTable {
    pub fn build(m: u32, d_max: usize) -> Result<Self> {
        let n = check_coset_args(m, 1, d_max)?;
        let binom = Binomials::new(n / 2, d_max / 2);
        let mut rows: Vec<Vec<BigUint>> = base_level(level_cap(1, d_max)).into();
        for level in 2..=m {
            let half = 1usize << (level - 1);
            let prev_cap = level_cap(level - 1, d_max);
            let cap = level_cap(level, d_max);
            let kernel = LevelKernel::new(half, prev_cap, cap, &binom);
            let mut next = Vec::with_capacity(2 * half);
            next.extend(rows.iter().map(|r| kernel.convolve(r, cap)));
            next.extend(rows.iter().map(|r| double_weights(r, cap)));
            rows = next;
        }
        Ok(SpectrumTable { m, d_max, rows })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Counts `A_d(m, i)` for `d` in `0..=d_max`.
    pub fn counts(&self, i: usize) -> &[BigUint] {
        &self.rows[i - 1]
    }

    pub fn coset(&self, i: usize) -> CosetSpectrum {
        CosetSpectrum {
            m: self.m,
            i,
            counts: self.rows[i - 1].clone(),
        }
    }
}

/// `P(m, i, d)`, the probability that a random pre-transformed row `i` has weight `d`.
pub fn p_exact(m: u32, i: usize, d: usize) -> Result<DyadicRational> {
    Ok(coset_spectrum(m, i, d)?.probability(d))
}

/// `P(m, i)`, the probability that pre-transformed row `i` keeps the weight of `f^(i)`.
///
/// Each upper-half step multiplies by `2^{w(f^(i))} / 2^{2^(level-1)}`, lower-half steps
/// leave it unchanged, so the result is always a power of two.
pub fn p_min(m: u32, i: usize) -> Result<DyadicRational> {
    check_coset_args(m, i, 0)?;
    let mut exp = 0u64;
    for level in 2..=m {
        let local = (i - 1) & ((1usize << level) - 1);
        if local >> (level - 1) == 0 {
            exp += ((1usize << (level - 1)) - weight_of(local + 1)) as u64;
        }
    }
    Ok(DyadicRational::one().halve(exp))
}

/// Expected weight spectrum `E[N_d]`, `1 <= d <= d_max`, over the pre-transformation ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageSpectrum {
    config: CodeConfig,
    entries: Vec<DyadicRational>,
}

impl AverageSpectrum {
    pub fn config(&self) -> &CodeConfig {
        &self.config
    }

    pub fn d_max(&self) -> usize {
        self.entries.len()
    }

    /// `E[N_d]`; zero outside `1..=d_max`.
    pub fn get(&self, d: usize) -> DyadicRational {
        if d == 0 || d > self.entries.len() {
            return DyadicRational::zero();
        }
        self.entries[d - 1].clone()
    }

    /// `(d, E[N_d])` pairs for `d = 1..=d_max`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &DyadicRational)> {
        self.entries.iter().enumerate().map(|(j, v)| (j + 1, v))
    }

    pub fn total(&self) -> DyadicRational {
        self.entries.iter().cloned().sum()
    }

    /// Structural checks: total mass `2^K - 1` (full range only), no mass below `d_min`,
    /// and no odd weights unless row 1 is an information row. Returns the violations found.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let n = self.config.n();
        let k = self.config.k();
        if self.d_max() == n {
            let expect = DyadicRational::from_integer((BigUint::one() << k) - 1u32);
            let total = self.total();
            if total != expect {
                problems.push(format!("total mass {total} differs from 2^{k} - 1 = {expect}"));
            }
        }
        let dmin = min_row_weight(&self.config);
        for (d, v) in self.iter() {
            if v.is_zero() {
                continue;
            }
            if d < dmin {
                problems.push(format!("nonzero mass {v} at d = {d} below d_min = {dmin}"));
            }
            if d % 2 == 1 && !self.config.is_info(1) {
                problems.push(format!("nonzero mass {v} at odd d = {d} without row 1"));
            }
        }
        problems
    }
}

/// `E[N_d] = Σ_{j: w(f^(I_j)) <= d} 2^(K-j) · P(m, I_j, d)` for every `d` in `1..=d_max`.
pub fn avg_spectrum(config: &CodeConfig, d_max: usize) -> Result<AverageSpectrum> {
    let n = config.n();
    if d_max == 0 || d_max > n {
        return Err(Error::WeightOutOfRange { weight: d_max, n });
    }
    let table = SpectrumTable::build(config.m(), d_max)?;
    Ok(avg_spectrum_from_table(config, &table))
}

/// Same as [`avg_spectrum`], reusing a prebuilt table of matching length.
pub fn avg_spectrum_from_table(config: &CodeConfig, table: &SpectrumTable) -> AverageSpectrum {
    assert_eq!(config.m(), table.m(), "table built for a different code length");
    let n = config.n();
    let k = config.k();
    let d_max = table.d_max();
    let mut entries = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let mut acc = BigUint::zero();
        for (j0, &idx) in config.info_set().iter().enumerate() {
            if weight_of(idx) > d {
                continue;
            }
            let a = &table.counts(idx)[d];
            if a.is_zero() {
                continue;
            }
            // 2^(K-j) / 2^(N-I_j) = 2^-(N-K) · 2^(I_j - j)
            acc += a << (idx - (j0 + 1));
        }
        entries.push(DyadicRational::new(acc, (n - k) as u64));
    }
    AverageSpectrum {
        config: config.clone(),
        entries,
    }
}

/// `(d_min, E[N_min])` with `d_min` the smallest row weight in the information set.
pub fn avg_nmin(config: &CodeConfig) -> Result<(usize, DyadicRational)> {
    let dmin = min_row_weight(config);
    let k = config.k();
    let mut total = DyadicRational::zero();
    for (j0, &idx) in config.info_set().iter().enumerate() {
        if weight_of(idx) == dmin {
            let p = p_min(config.m(), idx)?;
            total += &p.double((k - (j0 + 1)) as u64);
        }
    }
    Ok((dmin, total))
}
