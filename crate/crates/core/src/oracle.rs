//! Ground-truth spectra by enumeration: all messages of one code, all transforms of an
//! ensemble, or a seeded random sample of transforms.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bits::BitRow;
use crate::construction::CodeConfig;
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::polar::kron_row;
use crate::pretransform::{derive_seed, random_transform, PreTransform};
use crate::scl::collect_low_weight;

/// Largest dimension [`exact_spectrum`] will enumerate.
pub const MAX_BRUTE_K: usize = 28;
/// Largest number of free transform entries [`ensemble_average_exact`] will enumerate.
pub const MAX_ENSEMBLE_FREE: usize = 24;
/// Largest dimension [`ensemble_average_exact`] will enumerate per transform.
pub const MAX_ENSEMBLE_K: usize = 20;

/// How a histogram was measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HistogramSource {
    Brute,
    Collector { list_size: usize },
}

/// Codeword counts by weight for one concrete code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightHistogram {
    counts: Vec<u64>,
    source: HistogramSource,
    saturated_from: Option<usize>,
}

impl WeightHistogram {
    pub(crate) fn new(counts: Vec<u64>, source: HistogramSource, saturated_from: Option<usize>) -> Self {
        WeightHistogram {
            counts,
            source,
            saturated_from,
        }
    }

    /// Counts indexed by weight `0..=N`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, d: usize) -> u64 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn source(&self) -> HistogramSource {
        self.source
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Smallest weight whose count may be incomplete (list pruning dropped a path whose
    /// metric had reached it). `None` means every count is exact.
    pub fn saturated_from(&self) -> Option<usize> {
        self.saturated_from
    }

    pub fn is_saturated(&self, d: usize) -> bool {
        self.saturated_from.is_some_and(|b| d >= b)
    }

    /// Same counts with the weight-0 entry cleared.
    pub fn without_zero(&self) -> WeightHistogram {
        let mut out = self.clone();
        out.counts[0] = 0;
        out
    }
}

/// Adds the weights of every codeword spanned by `rows` into `hist`, walking messages in
/// Gray-code order so each step costs one row XOR. `words` is the row stride.
fn tally_span(rows: &[u64], words: usize, hist: &mut [u64]) {
    tally_coset(rows, &vec![0u64; words], words, hist);
}

fn tally_span_parallel(rows: &[u64], words: usize, n: usize) -> Vec<u64> {
    let k = rows.len() / words;
    const CHUNK_BITS: usize = 16;
    if k <= CHUNK_BITS {
        let mut hist = vec![0u64; n + 1];
        tally_span(rows, words, &mut hist);
        return hist;
    }
    // split on the top k - CHUNK_BITS message bits; each chunk is a coset of the low span
    let (low, high) = rows.split_at(CHUNK_BITS * words);
    let chunks = 1u64 << (k - CHUNK_BITS);
    (0..chunks)
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut hist, c| {
                let mut offset = vec![0u64; words];
                for b in 0..(k - CHUNK_BITS) {
                    if (c >> b) & 1 == 1 {
                        for (o, r) in offset.iter_mut().zip(&high[b * words..(b + 1) * words]) {
                            *o ^= r;
                        }
                    }
                }
                tally_coset(low, &offset, words, &mut hist);
                hist
            },
        )
        .reduce(|| vec![0u64; n + 1], add_hist)
}

fn tally_coset(rows: &[u64], offset: &[u64], words: usize, hist: &mut [u64]) {
    let k = rows.len() / words;
    let mut cw = offset.to_vec();
    hist[cw.iter().map(|w| w.count_ones() as usize).sum::<usize>()] += 1;
    for step in 1..(1u64 << k) {
        let b = step.trailing_zeros() as usize;
        let mut w = 0u32;
        for (c, r) in cw.iter_mut().zip(&rows[b * words..(b + 1) * words]) {
            *c ^= r;
            w += c.count_ones();
        }
        hist[w as usize] += 1;
    }
}

fn add_hist(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn flatten(rows: &[BitRow]) -> (Vec<u64>, usize) {
    let words = rows.first().map_or(1, |r| r.words().len());
    (rows.iter().flat_map(|r| r.words().iter().copied()).collect(), words)
}

/// Full weight distribution of the code `{u·T·F_N : u_{A^c} = 0}` by enumerating all `2^K`
/// messages.
pub fn exact_spectrum(config: &CodeConfig, transform: &PreTransform) -> Result<WeightHistogram> {
    if config.k() > MAX_BRUTE_K {
        return Err(Error::BudgetExceeded {
            what: "K",
            value: config.k(),
            limit: MAX_BRUTE_K,
        });
    }
    if transform.info_set() != config.info_set() {
        return Err(Error::InvalidArgument(
            "transform was built for a different information set".into(),
        ));
    }
    let (rows, words) = flatten(&transform.generator_rows());
    let counts = tally_span_parallel(&rows, words, config.n());
    Ok(WeightHistogram::new(counts, HistogramSource::Brute, None))
}

/// Exact ensemble mean of `N_d`, `d = 0..=N`, over every pre-transformation of `config`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleAverage {
    means: Vec<DyadicRational>,
    transforms: u64,
}

impl EnsembleAverage {
    pub fn means(&self) -> &[DyadicRational] {
        &self.means
    }

    pub fn mean(&self, d: usize) -> DyadicRational {
        self.means.get(d).cloned().unwrap_or_else(DyadicRational::zero)
    }

    /// Number of transforms enumerated, `2^F`.
    pub fn transforms(&self) -> u64 {
        self.transforms
    }
}

/// Averages [`exact_spectrum`] over all `2^F` transforms, `F = Σ_{i∈A}(N - i)`.
///
/// Transforms are visited in Gray-code order over the free entries, so moving to the next
/// one XORs a single kernel row into a single generator row.
pub fn ensemble_average_exact(config: &CodeConfig) -> Result<EnsembleAverage> {
    let free = config.free_entries();
    if free > MAX_ENSEMBLE_FREE {
        return Err(Error::BudgetExceeded {
            what: "free transform entries",
            value: free,
            limit: MAX_ENSEMBLE_FREE,
        });
    }
    if config.k() > MAX_ENSEMBLE_K {
        return Err(Error::BudgetExceeded {
            what: "K",
            value: config.k(),
            limit: MAX_ENSEMBLE_K,
        });
    }
    let n = config.n();
    let m = config.m();
    // (generator slot, kernel row) for every free entry, row-major
    let entries: Vec<(usize, usize)> = config
        .info_set()
        .iter()
        .enumerate()
        .flat_map(|(slot, &i)| (i + 1..=n).map(move |j| (slot, j)))
        .collect();
    let kernel: Vec<BitRow> = (1..=n).map(|j| kron_row(m, j).expect("valid row")).collect();
    let base: Vec<BitRow> = config.info_set().iter().map(|&i| kernel[i - 1].clone()).collect();
    let (rows, words) = flatten(&base);

    // fixed split: the low free entries are walked inside each parallel chunk
    let split = free.min(12);
    let high_count = free - split;
    let apply = |rows: &mut [u64], (slot, j): (usize, usize)| {
        for (r, k) in rows[slot * words..(slot + 1) * words]
            .iter_mut()
            .zip(kernel[j - 1].words())
        {
            *r ^= k;
        }
    };
    let totals = (0..(1u64 << high_count))
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut hist, c| {
                let mut local = rows.clone();
                for b in 0..high_count {
                    if (c >> b) & 1 == 1 {
                        apply(&mut local, entries[split + b]);
                    }
                }
                tally_span(&local, words, &mut hist);
                for step in 1..(1u64 << split) {
                    apply(&mut local, entries[step.trailing_zeros() as usize]);
                    tally_span(&local, words, &mut hist);
                }
                hist
            },
        )
        .reduce(|| vec![0u64; n + 1], add_hist);

    let means = totals
        .into_iter()
        .map(|t| DyadicRational::new(BigUint::from(t), free as u64))
        .collect();
    Ok(EnsembleAverage {
        means,
        transforms: 1u64 << free,
    })
}

/// Spectrum measurement applied to each sampled transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurement {
    Brute,
    Scl { list_size: usize },
}

/// Per-weight sample statistics over randomly drawn transforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonteCarloEstimate {
    sums: Vec<u128>,
    sq_sums: Vec<u128>,
    saturated: Vec<bool>,
    samples: u64,
    seed: u64,
    method: Measurement,
}

impl MonteCarloEstimate {
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn method(&self) -> Measurement {
        self.method
    }

    pub fn n(&self) -> usize {
        self.sums.len() - 1
    }

    pub fn sum(&self, d: usize) -> u128 {
        self.sums[d]
    }

    pub fn mean(&self, d: usize) -> f64 {
        self.sums[d] as f64 / self.samples as f64
    }

    /// Unbiased sample variance of the per-transform count at weight `d`.
    pub fn variance(&self, d: usize) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        // n·Σx² − (Σx)² is exact in integers; only the final division rounds.
        let n = self.samples as u128;
        let sum = self.sums[d];
        match n.checked_mul(self.sq_sums[d]).zip(sum.checked_mul(sum)) {
            Some((a, b)) => (a - b) as f64 / (n * (n - 1)) as f64,
            None => {
                let s = n as f64;
                let (sum, sq) = (sum as f64, self.sq_sums[d] as f64);
                ((sq - sum * sum / s) / (s - 1.0)).max(0.0)
            }
        }
    }

    pub fn std_error(&self, d: usize) -> f64 {
        (self.variance(d) / self.samples as f64).sqrt()
    }

    /// Whether any sample's count at `d` was a lower bound.
    pub fn is_saturated(&self, d: usize) -> bool {
        self.saturated[d]
    }
}

#[derive(Clone)]
struct Accumulator {
    sums: Vec<u128>,
    sq_sums: Vec<u128>,
    saturated: Vec<bool>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            sums: vec![0; n + 1],
            sq_sums: vec![0; n + 1],
            saturated: vec![false; n + 1],
        }
    }

    fn add(mut self, hist: &WeightHistogram) -> Self {
        for (d, &c) in hist.counts().iter().enumerate() {
            let c = c as u128;
            self.sums[d] += c;
            self.sq_sums[d] += c * c;
            self.saturated[d] |= hist.is_saturated(d);
        }
        self
    }

    fn merge(mut self, other: Accumulator) -> Self {
        for d in 0..self.sums.len() {
            self.sums[d] += other.sums[d];
            self.sq_sums[d] += other.sq_sums[d];
            self.saturated[d] |= other.saturated[d];
        }
        self
    }
}

/// Samples `samples` transforms (sample `k` seeded by `derive_seed(seed, k)`), measures each
/// code's spectrum and reports per-weight means and variances. Sums are exact integers, so
/// the result does not depend on how samples are spread over threads.
pub fn ensemble_average_mc(
    config: &CodeConfig,
    seed: u64,
    samples: u64,
    method: Measurement,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    match method {
        Measurement::Brute if config.k() > MAX_BRUTE_K => {
            return Err(Error::BudgetExceeded {
                what: "K",
                value: config.k(),
                limit: MAX_BRUTE_K,
            })
        }
        Measurement::Scl { list_size: 0 } => {
            return Err(Error::InvalidArgument("list size must be at least 1".into()))
        }
        _ => {}
    }
    let n = config.n();
    let acc = (0..samples)
        .into_par_iter()
        .map(|k| {
            let t = random_transform(config, derive_seed(seed, k));
            match method {
                Measurement::Brute => exact_spectrum(config, &t).map(|h| h.without_zero()),
                Measurement::Scl { list_size } => collect_low_weight(config, &t, list_size),
            }
        })
        .try_fold(|| Accumulator::new(n), |acc, h| h.map(|h| acc.add(&h)))
        .try_reduce(|| Accumulator::new(n), |a, b| Ok(a.merge(b)))?;
    Ok(MonteCarloEstimate {
        sums: acc.sums,
        sq_sums: acc.sq_sums,
        saturated: acc.saturated,
        samples,
        seed,
        method,
    })
}
