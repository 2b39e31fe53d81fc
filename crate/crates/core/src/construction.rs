//! Information-set selection: Reed–Muller, polarization weight, and external files.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::polar::{weight_of, MAX_M};

/// Code length, dimension and the 1-based information set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeConfig {
    m: u32,
    info_set: Vec<usize>,
}

fn log2_length(n: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() || n.trailing_zeros() > MAX_M {
        return Err(Error::InvalidLength(n));
    }
    Ok(n.trailing_zeros())
}

impl CodeConfig {
    /// Validates and sorts `info_set`. Indices must be distinct and lie in `[1, n]`.
    pub fn new(n: usize, mut info_set: Vec<usize>) -> Result<Self> {
        let m = log2_length(n)?;
        if info_set.is_empty() {
            return Err(Error::DimensionOutOfRange { k: 0, n });
        }
        if let Some(&bad) = info_set.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        info_set.sort_unstable();
        if let Some(w) = info_set.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        Ok(CodeConfig { m, info_set })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        1 << self.m
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    /// Sorted 1-based information indices `I_1 < ... < I_K`.
    #[inline]
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.info_set.binary_search(&i).is_ok()
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| !self.is_info(i)).collect()
    }

    /// Number of free off-diagonal entries of a pre-transformation: `Σ_{i∈A} (N − i)`.
    pub fn free_entries(&self) -> usize {
        let n = self.n();
        self.info_set.iter().map(|&i| n - i).sum()
    }
}

/// Polarization-weight score `Σ_j b_j·2^{j/4}` of a channel index, held exactly as integer
/// coefficients over the basis `1, α, α², α³` with `α = 2^{1/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PwScore {
    coeffs: [i64; 4],
}

impl PwScore {
    /// Score of the 1-based channel index `i`.
    pub fn of_index(i: usize) -> Self {
        let mut coeffs = [0i64; 4];
        let mut bits = i - 1;
        let mut j = 0u32;
        while bits != 0 {
            if bits & 1 == 1 {
                coeffs[(j % 4) as usize] += 1i64 << (j / 4);
            }
            bits >>= 1;
            j += 1;
        }
        PwScore { coeffs }
    }

    pub fn to_f64(self) -> f64 {
        let a = 2f64.powf(0.25);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, &c)| c as f64 * a.powi(r as i32))
            .sum()
    }
}

/// Sign of `x + y·√2`.
fn sign_sqrt2(x: i128, y: i128) -> Ordering {
    match (x.cmp(&0), y.cmp(&0)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (sx, sy) if sx == sy => sx,
        (Ordering::Greater, _) => (x * x).cmp(&(2 * y * y)),
        _ => (2 * y * y).cmp(&(x * x)),
    }
}

/// Sign of `a + b·α + c·α² + d·α³` with `α⁴ = 2`.
fn sign_quartic(a: i128, b: i128, c: i128, d: i128) -> Ordering {
    // (a + c√2) + α(b + d√2)
    let sp = sign_sqrt2(a, c);
    let sq = sign_sqrt2(b, d);
    if sq == Ordering::Equal || sp == sq {
        return if sp == Ordering::Equal { sq } else { sp };
    }
    if sp == Ordering::Equal {
        return sq;
    }
    // P² − √2·Q² decides which term dominates
    let s = sign_sqrt2(a * a + 2 * c * c - 4 * b * d, 2 * a * c - b * b - 2 * d * d);
    if sp == Ordering::Greater {
        s
    } else {
        s.reverse()
    }
}

impl Ord for PwScore {
    fn cmp(&self, other: &Self) -> Ordering {
        let d: Vec<i128> = (0..4)
            .map(|r| self.coeffs[r] as i128 - other.coeffs[r] as i128)
            .collect();
        sign_quartic(d[0], d[1], d[2], d[3])
    }
}

impl PartialOrd for PwScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_k(n: usize, k: usize) -> Result<u32> {
    let m = log2_length(n)?;
    if k == 0 || k > n {
        return Err(Error::DimensionOutOfRange { k, n });
    }
    Ok(m)
}

fn top_k_by<F>(n: usize, k: usize, mut better: F) -> Result<CodeConfig>
where
    F: FnMut(usize, usize) -> Ordering,
{
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&a, &b| better(b, a));
    order.truncate(k);
    CodeConfig::new(n, order)
}

/// Polarization-weight construction with `β = 2^{1/4}`: the `K` indices of largest score,
/// ties (never observed, scores are distinct) going to the larger index.
pub fn construct_pw(n: usize, k: usize) -> Result<CodeConfig> {
    check_k(n, k)?;
    top_k_by(n, k, |a, b| {
        PwScore::of_index(a)
            .cmp(&PwScore::of_index(b))
            .then(a.cmp(&b))
    })
}

/// Reed–Muller style construction: the `K` rows of largest weight. When `K` splits a weight
/// class the boundary is resolved by PW score, then by index.
pub fn construct_rm(n: usize, k: usize) -> Result<CodeConfig> {
    check_k(n, k)?;
    top_k_by(n, k, |a, b| {
        weight_of(a)
            .cmp(&weight_of(b))
            .then_with(|| PwScore::of_index(a).cmp(&PwScore::of_index(b)))
            .then(a.cmp(&b))
    })
}

/// Reads an information set: one 1-based index per line, `#` comments and blank lines ignored.
pub fn load_info_set(path: impl AsRef<Path>, n: usize) -> Result<CodeConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_info_set(&text, n).map_err(|(line, message)| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

fn parse_info_set(text: &str, n: usize) -> std::result::Result<CodeConfig, (usize, String)> {
    log2_length(n).map_err(|e| (0, e.to_string()))?;
    let mut seen = vec![false; n + 1];
    let mut indices = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        let idx: usize = line
            .parse()
            .map_err(|_| (lineno, format!("not a positive integer: {line:?}")))?;
        if idx == 0 || idx > n {
            return Err((lineno, format!("index {idx} outside [1, {n}]")));
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err((lineno, format!("duplicate index {idx}")));
        }
        indices.push(idx);
    }
    CodeConfig::new(n, indices).map_err(|e| (0, e.to_string()))
}

/// `d_min(A)`: the smallest row weight over the information set.
pub fn min_row_weight(config: &CodeConfig) -> usize {
    config
        .info_set()
        .iter()
        .map(|&i| weight_of(i))
        .min()
        .expect("information set is non-empty")
}
