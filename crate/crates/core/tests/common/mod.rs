#![allow(dead_code)]

use polar_spectrum::{BitRow, CodeConfig, PreTransform};

/// Every information set over `1..=n` (bitmask order, empty set excluded).
pub fn all_configs(n: usize) -> impl Iterator<Item = CodeConfig> {
    (1u64..1 << n).map(move |mask| {
        let set = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        CodeConfig::new(n, set).unwrap()
    })
}

/// Every pre-transform of `config`, in binary counting order over the free entries.
pub fn all_transforms(config: &CodeConfig) -> Vec<PreTransform> {
    let free: Vec<(usize, usize)> = config
        .info_set()
        .iter()
        .flat_map(|&i| (i + 1..=config.n()).map(move |j| (i, j)))
        .collect();
    assert!(free.len() <= 16, "too many transforms to list");
    (0u64..1 << free.len())
        .map(|bits| {
            let mut t = PreTransform::identity(config);
            for (b, &(i, j)) in free.iter().enumerate() {
                if bits >> b & 1 == 1 {
                    t.set_entry(i, j, true).unwrap();
                }
            }
            t
        })
        .collect()
}

/// Row `i` of the transform followed by the polar transform: `g^(i) = e_i·T·F`.
pub fn generator_row(t: &PreTransform, i: usize) -> BitRow {
    let mut row = t.row(i).cloned().expect("information row");
    row.set(i, true);
    row.polar_transform();
    row
}

/// All `2^(n-i)` rows `(e_i + Σ_{j>i} c_j e_j)·F` of length `n`.
pub fn coset_row_weights(n: usize, i: usize) -> Vec<usize> {
    let free = n - i;
    let mut weights: Vec<usize> = (0u64..1 << free)
        .map(|c| {
            let mut v = BitRow::unit(n, i);
            for b in 0..free {
                if c >> b & 1 == 1 {
                    v.set(i + 1 + b, true);
                }
            }
            v.polar_transform();
            v.weight()
        })
        .collect();
    weights.sort_unstable();
    weights
}

pub fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// For each information row `I_j` and each fixed choice of later message bits, the weight
/// multiset of `g^(I_j) + Σ u_i g^(I_i)` over all transforms equals that of `g^(I_j)`.
pub fn check_shift_invariance(config: &CodeConfig) -> Result<(), String> {
    let transforms = all_transforms(config);
    let k = config.k();
    let gens: Vec<Vec<BitRow>> = transforms
        .iter()
        .map(|t| config.info_set().iter().map(|&i| generator_row(t, i)).collect())
        .collect();
    for j in 0..k {
        let base = sorted(gens.iter().map(|g| g[j].weight()).collect());
        let later = k - j - 1;
        for suffix in 1u64..1 << later {
            let shifted = gens
                .iter()
                .map(|g| {
                    let mut c = g[j].clone();
                    for b in 0..later {
                        if suffix >> b & 1 == 1 {
                            c.xor_assign(&g[j + 1 + b]);
                        }
                    }
                    c.weight()
                })
                .collect();
            if sorted(shifted) != base {
                return Err(format!(
                    "info set {:?}, row {}, suffix {suffix:b}",
                    config.info_set(),
                    config.info_set()[j]
                ));
            }
        }
    }
    Ok(())
}
