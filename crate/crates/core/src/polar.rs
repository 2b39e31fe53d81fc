//! Rows of the polar kernel power `F^{⊗m}` and encoding through a pre-transformation.

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::pretransform::PreTransform;

/// Largest supported `m`; keeps `2^m` comfortably inside `usize` and the tables in memory.
pub const MAX_M: u32 = 20;

fn check_index(m: u32, i: usize) -> Result<usize> {
    if m == 0 || m > MAX_M {
        return Err(Error::InvalidLength(1usize.checked_shl(m).unwrap_or(0)));
    }
    let n = 1usize << m;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(n)
}

/// The `i`-th row (1-based) of `F^{⊗m}`.
///
/// Position `p` of row `i` is set iff the bits of `p - 1` are a subset of the bits of `i - 1`,
/// which unrolls the block structure `[r, 0]` (upper half) / `[r, r]` (lower half).
pub fn kron_row(m: u32, i: usize) -> Result<BitRow> {
    let n = check_index(m, i)?;
    let r = i - 1;
    let mut row = BitRow::zeros(n);
    // enumerate submasks of r
    let mut s = r;
    loop {
        row.set(s + 1, true);
        if s == 0 {
            break;
        }
        s = (s - 1) & r;
    }
    Ok(row)
}

/// Hamming weight of row `i` of `F^{⊗m}`: `2^popcount(i-1)`.
pub fn row_weight(m: u32, i: usize) -> Result<usize> {
    check_index(m, i)?;
    Ok(weight_of(i))
}

#[inline]
pub(crate) fn weight_of(i: usize) -> usize {
    1usize << (i - 1).count_ones()
}

/// Encodes `x = u·T·F_N` over GF(2).
///
/// `u` must vanish outside the information set `transform` was built for.
pub fn encode(u: &BitRow, transform: &PreTransform) -> Result<BitRow> {
    let n = transform.n();
    if u.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: u.len(),
        });
    }
    if let Some(p) = u.ones_positions().find(|&p| !transform.is_info(p)) {
        return Err(Error::NonzeroFrozenBit(p));
    }
    let mut v = u.clone();
    for (idx, row) in transform.info_set().iter().zip(transform.rows()) {
        if u.get(*idx) {
            v.xor_assign(row);
        }
    }
    v.polar_transform();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::CodeConfig;

    #[test]
    fn kron_row_examples() {
        assert_eq!(kron_row(1, 1).unwrap().to_bits(), vec![1, 0]);
        assert_eq!(kron_row(2, 3).unwrap().to_bits(), vec![1, 0, 1, 0]);
        assert_eq!(kron_row(3, 8).unwrap(), BitRow::ones(8));
    }

    #[test]
    fn row_weight_examples() {
        assert_eq!(row_weight(7, 1).unwrap(), 1);
        assert_eq!(row_weight(3, 4).unwrap(), 4);
        assert_eq!(kron_row(3, 4).unwrap().weight_naive(), 4);
        assert_eq!(row_weight(1, 2).unwrap(), 2);
    }

    #[test]
    fn index_errors() {
        assert!(matches!(kron_row(2, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(kron_row(2, 5), Err(Error::IndexOutOfRange { .. })));
        assert!(row_weight(3, 9).is_err());
        assert!(kron_row(0, 1).is_err());
    }

    #[test]
    fn weights_match_materialized_rows() {
        for m in 1..=7 {
            for i in 1..=(1usize << m) {
                let row = kron_row(m, i).unwrap();
                assert_eq!(row.weight(), row_weight(m, i).unwrap());
                assert_eq!(row.weight_naive(), row.weight());
            }
        }
    }

    #[test]
    fn lower_half_rows_repeat_half_length_row() {
        for m in 2..=7 {
            let half = 1usize << (m - 1);
            for i in 1..=2 * half {
                let row = kron_row(m, i).unwrap();
                let i0 = if i > half { i - half } else { i };
                let r = kron_row(m - 1, i0).unwrap();
                let expect = if i > half {
                    r.concat(&r)
                } else {
                    r.concat(&BitRow::zeros(half))
                };
                assert_eq!(row, expect, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn encode_unit_vectors_gives_kernel_rows() {
        for m in 1..=6 {
            let n = 1usize << m;
            let cfg = CodeConfig::new(n, (1..=n).collect()).unwrap();
            let t = PreTransform::identity(&cfg);
            for i in 1..=n {
                let x = encode(&BitRow::unit(n, i), &t).unwrap();
                assert_eq!(x, kron_row(m, i).unwrap());
            }
        }
    }

    #[test]
    fn encode_examples() {
        let cfg = CodeConfig::new(4, vec![3, 4]).unwrap();
        let id = PreTransform::identity(&cfg);
        let u = BitRow::from_bits(&[0, 0, 1, 0]);
        assert_eq!(encode(&BitRow::zeros(4), &id).unwrap(), BitRow::zeros(4));
        assert_eq!(encode(&u, &id).unwrap().to_bits(), vec![1, 0, 1, 0]);

        let mut t = PreTransform::identity(&cfg);
        t.set_entry(3, 4, true).unwrap();
        assert_eq!(encode(&u, &t).unwrap().to_bits(), vec![0, 1, 0, 1]);
        assert_eq!(encode(&BitRow::zeros(4), &t).unwrap(), BitRow::zeros(4));
    }

    #[test]
    fn encode_rejects_bad_input() {
        let cfg = CodeConfig::new(4, vec![3, 4]).unwrap();
        let t = PreTransform::identity(&cfg);
        assert!(matches!(
            encode(&BitRow::from_bits(&[1, 0, 0, 0]), &t),
            Err(Error::NonzeroFrozenBit(1))
        ));
        assert!(matches!(
            encode(&BitRow::zeros(8), &t),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
