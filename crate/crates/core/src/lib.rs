//! Weight spectra of pre-transformed polar codes.
//!
//! A pre-transformed polar code encodes `x = u·T·F_N` with `F_N = F^{⊗m}`,
//! `F = [[1,0],[1,1]]`, and `T` unit upper-triangular. CRC-aided, parity-check and PAC
//! codes are all of this form. When the free entries of `T` are fair coins the ensemble
//! average spectrum `E[N_d]` has an exact recursive form, computed by [`spectrum`].
//! [`oracle`] and [`scl`] measure spectra of concrete codes to cross-check it.

pub mod bits;
pub mod cli;
pub mod construction;
pub mod dyadic;
pub mod error;
pub mod oracle;
pub mod polar;
pub mod pretransform;
pub mod report;
pub mod scl;
pub mod spectrum;

pub use bits::BitRow;
pub use construction::{construct_pw, construct_rm, load_info_set, min_row_weight, CodeConfig};
pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use polar::{encode, kron_row, row_weight};
pub use pretransform::{
    crc_transform, derive_seed, identity_transform, pac_transform, random_transform, PreTransform,
};
pub use spectrum::{avg_nmin, avg_spectrum, coset_spectrum, p_exact, p_min, AverageSpectrum, CosetSpectrum};
pub use oracle::{ensemble_average_exact, ensemble_average_mc, exact_spectrum, Measurement, WeightHistogram};
pub use scl::{collect_low_weight, list_decode};
