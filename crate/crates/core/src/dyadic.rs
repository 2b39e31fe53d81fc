//! Non-negative rationals with power-of-two denominators, kept normalized.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// `num / 2^exp` with `num` odd, or `num = 0` and `exp = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    num: BigUint,
    exp: u64,
}

impl DyadicRational {
    pub fn new(num: BigUint, exp: u64) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        DyadicRational {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    pub fn zero() -> Self {
        DyadicRational {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_integer(BigUint::one())
    }

    /// An integer value; its trailing zeros stay in the numerator.
    pub fn from_integer(num: BigUint) -> Self {
        DyadicRational { num, exp: 0 }
    }

    #[inline]
    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    /// Exponent `e` of the denominator `2^e`.
    #[inline]
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// `self · 2^{-k}`.
    pub fn halve(&self, k: u64) -> Self {
        Self::new(self.num.clone(), self.exp + k)
    }

    /// `self · 2^{k}`.
    pub fn double(&self, k: u64) -> Self {
        let shift = k.min(self.exp);
        DyadicRational {
            num: &self.num << (k - shift),
            exp: self.exp - shift,
        }
    }

    pub fn to_f64(&self) -> f64 {
        // scale down huge numerators before converting
        let bits = self.num.bits();
        let drop = bits.saturating_sub(1000);
        let head = (&self.num >> drop).to_f64().unwrap_or(f64::INFINITY);
        head * 2f64.powi(drop as i32 - self.exp as i32)
    }

    /// Exact decimal expansion (always terminating), without trailing zeros.
    pub fn to_decimal(&self) -> String {
        let scaled = &self.num * BigUint::from(5u32).pow(self.exp as u32);
        let s = insert_point(scaled.to_string(), self.exp as usize);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounding half to even.
    pub fn to_decimal_rounded(&self, digits: u32) -> String {
        let digits = digits as u64;
        let scaled = &self.num * BigUint::from(5u32).pow(self.exp as u32);
        let rounded = if digits >= self.exp {
            scaled * BigUint::from(10u32).pow((digits - self.exp) as u32)
        } else {
            let div = BigUint::from(10u32).pow((self.exp - digits) as u32);
            let (q, r) = scaled.div_rem(&div);
            let twice = r << 1u32;
            match twice.cmp(&div) {
                Ordering::Greater => q + 1u32,
                Ordering::Equal if q.is_odd() => q + 1u32,
                _ => q,
            }
        };
        insert_point(rounded.to_string(), digits as usize)
    }

    /// Value rounded half-to-even to `digits` decimal places, as a dyadic-free float.
    pub fn round_to(&self, digits: u32) -> f64 {
        self.to_decimal_rounded(digits).parse().expect("decimal string")
    }
}

fn insert_point(mut s: String, frac: usize) -> String {
    if frac == 0 {
        return s;
    }
    if s.len() <= frac {
        s = "0".repeat(frac - s.len() + 1) + &s;
    }
    let at = s.len() - frac;
    s.insert(at, '.');
    s
}

impl From<u64> for DyadicRational {
    fn from(v: u64) -> Self {
        Self::from_integer(BigUint::from(v))
    }
}

impl Add<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let exp = self.exp.max(rhs.exp);
        let num = (&self.num << (exp - self.exp)) + (&rhs.num << (exp - rhs.exp));
        DyadicRational::new(num, exp)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}

impl AddAssign<&DyadicRational> for DyadicRational {
    fn add_assign(&mut self, rhs: &DyadicRational) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for DyadicRational {
    fn sum<I: Iterator<Item = DyadicRational>>(iter: I) -> Self {
        iter.fold(DyadicRational::zero(), |acc, x| &acc + &x)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        (&self.num << (exp - self.exp)).cmp(&(&other.num << (exp - other.exp)))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}
