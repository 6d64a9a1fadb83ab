//! Integer frequency labels.
//!
//! A [`Frequency`] is the integer `n` labelling the exponential
//! `e_n(x) = e^{2πinx}`. Labels are capped at `|n| < 4^30` and all arithmetic
//! is checked against the cap.
//!
//! # Zero set of `μ̂` on the integers
//!
//! `μ̂(n) = 0` for an integer `n` if and only if `n ≠ 0` and `n / 4^{v4(n)}` is
//! odd, where `v4(n)` is the largest `m` with `4^m | n`.
//!
//! Proof: the factor `cos(2πn/4^k)` vanishes iff `n/4^k ∈ 1/4 + Z/2`, i.e.
//! iff `n = 4^{k-1}·j` with `j` odd. Write `n = 4^v·u` with `4 ∤ u`. If `u` is
//! odd, the factor `k = v + 1` vanishes. If `u ≡ 2 (mod 4)`, then for
//! `k ≤ v` the quotient `n/4^{k-1}` is divisible by 4, for `k = v + 1` it is
//! `u`, which is even, and for `k > v + 1` it is not an integer; so no factor
//! vanishes, and the product converges to a nonzero limit because
//! `Σ (1 − cos(2πn/4^k))` converges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `4^30`, the exclusive bound on `|n|`.
pub const FREQUENCY_CAP: i64 = 1 << 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Frequency(i64);

impl Frequency {
    pub const ZERO: Frequency = Frequency(0);

    pub fn new(value: i64) -> Result<Self> {
        Self::from_wide(i128::from(value))
    }

    fn from_wide(value: i128) -> Result<Self> {
        if value.unsigned_abs() >= FREQUENCY_CAP as u128 {
            return Err(Error::FrequencyOutOfRange(value));
        }
        Ok(Frequency(value as i64))
    }

    pub const fn get(self) -> i64 {
        self.0
    }

    pub fn checked_add(self, rhs: i64) -> Result<Self> {
        Self::from_wide(i128::from(self.0) + i128::from(rhs))
    }

    pub fn checked_sub(self, rhs: Frequency) -> Result<Self> {
        Self::from_wide(i128::from(self.0) - i128::from(rhs.0))
    }

    pub fn checked_mul(self, factor: i64) -> Result<Self> {
        Self::from_wide(i128::from(self.0) * i128::from(factor))
    }

    /// `factor·n + offset`, checked.
    pub fn affine(self, factor: i64, offset: i64) -> Result<Self> {
        Self::from_wide(i128::from(self.0) * i128::from(factor) + i128::from(offset))
    }

    /// 4-adic valuation: the largest `m` with `4^m | n`.
    pub fn v4(self) -> Result<u32> {
        if self.0 == 0 {
            return Err(Error::ZeroValuation);
        }
        // 4^m | n  iff  2m <= trailing zeros
        Ok(self.0.trailing_zeros() / 2)
    }

    /// Exact test for `μ̂(n) = 0` (see the module docs for the derivation).
    pub fn is_zero_of_muhat(self) -> bool {
        match self.v4() {
            Ok(v) => (self.0 >> (2 * v)) & 1 == 1,
            Err(_) => false,
        }
    }
}

impl TryFrom<i64> for Frequency {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Frequency::new(value)
    }
}

impl From<Frequency> for i64 {
    fn from(n: Frequency) -> i64 {
        n.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(n: i64) -> Frequency {
        Frequency::new(n).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(f(1).v4().unwrap(), 0);
        assert_eq!(f(8).v4().unwrap(), 1);
        assert_eq!(f(48).v4().unwrap(), 2);
        assert_eq!(f(-64).v4().unwrap(), 3);
        assert_eq!(f(2).v4().unwrap(), 0);
        assert_eq!(f(0).v4(), Err(Error::ZeroValuation));
    }

    #[test]
    fn zero_predicate_examples() {
        assert!(f(1).is_zero_of_muhat());
        assert!(!f(2).is_zero_of_muhat());
        assert!(f(12).is_zero_of_muhat());
        assert!(!f(0).is_zero_of_muhat());
        assert!(f(-3).is_zero_of_muhat());
        assert!(!f(-8).is_zero_of_muhat());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(Frequency::new(FREQUENCY_CAP - 1).is_ok());
        assert!(Frequency::new(FREQUENCY_CAP).is_err());
        assert!(Frequency::new(-FREQUENCY_CAP).is_err());
        assert!(Frequency::new(i64::MIN).is_err());
        let big = f(FREQUENCY_CAP / 2);
        assert!(big.checked_mul(4).is_err());
        assert!(big.affine(2, 0).is_err());
        assert!(big.affine(1, FREQUENCY_CAP / 2).is_err());
        assert_eq!(f(5).affine(4, 1).unwrap().get(), 21);
    }

    #[test]
    fn try_from_validates() {
        assert_eq!(Frequency::try_from(17).unwrap().get(), 17);
        assert!(Frequency::try_from(FREQUENCY_CAP).is_err());
    }

    fn brute_v4(n: i64) -> u32 {
        let mut m = 0;
        let mut x = n;
        while x % 4 == 0 {
            x /= 4;
            m += 1;
        }
        m
    }

    proptest! {
        #[test]
        fn valuation_matches_repeated_division(n in -(1i64 << 59)..(1i64 << 59)) {
            prop_assume!(n != 0);
            prop_assert_eq!(f(n).v4().unwrap(), brute_v4(n));
        }

        #[test]
        fn predicate_matches_factorwise_definition(n in -100_000i64..100_000) {
            // μ̂(n) = 0 iff some factor k has n = 4^{k-1}·odd
            let mut expected = false;
            let mut q = n;
            while q != 0 {
                if q % 2 != 0 {
                    expected = true;
                    break;
                }
                if q % 4 != 0 {
                    break;
                }
                q /= 4;
            }
            prop_assert_eq!(f(n).is_zero_of_muhat(), expected);
        }

        #[test]
        fn predicate_is_even_and_scale_invariant(n in -(1i64 << 40)..(1i64 << 40)) {
            let z = f(n).is_zero_of_muhat();
            prop_assert_eq!(f(-n).is_zero_of_muhat(), z);
            prop_assert_eq!(f(n).checked_mul(4).unwrap().is_zero_of_muhat(), z);
        }
    }
}
