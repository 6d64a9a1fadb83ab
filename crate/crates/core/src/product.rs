//! Evaluation of `μ̂(t) = ∏_{k≥1} cos(2πt/4^k)`.
//!
//! [`muhat_trunc`] keeps the first `K` factors. Each factor is evaluated as
//! `cos(2π·r)` where `r = t/4^k − round(t/4^k)`; division by a power of 4 and
//! subtraction of the nearest integer are exact in binary floating point, so
//! the only rounding is in the final cosine. At an integer zero of `μ̂` the
//! vanishing factor is `cos(±π/2)`, which is of order machine epsilon.
//!
//! [`muhat_atoms`] computes the same truncation along an unrelated path: the
//! average of `cos(2πtx)` over the `2^L` atoms `x = Σ_{k=1}^{L} ε_k 4^{-k}`,
//! `ε_k = ±1`, of the level-`L` approximation to the self-similar measure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::summation::NeumaierSum;

/// Largest level accepted by [`muhat_atoms`].
pub const MAX_ATOM_LEVEL: u32 = 24;

/// Truncation of the product: `K` factors, validated for `|t| ≤ T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductConfig<T> {
    factors: u32,
    domain_radius: T,
}

impl<T: Scalar> ProductConfig<T> {
    pub fn new(factors: u32, domain_radius: T) -> Result<Self> {
        if factors == 0 {
            return Err(Error::InvalidConfig(
                "factor count must be at least 1".into(),
            ));
        }
        if domain_radius.is_nan() || domain_radius <= T::zero() || domain_radius.is_infinite() {
            return Err(Error::InvalidConfig(format!(
                "domain radius must be positive and finite, got {domain_radius}"
            )));
        }
        Ok(Self {
            factors,
            domain_radius,
        })
    }

    pub fn factors(&self) -> u32 {
        self.factors
    }

    pub fn domain_radius(&self) -> T {
        self.domain_radius
    }

    /// Same factor count, different radius.
    pub fn with_radius(&self, domain_radius: T) -> Result<Self> {
        Self::new(self.factors, domain_radius)
    }

    pub fn tail_bound(&self) -> T {
        tail_bound(self.factors, self.domain_radius)
    }

    pub(crate) fn check(&self, t: T) -> Result<()> {
        if t.abs() > self.domain_radius || t.is_nan() {
            return Err(Error::OutsideDomain {
                t: t.as_f64(),
                radius: self.domain_radius.as_f64(),
            });
        }
        Ok(())
    }
}

/// Upper bound on `|∏_{k≤K} − ∏_{k≥1}|` over `|t| ≤ radius`:
/// `(2πT)²/2 · 16^{−K}/15`.
///
/// The omitted factors have modulus at most 1, so the error is at most
/// `Σ_{k>K} (1 − cos(2πt/4^k)) ≤ Σ_{k>K} (2πt)²/2 · 16^{−k}`.
pub fn tail_bound<T: Scalar>(factors: u32, radius: T) -> T {
    let x = T::TAU() * radius;
    let geometric = T::of(16.0).powi(-(factors as i32)) / T::of(15.0);
    x * x / T::of(2.0) * geometric
}

/// `∏_{k=1}^{K} cos(2πt/4^k)`; rejects `|t|` beyond the configured radius.
pub fn muhat_trunc<T: Scalar>(t: T, cfg: &ProductConfig<T>) -> Result<T> {
    cfg.check(t)?;
    Ok(cosine_product(t, cfg.factors))
}

/// Unchecked product of the first `factors` cosine factors.
pub(crate) fn cosine_product<T: Scalar>(t: T, factors: u32) -> T {
    let quarter = T::of(0.25);
    let mut y = t;
    let mut acc = T::one();
    for _ in 0..factors {
        y = y * quarter;
        let r = y - y.round();
        acc = acc * (T::TAU() * r).cos();
    }
    acc
}

/// Atom-sum oracle for the level-`level` truncation of `μ̂(t)`.
///
/// Returns the real part `2^{−L} Σ cos(2πtx)`. The atoms are symmetric about
/// 0, so the imaginary part vanishes; debug builds assert that it does.
pub fn muhat_atoms<T: Scalar>(t: T, level: u32) -> Result<T> {
    if level == 0 {
        return Err(Error::LevelTooSmall { level, min: 1 });
    }
    if level > MAX_ATOM_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_ATOM_LEVEL,
        });
    }
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let omega = T::TAU() * t;
    walk_atoms(omega, T::zero(), T::one(), level, &mut re, &mut im);
    let weight = T::of(0.5).powi(level as i32);
    debug_assert!(
        (im.value() * weight).abs() <= T::debug_tolerance(),
        "atom sum has imaginary part {}",
        im.value() * weight
    );
    Ok(re.value() * weight)
}

fn walk_atoms<T: Scalar>(
    omega: T,
    x: T,
    scale: T,
    remaining: u32,
    re: &mut NeumaierSum<T>,
    im: &mut NeumaierSum<T>,
) {
    if remaining == 0 {
        let phase = omega * x;
        re.add(phase.cos());
        im.add(phase.sin());
        return;
    }
    let step = scale * T::of(0.25);
    walk_atoms(omega, x - step, step, remaining - 1, re, im);
    walk_atoms(omega, x + step, step, remaining - 1, re, im);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::Frequency;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // μ̂(2) to 20 digits, from a 40-digit evaluation of 60 factors.
    const MUHAT_2: f64 = -0.692_628_912_699_445_6;

    fn cfg(k: u32, r: f64) -> ProductConfig<f64> {
        ProductConfig::new(k, r).unwrap()
    }

    #[test]
    fn config_preconditions() {
        assert!(ProductConfig::new(0, 1.0).is_err());
        assert!(ProductConfig::new(4, 0.0).is_err());
        assert!(ProductConfig::new(4, -1.0).is_err());
        assert!(ProductConfig::new(4, f64::NAN).is_err());
        assert!(ProductConfig::new(4, f64::INFINITY).is_err());
    }

    #[test]
    fn trunc_examples() {
        let c = cfg(16, 4.0);
        assert_eq!(muhat_trunc(0.0, &c).unwrap(), 1.0);
        assert!(muhat_trunc(1.0, &c).unwrap().abs() < 1e-15);
        assert_abs_diff_eq!(muhat_trunc(2.0, &c).unwrap(), MUHAT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            muhat_trunc(2.0, &cfg(30, 4.0)).unwrap(),
            -0.692628,
            epsilon = 1e-6
        );
    }

    #[test]
    fn trunc_rejects_outside_radius() {
        let c = cfg(16, 4.0);
        assert!(matches!(
            muhat_trunc(4.5, &c),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(muhat_trunc(-4.0, &c).is_ok());
        assert!(muhat_trunc(f64::NAN, &c).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        // closed form evaluated independently: (8π)²/2 · 16^-16 / 15
        assert_abs_diff_eq!(
            tail_bound(16, 4.0),
            1.141_402_296_878_248e-18,
            epsilon = 1e-30
        );
        assert!(tail_bound(0, 4.0f64) >= 1.0);
        assert_abs_diff_eq!(
            tail_bound(8, 1.0),
            3.063_928_460_419_599_4e-10,
            epsilon = 1e-22
        );
        assert_eq!(cfg(16, 4.0).tail_bound(), tail_bound(16, 4.0));
    }

    #[test]
    fn tail_bound_dominates_observed_truncation_error() {
        for &t in &[0.3f64, 1.7, 2.0, 3.9, -2.6] {
            for k in 1..12 {
                let err = (cosine_product(t, k) - cosine_product(t, 40)).abs();
                assert!(err <= tail_bound(k, 4.0) + 1e-15, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn atom_examples() {
        assert_abs_diff_eq!(muhat_atoms(0.0, 10).unwrap(), 1.0, epsilon = 1e-14);
        assert!(muhat_atoms(1.0f64, 10).unwrap().abs() < 1e-12);
        assert_abs_diff_eq!(muhat_atoms(2.0, 20).unwrap(), MUHAT_2, epsilon = 1e-12);
        assert!(matches!(
            muhat_atoms(1.0, 25),
            Err(Error::LevelTooLarge { .. })
        ));
        assert!(muhat_atoms(1.0, 0).is_err());
    }

    #[test]
    fn single_precision_path() {
        let c = ProductConfig::<f32>::new(16, 4.0).unwrap();
        assert!((muhat_trunc(2.0f32, &c).unwrap() - MUHAT_2 as f32).abs() < 1e-6);
        assert!(muhat_trunc(1.0f32, &c).unwrap().abs() < 1e-6);
        assert!((muhat_atoms(0.5f32, 12).unwrap() - muhat_trunc(0.5f32, &c).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn integer_zeros_are_resolved() {
        let c = cfg(25, 5000.0);
        for n in -4096i64..=4096 {
            let freq = Frequency::new(n).unwrap();
            if freq.is_zero_of_muhat() {
                assert!(muhat_trunc(n as f64, &c).unwrap().abs() < 1e-8, "n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_by_one(t in -1e6f64..1e6, k in 1u32..40) {
            prop_assert!(cosine_product(t, k).abs() <= 1.0);
        }

        #[test]
        fn even(t in -1e4f64..1e4, k in 1u32..30) {
            prop_assert_eq!(cosine_product(t, k), cosine_product(-t, k));
        }

        #[test]
        fn one_step_recursion(t in -1e4f64..1e4, k in 1u32..30) {
            let lhs = cosine_product(t, k);
            let rhs = (std::f64::consts::TAU * (t / 4.0 - (t / 4.0).round())).cos()
                * cosine_product(t / 4.0, k - 1);
            prop_assert!((lhs - rhs).abs() < 1e-15);
        }

        #[test]
        fn zero_predicate_implies_numerical_zero(n in -(1i64 << 20)..(1i64 << 20)) {
            let f = Frequency::new(n).unwrap();
            if f.is_zero_of_muhat() {
                let k = f.v4().unwrap() + 1;
                prop_assert!(cosine_product(n as f64, k.max(16)).abs() < 1e-8);
            }
        }

        #[test]
        fn atoms_match_product(t in -4.0f64..4.0, level in 1u32..12) {
            let a = muhat_atoms(t, level).unwrap();
            prop_assert!((a - cosine_product(t, level)).abs() < 1e-12);
        }
    }
}
