//! Base-4 digit systems generating the candidate spectra.
//!
//! A [`DigitSystem`] assigns a two-element digit set `{0, d}` to each base-4
//! position: an explicit list for the low positions and one tail set for all
//! higher positions. The set it generates is
//! `{ Σ_{i<m} d_i 4^i : m finite, d_i ∈ D_i }`.
//!
//! | set              | low positions | tail     |
//! |------------------|---------------|----------|
//! | canonical `Γ`    | none          | `{0, 1}` |
//! | scaled `pΓ`      | none          | `{0, p}` |
//! | additive `4Γ ∪ (4Γ + p)` | `{0, p}` | `{0, 1}` |
//!
//! Since `d ≢ 0 (mod 4)`, the two digits of a set are distinct mod 4, so
//! membership is decided by peeling off one digit per position.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::report::CheckReport;

/// Largest level accepted by [`DigitSystem::enumerate`].
pub const MAX_LEVEL: u32 = 14;

/// The digit set `{0, d}` with `d > 0` and `4 ∤ d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DigitSet {
    digit: i64,
}

impl DigitSet {
    pub fn new(digit: i64) -> Result<Self> {
        if digit <= 0 || digit % 4 == 0 {
            return Err(Error::InvalidDigitSet(digit));
        }
        Ok(Self { digit })
    }

    /// The nonzero digit.
    pub fn digit(&self) -> i64 {
        self.digit
    }

    pub fn digits(&self) -> [i64; 2] {
        [0, self.digit]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitSystem {
    positions: Vec<DigitSet>,
    tail: DigitSet,
}

fn odd_scale(p: i64) -> Result<i64> {
    if p < 1 || p % 2 == 0 {
        return Err(Error::InvalidScale(p));
    }
    Ok(p)
}

impl DigitSystem {
    /// Trailing low positions equal to the tail are dropped, so systems that
    /// generate the same set by the same rule compare equal (e.g.
    /// `additive(1) == canonical()`).
    pub fn new(mut positions: Vec<DigitSet>, tail: DigitSet) -> Self {
        while positions.last() == Some(&tail) {
            positions.pop();
        }
        Self { positions, tail }
    }

    /// `Γ`: digits `{0, 1}` everywhere.
    pub fn canonical() -> Self {
        Self::new(Vec::new(), DigitSet { digit: 1 })
    }

    /// `pΓ` for odd `p ≥ 1`.
    pub fn scaled(p: i64) -> Result<Self> {
        let p = odd_scale(p)?;
        Ok(Self::new(Vec::new(), DigitSet::new(p)?))
    }

    /// `4Γ ∪ (4Γ + p)` for odd `p ≥ 1`.
    pub fn additive(p: i64) -> Result<Self> {
        let p = odd_scale(p)?;
        Ok(Self::new(vec![DigitSet::new(p)?], DigitSet { digit: 1 }))
    }

    pub fn digit_set(&self, position: usize) -> DigitSet {
        self.positions.get(position).copied().unwrap_or(self.tail)
    }

    pub fn low_positions(&self) -> &[DigitSet] {
        &self.positions
    }

    pub fn tail(&self) -> DigitSet {
        self.tail
    }

    /// All `Σ_{i<m} d_i 4^i`, sorted ascending. Levels above [`MAX_LEVEL`]
    /// are rejected.
    pub fn enumerate(&self, level: u32) -> Result<LevelSet> {
        if level > MAX_LEVEL {
            return Err(Error::LevelTooLarge {
                level,
                max: MAX_LEVEL,
            });
        }
        let mut elements = vec![Frequency::ZERO];
        let mut place = 1i64;
        for i in 0..level as usize {
            let step = Frequency::new(self.digit_set(i).digit)?.checked_mul(place)?;
            let shifted = elements
                .iter()
                .map(|e| e.checked_add(step.get()))
                .collect::<Result<Vec<_>>>()?;
            elements.extend(shifted);
            place *= 4;
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].get(), level));
        }
        Ok(LevelSet {
            system: self.clone(),
            level,
            elements,
        })
    }

    /// Whether `n` has a finite admissible digit expansion.
    pub fn contains(&self, n: Frequency) -> bool {
        let mut rest = n.get();
        let mut position = 0usize;
        while rest != 0 {
            if rest < 0 {
                // every member is a sum of nonnegative digits
                return false;
            }
            let d = self.digit_set(position).digit;
            if rest % 4 == 0 {
                rest /= 4;
            } else if rest % 4 == d % 4 && rest >= d {
                rest = (rest - d) / 4;
            } else {
                return false;
            }
            position += 1;
        }
        true
    }
}

impl fmt::Display for DigitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.positions.as_slice(), self.tail.digit) {
            ([], 1) => write!(f, "canonical"),
            ([], p) => write!(f, "scaled({p})"),
            ([low], 1) => write!(f, "additive({})", low.digit),
            (low, t) => {
                write!(f, "digits[")?;
                for d in low {
                    write!(f, "{{0,{}}},", d.digit)?;
                }
                write!(f, "{{0,{t}}}...]")
            }
        }
    }
}

impl Serialize for DigitSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The `2^m` elements generated by digit strings of length `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    system: DigitSystem,
    level: u32,
    elements: Vec<Frequency>,
}

impl LevelSet {
    pub fn system(&self) -> &DigitSystem {
        &self.system
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Sorted ascending.
    pub fn elements(&self) -> &[Frequency] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: Frequency) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    pub fn max_abs(&self) -> i64 {
        self.elements
            .iter()
            .map(|e| e.get().abs())
            .max()
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Frequency> + '_ {
        self.elements.iter().copied()
    }
}

/// Serializes as a JSON array of integers, ascending.
impl Serialize for LevelSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements.iter().map(|e| e.get()))
    }
}

/// Checks `Γ_m = 4Γ_{m−1} ⊔ (4Γ_{m−1} + 1)` for the canonical set.
pub fn invariance_check(level: u32) -> Result<CheckReport> {
    const NAME: &str = "invariance";
    if level == 0 {
        return Err(Error::LevelTooSmall { level, min: 1 });
    }
    let params = [("m", i64::from(level))];
    let gamma = DigitSystem::canonical().enumerate(level)?;
    let prev = DigitSystem::canonical().enumerate(level - 1)?;
    let even = prev
        .iter()
        .map(|g| g.checked_mul(4))
        .collect::<Result<Vec<_>>>()?;
    let odd = prev
        .iter()
        .map(|g| g.affine(4, 1))
        .collect::<Result<Vec<_>>>()?;

    // the two halves are disjoint by residue mod 4; the union must equal Γ_m
    if let Some((&a, &b)) = even.iter().zip(&odd).find(|(a, b)| a == b) {
        return Ok(CheckReport::failed(NAME, &params, (a, b), "halves overlap"));
    }
    let mut union: Vec<Frequency> = even.into_iter().chain(odd).collect();
    union.sort_unstable();
    if union.len() != gamma.len() {
        let witness = gamma.iter().find(|g| union.binary_search(g).is_err());
        let w = witness.unwrap_or(Frequency::ZERO);
        return Ok(CheckReport::failed(NAME, &params, (w, w), "size mismatch"));
    }
    if let Some((&u, &g)) = union.iter().zip(gamma.elements()).find(|(u, g)| u != g) {
        return Ok(CheckReport::failed(
            NAME,
            &params,
            (u, g),
            "union element differs from the level set",
        ));
    }
    Ok(CheckReport::passed(
        NAME,
        &params,
        format!("{} elements split into 4Γ and 4Γ+1", gamma.len()),
    ))
}

/// Exact pairwise orthogonality: every difference of distinct elements is a
/// zero of `μ̂`.
pub fn orthogonality_check(set: &LevelSet) -> Result<CheckReport> {
    const NAME: &str = "orthogonality";
    let params = [("m", i64::from(set.level()))];
    let elems = set.elements();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            if !b.checked_sub(a)?.is_zero_of_muhat() {
                return Ok(CheckReport::failed(
                    NAME,
                    &params,
                    (a, b),
                    format!("{} - {} is not a zero of the transform", b, a),
                ));
            }
        }
    }
    Ok(CheckReport::passed(
        NAME,
        &params,
        format!(
            "{} pairs of {}",
            elems.len() * elems.len().saturating_sub(1) / 2,
            set.system()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn values(ds: &DigitSystem, m: u32) -> Vec<i64> {
        ds.enumerate(m).unwrap().iter().map(|f| f.get()).collect()
    }

    fn f(n: i64) -> Frequency {
        Frequency::new(n).unwrap()
    }

    #[test]
    fn canonical_levels() {
        let c = DigitSystem::canonical();
        assert_eq!(values(&c, 0), vec![0]);
        assert_eq!(values(&c, 1), vec![0, 1]);
        assert_eq!(values(&c, 2), vec![0, 1, 4, 5]);
        assert_eq!(values(&c, 3), vec![0, 1, 4, 5, 16, 17, 20, 21]);
        assert_eq!(c.enumerate(7).unwrap().len(), 128);
    }

    #[test]
    fn scaled_levels() {
        assert_eq!(
            values(&DigitSystem::scaled(5).unwrap(), 2),
            vec![0, 5, 20, 25]
        );
        assert_eq!(
            values(&DigitSystem::scaled(3).unwrap(), 2),
            vec![0, 3, 12, 15]
        );
        assert_eq!(DigitSystem::scaled(1).unwrap(), DigitSystem::canonical());
    }

    #[test]
    fn additive_levels() {
        assert_eq!(
            values(&DigitSystem::additive(3).unwrap(), 2),
            vec![0, 3, 4, 7]
        );
        assert_eq!(
            values(&DigitSystem::additive(5).unwrap(), 2),
            vec![0, 4, 5, 9]
        );
        assert_eq!(values(&DigitSystem::additive(7).unwrap(), 1), vec![0, 7]);
        assert_eq!(DigitSystem::additive(1).unwrap(), DigitSystem::canonical());
    }

    #[test]
    fn scale_preconditions() {
        for p in [0, -1, -3, 2, 4, 10] {
            assert_eq!(DigitSystem::scaled(p), Err(Error::InvalidScale(p)));
            assert_eq!(DigitSystem::additive(p), Err(Error::InvalidScale(p)));
        }
        assert!(DigitSet::new(4).is_err());
        assert!(DigitSet::new(0).is_err());
        assert!(DigitSet::new(6).is_ok());
    }

    #[test]
    fn level_cap() {
        let c = DigitSystem::canonical();
        assert!(c.enumerate(MAX_LEVEL).is_ok());
        assert!(matches!(
            c.enumerate(MAX_LEVEL + 1),
            Err(Error::LevelTooLarge { .. })
        ));
    }

    #[test]
    fn mixed_system_is_injective() {
        // digits distinct mod 4 at every position make digit strings ↦ sums one-to-one
        let ds = DigitSystem::new(vec![DigitSet::new(7).unwrap()], DigitSet::new(3).unwrap());
        let set = ds.enumerate(6).unwrap();
        assert_eq!(set.len(), 64);
    }

    #[test]
    fn membership_examples() {
        let c = DigitSystem::canonical();
        assert!(c.contains(f(21)));
        assert!(!c.contains(f(2)));
        assert!(c.contains(f(0)));
        assert!(!c.contains(f(-1)));
        let a3 = DigitSystem::additive(3).unwrap();
        assert!(a3.contains(f(7)));
        assert!(!a3.contains(f(1)));
        // p = 3 has the fixed point n = −1 of n ↦ (n − 3)/4
        let s3 = DigitSystem::scaled(3).unwrap();
        assert!(!s3.contains(f(-1)));
        assert!(s3.contains(f(15)));
        assert!(!s3.contains(f(1)));
    }

    #[test]
    fn display_and_json_shape() {
        assert_eq!(DigitSystem::canonical().to_string(), "canonical");
        assert_eq!(DigitSystem::scaled(5).unwrap().to_string(), "scaled(5)");
        assert_eq!(DigitSystem::additive(3).unwrap().to_string(), "additive(3)");
        let odd = DigitSystem::new(vec![DigitSet::new(3).unwrap()], DigitSet::new(5).unwrap());
        assert_eq!(odd.to_string(), "digits[{0,3},{0,5}...]");
    }

    #[test]
    fn invariance_examples() {
        for m in 1..=10 {
            assert!(invariance_check(m).unwrap().pass(), "m={m}");
        }
        assert!(invariance_check(0).is_err());
    }

    #[test]
    fn orthogonality_of_small_sets() {
        for p in [1, 3, 5, 7] {
            let s = DigitSystem::scaled(p).unwrap().enumerate(5).unwrap();
            assert!(orthogonality_check(&s).unwrap().pass());
            let a = DigitSystem::additive(p).unwrap().enumerate(5).unwrap();
            assert!(orthogonality_check(&a).unwrap().pass());
        }
        // {0,2} is not orthogonal: μ̂(2) ≠ 0
        let bad = DigitSystem::new(vec![], DigitSet::new(2).unwrap())
            .enumerate(2)
            .unwrap();
        let report = orthogonality_check(&bad).unwrap();
        assert!(!report.pass());
        assert_eq!(report.counterexample(), Some((0, 2)));
    }

    fn system() -> impl Strategy<Value = DigitSystem> {
        let p = (0i64..50).prop_map(|k| 2 * k + 1);
        prop_oneof![
            Just(DigitSystem::canonical()),
            p.clone().prop_map(|p| DigitSystem::scaled(p).unwrap()),
            p.prop_map(|p| DigitSystem::additive(p).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_unique_and_nested(ds in system(), m in 0u32..9) {
            let lo = ds.enumerate(m).unwrap();
            let hi = ds.enumerate(m + 1).unwrap();
            prop_assert_eq!(lo.len(), 1usize << m);
            prop_assert!(lo.elements().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(lo.iter().all(|e| hi.contains(e)));
            prop_assert!(lo.iter().all(|e| ds.contains(e)));
        }

        #[test]
        fn membership_agrees_with_enumeration(ds in system(), n in -50i64..5000) {
            // every member below 5000 appears by level 8 for the digits used here
            let set = ds.enumerate(8).unwrap();
            prop_assert_eq!(ds.contains(f(n)), set.contains(f(n)));
        }

        #[test]
        fn scaled_is_elementwise_multiple(k in 0i64..20, m in 0u32..8) {
            let p = 2 * k + 1;
            let scaled = values(&DigitSystem::scaled(p).unwrap(), m);
            let canon: Vec<i64> = values(&DigitSystem::canonical(), m).iter().map(|g| p * g).collect();
            prop_assert_eq!(scaled, canon);
        }

        #[test]
        fn additive_is_union_of_translates(k in 0i64..20, m in 1u32..8) {
            let p = 2 * k + 1;
            let prev = values(&DigitSystem::canonical(), m - 1);
            let mut expected: Vec<i64> = prev.iter().map(|g| 4 * g).chain(prev.iter().map(|g| 4 * g + p)).collect();
            expected.sort_unstable();
            prop_assert_eq!(values(&DigitSystem::additive(p).unwrap(), m), expected);
        }

        #[test]
        fn differences_are_zeros(k in 0i64..50, m in 1u32..7, i in 0usize..64, j in 0usize..64) {
            let p = 2 * k + 1;
            for ds in [DigitSystem::scaled(p).unwrap(), DigitSystem::additive(p).unwrap()] {
                let s = ds.enumerate(m).unwrap();
                let (a, b) = (s.elements()[i % s.len()], s.elements()[j % s.len()]);
                if a != b {
                    prop_assert!(b.checked_sub(a).unwrap().is_zero_of_muhat());
                }
            }
        }
    }
}
