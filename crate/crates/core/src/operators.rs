//! The Cuntz isometries and related operators as maps on frequency labels.
//!
//! Every operator used here sends each exponential `e_n` either to another
//! exponential `e_{n'}` or to 0, so it is determined by a partial map on
//! integer labels. An [`IndexOp`] stores that map as disjoint branches, each a
//! residue class mod a power of 4 carrying an affine rule
//! `n ↦ (a·n + b)/d`, optionally restricted to the members of a
//! [`DigitSystem`]. Composition and (range-disjoint) sums are evaluated
//! pointwise, so every operator identity reduces to exact integer arithmetic.
//!
//! | operator | action on labels |
//! |----------|------------------|
//! | `S_0`    | `n ↦ 4n` (all `n`) |
//! | `S_1`    | `n ↦ 4n + 1` (all `n`) |
//! | `S_0^*`  | `4γ ↦ γ`, `4γ + 1 ↦ 0` (on `Γ`) |
//! | `S_1^*`  | `4γ + 1 ↦ γ`, `4γ ↦ 0` (on `Γ`) |
//! | `M_k`    | `n ↦ n + k` |
//! | `U_p`    | `γ ↦ pγ` (on `Γ`) |
//! | `W̃_p`    | `4γ ↦ 4γ`, `4γ + 1 ↦ 4γ + p` (on `Γ`) |
//!
//! `W̃_p = S_0S_0^* + M_{p−1}S_1S_1^*` is the image of `S_0S_0^* + S_1S_1^*`
//! under `X ↦ U_pXU_p^*`, using `U_pS_0 = S_0U_p` and
//! `U_pS_1 = M_{p−1}S_1U_p`. It carries the orthonormal basis `E(Γ)` onto
//! `E(4Γ ∪ (4Γ + p))`, which is therefore an orthonormal basis whenever `W̃_p`
//! is unitary.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::digits::{DigitSystem, LevelSet};
use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::report::CheckReport;

/// Largest level accepted by the lemma and bijection checks.
pub const MAX_CHECK_LEVEL: u32 = 12;

/// A label and its two differing images.
pub type Disagreement = (Frequency, Option<Frequency>, Option<Frequency>);

/// `n ↦ (mul·n + add)/div`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineRule {
    pub mul: i64,
    pub add: i64,
    pub div: i64,
}

impl AffineRule {
    pub const fn new(mul: i64, add: i64, div: i64) -> Self {
        Self { mul, add, div }
    }
}

/// `n ≡ residue (mod modulus)` with `modulus` a power of 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueClass {
    pub modulus: i64,
    pub residue: i64,
}

impl ResidueClass {
    fn contains(&self, n: i64) -> bool {
        n.rem_euclid(self.modulus) == self.residue
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// `None` means every label.
    pub domain: Option<ResidueClass>,
    pub rule: AffineRule,
}

impl Branch {
    pub fn total(rule: AffineRule) -> Self {
        Self { domain: None, rule }
    }

    pub fn on_residue(modulus: i64, residue: i64, rule: AffineRule) -> Self {
        Self {
            domain: Some(ResidueClass { modulus, residue }),
            rule,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Branches(Vec<Branch>),
    /// `outer ∘ inner`
    Compose(Box<IndexOp>, Box<IndexOp>),
    Sum(Box<IndexOp>, Box<IndexOp>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexOp {
    name: String,
    support: Option<DigitSystem>,
    node: Node,
}

fn is_power_of_four(m: i64) -> bool {
    m > 0 && (m as u64).is_power_of_two() && m.trailing_zeros().is_multiple_of(2)
}

impl IndexOp {
    /// Builds a branch operator. Labels outside `support` are rejected at
    /// application; labels matching no branch map to the zero vector.
    ///
    /// Branch domains must be provably disjoint, and each rule must produce
    /// integers on its whole residue class.
    pub fn from_branches(
        name: impl Into<String>,
        support: Option<DigitSystem>,
        branches: Vec<Branch>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidOperator {
            op: name.clone(),
            reason,
        };
        for b in &branches {
            let AffineRule { mul, add, div } = b.rule;
            if div <= 0 {
                return Err(invalid(format!("divisor {div} must be positive")));
            }
            match b.domain {
                Some(ResidueClass { modulus, residue }) => {
                    if !is_power_of_four(modulus) || !(0..modulus).contains(&residue) {
                        return Err(invalid(format!(
                            "bad residue class {residue} mod {modulus}"
                        )));
                    }
                    // div | mul·(residue + k·modulus) + add for every k
                    let integral = (i128::from(mul) * i128::from(modulus)) % i128::from(div) == 0
                        && (i128::from(mul) * i128::from(residue) + i128::from(add))
                            % i128::from(div)
                            == 0;
                    if !integral {
                        return Err(invalid(format!(
                            "rule {mul}n+{add} not divisible by {div} on {residue} mod {modulus}"
                        )));
                    }
                }
                None => {
                    if mul % div != 0 || add % div != 0 {
                        return Err(invalid(format!("rule {mul}n+{add} not divisible by {div}")));
                    }
                }
            }
        }
        for (i, a) in branches.iter().enumerate() {
            for b in &branches[i + 1..] {
                let disjoint = match (a.domain, b.domain) {
                    (Some(x), Some(y)) => {
                        let m = x.modulus.min(y.modulus);
                        x.residue.rem_euclid(m) != y.residue.rem_euclid(m)
                    }
                    _ => false,
                };
                if !disjoint {
                    return Err(invalid("branch domains overlap".into()));
                }
            }
        }
        Ok(Self {
            name,
            support,
            node: Node::Branches(branches),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The labels on which the operator is defined, if restricted.
    pub fn support(&self) -> Option<&DigitSystem> {
        self.support.as_ref()
    }

    /// Image of `e_n`: `Some(label)` or `None` for the zero vector.
    pub fn apply(&self, n: Frequency) -> Result<Option<Frequency>> {
        if let Some(ds) = &self.support {
            if !ds.contains(n) {
                return Err(Error::NotInDomain {
                    op: self.name.clone(),
                    label: n.get(),
                });
            }
        }
        match &self.node {
            Node::Branches(branches) => {
                let Some(b) = branches
                    .iter()
                    .find(|b| b.domain.is_none_or(|d| d.contains(n.get())))
                else {
                    return Ok(None);
                };
                let num = n.affine(b.rule.mul, b.rule.add)?;
                Ok(Some(Frequency::new(num.get() / b.rule.div)?))
            }
            Node::Compose(outer, inner) => match inner.apply(n)? {
                Some(m) => outer.apply(m),
                None => Ok(None),
            },
            Node::Sum(left, right) => match (left.apply(n)?, right.apply(n)?) {
                (Some(a), Some(b)) => Err(Error::DoubleContribution {
                    op: self.name.clone(),
                    input: n.get(),
                    first: a.get(),
                    second: b.get(),
                }),
                (a, b) => Ok(a.or(b)),
            },
        }
    }

    /// `outer ∘ inner`: applies `inner` first.
    pub fn compose(outer: &IndexOp, inner: &IndexOp) -> IndexOp {
        IndexOp {
            name: format!("{}·{}", outer.name, inner.name),
            support: inner.support.clone(),
            node: Node::Compose(Box::new(outer.clone()), Box::new(inner.clone())),
        }
    }

    /// Formal sum `left + right`, accepted only if no label in the image of
    /// `tested` receives two contributions.
    pub fn add(left: &IndexOp, right: &IndexOp, tested: &[Frequency]) -> Result<IndexOp> {
        let name = format!("({} + {})", left.name, right.name);
        let mut left_range: HashMap<Frequency, Frequency> = HashMap::new();
        for &n in tested {
            if let Some(m) = left.apply(n)? {
                left_range.insert(m, n);
            }
        }
        for &n in tested {
            if let Some(m) = right.apply(n)? {
                if let Some(&src) = left_range.get(&m) {
                    return Err(Error::RangeCollision {
                        op: name,
                        label: m.get(),
                        left: src.get(),
                        right: n.get(),
                    });
                }
            }
        }
        Ok(IndexOp {
            name,
            support: None,
            node: Node::Sum(Box::new(left.clone()), Box::new(right.clone())),
        })
    }

    /// First label in `labels` where the two operators differ, with both images.
    pub fn first_disagreement(
        &self,
        other: &IndexOp,
        labels: impl IntoIterator<Item = Frequency>,
    ) -> Result<Option<Disagreement>> {
        for n in labels {
            let (a, b) = (self.apply(n)?, other.apply(n)?);
            if a != b {
                return Ok(Some((n, a, b)));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for IndexOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn odd_p(p: i64) -> Result<i64> {
    if p < 1 || p % 2 == 0 {
        return Err(Error::InvalidScale(p));
    }
    Ok(p)
}

fn build(name: &str, support: Option<DigitSystem>, branches: Vec<Branch>) -> IndexOp {
    IndexOp::from_branches(name, support, branches).expect("well-formed built-in operator")
}

/// `S_0 : e_n ↦ e_{4n}` on all integers.
pub fn s0() -> IndexOp {
    build("S0", None, vec![Branch::total(AffineRule::new(4, 0, 1))])
}

/// `S_1 : e_n ↦ e_{4n+1}` on all integers.
pub fn s1() -> IndexOp {
    build("S1", None, vec![Branch::total(AffineRule::new(4, 1, 1))])
}

/// `S_0^*` on `E(Γ)`.
pub fn s0_adj() -> IndexOp {
    build(
        "S0*",
        Some(DigitSystem::canonical()),
        vec![Branch::on_residue(4, 0, AffineRule::new(1, 0, 4))],
    )
}

/// `S_1^*` on `E(Γ)`.
pub fn s1_adj() -> IndexOp {
    build(
        "S1*",
        Some(DigitSystem::canonical()),
        vec![Branch::on_residue(4, 1, AffineRule::new(1, -1, 4))],
    )
}

/// `M_k f = e_k f`.
pub fn m_shift(k: i64) -> IndexOp {
    build(
        &format!("M{k}"),
        None,
        vec![Branch::total(AffineRule::new(1, k, 1))],
    )
}

/// `U_p : e_γ ↦ e_{pγ}` on `E(Γ)`.
pub fn u_p(p: i64) -> Result<IndexOp> {
    let p = odd_p(p)?;
    Ok(build(
        &format!("U{p}"),
        Some(DigitSystem::canonical()),
        vec![Branch::total(AffineRule::new(p, 0, 1))],
    ))
}

/// `W̃_p` on `E(Γ)` from its pointwise formula.
pub fn w_tilde(p: i64) -> Result<IndexOp> {
    let p = odd_p(p)?;
    Ok(build(
        &format!("W{p}"),
        Some(DigitSystem::canonical()),
        vec![
            Branch::on_residue(4, 0, AffineRule::new(1, 0, 1)),
            Branch::on_residue(4, 1, AffineRule::new(1, p - 1, 1)),
        ],
    ))
}

/// `S_0S_0^* + M_{p−1}S_1S_1^*`, assembled from the generators and validated
/// on `tested`.
pub fn w_tilde_from_generators(p: i64, tested: &[Frequency]) -> Result<IndexOp> {
    let p = odd_p(p)?;
    let range0 = IndexOp::compose(&s0(), &s0_adj());
    let range1 = IndexOp::compose(&m_shift(p - 1), &IndexOp::compose(&s1(), &s1_adj()));
    IndexOp::add(&range0, &range1, tested)
}

fn canonical(level: u32) -> Result<LevelSet> {
    DigitSystem::canonical().enumerate(level)
}

fn image(op: &IndexOp, labels: &[Frequency]) -> Result<Vec<Option<Frequency>>> {
    labels.iter().map(|&n| op.apply(n)).collect()
}

/// First pair of distinct labels with the same image.
fn collision(labels: &[Frequency], images: &[Frequency]) -> Option<(Frequency, Frequency)> {
    let mut seen = HashMap::new();
    for (&n, &m) in labels.iter().zip(images) {
        if let Some(prev) = seen.insert(m, n) {
            return Some((prev, n));
        }
    }
    None
}

fn check_level(level: u32, min: u32, max: u32) -> Result<()> {
    if level < min {
        return Err(Error::LevelTooSmall { level, min });
    }
    if level > max {
        return Err(Error::LevelTooLarge { level, max });
    }
    Ok(())
}

/// Cuntz relations on `Γ_m`: `S_0`, `S_1` injective with disjoint ranges
/// covering `Γ_{m+1}`, `S_i^*S_j = δ_ij` on `Γ_m`, and
/// `S_0S_0^* + S_1S_1^* = I` on `Γ_{m+1}`.
pub fn cuntz_check(level: u32) -> Result<CheckReport> {
    const NAME: &str = "cuntz";
    check_level(level, 1, crate::digits::MAX_LEVEL - 1)?;
    let params = [("m", i64::from(level))];
    let gamma = canonical(level)?;
    let labels = gamma.elements();
    let next = canonical(level + 1)?;
    let fail = |pair, details: String| Ok(CheckReport::failed(NAME, &params, pair, details));

    let mut ranges = Vec::new();
    for op in [s0(), s1()] {
        let img: Vec<Frequency> = image(&op, labels)?.into_iter().flatten().collect();
        if let Some(pair) = collision(labels, &img) {
            return fail(pair, format!("{op} is not injective"));
        }
        ranges.push(img);
    }
    let zero_range: HashSet<_> = ranges[0].iter().copied().collect();
    if let Some(&m) = ranges[1].iter().find(|m| zero_range.contains(m)) {
        return fail((m, m), "ranges of S0 and S1 intersect".into());
    }
    let mut union: Vec<Frequency> = ranges.concat();
    union.sort_unstable();
    if let Some(g) = next.iter().find(|g| union.binary_search(g).is_err()) {
        return fail(
            (g, g),
            "label of the next level missing from the ranges".into(),
        );
    }
    if let Some(&u) = union.iter().find(|&&u| !next.contains(u)) {
        return fail((u, u), "range leaves the next level".into());
    }

    let gens = [s0(), s1()];
    let adjs = [s0_adj(), s1_adj()];
    for (i, adj) in adjs.iter().enumerate() {
        for (j, gen) in gens.iter().enumerate() {
            let product = IndexOp::compose(adj, gen);
            for &n in labels {
                let got = product.apply(n)?;
                let want = (i == j).then_some(n);
                if got != want {
                    return fail(
                        (n, got.unwrap_or(Frequency::ZERO)),
                        format!("{product} should be {}", if i == j { "I" } else { "0" }),
                    );
                }
            }
        }
    }

    let projections = IndexOp::add(
        &IndexOp::compose(&s0(), &s0_adj()),
        &IndexOp::compose(&s1(), &s1_adj()),
        next.elements(),
    );
    let projections = match projections {
        Ok(op) => op,
        Err(Error::RangeCollision { left, right, .. }) => {
            return fail(
                (Frequency::new(left)?, Frequency::new(right)?),
                "projection ranges overlap".into(),
            )
        }
        Err(e) => return Err(e),
    };
    for n in next.iter() {
        if projections.apply(n)? != Some(n) {
            return fail((n, n), "S0S0* + S1S1* is not the identity".into());
        }
    }
    Ok(CheckReport::passed(
        NAME,
        &params,
        format!("{} labels; ranges tile {} labels", labels.len(), next.len()),
    ))
}

/// `U_pS_0 = S_0U_p` and `U_pS_1 = M_{p−1}S_1U_p` on `Γ_m`.
pub fn lemma_us1_check(p: i64, level: u32) -> Result<CheckReport> {
    const NAME: &str = "lemma-us1";
    let up = u_p(p)?;
    check_level(level, 0, MAX_CHECK_LEVEL)?;
    let params = [("p", p), ("m", i64::from(level))];
    let gamma = canonical(level)?;

    let lhs0 = IndexOp::compose(&up, &s0());
    let rhs0 = IndexOp::compose(&s0(), &up);
    if let Some((n, a, b)) = lhs0.first_disagreement(&rhs0, gamma.iter())? {
        return Ok(CheckReport::failed(
            NAME,
            &params,
            (n, a.or(b).unwrap_or(Frequency::ZERO)),
            format!("U_p S0 e_n = {a:?} but S0 U_p e_n = {b:?}"),
        ));
    }
    let lhs1 = IndexOp::compose(&up, &s1());
    let rhs1 = IndexOp::compose(&m_shift(p - 1), &IndexOp::compose(&s1(), &up));
    if let Some((n, a, b)) = lhs1.first_disagreement(&rhs1, gamma.iter())? {
        return Ok(CheckReport::failed(
            NAME,
            &params,
            (n, a.or(b).unwrap_or(Frequency::ZERO)),
            format!("U_p S1 e_n = {a:?} but M_(p-1) S1 U_p e_n = {b:?}"),
        ));
    }
    // both sides of the S1 identity are 4pγ + p
    for g in gamma.iter() {
        let want = g.affine(4 * p, p)?;
        if lhs1.apply(g)? != Some(want) {
            return Ok(CheckReport::failed(
                NAME,
                &params,
                (g, want),
                "image is not 4pγ + p",
            ));
        }
    }
    Ok(CheckReport::passed(
        NAME,
        &params,
        format!("{} labels, both identities exact", gamma.len()),
    ))
}

/// `W̃_p` fixes `4Γ_m`, maps `4Γ_m + 1` one-to-one onto `4Γ_m + p`, carries
/// `Γ_{m+1}` onto `enumerate(additive(p), m+1)`, and agrees with
/// `S_0S_0^* + M_{p−1}S_1S_1^*`.
pub fn w_tilde_bijection_check(p: i64, level: u32) -> Result<CheckReport> {
    const NAME: &str = "w-tilde-bijection";
    let w = w_tilde(p)?;
    check_level(level, 0, MAX_CHECK_LEVEL)?;
    let params = [("p", p), ("m", i64::from(level))];
    let fail = |pair, details: &str| Ok(CheckReport::failed(NAME, &params, pair, details));
    let gamma = canonical(level)?;
    let next = canonical(level + 1)?;

    for g in gamma.iter() {
        let even = g.checked_mul(4)?;
        if w.apply(even)? != Some(even) {
            return fail((even, even), "label in 4Γ is not fixed");
        }
    }
    let odd: Vec<Frequency> = gamma
        .iter()
        .map(|g| g.affine(4, 1))
        .collect::<Result<_>>()?;
    let img: Vec<Frequency> = image(&w, &odd)?.into_iter().flatten().collect();
    if img.len() != odd.len() {
        return fail((odd[0], odd[0]), "label in 4Γ+1 maps to zero");
    }
    if let Some(pair) = collision(&odd, &img) {
        return fail(pair, "4Γ+1 is not mapped one-to-one");
    }
    let mut target: Vec<Frequency> = gamma
        .iter()
        .map(|g| g.affine(4, p))
        .collect::<Result<_>>()?;
    target.sort_unstable();
    let mut sorted = img.clone();
    sorted.sort_unstable();
    if let Some((&a, &b)) = sorted.iter().zip(&target).find(|(a, b)| a != b) {
        return fail((a, b), "image of 4Γ+1 differs from 4Γ+p");
    }

    let additive = DigitSystem::additive(p)?.enumerate(level + 1)?;
    let mut full: Vec<Frequency> = image(&w, next.elements())?.into_iter().flatten().collect();
    full.sort_unstable();
    if let Some((&a, &b)) = full.iter().zip(additive.elements()).find(|(a, b)| a != b) {
        return fail((a, b), "image of Γ differs from the additive set");
    }
    if full.len() != additive.len() {
        return fail(
            (Frequency::ZERO, Frequency::ZERO),
            "image size differs from the additive set",
        );
    }

    let composed = match w_tilde_from_generators(p, next.elements()) {
        Ok(op) => op,
        Err(Error::RangeCollision { left, right, .. }) => {
            return fail(
                (Frequency::new(left)?, Frequency::new(right)?),
                "generator ranges overlap",
            )
        }
        Err(e) => return Err(e),
    };
    if let Some((n, a, _)) = w.first_disagreement(&composed, next.iter())? {
        return fail(
            (n, a.unwrap_or(Frequency::ZERO)),
            "pointwise W differs from S0S0* + M_(p-1)S1S1*",
        );
    }
    Ok(CheckReport::passed(
        NAME,
        &params,
        format!("{} labels carried onto {}", next.len(), additive.system()),
    ))
}
