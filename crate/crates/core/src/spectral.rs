//! Spectral functions and their residue components.
//!
//! For a finite frequency set `Λ` the spectral function is
//! `c_Λ(t) = Σ_{λ∈Λ} |μ̂(t − λ)|²`. It never exceeds 1 when `E(Λ)` is
//! orthonormal (Bessel), and it is identically 1 in the limit exactly when
//! `Λ` is a spectrum. The residue component
//! `c_r(t) = Σ_{γ∈Γ_m} |μ̂(t − 4γ − r)|²` is the part of that sum carried by
//! the translate `4Γ + r`; `c_0 + c_1` is the spectral function of `Γ_{m+1}`.
//!
//! Grid evaluation runs in parallel over grid points; each point is an
//! independent sequential sum, so results do not depend on the thread count.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{DigitSystem, LevelSet};
use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::product::{cosine_product, ProductConfig};
use crate::scalar::Scalar;
use crate::summation::NeumaierSum;

/// Significant digits used for CSV output.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

/// `Σ_shifts cosine_product(t − s)²`, compensated.
fn sum_squares<T: Scalar>(t: T, shifts: &[i64], factors: u32) -> T {
    let mut acc = NeumaierSum::new();
    for &s in shifts {
        let v = cosine_product(t - T::of_i64(s), factors);
        acc.add(v * v);
    }
    acc.value()
}

fn max_abs(shifts: &[i64]) -> i64 {
    shifts.iter().map(|s| s.abs()).max().unwrap_or(0)
}

fn check_radius<T: Scalar>(t_abs: T, shifts: &[i64], cfg: &ProductConfig<T>) -> Result<()> {
    let needed = t_abs + T::of_i64(max_abs(shifts));
    if needed > cfg.domain_radius() || needed.is_nan() {
        return Err(Error::OutsideDomain {
            t: needed.as_f64(),
            radius: cfg.domain_radius().as_f64(),
        });
    }
    Ok(())
}

fn residue_shifts(residue: i64, level: u32) -> Result<Vec<i64>> {
    DigitSystem::canonical()
        .enumerate(level)?
        .iter()
        .map(|g| g.affine(4, residue).map(Frequency::get))
        .collect()
}

/// Inflation allowance for `terms` squared truncated factors:
/// `terms · 2 · tailBound`.
pub fn bessel_slack<T: Scalar>(terms: usize, cfg: &ProductConfig<T>) -> T {
    T::of(terms as f64) * T::of(2.0) * cfg.tail_bound()
}

/// `c_Λ(t)` for `Λ = elements`. Requires `|t| + max|λ|` within the radius.
pub fn spectral_fn<T: Scalar>(elements: &LevelSet, t: T, cfg: &ProductConfig<T>) -> Result<T> {
    let shifts: Vec<i64> = elements.iter().map(Frequency::get).collect();
    check_radius(t.abs(), &shifts, cfg)?;
    Ok(sum_squares(t, &shifts, cfg.factors()))
}

/// `c_r(t) = Σ_{γ∈Γ_m} |μ̂(t − 4γ − r)|²`.
pub fn residue_component<T: Scalar>(
    residue: i64,
    t: T,
    level: u32,
    cfg: &ProductConfig<T>,
) -> Result<T> {
    let shifts = residue_shifts(residue, level)?;
    check_radius(t.abs(), &shifts, cfg)?;
    Ok(sum_squares(t, &shifts, cfg.factors()))
}

/// A column that [`sample_grid`] can evaluate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    /// `c_r` over `Γ_m`.
    Residue(i64),
    /// `c_a + c_b`, summed as one series.
    ResidueSum(i64, i64),
    /// `c_Λ` for `Λ = enumerate(ds, m)`.
    Spectrum(DigitSystem),
}

impl Component {
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// The frequencies whose `|μ̂(t − λ)|²` the column sums.
    pub fn shifts(&self, level: u32) -> Result<Vec<i64>> {
        match self {
            Component::Residue(r) => residue_shifts(*r, level),
            Component::ResidueSum(a, b) => {
                let mut s = residue_shifts(*a, level)?;
                s.extend(residue_shifts(*b, level)?);
                Ok(s)
            }
            Component::Spectrum(ds) => {
                Ok(ds.enumerate(level)?.iter().map(Frequency::get).collect())
            }
        }
    }

    /// Whether the summed exponentials are known to be mutually orthogonal,
    /// so that the column obeys Bessel's inequality.
    fn is_orthogonal_family(&self) -> bool {
        match self {
            Component::Residue(_) => true,
            Component::ResidueSum(a, b) => {
                a == b
                    || Frequency::new(a - b)
                        .map(|d| d.is_zero_of_muhat())
                        .unwrap_or(false)
            }
            Component::Spectrum(ds) => ds.low_positions().len() <= 1 && ds.tail().digit() % 2 == 1,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Residue(r) => write!(f, "c{r}"),
            Component::ResidueSum(a, b) => write!(f, "c{a}+c{b}"),
            Component::Spectrum(ds) => write!(f, "{ds}"),
        }
    }
}

/// Parses `c1`, `c0+c1`, `canonical`, `scaled(5)`, `additive(3)`.
impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownComponent(s.to_string());
        let residue = |x: &str| -> Result<i64> {
            x.strip_prefix('c')
                .and_then(|r| r.parse().ok())
                .ok_or_else(unknown)
        };
        let scale = |x: &str, name: &str| -> Option<i64> {
            x.strip_prefix(name)?
                .strip_prefix('(')?
                .strip_suffix(')')?
                .parse()
                .ok()
        };
        let s = s.trim();
        if s == "canonical" {
            return Ok(Component::Spectrum(DigitSystem::canonical()));
        }
        if let Some(p) = scale(s, "scaled") {
            return Ok(Component::Spectrum(DigitSystem::scaled(p)?));
        }
        if let Some(p) = scale(s, "additive") {
            return Ok(Component::Spectrum(DigitSystem::additive(p)?));
        }
        if let Some((a, b)) = s.split_once('+') {
            return Ok(Component::ResidueSum(residue(a)?, residue(b)?));
        }
        Ok(Component::Residue(residue(s)?))
    }
}

/// Uniform grid `from, from + step, …` up to `to` (inclusive within 1e-9 steps).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Grid<T> {
    from: T,
    step: T,
    len: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(from: T, to: T, step: T) -> Result<Self> {
        if !(from.is_finite() && to.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if step <= T::zero() {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if to <= from {
            return Err(Error::InvalidGrid(format!(
                "empty or inverted range [{from}, {to}]"
            )));
        }
        let intervals = ((to - from) / step + T::of(1e-9)).floor();
        let len = intervals
            .to_usize()
            .and_then(|n| n.checked_add(1))
            .filter(|&n| n <= 100_000_000)
            .ok_or_else(|| Error::InvalidGrid("too many grid points".into()))?;
        Ok(Self { from, step, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn from(&self) -> T {
        self.from
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn point(&self, i: usize) -> T {
        self.from + T::of(i as f64) * self.step
    }

    pub fn last(&self) -> T {
        self.point(self.len - 1)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    /// `max |t|` over the grid.
    pub fn max_abs(&self) -> T {
        self.from.abs().max(self.last().abs())
    }
}

/// Smallest domain radius that validates every component on the grid.
pub fn required_radius<T: Scalar>(
    components: &[Component],
    grid: &Grid<T>,
    level: u32,
) -> Result<T> {
    let mut shift = 0;
    for c in components {
        shift = shift.max(max_abs(&c.shifts(level)?));
    }
    Ok(grid.max_abs() + T::of_i64(shift))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleMeta<T> {
    pub config: ProductConfig<T>,
    pub level: u32,
    pub components: Vec<String>,
}

/// Component values on a grid, columns in request order.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralSample<T> {
    grid: Vec<T>,
    per_residue: IndexMap<String, Vec<T>>,
    meta: SampleMeta<T>,
}

impl<T: Scalar> SpectralSample<T> {
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn column(&self, label: &str) -> Option<&[T]> {
        self.per_residue.get(label).map(Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.per_residue.keys().map(String::as_str)
    }

    pub fn meta(&self) -> &SampleMeta<T> {
        &self.meta
    }

    /// CSV with header `t,<labels>`, 12 significant digits, LF endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut line = String::from("t");
        for label in self.per_residue.keys() {
            line.push(',');
            line.push_str(label);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
        for (i, t) in self.grid.iter().enumerate() {
            line.clear();
            line.push_str(&format_significant(t.as_f64(), CSV_SIGNIFICANT_DIGITS));
            for values in self.per_residue.values() {
                line.push(',');
                line.push_str(&format_significant(
                    values[i].as_f64(),
                    CSV_SIGNIFICANT_DIGITS,
                ));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Evaluates each component on every grid point.
pub fn sample_grid<T: Scalar>(
    components: &[Component],
    grid: &Grid<T>,
    level: u32,
    cfg: &ProductConfig<T>,
) -> Result<SpectralSample<T>> {
    if components.is_empty() {
        return Err(Error::InvalidGrid("no components requested".into()));
    }
    let points = grid.points();
    let mut per_residue = IndexMap::new();
    for c in components {
        let shifts = c.shifts(level)?;
        check_radius(grid.max_abs(), &shifts, cfg)?;
        let values: Vec<T> = points
            .par_iter()
            .map(|&t| sum_squares(t, &shifts, cfg.factors()))
            .collect();
        if c.is_orthogonal_family() {
            let ceiling = T::one() + bessel_slack(shifts.len(), cfg) + T::debug_tolerance();
            debug_assert!(
                values.iter().all(|&v| v >= T::zero() && v <= ceiling),
                "{c} leaves [0, 1 + slack]"
            );
        }
        per_residue.insert(c.label(), values);
    }
    Ok(SpectralSample {
        grid: points,
        per_residue,
        meta: SampleMeta {
            config: *cfg,
            level,
            components: components.iter().map(Component::label).collect(),
        },
    })
}

/// `max |c(t + period) − c(t)|` over grid pairs separated by `period`.
pub fn periodicity_defect<T: Scalar>(
    sample: &SpectralSample<T>,
    label: &str,
    period: T,
) -> Result<T> {
    let values = sample
        .column(label)
        .ok_or_else(|| Error::UnknownComponent(label.to_string()))?;
    let grid = sample.grid();
    let no_pairs = || Error::NoMatchedPairs(period.as_f64());
    if grid.len() < 2 || period.is_nan() || period <= T::zero() {
        return Err(no_pairs());
    }
    let step = grid[1] - grid[0];
    let offset = (period / step).round();
    if (offset * step - period).abs() > T::of(1e-9) * period.max(T::one()) {
        return Err(no_pairs());
    }
    let offset = offset
        .to_usize()
        .filter(|&o| o >= 1 && o < grid.len())
        .ok_or_else(no_pairs)?;
    let defect = values[offset..]
        .iter()
        .zip(values)
        .map(|(&later, &earlier)| (later - earlier).abs())
        .fold(T::zero(), T::max);
    Ok(defect)
}

/// Completeness measurements for one digit system on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessDefect<T> {
    system: DigitSystem,
    level: u32,
    config: ProductConfig<T>,
    grid: Grid<T>,
    values: Vec<T>,
    bessel_slack: T,
}

impl<T: Scalar> CompletenessDefect<T> {
    /// The spectral function at each grid point.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `max(1 − c(t), 0)` at each grid point.
    pub fn pointwise_deficiency(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|&v| (T::one() - v).max(T::zero()))
            .collect()
    }

    pub fn max_deficiency(&self) -> T {
        self.pointwise_deficiency()
            .into_iter()
            .fold(T::zero(), T::max)
    }

    /// Grid point of the largest deficiency (first one on ties).
    pub fn argmax_t(&self) -> T {
        let d = self.pointwise_deficiency();
        let mut best = 0;
        for (i, &x) in d.iter().enumerate() {
            if x > d[best] {
                best = i;
            }
        }
        self.grid.point(best)
    }

    pub fn max_overshoot(&self) -> T {
        self.values
            .iter()
            .map(|&v| (v - T::one()).max(T::zero()))
            .fold(T::zero(), T::max)
    }

    /// `2^m · 2 · tailBound`: the most truncation can push `c` above 1.
    pub fn bessel_slack(&self) -> T {
        self.bessel_slack
    }

    pub fn report(&self, threshold: T) -> DefectReport<T> {
        let max_deficiency = self.max_deficiency();
        let max_overshoot = self.max_overshoot();
        DefectReport {
            config: DefectConfig {
                set: self.system.to_string(),
                level: self.level,
                factors: self.config.factors(),
                domain_radius: self.config.domain_radius(),
                grid_from: self.grid.from(),
                grid_to: self.grid.last(),
                grid_step: self.grid.step(),
                threshold,
                bessel_slack: self.bessel_slack,
            },
            max_deficiency,
            max_overshoot,
            argmax_t: self.argmax_t(),
            pass: max_deficiency < threshold && max_overshoot <= self.bessel_slack,
        }
    }
}

/// Evaluates `c_Λ`, `Λ = enumerate(ds, m)`, over the grid.
pub fn completeness_defect<T: Scalar>(
    ds: &DigitSystem,
    grid: &Grid<T>,
    level: u32,
    cfg: &ProductConfig<T>,
) -> Result<CompletenessDefect<T>> {
    let component = Component::Spectrum(ds.clone());
    let mut sample = sample_grid(std::slice::from_ref(&component), grid, level, cfg)?;
    let values = sample
        .per_residue
        .swap_remove(&component.label())
        .unwrap_or_default();
    Ok(CompletenessDefect {
        system: ds.clone(),
        level,
        config: *cfg,
        grid: *grid,
        values,
        bessel_slack: bessel_slack(1usize << level, cfg),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DefectConfig<T> {
    pub set: String,
    pub level: u32,
    pub factors: u32,
    pub domain_radius: T,
    pub grid_from: T,
    pub grid_to: T,
    pub grid_step: T,
    pub threshold: T,
    pub bessel_slack: T,
}

/// JSON shape `{config, maxDeficiency, maxOvershoot, argmaxT, pass}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DefectReport<T> {
    pub config: DefectConfig<T>,
    pub max_deficiency: T,
    pub max_overshoot: T,
    #[serde(rename = "argmaxT")]
    pub argmax_t: T,
    pub pass: bool,
}

/// `%.{digits}g`-style formatting: shortest of fixed or scientific notation
/// with trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
