//! Exact laws of the chains at small times, empirical distributions, the
//! Kolmogorov–Smirnov distance to `?`, `χ_{1/2}` and `λ`, Fourier coefficients
//! of samples, and the geometric/independence check for the integer part of `Y`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::cfrac::ExtendedRational;
use crate::chains::{interval_map, BoundaryValue, IntervalMapIndex};
use crate::error::{Error, Result};
use crate::minkowski::{lambda_survival, qmark, qmark_rational_f64, chi_half_closed};
use crate::psl2z::{GeneratorIndex, ProjectiveMatrix};

pub const MAX_W_STEPS: usize = 12;
pub const MAX_X_STEPS: usize = 7;
pub const MIN_PMF_SAMPLES: usize = 1000;

/// A finitely supported law on `ℝ ∪ {∞}` with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDistribution {
    atoms: Vec<(ExtendedRational, BigRational)>,
}

impl FiniteDistribution {
    pub fn dirac(x: ExtendedRational) -> Self {
        Self {
            atoms: vec![(x, BigRational::one())],
        }
    }

    /// Merges repeated values; zero weights are dropped.
    pub fn from_weighted<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExtendedRational, BigRational)>,
    {
        let mut merged = BTreeMap::new();
        for (x, w) in atoms {
            if w < BigRational::zero() {
                return Err(Error::domain("distribution weight", w));
            }
            *merged.entry(x).or_insert_with(BigRational::zero) += w;
        }
        merged.retain(|_, w| !w.is_zero());
        let dist = Self {
            atoms: merged.into_iter().collect(),
        };
        if dist.total() != BigRational::one() {
            return Err(Error::Degenerate(format!("weights sum to {}", dist.total())));
        }
        Ok(dist)
    }

    pub fn atoms(&self) -> &[(ExtendedRational, BigRational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn weight_of(&self, x: &ExtendedRational) -> BigRational {
        self.atoms
            .binary_search_by(|(v, _)| v.cmp(x))
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    /// `Pr(value < x)`.
    pub fn mass_below(&self, x: &ExtendedRational) -> BigRational {
        self.atoms.iter().take_while(|(v, _)| v < x).map(|(_, w)| w).sum()
    }

    pub fn pushforward<F>(&self, f: F) -> Self
    where
        F: Fn(&ExtendedRational) -> ExtendedRational,
    {
        Self::from_weighted(self.atoms.iter().map(|(x, w)| (f(x), w.clone())))
            .expect("pushforward preserves total mass")
    }

    fn step<F>(&self, branches: &[(BigRational, F)]) -> Self
    where
        F: Fn(&ExtendedRational) -> ExtendedRational + Sync,
    {
        let images: Vec<(ExtendedRational, BigRational)> = self
            .atoms
            .par_iter()
            .flat_map_iter(|(x, w)| branches.iter().map(move |(p, f)| (f(x), w * p)))
            .collect();
        Self::from_weighted(images).expect("kernel steps preserve total mass")
    }
}

impl fmt::Display for FiniteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}: {w}")?;
        }
        write!(f, "}}")
    }
}

/// Exact law of `W_n` started at `w0`.
pub fn exact_distribution_w(w0: &ExtendedRational, n: usize) -> Result<FiniteDistribution> {
    w0.check_unit_interval("W start")?;
    if n > MAX_W_STEPS {
        return Err(Error::Resource(format!(
            "exact W enumeration limited to {MAX_W_STEPS} steps, got {n}"
        )));
    }
    let branches: Vec<_> = IntervalMapIndex::all()
        .map(|i| {
            let p = BigRational::new(i.weight_ninths().into(), 9.into());
            (p, move |w: &ExtendedRational| interval_map(i, w).expect("[0,1] is invariant"))
        })
        .collect();
    let mut dist = FiniteDistribution::dirac(w0.clone());
    for _ in 0..n {
        dist = dist.step(&branches);
    }
    Ok(dist)
}

/// Exact law of `X_n` started at `x0`.
pub fn exact_distribution_x(x0: &ExtendedRational, n: usize) -> Result<FiniteDistribution> {
    if n > MAX_X_STEPS {
        return Err(Error::Resource(format!(
            "exact X enumeration limited to {MAX_X_STEPS} steps, got {n}"
        )));
    }
    let ninth = BigRational::new(BigInt::one(), 9.into());
    let branches: Vec<_> = GeneratorIndex::all()
        .map(|i| {
            let m = ProjectiveMatrix::generator(i);
            (ninth.clone(), move |x: &ExtendedRational| m.mobius_real(x))
        })
        .collect();
    let mut dist = FiniteDistribution::dirac(x0.clone());
    for _ in 0..n {
        dist = dist.step(&branches);
    }
    Ok(dist)
}

/// Sorted samples, exact when every input was exact.
#[derive(Debug, Clone, PartialEq)]
pub enum EmpiricalDistribution {
    Exact(Vec<ExtendedRational>),
    Float(Vec<f64>),
}

impl EmpiricalDistribution {
    pub fn from_exact(mut samples: Vec<ExtendedRational>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        samples.par_sort();
        Ok(Self::Exact(samples))
    }

    pub fn from_f64(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if let Some(bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(Error::domain("sample", bad));
        }
        samples.par_sort_by(f64::total_cmp);
        Ok(Self::Float(samples))
    }

    /// Exact if every value is exact, float otherwise.
    pub fn from_values(values: &[BoundaryValue]) -> Result<Self> {
        match values.iter().map(|v| v.as_exact().cloned()).collect::<Option<Vec<_>>>() {
            Some(exact) => Self::from_exact(exact),
            None => Self::from_f64(values.iter().map(BoundaryValue::to_f64).collect()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            Self::Exact(v) => v.iter().map(ExtendedRational::to_f64).collect(),
            Self::Float(v) => v.clone(),
        }
    }

    /// Empirical `Pr(sample ≤ x)`.
    pub fn ecdf(&self, x: f64) -> f64 {
        let below = match self {
            Self::Exact(v) => v.partition_point(|s| s.to_f64() <= x),
            Self::Float(v) => v.partition_point(|s| *s <= x),
        };
        below as f64 / self.len() as f64
    }

    /// Maximal runs of equal values as `(first index, one past last)`.
    fn runs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            let boundary = i == n
                || match self {
                    Self::Exact(v) => v[i] != v[start],
                    Self::Float(v) => v[i] != v[start],
                };
            if boundary {
                out.push((start, i));
                start = i;
            }
        }
        out
    }
}

/// Continuous reference laws for [`ks_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reference {
    /// `?` on `[0, 1]`.
    QMark,
    /// The law on `[0, ∞]` with survival function `χ_{1/2}`.
    ChiHalfSurvival,
    /// The stationary law `λ` of `X` on `ℝ ∪ {∞}`.
    Lambda,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Reference::QMark => "qmark",
            Reference::ChiHalfSurvival => "chi-half-survival",
            Reference::Lambda => "lambda",
        }
    }

    /// Exact `F(x) = Pr(value ≤ x)`, rounded once to `f64`.
    pub fn cdf(self, x: &ExtendedRational) -> Result<f64> {
        Ok(match self {
            Reference::QMark => qmark(x)?.to_f64(),
            Reference::ChiHalfSurvival => {
                if x.is_negative() {
                    return Err(Error::domain("chi-half-survival sample", x));
                }
                chi_half_closed(x)?.complement().to_f64()
            }
            Reference::Lambda => lambda_survival(x)?.complement().to_f64(),
        })
    }

    /// `F` at the exact value of a float sample.
    pub fn cdf_f64(self, x: f64) -> Result<f64> {
        let r = ExtendedRational::from_f64(x).ok_or_else(|| Error::domain("sample", x))?;
        let one = ExtendedRational::one();
        // `?`-based closed forms in float, valid for quotients of any size.
        let chi = |y: &ExtendedRational| -> Result<f64> {
            if y.is_infinite() {
                Ok(0.0)
            } else if y <= &one {
                Ok(1.0 - qmark_rational_f64(y)? / 2.0)
            } else {
                Ok(qmark_rational_f64(&y.recip())? / 2.0)
            }
        };
        match self {
            Reference::QMark => qmark_rational_f64(&r),
            Reference::ChiHalfSurvival => {
                if r.is_negative() {
                    return Err(Error::domain("chi-half-survival sample", x));
                }
                Ok(1.0 - chi(&r)?)
            }
            Reference::Lambda => {
                if r.is_infinite() {
                    Ok(1.0)
                } else if r.is_negative() {
                    Ok(chi(&r.neg())? / 2.0)
                } else {
                    Ok(1.0 - chi(&r)? / 2.0)
                }
            }
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qmark" | "?" => Ok(Reference::QMark),
            "chi-half-survival" | "chi" => Ok(Reference::ChiHalfSurvival),
            "lambda" => Ok(Reference::Lambda),
            _ => Err(Error::Parse(s.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub count: usize,
    pub reference: Reference,
}

/// `sup_x |F_N(x) − F(x)|`, attained at a sample point from one side or the other.
pub fn ks_distance(emp: &EmpiricalDistribution, reference: Reference) -> Result<KsResult> {
    let n = emp.len();
    if n == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let runs = emp.runs();
    let cdf: Vec<f64> = runs
        .par_iter()
        .map(|&(start, _)| match emp {
            EmpiricalDistribution::Exact(v) => reference.cdf(&v[start]),
            EmpiricalDistribution::Float(v) => reference.cdf_f64(v[start]),
        })
        .collect::<Result<_>>()?;
    let statistic = runs
        .iter()
        .zip(&cdf)
        .map(|(&(start, end), &f)| {
            let below = start as f64 / n as f64;
            let upto = end as f64 / n as f64;
            (f - below).abs().max((upto - f).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        count: n,
        reference,
    })
}

const FOURIER_CHUNK: usize = 4096;

fn phase_sum(phases: &[f64]) -> Complex64 {
    // Fixed chunking keeps the float sum independent of the thread count.
    let partial: Vec<Complex64> = phases
        .par_chunks(FOURIER_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t))
                .sum()
        })
        .collect();
    partial.into_iter().sum()
}

/// `(1/N) Σ_j exp(2πi n x_j)`.
pub fn fourier_coefficient(n: i64, samples: &EmpiricalDistribution) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let phases: Vec<f64> = match samples {
        EmpiricalDistribution::Exact(v) => v
            .par_iter()
            .map(|x| match x.to_rational() {
                // n·x mod 1, exactly, before rounding
                Some(r) => {
                    let t = r * BigRational::from_integer(n.into());
                    ExtendedRational::from(&t - t.floor()).to_f64()
                }
                None => 0.0,
            })
            .collect(),
        EmpiricalDistribution::Float(v) => v.iter().map(|x| (n as f64 * x).rem_euclid(1.0)).collect(),
    };
    phase_sum(&phases) / samples.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson independence test on a contingency table. Empty rows and columns
/// are dropped; a table left with one row or column gives `p = 1`.
pub fn chi_square_independence(table: &[Vec<u64>]) -> ChiSquareTest {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    let width = rows.first().map_or(0, |r| r.len());
    let cols: Vec<usize> = (0..width)
        .filter(|&j| rows.iter().map(|r| r[j]).sum::<u64>() > 0)
        .collect();
    if rows.len() < 2 || cols.len() < 2 {
        return ChiSquareTest {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        };
    }
    let total: f64 = rows.iter().flat_map(|r| cols.iter().map(|&j| r[j] as f64)).sum();
    let row_sums: Vec<f64> = rows.iter().map(|r| cols.iter().map(|&j| r[j] as f64).sum()).collect();
    let col_sums: Vec<f64> = cols
        .iter()
        .map(|&j| rows.iter().map(|r| r[j] as f64).sum())
        .collect();
    let mut statistic = 0.0;
    for (r, rs) in rows.iter().zip(&row_sums) {
        for (&j, cs) in cols.iter().zip(&col_sums) {
            let expected = rs * cs / total;
            statistic += (r[j] as f64 - expected).powi(2) / expected;
        }
    }
    let dof = (rows.len() - 1) * (cols.len() - 1);
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

/// Empirical pmf of `K = ⌊Y⌋ + 1` against `2^{−n}`, and tests of independence
/// between `K` and the `?`-quartile of the fractional part of `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricCheck {
    pub count: usize,
    /// Empirical `Pr(K = n)` for `n = 1, …, 8`.
    pub pmf: Vec<f64>,
    /// `|pmf[n−1] − 2^{−n}|`.
    pub deviations: Vec<f64>,
    /// `K ∈ {1, 2, 3, ≥4}` against the four quartile bins.
    pub independence_4x4: ChiSquareTest,
    /// `K ∈ {1, ≥2}` against the four quartile bins.
    pub independence_2x4: ChiSquareTest,
}

impl GeometricCheck {
    pub fn max_deviation(&self, n_max: usize) -> f64 {
        self.deviations.iter().take(n_max).fold(0.0, |m, &d| m.max(d))
    }
}

pub const PMF_LEN: usize = 8;

/// Quartile bin of `f ∈ [0, 1)` under `?`; the quartiles of `?` are `1/3, 1/2, 2/3`.
fn quartile_bin_exact(f: &ExtendedRational) -> usize {
    let cuts = [(1, 3), (1, 2), (2, 3)];
    cuts.iter()
        .take_while(|&&(p, q)| f >= &ExtendedRational::ratio(p, q).unwrap())
        .count()
}

fn quartile_bin_f64(f: f64) -> usize {
    [1.0 / 3.0, 0.5, 2.0 / 3.0].iter().take_while(|&&c| f >= c).count()
}

pub fn geometric_pmf_check(samples: &EmpiricalDistribution) -> Result<GeometricCheck> {
    let count = samples.len();
    if count < MIN_PMF_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_PMF_SAMPLES,
            got: count,
        });
    }
    let pairs: Vec<(u64, usize)> = match samples {
        EmpiricalDistribution::Exact(v) => v
            .iter()
            .map(|y| {
                let fl = y.floor().ok_or_else(|| Error::domain("Y sample", y))?;
                if fl < BigInt::zero() {
                    return Err(Error::domain("Y sample", y));
                }
                let frac = y.to_rational().expect("finite") - BigRational::from_integer(fl.clone());
                let k = (fl + 1u32).to_u64().unwrap_or(u64::MAX);
                Ok((k, quartile_bin_exact(&ExtendedRational::from(frac))))
            })
            .collect::<Result<_>>()?,
        EmpiricalDistribution::Float(v) => v
            .iter()
            .map(|&y| {
                if !(y >= 0.0 && y.is_finite()) {
                    return Err(Error::domain("Y sample", y));
                }
                let fl = y.floor();
                Ok((fl as u64 + 1, quartile_bin_f64(y - fl)))
            })
            .collect::<Result<_>>()?,
    };
    let mut hist = [0u64; PMF_LEN];
    let mut t4 = vec![vec![0u64; 4]; 4];
    let mut t2 = vec![vec![0u64; 4]; 2];
    for &(k, bin) in &pairs {
        if (k as usize) <= PMF_LEN {
            hist[k as usize - 1] += 1;
        }
        t4[(k.min(4) - 1) as usize][bin] += 1;
        t2[(k.min(2) - 1) as usize][bin] += 1;
    }
    let pmf: Vec<f64> = hist.iter().map(|&h| h as f64 / count as f64).collect();
    let deviations = pmf
        .iter()
        .enumerate()
        .map(|(i, p)| (p - 0.5f64.powi(i as i32 + 1)).abs())
        .collect();
    Ok(GeometricCheck {
        count,
        pmf,
        deviations,
        independence_4x4: chi_square_independence(&t4),
        independence_2x4: chi_square_independence(&t2),
    })
}
