//! Variability of compressed evolutions across enumerated inputs and its
//! growth rate over runtime, the programmability coefficient.
//!
//! For runtimes `t'_1 < … < t'_m` and inputs `i_0 … i_{n-1}`, the profile holds
//! `L[k][j]`, the compressed length of the system run for `t'_k` rows from
//! `i_j`. Each runtime yields one variability point
//!
//! ```text
//! f_k = Σ_{j=0}^{n-2} |L[k][j+1] − L[k][j]|  /  (T · (n − 1))
//! ```
//!
//! where `T` is the horizon `t'_m` ([`Normalization::Horizon`], the default) or
//! the point's own runtime `t'_k` ([`Normalization::Runtime`]). The coefficient
//! is the ordinary-least-squares slope of `f` against `t'`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compress::Compressor;
use crate::error::{Error, Result};
use crate::systems::{enumerate_inputs, EnumerationScheme, RuleSystem, SystemId, SystemKind};

/// Which runtime divides the summed differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// The largest runtime of the sweep, shared by every point.
    #[default]
    Horizon,
    /// Each point's own runtime.
    Runtime,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Horizon => "horizon",
            Normalization::Runtime => "runtime",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horizon" => Ok(Normalization::Horizon),
            "runtime" => Ok(Normalization::Runtime),
            other => Err(Error::invalid(format!("unknown normalization `{other}`"))),
        }
    }
}

/// `[t/4, t/2, 3t/4, t]` with integer division, dropping zeros and repeats.
pub fn default_runtimes(t: usize) -> Result<Vec<usize>> {
    let mut grid: Vec<usize> = [t / 4, t / 2, 3 * t / 4, t]
        .into_iter()
        .filter(|&x| x >= 1)
        .collect();
    grid.dedup();
    if grid.len() < 2 {
        return Err(Error::invalid(format!(
            "t = {t} is too small for a runtime grid with two distinct points"
        )));
    }
    Ok(grid)
}

fn check_runtimes(runtimes: &[usize]) -> Result<()> {
    if runtimes.is_empty() {
        return Err(Error::invalid("runtime list is empty"));
    }
    if runtimes[0] == 0 {
        return Err(Error::invalid("runtimes must be at least 1"));
    }
    if runtimes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("runtimes must be strictly increasing"));
    }
    Ok(())
}

/// Experimental parameters of one measurement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureParams {
    pub n: usize,
    pub runtimes: Vec<usize>,
    pub scheme: EnumerationScheme,
    pub normalization: Normalization,
}

impl MeasureParams {
    pub fn new(n: usize, runtimes: Vec<usize>) -> Result<Self> {
        let p = MeasureParams {
            n,
            runtimes,
            scheme: EnumerationScheme::default(),
            normalization: Normalization::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scheme(mut self, scheme: EnumerationScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("need at least 2 inputs, got {}", self.n)));
        }
        check_runtimes(&self.runtimes)
    }

    pub fn horizon(&self) -> usize {
        *self.runtimes.last().expect("validated runtimes are non-empty")
    }
}

/// Everything that must agree for two coefficients to be compared.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conditions {
    pub params: MeasureParams,
    pub compressor: String,
}

/// `lengths[k][j]`: compressed length of input `j` run for `runtimes[k]` rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionProfile {
    pub system: SystemId,
    pub compressor: String,
    pub scheme: EnumerationScheme,
    pub runtimes: Vec<usize>,
    pub n: usize,
    pub serialized_lens: Vec<Vec<usize>>,
    pub lengths: Vec<Vec<usize>>,
}

impl CompressionProfile {
    /// Assembles a profile from an externally produced length matrix.
    pub fn from_lengths(
        system: SystemId,
        compressor: impl Into<String>,
        runtimes: Vec<usize>,
        lengths: Vec<Vec<usize>>,
    ) -> Result<Self> {
        check_runtimes(&runtimes)?;
        let n = lengths.first().map_or(0, Vec::len);
        let serialized_lens = runtimes
            .iter()
            .map(|&t| vec![t * (system.width() + 1); n])
            .collect();
        let p = CompressionProfile {
            system,
            compressor: compressor.into(),
            scheme: EnumerationScheme::default(),
            runtimes,
            n,
            serialized_lens,
            lengths,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_runtimes(&self.runtimes)?;
        if self.n < 2 {
            return Err(Error::invalid(format!("need at least 2 inputs, got {}", self.n)));
        }
        let complete =
            |m: &Vec<Vec<usize>>| m.len() == self.runtimes.len() && m.iter().all(|row| row.len() == self.n);
        if !complete(&self.lengths) || !complete(&self.serialized_lens) {
            return Err(Error::invalid("profile matrix is incomplete"));
        }
        if self.lengths.iter().flatten().any(|&l| l == 0) {
            return Err(Error::invalid("compressed lengths must be positive"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        *self.runtimes.last().expect("validated runtimes are non-empty")
    }
}

/// Runs every enumerated input up to each runtime and records compressed lengths.
pub fn build_profile<C: Compressor + ?Sized>(
    system: &RuleSystem,
    params: &MeasureParams,
    compressor: &C,
) -> Result<CompressionProfile> {
    params.validate()?;
    let inputs = enumerate_inputs(system.width(), params.n, params.scheme)?;
    let horizon = params.horizon();
    let row_bytes = system.width() + 1;

    // columns[j][k] = (serialized, compressed)
    let columns: Vec<Vec<(usize, usize)>> = inputs
        .par_iter()
        .map(|init| match system.kind() {
            // Runs are deterministic, so shorter runs are prefixes of the longest.
            SystemKind::ElementaryCa(_) => {
                let text = system.evolve(init, horizon)?.to_text();
                params
                    .runtimes
                    .iter()
                    .map(|&t| {
                        let bytes = &text[..t * row_bytes];
                        Ok((bytes.len(), compressor.compressed_len(bytes)?))
                    })
                    .collect()
            }
            SystemKind::BlackBox(_) => params
                .runtimes
                .iter()
                .map(|&t| {
                    let text = system.evolve(init, t)?.to_text();
                    Ok((text.len(), compressor.compressed_len(&text)?))
                })
                .collect(),
        })
        .collect::<Result<_>>()?;

    let m = params.runtimes.len();
    let pick = |sel: fn(&(usize, usize)) -> usize| -> Vec<Vec<usize>> {
        (0..m)
            .map(|k| columns.iter().map(|col| sel(&col[k])).collect())
            .collect()
    };
    let profile = CompressionProfile {
        system: system.id(),
        compressor: compressor.tag(),
        scheme: params.scheme,
        runtimes: params.runtimes.clone(),
        n: params.n,
        serialized_lens: pick(|c| c.0),
        lengths: pick(|c| c.1),
    };
    profile.validate()?;
    Ok(profile)
}

/// Sum of absolute differences between consecutive inputs at runtime index `k`.
pub fn consecutive_variation(profile: &CompressionProfile, k: usize) -> Result<u64> {
    let row = profile
        .lengths
        .get(k)
        .ok_or_else(|| Error::invalid(format!("runtime index {k} out of range")))?;
    if row.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 inputs, got {}",
            row.len()
        )));
    }
    Ok(row
        .windows(2)
        .map(|w| (w[1] as i64 - w[0] as i64).unsigned_abs())
        .sum())
}

/// `f` at runtime index `k` under the default horizon normalisation.
pub fn variability(profile: &CompressionProfile, k: usize) -> Result<f64> {
    variability_with(profile, k, Normalization::Horizon)
}

pub fn variability_with(profile: &CompressionProfile, k: usize, normalization: Normalization) -> Result<f64> {
    let row = profile
        .lengths
        .get(k)
        .ok_or_else(|| Error::invalid(format!("runtime index {k} out of range")))?;
    let t = match normalization {
        Normalization::Horizon => profile.horizon(),
        Normalization::Runtime => profile.runtimes[k],
    };
    variability_of(row, t)
}

/// `Σ |l[j+1] − l[j]| / (t · (n − 1))` for one row of compressed lengths.
pub fn variability_of(lengths: &[usize], t: usize) -> Result<f64> {
    if lengths.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 inputs, got {}",
            lengths.len()
        )));
    }
    if t == 0 {
        return Err(Error::invalid("runtime must be at least 1"));
    }
    let sum: u64 = lengths
        .windows(2)
        .map(|w| (w[1] as i64 - w[0] as i64).unsigned_abs())
        .sum();
    Ok(sum as f64 / (t as f64 * (lengths.len() - 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope · x + intercept`.
///
/// `r_squared` is 1 when the points have no spread in `y` (the line is exact).
pub fn fit_slope(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::invalid("regression needs at least two points"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("regression points must be finite"));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariabilityCurve {
    /// `(t'_k, f_k)`
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl VariabilityCurve {
    pub fn max_f(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

pub fn curve_from_profile(
    profile: &CompressionProfile,
    normalization: Normalization,
) -> Result<VariabilityCurve> {
    let points = (0..profile.runtimes.len())
        .map(|k| Ok((profile.runtimes[k], variability_with(profile, k, normalization)?)))
        .collect::<Result<Vec<_>>>()?;
    let xy: Vec<(f64, f64)> = points.iter().map(|&(t, f)| (t as f64, f)).collect();
    let fit = fit_slope(&xy)?;
    Ok(VariabilityCurve {
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub system: SystemId,
    /// Slope of the variability curve.
    pub value: f64,
    /// Largest runtime used.
    pub t: usize,
    pub n: usize,
    /// `value / max f` over the same runtime sweep; 0 when every `f` is 0.
    pub normalized_value: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub conditions: Conditions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub profile: CompressionProfile,
    pub curve: VariabilityCurve,
    pub coefficient: Coefficient,
}

pub fn coefficient_from_profile(profile: &CompressionProfile, params: &MeasureParams) -> Result<Measurement> {
    let curve = curve_from_profile(profile, params.normalization)?;
    let max_f = curve.max_f();
    let coefficient = Coefficient {
        system: profile.system.clone(),
        value: curve.slope,
        t: profile.horizon(),
        n: profile.n,
        normalized_value: if max_f > 0.0 { curve.slope / max_f } else { 0.0 },
        intercept: curve.intercept,
        r_squared: curve.r_squared,
        conditions: Conditions {
            params: params.clone(),
            compressor: profile.compressor.clone(),
        },
    };
    Ok(Measurement {
        profile: profile.clone(),
        curve,
        coefficient,
    })
}

/// Full pipeline: profile, variability per runtime, regression.
pub fn measure<C: Compressor + ?Sized>(
    system: &RuleSystem,
    params: &MeasureParams,
    compressor: &C,
) -> Result<Measurement> {
    if params.runtimes.len() < 2 {
        return Err(Error::invalid("a coefficient needs at least two runtimes"));
    }
    let profile = build_profile(system, params, compressor)?;
    coefficient_from_profile(&profile, params)
}

pub fn coefficient<C: Compressor + ?Sized>(
    system: &RuleSystem,
    params: &MeasureParams,
    compressor: &C,
) -> Result<Coefficient> {
    measure(system, params, compressor).map(|m| m.coefficient)
}
