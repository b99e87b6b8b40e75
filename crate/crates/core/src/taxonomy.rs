//! Threshold classification of coefficients and cohort rankings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compress::{approx_k, Compressor};
use crate::error::{Error, Result};
use crate::measure::Coefficient;
use crate::systems::Evolution;

/// Width of the boundary band as a fraction of the cohort maximum.
pub const DEFAULT_BAND_FRACTION: f64 = 0.01;

/// Ordered from least to most computer-like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    NonComputer,
    BoundaryComputer,
    Computer,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::NonComputer => "non-computer",
            Label::BoundaryComputer => "boundary-computer",
            Label::Computer => "computer",
        })
    }
}

/// Label of `value` against threshold `delta`; values within `band` of the
/// threshold are reported as boundary cases.
pub fn label_for(value: f64, delta: f64, band: f64) -> Result<Label> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::invalid(format!(
            "threshold δ must be finite and ≥ 0, got {delta}"
        )));
    }
    if !band.is_finite() || band < 0.0 {
        return Err(Error::invalid(format!(
            "boundary band must be finite and ≥ 0, got {band}"
        )));
    }
    if !value.is_finite() {
        return Err(Error::invalid("coefficient value is not finite"));
    }
    Ok(if (value - delta).abs() < band {
        Label::BoundaryComputer
    } else if value > delta {
        Label::Computer
    } else {
        Label::NonComputer
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub coefficient: Coefficient,
    pub delta: f64,
    pub band: f64,
    pub label: Label,
    /// The strict `value > δ` decision, independent of the band.
    pub exceeds_threshold: bool,
    pub rank: Option<usize>,
}

pub fn classify(c: &Coefficient, delta: f64) -> Result<Classification> {
    classify_with_band(c, delta, 0.0)
}

pub fn classify_with_band(c: &Coefficient, delta: f64, band: f64) -> Result<Classification> {
    let label = label_for(c.value, delta, band)?;
    Ok(Classification {
        coefficient: c.clone(),
        delta,
        band,
        label,
        exceeds_threshold: c.value > delta,
        rank: None,
    })
}

/// How δ is chosen; there is deliberately no default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaPolicy {
    Fixed(f64),
    CohortMedian,
}

impl FromStr for DeltaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "cohort-median" {
            return Ok(DeltaPolicy::CohortMedian);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("δ must be a number or `cohort-median`, got `{s}`")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!("δ must be finite and ≥ 0, got {v}")));
        }
        Ok(DeltaPolicy::Fixed(v))
    }
}

impl fmt::Display for DeltaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaPolicy::Fixed(v) => write!(f, "{v}"),
            DeltaPolicy::CohortMedian => f.write_str("cohort-median"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub coefficient: Coefficient,
    /// `max(value, 0) / cohort maximum`, in `[0, 1]`.
    pub normalized_value: f64,
}

fn cohort_order(a: &Coefficient, b: &Coefficient) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then_with(|| a.system.sort_key().cmp(&b.system.sort_key()))
}

/// Largest positive value in the cohort, or 0.
pub fn cohort_max(coefficients: &[Coefficient]) -> f64 {
    coefficients.iter().map(|c| c.value).fold(0.0, f64::max)
}

pub fn cohort_median(coefficients: &[Coefficient]) -> Result<f64> {
    if coefficients.is_empty() {
        return Err(Error::invalid("median of an empty cohort"));
    }
    let mut v: Vec<f64> = coefficients.iter().map(|c| c.value).collect();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Descending by value, ties by rule number ascending; ranks start at 1.
pub fn rank_cohort(coefficients: &[Coefficient]) -> Result<Vec<RankedEntry>> {
    let first = coefficients
        .first()
        .ok_or_else(|| Error::invalid("cannot rank an empty cohort"))?;
    if let Some(odd) = coefficients
        .iter()
        .find(|c| c.conditions != first.conditions || c.system.width() != first.system.width())
    {
        return Err(Error::IncomparableCohort(format!(
            "{} was measured under different parameters than {}",
            odd.system, first.system
        )));
    }
    let max = cohort_max(coefficients);
    let mut sorted: Vec<&Coefficient> = coefficients.iter().collect();
    sorted.sort_by(|a, b| cohort_order(a, b));
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, c)| RankedEntry {
            rank: i + 1,
            coefficient: c.clone(),
            normalized_value: if max > 0.0 { c.value.max(0.0) / max } else { 0.0 },
        })
        .collect())
}

/// Classifies a ranked cohort, resolving δ from `policy`. The band is
/// [`DEFAULT_BAND_FRACTION`] of the cohort maximum.
pub fn classify_cohort(ranked: &[RankedEntry], policy: DeltaPolicy) -> Result<(f64, Vec<Classification>)> {
    let coefficients: Vec<Coefficient> = ranked.iter().map(|r| r.coefficient.clone()).collect();
    let delta = match policy {
        DeltaPolicy::Fixed(d) => d,
        DeltaPolicy::CohortMedian => cohort_median(&coefficients)?.max(0.0),
    };
    let band = DEFAULT_BAND_FRACTION * cohort_max(&coefficients);
    let out = ranked
        .iter()
        .map(|r| {
            let mut c = classify_with_band(&r.coefficient, delta, band)?;
            c.rank = Some(r.rank);
            Ok(c)
        })
        .collect::<Result<_>>()?;
    Ok((delta, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Simplicity {
    Simple,
    Complex,
}

/// `Simple` iff the evolution compresses below `ratio_threshold` of its
/// serialised length.
pub fn simplicity_label<C: Compressor + ?Sized>(
    ev: &Evolution,
    compressor: &C,
    ratio_threshold: f64,
) -> Result<Simplicity> {
    if !(ratio_threshold > 0.0 && ratio_threshold < 1.0) {
        return Err(Error::invalid(format!(
            "ratio threshold must lie in (0, 1), got {ratio_threshold}"
        )));
    }
    let len = approx_k(compressor, ev)?;
    Ok(if len.ratio() < ratio_threshold {
        Simplicity::Simple
    } else {
        Simplicity::Complex
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::CompressorSpec;
    use crate::measure::{Conditions, MeasureParams};
    use crate::systems::{Boundary, Configuration, InitialConfiguration, RuleSystem, SystemId};
    use proptest::prelude::*;

    fn coef(rule: u8, value: f64) -> Coefficient {
        Coefficient {
            system: SystemId::Eca {
                rule,
                width: 41,
                boundary: Boundary::Cyclic,
            },
            value,
            t: 100,
            n: 8,
            normalized_value: 0.0,
            intercept: 0.0,
            r_squared: 1.0,
            conditions: Conditions {
                params: MeasureParams::new(8, vec![25, 50, 75, 100]).unwrap(),
                compressor: "mock".into(),
            },
        }
    }

    #[test]
    fn zero_coefficient_is_not_a_computer() {
        let c = classify(&coef(0, 0.0), 0.01).unwrap();
        assert_eq!(c.label, Label::NonComputer);
        assert!(!c.exceeds_threshold);
    }

    #[test]
    fn value_equal_to_delta() {
        let c = classify(&coef(4, 0.5), 0.5).unwrap();
        assert_eq!(c.label, Label::NonComputer);
        let c = classify_with_band(&coef(4, 0.5), 0.5, 0.01).unwrap();
        assert_eq!(c.label, Label::BoundaryComputer);
        assert!(!c.exceeds_threshold);
    }

    #[test]
    fn negative_delta_is_rejected() {
        assert!(classify(&coef(0, 1.0), -0.1).is_err());
        assert!("-1".parse::<DeltaPolicy>().is_err());
        assert!("abc".parse::<DeltaPolicy>().is_err());
        assert_eq!(
            "cohort-median".parse::<DeltaPolicy>().unwrap(),
            DeltaPolicy::CohortMedian
        );
        assert_eq!("0.25".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::Fixed(0.25));
    }

    #[test]
    fn ranking_orders_descending() {
        let ranked = rank_cohort(&[coef(1, 0.0), coef(2, 5.0), coef(3, 2.0)]).unwrap();
        let values: Vec<f64> = ranked.iter().map(|r| r.coefficient.value).collect();
        assert_eq!(values, [5.0, 2.0, 0.0]);
        assert_eq!(ranked.iter().map(|r| r.rank).collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(ranked[0].normalized_value, 1.0);
        assert_eq!(ranked[1].normalized_value, 0.4);
    }

    #[test]
    fn ties_break_by_rule_number() {
        let ranked = rank_cohort(&[coef(90, 1.0), coef(30, 1.0), coef(45, 1.0)]).unwrap();
        let rules: Vec<u8> = ranked
            .iter()
            .map(|r| r.coefficient.system.rule().unwrap())
            .collect();
        assert_eq!(rules, [30, 45, 90]);
    }

    #[test]
    fn mixed_parameters_are_incomparable() {
        let mut other = coef(2, 1.0);
        other.conditions.params.n = 16;
        assert!(matches!(
            rank_cohort(&[coef(1, 0.5), other]),
            Err(Error::IncomparableCohort(_))
        ));
        let mut other = coef(2, 1.0);
        other.conditions.compressor = "else".into();
        assert!(rank_cohort(&[coef(1, 0.5), other]).is_err());
        assert!(rank_cohort(&[]).is_err());
    }

    #[test]
    fn negative_values_normalize_to_zero() {
        let ranked = rank_cohort(&[coef(1, -1.0), coef(2, 4.0)]).unwrap();
        assert_eq!(ranked[1].normalized_value, 0.0);
        let ranked = rank_cohort(&[coef(1, -1.0), coef(2, -4.0)]).unwrap();
        assert!(ranked.iter().all(|r| r.normalized_value == 0.0));
    }

    #[test]
    fn cohort_median_policy() {
        let ranked = rank_cohort(&[coef(1, 1.0), coef(2, 3.0), coef(3, 10.0), coef(4, 0.0)]).unwrap();
        let (delta, labels) = classify_cohort(&ranked, DeltaPolicy::CohortMedian).unwrap();
        assert_eq!(delta, 2.0);
        let by_rule: Vec<(u8, Label)> = labels
            .iter()
            .map(|c| (c.coefficient.system.rule().unwrap(), c.label))
            .collect();
        assert_eq!(
            by_rule,
            [
                (3, Label::Computer),
                (2, Label::Computer),
                (1, Label::NonComputer),
                (4, Label::NonComputer)
            ]
        );
        assert!(labels.iter().all(|c| c.band == 0.1 && c.rank.is_some()));
    }

    #[test]
    fn simplicity_threshold_must_be_open_unit_interval() {
        let sys = RuleSystem::elementary(0, 11, Boundary::Cyclic).unwrap();
        let ev = sys
            .evolve(&InitialConfiguration::new(Configuration::single_seed(11), 0), 5)
            .unwrap();
        let spec = CompressorSpec::default();
        for bad in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(simplicity_label(&ev, &spec, bad).is_err());
        }
    }

    #[test]
    fn blank_evolution_is_simple() {
        let sys = RuleSystem::elementary(0, 201, Boundary::Cyclic).unwrap();
        let ev = sys
            .evolve(
                &InitialConfiguration::new(Configuration::single_seed(201), 0),
                100,
            )
            .unwrap();
        assert_eq!(
            simplicity_label(&ev, &CompressorSpec::default(), 0.2).unwrap(),
            Simplicity::Simple
        );
    }

    proptest! {
        #[test]
        fn label_is_monotone_in_value(a in -10.0f64..10.0, b in -10.0f64..10.0, d in 0.0f64..10.0, band in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(label_for(lo, d, band).unwrap() <= label_for(hi, d, band).unwrap());
        }

        #[test]
        fn raising_delta_never_promotes(v in -10.0f64..10.0, d1 in 0.0f64..10.0, d2 in 0.0f64..10.0, band in 0.0f64..1.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(label_for(v, hi, band).unwrap() <= label_for(v, lo, band).unwrap());
        }

        #[test]
        fn ranking_is_a_deterministic_total_order(values in prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, -1.0]), 1..40)) {
            let cohort: Vec<Coefficient> = values.iter().enumerate().map(|(i, &v)| coef(i as u8, v)).collect();
            let a = rank_cohort(&cohort).unwrap();
            let mut reversed = cohort.clone();
            reversed.reverse();
            let b = rank_cohort(&reversed).unwrap();
            prop_assert_eq!(&a, &b);
            for w in a.windows(2) {
                let (x, y) = (&w[0].coefficient, &w[1].coefficient);
                prop_assert!(x.value > y.value || (x.value == y.value && x.system.rule() < y.system.rule()));
            }
        }
    }
}
