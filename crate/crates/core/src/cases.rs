//! Published case studies with the effect-measure values as printed.
//!
//! Each expectation keeps the printed string and how it was rounded. Some
//! values were printed truncated rather than rounded to nearest, so the
//! rounding mode is stored per value. Strata are stored as
//! (control, exposed) with the lower-risk reference group as control.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{measure, MeasureKind, RiskPair};

pub const CASE_NAMES: [&str; 5] = ["table1", "hcv-a", "hcv-b", "melanoma", "covid"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// The outcome the study reports risks for.
    Studied,
    /// Its complement: risks `1 - c` and `1 - e` in the same groups.
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stratum {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rounding {
    Nearest,
    TowardZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    Measure(MeasureKind),
    /// Number needed to treat, `1 / RD`.
    NumberNeededToTreat,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Measure(kind) => kind.fmt(f),
            Quantity::NumberNeededToTreat => f.write_str("NNT"),
        }
    }
}

/// A value as printed in the source, e.g. `"3.176"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub outcome: Outcome,
    pub stratum: Stratum,
    pub quantity: Quantity,
    pub printed: String,
    pub rounding: Rounding,
}

impl Expected {
    pub fn decimals(&self) -> usize {
        self.printed
            .split_once('.')
            .map_or(0, |(_, frac)| frac.len())
    }

    /// `value` rendered at the printed precision under the printed rounding.
    pub fn render(&self, value: f64) -> String {
        let decimals = self.decimals();
        match self.rounding {
            Rounding::Nearest => format!("{value:.decimals$}"),
            Rounding::TowardZero => {
                let wide = format!("{value:.*}", decimals + 9);
                let cut = wide.len() - 9;
                wide[..cut].trim_end_matches('.').to_string()
            }
        }
    }

    pub fn matches(&self, value: f64) -> bool {
        self.render(value) == self.printed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub name: String,
    pub description: String,
    pub stratum_p: RiskPair,
    /// Absent for single-comparison studies.
    pub stratum_q: Option<RiskPair>,
    pub expected: Vec<Expected>,
}

impl CaseStudy {
    pub fn pair(&self, outcome: Outcome, stratum: Stratum) -> Option<RiskPair> {
        let pair = match stratum {
            Stratum::P => Some(self.stratum_p),
            Stratum::Q => self.stratum_q,
        }?;
        Some(match outcome {
            Outcome::Studied => pair,
            Outcome::Opposite => pair.opposite_outcome(),
        })
    }

    pub fn compute(&self, e: &Expected) -> Result<f64> {
        let pair = self.pair(e.outcome, e.stratum).ok_or_else(|| {
            Error::Validation(format!("case {} has no stratum {:?}", self.name, e.stratum))
        })?;
        match e.quantity {
            Quantity::Measure(kind) => measure(&pair, kind),
            Quantity::NumberNeededToTreat => Ok(1.0 / measure(&pair, MeasureKind::RiskDifference)?),
        }
    }

    /// Recomputes every expectation.
    pub fn check(&self) -> Result<Vec<CheckedValue>> {
        self.expected
            .iter()
            .map(|e| {
                let computed = self.compute(e)?;
                Ok(CheckedValue {
                    expected: e.clone(),
                    computed,
                    rendered: e.render(computed),
                    matches: e.matches(computed),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedValue {
    pub expected: Expected,
    #[serde(with = "crate::ext")]
    pub computed: f64,
    pub rendered: String,
    pub matches: bool,
}

type Row<'a> = (Outcome, Stratum, Quantity, &'a str, Rounding);

fn build(
    name: &str,
    description: &str,
    p: (f64, f64),
    q: Option<(f64, f64)>,
    rows: &[Row<'_>],
) -> CaseStudy {
    let pair = |(c, e): (f64, f64)| RiskPair::strict(c, e).expect("fixture risks are strict");
    CaseStudy {
        name: name.to_string(),
        description: description.to_string(),
        stratum_p: pair(p),
        stratum_q: q.map(pair),
        expected: rows
            .iter()
            .map(
                |&(outcome, stratum, quantity, printed, rounding)| Expected {
                    outcome,
                    stratum,
                    quantity,
                    printed: printed.to_string(),
                    rounding,
                },
            )
            .collect(),
    }
}

pub fn case_study(name: &str) -> Result<CaseStudy> {
    use MeasureKind::*;
    use Outcome::*;
    use Rounding::*;
    use Stratum::*;
    let m = Quantity::Measure;
    let nnt = Quantity::NumberNeededToTreat;
    let study = match name {
        "table1" => build(
            name,
            "Hypothetical strata where RR and OR modify in opposite directions",
            (0.7, 0.9),
            Some((0.2, 0.3)),
            &[
                (Studied, P, m(RelativeRisk), "1.29", Nearest),
                (Studied, Q, m(RelativeRisk), "1.50", Nearest),
                (Studied, P, m(OddsRatio), "3.86", Nearest),
                (Studied, Q, m(OddsRatio), "1.71", Nearest),
                (Studied, P, m(RiskDifference), "0.2", Nearest),
                (Studied, Q, m(RiskDifference), "0.1", Nearest),
                (Studied, P, m(OtherRelativeRisk), "3.00", Nearest),
                (Studied, Q, m(OtherRelativeRisk), "1.14", Nearest),
                (Opposite, P, m(RelativeRisk), "0.333", Nearest),
                (Opposite, Q, m(RelativeRisk), "0.875", Nearest),
                (Opposite, P, m(OddsRatio), "0.259", Nearest),
                (Opposite, Q, m(OddsRatio), "0.583", Nearest),
                (Opposite, P, m(RiskDifference), "-0.2", Nearest),
                (Opposite, Q, m(RiskDifference), "-0.1", Nearest),
                (Opposite, P, m(OtherRelativeRisk), "0.778", Nearest),
                (Opposite, Q, m(OtherRelativeRisk), "0.667", Nearest),
            ],
        ),
        "hcv-a" => build(
            name,
            "Hepatitis C, outcome A: single exposed/control comparison",
            (0.05263, 0.15),
            None,
            &[
                (Studied, P, m(RelativeRisk), "2.850", Nearest),
                (Studied, P, m(OddsRatio), "3.176", TowardZero),
                (Studied, P, m(RiskDifference), "0.09737", Nearest),
                (Studied, P, m(OtherRelativeRisk), "1.115", Nearest),
                (Studied, P, m(HazardRatio), "3.006", Nearest),
                (Studied, P, m(OtherHazardRatio), "1.552", Nearest),
            ],
        ),
        "hcv-b" => build(
            name,
            "Hepatitis C, outcome B: single exposed/control comparison",
            (0.26316, 0.35),
            None,
            &[
                (Studied, P, m(RelativeRisk), "1.3300", Nearest),
                (Studied, P, m(OddsRatio), "1.5077", Nearest),
                (Studied, P, m(RiskDifference), "0.08684", Nearest),
                (Studied, P, m(OtherRelativeRisk), "1.1336", Nearest),
                (Studied, P, m(HazardRatio), "1.4106", Nearest),
                (Studied, P, m(OtherHazardRatio), "1.2716", Nearest),
            ],
        ),
        "melanoma" => build(
            name,
            "Melanoma, two age strata, per-year risks",
            (0.00384, 0.00830),
            Some((0.00045, 0.00140)),
            &[
                (Studied, P, m(RelativeRisk), "2.16", Nearest),
                (Studied, Q, m(RelativeRisk), "3.11", Nearest),
                (Studied, P, m(OddsRatio), "2.17", Nearest),
                (Studied, Q, m(OddsRatio), "3.11", Nearest),
                (Studied, P, m(HazardRatio), "2.17", Nearest),
                (Studied, Q, m(HazardRatio), "3.11", Nearest),
                (Studied, P, m(RiskDifference), "0.00446", Nearest),
                (Studied, Q, m(RiskDifference), "0.00095", Nearest),
                (Studied, P, m(OtherRelativeRisk), "1.0045", Nearest),
                (Studied, Q, m(OtherRelativeRisk), "1.00095", Nearest),
                (Studied, P, m(OtherHazardRatio), "1.161", Nearest),
                (Studied, Q, m(OtherHazardRatio), "1.172", TowardZero),
                (Studied, P, nnt, "224", Nearest),
                (Studied, Q, nnt, "1053", Nearest),
            ],
        ),
        "covid" => build(
            name,
            "COVID-19 mortality, two age strata",
            (0.009, 0.075),
            Some((0.106, 0.253)),
            &[
                (Studied, P, m(RelativeRisk), "8.33", Nearest),
                (Studied, Q, m(RelativeRisk), "2.39", Nearest),
                (Studied, P, m(OddsRatio), "8.93", Nearest),
                (Studied, Q, m(OddsRatio), "2.86", Nearest),
                (Studied, P, m(HazardRatio), "8.62", Nearest),
                (Studied, Q, m(HazardRatio), "2.60", Nearest),
                (Studied, P, m(RiskDifference), "0.066", Nearest),
                (Studied, Q, m(RiskDifference), "0.147", Nearest),
                (Studied, P, m(OtherRelativeRisk), "1.071", Nearest),
                (Studied, Q, m(OtherRelativeRisk), "1.197", Nearest),
                (Studied, P, m(OtherHazardRatio), "1.81", TowardZero),
                (Studied, Q, m(OtherHazardRatio), "1.63", Nearest),
                (Studied, P, nnt, "15.2", Nearest),
                (Studied, Q, nnt, "6.8", Nearest),
            ],
        ),
        other => return Err(Error::UnknownCase(other.to_string())),
    };
    Ok(study)
}
