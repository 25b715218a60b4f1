//! The six effect measures and the measures concordant with them.
//!
//! Every measure is a function of one [`RiskPair`]: the risk of the studied
//! outcome in the control group and in the exposed group.
//!
//! | kind | formula | null |
//! |------|---------|------|
//! | RR   | `e / c` | 1 |
//! | RR*  | `(1 - c) / (1 - e)` | 1 |
//! | HR   | `ln(1 - e) / ln(1 - c)` | 1 |
//! | HR*  | `ln c / ln e` | 1 |
//! | RD   | `e - c` | 0 |
//! | OR   | `e (1 - c) / (c (1 - e))` | 1 |
//!
//! HR and HR* are the cumulative hazard ratios reduced to the risks. With
//! `p(0) = 0` the total hazard of a group is `H = -ln(1 - p)`; the sign cancels
//! in the ratio, so HR is computed as `ln(1 - e) / ln(1 - c)` directly.
//!
//! Risks of exactly 0 or 1 are accepted and the measures take their one-sided
//! limits (`RR = +inf` when `c = 0 < e`, and so on). The 0/0-type pairs
//! `(0, 0)` and `(1, 1)` have no limit and yield [`Error::UndefinedMeasure`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comparison band for floating-point measure values.
///
/// Two values are equal when they are identical (this covers matching
/// infinities) or when their difference is within `absolute` or within
/// `relative` times the larger magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Tolerance {
    /// Band used when comparing a measure against its null.
    pub const NULL: Tolerance = Tolerance {
        relative: 0.0,
        absolute: 1e-12,
    };

    /// Band used when comparing a measure across two strata.
    pub const DIRECTION: Tolerance = Tolerance {
        relative: 1e-9,
        absolute: 1e-12,
    };

    pub const EXACT: Tolerance = Tolerance {
        relative: 0.0,
        absolute: 0.0,
    };

    pub fn eq(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        if !a.is_finite() || !b.is_finite() {
            return false;
        }
        let diff = (a - b).abs();
        diff <= self.absolute || diff <= self.relative * a.abs().max(b.abs())
    }

    /// Orders `a` against `b`, treating values within the band as equal.
    pub fn cmp(&self, a: f64, b: f64) -> Ordering {
        if self.eq(a, b) {
            Ordering::Equal
        } else if a < b {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DIRECTION
    }
}

/// Risks of the studied outcome in the control and exposed groups of one stratum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPair {
    pub control: f64,
    pub exposed: f64,
}

fn check_risk(value: f64) -> Result<f64> {
    if value.is_nan() {
        return Err(Error::InvalidRisk {
            value,
            reason: "not a number",
        });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidRisk {
            value,
            reason: "outside the closed unit interval",
        });
    }
    Ok(value)
}

impl RiskPair {
    /// Builds a pair with both risks in the closed interval `[0, 1]`.
    pub fn new(control: f64, exposed: f64) -> Result<Self> {
        Ok(RiskPair {
            control: check_risk(control)?,
            exposed: check_risk(exposed)?,
        })
    }

    /// Builds a pair with both risks in the open interval `(0, 1)`.
    pub fn strict(control: f64, exposed: f64) -> Result<Self> {
        let pair = RiskPair::new(control, exposed)?;
        for value in [control, exposed] {
            if value == 0.0 || value == 1.0 {
                return Err(Error::InvalidRisk {
                    value,
                    reason: "outside the open unit interval",
                });
            }
        }
        Ok(pair)
    }

    pub fn is_strict(&self) -> bool {
        [self.control, self.exposed]
            .iter()
            .all(|&p| p > 0.0 && p < 1.0)
    }

    /// Risks of the opposite outcome, groups unchanged: `(1 - c, 1 - e)`.
    pub fn opposite_outcome(&self) -> RiskPair {
        RiskPair {
            control: 1.0 - self.control,
            exposed: 1.0 - self.exposed,
        }
    }

    /// The same risks with control and exposed roles exchanged.
    pub fn swapped_groups(&self) -> RiskPair {
        RiskPair {
            control: self.exposed,
            exposed: self.control,
        }
    }

    /// Number of risks equal to 0 and to 1, in that order.
    pub(crate) fn boundary_counts(&self) -> (usize, usize) {
        let zeros = [self.control, self.exposed]
            .iter()
            .filter(|&&p| p == 0.0)
            .count();
        let ones = [self.control, self.exposed]
            .iter()
            .filter(|&&p| p == 1.0)
            .count();
        (zeros, ones)
    }

    pub fn measure(&self, kind: MeasureKind) -> Result<f64> {
        measure(self, kind)
    }

    pub fn measure_vector(&self) -> Result<MeasureVector> {
        measure_vector(self)
    }
}

/// The six effect measures compared across strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureKind {
    RelativeRisk,
    OtherRelativeRisk,
    HazardRatio,
    OtherHazardRatio,
    RiskDifference,
    OddsRatio,
}

impl MeasureKind {
    /// All kinds in bit order: RR, RR*, HR, HR*, RD, OR.
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::RelativeRisk,
        MeasureKind::OtherRelativeRisk,
        MeasureKind::HazardRatio,
        MeasureKind::OtherHazardRatio,
        MeasureKind::RiskDifference,
        MeasureKind::OddsRatio,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn bit(self) -> u8 {
        1 << self.index()
    }

    pub fn from_index(index: usize) -> Option<MeasureKind> {
        MeasureKind::ALL.get(index).copied()
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            MeasureKind::RelativeRisk => "RR",
            MeasureKind::OtherRelativeRisk => "RR*",
            MeasureKind::HazardRatio => "HR",
            MeasureKind::OtherHazardRatio => "HR*",
            MeasureKind::RiskDifference => "RD",
            MeasureKind::OddsRatio => "OR",
        }
    }

    /// Value indicating no exposure effect: 0 for RD, 1 for the ratios.
    pub const fn null(self) -> f64 {
        match self {
            MeasureKind::RiskDifference => 0.0,
            _ => 1.0,
        }
    }

    /// The same measure computed for the opposite outcome with groups swapped.
    ///
    /// `RR(pair~) = RR*(pair)` and `HR(pair~) = HR*(pair)`; RD and OR map to themselves.
    pub const fn opposite(self) -> MeasureKind {
        match self {
            MeasureKind::RelativeRisk => MeasureKind::OtherRelativeRisk,
            MeasureKind::OtherRelativeRisk => MeasureKind::RelativeRisk,
            MeasureKind::HazardRatio => MeasureKind::OtherHazardRatio,
            MeasureKind::OtherHazardRatio => MeasureKind::HazardRatio,
            MeasureKind::RiskDifference => MeasureKind::RiskDifference,
            MeasureKind::OddsRatio => MeasureKind::OddsRatio,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace(['_', '-', ' '], "");
        let kind = match normalized.as_str() {
            "rr" | "relativerisk" => MeasureKind::RelativeRisk,
            "rr*" | "rrstar" | "otherrelativerisk" => MeasureKind::OtherRelativeRisk,
            "hr" | "hazardratio" => MeasureKind::HazardRatio,
            "hr*" | "hrstar" | "otherhazardratio" => MeasureKind::OtherHazardRatio,
            "rd" | "riskdifference" => MeasureKind::RiskDifference,
            "or" | "oddsratio" => MeasureKind::OddsRatio,
            _ => return Err(Error::Validation(format!("unknown measure kind `{s}`"))),
        };
        Ok(kind)
    }
}

impl Serialize for MeasureKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for MeasureKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn undefined(kind: MeasureKind) -> Error {
    Error::UndefinedMeasure {
        kind,
        reason: "control and exposed risks sit at the same boundary",
    }
}

/// Value of one effect measure for a pair, with one-sided limits at the boundary.
pub fn measure(pair: &RiskPair, kind: MeasureKind) -> Result<f64> {
    let c = pair.control;
    let e = pair.exposed;
    let degenerate = c == e && (c == 0.0 || c == 1.0);
    if degenerate && kind != MeasureKind::RiskDifference {
        return Err(undefined(kind));
    }
    let value = match kind {
        MeasureKind::RiskDifference => e - c,
        MeasureKind::RelativeRisk => {
            if c == 0.0 {
                f64::INFINITY
            } else {
                e / c
            }
        }
        MeasureKind::OtherRelativeRisk => {
            if e == 1.0 {
                f64::INFINITY
            } else {
                (1.0 - c) / (1.0 - e)
            }
        }
        // The boundary arms below are ordered so the control risk decides first:
        // a control risk of 0 sends the denominator to 0-, one of 1 sends it to -inf.
        MeasureKind::HazardRatio => {
            if c == 0.0 || e == 1.0 {
                f64::INFINITY
            } else if c == 1.0 || e == 0.0 {
                0.0
            } else {
                (-e).ln_1p() / (-c).ln_1p()
            }
        }
        MeasureKind::OtherHazardRatio => {
            if c == 0.0 || e == 1.0 {
                f64::INFINITY
            } else if c == 1.0 || e == 0.0 {
                0.0
            } else {
                c.ln() / e.ln()
            }
        }
        MeasureKind::OddsRatio => {
            if c == 0.0 || e == 1.0 {
                f64::INFINITY
            } else if c == 1.0 || e == 0.0 {
                0.0
            } else {
                e * (1.0 - c) / (c * (1.0 - e))
            }
        }
    };
    Ok(value)
}

/// All six measures of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    #[serde(rename = "RR", with = "crate::ext")]
    pub rr: f64,
    #[serde(rename = "RR*", with = "crate::ext")]
    pub rr_star: f64,
    #[serde(rename = "HR", with = "crate::ext")]
    pub hr: f64,
    #[serde(rename = "HR*", with = "crate::ext")]
    pub hr_star: f64,
    #[serde(rename = "RD", with = "crate::ext")]
    pub rd: f64,
    #[serde(rename = "OR", with = "crate::ext")]
    pub or: f64,
}

impl MeasureVector {
    pub fn get(&self, kind: MeasureKind) -> f64 {
        match kind {
            MeasureKind::RelativeRisk => self.rr,
            MeasureKind::OtherRelativeRisk => self.rr_star,
            MeasureKind::HazardRatio => self.hr,
            MeasureKind::OtherHazardRatio => self.hr_star,
            MeasureKind::RiskDifference => self.rd,
            MeasureKind::OddsRatio => self.or,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (MeasureKind, f64)> + '_ {
        MeasureKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }

    /// Where the entry sits relative to its null.
    pub fn side_of_null(&self, kind: MeasureKind, tol: Tolerance) -> Ordering {
        tol.cmp(self.get(kind), kind.null())
    }
}

pub fn measure_vector(pair: &RiskPair) -> Result<MeasureVector> {
    Ok(MeasureVector {
        rr: measure(pair, MeasureKind::RelativeRisk)?,
        rr_star: measure(pair, MeasureKind::OtherRelativeRisk)?,
        hr: measure(pair, MeasureKind::HazardRatio)?,
        hr_star: measure(pair, MeasureKind::OtherHazardRatio)?,
        rd: measure(pair, MeasureKind::RiskDifference)?,
        or: measure(pair, MeasureKind::OddsRatio)?,
    })
}

/// Whether larger values of a derived measure mean a larger effect of exposure
/// on the studied outcome (`Direct`) or a smaller one (`Inverse`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Direct,
    Inverse,
}

/// Measures that are concordant with one of the six effect measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DerivedKind {
    CpGenerative,
    CpPreventative,
    ProbNecessity,
    ProbSufficiency,
    ProbNecessitySufficiency,
    NumberNeededToTreat,
    VaccineEfficacy,
    Grrr,
}

impl DerivedKind {
    pub const ALL: [DerivedKind; 8] = [
        DerivedKind::CpGenerative,
        DerivedKind::CpPreventative,
        DerivedKind::ProbNecessity,
        DerivedKind::ProbSufficiency,
        DerivedKind::ProbNecessitySufficiency,
        DerivedKind::NumberNeededToTreat,
        DerivedKind::VaccineEfficacy,
        DerivedKind::Grrr,
    ];

    pub const fn symbol(self) -> &'static str {
        match self {
            DerivedKind::CpGenerative => "CPg",
            DerivedKind::CpPreventative => "CPp",
            DerivedKind::ProbNecessity => "PN",
            DerivedKind::ProbSufficiency => "PS",
            DerivedKind::ProbNecessitySufficiency => "PNS",
            DerivedKind::NumberNeededToTreat => "NNT",
            DerivedKind::VaccineEfficacy => "VE",
            DerivedKind::Grrr => "GRRR",
        }
    }

    pub const fn orientation(self) -> Orientation {
        match self {
            DerivedKind::CpPreventative
            | DerivedKind::VaccineEfficacy
            | DerivedKind::NumberNeededToTreat => Orientation::Inverse,
            _ => Orientation::Direct,
        }
    }

    /// The effect measure this one always agrees with. NNT agrees with RD only
    /// on each side of the null, since `1/RD` jumps at 0. GRRR switches between
    /// RR and RR* and has no single concordant measure.
    pub const fn concordant(self) -> Option<MeasureKind> {
        match self {
            DerivedKind::CpGenerative | DerivedKind::ProbSufficiency => {
                Some(MeasureKind::OtherRelativeRisk)
            }
            DerivedKind::CpPreventative
            | DerivedKind::ProbNecessity
            | DerivedKind::VaccineEfficacy => Some(MeasureKind::RelativeRisk),
            DerivedKind::ProbNecessitySufficiency | DerivedKind::NumberNeededToTreat => {
                Some(MeasureKind::RiskDifference)
            }
            DerivedKind::Grrr => None,
        }
    }
}

/// Measures concordant with the six effect measures, for a strict pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedMeasures {
    /// `(e - c) / (1 - c) = 1 - 1/RR*`
    pub cp_generative: f64,
    /// `(c - e) / c = 1 - RR`
    pub cp_preventative: f64,
    /// `(e - c) / e = 1 - 1/RR`
    pub prob_necessity: f64,
    pub prob_sufficiency: f64,
    pub pns: f64,
    /// `1 / RD`; `+inf` when the risks are equal.
    #[serde(with = "crate::ext")]
    pub nnt: f64,
    pub vaccine_efficacy: f64,
    pub grrr: f64,
}

impl DerivedMeasures {
    pub fn get(&self, kind: DerivedKind) -> f64 {
        match kind {
            DerivedKind::CpGenerative => self.cp_generative,
            DerivedKind::CpPreventative => self.cp_preventative,
            DerivedKind::ProbNecessity => self.prob_necessity,
            DerivedKind::ProbSufficiency => self.prob_sufficiency,
            DerivedKind::ProbNecessitySufficiency => self.pns,
            DerivedKind::NumberNeededToTreat => self.nnt,
            DerivedKind::VaccineEfficacy => self.vaccine_efficacy,
            DerivedKind::Grrr => self.grrr,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (DerivedKind, f64, Orientation)> + '_ {
        DerivedKind::ALL
            .iter()
            .map(move |&k| (k, self.get(k), k.orientation()))
    }
}

fn require_strict(pair: &RiskPair) -> Result<()> {
    if pair.is_strict() {
        Ok(())
    } else {
        RiskPair::strict(pair.control, pair.exposed).map(|_| ())
    }
}

pub fn derived_measures(pair: &RiskPair) -> Result<DerivedMeasures> {
    require_strict(pair)?;
    let c = pair.control;
    let e = pair.exposed;
    let rd = e - c;
    let cp_generative = rd / (1.0 - c);
    let cp_preventative = (c - e) / c;
    let nnt = if rd == 0.0 { f64::INFINITY } else { 1.0 / rd };
    Ok(DerivedMeasures {
        cp_generative,
        cp_preventative,
        prob_necessity: rd / e,
        prob_sufficiency: cp_generative,
        pns: rd,
        nnt,
        vaccine_efficacy: cp_preventative,
        grrr: grrr(pair)?,
    })
}

/// Generalised relative risk ratio: `RR - 1` when the exposed risk is lower,
/// `1 - 1/RR*` otherwise. Both branches are 0 at equal risks.
pub fn grrr(pair: &RiskPair) -> Result<f64> {
    require_strict(pair)?;
    let c = pair.control;
    let e = pair.exposed;
    Ok(if e < c {
        e / c - 1.0
    } else {
        1.0 - (1.0 - e) / (1.0 - c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use MeasureKind::*;

    fn pair(c: f64, e: f64) -> RiskPair {
        RiskPair::new(c, e).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn table_one_relative_risk() {
        let rr = measure(&pair(0.7, 0.9), RelativeRisk).unwrap();
        assert!(close(rr, 0.9 / 0.7, 1e-15));
        assert_eq!(format!("{rr:.2}"), "1.29");
    }

    #[test]
    fn hcv_outcome_a_hazard_ratios() {
        let p = pair(0.05263, 0.15);
        assert_eq!(format!("{:.3}", measure(&p, HazardRatio).unwrap()), "3.006");
        assert_eq!(
            format!("{:.3}", measure(&p, OtherHazardRatio).unwrap()),
            "1.552"
        );
    }

    #[test]
    fn covid_young_hazard_ratio() {
        let hr = measure(&pair(0.009, 0.075), HazardRatio).unwrap();
        assert_eq!(format!("{hr:.2}"), "8.62");
    }

    #[test]
    fn equal_risks_give_nulls() {
        for x in [0.01, 0.3, 0.5, 0.77, 0.999] {
            let v = measure_vector(&pair(x, x)).unwrap();
            for (kind, value) in v.iter() {
                assert_eq!(value, kind.null(), "{kind} at {x}");
            }
        }
    }

    #[test]
    fn zero_control_risk_takes_the_limit() {
        let v = measure_vector(&pair(0.0, 0.3)).unwrap();
        assert_eq!(v.rr, f64::INFINITY);
        assert_eq!(v.or, f64::INFINITY);
        assert_eq!(v.hr, f64::INFINITY);
        assert_eq!(v.hr_star, f64::INFINITY);
        assert!(close(v.rr_star, 1.0 / 0.7, 1e-15));
        assert!(close(v.rd, 0.3, 1e-15));
    }

    #[test]
    fn unit_exposed_risk_takes_the_limit() {
        let v = measure_vector(&pair(0.4, 1.0)).unwrap();
        assert_eq!(v.rr_star, f64::INFINITY);
        assert_eq!(v.hr, f64::INFINITY);
        assert_eq!(v.hr_star, f64::INFINITY);
        assert_eq!(v.or, f64::INFINITY);
        assert!(close(v.rr, 2.5, 1e-15));

        let v = measure_vector(&pair(1.0, 0.4)).unwrap();
        assert_eq!(v.hr, 0.0);
        assert_eq!(v.hr_star, 0.0);
        assert_eq!(v.or, 0.0);
    }

    #[test]
    fn limits_agree_with_nearby_interior_values() {
        // one-sided limits should be approached from inside the unit interval
        let near = measure_vector(&pair(1e-12, 0.3)).unwrap();
        assert!(near.hr > 1e9 && near.rr > 1e9 && near.or > 1e9 && near.hr_star > 1.0);
        let near = measure_vector(&pair(1.0 - 1e-12, 0.4)).unwrap();
        assert!(near.hr < 0.1 && near.hr_star < 1e-9 && near.or < 1e-9);
    }

    #[test]
    fn same_boundary_is_undefined() {
        for b in [0.0, 1.0] {
            for kind in [
                RelativeRisk,
                OtherRelativeRisk,
                HazardRatio,
                OtherHazardRatio,
                OddsRatio,
            ] {
                assert!(matches!(
                    measure(&pair(b, b), kind),
                    Err(Error::UndefinedMeasure { .. })
                ));
            }
            assert_eq!(measure(&pair(b, b), RiskDifference).unwrap(), 0.0);
        }
        assert!(measure_vector(&pair(0.0, 0.0)).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(RiskPair::new(-0.1, 0.5).is_err());
        assert!(RiskPair::new(0.5, 1.1).is_err());
        assert!(RiskPair::new(f64::NAN, 0.5).is_err());
        assert!(RiskPair::new(0.0, 1.0).is_ok());
        assert!(RiskPair::strict(0.0, 0.5).is_err());
        assert!(RiskPair::strict(0.2, 0.5).is_ok());
    }

    #[test]
    fn measure_vector_examples() {
        let v = measure_vector(&pair(0.2, 0.3)).unwrap();
        assert_eq!(format!("{:.2}", v.rr), "1.50");
        assert_eq!(format!("{:.2}", v.or), "1.71");
        assert!(close(v.rd, 0.1, 1e-15));
        assert!(close(v.rr_star, 0.8 / 0.7, 1e-15));

        let v = measure_vector(&pair(0.00384, 0.00830)).unwrap();
        assert_eq!(format!("{:.2}", v.rr), "2.16");
        assert_eq!(format!("{:.3}", v.hr_star), "1.161");

        let v = measure_vector(&pair(0.5, 0.5)).unwrap();
        assert_eq!(v.rd, 0.0);
        assert_eq!(v.rr, 1.0);
    }

    #[test]
    fn kind_parsing_and_symbols() {
        for kind in MeasureKind::ALL {
            assert_eq!(kind.symbol().parse::<MeasureKind>().unwrap(), kind);
            assert_eq!(kind.opposite().opposite(), kind);
        }
        assert_eq!("rrstar".parse::<MeasureKind>().unwrap(), OtherRelativeRisk);
        assert_eq!("odds_ratio".parse::<MeasureKind>().unwrap(), OddsRatio);
        assert!("xx".parse::<MeasureKind>().is_err());
    }

    #[test]
    fn derived_melanoma_reversed_roles() {
        let d = derived_measures(&pair(0.00830, 0.00384)).unwrap();
        assert!(d.nnt < 0.0);
        assert_eq!(d.nnt.abs().round(), 224.0);
    }

    #[test]
    fn derived_equal_risks() {
        let d = derived_measures(&pair(0.35, 0.35)).unwrap();
        assert_eq!(d.cp_generative, 0.0);
        assert_eq!(d.cp_preventative, 0.0);
        assert_eq!(d.prob_necessity, 0.0);
        assert_eq!(d.nnt, f64::INFINITY);
        assert_eq!(d.grrr, 0.0);
    }

    #[test]
    fn derived_point_two_point_six() {
        let d = derived_measures(&pair(0.2, 0.6)).unwrap();
        assert!(close(d.cp_generative, 0.5, 1e-15));
        assert!(close(d.prob_necessity, 2.0 / 3.0, 1e-15));
        assert!(close(
            (1.0 - d.prob_necessity) * (1.0 - d.cp_preventative),
            1.0,
            1e-14
        ));
        assert_eq!(d.prob_sufficiency, d.cp_generative);
        assert_eq!(d.vaccine_efficacy, d.cp_preventative);
        assert!(close(d.pns, 0.4, 1e-15));
    }

    #[test]
    fn derived_requires_strict_pair() {
        assert!(derived_measures(&pair(0.0, 0.4)).is_err());
        assert!(grrr(&pair(0.3, 1.0)).is_err());
    }

    #[test]
    fn grrr_branches() {
        assert!(close(
            grrr(&pair(0.7, 0.9)).unwrap(),
            1.0 - 1.0 / 3.0,
            1e-12
        ));
        assert!(close(
            grrr(&pair(0.9, 0.7)).unwrap(),
            0.7 / 0.9 - 1.0,
            1e-15
        ));
        assert_eq!(grrr(&pair(0.4, 0.4)).unwrap(), 0.0);
    }

    #[test]
    fn derived_orientation_flags() {
        assert_eq!(
            DerivedKind::CpPreventative.orientation(),
            Orientation::Inverse
        );
        assert_eq!(
            DerivedKind::VaccineEfficacy.orientation(),
            Orientation::Inverse
        );
        assert_eq!(
            DerivedKind::ProbNecessity.orientation(),
            Orientation::Direct
        );
        assert_eq!(
            DerivedKind::CpGenerative.concordant(),
            Some(OtherRelativeRisk)
        );
    }

    fn strict_risk() -> impl Strategy<Value = f64> {
        1e-6f64..1.0 - 1e-6
    }

    proptest! {
        #[test]
        fn odds_ratio_is_product_of_relative_risks(c in strict_risk(), e in strict_risk()) {
            let v = measure_vector(&pair(c, e)).unwrap();
            let tol = Tolerance { relative: 1e-12, absolute: 0.0 };
            prop_assert!(tol.eq(v.or, v.rr * v.rr_star));
        }

        #[test]
        fn opposite_outcome_identities(c in strict_risk(), e in strict_risk()) {
            let p = pair(c, e);
            let flipped = p.opposite_outcome().swapped_groups();
            let v = measure_vector(&p).unwrap();
            let w = measure_vector(&flipped).unwrap();
            let tol = Tolerance { relative: 1e-9, absolute: 1e-15 };
            for kind in MeasureKind::ALL {
                prop_assert!(tol.eq(w.get(kind), v.get(kind.opposite())),
                    "{} of flipped pair {} vs {} {}", kind, w.get(kind), kind.opposite(), v.get(kind.opposite()));
            }
        }

        #[test]
        fn all_measures_cross_the_null_together(c in strict_risk(), e in strict_risk()) {
            prop_assume!((c - e).abs() > 1e-9);
            let v = measure_vector(&pair(c, e)).unwrap();
            let expected = if e > c { Ordering::Greater } else { Ordering::Less };
            for kind in MeasureKind::ALL {
                prop_assert_eq!(v.side_of_null(kind, Tolerance::NULL), expected, "{}", kind);
            }
        }

        #[test]
        fn risk_difference_balances_both_relative_risks(c in 0.001f64..0.999, e in 0.001f64..0.999) {
            prop_assume!((c - e).abs() > 1e-3);
            let v = measure_vector(&pair(c, e)).unwrap();
            let rebuilt = (v.rr - 1.0) * (v.rr_star - 1.0) / (v.rr * v.rr_star - 1.0);
            prop_assert!((rebuilt - v.rd).abs() < 1e-9);
        }

        #[test]
        fn necessity_and_preventative_power_are_reciprocal(c in 0.001f64..0.999, e in 0.001f64..0.999) {
            let d = derived_measures(&pair(c, e)).unwrap();
            let product = (1.0 - d.prob_necessity) * (1.0 - d.cp_preventative);
            prop_assert!((product - 1.0).abs() < 1e-12);
        }

        #[test]
        fn grrr_is_continuous_at_equal_risks(c in 0.01f64..0.99, h in 1e-10f64..1e-6) {
            let below = grrr(&pair(c, c - h)).unwrap();
            let above = grrr(&pair(c, c + h)).unwrap();
            prop_assert!(below.abs() < 1e-4 && above.abs() < 1e-4);
            prop_assert!(below < 0.0 && above > 0.0);
        }
    }
}
