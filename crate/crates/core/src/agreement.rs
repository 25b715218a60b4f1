//! Direction of effect-measure modification across two strata, and agreement
//! between measures.
//!
//! A measure modifies *toward* the stratum where its value is larger. All six
//! measures increase with the exposed risk and decrease with the control risk,
//! so "larger" always means "stronger effect of exposure on the studied
//! outcome". Two measures disagree when one points toward P and the other
//! toward Q; a set disagrees when any pair inside it does. `Null` (equal values
//! within tolerance) agrees with everything.
//!
//! Agreement of RR and RR* forces agreement of all six measures, so
//! [`rr_gate`] decides full agreement from two ratios alone.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{measure, measure_vector, MeasureKind, MeasureVector, RiskPair, Tolerance};

/// Two strata, P = (p1, p2) and Q = (p3, p4), each as (control, exposed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratifiedRisks {
    pub stratum_p: RiskPair,
    pub stratum_q: RiskPair,
}

impl StratifiedRisks {
    pub fn new(stratum_p: RiskPair, stratum_q: RiskPair) -> Self {
        StratifiedRisks {
            stratum_p,
            stratum_q,
        }
    }

    /// Builds strata from `p1..p4` in the closed unit interval.
    pub fn from_risks(p1: f64, p2: f64, p3: f64, p4: f64) -> Result<Self> {
        Ok(StratifiedRisks::new(
            RiskPair::new(p1, p2)?,
            RiskPair::new(p3, p4)?,
        ))
    }

    /// Builds strata from `p1..p4` in the open unit interval.
    pub fn strict(p1: f64, p2: f64, p3: f64, p4: f64) -> Result<Self> {
        Ok(StratifiedRisks::new(
            RiskPair::strict(p1, p2)?,
            RiskPair::strict(p3, p4)?,
        ))
    }

    /// `[p1, p2, p3, p4]`
    pub fn risks(&self) -> [f64; 4] {
        [
            self.stratum_p.control,
            self.stratum_p.exposed,
            self.stratum_q.control,
            self.stratum_q.exposed,
        ]
    }

    pub fn is_strict(&self) -> bool {
        self.stratum_p.is_strict() && self.stratum_q.is_strict()
    }

    pub fn swapped_strata(&self) -> Self {
        StratifiedRisks::new(self.stratum_q, self.stratum_p)
    }

    pub fn swapped_groups(&self) -> Self {
        StratifiedRisks::new(
            self.stratum_p.swapped_groups(),
            self.stratum_q.swapped_groups(),
        )
    }

    /// Opposite outcome with groups swapped in both strata. Under this map
    /// every measure becomes its [`MeasureKind::opposite`], directions kept.
    pub fn opposite_outcome(&self) -> Self {
        StratifiedRisks::new(
            self.stratum_p.opposite_outcome().swapped_groups(),
            self.stratum_q.opposite_outcome().swapped_groups(),
        )
    }

    /// Rejects strata with two or more risks at 0, or two or more at 1.
    /// Modification is evident from the risks themselves there and the
    /// one-sided limits of the measures stop being comparable.
    pub fn check_boundaries(&self, kind: MeasureKind) -> Result<()> {
        let (z1, o1) = self.stratum_p.boundary_counts();
        let (z2, o2) = self.stratum_q.boundary_counts();
        if z1 + z2 >= 2 {
            return Err(Error::UndefinedMeasure {
                kind,
                reason: "two or more risks are 0",
            });
        }
        if o1 + o2 >= 2 {
            return Err(Error::UndefinedMeasure {
                kind,
                reason: "two or more risks are 1",
            });
        }
        Ok(())
    }

    pub fn measure_vectors(&self) -> Result<(MeasureVector, MeasureVector)> {
        self.check_boundaries(MeasureKind::RelativeRisk)?;
        Ok((
            measure_vector(&self.stratum_p)?,
            measure_vector(&self.stratum_q)?,
        ))
    }
}

/// Which stratum a measure says responds more strongly to exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    TowardP,
    TowardQ,
    Null,
}

impl Direction {
    pub fn agrees_with(self, other: Direction) -> bool {
        !matches!(
            (self, other),
            (Direction::TowardP, Direction::TowardQ) | (Direction::TowardQ, Direction::TowardP)
        )
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::TowardP => Direction::TowardQ,
            Direction::TowardQ => Direction::TowardP,
            Direction::Null => Direction::Null,
        }
    }

    fn from_values(in_p: f64, in_q: f64, tol: Tolerance) -> Direction {
        match tol.cmp(in_q, in_p) {
            std::cmp::Ordering::Greater => Direction::TowardQ,
            std::cmp::Ordering::Less => Direction::TowardP,
            std::cmp::Ordering::Equal => Direction::Null,
        }
    }
}

pub fn modification_direction(
    s: &StratifiedRisks,
    kind: MeasureKind,
    tol: Tolerance,
) -> Result<Direction> {
    s.check_boundaries(kind)?;
    let in_p = measure(&s.stratum_p, kind)?;
    let in_q = measure(&s.stratum_q, kind)?;
    Ok(Direction::from_values(in_p, in_q, tol))
}

/// Directions of all six measures as bitmasks `(toward_p, toward_q)`.
///
/// Bits follow [`MeasureKind::bit`]. Kinds in neither mask are `Null`.
pub fn direction_masks(p: &MeasureVector, q: &MeasureVector, tol: Tolerance) -> (u8, u8) {
    let mut toward_p = 0u8;
    let mut toward_q = 0u8;
    for kind in MeasureKind::ALL {
        match Direction::from_values(p.get(kind), q.get(kind), tol) {
            Direction::TowardP => toward_p |= kind.bit(),
            Direction::TowardQ => toward_q |= kind.bit(),
            Direction::Null => {}
        }
    }
    (toward_p, toward_q)
}

/// Whether every pair in `subset` agrees, given direction masks.
pub fn subset_agrees(subset: KindSet, toward_p: u8, toward_q: u8) -> bool {
    subset.bits() & toward_p == 0 || subset.bits() & toward_q == 0
}

/// A subset of the six measure kinds, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct KindSet(u8);

impl KindSet {
    pub const EMPTY: KindSet = KindSet(0);
    pub const ALL: KindSet = KindSet(0b11_1111);

    pub fn from_bits(bits: u8) -> Option<KindSet> {
        (bits <= KindSet::ALL.0).then_some(KindSet(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn of(kinds: &[MeasureKind]) -> KindSet {
        kinds.iter().copied().collect()
    }

    pub fn contains(self, kind: MeasureKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn insert(&mut self, kind: MeasureKind) {
        self.0 |= kind.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: KindSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = MeasureKind> {
        MeasureKind::ALL
            .into_iter()
            .filter(move |k| self.contains(*k))
    }

    /// All 64 subsets in bitmask order.
    pub fn all_subsets() -> impl Iterator<Item = KindSet> {
        (0..=KindSet::ALL.0).map(KindSet)
    }

    fn map(self, f: impl Fn(MeasureKind) -> MeasureKind) -> KindSet {
        self.iter().map(f).collect()
    }
}

impl FromIterator<MeasureKind> for KindSet {
    fn from_iter<I: IntoIterator<Item = MeasureKind>>(iter: I) -> Self {
        let mut set = KindSet::EMPTY;
        for kind in iter {
            set.insert(kind);
        }
        set
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(MeasureKind::symbol).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for KindSet {
    type Err = Error;

    /// Accepts `all`, or kinds separated by `,` or `+`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(KindSet::ALL);
        }
        s.split([',', '+'])
            .filter(|part| !part.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

impl Serialize for KindSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for KindSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let kinds = Vec::<MeasureKind>::deserialize(deserializer)?;
        Ok(kinds.into_iter().collect())
    }
}

/// Outcome of [`agree`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// The subset the caller asked about.
    pub kinds: KindSet,
    pub agrees: bool,
    pub directions: BTreeMap<MeasureKind, Direction>,
    /// `pairwise[i][j]`: whether kinds `i` and `j` agree, in bit order.
    pub pairwise: Vec<Vec<bool>>,
    /// Verdict for each of the 64 subsets, indexed by bitmask.
    pub subsets: Vec<bool>,
    pub rr_gate_fired: bool,
    pub sufficient_conditions: Vec<SufficientCondition>,
    pub tolerance: Tolerance,
}

impl AgreementReport {
    pub fn subset_agrees(&self, subset: KindSet) -> bool {
        self.subsets[subset.bits() as usize]
    }

    pub fn direction(&self, kind: MeasureKind) -> Direction {
        self.directions[&kind]
    }
}

pub fn agree(s: &StratifiedRisks, kinds: KindSet, tol: Tolerance) -> Result<AgreementReport> {
    let (p, q) = s.measure_vectors()?;
    let (toward_p, toward_q) = direction_masks(&p, &q, tol);
    let directions: BTreeMap<MeasureKind, Direction> = MeasureKind::ALL
        .iter()
        .map(|&k| {
            let d = if toward_p & k.bit() != 0 {
                Direction::TowardP
            } else if toward_q & k.bit() != 0 {
                Direction::TowardQ
            } else {
                Direction::Null
            };
            (k, d)
        })
        .collect();
    let pairwise = MeasureKind::ALL
        .iter()
        .map(|a| {
            MeasureKind::ALL
                .iter()
                .map(|b| directions[a].agrees_with(directions[b]))
                .collect()
        })
        .collect();
    let subsets: Vec<bool> = KindSet::all_subsets()
        .map(|set| subset_agrees(set, toward_p, toward_q))
        .collect();
    let rr_gate_fired = directions[&MeasureKind::RelativeRisk]
        .agrees_with(directions[&MeasureKind::OtherRelativeRisk]);
    let sufficient_conditions = if s.is_strict() {
        sufficient_conditions(s)?
    } else {
        Vec::new()
    };
    Ok(AgreementReport {
        kinds,
        agrees: subsets[kinds.bits() as usize],
        directions,
        pairwise,
        subsets,
        rr_gate_fired,
        sufficient_conditions,
        tolerance: tol,
    })
}

/// True when RR and RR* do not point in opposite directions. When it fires,
/// HR, HR*, RD and OR agree with them as well.
pub fn rr_gate(s: &StratifiedRisks, tol: Tolerance) -> Result<bool> {
    let rr = modification_direction(s, MeasureKind::RelativeRisk, tol)?;
    let rr_star = modification_direction(s, MeasureKind::OtherRelativeRisk, tol)?;
    Ok(rr.agrees_with(rr_star))
}

fn strict_triple(p1: f64, p2: f64, p3: f64) -> Result<()> {
    RiskPair::strict(p1, p2)?;
    RiskPair::strict(p3, 0.5)?;
    Ok(())
}

/// The value of p4 at which `kind` shows no modification, given p1, p2, p3.
///
/// RR, RD and RR* may return values outside `(0, 1)`; OR, HR and HR* always
/// land inside.
pub fn critical_p4(p1: f64, p2: f64, p3: f64, kind: MeasureKind) -> Result<f64> {
    strict_triple(p1, p2, p3)?;
    let p = RiskPair::new(p1, p2)?;
    let value = match kind {
        MeasureKind::RelativeRisk => p2 * p3 / p1,
        MeasureKind::RiskDifference => p2 + p3 - p1,
        MeasureKind::OtherRelativeRisk => 1.0 - (1.0 - p2) * (1.0 - p3) / (1.0 - p1),
        MeasureKind::OddsRatio => {
            let odds = measure(&p, kind)? * p3 / (1.0 - p3);
            odds / (1.0 + odds)
        }
        // 1 - (1 - p3)^HR_P
        MeasureKind::HazardRatio => -(measure(&p, kind)? * (-p3).ln_1p()).exp_m1(),
        // p3^(1/HR*_P)
        MeasureKind::OtherHazardRatio => (p3.ln() / measure(&p, kind)?).exp(),
    };
    Ok(value)
}

/// An open interval `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lower: f64,
    pub upper: f64,
}

impl OpenInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

/// Values of p4 in `(0, 1)` for which `kind_a` and `kind_b` disagree: the
/// open interval between their critical values. `None` when it is empty.
pub fn disagreement_window(
    p1: f64,
    p2: f64,
    p3: f64,
    kind_a: MeasureKind,
    kind_b: MeasureKind,
) -> Result<Option<OpenInterval>> {
    let a = critical_p4(p1, p2, p3, kind_a)?;
    let b = critical_p4(p1, p2, p3, kind_b)?;
    if Tolerance::DIRECTION.eq(a, b) {
        return Ok(None);
    }
    let lower = a.min(b).max(0.0);
    let upper = a.max(b).min(1.0);
    Ok((lower < upper).then_some(OpenInterval { lower, upper }))
}

/// `x -> ln(1 - x r) / ln(1 - x)`, defined for `0 < x < 1/r`.
///
/// Strictly increasing in `x` when `r > 1`; this is what carries RR*
/// agreement over to HR* when the exposed risk falls.
pub fn log_ratio_profile(x: f64, r: f64) -> f64 {
    (-x * r).ln_1p() / (-x).ln_1p()
}

/// Standalone results that force agreement without assuming RR and RR* agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    /// Exposure raises risk in exactly one stratum: all six agree.
    QualitativeModification,
    /// `RR_P < RR_Q`, `p3 >= p1`, `p2 >= p1` imply `RD_P < RD_Q`.
    RelativeRiskRiskDifference,
    /// `RR*_P < RR*_Q`, `p3 <= p1`, `p2 >= p1` imply `RD_P < RD_Q`.
    OtherRelativeRiskRiskDifference,
    /// `RR_P < RR_Q`, `p4 > p3`, `p4 > p2` imply `HR*_P < HR*_Q`.
    RelativeRiskOtherHazard,
    /// `p4 < p2` and `1 < RR*_P < RR*_Q` imply `HR*_P < HR*_Q`.
    OtherRelativeRiskOtherHazard,
}

/// A relabeling that preserves agreement: swapping strata, swapping groups in
/// both strata, and switching to the opposite outcome (which also swaps the
/// measures with their starred counterparts).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Relabeling {
    pub swap_strata: bool,
    pub swap_groups: bool,
    pub opposite_outcome: bool,
}

impl Relabeling {
    pub fn all() -> impl Iterator<Item = Relabeling> {
        (0..8u8).map(|b| Relabeling {
            swap_strata: b & 1 != 0,
            swap_groups: b & 2 != 0,
            opposite_outcome: b & 4 != 0,
        })
    }

    pub fn apply(&self, s: &StratifiedRisks) -> StratifiedRisks {
        let mut out = *s;
        if self.opposite_outcome {
            out = out.opposite_outcome();
        }
        if self.swap_groups {
            out = out.swapped_groups();
        }
        if self.swap_strata {
            out = out.swapped_strata();
        }
        out
    }

    /// Translates a kind in the relabeled frame back to the original one.
    pub fn original_kind(&self, kind: MeasureKind) -> MeasureKind {
        if self.opposite_outcome {
            kind.opposite()
        } else {
            kind
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SufficientCondition {
    pub lemma: Lemma,
    pub relabeling: Relabeling,
    /// Kinds (in the caller's labeling) that the lemma forces to agree.
    pub forces: KindSet,
}

fn lemmas_in_frame(s: &StratifiedRisks) -> Result<Vec<(Lemma, KindSet)>> {
    use MeasureKind::*;
    let [p1, p2, p3, p4] = s.risks();
    let (mp, mq) = s.measure_vectors()?;
    let mut fired = Vec::new();
    if (p1 < p2) != (p3 < p4) {
        fired.push((Lemma::QualitativeModification, KindSet::ALL));
    }
    if mp.rr < mq.rr && p3 >= p1 && p2 >= p1 {
        fired.push((
            Lemma::RelativeRiskRiskDifference,
            KindSet::of(&[RelativeRisk, RiskDifference]),
        ));
    }
    if mp.rr_star < mq.rr_star && p3 <= p1 && p2 >= p1 {
        fired.push((
            Lemma::OtherRelativeRiskRiskDifference,
            KindSet::of(&[OtherRelativeRisk, RiskDifference]),
        ));
    }
    if mp.rr < mq.rr && p4 > p3 && p4 > p2 {
        fired.push((
            Lemma::RelativeRiskOtherHazard,
            KindSet::of(&[RelativeRisk, OtherHazardRatio]),
        ));
    }
    if p4 < p2 && 1.0 < mp.rr_star && mp.rr_star < mq.rr_star {
        fired.push((
            Lemma::OtherRelativeRiskOtherHazard,
            KindSet::of(&[OtherRelativeRisk, OtherHazardRatio]),
        ));
    }
    Ok(fired)
}

/// Agreement conclusions forced by the standalone lemmas, checked under every
/// agreement-preserving relabeling. Each (lemma, forced set) is reported once,
/// with the first relabeling that fires it.
pub fn sufficient_conditions(s: &StratifiedRisks) -> Result<Vec<SufficientCondition>> {
    let [p1, p2, p3, p4] = s.risks();
    StratifiedRisks::strict(p1, p2, p3, p4)?;
    let mut out: Vec<SufficientCondition> = Vec::new();
    for relabeling in Relabeling::all() {
        for (lemma, forces) in lemmas_in_frame(&relabeling.apply(s))? {
            let forces = forces.map(|k| relabeling.original_kind(k));
            if !out.iter().any(|c| c.lemma == lemma && c.forces == forces) {
                out.push(SufficientCondition {
                    lemma,
                    relabeling,
                    forces,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use MeasureKind::*;

    const TOL: Tolerance = Tolerance::DIRECTION;

    fn strata(p1: f64, p2: f64, p3: f64, p4: f64) -> StratifiedRisks {
        StratifiedRisks::from_risks(p1, p2, p3, p4).unwrap()
    }

    fn dir(s: &StratifiedRisks, k: MeasureKind) -> Direction {
        modification_direction(s, k, TOL).unwrap()
    }

    #[test]
    fn table_one_directions() {
        let s = strata(0.7, 0.9, 0.2, 0.3);
        assert_eq!(dir(&s, RelativeRisk), Direction::TowardQ);
        assert_eq!(dir(&s, OddsRatio), Direction::TowardP);
        assert_eq!(dir(&s, RiskDifference), Direction::TowardP);
        assert_eq!(dir(&s, OtherRelativeRisk), Direction::TowardP);
    }

    #[test]
    fn identical_strata_are_null() {
        let s = strata(0.3, 0.6, 0.3, 0.6);
        for k in MeasureKind::ALL {
            assert_eq!(dir(&s, k), Direction::Null);
        }
    }

    #[test]
    fn null_agrees_with_everything() {
        for d in [Direction::TowardP, Direction::TowardQ, Direction::Null] {
            assert!(Direction::Null.agrees_with(d));
            assert!(d.agrees_with(d));
        }
        assert!(!Direction::TowardP.agrees_with(Direction::TowardQ));
    }

    #[test]
    fn table_one_relative_risk_and_odds_ratio_disagree() {
        let r = agree(
            &strata(0.7, 0.9, 0.2, 0.3),
            KindSet::of(&[RelativeRisk, OddsRatio]),
            TOL,
        )
        .unwrap();
        assert!(!r.agrees);
        assert!(!r.rr_gate_fired);
    }

    #[test]
    fn covid_relative_risk_and_risk_difference_disagree() {
        let s = strata(0.009, 0.075, 0.106, 0.253);
        let r = agree(&s, KindSet::of(&[RelativeRisk, RiskDifference]), TOL).unwrap();
        assert!(!r.agrees);
        assert_eq!(r.direction(RelativeRisk), Direction::TowardP);
        assert_eq!(r.direction(RiskDifference), Direction::TowardQ);
    }

    #[test]
    fn singletons_and_empty_set_always_agree() {
        let r = agree(&strata(0.009, 0.075, 0.106, 0.253), KindSet::ALL, TOL).unwrap();
        assert!(r.subset_agrees(KindSet::EMPTY));
        for k in MeasureKind::ALL {
            assert!(r.subset_agrees(KindSet::of(&[k])));
        }
    }

    #[test]
    fn pairwise_matrix_is_symmetric_with_true_diagonal() {
        let r = agree(&strata(0.05263, 0.15, 0.26316, 0.35), KindSet::ALL, TOL).unwrap();
        for i in 0..6 {
            assert!(r.pairwise[i][i]);
            for j in 0..6 {
                assert_eq!(r.pairwise[i][j], r.pairwise[j][i]);
            }
        }
    }

    #[test]
    fn rr_gate_examples() {
        let hcv = strata(0.05263, 0.15, 0.26316, 0.35);
        assert_eq!(dir(&hcv, RelativeRisk), Direction::TowardP);
        assert_eq!(dir(&hcv, OtherRelativeRisk), Direction::TowardQ);
        assert!(!rr_gate(&hcv, TOL).unwrap());

        let melanoma = strata(0.00384, 0.00830, 0.00045, 0.00140);
        assert_eq!(dir(&melanoma, RelativeRisk), Direction::TowardQ);
        assert_eq!(dir(&melanoma, OtherRelativeRisk), Direction::TowardP);
        assert!(!rr_gate(&melanoma, TOL).unwrap());

        let qualitative = strata(0.2, 0.4, 0.5, 0.3);
        assert_eq!(dir(&qualitative, RelativeRisk), Direction::TowardP);
        assert_eq!(dir(&qualitative, OtherRelativeRisk), Direction::TowardP);
        assert!(rr_gate(&qualitative, TOL).unwrap());
        assert!(agree(&qualitative, KindSet::ALL, TOL).unwrap().agrees);
    }

    #[test]
    fn gate_fires_on_null_relative_risk() {
        // RR equal across strata: p4 = p2 p3 / p1
        let s = strata(0.2, 0.4, 0.3, 0.6);
        assert_eq!(dir(&s, RelativeRisk), Direction::Null);
        assert!(rr_gate(&s, TOL).unwrap());
    }

    #[test]
    fn boundary_budget() {
        let s = strata(0.0, 0.3, 0.2, 0.5);
        assert_eq!(dir(&s, RelativeRisk), Direction::TowardP);
        let s = strata(0.0, 0.3, 0.2, 1.0);
        assert!(modification_direction(&s, RelativeRisk, TOL).is_ok());
        let s = strata(0.0, 0.3, 0.0, 0.5);
        assert!(matches!(
            modification_direction(&s, RelativeRisk, TOL),
            Err(Error::UndefinedMeasure { .. })
        ));
        let s = strata(0.2, 1.0, 0.3, 1.0);
        assert!(rr_gate(&s, TOL).is_err());
    }

    #[test]
    fn table_three_critical_values() {
        let rows = [
            ((0.1, 0.2, 0.3), (0.6, 0.4, 0.3777777777777778)),
            ((0.2, 0.1, 0.3), (0.15, 0.2, 0.2125)),
            ((0.2, 0.3, 0.1), (0.15, 0.2, 0.2125)),
            (
                (0.3, 0.1, 0.2),
                (0.1 * 0.2 / 0.3, 0.0, -0.02857142857142857),
            ),
        ];
        for ((p1, p2, p3), (rr, rd, rrs)) in rows {
            assert!((critical_p4(p1, p2, p3, RelativeRisk).unwrap() - rr).abs() < 1e-12);
            assert!((critical_p4(p1, p2, p3, RiskDifference).unwrap() - rd).abs() < 1e-12);
            assert!((critical_p4(p1, p2, p3, OtherRelativeRisk).unwrap() - rrs).abs() < 1e-12);
        }
    }

    /// Bisection on p4 for the tie `measure(P) == measure(Q)`; independent of
    /// the closed forms.
    fn bisect_critical(p1: f64, p2: f64, p3: f64, kind: MeasureKind) -> f64 {
        let target = measure(&RiskPair::new(p1, p2).unwrap(), kind).unwrap();
        let f = |p4: f64| measure(&RiskPair::new(p3, p4).unwrap(), kind).unwrap() - target;
        let (mut lo, mut hi) = (1e-15, 1.0 - 1e-15);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn closed_form_critical_values_match_bisection() {
        let hr = critical_p4(0.1, 0.2, 0.3, HazardRatio).unwrap();
        let expected = 1.0 - 0.7f64.powf(0.8f64.ln() / 0.9f64.ln());
        assert!((hr - expected).abs() < 1e-14);
        for (p1, p2, p3) in [
            (0.1, 0.2, 0.3),
            (0.6, 0.2, 0.45),
            (0.05, 0.5, 0.2),
            (0.8, 0.85, 0.3),
        ] {
            for kind in [HazardRatio, OtherHazardRatio, OddsRatio] {
                let closed = critical_p4(p1, p2, p3, kind).unwrap();
                let oracle = bisect_critical(p1, p2, p3, kind);
                assert!(
                    (closed - oracle).abs() < 1e-10,
                    "{kind} {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn windows() {
        let w = disagreement_window(0.1, 0.2, 0.3, RelativeRisk, OtherRelativeRisk)
            .unwrap()
            .unwrap();
        assert!((w.lower - 0.3777777777777778).abs() < 1e-12);
        assert!((w.upper - 0.6).abs() < 1e-12);

        for kinds in [
            (RelativeRisk, RiskDifference),
            (RelativeRisk, OtherRelativeRisk),
            (HazardRatio, OddsRatio),
        ] {
            assert_eq!(
                disagreement_window(0.4, 0.4, 0.7, kinds.0, kinds.1).unwrap(),
                None
            );
        }

        let w = disagreement_window(0.56, 0.53, 0.78, RelativeRisk, RiskDifference)
            .unwrap()
            .unwrap();
        assert!((w.lower - 0.53 * 0.78 / 0.56).abs() < 1e-12);
        assert!((w.upper - 0.75).abs() < 1e-12);
    }

    #[test]
    fn window_is_clamped_to_unit_interval() {
        // p4*RR = 0.9 * 0.8 / 0.3 > 1
        let w = disagreement_window(0.3, 0.9, 0.8, RelativeRisk, OtherRelativeRisk)
            .unwrap()
            .unwrap();
        assert_eq!(w.upper, 1.0);
    }

    #[test]
    fn sufficient_conditions_examples() {
        // Both exposed risks rise and RR disagrees with HR*: the p4 ordering
        // alone does not force RR and HR* together.
        let s = strata(0.1, 0.3, 0.2, 0.5);
        assert_eq!(dir(&s, RelativeRisk), Direction::TowardP);
        assert_eq!(dir(&s, OtherHazardRatio), Direction::TowardQ);
        let fired = sufficient_conditions(&s).unwrap();
        assert!(!fired
            .iter()
            .any(|c| c.forces == KindSet::of(&[RelativeRisk, OtherHazardRatio])));

        let q = strata(0.2, 0.4, 0.5, 0.3);
        let fired = sufficient_conditions(&q).unwrap();
        assert!(fired
            .iter()
            .any(|c| c.lemma == Lemma::QualitativeModification && c.forces == KindSet::ALL));

        // Melanoma with groups swapped has RR*_P < RR*_Q and p3 <= p1, and RR*
        // agrees with RD. The lemma also needs p2 >= p1 in that frame, which
        // fails, so it is not reported as forced.
        let melanoma = strata(0.00384, 0.00830, 0.00045, 0.00140);
        let frame = melanoma.swapped_groups();
        let [p1, p2, p3, _] = frame.risks();
        let (mp, mq) = frame.measure_vectors().unwrap();
        assert!(mp.rr_star < mq.rr_star && p3 <= p1 && p2 < p1);
        assert_eq!(
            dir(&melanoma, OtherRelativeRisk),
            dir(&melanoma, RiskDifference)
        );
        let rrs_rd = KindSet::of(&[OtherRelativeRisk, RiskDifference]);
        assert!(!sufficient_conditions(&melanoma)
            .unwrap()
            .iter()
            .any(|c| c.forces == rrs_rd));

        // Without p2 >= p1 the premises can hold while RR* and RD disagree.
        let s = strata(0.5, 0.3, 0.4, 0.18);
        let (mp, mq) = s.measure_vectors().unwrap();
        assert!(mp.rr_star < mq.rr_star);
        assert!(!agree(&s, rrs_rd, TOL).unwrap().agrees);
        assert!(!sufficient_conditions(&s)
            .unwrap()
            .iter()
            .any(|c| c.forces == rrs_rd));
    }

    #[test]
    fn kind_set_parsing() {
        let set: KindSet = "RR,RR*".parse().unwrap();
        assert_eq!(set, KindSet::of(&[RelativeRisk, OtherRelativeRisk]));
        assert_eq!(set.to_string(), "RR+RR*");
        assert_eq!("all".parse::<KindSet>().unwrap(), KindSet::ALL);
        assert_eq!(KindSet::all_subsets().count(), 64);
        assert!("RR,XX".parse::<KindSet>().is_err());
    }

    #[test]
    fn region_a_ordering_of_critical_values() {
        let (p1, p2, p3) = (0.1, 0.2, 0.3);
        let rr = critical_p4(p1, p2, p3, RelativeRisk).unwrap();
        let rd = critical_p4(p1, p2, p3, RiskDifference).unwrap();
        let rrs = critical_p4(p1, p2, p3, OtherRelativeRisk).unwrap();
        assert!(rrs < rd && rd < rr);
    }

    fn risk() -> impl Strategy<Value = f64> {
        0.001f64..0.999
    }

    proptest! {
        #[test]
        fn theorem_gate(p1 in risk(), p2 in risk(), p3 in risk(), p4 in risk()) {
            let s = strata(p1, p2, p3, p4);
            let report = agree(&s, KindSet::ALL, TOL).unwrap();
            prop_assert_eq!(rr_gate(&s, TOL).unwrap(), report.agrees);
            if report.rr_gate_fired {
                prop_assert!(report.subset_agrees(KindSet::ALL));
            }
        }

        #[test]
        fn subset_verdict_matches_pairs(p1 in risk(), p2 in risk(), p3 in risk(), p4 in risk(), bits in 0u8..64) {
            let report = agree(&strata(p1, p2, p3, p4), KindSet::ALL, TOL).unwrap();
            let subset = KindSet::from_bits(bits).unwrap();
            let pairs_agree = subset.iter().all(|a| subset.iter().all(|b| report.pairwise[a.index()][b.index()]));
            prop_assert_eq!(report.subset_agrees(subset), pairs_agree);
        }

        #[test]
        fn fired_conditions_hold(p1 in risk(), p2 in risk(), p3 in risk(), p4 in risk()) {
            let s = strata(p1, p2, p3, p4);
            let report = agree(&s, KindSet::ALL, TOL).unwrap();
            for c in &report.sufficient_conditions {
                prop_assert!(report.subset_agrees(c.forces), "{:?} at {:?}", c, s.risks());
            }
        }

        #[test]
        fn relabelings_preserve_agreement(p1 in risk(), p2 in risk(), p3 in risk(), p4 in risk()) {
            let s = strata(p1, p2, p3, p4);
            let base = agree(&s, KindSet::ALL, TOL).unwrap();
            for relabeling in Relabeling::all() {
                let other = agree(&relabeling.apply(&s), KindSet::ALL, TOL).unwrap();
                for subset in KindSet::all_subsets() {
                    let original = subset.map(|k| relabeling.original_kind(k));
                    prop_assert_eq!(other.subset_agrees(subset), base.subset_agrees(original));
                }
            }
        }

        #[test]
        fn lemma_critical_values_coincide_only_on_planes(p1 in risk(), p2 in risk(), p3 in risk()) {
            prop_assume!((p1 - p2).abs() > 1e-3 && (p1 - p3).abs() > 1e-3);
            let rd = critical_p4(p1, p2, p3, RiskDifference).unwrap();
            let rr = critical_p4(p1, p2, p3, RelativeRisk).unwrap();
            let rrs = critical_p4(p1, p2, p3, OtherRelativeRisk).unwrap();
            prop_assert!((rd - rr).abs() > 1e-9 && (rd - rrs).abs() > 1e-9);
            // RD's critical value always sits between the two relative risks'
            prop_assert!((rr - rd) * (rd - rrs) > 0.0);
        }

        #[test]
        fn lemma_planes_collapse_critical_values(p1 in risk(), p3 in risk()) {
            for (a, b, c) in [(p1, p1, p3), (p1, p3, p1)] {
                let values: Vec<f64> = [RelativeRisk, RiskDifference, OtherRelativeRisk]
                    .iter()
                    .map(|&k| critical_p4(a, b, c, k).unwrap())
                    .collect();
                prop_assert!((values[0] - values[1]).abs() < 1e-12);
                prop_assert!((values[1] - values[2]).abs() < 1e-12);
            }
        }

        #[test]
        fn log_ratio_profile_increases(r in 1.01f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let x0 = lo / r * 0.999 + 1e-9;
            let x1 = hi / r * 0.999 + 1e-9;
            prop_assert!(log_ratio_profile(x0, r) < log_ratio_profile(x1, r));
        }
    }
}
