//! Testing for common-direction modification of RR and RR* from counts.
//!
//! With risks `p1..p4` estimated from four binomial cells, the two log
//! relative risk ratios
//!
//! ```text
//! log_rrr1 = ln(p2 p3 / (p1 p4))                      (RR_P / RR_Q)
//! log_rrr2 = ln((1 - p1)(1 - p4) / ((1 - p2)(1 - p3)))  (RR*_P / RR*_Q)
//! ```
//!
//! are asymptotically bivariate normal with
//!
//! ```text
//! Var(log_rrr1) = sum (1 - p_i) / (n_i p_i)
//! Var(log_rrr2) = sum p_i / (n_i (1 - p_i))
//! Cov           = sum 1 / n_i
//! ```
//!
//! since `Cov(ln p, ln(1 - p)) = -1/n` in each cell and every cell enters the
//! two statistics with opposite signs. Both ratios above 1 means RR and RR*
//! both modify toward P; both below 1 means both modify toward Q. The test
//! rejects "no common direction" when a Bonferroni rectangle at level alpha
//! sits inside one of those two quadrants.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::agreement::StratifiedRisks;
use crate::error::{Error, Result};
use crate::measures::RiskPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub events: u64,
    pub total: u64,
}

impl Cell {
    pub fn new(events: u64, total: u64) -> Result<Cell> {
        if total == 0 {
            return Err(Error::Validation("cell total must be at least 1".into()));
        }
        if events > total {
            return Err(Error::Validation(format!(
                "cell has {events} events but only {total} subjects"
            )));
        }
        Ok(Cell { events, total })
    }
}

/// Event counts for each (stratum, group) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub p_control: Cell,
    pub p_exposed: Cell,
    pub q_control: Cell,
    pub q_exposed: Cell,
}

impl CountTable {
    /// Cells in the order p1, p2, p3, p4.
    pub fn new(cells: [(u64, u64); 4]) -> Result<CountTable> {
        let [a, b, c, d] = cells;
        let table = CountTable {
            p_control: Cell::new(a.0, a.1)?,
            p_exposed: Cell::new(b.0, b.1)?,
            q_control: Cell::new(c.0, c.1)?,
            q_exposed: Cell::new(d.0, d.1)?,
        };
        Ok(table)
    }

    pub fn cells(&self) -> [Cell; 4] {
        [
            self.p_control,
            self.p_exposed,
            self.q_control,
            self.q_exposed,
        ]
    }

    fn labels(index: usize) -> (&'static str, &'static str) {
        [
            ("P", "control"),
            ("P", "exposed"),
            ("Q", "control"),
            ("Q", "exposed"),
        ][index]
    }
}

/// What to do with cells whose estimated risk is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroCellPolicy {
    /// Fail with [`Error::DegenerateCell`].
    #[default]
    Reject,
    /// Add 0.5 to every event count and 1 to every total.
    HaldaneAnscombe,
}

/// Per-cell `(risk, total)` after applying `policy`.
fn cell_estimates(t: &CountTable, policy: ZeroCellPolicy) -> Result<[(f64, f64); 4]> {
    let mut out = [(0.0, 0.0); 4];
    for (i, cell) in t.cells().iter().enumerate() {
        let (events, total) = match policy {
            ZeroCellPolicy::Reject => {
                if cell.events == 0 || cell.events == cell.total {
                    let (stratum, group) = CountTable::labels(i);
                    return Err(Error::DegenerateCell {
                        stratum,
                        group,
                        events: cell.events,
                        total: cell.total,
                    });
                }
                (cell.events as f64, cell.total as f64)
            }
            ZeroCellPolicy::HaldaneAnscombe => (cell.events as f64 + 0.5, cell.total as f64 + 1.0),
        };
        out[i] = (events / total, total);
    }
    Ok(out)
}

/// Risks `events / total` per cell.
pub fn from_counts(t: &CountTable, policy: ZeroCellPolicy) -> Result<StratifiedRisks> {
    let [a, b, c, d] = cell_estimates(t, policy)?;
    Ok(StratifiedRisks::new(
        RiskPair::strict(a.0, b.0)?,
        RiskPair::strict(c.0, d.0)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrrEstimate {
    pub log_rrr1: f64,
    pub log_rrr2: f64,
    /// `[[Var1, Cov], [Cov, Var2]]`
    pub covariance: [[f64; 2]; 2],
}

impl RrrEstimate {
    pub fn standard_errors(&self) -> (f64, f64) {
        (self.covariance[0][0].sqrt(), self.covariance[1][1].sqrt())
    }

    pub fn correlation(&self) -> f64 {
        let (s1, s2) = self.standard_errors();
        self.covariance[0][1] / (s1 * s2)
    }
}

/// Population log RRRs of strict strata.
pub fn log_rrr(s: &StratifiedRisks) -> (f64, f64) {
    let [p1, p2, p3, p4] = s.risks();
    let first = p2.ln() + p3.ln() - p1.ln() - p4.ln();
    let second = (-p1).ln_1p() + (-p4).ln_1p() - (-p2).ln_1p() - (-p3).ln_1p();
    (first, second)
}

pub fn estimate_rrr(t: &CountTable, policy: ZeroCellPolicy) -> Result<RrrEstimate> {
    let cells = cell_estimates(t, policy)?;
    let s = from_counts(t, policy)?;
    let (log_rrr1, log_rrr2) = log_rrr(&s);
    let (mut var1, mut var2, mut cov) = (0.0, 0.0, 0.0);
    for (p, n) in cells {
        var1 += (1.0 - p) / (n * p);
        var2 += p / (n * (1.0 - p));
        cov += 1.0 / n;
    }
    Ok(RrrEstimate {
        log_rrr1,
        log_rrr2,
        covariance: [[var1, cov], [cov, var2]],
    })
}

/// Which quadrant of the (RRR1, RRR2) plane the region lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadrantDirection {
    /// Both ratios above 1: RR and RR* both modify toward P.
    BothAbove,
    /// Both ratios below 1: RR and RR* both modify toward Q.
    BothBelow,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub reject: bool,
    pub direction: QuadrantDirection,
    /// Simultaneous intervals for `log_rrr1` and `log_rrr2`.
    pub region: [Interval; 2],
    pub alpha: f64,
    /// Bonferroni critical value `z_{1 - alpha/4}`.
    pub z: f64,
    pub estimate: RrrEstimate,
}

/// Critical value for a two-sided, two-interval Bonferroni rectangle.
pub fn bonferroni_z(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(1.0 - alpha / 4.0))
}

pub fn modification_test(
    t: &CountTable,
    alpha: f64,
    policy: ZeroCellPolicy,
) -> Result<TestVerdict> {
    let z = bonferroni_z(alpha)?;
    let estimate = estimate_rrr(t, policy)?;
    let (se1, se2) = estimate.standard_errors();
    let region = [
        Interval {
            lower: estimate.log_rrr1 - z * se1,
            upper: estimate.log_rrr1 + z * se1,
        },
        Interval {
            lower: estimate.log_rrr2 - z * se2,
            upper: estimate.log_rrr2 + z * se2,
        },
    ];
    let direction = if region.iter().all(|i| i.lower > 0.0) {
        QuadrantDirection::BothAbove
    } else if region.iter().all(|i| i.upper < 0.0) {
        QuadrantDirection::BothBelow
    } else {
        QuadrantDirection::None
    };
    Ok(TestVerdict {
        reject: direction != QuadrantDirection::None,
        direction,
        region,
        alpha,
        z,
        estimate,
    })
}
