//! Effect-measure modification across two strata for six effect measures:
//! the relative risk (RR), the other relative risk (RR*), the two cumulative
//! hazard ratios (HR, HR*), the risk difference (RD) and the odds ratio (OR).
//!
//! The central fact used throughout: whenever RR and RR* modify in the same
//! direction (or either shows none), all six measures agree.

pub mod agreement;
pub mod cases;
pub mod cli;
pub mod error;
mod ext;
pub mod inference;
pub mod io;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;

pub use agreement::{
    agree, critical_p4, disagreement_window, modification_direction, rr_gate,
    sufficient_conditions, AgreementReport, Direction, KindSet, StratifiedRisks,
};
pub use error::{Error, Result};
pub use measures::{measure, measure_vector, MeasureKind, MeasureVector, RiskPair, Tolerance};
