//! Deterministic quadrature for the probability that RR and RR* disagree
//! when p1..p4 are independent uniforms on (0, 1).
//!
//! For fixed (p1, p2, p3) the two relative risks disagree exactly when p4
//! falls between their critical values, so the probability is the integral
//! of the clamped window width over the unit cube. The planes p1 = p2 and
//! p1 = p3 split the cube into four regions; each is mapped affinely onto the
//! unit cube so the midpoint rule never straddles a region boundary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four open regions cut by the planes p1 = p2 and p1 = p3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// p1 < p2, p1 < p3
    A,
    /// p1 > p2, p1 < p3
    B,
    /// p1 < p2, p1 > p3
    C,
    /// p1 > p2, p1 > p3
    D,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::A, Region::B, Region::C, Region::D];

    /// Region containing `(p1, p2, p3)`, or `None` on a dividing plane.
    pub fn of(p1: f64, p2: f64, p3: f64) -> Option<Region> {
        if p1 == p2 || p1 == p3 {
            return None;
        }
        Some(match (p1 < p2, p1 < p3) {
            (true, true) => Region::A,
            (false, true) => Region::B,
            (true, false) => Region::C,
            (false, false) => Region::D,
        })
    }

    /// Maps `(t, u, v)` in the unit cube to `(p1, p2, p3)` in the region,
    /// returning the Jacobian as the fourth component.
    fn map(self, t: f64, u: f64, v: f64) -> (f64, f64, f64, f64) {
        let above = |x: f64| t + (1.0 - t) * x;
        let below = |x: f64| t * x;
        match self {
            Region::A => (t, above(u), above(v), (1.0 - t) * (1.0 - t)),
            Region::B => (t, below(u), above(v), t * (1.0 - t)),
            Region::C => (t, above(u), below(v), t * (1.0 - t)),
            Region::D => (t, below(u), below(v), t * t),
        }
    }
}

/// Width of the part of (0, 1) lying between the RR and RR* critical values
/// of p4; the conditional probability that the two relative risks disagree.
pub fn integrand(p1: f64, p2: f64, p3: f64) -> f64 {
    let rr = p2 * p3 / p1;
    let rr_star = 1.0 - (1.0 - p2) * (1.0 - p3) / (1.0 - p1);
    (rr.max(rr_star).min(1.0) - rr.min(rr_star).max(0.0)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum QuadratureSpec {
    /// Midpoint rule with `cells` cells per axis.
    MidpointGrid { cells: usize },
    /// Dyadic refinement of the midpoint grid until successive estimates
    /// differ by at most `tolerance`, stopping at `max_cells` per axis.
    Adaptive { tolerance: f64, max_cells: usize },
}

impl QuadratureSpec {
    pub const MIN_CELLS: usize = 8;
    pub const DEFAULT_CELLS: usize = 256;

    pub fn grid(cells: usize) -> Self {
        QuadratureSpec::MidpointGrid { cells }
    }

    fn validate(&self) -> Result<()> {
        let cells = match *self {
            QuadratureSpec::MidpointGrid { cells } => cells,
            QuadratureSpec::Adaptive {
                tolerance,
                max_cells,
            } => {
                if !(tolerance > 0.0 && tolerance.is_finite()) {
                    return Err(Error::Domain(format!(
                        "quadrature tolerance must be positive, got {tolerance}"
                    )));
                }
                max_cells
            }
        };
        if cells < Self::MIN_CELLS {
            return Err(Error::Resolution {
                got: cells,
                min: Self::MIN_CELLS,
            });
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::grid(Self::DEFAULT_CELLS)
    }
}

/// A quadrature estimate with the difference from the half-resolution grid
/// as its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub error: f64,
    /// Cells per axis of the final grid.
    pub resolution: usize,
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Midpoint rule on an `n`-cell-per-axis grid of the unit cube. Slices along
/// the first axis run in parallel; the reduction order is fixed.
fn midpoint<F>(n: usize, f: F) -> f64
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    let h = 1.0 / n as f64;
    let slices: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let rows: Vec<f64> = (0..n)
                .map(|j| {
                    let u = (j as f64 + 0.5) * h;
                    let row: Vec<f64> = (0..n).map(|k| f(t, u, (k as f64 + 0.5) * h)).collect();
                    pairwise_sum(&row)
                })
                .collect();
            pairwise_sum(&rows)
        })
        .collect();
    pairwise_sum(&slices) * h * h * h
}

fn estimate<F>(spec: QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    match spec {
        QuadratureSpec::MidpointGrid { cells } => {
            let fine = midpoint(cells, &f);
            let coarse = midpoint(cells / 2, &f);
            Ok(Estimate {
                estimate: fine,
                error: (fine - coarse).abs(),
                resolution: cells,
            })
        }
        QuadratureSpec::Adaptive {
            tolerance,
            max_cells,
        } => {
            let mut cells = QuadratureSpec::MIN_CELLS;
            let mut previous = midpoint(cells / 2, &f);
            loop {
                let current = midpoint(cells, &f);
                let error = (current - previous).abs();
                if error <= tolerance || cells * 2 > max_cells {
                    return Ok(Estimate {
                        estimate: current,
                        error,
                        resolution: cells,
                    });
                }
                previous = current;
                cells *= 2;
            }
        }
    }
}

/// Probability that p1..p4 land in `region` and RR, RR* disagree.
/// Each of the four regions contributes 1/24.
pub fn region_probability(region: Region, spec: QuadratureSpec) -> Result<Estimate> {
    estimate(spec, |t, u, v| {
        let (p1, p2, p3, jacobian) = region.map(t, u, v);
        integrand(p1, p2, p3) * jacobian
    })
}

/// Sum of the four regions: the overall disagreement probability, 1/6.
pub fn total_probability(spec: QuadratureSpec) -> Result<Estimate> {
    let parts = Region::ALL
        .iter()
        .map(|&r| region_probability(r, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate {
        estimate: parts.iter().map(|e| e.estimate).sum(),
        error: parts.iter().map(|e| e.error).sum(),
        resolution: parts.iter().map(|e| e.resolution).min().unwrap_or(0),
    })
}

/// Region A split at p3 = p1 / p2, where the RR critical value reaches 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionAParts {
    /// Integral of `p2 p3 / p1` for `p1 < p3 < p1 / p2`; 1/16.
    pub part1: Estimate,
    /// Volume where `p3 > p1 / p2`; 1/4.
    pub part2: Estimate,
    /// Integral of the RR* critical value over region A; 13/48.
    pub part3: Estimate,
}

impl RegionAParts {
    pub fn combined(&self) -> f64 {
        self.part1.estimate + self.part2.estimate - self.part3.estimate
    }

    pub fn combined_error(&self) -> f64 {
        self.part1.error + self.part2.error + self.part3.error
    }
}

pub fn region_a_parts(spec: QuadratureSpec) -> Result<RegionAParts> {
    let part1 = estimate(spec, |t, u, w| {
        let p2 = t + (1.0 - t) * u;
        let span = t / p2 - t;
        let p3 = t + span * w;
        p2 * p3 / t * (1.0 - t) * span
    })?;
    let part2 = estimate(spec, |t, u, _| {
        let p2 = t + (1.0 - t) * u;
        (1.0 - t) * (1.0 - t / p2)
    })?;
    let part3 = estimate(spec, |t, u, v| {
        let (p1, p2, p3, jacobian) = Region::A.map(t, u, v);
        (1.0 - (1.0 - p2) * (1.0 - p3) / (1.0 - p1)) * jacobian
    })?;
    Ok(RegionAParts {
        part1,
        part2,
        part3,
    })
}
