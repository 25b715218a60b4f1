//! Monte Carlo estimates of how often each subset of the six measures agrees.
//!
//! Each trial draws two strata, classifies every measure as modifying toward
//! P, toward Q or neither, and records the pair of direction masks. Subset
//! counts are derived from that 4096-bin histogram after the run.
//!
//! Trials are split statically across `worker_count` threads. Worker `w` uses
//! a ChaCha8 generator seeded from `seed` on stream `w`, so results depend only
//! on `(seed, worker_count, distribution, trials)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agreement::{direction_masks, subset_agrees, KindSet};
use crate::error::{Error, Result};
use crate::measures::{measure_vector, MeasureKind, RiskPair, Tolerance};

/// How the four risks of a trial are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskDistribution {
    /// All four risks uniform on (0, 1).
    UniformUnit,
    /// All four risks uniform on (0, 0.1).
    UniformRare,
    /// Control risks uniform on (lower, upper); each exposed risk drawn from
    /// the tent on (lower, upper) peaked at its control risk.
    Tent { lower: f64, upper: f64 },
}

impl RiskDistribution {
    pub const RARE_UPPER: f64 = 0.1;

    fn validate(&self) -> Result<()> {
        if let RiskDistribution::Tent { lower, upper } = *self {
            if !(0.0 <= lower && lower < upper && upper <= 1.0) {
                return Err(Error::Config(format!(
                    "tent bounds must satisfy 0 <= L < U <= 1, got ({lower}, {upper})"
                )));
            }
        }
        Ok(())
    }

    fn sample_pair<R: Rng>(&self, rng: &mut R) -> Option<RiskPair> {
        let (control, exposed) = match *self {
            RiskDistribution::UniformUnit => (rng.random::<f64>(), rng.random::<f64>()),
            RiskDistribution::UniformRare => (
                Self::RARE_UPPER * rng.random::<f64>(),
                Self::RARE_UPPER * rng.random::<f64>(),
            ),
            RiskDistribution::Tent { lower, upper } => {
                let control = lower + (upper - lower) * rng.random::<f64>();
                if control <= lower || control >= upper {
                    return None;
                }
                let exposed = tent_quantile(rng.random::<f64>(), control, lower, upper);
                (control, exposed)
            }
        };
        RiskPair::strict(control, exposed).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub distribution: RiskDistribution,
    pub worker_count: usize,
}

impl SimulationConfig {
    pub const DEFAULT_TRIALS: u64 = 1_000_000;

    pub fn new(distribution: RiskDistribution, seed: u64) -> Self {
        SimulationConfig {
            trials: Self::DEFAULT_TRIALS,
            seed,
            distribution,
            worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_workers(mut self, worker_count: usize) -> Self {
        self.worker_count = worker_count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.worker_count == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        self.distribution.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub trials: u64,
    /// Agreement count for each of the 64 subsets, indexed by bitmask.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// Trials where RR and RR* agreed but the six measures did not.
    pub theorem_violations: u64,
    /// Draws discarded for landing on 0 or 1.
    pub redraws: u64,
}

impl SimulationResult {
    pub fn count(&self, subset: KindSet) -> u64 {
        self.counts[subset.bits() as usize]
    }

    pub fn frequency(&self, subset: KindSet) -> f64 {
        self.frequencies[subset.bits() as usize]
    }
}

const BINS: usize = 1 << 12;

struct Tally {
    histogram: Vec<u64>,
    redraws: u64,
}

fn run_worker(config: &SimulationConfig, worker: usize, trials: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(worker as u64);
    let mut histogram = vec![0u64; BINS];
    let mut redraws = 0u64;
    let tol = Tolerance::DIRECTION;
    for _ in 0..trials {
        let (p, q) = loop {
            let p = config.distribution.sample_pair(&mut rng);
            let q = config.distribution.sample_pair(&mut rng);
            match (p, q) {
                (Some(p), Some(q)) => break (p, q),
                _ => redraws += 1,
            }
        };
        let (Ok(mp), Ok(mq)) = (measure_vector(&p), measure_vector(&q)) else {
            unreachable!("strict pairs have every measure defined")
        };
        let (toward_p, toward_q) = direction_masks(&mp, &mq, tol);
        histogram[(usize::from(toward_p) << 6) | usize::from(toward_q)] += 1;
    }
    Tally { histogram, redraws }
}

pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let workers = config.worker_count as u64;
    let (share, extra) = (config.trials / workers, config.trials % workers);
    let tallies: Vec<Tally> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.worker_count)
            .map(|w| {
                let trials = share + u64::from((w as u64) < extra);
                scope.spawn(move || run_worker(config, w, trials))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });

    let mut histogram = vec![0u64; BINS];
    let mut redraws = 0;
    for tally in &tallies {
        for (total, n) in histogram.iter_mut().zip(&tally.histogram) {
            *total += n;
        }
        redraws += tally.redraws;
    }

    let gate = KindSet::of(&[MeasureKind::RelativeRisk, MeasureKind::OtherRelativeRisk]);
    let mut counts = vec![0u64; 64];
    let mut theorem_violations = 0;
    for (bin, &n) in histogram.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let (toward_p, toward_q) = ((bin >> 6) as u8, (bin & 0x3f) as u8);
        for subset in KindSet::all_subsets() {
            if subset_agrees(subset, toward_p, toward_q) {
                counts[subset.bits() as usize] += n;
            }
        }
        if subset_agrees(gate, toward_p, toward_q)
            && !subset_agrees(KindSet::ALL, toward_p, toward_q)
        {
            theorem_violations += n;
        }
    }
    let frequencies = counts
        .iter()
        .map(|&c| c as f64 / config.trials as f64)
        .collect();
    Ok(SimulationResult {
        config: *config,
        trials: config.trials,
        counts,
        frequencies,
        theorem_violations,
        redraws,
    })
}

fn check_tent(peak: f64, lower: f64, upper: f64) -> Result<()> {
    if !(lower < peak && peak < upper) {
        return Err(Error::Domain(format!(
            "tent peak {peak} must lie strictly inside ({lower}, {upper})"
        )));
    }
    Ok(())
}

fn tent_quantile(u: f64, peak: f64, lower: f64, upper: f64) -> f64 {
    let width = upper - lower;
    if u <= (peak - lower) / width {
        lower + (u * (peak - lower) * width).sqrt()
    } else {
        upper - ((1.0 - u) * (upper - peak) * width).sqrt()
    }
}

/// Inverse of the tent CDF on `bounds = (L, U)` with mode `peak`.
///
/// The CDF is `(x - L)^2 / ((peak - L)(U - L))` up to the peak and
/// `1 - (U - x)^2 / ((U - peak)(U - L))` above it, which reaches 1 at `U`.
pub fn tent_inverse_cdf(u: f64, peak: f64, bounds: (f64, f64)) -> Result<f64> {
    let (lower, upper) = bounds;
    check_tent(peak, lower, upper)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("u = {u} is not in [0, 1]")));
    }
    Ok(tent_quantile(u, peak, lower, upper))
}

pub fn tent_cdf(x: f64, peak: f64, bounds: (f64, f64)) -> Result<f64> {
    let (lower, upper) = bounds;
    check_tent(peak, lower, upper)?;
    let width = upper - lower;
    Ok(if x <= lower {
        0.0
    } else if x <= peak {
        (x - lower).powi(2) / ((peak - lower) * width)
    } else if x < upper {
        1.0 - (upper - x).powi(2) / ((upper - peak) * width)
    } else {
        1.0
    })
}

pub fn tent_density(x: f64, peak: f64, bounds: (f64, f64)) -> Result<f64> {
    let (lower, upper) = bounds;
    check_tent(peak, lower, upper)?;
    let width = upper - lower;
    Ok(if x < lower || x > upper {
        0.0
    } else if x <= peak {
        2.0 * (x - lower) / ((peak - lower) * width)
    } else {
        2.0 * (upper - x) / ((upper - peak) * width)
    })
}

/// Joint density of two strata under [`RiskDistribution::Tent`].
pub fn tent_joint_density(p: &RiskPair, q: &RiskPair, bounds: (f64, f64)) -> Result<f64> {
    let uniform = 1.0 / (bounds.1 - bounds.0);
    let dp = tent_density(p.exposed, p.control, bounds)?;
    let dq = tent_density(q.exposed, q.control, bounds)?;
    Ok(uniform * dp * uniform * dq)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VennRow {
    pub bitmask: u8,
    pub members: KindSet,
    pub count: u64,
    pub frequency: f64,
}

/// One row per subset, in bitmask order.
pub fn venn_table(result: &SimulationResult) -> Vec<VennRow> {
    KindSet::all_subsets()
        .map(|members| VennRow {
            bitmask: members.bits(),
            members,
            count: result.count(members),
            frequency: result.frequency(members),
        })
        .collect()
}

/// CSV with columns `bitmask,members,count,frequency`; members joined by `+`.
pub fn write_venn_csv<W: Write>(rows: &[VennRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer
        .write_record(["bitmask", "members", "count", "frequency"])
        .map_err(csv_err)?;
    for row in rows {
        writer
            .write_record([
                row.bitmask.to_string(),
                row.members.to_string(),
                row.count.to_string(),
                row.frequency.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}
