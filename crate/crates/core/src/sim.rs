//! Synchronous consensus iteration `x(t+1) = W x(t)` over random starts.
//!
//! Each trial tracks the normalised distance to consensus
//! `e(t) = ‖x(t) − x̄·1‖ / ‖x(0) − x̄·1‖`; trials are aggregated by geometric
//! mean. All trials advance together as the columns of one dense matrix.

use nalgebra::DMatrix;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{assemble_full, WeightMatrix};
use crate::topology::SmhkParams;
use crate::weights::OrbitWeights;

const CONSTANT_TOL: f64 = 1e-14;

pub const INITIAL_DISTRIBUTION: &str = "uniform[0,1]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            iterations: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    /// Geometric mean of `e(t)` over usable trials, `t = 0..=iterations`.
    pub geo_mean: Vec<f64>,
    /// `e(iterations)` per trial; zero for constant starts.
    pub final_distance: Vec<f64>,
    /// Trials that entered the mean.
    pub usable_trials: usize,
}

impl TrajectoryStats {
    pub fn iterations(&self) -> usize {
        self.geo_mean.len() - 1
    }
}

pub fn simulate(
    params: &SmhkParams,
    weights: &OrbitWeights,
    cfg: &SimConfig,
) -> Result<TrajectoryStats> {
    let w = assemble_full(params, weights)?;
    let size = w.size();
    let columns: Vec<Vec<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            let unit = Uniform::new_inclusive(0.0, 1.0);
            (0..size).map(|_| unit.sample(&mut rng)).collect()
        })
        .collect();
    simulate_from(&w, &columns, cfg.iterations)
}

/// Runs the iteration from the given initial vectors.
pub fn simulate_from(
    w: &WeightMatrix,
    initials: &[Vec<f64>],
    iterations: usize,
) -> Result<TrajectoryStats> {
    let size = w.size();
    let trials = initials.len();
    let mut x = DMatrix::from_fn(size, trials, |r, c| initials[c][r]);

    let deviation_norms = |x: &DMatrix<f64>| -> Vec<f64> {
        x.column_iter()
            .map(|col| {
                let mean = col.mean();
                col.iter()
                    .map(|v| (v - mean) * (v - mean))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    };

    let initial = deviation_norms(&x);
    let usable: Vec<bool> = initial.iter().map(|&d| d >= CONSTANT_TOL).collect();
    let usable_trials = usable.iter().filter(|&&u| u).count();

    let mut log_sums = Vec::with_capacity(iterations + 1);
    let mut last = vec![0.0; trials];
    let record = |norms: &[f64], log_sums: &mut Vec<f64>, last: &mut Vec<f64>| {
        let mut sum = 0.0;
        for c in 0..trials {
            if usable[c] {
                let e = norms[c] / initial[c];
                sum += e.ln();
                last[c] = e;
            } else {
                last[c] = 0.0;
            }
        }
        log_sums.push(sum);
    };

    record(&initial, &mut log_sums, &mut last);
    let mut next = DMatrix::zeros(size, trials);
    for _ in 0..iterations {
        w.entries().mul_to(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        record(&deviation_norms(&x), &mut log_sums, &mut last);
    }

    let geo_mean = if usable_trials == 0 {
        vec![0.0; iterations + 1]
    } else {
        log_sums
            .iter()
            .map(|s| (s / usable_trials as f64).exp())
            .collect()
    };
    Ok(TrajectoryStats {
        geo_mean,
        final_distance: last,
        usable_trials,
    })
}

/// Per-step rate from a least-squares fit of `ln e(t)` over `window`
/// (half-open). `None` fits the last half of the run.
pub fn decay_rate(stats: &TrajectoryStats, window: Option<(usize, usize)>) -> Result<f64> {
    let len = stats.geo_mean.len();
    let (start, end) = window.unwrap_or((stats.iterations() / 2, len));
    if stats.usable_trials == 0 {
        return Err(Error::NoUsableTrials);
    }
    if start >= end || end > len || end - start < 2 {
        return Err(Error::BadWindow { start, end, len });
    }
    let mut points = Vec::with_capacity(end - start);
    for t in start..end {
        let e = stats.geo_mean[t];
        if e <= 0.0 {
            return Err(Error::ZeroDistance(t));
        }
        points.push((t as f64, e.ln()));
    }
    let count = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in &points {
        sxy += (t - mean_t) * (y - mean_y);
        sxx += (t - mean_t) * (t - mean_t);
    }
    Ok((sxy / sxx).exp())
}
