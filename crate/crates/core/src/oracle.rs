//! Numerical optimum of the orbit-restricted consensus problem.
//!
//! Minimises the SLEM over the `m + 1` orbit weights with a multi-start
//! Nelder–Mead search inside a box. Independent of the closed forms except
//! that one restart is seeded at the analytical solution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::spectral::{slem_blocks, stratify};
use crate::topology::SmhkParams;
use crate::weights::{analytical_weights, OrbitWeights};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub simplex_tol: f64,
    pub seed: u64,
    /// Per-coordinate `(lower, upper)`.
    pub search_box: Vec<(f64, f64)>,
}

impl OracleConfig {
    /// Defaults: 16 restarts, 2000 iterations, tolerance 1e−9,
    /// `w₀ ∈ [0, 2/(k(n−1))]` and `w_q ∈ [0, 1]`.
    pub fn for_params(params: &SmhkParams) -> Self {
        let mut search_box = vec![(0.0, 1.0); params.orbit_count()];
        search_box[0] = (0.0, 2.0 / (params.k() * (params.n() - 1)) as f64);
        Self {
            restarts: 16,
            max_iters: 2000,
            simplex_tol: 1e-9,
            seed: 0,
            search_box,
        }
    }

    fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.search_box)
            .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub weights: OrbitWeights,
    pub slem: f64,
    pub evaluations: usize,
    /// Best objective reached by each restart, in restart order.
    pub restart_best: Vec<f64>,
}

/// SLEM of the weight matrix built from `weights`, through the stratified
/// blocks.
pub fn objective(params: &SmhkParams, weights: &OrbitWeights) -> Result<f64> {
    slem_blocks(&stratify(params, weights)?)
}

struct RestartOutcome {
    x: Vec<f64>,
    f: f64,
    evaluations: usize,
}

pub fn optimize_weights(params: &SmhkParams, cfg: &OracleConfig) -> Result<OracleResult> {
    let dim = params.orbit_count();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.restarts.max(1));
    if let Ok(sol) = analytical_weights(params) {
        starts.push(cfg.clamp(sol.weights.as_slice()));
    }
    starts.push(
        cfg.search_box
            .iter()
            .map(|&(lo, hi)| 0.5 * (lo + hi))
            .collect(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < cfg.restarts.max(1) {
        starts.push(
            cfg.search_box
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect(),
        );
    }
    starts.truncate(cfg.restarts.max(1));

    let outcomes: Vec<RestartOutcome> = starts
        .par_iter()
        .map(|x0| nelder_mead(params, cfg, x0))
        .collect::<Result<_>>()?;

    let restart_best = outcomes.iter().map(|o| o.f).collect();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    // strict `<` keeps the lowest restart index on ties
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .expect("at least one restart");
    debug_assert_eq!(best.x.len(), dim);
    let weights = OrbitWeights::new(best.x)?;
    Ok(OracleResult {
        slem: objective(params, &weights)?,
        weights,
        evaluations,
        restart_best,
    })
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn nelder_mead(params: &SmhkParams, cfg: &OracleConfig, x0: &[f64]) -> Result<RestartOutcome> {
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| -> Result<(Vec<f64>, f64)> {
        evaluations += 1;
        let x = cfg.clamp(x);
        let f = objective(params, &OrbitWeights::new(x.clone())?)?;
        Ok((x, f))
    };

    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push(eval(x0)?);
    for (i, &(lo, hi)) in cfg.search_box.iter().enumerate() {
        let step = 0.05 * (hi - lo);
        let mut x = x0.to_vec();
        // step inwards when the start sits on the upper face
        x[i] = if x[i] + step <= hi {
            x[i] + step
        } else {
            x[i] - step
        };
        simplex.push(eval(&x)?);
    }

    for _ in 0..cfg.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < cfg.simplex_tol {
            break;
        }
        let worst = simplex[dim].clone();
        let centroid: Vec<f64> = (0..dim)
            .map(|c| simplex[..dim].iter().map(|(x, _)| x[c]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = eval(&toward(REFLECT))?;
        if reflected.1 < simplex[0].1 {
            let expanded = eval(&toward(EXPAND))?;
            simplex[dim] = if expanded.1 < reflected.1 {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if reflected.1 < simplex[dim - 1].1 {
            simplex[dim] = reflected;
            continue;
        }
        let contracted = if reflected.1 < worst.1 {
            eval(&toward(CONTRACT * REFLECT))?
        } else {
            eval(&toward(-CONTRACT))?
        };
        if contracted.1 < worst.1.min(reflected.1) {
            simplex[dim] = contracted;
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            *vertex = eval(&x)?;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Ok(RestartOutcome { x, f, evaluations })
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
