//! Closed-form optimal orbit weights.
//!
//! With `s = cos θ` the optimal weights are
//!
//! ```text
//! w_q = 1/2                                        q = 2..m
//! w_1 = sin(mθ)·(s·b − a) / (b·sin((m−1)θ) − (L+1)·a·sin(mθ))
//! w_0 = (a − s·b) / (k·√(n(n−1))·a)
//! ```
//!
//! where `a = √n + √(n−1)` and `b = √n − √(n−1)`, and θ is a root of
//!
//! ```text
//! R(θ) = (1 − cos θ)·F(θ) + √((n−1)/n)·(1 − H·cos θ)·(√L·sin(mθ)/sin θ − F(θ))
//! F(θ) = ((1+L)/√L + (cos θ − 1)/(√L·w_1))·sin(mθ)/sin θ − sin((m−1)θ)/(√L·sin θ)
//! ```
//!
//! with `H = b/a`. `F(θ)` is the centre coefficient of the dual eigenvector of
//! the `W₂` block, normalised so that the leaf coefficient is one. Its
//! commonly quoted form drops the `√L` under `w_1`; that variant is kept as
//! [`ClosedForm::AsPrinted`] and is only consistent with the assembled spectrum
//! when `L = 1`.
//!
//! Which root of `R` is the SLEM is decided by assembling the full weight
//! matrix and comparing its SLEM with `cos θ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{assemble_full, slem_full};
use crate::topology::SmhkParams;

const SCAN_INTERVALS: usize = 4096;
const SCAN_MARGIN: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-14;

/// The `m + 1` orbit weights: `w[0]` on core edges, `w[q]` on branch edges at
/// depth `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrbitWeights(Vec<f64>);

impl OrbitWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteWeight { index });
        }
        Ok(Self(weights))
    }

    /// Weights sized for `params`.
    pub fn for_params(params: &SmhkParams, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != params.orbit_count() {
            return Err(Error::WeightLength {
                expected: params.orbit_count(),
                actual: weights.len(),
            });
        }
        Self::new(weights)
    }

    pub fn zeros(params: &SmhkParams) -> Self {
        Self(vec![0.0; params.orbit_count()])
    }

    pub fn core(&self) -> f64 {
        self.0[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn check_len(&self, params: &SmhkParams) -> Result<()> {
        if self.0.len() == params.orbit_count() {
            Ok(())
        } else {
            Err(Error::WeightLength {
                expected: params.orbit_count(),
                actual: self.0.len(),
            })
        }
    }
}

impl std::ops::Index<usize> for OrbitWeights {
    type Output = f64;

    fn index(&self, q: usize) -> &f64 {
        &self.0[q]
    }
}

/// Which form of `F(θ)` enters the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedForm {
    /// `(cos θ − 1)/(√L·w_1)`, consistent with the assembled spectrum.
    #[default]
    Corrected,
    /// `(cos θ − 1)/w_1`, the widely reproduced form without the `√L`.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticalSolution {
    pub params: SmhkParams,
    pub weights: OrbitWeights,
    pub theta: f64,
    pub slem: f64,
    pub residual: f64,
}

struct Core {
    a: f64,
    b: f64,
}

fn core_terms(n: usize) -> Core {
    let (sn, sn1) = ((n as f64).sqrt(), ((n - 1) as f64).sqrt());
    Core {
        a: sn + sn1,
        b: sn - sn1,
    }
}

pub fn eval_w1(params: &SmhkParams, theta: f64) -> Result<f64> {
    let Core { a, b } = core_terms(params.n());
    let m = params.m() as f64;
    let l = params.l() as f64;
    let s = theta.cos();
    let sin_m = (m * theta).sin();
    let num = s * b * sin_m - a * sin_m;
    let den = b * ((m - 1.0) * theta).sin() - (l + 1.0) * a * sin_m;
    if den.abs() < SINGULAR_TOL {
        return Err(Error::Singular { what: "w1", theta });
    }
    Ok(num / den)
}

pub fn eval_f(params: &SmhkParams, theta: f64) -> Result<f64> {
    eval_f_with(params, theta, ClosedForm::default())
}

pub fn eval_f_with(params: &SmhkParams, theta: f64, form: ClosedForm) -> Result<f64> {
    let w1 = eval_w1(params, theta)?;
    let sin_t = theta.sin();
    if w1 == 0.0 || sin_t.abs() < SINGULAR_TOL {
        return Err(Error::Singular { what: "F", theta });
    }
    let m = params.m() as f64;
    let sqrt_l = (params.l() as f64).sqrt();
    let coupling = match form {
        ClosedForm::Corrected => (theta.cos() - 1.0) / (sqrt_l * w1),
        ClosedForm::AsPrinted => (theta.cos() - 1.0) / w1,
    };
    Ok(
        ((1.0 + params.l() as f64) / sqrt_l + coupling) * (m * theta).sin() / sin_t
            - ((m - 1.0) * theta).sin() / (sqrt_l * sin_t),
    )
}

pub fn eval_w0(params: &SmhkParams, s: f64) -> f64 {
    let Core { a, b } = core_terms(params.n());
    let n = params.n() as f64;
    (a - s * b) / (params.k() as f64 * (n * (n - 1.0)).sqrt() * a)
}

pub fn eval_residual(params: &SmhkParams, theta: f64) -> Result<f64> {
    eval_residual_with(params, theta, ClosedForm::default())
}

pub fn eval_residual_with(params: &SmhkParams, theta: f64, form: ClosedForm) -> Result<f64> {
    let f = eval_f_with(params, theta, form)?;
    let Core { a, b } = core_terms(params.n());
    let n = params.n() as f64;
    let h = b / a;
    let s = theta.cos();
    let m = params.m() as f64;
    let sqrt_l = (params.l() as f64).sqrt();
    let leaf_term = sqrt_l * (m * theta).sin() / theta.sin();
    Ok((1.0 - s) * f + ((n - 1.0) / n).sqrt() * (1.0 - h * s) * (leaf_term - f))
}

/// Weight vector for a candidate angle.
pub fn weights_at(params: &SmhkParams, theta: f64) -> Result<OrbitWeights> {
    let mut w = vec![0.5; params.orbit_count()];
    w[0] = eval_w0(params, theta.cos());
    w[1] = eval_w1(params, theta)?;
    OrbitWeights::new(w)
}

/// Roots of the residual on `(0, π)`, in increasing order.
pub fn residual_roots(params: &SmhkParams, form: ClosedForm) -> Vec<f64> {
    let eval = |t: f64| {
        eval_residual_with(params, t, form)
            .ok()
            .filter(|r| r.is_finite())
    };
    let lo = SCAN_MARGIN;
    let step = (PI - 2.0 * SCAN_MARGIN) / SCAN_INTERVALS as f64;
    let grid: Vec<(f64, Option<f64>)> = (0..=SCAN_INTERVALS)
        .map(|i| {
            let t = if i == SCAN_INTERVALS {
                PI - SCAN_MARGIN
            } else {
                lo + i as f64 * step
            };
            (t, eval(t))
        })
        .collect();

    let mut roots = Vec::new();
    for pair in grid.windows(2) {
        let ((t0, Some(r0)), (t1, Some(r1))) = (pair[0], pair[1]) else {
            continue;
        };
        if r0 == 0.0 {
            roots.push(t0);
            continue;
        }
        if r0.signum() == r1.signum() {
            continue;
        }
        if let Some(root) = bisect(&eval, t0, r0, t1) {
            roots.push(root);
        }
    }
    roots.dedup();
    roots
}

/// Bisection down to adjacent floats. Brackets that straddle a pole rather
/// than a root are dropped by the final residual check.
fn bisect(
    eval: &impl Fn(f64) -> Option<f64>,
    mut lo: f64,
    mut r_lo: f64,
    mut hi: f64,
) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r_mid = eval(mid)?;
        if r_mid == 0.0 {
            return Some(mid);
        }
        if r_mid.signum() == r_lo.signum() {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    let r_hi = eval(hi)?;
    let (best, r_best) = if r_lo.abs() <= r_hi.abs() {
        (lo, r_lo)
    } else {
        (hi, r_hi)
    };
    (r_best.abs() <= RESIDUAL_TOL).then_some(best)
}

pub fn solve_theta(params: &SmhkParams) -> Result<AnalyticalSolution> {
    solve_theta_with(params, ClosedForm::default())
}

/// Scans for residual roots and returns the first, in increasing θ, whose
/// assembled weight matrix has SLEM equal to `cos θ`.
pub fn solve_theta_with(params: &SmhkParams, form: ClosedForm) -> Result<AnalyticalSolution> {
    let roots = residual_roots(params, form);
    if roots.is_empty() {
        return Err(Error::NoRoot);
    }
    let mut closest: Option<(f64, f64)> = None;
    for &theta in &roots {
        let Ok(weights) = weights_at(params, theta) else {
            continue;
        };
        let Ok(residual) = eval_residual_with(params, theta, form) else {
            continue;
        };
        let slem = slem_full(&assemble_full(params, &weights)?)?.slem;
        let s = theta.cos();
        if (slem - s).abs() <= CONSISTENCY_TOL && s > 0.0 && s < 1.0 {
            return Ok(AnalyticalSolution {
                params: *params,
                weights,
                theta,
                slem: s,
                residual,
            });
        }
        if closest.map_or(true, |(c, sl)| (slem - s).abs() < (sl - c).abs()) {
            closest = Some((s, slem));
        }
    }
    let (cos_theta, slem) = closest.unwrap_or((f64::NAN, f64::NAN));
    Err(Error::Inconsistent {
        candidates: roots.len(),
        cos_theta,
        slem,
    })
}

/// Optimal weights, θ and SLEM for `params`.
pub fn analytical_weights(params: &SmhkParams) -> Result<AnalyticalSolution> {
    solve_theta(params)
}
