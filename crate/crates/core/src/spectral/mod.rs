//! Weight-matrix assembly, stratified blocks and SLEM.
//!
//! The symmetry group (permuting sets, stars inside a set, and branches inside
//! a star) splits the weight matrix into four tridiagonal blocks:
//!
//! | block | size      | sector                                  | multiplicity |
//! |-------|-----------|-----------------------------------------|--------------|
//! | `W₁`  | `m+1`     | fully symmetric                          | `1`          |
//! | `W₂`  | `m+1`     | non-trivial character over stars          | `n(k−1)`     |
//! | `W₃`  | `m+1`     | trivial over stars, non-trivial over sets | `n−1`        |
//! | `W₄`  | `m`       | non-trivial character over branches       | `nk(L−1)`    |
//!
//! The core block `(J_n − I_n) ⊗ J_k` has eigenvalue `k(n−1)` on the
//! symmetric vector, `0` on every vector summing to zero within each set and
//! `−k` on the remaining `n−1` directions, which fixes the multiplicities.

mod jacobi;

use nalgebra::DMatrix;

pub use jacobi::{eig_symmetric, eigenvalues_symmetric, SymmetricEigen};

use crate::error::Result;
use crate::topology::{indexed_edges, node_id, SmhkParams};
use crate::weights::OrbitWeights;

const PERRON_GAP: f64 = 1e-10;

/// Dense symmetric consensus weight matrix of an SMHK network.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    params: SmhkParams,
    entries: DMatrix<f64>,
}

impl WeightMatrix {
    pub fn params(&self) -> &SmhkParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|row| (row.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }
}

pub fn assemble_full(params: &SmhkParams, weights: &OrbitWeights) -> Result<WeightMatrix> {
    weights.check_len(params)?;
    let size = params.node_count();
    let (n, k, m, l) = (params.n(), params.k(), params.m(), params.l());
    let w = weights.as_slice();
    let mut entries = DMatrix::zeros(size, size);

    for idx in 0..size {
        let id = node_id(params, idx)?;
        entries[(idx, idx)] = match id.q {
            0 => 1.0 - (k * (n - 1)) as f64 * w[0] - l as f64 * w[1],
            q if q < m => 1.0 - w[q] - w[q + 1],
            _ => 1.0 - w[m],
        };
    }
    for (u, v, orbit) in indexed_edges(params) {
        entries[(u, v)] = w[orbit];
        entries[(v, u)] = w[orbit];
    }
    Ok(WeightMatrix {
        params: *params,
        entries,
    })
}

/// How often each block's spectrum occurs in the full spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Multiplicities {
    pub w1: usize,
    pub w2: usize,
    pub w3: usize,
    pub w4: usize,
}

impl Multiplicities {
    pub fn for_params(params: &SmhkParams) -> Self {
        let (n, k, l) = (params.n(), params.k(), params.l());
        Self {
            w1: 1,
            w2: n * (k - 1),
            w3: n - 1,
            w4: n * k * (l - 1),
        }
    }

    /// Total dimension covered, `(m+1)(w1+w2+w3) + m·w4`.
    pub fn dimension(&self, m: usize) -> usize {
        (m + 1) * (self.w1 + self.w2 + self.w3) + m * self.w4
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSet {
    pub w1: DMatrix<f64>,
    pub w2: DMatrix<f64>,
    pub w3: DMatrix<f64>,
    pub w4: DMatrix<f64>,
    pub mult: Multiplicities,
}

pub fn stratify(params: &SmhkParams, weights: &OrbitWeights) -> Result<BlockSet> {
    weights.check_len(params)?;
    let (n, k, m, l) = (params.n(), params.k(), params.m(), params.l());
    let w = weights.as_slice();
    let dim = m + 1;

    let mut w1 = DMatrix::zeros(dim, dim);
    w1[(0, 0)] = 1.0 - l as f64 * w[1];
    for q in 1..=m {
        w1[(q, q)] = if q < m {
            1.0 - w[q] - w[q + 1]
        } else {
            1.0 - w[m]
        };
    }
    let bridge = (l as f64).sqrt() * w[1];
    w1[(0, 1)] = bridge;
    w1[(1, 0)] = bridge;
    for q in 2..=m {
        w1[(q - 1, q)] = w[q];
        w1[(q, q - 1)] = w[q];
    }

    let mut w2 = w1.clone();
    w2[(0, 0)] -= (k * (n - 1)) as f64 * w[0];
    let mut w3 = w1.clone();
    w3[(0, 0)] -= (k * n) as f64 * w[0];
    let w4 = w1.view((1, 1), (m, m)).into_owned();

    Ok(BlockSet {
        w1,
        w2,
        w3,
        w4,
        mult: Multiplicities::for_params(params),
    })
}

/// Eigenvalues of each block, each sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectra {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
    pub w4: Vec<f64>,
    pub mult: Multiplicities,
}

impl BlockSet {
    pub fn spectra(&self) -> Result<BlockSpectra> {
        Ok(BlockSpectra {
            w1: eigenvalues_symmetric(&self.w1)?,
            w2: eigenvalues_symmetric(&self.w2)?,
            w3: eigenvalues_symmetric(&self.w3)?,
            w4: eigenvalues_symmetric(&self.w4)?,
            mult: self.mult,
        })
    }
}

impl BlockSpectra {
    /// The full spectrum rebuilt from the blocks with `mult`, sorted descending.
    pub fn union_with(&self, mult: Multiplicities) -> Vec<f64> {
        let mut all = Vec::new();
        for (vals, times) in [
            (&self.w1, mult.w1),
            (&self.w2, mult.w2),
            (&self.w3, mult.w3),
            (&self.w4, mult.w4),
        ] {
            for _ in 0..times {
                all.extend_from_slice(vals);
            }
        }
        all.sort_by(|x, y| y.total_cmp(x));
        all
    }

    pub fn union(&self) -> Vec<f64> {
        self.union_with(self.mult)
    }

    /// SLEM of the union after removing one copy of `λ₁(W₁)`.
    pub fn slem(&self) -> f64 {
        let mut rest: Vec<f64> = self.w1[1..].to_vec();
        for (vals, times) in [
            (&self.w2, self.mult.w2),
            (&self.w3, self.mult.w3),
            (&self.w4, self.mult.w4),
        ] {
            if times > 0 {
                rest.extend_from_slice(vals);
            }
        }
        let hi = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = rest.iter().copied().fold(f64::INFINITY, f64::min);
        hi.max(-lo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    pub slem: f64,
    /// `λ₁ − λ₂ > 1e−10`.
    pub perron_simple: bool,
}

impl SpectralResult {
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Self {
        let len = eigenvalues.len();
        let (slem, perron_simple) = if len < 2 {
            (0.0, true)
        } else {
            (
                eigenvalues[1].max(-eigenvalues[len - 1]),
                eigenvalues[0] - eigenvalues[1] > PERRON_GAP,
            )
        };
        Self {
            eigenvalues,
            slem,
            perron_simple,
        }
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

pub fn slem_full(w: &WeightMatrix) -> Result<SpectralResult> {
    slem_of_matrix(w.entries())
}

/// SLEM of any symmetric matrix, `max(λ₂, −λ_min)`.
pub fn slem_of_matrix(a: &DMatrix<f64>) -> Result<SpectralResult> {
    Ok(SpectralResult::from_eigenvalues(eigenvalues_symmetric(a)?))
}

pub fn slem_blocks(blocks: &BlockSet) -> Result<f64> {
    Ok(blocks.spectra()?.slem())
}

const CHAIN_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub checks: Vec<InequalityCheck>,
}

impl InterlacingReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Interlacing chains between the block spectra:
/// `λ_min(W₃) ≤ λ_min(W₂) ≤ λ_min(W₁) ≤ λ_min(W₄)` and
/// `λ₁(W₄) ≤ λ₁(W₃) ≤ λ₁(W₂) ≤ λ₁(W₁) = 1`.
pub fn check_interlacing(blocks: &BlockSet) -> Result<InterlacingReport> {
    let s = blocks.spectra()?;
    let min = |v: &[f64]| *v.last().expect("non-empty block");
    let le = |name, lhs: f64, rhs: f64| InequalityCheck {
        name,
        lhs,
        rhs,
        pass: lhs <= rhs + CHAIN_SLACK,
    };
    let checks = vec![
        le("min(W3) <= min(W2)", min(&s.w3), min(&s.w2)),
        le("min(W2) <= min(W1)", min(&s.w2), min(&s.w1)),
        le("min(W1) <= min(W4)", min(&s.w1), min(&s.w4)),
        le("max(W4) <= max(W3)", s.w4[0], s.w3[0]),
        le("max(W3) <= max(W2)", s.w3[0], s.w2[0]),
        le("max(W2) <= max(W1)", s.w2[0], s.w1[0]),
        InequalityCheck {
            name: "max(W1) == 1",
            lhs: s.w1[0],
            rhs: 1.0,
            pass: (s.w1[0] - 1.0).abs() <= CHAIN_SLACK,
        },
    ];
    Ok(InterlacingReport { checks })
}

/// Largest elementwise gap between two sorted spectra; infinite on length
/// mismatch.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
