//! Invariant checks for one network order, shared by the `verify` command and
//! the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::oracle::{optimize_weights, OracleConfig};
use crate::spectral::{
    assemble_full, check_interlacing, slem_blocks, slem_full, spectrum_distance, stratify,
};
use crate::topology::{adjacency, SmhkParams};
use crate::weights::{analytical_weights, OrbitWeights};

pub const ROW_SUM_TOL: f64 = 1e-12;
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const BLOCK_SLEM_TOL: f64 = 1e-10;
pub const CONSISTENCY_TOL: f64 = 1e-8;
pub const SLACKNESS_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-5;
pub const INTERIOR_TOL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub oracle: bool,
    /// Added to the analytical `w₀` before the optimum-specific checks.
    pub perturb_w0: f64,
    /// Random weight vectors drawn from `[0,1]^(m+1)` for the weight-agnostic
    /// checks.
    pub random_weights: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            oracle: false,
            perturb_w0: 0.0,
            random_weights: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub params: SmhkParams,
    pub slem: Option<f64>,
    pub checks: Vec<Check>,
}

impl CellReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &'static str, pass: bool, detail: String) {
        self.0.push(Check { name, pass, detail });
    }

    fn within(&mut self, name: &'static str, gap: f64, tol: f64) {
        self.push(name, gap <= tol, format!("gap {gap:.3e} (tol {tol:.0e})"));
    }
}

/// Checks that hold for any weights: row sums, symmetry, sparsity, spectrum
/// union, block SLEM and both interlacing chains.
fn structural(params: &SmhkParams, w: &OrbitWeights, checks: &mut Checks) -> Result<()> {
    let mat = assemble_full(params, w)?;
    checks.within("row_sums", mat.max_row_sum_error(), ROW_SUM_TOL);
    checks.within("symmetry", mat.max_asymmetry(), 0.0);

    let adj = adjacency(params);
    let mut stray = 0usize;
    for u in 0..mat.size() {
        for v in 0..mat.size() {
            if u != v && !adj[u][v] && mat.entries()[(u, v)] != 0.0 {
                stray += 1;
            }
        }
    }
    checks.push(
        "sparsity",
        stray == 0,
        format!("{stray} off-pattern entries"),
    );

    let full = slem_full(&mat)?;
    let blocks = stratify(params, w)?;
    let union = blocks.spectra()?.union();
    checks.within(
        "spectrum_union",
        spectrum_distance(&full.eigenvalues, &union),
        SPECTRUM_TOL,
    );
    checks.within(
        "slem_blocks",
        (slem_blocks(&blocks)? - full.slem).abs(),
        BLOCK_SLEM_TOL,
    );
    let chains = check_interlacing(&blocks)?;
    let failed: Vec<&str> = chains
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect();
    checks.push(
        "interlacing",
        failed.is_empty(),
        if failed.is_empty() {
            "all chains hold".into()
        } else {
            failed.join("; ")
        },
    );
    Ok(())
}

pub fn verify_params(params: &SmhkParams, opts: &VerifyOptions) -> CellReport {
    let mut checks = Checks(Vec::new());
    let slem = match run(params, opts, &mut checks) {
        Ok(slem) => Some(slem),
        Err(e) => {
            checks.push("solver", false, e.to_string());
            None
        }
    };
    CellReport {
        params: *params,
        slem,
        checks: checks.0,
    }
}

fn run(params: &SmhkParams, opts: &VerifyOptions, checks: &mut Checks) -> Result<f64> {
    let sol = analytical_weights(params)?;
    checks.within("residual", sol.residual.abs(), RESIDUAL_TOL);

    let mut w = sol.weights.clone().into_vec();
    w[0] += opts.perturb_w0;
    let weights = OrbitWeights::new(w)?;
    structural(params, &weights, checks)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_weights {
        let random = OrbitWeights::new(
            (0..params.orbit_count())
                .map(|_| rng.gen_range(0.0..=1.0))
                .collect(),
        )?;
        structural(params, &random, checks)?;
    }

    let s = sol.slem;
    let full = slem_full(&assemble_full(params, &weights)?)?;
    checks.within(
        "cos_theta_consistency",
        (full.slem - s).abs(),
        CONSISTENCY_TOL,
    );
    checks.push(
        "perron_simple",
        full.perron_simple && full.slem < 1.0,
        format!(
            "lambda2 = {:.6}, slem = {:.6}",
            full.eigenvalues[1], full.slem
        ),
    );
    let spectra = stratify(params, &weights)?.spectra()?;
    checks.within("slackness_w2", (spectra.w2[0] - s).abs(), SLACKNESS_TOL);
    let min_w3 = *spectra.w3.last().expect("non-empty block");
    checks.within("slackness_w3", (min_w3 + s).abs(), SLACKNESS_TOL);

    if opts.oracle {
        let mut cfg = OracleConfig::for_params(params);
        cfg.seed = opts.seed;
        let found = optimize_weights(params, &cfg)?;
        checks.push(
            "oracle_optimality",
            found.slem >= s - ORACLE_TOL,
            format!("oracle {:.10} vs analytical {:.10}", found.slem, s),
        );
        let worst = found.weights.as_slice()[2.min(found.weights.len())..]
            .iter()
            .map(|w| (w - 0.5).abs())
            .fold(0.0, f64::max);
        checks.within("oracle_interior_half", worst, INTERIOR_TOL);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_instance_passes() {
        let params = SmhkParams::new(3, 2, 2, 3).unwrap();
        let report = verify_params(&params, &VerifyOptions::default());
        assert!(report.all_pass(), "{report:#?}");
    }

    #[test]
    fn perturbed_core_weight_breaks_consistency() {
        let params = SmhkParams::new(3, 2, 2, 3).unwrap();
        let opts = VerifyOptions {
            perturb_w0: 0.1,
            ..VerifyOptions::default()
        };
        let report = verify_params(&params, &opts);
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert!(failed.contains(&"cos_theta_consistency"), "{failed:?}");
        // the weight-agnostic checks still hold
        assert!(!failed.contains(&"spectrum_union"));
        assert!(!failed.contains(&"interlacing"));
    }

    #[test]
    fn oracle_checks_run() {
        let params = SmhkParams::new(2, 2, 2, 2).unwrap();
        let opts = VerifyOptions {
            oracle: true,
            ..VerifyOptions::default()
        };
        let report = verify_params(&params, &opts);
        assert!(report.checks.iter().any(|c| c.name == "oracle_optimality"));
        assert!(report.all_pass(), "{report:#?}");
    }
}
