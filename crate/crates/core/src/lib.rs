//! Optimal consensus weights for star-mesh hybrid networks with a K-partite
//! core: closed-form weights, symmetry-stratified spectra, a numerical
//! optimisation oracle and a consensus-iteration simulator.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod sim;
pub mod spectral;
pub mod topology;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use topology::SmhkParams;
pub use weights::{AnalyticalSolution, OrbitWeights};
