//! Time-symmetric quantum retrodiction for arbitrary sources.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: small dense complex matrices, Hermitian eigendecomposition,
//!   spectral functions such as `Ω^{1/2}` and `Ω^{-1/2}`, partial traces.
//! - [`ensembles`]: validated states, priors, POVMs and the source function.
//! - [`retrodiction`]: predictive/retrodictive probabilities and the
//!   source-dependent transform with its normalization and source identities.
//! - [`ud`]: the two-state unambiguous-discrimination example, its
//!   retrodictive basis and the optimal retrodictive (state-exclusion) dual.
//! - [`channel`]: the entangled prepare-and-measure channel, its swap symmetry
//!   and the no-signaling check.
//! - [`sim`]: seeded Monte Carlo sampling of the prepare-measure experiment.
//! - [`suites`]: grid and randomized property suites used by `retrodictor verify`.

pub mod channel;
pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod random;
pub mod retrodiction;
pub mod sim;
pub mod suites;
pub mod ud;

pub use error::{Error, Result};
