//! Numerical operator algebra for ladder pairs that annihilate nothing.
//!
//! Strictly increasing, sign-indefinite energy ladders (the shifted graphene
//! Dirac-point spectrum being the worked example) admit no factorization
//! H = X†X, but they do factor as H = b a for a lowering/raising pair with
//! no vacuum on either side. Folding the basis into a doubled space restores
//! a vacuum for a block lowering operator, and with it the whole
//! coherent-state toolbox: eigenstates of the lowering operator,
//! normalization series, uncertainty products, moment problems, and
//! resolutions of the identity.
//!
//! Module map:
//!
//! - [`spectra`]: eigenvalue sequences, shifts, finite deformations.
//! - [`ladder`]: the pair (a, b), adjoints, factorization residuals, banded
//!   matrices on finite windows.
//! - [`doubled`]: the folded family Φ_k, projectors, the block lowering
//!   operator and its θ weights, the √k rescaling.
//! - [`coherent`]: states Φ(z), convergence radii, measures, quadrature
//!   verification of moments and the resolution of identity.
//! - [`graphene`]: the concrete spectrum, the three factorization choices,
//!   and a dense finite Fock-space oracle that cross-checks all of it.
//! - [`report`]: the acceptance checklist driven by the CLI.
//!
//! Everything is immutable after construction and safe to evaluate from any
//! number of threads; reductions use a fixed summation order so results are
//! reproducible bit-for-bit on a platform.

pub mod coherent;
pub mod doubled;
pub mod error;
pub mod graphene;
pub mod ladder;
pub mod quad;
pub mod report;
pub mod spectra;
pub mod util;

pub use error::{Error, Result};
