//! Numerical free probability for additively deformed unitarily invariant
//! random matrix models.
//!
//! The library computes the free additive convolution `mu ⊞ nu` of two
//! compactly supported probability measures through its subordination
//! functions, predicts which spiked eigenvalues of a deterministic
//! deformation generate outliers in the spectrum of `X = A + U* B U`
//! (`U` Haar unitary), and verifies those predictions with a built-in
//! Monte Carlo sampler and Hermitian eigensolver.
//!
//! The main entry points, by module:
//!
//! * [`measure`] — [`SpectralMeasure`]: atoms, grid densities, and the
//!   closed-form families (semicircle, Marchenko-Pastur, point mass,
//!   symmetric Bernoulli, empirical), together with their analytic
//!   transforms `G`, `F = 1/G`, `h = F - z`, and `R`.
//! * [`subordination`] — the subordination pair `(omega_1, omega_2)` of
//!   `mu ⊞ nu` via Denjoy-Wolff fixed-point iteration, plus the density,
//!   support, and boundary extension of `omega_1` on the real line.
//! * [`outlier`] — the spike equation `h_nu(h_mu(theta) + rho) = theta - rho`
//!   with its admissibility condition, the closed-form route through the
//!   R-transform for freely infinitely divisible `nu`, and the finite-rank
//!   (point-mass bulk) special case.
//! * [`rmt`] — Haar unitary sampling, the deformed model builder, a
//!   self-contained complex Hermitian eigensolver, the Monte Carlo
//!   verification harness, and the `det(M_N)` outlier diagnostic.

pub mod error;
pub mod measure;
pub mod outlier;
pub mod quadrature;
pub mod rmt;
pub mod roots;
pub mod subordination;

pub use error::{Error, Result};
pub use measure::{Family, MeasureSpec, SpectralMeasure, SupportSet};
pub use outlier::{OutlierPrediction, SpikeSet};
pub use rmt::{CMatrix, ModelInstance, SimulationReport};
pub use subordination::{BoundaryValue, DensityProfile, SubordinationPoint};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
