//! Numerical Dirichlet problems for degenerate Beltrami equations with two
//! characteristics.
//!
//! The library solves
//!
//! ```text
//!     ∂f/∂z̄ = μ(z) ∂f/∂z + ν(z) conj(∂f/∂z)      in a Jordan domain D,
//!     Re f = φ on ∂D,   Im f(0) = 0,
//! ```
//!
//! where the measurable coefficient pair `(μ, ν)` may degenerate: the
//! dilatation `K(z) = (1 + |μ| + |ν|) / (1 − |μ| − |ν|)` need not be bounded.
//! Solutions are produced by a truncation ladder — the coefficients are cut
//! off where `K` exceeds a level `n`, each truncated (uniformly elliptic)
//! problem is solved by a coupled fixed point built from a principal-solution
//! step, a conformal re-mapping step, and a Schwarz-integral step, and the
//! ladder iterates are compared in the spherical metric.
//!
//! Alongside the solver, [`criteria`] audits a coefficient field against the
//! integral conditions (FMO/BMO oscillation bounds, Lehto-type divergence,
//! exponential integrability, Orlicz-type Φ conditions, modulus estimates)
//! that guarantee the ladder actually converges to a regular solution.
//!
//! # Crate layout
//!
//! * [`grid`] — square sample grids, complex/real fields, Wirtinger
//!   derivatives, field serialization.
//! * [`sphere`] — chordal metric on the Riemann sphere.
//! * [`coeff`] — coefficient pairs, dilatation, truncation ladders, built-in
//!   coefficient families.
//! * [`transforms`] — Cauchy and Beurling transforms, Schwarz integral,
//!   boundary data, analytic-function evaluation.
//! * [`conformal`] — Jordan boundaries and the geodesic zipper map onto the
//!   unit disk.
//! * [`beltrami`] — effective single coefficient, principal solutions,
//!   factorization of plane homeomorphisms through the disk.
//! * [`dirichlet`] — the boundary-value solver (bounded case and ladder),
//!   residuals, diagnostics, reports.
//! * [`criteria`] — solvability criteria battery.
//! * [`oracle`] — closed-form manufactured solutions and brute-force
//!   reference implementations used to validate the fast paths.
//!
//! Everything numeric is generic over the scalar type through [`Real`];
//! `f64` aliases for the main types are exported at the crate root.

pub mod beltrami;
pub mod coeff;
pub mod conformal;
pub mod criteria;
pub mod dirichlet;
pub mod grid;
pub mod oracle;
pub mod scalar;
pub mod sphere;
pub mod transforms;

pub use scalar::Real;

/// `f64` grid geometry.
pub type GridSpec64 = grid::GridSpec<f64>;
/// `f64` complex field.
pub type ComplexField64 = grid::ComplexField<f64>;
/// `f64` real field.
pub type RealField64 = grid::RealField<f64>;
/// `f64` domain mask.
pub type DomainMask64 = grid::DomainMask<f64>;
/// `f64` coefficient pair.
pub type CoefficientPair64 = coeff::CoefficientPair<f64>;
/// `f64` Jordan boundary.
pub type JordanBoundary64 = conformal::JordanBoundary<f64>;
/// `f64` disk map.
pub type DiskMap64 = conformal::DiskMap<f64>;
/// `f64` tabulated growth function.
pub type PhiCondition64 = criteria::PhiCondition<f64>;
/// `f64` Dirichlet problem.
pub type DirichletProblem64 = dirichlet::DirichletProblem<f64>;
/// `f64` solver parameters.
pub type SolveParams64 = dirichlet::SolveParams<f64>;

