//! Boundary-value solver for the two-characteristic equation: a truncation
//! ladder wrapped around a damped fixed-point iteration that couples the
//! analytic factor `A` to the disk factorization `h`.
//!
//! One outer sweep at a fixed truncation level does, in order: fold the pair
//! into the single coefficient `μ̃` from the current `(A, h)`; solve the
//! principal equation for `G`; factor `G` through the unit disk to refresh
//! `h`; pull the boundary datum to the circle along the vertex-angle
//! correspondence of the disk map and take its Schwarz integral to refresh
//! `A`. Updates are under-relaxed by `rho`. The sweep is a deterministic
//! function of `μ̃`, so the loop stops when the sup-change of `μ̃` between
//! consecutive sweeps drops to `tol_outer`; for `ν ≡ 0` the coefficient is
//! stationary immediately and a single sweep suffices. The returned pair is
//! the last computed (un-relaxed) candidate, so `f = A∘h` is always an exact
//! composition.
//!
//! The ladder replays the sweep at each truncation level, warm-starting `A`,
//! `h`, and the Neumann density from the level below, and records the
//! spherical sup-distance between consecutive `h` fields. Non-convergence —
//! of the outer loop or of the ladder — is reported, never raised.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::beltrami::{
    disk_homeomorphism, effective_coefficient_from_parts, principal_solution_with_start,
    BeltramiError, DiskFactorization, EffectiveCoefficient,
};
use crate::coeff::{CoeffError, CoefficientPair, TruncationLadder};
use crate::conformal::{ConformalError, JordanBoundary};
use crate::criteria::CriteriaReport;
use crate::grid::{wirtinger_derivatives, ComplexField, DomainMask};
use crate::scalar::Real;
use crate::sphere::spherical_distance_finite;
use crate::transforms::{
    schwarz_integral, AnalyticFunction, BoundaryCurve, BoundaryFunction, TransformError,
};

/// Largest fraction of masked nodes that may carry an infinite dilatation
/// before the problem is rejected as not grid-integrable. Isolated degenerate
/// nodes stand for measure-zero singularities; a cluster of this relative
/// size cannot.
const DEGENERATE_AREA_LIMIT: f64 = 0.01;

/// Taylor-coefficient threshold below which an intermediate `A` counts as
/// constant and is nudged by `TIEBREAK_SLOPE·w` to keep `A′` usable.
const TIEBREAK_SLOPE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum DirichletError {
    #[error("the origin must be an interior point of the domain and of the mask")]
    OriginOutsideDomain,
    #[error("boundary datum is constant")]
    ConstantDatum,
    #[error("datum has {datum} samples but the boundary has {boundary} vertices")]
    DatumLengthMismatch { datum: usize, boundary: usize },
    #[error("datum must be sampled at the boundary vertices")]
    DatumNotOnVertices,
    #[error("dilatation is infinite on a {share:.4} fraction of the mask; not grid-integrable")]
    NotIntegrable { share: f64 },
    #[error("every masked node is degenerate; no truncation level is elliptic")]
    DegenerateEverywhere,
    #[error("ladder has no levels")]
    EmptyLadder,
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
    #[error(transparent)]
    Beltrami(#[from] BeltramiError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
}

/// The Dirichlet problem `Re f = φ` on `∂D`, `Im f(0) = 0`, for a coefficient
/// pair on a Jordan domain containing the origin.
#[derive(Clone, Debug)]
pub struct DirichletProblem<T> {
    boundary: JordanBoundary<T>,
    phi: BoundaryFunction<T>,
    pair: CoefficientPair<T>,
}

impl<T: Real> DirichletProblem<T> {
    /// Validates and bundles the inputs: the datum must be nonconstant and
    /// sampled at the boundary vertices, the origin must be interior to both
    /// the curve and the mask, and the dilatation must be grid-integrable.
    pub fn new(
        boundary: JordanBoundary<T>,
        phi: BoundaryFunction<T>,
        pair: CoefficientPair<T>,
    ) -> Result<Self, DirichletError> {
        if phi.curve() != BoundaryCurve::DomainVertices {
            return Err(DirichletError::DatumNotOnVertices);
        }
        if phi.len() != boundary.len() {
            return Err(DirichletError::DatumLengthMismatch {
                datum: phi.len(),
                boundary: boundary.len(),
            });
        }
        if !phi.is_nonconstant() {
            return Err(DirichletError::ConstantDatum);
        }
        let zero = Complex::new(T::zero(), T::zero());
        if !boundary.contains(zero) {
            return Err(DirichletError::OriginOutsideDomain);
        }
        let (ox, oy) = pair
            .spec()
            .nearest(zero)
            .ok_or(DirichletError::OriginOutsideDomain)?;
        if !pair.mask().contains(ox, oy) {
            return Err(DirichletError::OriginOutsideDomain);
        }
        let masked = pair.mask().count().max(1);
        let share = pair.degenerate_count() as f64 / masked as f64;
        if share > DEGENERATE_AREA_LIMIT {
            return Err(DirichletError::NotIntegrable { share });
        }
        Ok(DirichletProblem { boundary, phi, pair })
    }

    #[inline]
    pub fn boundary(&self) -> &JordanBoundary<T> {
        &self.boundary
    }

    #[inline]
    pub fn phi(&self) -> &BoundaryFunction<T> {
        &self.phi
    }

    #[inline]
    pub fn pair(&self) -> &CoefficientPair<T> {
        &self.pair
    }
}

/// Knobs of the outer iteration and of the ladder.
#[derive(Clone, Copy, Debug)]
pub struct SolveParams<T> {
    /// Stop the outer loop when the sup-change of `μ̃` falls to this.
    pub tol_outer: T,
    /// Outer sweeps per level before giving up (reported, not raised).
    pub max_outer: usize,
    /// Under-relaxation factor in `(0, 1]` for the `h` and `A` updates.
    pub rho: T,
    /// Relative tolerance of the Neumann iteration for the principal solution.
    pub principal_tol: T,
    /// Neumann iteration cap.
    pub principal_max_iter: usize,
    /// Edge-subdivision factor of the image-curve disk map.
    pub map_refine: usize,
    /// Equispaced circle samples used for the Schwarz integral of the datum.
    pub circle_samples: usize,
    /// Declare the ladder converged when the last cross-level spherical
    /// sup-distance falls below this.
    pub tol_ladder: T,
}

impl<T: Real> Default for SolveParams<T> {
    fn default() -> Self {
        SolveParams {
            tol_outer: T::of(1e-6),
            max_outer: 60,
            rho: T::of(0.5),
            principal_tol: T::of(1e-12),
            principal_max_iter: 800,
            map_refine: 2,
            circle_samples: 512,
            tol_ladder: T::of(1e-3),
        }
    }
}

/// Convergence evidence of one truncation level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    /// The dilatation cutoff this level solved under.
    pub level: f64,
    /// Outer sweeps run.
    pub iterations: usize,
    /// Whether the coefficient change reached `tol_outer`.
    pub converged: bool,
    /// Sup-change of the disk factorization per sweep.
    pub sup_changes: Vec<f64>,
    /// Sup-change of `μ̃` per sweep (the stopping quantity).
    pub coefficient_changes: Vec<f64>,
    /// Relative L² residual of the level equation, recomputed from the
    /// stored field.
    pub residual_l2: f64,
    /// Sup residual over the masked stencil interior.
    pub residual_sup: f64,
    /// Sup over boundary vertices of `|Re f − φ|`.
    pub boundary_sup_error: f64,
    /// Fraction of interior nodes where the factorization preserves
    /// orientation.
    pub jacobian_positive_fraction: f64,
}

/// Full ladder evidence; everything a run needs to be audited.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub levels: Vec<LevelRecord>,
    /// Spherical sup-distance between consecutive level factorizations.
    pub cross_level_distances: Vec<f64>,
    /// Whether the last cross-level distance reached `tol_ladder`.
    pub ladder_converged: bool,
    /// Relative L² residual of the final field against the un-truncated
    /// coefficients on nodes with dilatation at most `residual_cutoff`.
    pub residual_l2: f64,
    /// Sup residual on the same node set.
    pub residual_sup: f64,
    pub residual_cutoff: f64,
    /// Boundary attainment of the final level.
    pub boundary_sup_error: f64,
    /// `Im f` at the origin node, recomputed from the stored field.
    pub im_f_origin: f64,
    /// Criteria verdicts, when a battery run is attached.
    pub criteria: Option<CriteriaReport>,
}

/// Output of a single bounded (fixed-level) solve.
#[derive(Clone, Debug)]
pub struct BoundedSolution<T> {
    /// `f = A∘h` on the mask, zero outside.
    pub f: ComplexField<T>,
    /// The disk factorization.
    pub h: ComplexField<T>,
    /// Chain-rule derivative of `h` on the mask.
    pub h_z: ComplexField<T>,
    /// The analytic factor.
    pub a: AnalyticFunction<T>,
    /// The Neumann density of the last principal solve, for warm starts.
    pub omega: ComplexField<T>,
    pub record: LevelRecord,
}

/// Output of a ladder solve: the final fields plus the audit report.
#[derive(Clone, Debug)]
pub struct LadderSolution<T> {
    pub f: ComplexField<T>,
    pub h: ComplexField<T>,
    pub a: AnalyticFunction<T>,
    pub report: SolveReport,
}

/// Pointwise equation residual of a field against a coefficient pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualReport {
    /// `‖f_z̄ − μf_z − ν·conj(f_z)‖₂ / (‖f_z‖₂ + ‖f_z̄‖₂)` over the node set.
    pub l2_rel: f64,
    /// Sup of the residual over the node set.
    pub sup_masked: f64,
    /// Number of nodes in the set.
    pub nodes: usize,
}

/// Report-only regularity proxies of a solved pair of fields.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegularityReport {
    /// Fraction of interior masked nodes with `|h_z|² − |h_z̄|² > 0`.
    pub jacobian_positive_fraction: f64,
    /// Fraction of masked cells where `f` is locally non-constant.
    pub discreteness_proxy: f64,
    /// Fraction of masked cells with positively oriented image.
    pub openness_proxy: f64,
}

// ---------------------------------------------------------------------------
// Datum transfer
// ---------------------------------------------------------------------------

/// Resamples vertex data onto `m` equispaced circle angles through the
/// strictly increasing vertex-angle sequence of a disk map, using periodic
/// four-point cubic Lagrange interpolation in the angle variable.
fn resample_datum<T: Real>(
    phi: &BoundaryFunction<T>,
    angles: &[T],
    m: usize,
) -> Result<BoundaryFunction<T>, TransformError> {
    let big_m = angles.len();
    let two_pi = T::PI() + T::PI();
    let values = phi.samples();

    let angle_at = |i: isize| -> T {
        if i < 0 {
            angles[(i + big_m as isize) as usize] - two_pi
        } else if (i as usize) < big_m {
            angles[i as usize]
        } else {
            angles[i as usize - big_m] + two_pi
        }
    };
    let value_at = |i: isize| -> T { values[i.rem_euclid(big_m as isize) as usize] };

    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let mut t = two_pi * T::of(k as f64) / T::of(m as f64);
        while t < angles[0] {
            t = t + two_pi;
        }
        while t >= angles[0] + two_pi {
            t = t - two_pi;
        }
        // Largest j with angles[j] ≤ t; the closing segment wraps to
        // angles[0] + 2π.
        let j = angles.partition_point(|a| *a <= t) as isize - 1;
        let mut acc = T::zero();
        for a in (j - 1)..=(j + 2) {
            let xa = angle_at(a);
            let mut w = value_at(a);
            for b in (j - 1)..=(j + 2) {
                if b != a {
                    let xb = angle_at(b);
                    w = w * (t - xb) / (xa - xb);
                }
            }
            acc = acc + w;
        }
        out.push(acc);
    }
    BoundaryFunction::new(out, BoundaryCurve::UnitCircle)
}

// ---------------------------------------------------------------------------
// Field helpers
// ---------------------------------------------------------------------------

fn blend_field<T: Real>(
    current: &ComplexField<T>,
    target: &ComplexField<T>,
    rho: T,
) -> ComplexField<T> {
    current
        .zip_map(target, |a, b| a + (b - a).scale(rho))
        .expect("iteration fields share one grid")
}

fn masked_sup_diff<T: Real>(
    a: &ComplexField<T>,
    b: &ComplexField<T>,
    mask: &DomainMask<T>,
) -> T {
    let mut worst = T::zero();
    for idx in mask.indices() {
        let d = (a.values()[idx] - b.values()[idx]).norm();
        if d > worst {
            worst = d;
        }
    }
    worst
}

fn full_sup_diff<T: Real>(a: &ComplexField<T>, b: &ComplexField<T>) -> T {
    let mut worst = T::zero();
    for (x, y) in a.values().iter().zip(b.values()) {
        let d = (*x - *y).norm();
        if d > worst {
            worst = d;
        }
    }
    worst
}

fn compose<T: Real>(
    a: &AnalyticFunction<T>,
    h: &ComplexField<T>,
    mask: &DomainMask<T>,
) -> ComplexField<T> {
    let spec = h.spec();
    let zero = Complex::new(T::zero(), T::zero());
    let mut values = vec![zero; spec.len()];
    for idx in mask.indices() {
        values[idx] = a.evaluate_clamped(h.values()[idx]);
    }
    ComplexField::new(spec, values).expect("sized to the spec")
}

/// `μ̃` from the pair and the current iterate, with `A′∘h` evaluated per
/// masked node and the exact (chain-rule or blended) derivative of `h`.
fn coefficient_state<T: Real>(
    pair: &CoefficientPair<T>,
    a: &AnalyticFunction<T>,
    h: &ComplexField<T>,
    h_z: &ComplexField<T>,
) -> Result<EffectiveCoefficient<T>, BeltramiError> {
    let spec = h.spec();
    let zero = Complex::new(T::zero(), T::zero());
    let mut a_prime = vec![zero; spec.len()];
    for idx in pair.mask().indices() {
        a_prime[idx] = a.derivative_clamped(h.values()[idx]);
    }
    let a_prime = ComplexField::new(spec, a_prime).expect("sized to the spec");
    effective_coefficient_from_parts(pair, h_z, &a_prime)
}

fn nudge_linear<T: Real>(a: &AnalyticFunction<T>) -> AnalyticFunction<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut taylor = a.taylor().to_vec();
    while taylor.len() < 2 {
        taylor.push(zero);
    }
    taylor[1] = taylor[1] + Complex::new(T::of(TIEBREAK_SLOPE), T::zero());
    AnalyticFunction::from_taylor(taylor)
}

// ---------------------------------------------------------------------------
// Bounded solve
// ---------------------------------------------------------------------------

struct WarmStart<'a, T> {
    a: Option<&'a AnalyticFunction<T>>,
    h: Option<(&'a ComplexField<T>, &'a ComplexField<T>)>,
    omega: Option<&'a ComplexField<T>>,
}

impl<T> Default for WarmStart<'_, T> {
    fn default() -> Self {
        WarmStart { a: None, h: None, omega: None }
    }
}

fn solve_level<T: Real>(
    problem: &DirichletProblem<T>,
    pair: &CoefficientPair<T>,
    level_tag: f64,
    warm: WarmStart<'_, T>,
    params: &SolveParams<T>,
) -> Result<BoundedSolution<T>, DirichletError> {
    let spec = pair.spec();
    let mask = pair.mask();
    let boundary = problem.boundary();
    let m = params.circle_samples;
    let two_pi = T::PI() + T::PI();

    let (mut h_curr, mut hz_curr) = match warm.h {
        Some((h, hz)) => (h.clone(), hz.clone()),
        None => (
            ComplexField::from_fn(spec, |z| z),
            ComplexField::from_fn(spec, |_| Complex::new(T::one(), T::zero())),
        ),
    };
    let mut a_curr = match warm.a {
        Some(a) => a.clone(),
        None => {
            let big_m = boundary.len();
            let uniform: Vec<T> = (0..big_m)
                .map(|j| two_pi * T::of(j as f64) / T::of(big_m as f64))
                .collect();
            schwarz_integral(&resample_datum(problem.phi(), &uniform, m)?)?
        }
    };
    let mut omega_warm: Option<ComplexField<T>> = warm.omega.cloned();
    let mut mu_eff = coefficient_state(pair, &a_curr, &h_curr, &hz_curr)?;

    let mut sup_changes = Vec::new();
    let mut coefficient_changes = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut latest: Option<(DiskFactorization<T>, AnalyticFunction<T>)> = None;
    let mut omega_last: Option<ComplexField<T>> = None;

    for k in 1..=params.max_outer.max(1) {
        iterations = k;
        let sol = principal_solution_with_start(
            &mu_eff,
            omega_warm.as_ref(),
            params.principal_tol,
            params.principal_max_iter,
        )?;
        let fac = disk_homeomorphism(&sol, boundary, mask, 0, params.map_refine)?;
        let psi = resample_datum(problem.phi(), fac.map.boundary_angles(), m)?;
        let mut a_target = schwarz_integral(&psi)?;
        if a_target.is_constant(T::of(TIEBREAK_SLOPE)) {
            a_target = nudge_linear(&a_target);
        }

        sup_changes.push(masked_sup_diff(&fac.h, &h_curr, mask).as_f64());
        h_curr = blend_field(&h_curr, &fac.h, params.rho);
        hz_curr = blend_field(&hz_curr, &fac.h_z, params.rho);
        a_curr = a_curr.blend(&a_target, params.rho);
        omega_warm = Some(sol.omega.clone());
        omega_last = Some(sol.omega);
        latest = Some((fac, a_target));

        let mu_next = coefficient_state(pair, &a_curr, &h_curr, &hz_curr)?;
        let change = full_sup_diff(mu_next.field(), mu_eff.field());
        coefficient_changes.push(change.as_f64());
        mu_eff = mu_next;
        if change <= params.tol_outer {
            converged = true;
            break;
        }
    }

    let (fac, a_fin) = latest.expect("at least one sweep ran");
    let omega = omega_last.expect("at least one sweep ran");
    let f = compose(&a_fin, &fac.h, mask);

    let mut boundary_err = T::zero();
    for (j, &theta) in fac.map.boundary_angles().iter().enumerate() {
        let err = (a_fin.boundary_value(theta).re - problem.phi().samples()[j]).abs();
        if err > boundary_err {
            boundary_err = err;
        }
    }

    let residual = equation_residual(&f, pair, T::infinity());
    let diag = regularity_diagnostics(&f, &fac.h, mask);
    let record = LevelRecord {
        level: level_tag,
        iterations,
        converged,
        sup_changes,
        coefficient_changes,
        residual_l2: residual.l2_rel,
        residual_sup: residual.sup_masked,
        boundary_sup_error: boundary_err.as_f64(),
        jacobian_positive_fraction: diag.jacobian_positive_fraction,
    };
    Ok(BoundedSolution { f, h: fac.h, h_z: fac.h_z, a: a_fin, omega, record })
}

/// Solves one uniformly elliptic (truncated) problem by the damped
/// fixed-point sweep. Exhausting `max_outer` is reported in the record's
/// `converged` flag, not raised.
pub fn solve_bounded<T: Real>(
    problem: &DirichletProblem<T>,
    a_init: Option<&AnalyticFunction<T>>,
    params: &SolveParams<T>,
) -> Result<BoundedSolution<T>, DirichletError> {
    let k = problem.pair().k_inf().as_f64();
    let tag = if k < 1.0 { (1.0 + k) / (1.0 - k) } else { f64::INFINITY };
    let warm = WarmStart { a: a_init, h: None, omega: None };
    solve_level(problem, problem.pair(), tag, warm, params)
}

// ---------------------------------------------------------------------------
// Ladder solve
// ---------------------------------------------------------------------------

fn spherical_sup_distance<T: Real>(
    a: &ComplexField<T>,
    b: &ComplexField<T>,
    mask: &DomainMask<T>,
) -> f64 {
    let mut worst = T::zero();
    for idx in mask.indices() {
        let d = spherical_distance_finite(a.values()[idx], b.values()[idx]);
        if d > worst {
            worst = d;
        }
    }
    worst.as_f64()
}

/// Runs the truncation ladder over the given levels, warm-starting each level
/// from the one below, and assembles the audit report. The final residual is
/// measured against the un-truncated coefficients on nodes where the
/// dilatation is at most the last level.
pub fn solve<T: Real>(
    problem: &DirichletProblem<T>,
    levels: &[u32],
    params: &SolveParams<T>,
) -> Result<LadderSolution<T>, DirichletError> {
    if levels.is_empty() {
        return Err(DirichletError::EmptyLadder);
    }
    let mask = problem.pair().mask();
    if problem.pair().degenerate_count() == mask.count() {
        return Err(DirichletError::DegenerateEverywhere);
    }
    let ladder = TruncationLadder::new(problem.pair(), levels)?;

    let mut records = Vec::with_capacity(levels.len());
    let mut distances = Vec::new();
    let mut prev: Option<BoundedSolution<T>> = None;
    for (i, pair_n) in ladder.pairs().iter().enumerate() {
        let warm = match &prev {
            Some(p) => WarmStart {
                a: Some(&p.a),
                h: Some((&p.h, &p.h_z)),
                omega: Some(&p.omega),
            },
            None => WarmStart::default(),
        };
        let out = solve_level(problem, pair_n, f64::from(ladder.levels()[i]), warm, params)?;
        if let Some(p) = &prev {
            distances.push(spherical_sup_distance(&out.h, &p.h, mask));
        }
        records.push(out.record.clone());
        prev = Some(out);
    }

    let last = prev.expect("ladder has at least one level");
    let cutoff = T::of(f64::from(*levels.last().expect("nonempty")));
    let residual = equation_residual(&last.f, problem.pair(), cutoff);
    let ladder_converged = distances
        .last()
        .is_some_and(|&d| d <= params.tol_ladder.as_f64());
    let (ox, oy) = problem
        .pair()
        .spec()
        .nearest(Complex::new(T::zero(), T::zero()))
        .expect("validated at construction");
    let im_f_origin = last.f.at(ox, oy).im.as_f64();

    let report = SolveReport {
        levels: records,
        cross_level_distances: distances,
        ladder_converged,
        residual_l2: residual.l2_rel,
        residual_sup: residual.sup_masked,
        residual_cutoff: cutoff.as_f64(),
        boundary_sup_error: last.record.boundary_sup_error,
        im_f_origin,
        criteria: None,
    };
    Ok(LadderSolution { f: last.f, h: last.h, a: last.a, report })
}

// ---------------------------------------------------------------------------
// Residual and diagnostics
// ---------------------------------------------------------------------------

/// Wirtinger finite-difference residual `f_z̄ − μf_z − ν·conj(f_z)` over the
/// masked stencil interior restricted to nodes with dilatation at most
/// `cutoff` (pass `+∞` for the whole interior; degenerate nodes then count).
pub fn equation_residual<T: Real>(
    f: &ComplexField<T>,
    pair: &CoefficientPair<T>,
    cutoff: T,
) -> ResidualReport {
    let (f_z, f_zb) = wirtinger_derivatives(f);
    let interior = pair.mask().stencil_interior();
    let dil = pair.dilatation();

    let mut num = T::zero();
    let mut den_z = T::zero();
    let mut den_zb = T::zero();
    let mut sup = T::zero();
    let mut nodes = 0usize;
    for idx in pair.mask().indices() {
        if !interior[idx] || !(dil.values().values()[idx] <= cutoff) {
            continue;
        }
        let fz = f_z.values()[idx];
        let fzb = f_zb.values()[idx];
        let r = fzb - pair.mu().values()[idx] * fz - pair.nu().values()[idx] * fz.conj();
        num = num + r.norm_sqr();
        den_z = den_z + fz.norm_sqr();
        den_zb = den_zb + fzb.norm_sqr();
        let rn = r.norm();
        if rn > sup {
            sup = rn;
        }
        nodes += 1;
    }
    let den = den_z.sqrt() + den_zb.sqrt();
    let l2_rel = if den > T::zero() { num.sqrt() / den } else { T::zero() };
    ResidualReport { l2_rel: l2_rel.as_f64(), sup_masked: sup.as_f64(), nodes }
}

/// Report-only regularity proxies: orientation of the factorization's
/// Jacobian on interior nodes, and cellwise orientation / local
/// non-constancy of the solved field. A sense-reversing map scores zero on
/// the first two; a locally constant patch lowers the third.
pub fn regularity_diagnostics<T: Real>(
    f: &ComplexField<T>,
    h: &ComplexField<T>,
    mask: &DomainMask<T>,
) -> RegularityReport {
    let (h_z, h_zb) = wirtinger_derivatives(h);
    let interior = mask.stencil_interior();
    let mut positive = 0usize;
    let mut total = 0usize;
    for idx in mask.indices() {
        if !interior[idx] {
            continue;
        }
        total += 1;
        if h_z.values()[idx].norm_sqr() > h_zb.values()[idx].norm_sqr() {
            positive += 1;
        }
    }
    let jacobian_positive_fraction = if total > 0 {
        positive as f64 / total as f64
    } else {
        0.0
    };

    let spec = f.spec();
    let n = spec.n();
    let scale = f.sup_norm().max(T::of(f64::MIN_POSITIVE));
    let flat = scale * T::of(1e-13);
    let mut cells = 0usize;
    let mut oriented = 0usize;
    let mut moving = 0usize;
    for iy in 0..n - 1 {
        for ix in 0..n - 1 {
            if !(mask.contains(ix, iy)
                && mask.contains(ix + 1, iy)
                && mask.contains(ix, iy + 1)
                && mask.contains(ix + 1, iy + 1))
            {
                continue;
            }
            cells += 1;
            let base = f.at(ix, iy);
            let e1 = f.at(ix + 1, iy) - base;
            let e2 = f.at(ix, iy + 1) - base;
            if e1.re * e2.im - e1.im * e2.re > T::zero() {
                oriented += 1;
            }
            if e1.norm() > flat || e2.norm() > flat {
                moving += 1;
            }
        }
    }
    let (openness_proxy, discreteness_proxy) = if cells > 0 {
        (oriented as f64 / cells as f64, moving as f64 / cells as f64)
    } else {
        (0.0, 0.0)
    };
    RegularityReport { jacobian_positive_fraction, discreteness_proxy, openness_proxy }
}
