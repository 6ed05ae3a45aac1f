//! Closed-form reference cases and brute-force reference operators.
//!
//! Everything here is deliberately slow or special-cased: manufactured
//! solutions with exact coefficient pairs, boundary data, and derivatives
//! (for convergence studies and end-to-end checks of the solver), radial
//! dilatation profiles whose solvability verdicts are known in closed form
//! (for calibrating the criteria battery), and an `O(N²)` quadrature for the
//! Beurling transform that shares no code with the spectral path (for
//! cross-validating it). None of this is used by the solver itself.

use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::coeff::{CoeffError, CoefficientPair};
use crate::criteria::Verdict;
use crate::grid::{ComplexField, DomainMask, GridSpec};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("stretch dilatation must satisfy K ≥ 1 and be finite, got {0}")]
    BadStretch(f64),
    #[error("outer power must be ≥ 1")]
    BadPower,
    #[error("split factor must lie in [0, 1], got {0}")]
    BadSplitFactor(f64),
    #[error("splitting requires a case with a pure first characteristic")]
    SplitNeedsPureMu,
    #[error("brute-force quadrature is limited to {max}×{max} grids, got {got}×{got}")]
    GridTooLarge { got: usize, max: usize },
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
}

/// Pointwise closed-form evaluator, shareable between cases.
pub type Evaluator<T> = Arc<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

/// A Beltrami problem on the unit disk whose exact solution is known.
///
/// The fields satisfy, in closed form,
///
/// * `∂z̄ f = μ·∂z f + ν·conj(∂z f)` on the open disk,
/// * `Re f(e^{iθ}) = datum(θ)` and `Im f(0) = 0`,
/// * `f = a ∘ h` with `h` a self-homeomorphism of the disk fixing `0` and
///   `1`, and `a` analytic on the disk,
///
/// so a solver's output can be compared field-by-field against exact values
/// rather than against another numerical method.
#[derive(Clone)]
pub struct ManufacturedCase<T> {
    /// Exact solution `f`.
    pub f: Evaluator<T>,
    /// Homeomorphic factor `h` of the representation `f = a ∘ h`.
    pub h: Evaluator<T>,
    /// Analytic factor `a` of the representation `f = a ∘ h`.
    pub a: Evaluator<T>,
    /// Exact `z`-derivative of `f` (zero at the origin by convention when
    /// the limit direction is undefined there).
    pub f_z: Evaluator<T>,
    /// First characteristic `μ`.
    pub mu: Evaluator<T>,
    /// Second characteristic `ν`.
    pub nu: Evaluator<T>,
    /// Boundary datum `φ(θ) = Re f(e^{iθ})`.
    pub datum: Arc<dyn Fn(T) -> T + Send + Sync>,
    /// Human-readable label for reports and assertion messages.
    pub description: String,
    two_characteristics: bool,
}

impl<T: Real> ManufacturedCase<T> {
    /// Whether the case carries a genuine second characteristic.
    pub fn has_second_characteristic(&self) -> bool {
        self.two_characteristics
    }

    /// Samples `μ` and `ν` on a grid as a validated coefficient pair.
    pub fn sample_pair(
        &self,
        spec: GridSpec<T>,
        mask: &DomainMask<T>,
    ) -> Result<CoefficientPair<T>, OracleError> {
        let mu = ComplexField::from_fn(spec, |z| (self.mu)(z));
        let nu = ComplexField::from_fn(spec, |z| (self.nu)(z));
        Ok(CoefficientPair::new(mu, nu, mask.clone())?)
    }

    /// Samples the exact solution on a grid.
    pub fn sample_solution(&self, spec: GridSpec<T>) -> ComplexField<T> {
        ComplexField::from_fn(spec, |z| (self.f)(z))
    }

    /// Boundary datum at `m` equispaced angles `θ_j = 2πj/m`.
    pub fn datum_samples(&self, m: usize) -> Vec<T> {
        let two_pi = T::PI() + T::PI();
        (0..m)
            .map(|j| (self.datum)(two_pi * T::of(j as f64) / T::of(m as f64)))
            .collect()
    }
}

fn integer_power<T: Real>(w: Complex<T>, d: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for _ in 0..d {
        acc = acc * w;
    }
    acc
}

/// The radial stretch `h(z) = z·|z|^{1/K − 1}` composed with the power map
/// `a(w) = w^d`.
///
/// The stretch has constant dilatation `K` away from the origin, first
/// characteristic `μ = ((1/K − 1)/(1/K + 1))·z/z̄`, and no second
/// characteristic; composing with the analytic `a` leaves the coefficients
/// unchanged, so `f(z) = z^d·|z|^{d(1/K − 1)}` solves the disk problem with
/// boundary datum `cos dθ`. `K = 1` degenerates to the analytic case
/// `f = z^d`.
pub fn radial_stretch_case<T: Real>(k: T, power: u32) -> Result<ManufacturedCase<T>, OracleError> {
    if !k.is_finite() || k < T::one() {
        return Err(OracleError::BadStretch(k.as_f64()));
    }
    if power == 0 {
        return Err(OracleError::BadPower);
    }
    let alpha = k.recip();
    let zero = Complex::new(T::zero(), T::zero());

    let h: Evaluator<T> = Arc::new(move |z| {
        let r = z.norm();
        if r == T::zero() {
            zero
        } else {
            z.scale(r.powf(alpha - T::one()))
        }
    });
    let a: Evaluator<T> = Arc::new(move |w| integer_power(w, power));

    // f and f_z are written out directly (not through the h/a closures) so
    // the representation f = a ∘ h stays a checkable identity.
    let c = T::of(power as f64) * (alpha - T::one());
    let f: Evaluator<T> = Arc::new(move |z| {
        let r = z.norm();
        if r == T::zero() {
            zero
        } else {
            integer_power(z, power).scale(r.powf(c))
        }
    });
    let dz_scale = T::of(power as f64) * (alpha + T::one()) / T::of(2.0);
    let f_z: Evaluator<T> = Arc::new(move |z| {
        let r = z.norm();
        if r == T::zero() {
            return zero;
        }
        let head = z.scale(r.powf(alpha - T::one()));
        integer_power(head, power - 1).scale(dz_scale * r.powf(alpha - T::one()))
    });

    let m = (alpha - T::one()) / (alpha + T::one());
    let mu: Evaluator<T> = Arc::new(move |z| {
        let n2 = z.norm_sqr();
        if n2 == T::zero() {
            zero
        } else {
            (z * z / n2).scale(m)
        }
    });
    let nu: Evaluator<T> = Arc::new(move |_| zero);

    let datum: Arc<dyn Fn(T) -> T + Send + Sync> =
        Arc::new(move |theta| (T::of(power as f64) * theta).cos());

    Ok(ManufacturedCase {
        f,
        h,
        a,
        f_z,
        mu,
        nu,
        datum,
        description: format!("radial stretch K = {}, outer power w^{}", k, power),
        two_characteristics: false,
    })
}

/// Moves a fraction `t` of the first characteristic into the second one
/// without changing the solution.
///
/// With `u = ∂z f / conj(∂z f)` (unimodular wherever `∂z f ≠ 0`), the pair
/// `μ′ = (1−t)·μ`, `ν′ = t·μ·u` satisfies `μ′·∂z f + ν′·conj(∂z f) = μ·∂z f`
/// identically, and `|μ′| + |ν′| = |μ|`, so the dilatation is preserved
/// pointwise. `t = 0` returns the case unchanged; `t = 1` moves everything
/// into `ν`.
pub fn two_characteristics_split<T: Real>(
    base: &ManufacturedCase<T>,
    t: T,
) -> Result<ManufacturedCase<T>, OracleError> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(OracleError::BadSplitFactor(t.as_f64()));
    }
    if base.two_characteristics {
        return Err(OracleError::SplitNeedsPureMu);
    }

    let keep = T::one() - t;
    let base_mu = base.mu.clone();
    let mu: Evaluator<T> = Arc::new(move |z| base_mu(z).scale(keep));

    let base_mu = base.mu.clone();
    let base_fz = base.f_z.clone();
    let nu: Evaluator<T> = Arc::new(move |z| {
        let w = base_fz(z);
        let unimodular = if w.norm_sqr() == T::zero() || !w.re.is_finite() || !w.im.is_finite() {
            Complex::new(T::one(), T::zero())
        } else {
            let u = w / w.conj();
            u.scale(u.norm().recip())
        };
        base_mu(z).scale(t) * unimodular
    });

    Ok(ManufacturedCase {
        f: base.f.clone(),
        h: base.h.clone(),
        a: base.a.clone(),
        f_z: base.f_z.clone(),
        mu,
        nu,
        datum: base.datum.clone(),
        description: format!("{}, split t = {}", base.description, t),
        two_characteristics: true,
    })
}

// ---------------------------------------------------------------------------
// Degenerate radial profiles with known verdicts
// ---------------------------------------------------------------------------

/// Growth law of a radially symmetric dilatation singular at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialProfile {
    /// `K(r) = 1 + log(1/r)` — of bounded mean oscillation, exponentially
    /// integrable, Lehto integral divergent.
    Log,
    /// `K(r) = 1 + log log(e/r)` — milder than [`RadialProfile::Log`] in
    /// every respect.
    LogLog,
    /// `K(r) = exp(1/r)` — too singular for every criterion in the battery.
    Exp,
}

/// What a criteria test is expected to conclude for a reference profile.
///
/// "Not satisfied" deliberately admits both [`Verdict::Violated`] and
/// [`Verdict::Inconclusive`]: a profile can be too singular for the verdict
/// machinery to resolve cleanly at a given grid, and either answer correctly
/// withholds the solvability guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Satisfied,
    NotSatisfied,
}

impl Expectation {
    /// Whether a computed verdict is consistent with the expectation.
    pub fn admits(self, verdict: Verdict) -> bool {
        match self {
            Expectation::Satisfied => verdict == Verdict::Satisfied,
            Expectation::NotSatisfied => {
                matches!(verdict, Verdict::Violated | Verdict::Inconclusive)
            }
        }
    }
}

/// A radially symmetric coefficient degenerating at the origin, with the
/// closed-form dilatation profile and the verdicts the criteria battery is
/// expected to reach on it.
pub struct DegenerateRadialCase<T> {
    /// First characteristic `μ` (the second one is zero).
    pub mu: Evaluator<T>,
    /// Closed-form dilatation `K(r)` for `0 < r < 1`.
    pub dilatation: Arc<dyn Fn(T) -> T + Send + Sync>,
    /// Growth law of the profile.
    pub profile: RadialProfile,
    /// Expected outcome of the mean-oscillation test at the origin.
    pub expected_fmo: Expectation,
    /// Expected outcome of the Lehto divergence test at the origin.
    pub expected_lehto: Expectation,
    /// Expected outcome of the exponential integrability test at `α = 1`.
    pub expected_exp_integrability: Expectation,
    /// Human-readable label for reports and assertion messages.
    pub description: String,
}

impl<T: Real> DegenerateRadialCase<T> {
    /// Samples the coefficient on a grid as a validated pair (`ν ≡ 0`).
    pub fn sample_pair(
        &self,
        spec: GridSpec<T>,
        mask: &DomainMask<T>,
    ) -> Result<CoefficientPair<T>, OracleError> {
        let mu = ComplexField::from_fn(spec, |z| (self.mu)(z));
        let nu = ComplexField::zeros(spec);
        Ok(CoefficientPair::new(mu, nu, mask.clone())?)
    }
}

/// Builds the reference profile `profile` as a coefficient on the unit disk:
/// `μ(z) = −((K(r) − 1)/(K(r) + 1))·z/z̄` inside, zero at the origin node and
/// outside the closed disk.
pub fn degenerate_radial_case<T: Real>(profile: RadialProfile) -> DegenerateRadialCase<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let phase2 = move |z: Complex<T>| -> Complex<T> {
        let n2 = z.norm_sqr();
        if n2 == T::zero() {
            zero
        } else {
            z * z / n2
        }
    };

    // |μ| = (K−1)/(K+1), written per profile in the form that stays finite
    // when K overflows: tanh saturates to 1 exactly where K(r) is too large
    // to represent, which is precisely the degenerate reading.
    let (modulus, dilatation, fmo, lehto, expi, label): (
        Arc<dyn Fn(T) -> T + Send + Sync>,
        Arc<dyn Fn(T) -> T + Send + Sync>,
        Expectation,
        Expectation,
        Expectation,
        &str,
    ) = match profile {
        RadialProfile::Log => (
            Arc::new(|r: T| {
                let l = (T::one() / r).ln();
                l / (T::of(2.0) + l)
            }),
            Arc::new(|r: T| T::one() + (T::one() / r).ln()),
            Expectation::Satisfied,
            Expectation::Satisfied,
            Expectation::Satisfied,
            "K = 1 + log(1/r)",
        ),
        RadialProfile::LogLog => (
            Arc::new(|r: T| {
                let l = (T::one() + (T::one() / r).ln()).ln();
                l / (T::of(2.0) + l)
            }),
            Arc::new(|r: T| T::one() + (T::one() + (T::one() / r).ln()).ln()),
            Expectation::Satisfied,
            Expectation::Satisfied,
            Expectation::Satisfied,
            "K = 1 + log log(e/r)",
        ),
        RadialProfile::Exp => (
            Arc::new(|r: T| (T::of(0.5) / r).tanh()),
            Arc::new(|r: T| r.recip().exp()),
            Expectation::NotSatisfied,
            Expectation::NotSatisfied,
            Expectation::NotSatisfied,
            "K = exp(1/r)",
        ),
    };

    let mu: Evaluator<T> = Arc::new(move |z| {
        let r = z.norm();
        if r <= T::zero() || r >= T::one() {
            return zero;
        }
        -phase2(z).scale(modulus(r))
    });

    DegenerateRadialCase {
        mu,
        dilatation,
        profile,
        expected_fmo: fmo,
        expected_lehto: lehto,
        expected_exp_integrability: expi,
        description: label.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Brute-force Beurling transform
// ---------------------------------------------------------------------------

/// Largest grid [`brute_force_beurling`] accepts; the cost is `O(n⁴)`.
pub const BRUTE_FORCE_MAX: usize = 48;

/// Direct `O(N²)` quadrature of `S[ω](z) = −(1/π) p.v. ∬ ω(w)/(z−w)² dA(w)`
/// on the grid nodes.
///
/// Each cell contributes its node value times the exact integral of the
/// kernel over the cell. That integral reduces to the cell's boundary
/// contour, `∬ (z−w)^{−2} dA = (i/2) ∮ dw̄/(z−w)`, a sum of four
/// logarithms of edge ratios — branch-safe with principal logs, because a
/// straight edge subtends less than a half turn from any outside point. The
/// cell containing the target is dropped: the principal value of the kernel
/// over a square centered on the singularity is zero by symmetry, which is
/// also what the cell-average rule assigns it. This shares nothing with the
/// spectral implementation — no FFT, no padding, no multiplier — which is
/// the point: agreement between the two is evidence for both.
pub fn brute_force_beurling<T: Real>(
    density: &ComplexField<T>,
) -> Result<ComplexField<T>, OracleError> {
    let spec = density.spec();
    let n = spec.n();
    if n > BRUTE_FORCE_MAX {
        return Err(OracleError::GridTooLarge { got: n, max: BRUTE_FORCE_MAX });
    }

    let len = spec.len();
    let points: Vec<Complex<T>> = (0..len).map(|idx| spec.point_at(idx)).collect();
    let values = density.values();
    let zero = Complex::new(T::zero(), T::zero());
    let half = spec.step() * T::of(0.5);
    // Cell corners relative to its node, in counterclockwise order.
    let corner = [
        Complex::new(-half, -half),
        Complex::new(half, -half),
        Complex::new(half, half),
        Complex::new(-half, half),
    ];
    // (i/2)·Σ ±log-ratio folded with the leading −1/π of the transform.
    let scale = Complex::new(T::zero(), -(T::PI() + T::PI()).recip());

    let mut out = vec![zero; len];
    for (i, slot) in out.iter_mut().enumerate() {
        let zi = points[i];
        let mut acc = zero;
        for (j, &w) in values.iter().enumerate() {
            if j == i || w == zero {
                continue;
            }
            let d = zi - points[j];
            let to = |k: usize| d - corner[k];
            let contour = (to(0) / to(1)).ln() - (to(1) / to(2)).ln() + (to(2) / to(3)).ln()
                - (to(3) / to(0)).ln();
            acc = acc + w * contour;
        }
        *slot = acc * scale;
    }
    Ok(ComplexField::new(spec, out).expect("output sized to the input grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{builtin_family, BuiltinFamily};
    use crate::criteria::{
        criteria_report, exp_integrability, lehto_divergence_test, CriteriaConfig,
    };
    use crate::dirichlet::equation_residual;
    use crate::grid::{DomainMask, GridSpec};
    use crate::transforms::BeurlingOperator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = Complex<f64>;

    fn disk_setup(n: usize) -> (GridSpec<f64>, DomainMask<f64>) {
        let spec = GridSpec::centered(1.25, n).unwrap();
        let mask = DomainMask::from_predicate(spec, |z| z.norm() < 1.0);
        (spec, mask)
    }

    #[test]
    fn stretch_with_unit_dilatation_is_analytic() {
        let case = radial_stretch_case(1.0, 3).unwrap();
        for z in [C64::new(0.3, 0.4), C64::new(-0.7, 0.1), C64::new(0.0, 0.9)] {
            assert!(((case.h)(z) - z).norm() < 1e-15);
            assert!(((case.f)(z) - z * z * z).norm() < 1e-14);
            assert_eq!((case.mu)(z), C64::new(0.0, 0.0));
        }
        assert!(!case.has_second_characteristic());
    }

    #[test]
    fn stretch_matches_pinned_closed_forms() {
        // K = 2, a(w) = w²: f(z) = z²/|z|, μ = −(1/3)·z²/|z|², φ(θ) = cos 2θ.
        let case = radial_stretch_case(2.0, 2).unwrap();
        let z = C64::new(0.3, 0.4);
        let want_mu = -(z * z / z.norm_sqr()).scale(1.0 / 3.0);
        assert!(((case.mu)(z) - want_mu).norm() < 1e-15);
        assert!(((case.f)(z) - z * z / z.norm()).norm() < 1e-15);
        assert!(((case.datum)(0.7) - (1.4f64).cos()).abs() < 1e-15);
        let on_axis = C64::new(0.6, 0.0);
        assert!(((case.f)(on_axis) - C64::new(0.6, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn stretch_factors_compose_to_the_solution() {
        for (k, d) in [(1.5, 1u32), (2.0, 2), (4.0, 3)] {
            let case = radial_stretch_case(k, d).unwrap();
            for z in [C64::new(0.3, 0.4), C64::new(-0.5, 0.2), C64::new(0.05, -0.85)] {
                let composed = (case.a)((case.h)(z));
                let direct = (case.f)(z);
                assert!(
                    (composed - direct).norm() < 1e-14,
                    "{}: a(h(z)) = {composed} vs f(z) = {direct}",
                    case.description
                );
            }
        }
    }

    #[test]
    fn stretch_dilatation_is_constant_on_the_grid() {
        let (spec, mask) = disk_setup(64);
        let case = radial_stretch_case(2.0, 2).unwrap();
        let pair = case.sample_pair(spec, &mask).unwrap();
        assert!((pair.k_inf() - 1.0 / 3.0).abs() < 1e-14);
        let dil = pair.dilatation();
        for idx in pair.mask().indices() {
            let z = spec.point_at(idx);
            let k = dil.values().values()[idx];
            if z.norm() == 0.0 {
                assert_eq!(k, 1.0);
            } else {
                assert!((k - 2.0).abs() < 1e-13, "K = {k} at {z}");
            }
        }
    }

    #[test]
    fn stretch_rejects_bad_parameters() {
        assert!(matches!(
            radial_stretch_case(0.9, 1),
            Err(OracleError::BadStretch(_))
        ));
        assert!(matches!(
            radial_stretch_case(f64::NAN, 1),
            Err(OracleError::BadStretch(_))
        ));
        assert!(matches!(radial_stretch_case(2.0, 0), Err(OracleError::BadPower)));
    }

    #[test]
    fn manufactured_solution_satisfies_the_discrete_equation() {
        let case = radial_stretch_case(2.0, 2).unwrap();
        let mut residuals = Vec::new();
        for n in [64usize, 128] {
            let (spec, mask) = disk_setup(n);
            let pair = case.sample_pair(spec, &mask).unwrap();
            let f = case.sample_solution(spec);
            residuals.push(equation_residual(&f, &pair, f64::INFINITY).l2_rel);
        }
        assert!(residuals[0] < 0.05, "residual at 64² is {}", residuals[0]);
        assert!(
            residuals[1] < residuals[0] / 1.4,
            "no first-order decay: {residuals:?}"
        );
    }

    #[test]
    fn split_endpoints_are_exact() {
        let base = radial_stretch_case(2.0, 2).unwrap();
        let zs = [C64::new(0.3, 0.4), C64::new(-0.6, 0.1), C64::new(0.0, 0.0)];

        let all_mu = two_characteristics_split(&base, 0.0).unwrap();
        for &z in &zs {
            assert_eq!((all_mu.mu)(z), (base.mu)(z));
            assert_eq!((all_mu.nu)(z).norm(), 0.0);
        }

        let all_nu = two_characteristics_split(&base, 1.0).unwrap();
        for &z in &zs {
            assert_eq!((all_nu.mu)(z).norm(), 0.0);
            assert!(((all_nu.nu)(z).norm() - (base.mu)(z).norm()).abs() < 1e-15);
        }
        assert!(all_nu.has_second_characteristic());
    }

    #[test]
    fn split_preserves_the_dilatation_pointwise() {
        let base = radial_stretch_case(3.0, 1).unwrap();
        let split = two_characteristics_split(&base, 0.7).unwrap();
        let (spec, mask) = disk_setup(64);
        let before = base.sample_pair(spec, &mask).unwrap();
        let after = split.sample_pair(spec, &mask).unwrap();
        let kb = before.dilatation();
        let ka = after.dilatation();
        for idx in mask.indices() {
            let b = kb.values().values()[idx];
            let a = ka.values().values()[idx];
            assert!((a - b).abs() <= 1e-14 * b, "K {b} became {a}");
        }
    }

    #[test]
    fn split_case_still_solves_the_equation() {
        let base = radial_stretch_case(2.0, 2).unwrap();
        let split = two_characteristics_split(&base, 0.5).unwrap();
        let (spec, mask) = disk_setup(128);
        let pair = split.sample_pair(spec, &mask).unwrap();
        let f = split.sample_solution(spec);
        let report = equation_residual(&f, &pair, f64::INFINITY);
        assert!(report.l2_rel < 0.05, "residual {}", report.l2_rel);
    }

    #[test]
    fn split_validates_its_inputs() {
        let base = radial_stretch_case(2.0, 1).unwrap();
        assert!(matches!(
            two_characteristics_split(&base, -0.1),
            Err(OracleError::BadSplitFactor(_))
        ));
        assert!(matches!(
            two_characteristics_split(&base, 1.1),
            Err(OracleError::BadSplitFactor(_))
        ));
        let once = two_characteristics_split(&base, 0.5).unwrap();
        assert!(matches!(
            two_characteristics_split(&once, 0.5),
            Err(OracleError::SplitNeedsPureMu)
        ));
    }

    #[test]
    fn degenerate_log_profile_matches_the_builtin_family() {
        let (spec, mask) = disk_setup(64);
        let case = degenerate_radial_case::<f64>(RadialProfile::Log);
        let sampled = case.sample_pair(spec, &mask).unwrap();
        let builtin =
            builtin_family(BuiltinFamily::RadialLogK { amplitude: 1.0 }, spec, &mask).unwrap();
        for idx in 0..spec.len() {
            let a = sampled.mu().values()[idx];
            let b = builtin.mu().values()[idx];
            assert!((a - b).norm() <= 1e-15, "node {idx}: {a} vs {b}");
        }
    }

    #[test]
    fn degenerate_profiles_have_the_advertised_shapes() {
        let log = degenerate_radial_case::<f64>(RadialProfile::Log);
        assert!(((log.dilatation)(0.1) - (1.0 + 10.0f64.ln())).abs() < 1e-14);

        let loglog = degenerate_radial_case::<f64>(RadialProfile::LogLog);
        assert!(((loglog.dilatation)(1.0) - 1.0).abs() < 1e-14);
        assert!((loglog.dilatation)(1e-6) < (log.dilatation)(1e-6));

        let exp = degenerate_radial_case::<f64>(RadialProfile::Exp);
        // |μ| saturates to exactly 1 where K overflows, with no NaN anywhere.
        let deep = (exp.mu)(C64::new(1e-3, 0.0));
        assert_eq!(deep.norm(), 1.0);
        assert!(deep.re.is_finite() && deep.im.is_finite());
        // (K−1)/(K+1) = tanh(1/(2r)) ties the two closed forms together.
        let r = 0.2;
        let k = (exp.dilatation)(r);
        assert!(((exp.mu)(C64::new(r, 0.0)).norm() - (k - 1.0) / (k + 1.0)).abs() < 1e-12);

        for case in [&log, &loglog] {
            assert!(case.expected_fmo.admits(Verdict::Satisfied));
            assert!(!case.expected_fmo.admits(Verdict::Violated));
        }
        assert!(exp.expected_fmo.admits(Verdict::Violated));
        assert!(exp.expected_fmo.admits(Verdict::Inconclusive));
        assert!(!exp.expected_fmo.admits(Verdict::Satisfied));
    }

    #[test]
    fn criteria_battery_reaches_the_expected_verdicts() {
        let cfg = CriteriaConfig::default();
        let (spec, mask) = disk_setup(256);
        let origin = [C64::new(0.0, 0.0)];
        for profile in [RadialProfile::Log, RadialProfile::LogLog, RadialProfile::Exp] {
            let case = degenerate_radial_case::<f64>(profile);
            let pair = case.sample_pair(spec, &mask).unwrap();

            let report = criteria_report(&pair, None, &origin, &cfg);
            let fmo = report.fmo[0].verdict.verdict;
            assert!(
                case.expected_fmo.admits(fmo),
                "{}: fmo verdict {fmo}",
                case.description
            );

            // The radial divergence test gets the closed-form profile: the
            // expectation separates integrands over many decades of radius,
            // which grid circles cannot reach.
            let inner = if profile == RadialProfile::Exp { 2e-3 } else { 1e-7 };
            let radii: Vec<f64> = (0..16)
                .map(|j| inner * (0.5f64 / inner).powf(j as f64 / 15.0))
                .collect();
            let values: Vec<f64> = radii.iter().map(|&r| (case.dilatation)(r)).collect();
            let lehto = lehto_divergence_test(&radii, &values, &cfg).unwrap();
            assert!(
                case.expected_lehto.admits(lehto.verdict),
                "{}: lehto verdict {} with {:?}",
                case.description,
                lehto.verdict,
                lehto.evidence
            );

            let (_, expi) = exp_integrability(&pair.dilatation(), 1.0, &cfg).unwrap();
            assert!(
                case.expected_exp_integrability.admits(expi.verdict),
                "{}: exp-integrability verdict {} with {:?}",
                case.description,
                expi.verdict,
                expi.evidence
            );
        }
    }

    #[test]
    fn brute_force_of_zero_is_zero() {
        let spec = GridSpec::centered(1.3, 32).unwrap();
        let out = brute_force_beurling(&ComplexField::<f64>::zeros(spec)).unwrap();
        assert_eq!(out.sup_norm(), 0.0);
    }

    #[test]
    fn brute_force_reproduces_the_disk_indicator_transform() {
        // S[χ_D] = 0 inside the unit disk and −1/z² outside it. 32 is the
        // largest grid side under the quadrature's cost guard.
        let spec = GridSpec::centered(1.1, 32).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let density = ComplexField::from_fn(spec, |z| if z.norm() < 1.0 { one } else { zero });
        let s = brute_force_beurling(&density).unwrap();
        let band = 2.0 * spec.step();
        let mut worst = 0.0f64;
        for (ix, iy, z) in spec.iter_points() {
            if (z.norm() - 1.0).abs() <= band {
                continue;
            }
            let want = if z.norm() < 1.0 { zero } else { -one / (z * z) };
            worst = worst.max((s.at(ix, iy) - want).norm());
        }
        assert!(worst < 0.05, "sup error {worst} away from the jump");
    }

    /// A bump exactly supported on `|z| < cap`, flat near the center, all
    /// derivatives bounded — the support guard of the spectral path sees
    /// true zeros at the grid edge.
    fn smooth_cutoff(r: f64, cap: f64) -> f64 {
        let u = r / cap;
        if u >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    #[test]
    fn brute_force_agrees_with_the_spectral_path() {
        let spec = GridSpec::centered(1.3, 32).unwrap();
        for seed in [7u64, 11, 12] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let density = ComplexField::from_fn(spec, |z| {
                (coeffs[0] * z + coeffs[1] * z.conj()).scale(smooth_cutoff(z.norm(), 1.1))
            });

            let brute = brute_force_beurling(&density).unwrap();
            let mut op = BeurlingOperator::for_spec(spec);
            let fast = op.apply(&density).unwrap();

            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for idx in 0..spec.len() {
                num += (brute.values()[idx] - fast.values()[idx]).norm_sqr();
                den += fast.values()[idx].norm_sqr();
            }
            let rel = (num / den).sqrt();
            assert!(rel < 0.02, "seed {seed}: relative L² gap {rel}");
        }
    }

    #[test]
    fn brute_force_rejects_large_grids() {
        let spec = GridSpec::centered(1.3, 64).unwrap();
        let density = ComplexField::<f64>::zeros(spec);
        assert!(matches!(
            brute_force_beurling(&density),
            Err(OracleError::GridTooLarge { got: 64, max: 48 })
        ));
    }
}
