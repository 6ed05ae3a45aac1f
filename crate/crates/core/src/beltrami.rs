//! The linear Beltrami equation `G_z̄ = μ̃·G_z` with bounded dilatation.
//!
//! The two-characteristic equation is reduced to this single-coefficient form
//! by folding the `ν` term into an effective coefficient
//!
//! ```text
//!     μ̃ = μ + ν · (conj(h_z)/h_z) · (conj(A′(h))/A′(h)),
//! ```
//!
//! whose modulus is `|μ| + |ν|` wherever the unimodular factors are defined
//! (and `|μ̃| ≤ |μ| + |ν|` after the degenerate factors are replaced by `1`).
//! The global principal solution is produced by the Neumann iteration
//! `ω ← μ̃ + μ̃·S[ω]` — a contraction with ratio `k∞ = sup|μ̃| < 1` in `L²`
//! since the Beurling transform `S` is an isometry — followed by
//! `G = z + C[ω]`. Composing with the disk map of the image region factors
//! `G` through the unit disk: `h = R_G ∘ G` maps the original domain onto the
//! disk and carries the same Beltrami coefficient.

use num_complex::Complex;
use thiserror::Error;

use crate::coeff::CoefficientPair;
use crate::conformal::{ConformalError, DiskMap, JordanBoundary, Normalization};
use crate::grid::{wirtinger_derivatives, ComplexField, DomainMask};
use crate::scalar::Real;
use crate::transforms::{AnalyticFunction, BeurlingOperator, CauchyOperator, TransformError};

#[derive(Debug, Error)]
pub enum BeltramiError {
    #[error("effective coefficient reaches modulus {modulus} >= 1 at node {node}")]
    CoefficientNotElliptic { node: usize, modulus: f64 },
    #[error("coefficient bound k∞ = {0} is not < 1")]
    NotContracting(f64),
    #[error(
        "Neumann iteration did not reach tol within {max_iter} iterations \
         (last contraction ratio {last_ratio})"
    )]
    MaxIterExceeded { max_iter: usize, last_ratio: f64 },
    #[error("image of the boundary under G is not a usable Jordan curve: {0}")]
    ImageCurve(#[from] ConformalError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("boundary vertex {0} maps outside the sample grid")]
    ImageLeavesGrid(usize),
}

// ---------------------------------------------------------------------------
// Effective coefficient
// ---------------------------------------------------------------------------

/// The folded single coefficient `μ̃` together with its sup bound.
#[derive(Clone, Debug)]
pub struct EffectiveCoefficient<T> {
    mutilde: ComplexField<T>,
    bound: T,
}

impl<T: Real> EffectiveCoefficient<T> {
    #[inline]
    pub fn field(&self) -> &ComplexField<T> {
        &self.mutilde
    }

    /// `k∞ = max |μ̃|` over the grid.
    #[inline]
    pub fn bound(&self) -> T {
        self.bound
    }
}

/// `conj(w)/w` normalized back to exact unit modulus, or `1` when `w`
/// vanishes or is not finite.
#[inline]
fn unimodular_ratio<T: Real>(w: Complex<T>) -> Complex<T> {
    let n2 = w.norm_sqr();
    if n2 == T::zero() || !n2.is_finite() {
        return Complex::new(T::one(), T::zero());
    }
    let u = w.conj() / w;
    u.unscale(u.norm())
}

/// Builds `μ̃` from the coefficient pair and the current factorization pieces,
/// with the derivative of `h` and `A′∘h` already evaluated per node.
///
/// Outside the pair's mask the result is zero. Where `h_z` or `A′(h)`
/// vanishes, the corresponding unimodular factor is taken to be `1`.
pub fn effective_coefficient_from_parts<T: Real>(
    pair: &CoefficientPair<T>,
    h_z: &ComplexField<T>,
    a_prime_at_h: &ComplexField<T>,
) -> Result<EffectiveCoefficient<T>, BeltramiError> {
    let spec = pair.spec();
    let mut values = vec![Complex::new(T::zero(), T::zero()); spec.len()];
    let mu = pair.mu().values();
    let nu = pair.nu().values();
    let mut bound = T::zero();
    for idx in pair.mask().indices() {
        let u = unimodular_ratio(h_z.values()[idx]) * unimodular_ratio(a_prime_at_h.values()[idx]);
        let u = u.unscale(u.norm());
        let mt = mu[idx] + nu[idx] * u;
        let m = mt.norm();
        if !(m < T::one()) {
            return Err(BeltramiError::CoefficientNotElliptic {
                node: idx,
                modulus: m.as_f64(),
            });
        }
        bound = bound.max(m);
        values[idx] = mt;
    }
    let mutilde = ComplexField::new(spec, values).expect("sized to the spec");
    Ok(EffectiveCoefficient { mutilde, bound })
}

/// Builds `μ̃` from a coefficient pair, an analytic outer factor `A`, and a
/// disk factor `h` given as a grid field (its `z`-derivative is taken by
/// finite differences).
pub fn effective_coefficient<T: Real>(
    pair: &CoefficientPair<T>,
    a: &AnalyticFunction<T>,
    h: &ComplexField<T>,
) -> Result<EffectiveCoefficient<T>, BeltramiError> {
    let (h_z, _) = wirtinger_derivatives(h);
    let a_prime = h.map(|hv| a.derivative_clamped(hv));
    effective_coefficient_from_parts(pair, &h_z, &a_prime)
}

// ---------------------------------------------------------------------------
// Principal solution
// ---------------------------------------------------------------------------

/// Global solution of `G_z̄ = μ̃·G_z` with `G(0) = 0` and `G(z) ≈ z` far from
/// the coefficient support.
#[derive(Clone, Debug)]
pub struct PrincipalSolution<T> {
    /// `G = z + C[ω]`, translated so the value at the origin node is `0`.
    pub g: ComplexField<T>,
    /// `G_z = 1 + S[ω]` (spectral derivative, not finite differences).
    pub g_z: ComplexField<T>,
    /// The solved density `ω = G_z̄`.
    pub omega: ComplexField<T>,
    /// `‖Δω‖₂` after each iteration.
    pub increments: Vec<T>,
    /// The constant subtracted to enforce `G(0) = 0`.
    pub translation: Complex<T>,
}

impl<T: Real> PrincipalSolution<T> {
    /// Fraction of grid nodes with positive Jacobian `|G_z|² − |G_z̄|²`.
    pub fn jacobian_positive_fraction(&self) -> T {
        let total = self.g_z.values().len();
        let positive = self
            .g_z
            .values()
            .iter()
            .zip(self.omega.values())
            .filter(|(gz, om)| gz.norm_sqr() > om.norm_sqr())
            .count();
        T::of(positive as f64) / T::of(total as f64)
    }
}

/// Runs the Neumann iteration `ω ← μ̃ + μ̃·S[ω]`, optionally warm-started,
/// then integrates `G = z + C[ω]`.
pub fn principal_solution_with_start<T: Real>(
    coeff: &EffectiveCoefficient<T>,
    start: Option<&ComplexField<T>>,
    tol: T,
    max_iter: usize,
) -> Result<PrincipalSolution<T>, BeltramiError> {
    let k_inf = coeff.bound();
    if !(k_inf < T::one()) {
        return Err(BeltramiError::NotContracting(k_inf.as_f64()));
    }
    let spec = coeff.field().spec();
    let mut beurling = BeurlingOperator::for_spec(spec);

    let mut omega = match start {
        Some(w) => w.clone(),
        None => coeff.field().clone(),
    };
    let mut increments = Vec::new();
    let mut done = false;
    for _ in 0..max_iter {
        let s_omega = beurling.apply(&omega)?;
        let next = coeff
            .field()
            .zip_map(&s_omega, |mt, sw| mt + mt * sw)
            .expect("transform preserves the grid");
        let delta = next
            .values()
            .iter()
            .zip(omega.values())
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
            * spec.step();
        increments.push(delta);
        omega = next;
        if delta <= tol * omega.l2_norm() {
            done = true;
            break;
        }
    }
    if !done {
        let last_ratio = if increments.len() >= 2 {
            let a = increments[increments.len() - 1];
            let b = increments[increments.len() - 2];
            if b > T::zero() {
                (a / b).as_f64()
            } else {
                0.0
            }
        } else {
            f64::NAN
        };
        return Err(BeltramiError::MaxIterExceeded { max_iter, last_ratio });
    }

    let g_z = beurling.apply(&omega)?.map(|s| s + Complex::new(T::one(), T::zero()));
    let mut cauchy = CauchyOperator::for_spec(spec);
    let c = cauchy.apply(&omega)?;
    let (ox, oy) = spec
        .nearest(Complex::new(T::zero(), T::zero()))
        .expect("grid covers the origin");
    let translation = c.at(ox, oy) + spec.point(ox, oy);
    let mut g_values = Vec::with_capacity(spec.len());
    for (idx, (_, _, z)) in spec.iter_points().enumerate() {
        g_values.push(z + c.values()[idx] - translation);
    }
    let g = ComplexField::new(spec, g_values).expect("sized to the spec");
    Ok(PrincipalSolution { g, g_z, omega, increments, translation })
}

/// The cold-started form of [`principal_solution_with_start`] (`ω₀ = μ̃`).
pub fn principal_solution<T: Real>(
    coeff: &EffectiveCoefficient<T>,
    tol: T,
    max_iter: usize,
) -> Result<PrincipalSolution<T>, BeltramiError> {
    principal_solution_with_start(coeff, None, tol, max_iter)
}

// ---------------------------------------------------------------------------
// Disk factorization
// ---------------------------------------------------------------------------

/// `h = R_G ∘ G` on the domain mask, together with the pieces it was built
/// from.
#[derive(Clone, Debug)]
pub struct DiskFactorization<T> {
    /// `h` sampled on the mask (zero outside).
    pub h: ComplexField<T>,
    /// Chain-rule derivative `R_G′(G)·G_z` on the mask (zero outside).
    pub h_z: ComplexField<T>,
    /// Disk map of the image region `G(D)`, normalized by the marked vertex.
    pub map: DiskMap<T>,
    /// The image curve `G(∂D)`.
    pub image: JordanBoundary<T>,
}

#[inline]
fn finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Nearest point of the polygon boundary to `z`: the edge index, the
/// parameter along that edge, the foot point, its distance, and the unit
/// inward normal (the interior lies left of the oriented edge).
struct EdgeFoot<T> {
    edge: usize,
    t: T,
    point: Complex<T>,
    dist: T,
    inward: Complex<T>,
}

fn nearest_edge<T: Real>(poly: &JordanBoundary<T>, z: Complex<T>) -> EdgeFoot<T> {
    let vs = poly.vertices();
    let m = vs.len();
    let mut best = EdgeFoot {
        edge: 0,
        t: T::zero(),
        point: vs[0],
        dist: T::infinity(),
        inward: Complex::new(T::zero(), T::zero()),
    };
    for j in 0..m {
        let a = vs[j];
        let b = vs[(j + 1) % m];
        let e = b - a;
        let len2 = e.norm_sqr();
        if len2 == T::zero() {
            continue;
        }
        let t = (((z - a) * e.conj()).re / len2).max(T::zero()).min(T::one());
        let p = a + e.scale(t);
        let d = (z - p).norm();
        if d < best.dist {
            let inv_len = len2.sqrt().recip();
            best = EdgeFoot {
                edge: j,
                t,
                point: p,
                dist: d,
                inward: Complex::new(-e.im, e.re).scale(inv_len),
            };
        }
    }
    best
}

/// Factors a principal solution through the unit disk over a Jordan domain:
/// maps the image region `G(D)` conformally onto the disk and composes.
///
/// `marked` is the boundary vertex whose image is pinned to angle `0`;
/// `refine` is the edge-subdivision factor of the image-curve disk map.
pub fn disk_homeomorphism<T: Real>(
    sol: &PrincipalSolution<T>,
    domain: &JordanBoundary<T>,
    mask: &DomainMask<T>,
    marked: usize,
    refine: usize,
) -> Result<DiskFactorization<T>, BeltramiError> {
    // Image curve: G interpolated at the boundary vertices.
    let mut image_vertices = Vec::with_capacity(domain.len());
    for (j, &v) in domain.vertices().iter().enumerate() {
        let w = sol.g.interp(v).ok_or(BeltramiError::ImageLeavesGrid(j))?;
        image_vertices.push(w);
    }
    let image = JordanBoundary::new(image_vertices)?;
    let map = DiskMap::new(&image, Normalization::MarkedVertex(marked), refine)?;

    let spec = sol.g.spec();
    let indices: Vec<usize> = mask.indices().collect();
    let g_at: Vec<Complex<T>> = indices.iter().map(|&i| sol.g.values()[i]).collect();
    let mut mapped = Vec::new();
    let mut deriv = Vec::new();
    map.map_slice_with_derivative(&g_at, &mut mapped, &mut deriv);

    // Grid values of G at extreme rim nodes can stray outside the inscribed
    // image polygon (the polygon runs through interpolated vertex images and
    // its chords cut inside the curve). The chain maps such points across a
    // branch cut, landing them at an unrelated boundary angle. For each such
    // node the correct disk point is on the circle between the images of the
    // two enclosing vertices, whose angles the map already tracks; the
    // derivative is taken at a safely interior point nearby.
    let rim = T::one() - T::of(1e-3);
    let two_pi = T::PI() + T::PI();
    let angles = map.boundary_angles();
    for (pos, w) in mapped.iter_mut().enumerate() {
        if finite(*w) && w.norm() < rim {
            continue;
        }
        let g = g_at[pos];
        if image.contains(g) {
            continue;
        }
        let foot = nearest_edge(&image, g);
        let th0 = angles[foot.edge];
        let th1 = if foot.edge + 1 < angles.len() {
            angles[foot.edge + 1]
        } else {
            angles[0] + two_pi
        };
        let theta = th0 + (th1 - th0) * foot.t;
        *w = Complex::new(theta.cos(), theta.sin());
        let pull = (foot.dist + foot.dist).max(image.radius_bound() * T::of(1e-6));
        let inside = foot.point + foot.inward.scale(pull);
        let (_, dw) = map.map_with_derivative(inside);
        if finite(dw) {
            deriv[pos] = dw;
        }
    }

    let zero = Complex::new(T::zero(), T::zero());
    let mut h_values = vec![zero; spec.len()];
    let mut hz_values = vec![zero; spec.len()];
    for (pos, &idx) in indices.iter().enumerate() {
        h_values[idx] = mapped[pos];
        hz_values[idx] = deriv[pos] * sol.g_z.values()[idx];
    }
    Ok(DiskFactorization {
        h: ComplexField::new(spec, h_values).expect("sized to the spec"),
        h_z: ComplexField::new(spec, hz_values).expect("sized to the spec"),
        map,
        image,
    })
}
