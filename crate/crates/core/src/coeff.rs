//! Coefficient pairs `(μ, ν)`, their dilatation, and truncation ladders.
//!
//! A measurable pair with `|μ| + |ν| < 1` a.e. has pointwise dilatation
//!
//! ```text
//!     K(z) = (1 + |μ(z)| + |ν(z)|) / (1 − |μ(z)| − |ν(z)|),
//! ```
//!
//! which is unbounded for degenerate problems. The solver never works with a
//! degenerate pair directly: it climbs a ladder of truncations
//! `(μ_n, ν_n) = (μ, ν)·[K ≤ n]`, each uniformly elliptic with
//! `K_{μ_n,ν_n} ≤ n`.
//!
//! Nodes where `|μ| + |ν|` reaches `1` (up to a relative `1e-14`) are flagged
//! as degenerate rather than rejected; their dilatation is `+inf` and every
//! truncation removes them.

use num_complex::Complex;
use thiserror::Error;

use crate::grid::{ComplexField, DomainMask, GridError, GridSpec, RealField};
use crate::scalar::Real;

/// Relative margin below `|μ|+|ν| = 1` at which a node counts as degenerate.
pub const DEGENERATE_MARGIN: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("mu, nu, and mask must share one grid")]
    GridMismatch,
    #[error("|mu|+|nu| = {sum} > 1 at node ({ix}, {iy}); not a Beltrami coefficient pair")]
    NotContractive { ix: usize, iy: usize, sum: f64 },
    #[error("truncation level must be >= 1, got {0}")]
    BadLevel(f64),
    #[error("ladder levels must be strictly increasing and >= 2, got {0:?}")]
    BadLadder(Vec<u32>),
}

/// A coefficient pair for the two-characteristic Beltrami equation, together
/// with the domain mask it lives on. Both fields vanish outside the mask.
#[derive(Clone, Debug)]
pub struct CoefficientPair<T> {
    mu: ComplexField<T>,
    nu: ComplexField<T>,
    mask: DomainMask<T>,
    degenerate: Vec<bool>,
}

impl<T: Real> CoefficientPair<T> {
    /// Builds a pair from raw fields. Values outside the mask are zeroed;
    /// masked nodes must satisfy `|μ| + |ν| ≤ 1` (equality flags the node as
    /// degenerate).
    pub fn new(
        mu: ComplexField<T>,
        nu: ComplexField<T>,
        mask: DomainMask<T>,
    ) -> Result<Self, CoeffError> {
        if mu.spec() != nu.spec() || mu.spec() != mask.spec() {
            return Err(CoeffError::GridMismatch);
        }
        let n = mask.spec().n();
        let zero = Complex::new(T::zero(), T::zero());
        let mut mu = mu;
        let mut nu = nu;
        let mut degenerate = vec![false; mask.spec().len()];
        let slack = T::of(4.0) * T::epsilon();
        for idx in 0..mask.spec().len() {
            if !mask.flags()[idx] {
                mu.values_mut()[idx] = zero;
                nu.values_mut()[idx] = zero;
                continue;
            }
            let s = mu.values()[idx].norm() + nu.values()[idx].norm();
            if s > T::one() + slack {
                return Err(CoeffError::NotContractive {
                    ix: idx % n,
                    iy: idx / n,
                    sum: s.as_f64(),
                });
            }
            if s >= T::one() - T::of(DEGENERATE_MARGIN) {
                degenerate[idx] = true;
            }
        }
        Ok(CoefficientPair { mu, nu, mask, degenerate })
    }

    /// The identically-zero pair on the given mask.
    pub fn zero(spec: GridSpec<T>, mask: DomainMask<T>) -> Result<Self, CoeffError> {
        Self::new(ComplexField::zeros(spec), ComplexField::zeros(spec), mask)
    }

    #[inline]
    pub fn spec(&self) -> GridSpec<T> {
        self.mu.spec()
    }

    #[inline]
    pub fn mu(&self) -> &ComplexField<T> {
        &self.mu
    }

    #[inline]
    pub fn nu(&self) -> &ComplexField<T> {
        &self.nu
    }

    #[inline]
    pub fn mask(&self) -> &DomainMask<T> {
        &self.mask
    }

    /// Flags of nodes where `|μ|+|ν|` reaches 1 up to [`DEGENERATE_MARGIN`].
    #[inline]
    pub fn degenerate_flags(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&b| b).count()
    }

    /// Essential supremum of `|μ| + |ν|` over the mask (1.0 if any node is
    /// degenerate).
    pub fn k_inf(&self) -> T {
        let mut s = T::zero();
        for idx in self.mask.indices() {
            s = s.max(self.mu.values()[idx].norm() + self.nu.values()[idx].norm());
        }
        s.min(T::one())
    }

    /// Pointwise dilatation of the pair.
    pub fn dilatation(&self) -> DilatationField<T> {
        let spec = self.spec();
        let one = T::one();
        let margin = T::of(DEGENERATE_MARGIN);
        let mut values = Vec::with_capacity(spec.len());
        for idx in 0..spec.len() {
            let s = self.mu.values()[idx].norm() + self.nu.values()[idx].norm();
            let k = if s >= one - margin {
                T::infinity()
            } else {
                (one + s) / (one - s)
            };
            values.push(k);
        }
        DilatationField {
            values: RealField::new(spec, values).expect("length matches by construction"),
            degenerate: self.degenerate.clone(),
            mask: self.mask.clone(),
        }
    }

    /// The level-`n` truncation: the pair where `K ≤ n`, zero elsewhere.
    pub fn truncate(&self, level: T) -> Result<CoefficientPair<T>, CoeffError> {
        if !(level >= T::one()) {
            return Err(CoeffError::BadLevel(level.as_f64()));
        }
        let k = self.dilatation();
        let zero = Complex::new(T::zero(), T::zero());
        let mut mu = self.mu.clone();
        let mut nu = self.nu.clone();
        let mut degenerate = vec![false; self.mask.spec().len()];
        for idx in 0..self.mask.spec().len() {
            if k.values.values()[idx] <= level {
                degenerate[idx] = self.degenerate[idx];
            } else {
                mu.values_mut()[idx] = zero;
                nu.values_mut()[idx] = zero;
            }
        }
        Ok(CoefficientPair { mu, nu, mask: self.mask.clone(), degenerate })
    }
}

/// Extended-real dilatation samples together with degeneracy flags.
#[derive(Clone, Debug)]
pub struct DilatationField<T> {
    values: RealField<T>,
    degenerate: Vec<bool>,
    mask: DomainMask<T>,
}

impl<T: Real> DilatationField<T> {
    #[inline]
    pub fn values(&self) -> &RealField<T> {
        &self.values
    }

    #[inline]
    pub fn degenerate_flags(&self) -> &[bool] {
        &self.degenerate
    }

    #[inline]
    pub fn mask(&self) -> &DomainMask<T> {
        &self.mask
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&b| b).count()
    }

    /// Largest finite dilatation over masked nodes.
    pub fn sup_finite(&self) -> T {
        let mut s = T::one();
        for idx in self.mask.indices() {
            let k = self.values.values()[idx];
            if k.is_finite() {
                s = s.max(k);
            }
        }
        s
    }

    /// Grid integral `step² Σ K` over non-degenerate masked nodes.
    pub fn grid_integral(&self) -> T {
        let step = self.values.spec().step();
        let mut s = T::zero();
        for idx in self.mask.indices() {
            let k = self.values.values()[idx];
            if k.is_finite() {
                s += k;
            }
        }
        s * step * step
    }
}

/// A strictly increasing family of truncations of one coefficient pair.
#[derive(Clone, Debug)]
pub struct TruncationLadder<T> {
    levels: Vec<u32>,
    pairs: Vec<CoefficientPair<T>>,
}

impl<T: Real> TruncationLadder<T> {
    pub fn new(pair: &CoefficientPair<T>, levels: &[u32]) -> Result<Self, CoeffError> {
        if levels.is_empty()
            || levels[0] < 2
            || levels.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(CoeffError::BadLadder(levels.to_vec()));
        }
        let mut pairs = Vec::with_capacity(levels.len());
        for &lv in levels {
            pairs.push(pair.truncate(T::of(f64::from(lv)))?);
        }
        Ok(TruncationLadder { levels: levels.to_vec(), pairs })
    }

    #[inline]
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    #[inline]
    pub fn pairs(&self) -> &[CoefficientPair<T>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// The default ladder `2, 4, 8, …, 2^k`.
pub fn default_levels(k: u32) -> Vec<u32> {
    (1..=k.max(1)).map(|j| 1u32 << j).collect()
}

/// Lifts a reduced-equation coefficient `λ` (for
/// `∂z̄ f = λ Re(∂z f)`) to the equivalent pair `μ = ν = λ/2`.
pub fn from_reduced<T: Real>(
    lambda: &ComplexField<T>,
    mask: &DomainMask<T>,
) -> Result<CoefficientPair<T>, CoeffError> {
    let half = T::of(0.5);
    CoefficientPair::new(
        lambda.map(|v| v.scale(half)),
        lambda.map(|v| v.scale(half)),
        mask.clone(),
    )
}

/// Builds the pair `(μ, μ·e^{iθ})` from a base coefficient and a phase field.
/// The dilatation depends only on `|μ|`, not on `θ`.
pub fn from_phase_form<T: Real>(
    mu: &ComplexField<T>,
    theta: &RealField<T>,
    mask: &DomainMask<T>,
) -> Result<CoefficientPair<T>, CoeffError> {
    if mu.spec() != theta.spec() {
        return Err(CoeffError::GridMismatch);
    }
    let spec = mu.spec();
    let mut nu = Vec::with_capacity(spec.len());
    for idx in 0..spec.len() {
        let t = theta.values()[idx];
        nu.push(mu.values()[idx] * Complex::new(t.cos(), t.sin()));
    }
    CoefficientPair::new(mu.clone(), ComplexField::new(spec, nu)?, mask.clone())
}

/// Built-in coefficient families used by the CLI and the test batteries.
#[derive(Clone, Copy, Debug)]
pub enum BuiltinFamily<T> {
    /// `μ = ν = 0`: the Cauchy–Riemann system.
    Zero,
    /// Constant coefficients on the mask.
    Constant { mu: Complex<T>, nu: Complex<T> },
    /// Coefficient of the radial stretch `h(z) = z·|z|^{a−1}`:
    /// `μ = ((a−1)/(a+1))·z/z̄`, `ν = 0`; constant dilatation `max(a, 1/a)`.
    RadialPower { exponent: T },
    /// Radial profile `K(r) = 1 + amplitude·log(1/r)` for `r < 1` realized
    /// with `ν = 0` and stretch-type phase.
    RadialLogK { amplitude: T },
    /// `μ = modulus·z/z̄` and `ν = μ·e^{i·winding·arg z}`.
    PhaseForm { modulus: T, winding: i32 },
    /// Constant reduced coefficient `λ`, lifted via `μ = ν = λ/2`.
    ReducedConstant { lambda: Complex<T> },
}

/// Samples a built-in family on a grid over the given mask.
pub fn builtin_family<T: Real>(
    family: BuiltinFamily<T>,
    spec: GridSpec<T>,
    mask: &DomainMask<T>,
) -> Result<CoefficientPair<T>, CoeffError> {
    let zero = Complex::new(T::zero(), T::zero());
    // z/z̄ = e^{2i·arg z}; zero at the origin node where the phase is undefined.
    let phase2 = |z: Complex<T>| -> Complex<T> {
        let n2 = z.norm_sqr();
        if n2 == T::zero() {
            zero
        } else {
            z * z / n2
        }
    };
    let (mu, nu) = match family {
        BuiltinFamily::Zero => (ComplexField::zeros(spec), ComplexField::zeros(spec)),
        BuiltinFamily::Constant { mu, nu } => (
            ComplexField::from_fn(spec, |_| mu),
            ComplexField::from_fn(spec, |_| nu),
        ),
        BuiltinFamily::RadialPower { exponent } => {
            let a = exponent;
            let c = (a - T::one()) / (a + T::one());
            (
                ComplexField::from_fn(spec, |z| phase2(z).scale(c)),
                ComplexField::zeros(spec),
            )
        }
        BuiltinFamily::RadialLogK { amplitude } => {
            let mu = ComplexField::from_fn(spec, |z| {
                let r = z.norm();
                if r <= T::zero() || r >= T::one() {
                    return zero;
                }
                let l = amplitude * (T::one() / r).ln();
                // K = 1 + l ⇒ |μ| = (K−1)/(K+1) = l/(2+l), stretch phase −z/z̄.
                let m = l / (T::of(2.0) + l);
                -phase2(z).scale(m)
            });
            (mu, ComplexField::zeros(spec))
        }
        BuiltinFamily::PhaseForm { modulus, winding } => {
            let mu = ComplexField::from_fn(spec, |z| phase2(z).scale(modulus));
            let nu = ComplexField::from_fn(spec, |z| {
                let m = phase2(z).scale(modulus);
                let t = T::of(f64::from(winding)) * z.im.atan2(z.re);
                m * Complex::new(t.cos(), t.sin())
            });
            (mu, nu)
        }
        BuiltinFamily::ReducedConstant { lambda } => {
            let half = lambda.scale(T::of(0.5));
            (
                ComplexField::from_fn(spec, |_| half),
                ComplexField::from_fn(spec, |_| half),
            )
        }
    };
    CoefficientPair::new(mu, nu, mask.clone())
}
