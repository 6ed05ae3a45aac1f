//! Singular integral transforms and boundary integrals.
//!
//! Three operators drive the solver:
//!
//! * the **Cauchy transform** `C[ω](z) = (1/π) ∬ ω(ζ)/(z−ζ) dA(ζ)`, the
//!   right inverse of `∂/∂z̄` (`∂z̄ C[ω] = ω`), discretized as an explicit
//!   kernel quadrature with weights `step²/(π·(z_i−z_j))` and zero self
//!   weight, evaluated as an exact linear convolution on a `2n × 2n`
//!   zero-padded grid;
//! * the **Beurling transform** `S = ∂z ∘ C`, applied spectrally through the
//!   Fourier multiplier `conj(ξ)/ξ` (zero at the zero frequency) on the same
//!   zero-padded grid — a unitary multiplier, so the discrete transform is an
//!   exact isometry on mean-free data;
//! * the **Schwarz integral** of real boundary data `φ` on the unit circle,
//!   `A(w) = (1/2πi) ∮ φ(ζ) (ζ+w)/(ζ−w) dζ/ζ`, the analytic function with
//!   `Re A = φ` on the boundary and `Im A(0) = 0`, computed by a DFT of the
//!   boundary samples and returned as a truncated Taylor series.

use num_complex::Complex;
use thiserror::Error;

use crate::grid::{ComplexField, GridError, GridSpec};
use crate::scalar::Real;

mod fft;
use fft::Fft2;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("density support touches the grid edge; the grid needs a padding margin")]
    SupportTouchesEdge,
    #[error("boundary function must have at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("boundary sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("boundary function lives on {got:?}, expected {want:?}")]
    WrongCurve { want: BoundaryCurve, got: BoundaryCurve },
    #[error("evaluation point with |w| = {modulus} is outside the open unit disk")]
    EvalOutsideDisk { modulus: f64 },
    #[error("operator built for grid size {built}, applied to size {got}")]
    SizeMismatch { built: usize, got: usize },
}

/// Minimum sample count for boundary functions.
pub const MIN_BOUNDARY_SAMPLES: usize = 16;

// ---------------------------------------------------------------------------
// Compact-support guard
// ---------------------------------------------------------------------------

fn check_compact_support<T: Real>(field: &ComplexField<T>) -> Result<(), TransformError> {
    let n = field.spec().n();
    let tol = T::of(1e-10) * (T::one() + field.sup_norm());
    let mut edge_ok = true;
    for i in 0..n {
        edge_ok &= field.at(i, 0).norm() <= tol;
        edge_ok &= field.at(i, n - 1).norm() <= tol;
        edge_ok &= field.at(0, i).norm() <= tol;
        edge_ok &= field.at(n - 1, i).norm() <= tol;
    }
    if edge_ok {
        Ok(())
    } else {
        Err(TransformError::SupportTouchesEdge)
    }
}

#[inline]
fn signed_freq(j: usize, size: usize) -> i64 {
    if j <= size / 2 {
        j as i64
    } else {
        j as i64 - size as i64
    }
}

// ---------------------------------------------------------------------------
// Beurling transform
// ---------------------------------------------------------------------------

/// Reusable spectral Beurling operator for one grid geometry.
///
/// Building the operator precomputes the multiplier table and FFT plans, so
/// iterative callers pay the setup cost once.
pub struct BeurlingOperator<T> {
    n: usize,
    pad: usize,
    fft: Fft2<T>,
    mult: Vec<Complex<T>>,
    buf: Vec<Complex<T>>,
}

impl<T: Real> BeurlingOperator<T> {
    pub fn for_spec(spec: GridSpec<T>) -> Self {
        let n = spec.n();
        let pad = 2 * n;
        let mut mult = Vec::with_capacity(pad * pad);
        for jy in 0..pad {
            let ky = signed_freq(jy, pad);
            for jx in 0..pad {
                let kx = signed_freq(jx, pad);
                if kx == 0 && ky == 0 {
                    mult.push(Complex::new(T::zero(), T::zero()));
                } else {
                    // conj(ξ)/ξ = conj(ξ)²/|ξ|² with ξ = kx + i·ky.
                    let xi = Complex::new(T::of(kx as f64), T::of(ky as f64));
                    mult.push(xi.conj() * xi.conj() / xi.norm_sqr());
                }
            }
        }
        BeurlingOperator {
            n,
            pad,
            fft: Fft2::new(pad),
            mult,
            buf: vec![Complex::new(T::zero(), T::zero()); pad * pad],
        }
    }

    fn run(&mut self, density: &ComplexField<T>) -> Result<(), TransformError> {
        if density.spec().n() != self.n {
            return Err(TransformError::SizeMismatch { built: self.n, got: density.spec().n() });
        }
        check_compact_support(density)?;
        let (n, pad) = (self.n, self.pad);
        self.buf.fill(Complex::new(T::zero(), T::zero()));
        for iy in 0..n {
            let src = &density.values()[iy * n..(iy + 1) * n];
            self.buf[iy * pad..iy * pad + n].copy_from_slice(src);
        }
        self.fft.forward(&mut self.buf);
        for (v, m) in self.buf.iter_mut().zip(&self.mult) {
            *v = *v * *m;
        }
        self.fft.inverse(&mut self.buf);
        Ok(())
    }

    /// Applies the transform and crops back to the original grid.
    pub fn apply(&mut self, density: &ComplexField<T>) -> Result<ComplexField<T>, TransformError> {
        self.run(density)?;
        let (n, pad) = (self.n, self.pad);
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            out.extend_from_slice(&self.buf[iy * pad..iy * pad + n]);
        }
        Ok(ComplexField::new(density.spec(), out)?)
    }

    /// Applies the transform and returns the full padded-grid result
    /// (side length `2n`), on which the multiplier is an exact isometry.
    pub fn apply_padded(
        &mut self,
        density: &ComplexField<T>,
    ) -> Result<Vec<Complex<T>>, TransformError> {
        self.run(density)?;
        Ok(self.buf.clone())
    }
}

/// One-shot Beurling transform `S[ω]` of a compactly supported density.
pub fn beurling_transform<T: Real>(
    density: &ComplexField<T>,
) -> Result<ComplexField<T>, TransformError> {
    BeurlingOperator::for_spec(density.spec()).apply(density)
}

// ---------------------------------------------------------------------------
// Cauchy transform
// ---------------------------------------------------------------------------

/// Reusable Cauchy transform for one grid geometry.
pub struct CauchyOperator<T> {
    n: usize,
    pad: usize,
    fft: Fft2<T>,
    kernel_hat: Vec<Complex<T>>,
    buf: Vec<Complex<T>>,
}

impl<T: Real> CauchyOperator<T> {
    pub fn for_spec(spec: GridSpec<T>) -> Self {
        let n = spec.n();
        let pad = 2 * n;
        let step = spec.step();
        let weight = step * step / T::PI();
        // Kernel of the quadrature Σ_j ω_j · step²/(π (z_i − z_j)), stored at
        // wrapped displacement indices so the padded circular convolution
        // reproduces the linear one exactly.
        let mut kernel = vec![Complex::new(T::zero(), T::zero()); pad * pad];
        for dy in -(n as i64 - 1)..=(n as i64 - 1) {
            let jy = dy.rem_euclid(pad as i64) as usize;
            for dx in -(n as i64 - 1)..=(n as i64 - 1) {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let jx = dx.rem_euclid(pad as i64) as usize;
                let d = Complex::new(T::of(dx as f64) * step, T::of(dy as f64) * step);
                kernel[jy * pad + jx] = d.inv().scale(weight);
            }
        }
        let mut fft = Fft2::new(pad);
        fft.forward(&mut kernel);
        CauchyOperator {
            n,
            pad,
            fft,
            kernel_hat: kernel,
            buf: vec![Complex::new(T::zero(), T::zero()); pad * pad],
        }
    }

    pub fn apply(&mut self, density: &ComplexField<T>) -> Result<ComplexField<T>, TransformError> {
        if density.spec().n() != self.n {
            return Err(TransformError::SizeMismatch { built: self.n, got: density.spec().n() });
        }
        check_compact_support(density)?;
        let (n, pad) = (self.n, self.pad);
        self.buf.fill(Complex::new(T::zero(), T::zero()));
        for iy in 0..n {
            let src = &density.values()[iy * n..(iy + 1) * n];
            self.buf[iy * pad..iy * pad + n].copy_from_slice(src);
        }
        self.fft.forward(&mut self.buf);
        for (v, k) in self.buf.iter_mut().zip(&self.kernel_hat) {
            *v = *v * *k;
        }
        self.fft.inverse(&mut self.buf);
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            out.extend_from_slice(&self.buf[iy * pad..iy * pad + n]);
        }
        Ok(ComplexField::new(density.spec(), out)?)
    }
}

/// One-shot Cauchy transform `C[ω]` of a compactly supported density.
pub fn cauchy_transform<T: Real>(
    density: &ComplexField<T>,
) -> Result<ComplexField<T>, TransformError> {
    CauchyOperator::for_spec(density.spec()).apply(density)
}

// ---------------------------------------------------------------------------
// Boundary functions
// ---------------------------------------------------------------------------

/// Which curve a boundary sample vector is parameterized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCurve {
    /// Equispaced angles `θ_j = 2πj/m` on the unit circle.
    UnitCircle,
    /// The vertex sequence of a Jordan boundary polygon.
    DomainVertices,
}

/// Real samples of a boundary datum at equispaced parameters of a curve.
#[derive(Clone, Debug)]
pub struct BoundaryFunction<T> {
    samples: Vec<T>,
    curve: BoundaryCurve,
}

impl<T: Real> BoundaryFunction<T> {
    pub fn new(samples: Vec<T>, curve: BoundaryCurve) -> Result<Self, TransformError> {
        if samples.len() < MIN_BOUNDARY_SAMPLES {
            return Err(TransformError::TooFewSamples {
                min: MIN_BOUNDARY_SAMPLES,
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(TransformError::NonFiniteSample { index });
        }
        Ok(BoundaryFunction { samples, curve })
    }

    /// Samples a function of the angle on the unit circle.
    pub fn on_circle(m: usize, mut f: impl FnMut(T) -> T) -> Result<Self, TransformError> {
        let two_pi = T::PI() + T::PI();
        let samples = (0..m)
            .map(|j| f(two_pi * T::of(j as f64) / T::of(m as f64)))
            .collect();
        Self::new(samples, BoundaryCurve::UnitCircle)
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    #[inline]
    pub fn curve(&self) -> BoundaryCurve {
        self.curve
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when the sampled values are not all equal.
    pub fn is_nonconstant(&self) -> bool {
        let mut lo = self.samples[0];
        let mut hi = self.samples[0];
        for &s in &self.samples {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        hi > lo
    }
}

// ---------------------------------------------------------------------------
// Analytic functions as Taylor series
// ---------------------------------------------------------------------------

/// Margin keeping series evaluation strictly inside the unit disk.
pub const EVAL_MARGIN: f64 = 1e-12;
/// Radius at which boundary values are taken as radial limits.
pub const BOUNDARY_LIMIT_RADIUS: f64 = 1.0 - 1e-10;

/// An analytic function on the unit disk stored as a Taylor series at 0.
#[derive(Clone, Debug)]
pub struct AnalyticFunction<T> {
    taylor: Vec<Complex<T>>,
}

impl<T: Real> AnalyticFunction<T> {
    /// Wraps raw Taylor coefficients; the constant term's imaginary part is
    /// forced to zero (the Schwarz-integral normalization `Im A(0) = 0`).
    pub fn from_taylor(mut taylor: Vec<Complex<T>>) -> Self {
        if taylor.is_empty() {
            taylor.push(Complex::new(T::zero(), T::zero()));
        }
        taylor[0].im = T::zero();
        AnalyticFunction { taylor }
    }

    #[inline]
    pub fn taylor(&self) -> &[Complex<T>] {
        &self.taylor
    }

    fn horner(&self, w: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in self.taylor.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    fn horner_derivative(&self, w: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, &c) in self.taylor.iter().enumerate().skip(1).rev() {
            acc = acc * w + c.scale(T::of(k as f64));
        }
        acc
    }

    /// Evaluates the series strictly inside the unit disk.
    pub fn evaluate(&self, w: Complex<T>) -> Result<Complex<T>, TransformError> {
        if w.norm() >= T::one() - T::of(EVAL_MARGIN) {
            return Err(TransformError::EvalOutsideDisk { modulus: w.norm().as_f64() });
        }
        Ok(self.horner(w))
    }

    /// Evaluates the derivative strictly inside the unit disk.
    pub fn evaluate_derivative(&self, w: Complex<T>) -> Result<Complex<T>, TransformError> {
        if w.norm() >= T::one() - T::of(EVAL_MARGIN) {
            return Err(TransformError::EvalOutsideDisk { modulus: w.norm().as_f64() });
        }
        Ok(self.horner_derivative(w))
    }

    /// Evaluates on the closed disk, taking radial limits on the boundary:
    /// points with `|w| ≥ 1` are pulled back to radius `1 − 1e-10`.
    pub fn evaluate_clamped(&self, w: Complex<T>) -> Complex<T> {
        let r = w.norm();
        let lim = T::of(BOUNDARY_LIMIT_RADIUS);
        if r > lim {
            self.horner(w.scale(lim / r))
        } else {
            self.horner(w)
        }
    }

    /// Derivative with the same boundary clamping as
    /// [`AnalyticFunction::evaluate_clamped`].
    pub fn derivative_clamped(&self, w: Complex<T>) -> Complex<T> {
        let r = w.norm();
        let lim = T::of(BOUNDARY_LIMIT_RADIUS);
        if r > lim {
            self.horner_derivative(w.scale(lim / r))
        } else {
            self.horner_derivative(w)
        }
    }

    /// Boundary value at angle `θ` (radial limit).
    pub fn boundary_value(&self, theta: T) -> Complex<T> {
        let r = T::of(BOUNDARY_LIMIT_RADIUS);
        self.horner(Complex::new(r * theta.cos(), r * theta.sin()))
    }

    /// True when every non-constant coefficient is below `eps` relative to
    /// the overall coefficient scale.
    pub fn is_constant(&self, eps: T) -> bool {
        let scale = self
            .taylor
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm()))
            .max(T::one());
        self.taylor.iter().skip(1).all(|c| c.norm() <= eps * scale)
    }

    /// True when the trailing coefficients have decayed below `1e-13` of the
    /// largest one, i.e. the truncation of the series is resolved.
    pub fn truncation_resolved(&self) -> bool {
        let scale = self.taylor.iter().fold(T::zero(), |m, c| m.max(c.norm()));
        if scale == T::zero() {
            return true;
        }
        let tail = self.taylor.len().saturating_sub(2);
        self.taylor[tail..]
            .iter()
            .all(|c| c.norm() <= T::of(1e-13) * scale)
    }

    /// Under-relaxed blend `(1−ρ)·self + ρ·target`, used by the outer fixed
    /// point. Series of different lengths are padded with zeros.
    pub fn blend(&self, target: &Self, rho: T) -> Self {
        let len = self.taylor.len().max(target.taylor.len());
        let zero = Complex::new(T::zero(), T::zero());
        let mut taylor = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.taylor.get(k).copied().unwrap_or(zero);
            let b = target.taylor.get(k).copied().unwrap_or(zero);
            taylor.push(a + (b - a).scale(rho));
        }
        AnalyticFunction::from_taylor(taylor)
    }
}

/// Computes the Schwarz integral of boundary data on the unit circle as a
/// Taylor series of length `m/2` (the Nyquist mode is dropped).
///
/// For `φ(θ) = a₀ + Σ (a_k cos kθ + b_k sin kθ)` the result is exactly
/// `A(w) = a₀ + Σ (a_k − i·b_k) w^k`.
pub fn schwarz_integral<T: Real>(
    phi: &BoundaryFunction<T>,
) -> Result<AnalyticFunction<T>, TransformError> {
    if phi.curve() != BoundaryCurve::UnitCircle {
        return Err(TransformError::WrongCurve {
            want: BoundaryCurve::UnitCircle,
            got: phi.curve(),
        });
    }
    let m = phi.len();
    let mut buf: Vec<Complex<T>> = phi
        .samples()
        .iter()
        .map(|&s| Complex::new(s, T::zero()))
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let inv_m = T::one() / T::of(m as f64);
    let mut taylor = Vec::with_capacity(m / 2);
    taylor.push(Complex::new(buf[0].re * inv_m, T::zero()));
    let two = T::of(2.0);
    for item in buf.iter().take(m / 2).skip(1) {
        taylor.push(item.scale(inv_m * two));
    }
    Ok(AnalyticFunction::from_taylor(taylor))
}

/// Direct trapezoid quadrature of the Schwarz integral at one point — the
/// slow reference path for [`schwarz_integral`]. Valid well inside the disk:
/// points with `|w| ≥ 1 − 10·(2π/m)` are rejected because the discrete
/// kernel degrades near the boundary.
pub fn schwarz_point<T: Real>(
    phi: &BoundaryFunction<T>,
    w: Complex<T>,
) -> Result<Complex<T>, TransformError> {
    if phi.curve() != BoundaryCurve::UnitCircle {
        return Err(TransformError::WrongCurve {
            want: BoundaryCurve::UnitCircle,
            got: phi.curve(),
        });
    }
    let m = phi.len();
    let guard = T::one() - T::of(10.0) * (T::PI() + T::PI()) / T::of(m as f64);
    if w.norm() >= guard {
        return Err(TransformError::EvalOutsideDisk { modulus: w.norm().as_f64() });
    }
    let two_pi = T::PI() + T::PI();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (j, &s) in phi.samples().iter().enumerate() {
        let t = two_pi * T::of(j as f64) / T::of(m as f64);
        let zeta = Complex::new(t.cos(), t.sin());
        acc = acc + ((zeta + w) / (zeta - w)).scale(s);
    }
    Ok(acc.unscale(T::of(m as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn disk_spec(n: usize) -> GridSpec<f64> {
        GridSpec::centered(1.3, n).unwrap()
    }

    /// Gaussian density ω(z) = exp(−|z|²/σ²) has closed-form transforms
    ///   C[ω](z) = σ²(1 − exp(−|z|²/σ²))/z,
    ///   S[ω](z) = −σ²(1 − exp(−|z|²/σ²))/z² + (z̄/z)·exp(−|z|²/σ²).
    const SIGMA: f64 = 0.25;

    fn gaussian_s(sigma: f64, z: Complex<f64>) -> Complex<f64> {
        Complex::new((-z.norm_sqr() / (sigma * sigma)).exp(), 0.0)
    }

    fn cauchy_exact_s(sigma: f64, z: Complex<f64>) -> Complex<f64> {
        let s2 = sigma * sigma;
        if z.norm() < 1e-12 {
            return z.conj();
        }
        Complex::new(s2 * (1.0 - (-z.norm_sqr() / s2).exp()), 0.0) / z
    }

    fn beurling_exact_s(sigma: f64, z: Complex<f64>) -> Complex<f64> {
        let s2 = sigma * sigma;
        if z.norm() < 1e-12 {
            return Complex::new(0.0, 0.0);
        }
        let e = (-z.norm_sqr() / s2).exp();
        -Complex::new(s2 * (1.0 - e), 0.0) / (z * z) + (z.conj() / z).scale(e)
    }

    fn gaussian(z: Complex<f64>) -> Complex<f64> {
        gaussian_s(SIGMA, z)
    }

    fn cauchy_exact(z: Complex<f64>) -> Complex<f64> {
        cauchy_exact_s(SIGMA, z)
    }

    fn beurling_exact(z: Complex<f64>) -> Complex<f64> {
        beurling_exact_s(SIGMA, z)
    }

    #[test]
    fn cauchy_of_zero_is_zero() {
        let spec = disk_spec(32);
        let zero = ComplexField::zeros(spec);
        let c = cauchy_transform(&zero).unwrap();
        assert!(c.sup_norm() == 0.0);
    }

    #[test]
    fn cauchy_matches_gaussian_closed_form() {
        let spec = disk_spec(128);
        let density = ComplexField::from_fn(spec, gaussian);
        let c = cauchy_transform(&density).unwrap();
        let mut worst = 0.0f64;
        for (ix, iy, z) in spec.iter_points() {
            let err = (c.at(ix, iy) - cauchy_exact(z)).norm();
            worst = worst.max(err);
        }
        let h = spec.step();
        assert!(worst < 3.0 * h * h, "sup error {worst}, h² = {}", h * h);
    }

    #[test]
    fn cauchy_converges_at_second_order() {
        let mut errors = Vec::new();
        for n in [64usize, 128, 256] {
            let spec = disk_spec(n);
            let density = ComplexField::from_fn(spec, gaussian);
            let c = cauchy_transform(&density).unwrap();
            let mut worst = 0.0f64;
            for (ix, iy, z) in spec.iter_points() {
                worst = worst.max((c.at(ix, iy) - cauchy_exact(z)).norm());
            }
            errors.push(worst);
        }
        assert!(errors[1] < 0.35 * errors[0], "{errors:?}");
        assert!(errors[2] < 0.35 * errors[1], "{errors:?}");
    }

    #[test]
    fn cauchy_linearity() {
        let spec = disk_spec(32);
        let a = ComplexField::from_fn(spec, gaussian);
        let b = ComplexField::from_fn(spec, |z| gaussian(z.scale(1.5)) * z);
        let lhs = cauchy_transform(
            &a.zip_map(&b, |x, y| x.scale(2.0) + y.scale(-0.5)).unwrap(),
        )
        .unwrap();
        let ca = cauchy_transform(&a).unwrap();
        let cb = cauchy_transform(&b).unwrap();
        let rhs = ca.zip_map(&cb, |x, y| x.scale(2.0) + y.scale(-0.5)).unwrap();
        for i in 0..spec.len() {
            assert!((lhs.values()[i] - rhs.values()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn cauchy_solves_d_zbar() {
        // ∂z̄ C[ω] = ω on the grid, away from the support edge effects.
        let spec = disk_spec(64);
        let density = ComplexField::from_fn(spec, gaussian);
        let c = cauchy_transform(&density).unwrap();
        let (_, dzb) = crate::grid::wirtinger_derivatives(&c);
        let step = spec.step();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..spec.len() {
            num += (dzb.values()[i] - density.values()[i]).norm_sqr();
            den += density.values()[i].norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 5.0 * step, "relative residual {rel}");
    }

    #[test]
    fn cauchy_rejects_edge_support() {
        let spec = disk_spec(32);
        let bad = ComplexField::from_fn(spec, |_| Complex::new(1.0, 0.0));
        assert!(matches!(
            cauchy_transform(&bad),
            Err(TransformError::SupportTouchesEdge)
        ));
    }

    #[test]
    fn beurling_matches_gaussian_closed_form() {
        // A density with nonzero mean: the transform's 1/z² far field is
        // periodized by the padded grid, an effect set by the box size, not
        // the resolution. Mean-free densities do an order of magnitude
        // better (next test).
        let spec = disk_spec(128);
        let density = ComplexField::from_fn(spec, gaussian);
        let s = beurling_transform(&density).unwrap();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (ix, iy, z) in spec.iter_points() {
            num += (s.at(ix, iy) - beurling_exact(z)).norm_sqr();
            den += beurling_exact(z).norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.02, "relative L² error {rel}");
    }

    #[test]
    fn beurling_matches_mean_free_closed_form() {
        let spec = disk_spec(128);
        let sg = 0.18;
        let (a, b) = (Complex::new(0.25, 0.1), Complex::new(-0.25, -0.1));
        let density = ComplexField::from_fn(spec, |z| {
            gaussian_s(sg, z - a) - gaussian_s(sg, z - b)
        });
        let s = beurling_transform(&density).unwrap();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (ix, iy, z) in spec.iter_points() {
            let want = beurling_exact_s(sg, z - a) - beurling_exact_s(sg, z - b);
            num += (s.at(ix, iy) - want).norm_sqr();
            den += want.norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 5e-3, "relative L² error {rel}");
    }

    #[test]
    fn beurling_isometry_on_mean_free_data() {
        let spec = disk_spec(64);
        // A mean-free smooth density: an off-center dipole of narrow
        // Gaussians, far enough inside that the support guard passes.
        let narrow = |z: Complex<f64>| Complex::new((-z.norm_sqr() / 0.04).exp(), 0.0);
        let density = ComplexField::from_fn(spec, |z| {
            narrow(z - Complex::new(0.25, 0.1)) - narrow(z + Complex::new(0.25, 0.1))
        });
        let mut op = BeurlingOperator::for_spec(spec);
        let padded = op.apply_padded(&density).unwrap();
        let input: f64 = density.values().iter().map(|v| v.norm_sqr()).sum();
        let output: f64 = padded.iter().map(|v| v.norm_sqr()).sum();
        assert!(
            ((output - input) / input).abs() < 1e-12,
            "padded energy ratio {}",
            output / input
        );
    }

    #[test]
    fn beurling_multiplier_is_scale_free() {
        // The same node values on two grids of different physical size give
        // the same transform values: S commutes with dilations.
        let spec_a = disk_spec(32);
        let spec_b = GridSpec::centered(2.6, 32).unwrap();
        let da = ComplexField::from_fn(spec_a, |z| gaussian(z));
        let db_vals = da.values().to_vec();
        let db = ComplexField::new(spec_b, db_vals).unwrap();
        let sa = beurling_transform(&da).unwrap();
        let sb = beurling_transform(&db).unwrap();
        for i in 0..spec_a.len() {
            assert!((sa.values()[i] - sb.values()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn schwarz_of_cos_theta_is_w() {
        let phi = BoundaryFunction::on_circle(64, |t: f64| t.cos()).unwrap();
        let a = schwarz_integral(&phi).unwrap();
        let t = a.taylor();
        assert!(t[0].norm() < 1e-14);
        assert!((t[1] - Complex::new(1.0, 0.0)).norm() < 1e-13);
        for c in &t[2..] {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn schwarz_of_constant() {
        let phi = BoundaryFunction::on_circle(32, |_: f64| 2.5).unwrap();
        let a = schwarz_integral(&phi).unwrap();
        assert!((a.taylor()[0] - Complex::new(2.5, 0.0)).norm() < 1e-14);
        assert!(a.is_constant(1e-13));
        assert!(!phi.is_nonconstant());
    }

    #[test]
    fn schwarz_mode_mapping() {
        // φ = 3 + cos 2θ − 4 sin 5θ  →  A(w) = 3 + w² + 4i·w⁵.
        let phi = BoundaryFunction::on_circle(128, |t: f64| {
            3.0 + (2.0 * t).cos() - 4.0 * (5.0 * t).sin()
        })
        .unwrap();
        let a = schwarz_integral(&phi).unwrap();
        let t = a.taylor();
        assert!((t[0] - Complex::new(3.0, 0.0)).norm() < 1e-13);
        assert!((t[2] - Complex::new(1.0, 0.0)).norm() < 1e-13);
        assert!((t[5] - Complex::new(0.0, 4.0)).norm() < 1e-13);
        for (k, c) in t.iter().enumerate() {
            if ![0, 2, 5].contains(&k) {
                assert!(c.norm() < 1e-13, "stray coefficient at {k}");
            }
        }
        assert_eq!(t.len(), 64);
    }

    #[test]
    fn schwarz_real_part_attains_boundary_data() {
        let phi = BoundaryFunction::on_circle(256, |t: f64| {
            0.3 + t.cos() - 0.2 * (3.0 * t).sin() + 0.05 * (7.0 * t).cos()
        })
        .unwrap();
        let a = schwarz_integral(&phi).unwrap();
        let m = phi.len();
        for (j, &want) in phi.samples().iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let got = a.boundary_value(theta).re;
            assert!((got - want).abs() < 1e-9, "θ_{j}: {got} vs {want}");
        }
        // Im A(0) = 0 exactly.
        assert_eq!(a.taylor()[0].im, 0.0);
    }

    #[test]
    fn schwarz_series_agrees_with_direct_quadrature() {
        let phi = BoundaryFunction::on_circle(512, |t: f64| (2.0 * t).cos() * (1.0 + 0.5 * t.sin()))
            .unwrap();
        let a = schwarz_integral(&phi).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.5, 0.2), (-0.7, 0.1), (0.0, -0.85)] {
            let w = Complex::new(x, y);
            let series = a.evaluate(w).unwrap();
            let direct = schwarz_point(&phi, w).unwrap();
            assert!((series - direct).norm() < 1e-10, "at {w}: {series} vs {direct}");
        }
    }

    #[test]
    fn schwarz_rejects_wrong_curve_and_outside_eval() {
        let phi = BoundaryFunction::new(vec![0.0; 64], BoundaryCurve::DomainVertices).unwrap();
        assert!(matches!(
            schwarz_integral(&phi),
            Err(TransformError::WrongCurve { .. })
        ));
        let ok = BoundaryFunction::on_circle(64, |t: f64| t.cos()).unwrap();
        let a = schwarz_integral(&ok).unwrap();
        assert!(a.evaluate(Complex::new(1.0, 0.0)).is_err());
        assert!(a.evaluate(Complex::new(0.9999999, 0.0)).is_ok());
        assert!(schwarz_point(&ok, Complex::new(0.95, 0.0)).is_err());
    }

    #[test]
    fn analytic_function_evaluation_and_derivative() {
        // A(w) = 3 + w²: A(0.5) = 3.25, A'(0.5) = 1.
        let a = AnalyticFunction::from_taylor(vec![
            Complex::new(3.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ]);
        let w = Complex::new(0.5, 0.0);
        assert!((a.evaluate(w).unwrap() - Complex::new(3.25, 0.0)).norm() < 1e-15);
        assert!((a.evaluate_derivative(w).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-15);
        // Derivative truncation error is tiny well inside the disk.
        let phi = BoundaryFunction::on_circle(512, |t: f64| (t.cos()).exp() * (t.sin()).cos()).unwrap();
        let s = schwarz_integral(&phi).unwrap();
        assert!(s.truncation_resolved());
        let w = Complex::new(0.6, -0.3);
        let h = 1e-6;
        let fd = (s.evaluate(w + Complex::new(h, 0.0)).unwrap()
            - s.evaluate(w - Complex::new(h, 0.0)).unwrap())
            / Complex::new(2.0 * h, 0.0);
        assert!((s.evaluate_derivative(w).unwrap() - fd).norm() < 1e-8);
    }

    #[test]
    fn blend_moves_partway() {
        let a = AnalyticFunction::from_taylor(vec![Complex::new(1.0, 0.0)]);
        let b = AnalyticFunction::from_taylor(vec![
            Complex::new(3.0, 0.0),
            Complex::new(2.0, 1.0),
        ]);
        let mid = a.blend(&b, 0.5);
        assert!((mid.taylor()[0] - Complex::new(2.0, 0.0)).norm() < 1e-15);
        assert!((mid.taylor()[1] - Complex::new(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn boundary_function_validation() {
        assert!(matches!(
            BoundaryFunction::<f64>::new(vec![1.0; 4], BoundaryCurve::UnitCircle),
            Err(TransformError::TooFewSamples { .. })
        ));
        assert!(matches!(
            BoundaryFunction::new(
                vec![1.0, f64::NAN, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
                BoundaryCurve::UnitCircle
            ),
            Err(TransformError::NonFiniteSample { index: 1 })
        ));
    }
}
