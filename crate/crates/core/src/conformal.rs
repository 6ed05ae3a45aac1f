//! Jordan boundaries and conformal maps onto the unit disk.
//!
//! Domains are closed polygons with many vertices (a polyline model of a
//! Jordan curve). The conformal map of the interior onto the unit disk is
//! built with a geodesic zipper: the complement of the first edge is opened
//! onto the upper half plane by `i·√((z−z₁)/(z−z₀))`, every further vertex is
//! absorbed by unzipping the hyperbolic geodesic from the current tip to its
//! image with the elementary map `z ↦ √(T(z)² + c²)`, `T(z) = z/(1−βz)`, and
//! the curve is closed by `z ↦ s·(z/(1−z/A))²` followed by a Cayley transport
//! to the disk that sends the domain's marked interior point `0` to the disk
//! center exactly.
//!
//! Boundary vertices are tracked through the same chain in exact
//! real-line arithmetic, which yields the boundary correspondence table
//! (vertex index ↦ disk angle) without any extrapolation; accuracy of the
//! map improves quadratically as vertices are added, and edges can be
//! subdivided (`refine`) without changing the polygon.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ConformalError {
    #[error("a Jordan boundary needs at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("vertex {0} is not finite")]
    NonFiniteVertex(usize),
    #[error("boundary edges {0} and {1} intersect; the polygon must be simple")]
    SelfIntersection(usize, usize),
    #[error("boundary must be positively oriented (counterclockwise)")]
    NegativeOrientation,
    #[error("boundary is degenerate (zero enclosed area)")]
    DegenerateCurve,
    #[error("the origin must lie strictly inside the boundary")]
    OriginOutside,
    #[error("zipper step {0} is degenerate: consecutive boundary images collide")]
    DegenerateStep(usize),
    #[error("marked vertex index {got} out of range (m = {m})")]
    BadMarkedVertex { got: usize, m: usize },
    #[error("refinement factor must be >= 1")]
    BadRefine,
    #[error("inverse map did not converge at w = {0}")]
    InverseNoConvergence(Complex<f64>),
}

/// Minimum vertex count of a Jordan boundary.
pub const MIN_VERTICES: usize = 64;

// ---------------------------------------------------------------------------
// Jordan boundaries
// ---------------------------------------------------------------------------

/// A positively oriented simple closed polygon with the origin inside.
#[derive(Clone, Debug)]
pub struct JordanBoundary<T> {
    vertices: Vec<Complex<T>>,
}

fn orient<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> T {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > T::zero() && d2 < T::zero()) || (d1 < T::zero() && d2 > T::zero()))
        && ((d3 > T::zero() && d4 < T::zero()) || (d3 < T::zero() && d4 > T::zero()))
}

impl<T: Real> JordanBoundary<T> {
    /// Validates and wraps a vertex loop (implicitly closed: the last vertex
    /// connects back to the first).
    pub fn new(vertices: Vec<Complex<T>>) -> Result<Self, ConformalError> {
        let m = vertices.len();
        if m < MIN_VERTICES {
            return Err(ConformalError::TooFewVertices { min: MIN_VERTICES, got: m });
        }
        if let Some(i) = vertices.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(ConformalError::NonFiniteVertex(i));
        }
        // Shoelace area: sign gives orientation.
        let mut area2 = T::zero();
        for j in 0..m {
            let a = vertices[j];
            let b = vertices[(j + 1) % m];
            area2 += a.re * b.im - a.im * b.re;
        }
        if area2 == T::zero() {
            return Err(ConformalError::DegenerateCurve);
        }
        if area2 < T::zero() {
            return Err(ConformalError::NegativeOrientation);
        }
        // Simplicity: no two non-adjacent edges may cross.
        for i in 0..m {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            let (alo, ahi) = (a.re.min(b.re), a.re.max(b.re));
            let (blo, bhi) = (a.im.min(b.im), a.im.max(b.im));
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue; // adjacent through the closing edge
                }
                let (c, d) = (vertices[j], vertices[(j + 1) % m]);
                if c.re.max(d.re) < alo
                    || c.re.min(d.re) > ahi
                    || c.im.max(d.im) < blo
                    || c.im.min(d.im) > bhi
                {
                    continue;
                }
                if segments_cross(a, b, c, d) {
                    return Err(ConformalError::SelfIntersection(i, j));
                }
            }
        }
        let out = JordanBoundary { vertices };
        if !out.contains(Complex::new(T::zero(), T::zero())) {
            return Err(ConformalError::OriginOutside);
        }
        Ok(out)
    }

    /// The circle of the given radius, sampled counterclockwise.
    pub fn circle(radius: T, m: usize) -> Result<Self, ConformalError> {
        let two_pi = T::PI() + T::PI();
        Self::new(
            (0..m)
                .map(|j| {
                    let t = two_pi * T::of(j as f64) / T::of(m as f64);
                    Complex::new(radius * t.cos(), radius * t.sin())
                })
                .collect(),
        )
    }

    /// The axis-aligned ellipse `x²/a² + y²/b² = 1`.
    pub fn ellipse(a: T, b: T, m: usize) -> Result<Self, ConformalError> {
        let two_pi = T::PI() + T::PI();
        Self::new(
            (0..m)
                .map(|j| {
                    let t = two_pi * T::of(j as f64) / T::of(m as f64);
                    Complex::new(a * t.cos(), b * t.sin())
                })
                .collect(),
        )
    }

    /// The axis-aligned square `[−s, s]²` sampled counterclockwise starting
    /// from the corner `s + i·s`; `m` must be divisible by 4.
    pub fn square(half_side: T, m: usize) -> Result<Self, ConformalError> {
        let per_side = m / 4;
        let mut vs = Vec::with_capacity(m);
        let s = half_side;
        let step = (s + s) / T::of(per_side as f64);
        // Four sides, counterclockwise: top (right→left), left (down), bottom, right (up).
        for k in 0..per_side {
            vs.push(Complex::new(s - step * T::of(k as f64), s));
        }
        for k in 0..per_side {
            vs.push(Complex::new(-s, s - step * T::of(k as f64)));
        }
        for k in 0..per_side {
            vs.push(Complex::new(-s + step * T::of(k as f64), -s));
        }
        for k in 0..per_side {
            vs.push(Complex::new(s, -s + step * T::of(k as f64)));
        }
        Self::new(vs)
    }

    #[inline]
    pub fn vertices(&self) -> &[Complex<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Even-odd ray-casting point-in-polygon test.
    pub fn contains(&self, z: Complex<T>) -> bool {
        let m = self.vertices.len();
        let mut inside = false;
        let mut j = m - 1;
        for i in 0..m {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi.im > z.im) != (vj.im > z.im) {
                let x_cross = (vj.re - vi.re) * (z.im - vi.im) / (vj.im - vi.im) + vi.re;
                if z.re < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Subdivides every edge into `factor` equal parts. The polygon is
    /// unchanged as a point set; original vertex `j` becomes vertex
    /// `j·factor`.
    pub fn refine(&self, factor: usize) -> Result<Self, ConformalError> {
        if factor == 0 {
            return Err(ConformalError::BadRefine);
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let m = self.vertices.len();
        let mut vs = Vec::with_capacity(m * factor);
        for j in 0..m {
            let a = self.vertices[j];
            let b = self.vertices[(j + 1) % m];
            for k in 0..factor {
                let t = T::of(k as f64) / T::of(factor as f64);
                vs.push(a + (b - a).scale(t));
            }
        }
        Ok(JordanBoundary { vertices: vs })
    }

    /// Largest distance from the origin to a vertex.
    pub fn radius_bound(&self) -> T {
        self.vertices.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
}

// ---------------------------------------------------------------------------
// The zipper chain
// ---------------------------------------------------------------------------

/// How the remaining rotational freedom of the disk map is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `R'(0) > 0`.
    PositiveDerivativeAtZero,
    /// The given original vertex lands at angle `0`.
    MarkedVertex(usize),
}

#[derive(Clone, Copy, Debug)]
enum Step<T> {
    /// `w = i·√((z−z1)/(z−z0))` (principal branch).
    Base { z0: Complex<T>, z1: Complex<T> },
    /// `w = √(T(z)² + c²)`, `T(z) = z/(1−βz)`, branch with `Im w ≥ 0`.
    Geodesic { beta: T, c: T },
    /// `w = sign·(z/(1−z·inv_a))²`.
    Close { inv_a: T, sign: T },
    /// `w = (z−w0)/(z−conj w0)`.
    Cayley { w0: Complex<T> },
    /// `w = phase·z`.
    Rotate { phase: Complex<T> },
}

/// Tracked image of a boundary vertex on the extended real line.
#[derive(Clone, Copy, Debug, PartialEq)]
enum ExtReal<T> {
    Fin(T),
    Inf,
}

impl<T: Real> ExtReal<T> {
    fn geodesic(self, beta: T, c: T, is_tip: bool) -> Self {
        // T(x) = x/(1−βx), then ±√(x²+c²) keeping the side of the line.
        let t = match self {
            ExtReal::Inf => {
                if beta == T::zero() {
                    return ExtReal::Inf;
                }
                -beta.recip()
            }
            ExtReal::Fin(x) => {
                let den = T::one() - beta * x;
                if den == T::zero() {
                    return ExtReal::Inf;
                }
                x / den
            }
        };
        if is_tip {
            // The previous tip sits exactly at 0 and continues on the prong
            // on the interior-facing (negative) side.
            return ExtReal::Fin(-c);
        }
        let mag = (t * t + c * c).sqrt();
        ExtReal::Fin(if t < T::zero() { -mag } else { mag })
    }

    fn close(self, inv_a: T, sign: T) -> Self {
        let x = match self {
            ExtReal::Inf => {
                if inv_a == T::zero() {
                    return ExtReal::Inf;
                }
                -inv_a.recip()
            }
            ExtReal::Fin(x) => {
                let den = T::one() - x * inv_a;
                if den == T::zero() {
                    return ExtReal::Inf;
                }
                x / den
            }
        };
        ExtReal::Fin(sign * x * x)
    }

    fn cayley(self, w0: Complex<T>) -> Complex<T> {
        match self {
            ExtReal::Inf => Complex::new(T::one(), T::zero()),
            ExtReal::Fin(x) => {
                let zeta = Complex::new(x - w0.re, -w0.im);
                // (x−w0)/(x−conj w0) = ζ/conj(ζ) = ζ²/|ζ|².
                zeta * zeta / zeta.norm_sqr()
            }
        }
    }
}

#[inline]
fn finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Square root in the closed upper half plane.
#[inline]
fn sqrt_upper<T: Real>(u: Complex<T>) -> Complex<T> {
    let p = u.sqrt();
    if p.im < T::zero() {
        -p
    } else {
        p
    }
}

/// A conformal map of a Jordan domain onto the unit disk with `R(0) = 0`.
#[derive(Clone, Debug)]
pub struct DiskMap<T> {
    steps: Vec<Step<T>>,
    /// Disk angles of the original boundary vertices, unwrapped to a
    /// strictly increasing sequence with `angles[0] ∈ [0, 2π)`.
    angles: Vec<T>,
}

impl<T: Real> DiskMap<T> {
    /// Builds the map. `refine` subdivides each polygon edge into that many
    /// parts before zipping (better accuracy, same polygon).
    pub fn new(
        boundary: &JordanBoundary<T>,
        normalization: Normalization,
        refine: usize,
    ) -> Result<Self, ConformalError> {
        let m_orig = boundary.len();
        if let Normalization::MarkedVertex(j) = normalization {
            if j >= m_orig {
                return Err(ConformalError::BadMarkedVertex { got: j, m: m_orig });
            }
        }
        let fine = boundary.refine(refine)?;
        let vs = fine.vertices();
        let m = vs.len();

        let mut steps: Vec<Step<T>> = Vec::with_capacity(m + 3);
        let base = Step::Base { z0: vs[0], z1: vs[1] };
        steps.push(base);

        // Interior tracker: the domain point 0 decides the closing component.
        let mut w_in = apply_complex(&base, Complex::new(T::zero(), T::zero()));
        // Pending vertices (images in the upper half plane).
        let mut pending: Vec<Complex<T>> =
            vs[2..].iter().map(|&z| apply_complex(&base, z)).collect();
        // Unzipped vertices (images on the extended real line).
        let mut done: Vec<ExtReal<T>> = Vec::with_capacity(m);
        done.push(ExtReal::Inf); // v0 ↦ ∞ under the base map
        done.push(ExtReal::Fin(T::zero())); // v1 ↦ 0, the current tip
        let mut tip = 1usize; // index into `done` of the current tip

        for k in 2..m {
            let a = pending[k - 2];
            if !(a.im > T::zero()) || !finite(a) {
                return Err(ConformalError::DegenerateStep(k));
            }
            let beta = a.re / a.norm_sqr();
            let c = a.norm_sqr() / a.im;
            let step = Step::Geodesic { beta, c };
            // Move the unzipped vertices along the real line.
            for (i, d) in done.iter_mut().enumerate() {
                *d = d.geodesic(beta, c, i == tip);
            }
            // The new vertex becomes the tip at exactly 0.
            done.push(ExtReal::Fin(T::zero()));
            tip = k;
            // Move the interior point and the still-pending vertices.
            w_in = apply_complex(&step, w_in);
            for p in pending[k - 1..].iter_mut() {
                *p = apply_complex(&step, *p);
            }
            steps.push(step);
        }

        // Close the curve: the image of v0 is the second endpoint of the
        // remaining slit.
        let inv_a = match done[0] {
            ExtReal::Inf => T::zero(),
            ExtReal::Fin(a) => {
                if a == T::zero() {
                    return Err(ConformalError::DegenerateStep(m));
                }
                a.recip()
            }
        };
        let den = Complex::new(T::one(), T::zero()) - w_in.scale(inv_a);
        let half = w_in / den;
        let squared = half * half;
        if squared.im == T::zero() || !finite(squared) {
            return Err(ConformalError::DegenerateStep(m));
        }
        let sign = if squared.im > T::zero() { T::one() } else { -T::one() };
        let close = Step::Close { inv_a, sign };
        steps.push(close);
        let w0 = squared.scale(sign);
        for d in done.iter_mut() {
            *d = d.close(inv_a, sign);
        }
        steps.push(Step::Cayley { w0 });

        // Boundary angles of the refined vertices, then the rotation.
        let circle_pts: Vec<Complex<T>> = done.iter().map(|d| d.cayley(w0)).collect();
        let phase = match normalization {
            Normalization::MarkedVertex(j) => {
                let q = circle_pts[j * refine];
                q.conj().unscale(q.norm())
            }
            Normalization::PositiveDerivativeAtZero => {
                let mut deriv = Complex::new(T::one(), T::zero());
                let mut z = Complex::new(T::zero(), T::zero());
                for step in &steps {
                    let (w, dw) = apply_complex_deriv(step, z);
                    deriv = deriv * dw;
                    z = w;
                }
                if deriv.norm() == T::zero() || !finite(deriv) {
                    return Err(ConformalError::DegenerateStep(m + 1));
                }
                deriv.conj().unscale(deriv.norm())
            }
        };
        steps.push(Step::Rotate { phase });

        // Subsample original-vertex angles and unwrap monotonically.
        let two_pi = T::PI() + T::PI();
        let mut angles = Vec::with_capacity(m_orig);
        let mut prev = T::zero();
        for j in 0..m_orig {
            let q = circle_pts[j * refine] * phase;
            let mut ang = q.im.atan2(q.re);
            if j == 0 {
                if ang < T::zero() {
                    ang += two_pi;
                }
            } else {
                while ang <= prev {
                    ang += two_pi;
                }
                // Guard against a stray full-turn jump from atan2 wrapping.
                while ang - prev > two_pi {
                    ang -= two_pi;
                }
            }
            prev = ang;
            angles.push(ang);
        }

        Ok(DiskMap { steps, angles })
    }

    /// Disk angles of the original boundary vertices: strictly increasing,
    /// spanning one full turn.
    #[inline]
    pub fn boundary_angles(&self) -> &[T] {
        &self.angles
    }

    /// Evaluates the map at an interior point.
    pub fn map(&self, z: Complex<T>) -> Complex<T> {
        let mut w = z;
        for step in &self.steps {
            w = apply_complex(step, w);
        }
        w
    }

    /// Evaluates the map and its complex derivative at an interior point.
    pub fn map_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut w = z;
        let mut d = Complex::new(T::one(), T::zero());
        for step in &self.steps {
            let (nw, dw) = apply_complex_deriv(step, w);
            d = d * dw;
            w = nw;
        }
        (w, d)
    }

    /// Evaluates the map over a slice, walking the chain step by step across
    /// all points (cache-friendly for large batches).
    pub fn map_slice(&self, zs: &[Complex<T>], out: &mut Vec<Complex<T>>) {
        out.clear();
        out.extend_from_slice(zs);
        for step in &self.steps {
            for w in out.iter_mut() {
                *w = apply_complex(step, *w);
            }
        }
    }

    /// Like [`DiskMap::map_slice`] but also accumulates derivatives.
    pub fn map_slice_with_derivative(
        &self,
        zs: &[Complex<T>],
        out: &mut Vec<Complex<T>>,
        deriv: &mut Vec<Complex<T>>,
    ) {
        out.clear();
        out.extend_from_slice(zs);
        deriv.clear();
        deriv.resize(zs.len(), Complex::new(T::one(), T::zero()));
        for step in &self.steps {
            for (w, d) in out.iter_mut().zip(deriv.iter_mut()) {
                let (nw, dw) = apply_complex_deriv(step, *w);
                *d = *d * dw;
                *w = nw;
            }
        }
    }

    /// Newton inversion: finds `z` with `map(z) = w` for `|w| < 1`.
    pub fn inverse_map(&self, w: Complex<T>) -> Result<Complex<T>, ConformalError> {
        let seeds = [
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::of(0.3), T::zero()),
            Complex::new(T::zero(), T::of(0.3)),
            Complex::new(T::of(-0.3), T::zero()),
            Complex::new(T::zero(), T::of(-0.3)),
        ];
        let tol = T::of(1e-13);
        for &seed in &seeds {
            let mut z = seed;
            let mut err = (self.map(z) - w).norm();
            let mut converged = false;
            for _ in 0..50 {
                let (val, der) = self.map_with_derivative(z);
                if !finite(val) || der.norm() == T::zero() {
                    break;
                }
                let full = (val - w) / der;
                // Damped update: halve the step until the residual drops.
                let mut lambda = T::one();
                let mut accepted = false;
                for _ in 0..20 {
                    let cand = z - full.scale(lambda);
                    let cand_val = self.map(cand);
                    if finite(cand_val) {
                        let cand_err = (cand_val - w).norm();
                        if cand_err < err {
                            z = cand;
                            err = cand_err;
                            accepted = true;
                            break;
                        }
                    }
                    lambda = lambda * T::of(0.5);
                }
                if !accepted {
                    break;
                }
                if err <= tol {
                    converged = true;
                    break;
                }
            }
            if converged || err <= tol {
                return Ok(z);
            }
        }
        Err(ConformalError::InverseNoConvergence(Complex::new(
            w.re.as_f64(),
            w.im.as_f64(),
        )))
    }
}

fn apply_complex<T: Real>(step: &Step<T>, z: Complex<T>) -> Complex<T> {
    match *step {
        Step::Base { z0, z1 } => {
            let r = (z - z1) / (z - z0);
            let s = r.sqrt();
            Complex::new(-s.im, s.re) // i·s
        }
        Step::Geodesic { beta, c } => {
            let t = z / (Complex::new(T::one(), T::zero()) - z.scale(beta));
            sqrt_upper(t * t + Complex::new(c * c, T::zero()))
        }
        Step::Close { inv_a, sign } => {
            let mhalf = z / (Complex::new(T::one(), T::zero()) - z.scale(inv_a));
            (mhalf * mhalf).scale(sign)
        }
        Step::Cayley { w0 } => (z - w0) / (z - w0.conj()),
        Step::Rotate { phase } => z * phase,
    }
}

fn apply_complex_deriv<T: Real>(step: &Step<T>, z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let one = Complex::new(T::one(), T::zero());
    match *step {
        Step::Base { z0, z1 } => {
            let r = (z - z1) / (z - z0);
            let s = r.sqrt();
            let w = Complex::new(-s.im, s.re);
            // dr/dz = (z1−z0)/(z−z0)²; dw/dz = i·r'/(2√r).
            let dr = (z1 - z0) / ((z - z0) * (z - z0));
            let half_over_s = dr / s.scale(T::of(2.0));
            let dw = Complex::new(-half_over_s.im, half_over_s.re);
            (w, dw)
        }
        Step::Geodesic { beta, c } => {
            let den = one - z.scale(beta);
            let t = z / den;
            let dt = (den * den).inv();
            let w = sqrt_upper(t * t + Complex::new(c * c, T::zero()));
            let dw = t * dt / w;
            (w, dw)
        }
        Step::Close { inv_a, sign } => {
            let den = one - z.scale(inv_a);
            let mhalf = z / den;
            let dm = (den * den).inv();
            ((mhalf * mhalf).scale(sign), (mhalf * dm).scale(sign + sign))
        }
        Step::Cayley { w0 } => {
            let den = z - w0.conj();
            let w = (z - w0) / den;
            let dw = (w0 - w0.conj()) / (den * den);
            (w, dw)
        }
        Step::Rotate { phase } => (z * phase, phase),
    }
}
