//! Square sample grids and the fields living on them.
//!
//! A [`GridSpec`] describes a uniform `n × n` lattice over an axis-aligned
//! square. Node coordinates follow the shifted-lattice convention
//! `x_i = center.x - half_width + i * step` with `step = 2 * half_width / n`,
//! so for an origin-centered grid the origin itself is a node (index `n/2`)
//! and each node is the midpoint of its grid cell for quadrature purposes.
//! Values are stored row-major: `index = iy * n + ix`, `x` fastest.
//!
//! [`ComplexField`] carries complex samples (solution fields, coefficient
//! fields, transform outputs), [`RealField`] carries real samples (dilatation
//! profiles, diagnostics) and is the one field type allowed to hold `+inf`,
//! and [`DomainMask`] marks which nodes lie inside the working domain.
//!
//! Wirtinger derivatives are taken by centered second-order differences in
//! the interior and one-sided second-order stencils on the outermost rows
//! and columns.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Supported grid sizes: powers of two in `[MIN_GRID_N, MAX_GRID_N]`.
pub const MIN_GRID_N: usize = 16;
/// Upper bound on the grid side length.
pub const MAX_GRID_N: usize = 8192;

/// Errors raised by grid construction, field algebra, and serialization.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid size {0} is not a power of two in [{MIN_GRID_N}, {MAX_GRID_N}]")]
    BadSize(usize),
    #[error("half_width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("grid center must be finite")]
    BadCenter,
    #[error("value buffer holds {got} samples, grid wants {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("non-finite sample at node ({ix}, {iy})")]
    NonFinite { ix: usize, iy: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("binary field: {0}")]
    Binary(String),
    #[error("serialized nodes do not form a grid this library produces: {0}")]
    BadLattice(String),
}

#[inline]
fn is_pow2(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Geometry of a uniform square grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    center: Complex<T>,
    half_width: T,
    n: usize,
}

impl<T: Real> GridSpec<T> {
    /// A grid of `n × n` nodes covering the square of the given center and
    /// half-width.
    pub fn new(center: Complex<T>, half_width: T, n: usize) -> Result<Self, GridError> {
        if !is_pow2(n) || !(MIN_GRID_N..=MAX_GRID_N).contains(&n) {
            return Err(GridError::BadSize(n));
        }
        if !(half_width.is_finite() && half_width > T::zero()) {
            return Err(GridError::BadHalfWidth(half_width.as_f64()));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(GridError::BadCenter);
        }
        Ok(GridSpec { center, half_width, n })
    }

    /// Origin-centered grid; the most common case, with `0` an exact node.
    pub fn centered(half_width: T, n: usize) -> Result<Self, GridError> {
        Self::new(Complex::new(T::zero(), T::zero()), half_width, n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn center(&self) -> Complex<T> {
        self.center
    }

    #[inline]
    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// Node spacing `2 * half_width / n`.
    #[inline]
    pub fn step(&self) -> T {
        (self.half_width + self.half_width) / T::of(self.n as f64)
    }

    /// Number of nodes, `n²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major node index.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.n && iy < self.n);
        iy * self.n + ix
    }

    /// Coordinates of node `(ix, iy)`.
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> Complex<T> {
        let step = self.step();
        Complex::new(
            self.center.re - self.half_width + T::of(ix as f64) * step,
            self.center.im - self.half_width + T::of(iy as f64) * step,
        )
    }

    /// Coordinates of the node with row-major index `idx`.
    #[inline]
    pub fn point_at(&self, idx: usize) -> Complex<T> {
        self.point(idx % self.n, idx / self.n)
    }

    /// Nearest node index to `z`, or `None` if `z` falls outside the lattice.
    pub fn nearest(&self, z: Complex<T>) -> Option<(usize, usize)> {
        let step = self.step();
        let fx = ((z.re - self.center.re + self.half_width) / step).round();
        let fy = ((z.im - self.center.im + self.half_width) / step).round();
        let n = T::of(self.n as f64);
        if fx < T::zero() || fy < T::zero() || fx >= n || fy >= n {
            return None;
        }
        Some((fx.to_usize()?, fy.to_usize()?))
    }

    /// Iterates `(ix, iy, z)` over all nodes in storage order.
    pub fn iter_points(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |iy| (0..n).map(move |ix| (ix, iy, self.point(ix, iy))))
    }
}

/// Complex-valued samples on a [`GridSpec`]. All entries are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<T> {
    spec: GridSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    /// Wraps a value buffer; the length must be `n²` and all values finite.
    pub fn new(spec: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::LengthMismatch { got: values.len(), want: spec.len() });
        }
        if let Some(pos) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GridError::NonFinite { ix: pos % spec.n(), iy: pos / spec.n() });
        }
        Ok(ComplexField { spec, values })
    }

    /// Samples a function at every node.
    pub fn from_fn(spec: GridSpec<T>, mut f: impl FnMut(Complex<T>) -> Complex<T>) -> Self {
        let n = spec.n();
        let mut values = Vec::with_capacity(spec.len());
        for iy in 0..n {
            for ix in 0..n {
                values.push(f(spec.point(ix, iy)));
            }
        }
        ComplexField { spec, values }
    }

    /// The zero field.
    pub fn zeros(spec: GridSpec<T>) -> Self {
        ComplexField { spec, values: vec![Complex::new(T::zero(), T::zero()); spec.len()] }
    }

    #[inline]
    pub fn spec(&self) -> GridSpec<T> {
        self.spec
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex<T> {
        self.values[self.spec.index(ix, iy)]
    }

    /// Applies `f` to every sample.
    pub fn map(&self, mut f: impl FnMut(Complex<T>) -> Complex<T>) -> Self {
        ComplexField { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Combines two fields nodewise; the grids must agree.
    pub fn zip_map(
        &self,
        other: &Self,
        mut f: impl FnMut(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self, GridError> {
        if self.spec != other.spec {
            return Err(GridError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexField { spec: self.spec, values })
    }

    /// Largest sample magnitude.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Grid L² norm `sqrt(step² · Σ |v|²)`.
    pub fn l2_norm(&self) -> T {
        let s: T = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.spec.step() * self.spec.step()).sqrt()
    }

    /// Bilinear interpolation at `z`; `None` outside the node lattice hull.
    pub fn interp(&self, z: Complex<T>) -> Option<Complex<T>> {
        let spec = &self.spec;
        let step = spec.step();
        let fx = (z.re - spec.center.re + spec.half_width) / step;
        let fy = (z.im - spec.center.im + spec.half_width) / step;
        let last = T::of((spec.n - 1) as f64);
        if fx < T::zero() || fy < T::zero() || fx > last || fy > last {
            return None;
        }
        let ix = fx.floor().to_usize()?.min(spec.n - 2);
        let iy = fy.floor().to_usize()?.min(spec.n - 2);
        let tx = fx - T::of(ix as f64);
        let ty = fy - T::of(iy as f64);
        let one = T::one();
        let w00 = (one - tx) * (one - ty);
        let w10 = tx * (one - ty);
        let w01 = (one - tx) * ty;
        let w11 = tx * ty;
        let v = self.at(ix, iy).scale(w00)
            + self.at(ix + 1, iy).scale(w10)
            + self.at(ix, iy + 1).scale(w01)
            + self.at(ix + 1, iy + 1).scale(w11);
        Some(v)
    }
}

/// Real-valued samples on a [`GridSpec`]; may hold `+inf` to mark nodes where
/// an extended-real quantity (such as a dilatation) blows up.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField<T> {
    spec: GridSpec<T>,
    values: Vec<T>,
}

impl<T: Real> RealField<T> {
    pub fn new(spec: GridSpec<T>, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::LengthMismatch { got: values.len(), want: spec.len() });
        }
        Ok(RealField { spec, values })
    }

    pub fn from_fn(spec: GridSpec<T>, mut f: impl FnMut(Complex<T>) -> T) -> Self {
        let n = spec.n();
        let mut values = Vec::with_capacity(spec.len());
        for iy in 0..n {
            for ix in 0..n {
                values.push(f(spec.point(ix, iy)));
            }
        }
        RealField { spec, values }
    }

    #[inline]
    pub fn spec(&self) -> GridSpec<T> {
        self.spec
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.values[self.spec.index(ix, iy)]
    }

    /// Bilinear interpolation at an arbitrary point; `None` outside the grid.
    pub fn interp(&self, z: Complex<T>) -> Option<T> {
        let spec = &self.spec;
        let step = spec.step();
        let fx = (z.re - spec.center.re + spec.half_width) / step;
        let fy = (z.im - spec.center.im + spec.half_width) / step;
        let last = T::of((spec.n - 1) as f64);
        if fx < T::zero() || fy < T::zero() || fx > last || fy > last {
            return None;
        }
        let ix = fx.floor().to_usize()?.min(spec.n - 2);
        let iy = fy.floor().to_usize()?.min(spec.n - 2);
        let tx = fx - T::of(ix as f64);
        let ty = fy - T::of(iy as f64);
        let one = T::one();
        let v = self.at(ix, iy) * (one - tx) * (one - ty)
            + self.at(ix + 1, iy) * tx * (one - ty)
            + self.at(ix, iy + 1) * (one - tx) * ty
            + self.at(ix + 1, iy + 1) * tx * ty;
        Some(v)
    }
}

/// Boolean inside/outside marking of grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainMask<T> {
    spec: GridSpec<T>,
    inside: Vec<bool>,
}

impl<T: Real> DomainMask<T> {
    pub fn from_predicate(spec: GridSpec<T>, mut inside: impl FnMut(Complex<T>) -> bool) -> Self {
        let n = spec.n();
        let mut flags = Vec::with_capacity(spec.len());
        for iy in 0..n {
            for ix in 0..n {
                flags.push(inside(spec.point(ix, iy)));
            }
        }
        DomainMask { spec, inside: flags }
    }

    /// Marks every node of the grid.
    pub fn full(spec: GridSpec<T>) -> Self {
        DomainMask { spec, inside: vec![true; spec.len()] }
    }

    #[inline]
    pub fn spec(&self) -> GridSpec<T> {
        self.spec
    }

    #[inline]
    pub fn flags(&self) -> &[bool] {
        &self.inside
    }

    #[inline]
    pub fn contains(&self, ix: usize, iy: usize) -> bool {
        self.inside[self.spec.index(ix, iy)]
    }

    /// Number of masked (inside) nodes.
    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Masked area `count · step²`.
    pub fn area(&self) -> T {
        let step = self.spec.step();
        T::of(self.count() as f64) * step * step
    }

    /// Indices of masked nodes, in storage order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// True at nodes whose full centered 5-point stencil stays inside the
    /// mask; finite differences are trustworthy only there.
    pub fn stencil_interior(&self) -> Vec<bool> {
        let n = self.spec.n();
        let mut out = vec![false; self.inside.len()];
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let i = self.spec.index(ix, iy);
                out[i] = self.inside[i]
                    && self.inside[i - 1]
                    && self.inside[i + 1]
                    && self.inside[i - n]
                    && self.inside[i + n];
            }
        }
        out
    }
}

/// Wirtinger derivatives `(∂f/∂z, ∂f/∂z̄)` of a grid field.
///
/// Uses centered differences on interior nodes and second-order one-sided
/// stencils on the boundary rows/columns, then
/// `∂z = (fx - i·fy)/2`, `∂z̄ = (fx + i·fy)/2`.
pub fn wirtinger_derivatives<T: Real>(
    f: &ComplexField<T>,
) -> (ComplexField<T>, ComplexField<T>) {
    let spec = f.spec();
    let n = spec.n();
    let step = spec.step();
    let two_h = step + step;
    let half = T::of(0.5);

    let diff = |a: Complex<T>, b: Complex<T>| (a - b).unscale(two_h);
    // One-sided: f'(x0) ≈ (-3 f0 + 4 f1 - f2) / (2h).
    let one_sided = |f0: Complex<T>, f1: Complex<T>, f2: Complex<T>| {
        (f1.scale(T::of(4.0)) - f0.scale(T::of(3.0)) - f2).unscale(two_h)
    };

    let mut dz = Vec::with_capacity(spec.len());
    let mut dzb = Vec::with_capacity(spec.len());
    for iy in 0..n {
        for ix in 0..n {
            let fx = if ix == 0 {
                one_sided(f.at(0, iy), f.at(1, iy), f.at(2, iy))
            } else if ix == n - 1 {
                -one_sided(f.at(n - 1, iy), f.at(n - 2, iy), f.at(n - 3, iy))
            } else {
                diff(f.at(ix + 1, iy), f.at(ix - 1, iy))
            };
            let fy = if iy == 0 {
                one_sided(f.at(ix, 0), f.at(ix, 1), f.at(ix, 2))
            } else if iy == n - 1 {
                -one_sided(f.at(ix, n - 1), f.at(ix, n - 2), f.at(ix, n - 3))
            } else {
                diff(f.at(ix, iy + 1), f.at(ix, iy - 1))
            };
            let ify = Complex::new(-fy.im, fy.re); // i * fy
            dz.push((fx - ify).scale(half));
            dzb.push((fx + ify).scale(half));
        }
    }
    (
        ComplexField { spec, values: dz },
        ComplexField { spec, values: dzb },
    )
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Magic bytes prefixing the binary field format.
pub const FIELD_MAGIC: &[u8; 4] = b"CFLD";

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl<T: Real> ComplexField<T> {
    /// Renders the field as CSV with header `x,y,re,im`, one node per line in
    /// storage order. Numbers use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32 + 16);
        out.push_str("x,y,re,im\n");
        let n = self.spec.n();
        for iy in 0..n {
            for ix in 0..n {
                let z = self.spec.point(ix, iy);
                let v = self.at(ix, iy);
                out.push_str(&fmt_f64(z.re.as_f64()));
                out.push(',');
                out.push_str(&fmt_f64(z.im.as_f64()));
                out.push(',');
                out.push_str(&fmt_f64(v.re.as_f64()));
                out.push(',');
                out.push_str(&fmt_f64(v.im.as_f64()));
                out.push('\n');
            }
        }
        out
    }

    /// Parses the CSV form produced by [`ComplexField::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "x,y,re,im" => {}
            other => {
                return Err(GridError::Csv {
                    line: 1,
                    msg: format!("expected header 'x,y,re,im', got {:?}", other.map(|(_, h)| h)),
                })
            }
        }
        let mut nodes = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| -> Result<f64, GridError> {
                let s = parts.next().ok_or_else(|| GridError::Csv {
                    line: lineno + 1,
                    msg: format!("missing {what} column"),
                })?;
                s.trim().parse::<f64>().map_err(|e| GridError::Csv {
                    line: lineno + 1,
                    msg: format!("bad {what} value {s:?}: {e}"),
                })
            };
            let x = next("x")?;
            let y = next("y")?;
            let re = next("re")?;
            let im = next("im")?;
            if parts.next().is_some() {
                return Err(GridError::Csv { line: lineno + 1, msg: "trailing columns".into() });
            }
            nodes.push([x, y, re, im]);
        }
        Self::from_nodes(&nodes)
    }

    /// Renders the field in the compact binary form: the magic bytes `CFLD`
    /// followed by little-endian `f64` quadruples `(x, y, re, im)` in storage
    /// order.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.values.len() * 32);
        out.extend_from_slice(FIELD_MAGIC);
        let n = self.spec.n();
        for iy in 0..n {
            for ix in 0..n {
                let z = self.spec.point(ix, iy);
                let v = self.at(ix, iy);
                for val in [z.re.as_f64(), z.im.as_f64(), v.re.as_f64(), v.im.as_f64()] {
                    out.extend_from_slice(&val.to_le_bytes());
                }
            }
        }
        out
    }

    /// Parses the binary form produced by [`ComplexField::to_binary`].
    pub fn from_binary(bytes: &[u8]) -> Result<Self, GridError> {
        if bytes.len() < 4 || &bytes[..4] != FIELD_MAGIC {
            return Err(GridError::Binary("missing CFLD magic".into()));
        }
        let body = &bytes[4..];
        if body.len() % 32 != 0 {
            return Err(GridError::Binary(format!(
                "payload of {} bytes is not a whole number of f64 quadruples",
                body.len()
            )));
        }
        let mut nodes = Vec::with_capacity(body.len() / 32);
        for quad in body.chunks_exact(32) {
            let mut vals = [0.0f64; 4];
            for (k, chunk) in quad.chunks_exact(8).enumerate() {
                vals[k] = f64::from_le_bytes(chunk.try_into().unwrap());
            }
            nodes.push(vals);
        }
        Self::from_nodes(&nodes)
    }

    /// Reconstructs grid geometry from explicit `(x, y, re, im)` nodes and
    /// validates that they form a legal grid in storage order.
    fn from_nodes(nodes: &[[f64; 4]]) -> Result<Self, GridError> {
        let count = nodes.len();
        let n = (count as f64).sqrt().round() as usize;
        if n * n != count {
            return Err(GridError::BadLattice(format!("{count} nodes is not a square count")));
        }
        if !is_pow2(n) || !(MIN_GRID_N..=MAX_GRID_N).contains(&n) {
            return Err(GridError::BadSize(n));
        }
        let x0 = nodes[0][0];
        let y0 = nodes[0][1];
        let x1 = nodes[1][0];
        let step = x1 - x0;
        if !(step.is_finite() && step > 0.0) {
            return Err(GridError::BadLattice("non-increasing x coordinates".into()));
        }
        let half_width = step * n as f64 / 2.0;
        let cx = x0 + half_width;
        let cy = y0 + half_width;
        let spec = GridSpec::new(
            Complex::new(T::of(cx), T::of(cy)),
            T::of(half_width),
            n,
        )?;
        let tol = step * 1e-9;
        let mut values = Vec::with_capacity(count);
        for (idx, node) in nodes.iter().enumerate() {
            let ix = idx % n;
            let iy = idx / n;
            let ex = x0 + step * ix as f64;
            let ey = y0 + step * iy as f64;
            if (node[0] - ex).abs() > tol || (node[1] - ey).abs() > tol {
                return Err(GridError::BadLattice(format!(
                    "node {idx} at ({}, {}), expected ({ex}, {ey})",
                    node[0], node[1]
                )));
            }
            values.push(Complex::new(T::of(node[2]), T::of(node[3])));
        }
        ComplexField::new(spec, values)
    }
}
