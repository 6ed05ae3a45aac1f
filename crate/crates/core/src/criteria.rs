//! Solvability criteria for degenerate coefficient fields, evaluated as
//! grid-scale trend tests with three-valued verdicts.
//!
//! Every condition checked here is asymptotic: a disc radius shrinks to zero,
//! an integration cutoff runs to infinity. A finite grid can only attest the
//! *trend* of the associated partial quantities, so each test sweeps its
//! cutoff geometrically, fits a growth model to the partial values, and
//! returns [`Verdict::Satisfied`], [`Verdict::Violated`], or
//! [`Verdict::Inconclusive`] together with the numbers the decision was based
//! on. The slope thresholds separating the verdicts are declared in
//! [`CriteriaConfig`] rather than buried in the code.
//!
//! Conventions shared by all disc and annulus quadratures:
//! - node weights use a smoothed indicator `clamp((r − d)/h + ½, 0, 1)` so
//!   that sweeps vary smoothly with the radius instead of jumping when the
//!   boundary crosses a node;
//! - nodes holding non-finite samples (degenerate dilatation) carry zero area
//!   in the limit and are excluded from the sums; their count is reported as
//!   evidence.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{CoefficientPair, DilatationField};
use crate::grid::{DomainMask, RealField};
use crate::scalar::Real;

/// Minimum number of samples a Φ table must hold.
pub const MIN_PHI_SAMPLES: usize = 4;

// Growth-model bands for the divergence classifier, acting on the fitted
// slopes of log-increments of partial integrals over a doubling sweep:
// `beta1` against the sweep index, `beta2` against its logarithm.
const POWER_MIN_BETA1: f64 = 0.15;
const LOG_MIN_BETA1: f64 = -0.08;
const BOUNDED_MAX_BETA1: f64 = -0.30;
const LOGLOG_MAX_BETA2: f64 = -0.45;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("disc family is empty")]
    EmptyDiscFamily,
    #[error("no disc in the family covers enough masked nodes")]
    NoUsableDisc,
    #[error("point ({0}, {1}) lies outside the closure of the masked domain")]
    PointOutsideDomain(f64, f64),
    #[error("circle of radius {radius} around ({x}, {y}) leaves the grid")]
    CircleExitsGrid { x: f64, y: f64, radius: f64 },
    #[error("radius {0} is below the resolvable scale {1}")]
    RadiusBelowScale(f64, f64),
    #[error("radii must be positive and strictly increasing")]
    RadiiNotIncreasing,
    #[error("radii and profile lengths differ: {0} vs {1}")]
    ProfileLengthMismatch(usize, usize),
    #[error("profile value at index {0} is not positive")]
    NonpositiveProfile(usize),
    #[error("Φ table needs at least {MIN_PHI_SAMPLES} samples, got {0}")]
    TableTooShort(usize),
    #[error("Φ table abscissae must be finite, non-negative, and strictly increasing")]
    TableNotIncreasing,
    #[error("Φ table values must be finite, non-negative, and non-decreasing")]
    TableNotMonotone,
    #[error("convexification threshold {0} leaves no table nodes above it")]
    ThresholdBeyondTable(f64),
    #[error("sweep needs eps0 > eps > 0, got eps {eps} and eps0 {eps0}")]
    BadSweep { eps: f64, eps0: f64 },
    #[error("the chosen ψ family needs radii below 1, got outer radius {0}")]
    PsiDomain(f64),
    #[error("normalizing integral of the modulus bound is {0}; admissibility fails")]
    ModulusNormalization(f64),
    #[error("{name} must be positive, got {value}")]
    NonpositiveInput { name: &'static str, value: f64 },
    #[error("dominant field drops below the dilatation at node index {0}")]
    NotDominant(usize),
}

/// Three-valued outcome of a criterion test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// One criterion outcome with the quantities that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct CriteriaVerdict {
    /// Short slug naming the test.
    pub test: String,
    pub verdict: Verdict,
    /// Growth model the divergence classifier settled on, where one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Fitted slopes, partial integrals, cutoffs, sample counts.
    pub evidence: BTreeMap<String, f64>,
}

impl CriteriaVerdict {
    fn new(test: &str, verdict: Verdict) -> Self {
        CriteriaVerdict {
            test: test.to_owned(),
            verdict,
            model: None,
            evidence: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.evidence.insert(key.to_owned(), value);
        self
    }
}

/// Declared thresholds for all trend fits.
#[derive(Clone, Debug)]
pub struct CriteriaConfig {
    /// Fitted log-slope at or below which an oscillation or mean sweep counts
    /// as bounded.
    pub bounded_slope: f64,
    /// Fitted log-slope at or above which growth counts as genuine.
    pub violated_slope: f64,
    /// Slope of `ln(ratio)` against `ln(scale)` at or below which a ratio
    /// counts as vanishing.
    pub vanishing_slope: f64,
    /// Slope above which a ratio clearly fails to vanish.
    pub stagnant_slope: f64,
    /// Angular nodes used by circle quadratures.
    pub circle_nodes: usize,
    /// Minimum number of positive increments a divergence fit needs before it
    /// commits to a model.
    pub min_increments: usize,
    /// Relative stability demanded of an integral budget under grid
    /// decimation.
    pub budget_stability: f64,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        CriteriaConfig {
            bounded_slope: 0.05,
            violated_slope: 0.5,
            vanishing_slope: -0.1,
            stagnant_slope: -0.02,
            circle_nodes: 1024,
            min_increments: 4,
            budget_stability: 0.05,
        }
    }
}

// ---------------------------------------------------------------------------
// Trend fitting.

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 1e-300 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GrowthModel {
    Bounded,
    Log,
    LogLog,
    Power,
    Unresolved,
}

impl GrowthModel {
    fn name(self) -> &'static str {
        match self {
            GrowthModel::Bounded => "bounded",
            GrowthModel::Log => "log",
            GrowthModel::LogLog => "loglog",
            GrowthModel::Power => "power",
            GrowthModel::Unresolved => "unresolved",
        }
    }

    fn diverges(self) -> Option<bool> {
        match self {
            GrowthModel::Bounded => Some(false),
            GrowthModel::Log | GrowthModel::LogLog | GrowthModel::Power => Some(true),
            GrowthModel::Unresolved => None,
        }
    }
}

/// Classifies a sequence of partial integrals taken over a doubling cutoff
/// sweep. Works on the increments gained per doubling: geometric decay means
/// the total converges, constant increments mean logarithmic growth,
/// increments decaying like `1/j` mean log-log growth, growing increments
/// mean a power law.
fn classify_partials(partials: &[f64], min_increments: usize) -> (GrowthModel, BTreeMap<String, f64>) {
    let mut ev = BTreeMap::new();
    let last = partials.last().copied().unwrap_or(0.0);
    ev.insert("partial_last".to_owned(), last);
    ev.insert("sweep_len".to_owned(), partials.len() as f64);
    if partials.len() < 3 {
        return (GrowthModel::Unresolved, ev);
    }
    let scale = last.abs().max(1e-300);
    let mid = partials[partials.len() / 2];
    if last - mid <= 1e-9 * scale {
        return (GrowthModel::Bounded, ev);
    }
    let mut deltas: Vec<(f64, f64)> = Vec::new();
    for j in 0..partials.len() - 1 {
        let delta = partials[j + 1] - partials[j];
        if delta > 1e-14 * scale {
            deltas.push(((j + 1) as f64, delta));
        }
    }
    ev.insert("positive_increments".to_owned(), deltas.len() as f64);
    if deltas.len() < min_increments {
        return (GrowthModel::Unresolved, ev);
    }
    // an integrand humped in the sweep variable rises before its tail decay;
    // divergence is a tail property, so fit from the largest increment on
    let peak = deltas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).expect("positive increments"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let tail = if deltas.len() - peak >= min_increments { &deltas[peak..] } else { &deltas[..] };
    ev.insert("peak_index".to_owned(), peak as f64);
    let xs_j: Vec<f64> = tail.iter().map(|&(j, _)| j).collect();
    let xs_lj: Vec<f64> = tail.iter().map(|&(j, _)| j.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, d)| d.ln()).collect();
    let beta1 = fit_slope(&xs_j, &ys);
    let beta2 = fit_slope(&xs_lj, &ys);
    ev.insert("beta1".to_owned(), beta1);
    ev.insert("beta2".to_owned(), beta2);
    let model = if beta1 >= POWER_MIN_BETA1 {
        GrowthModel::Power
    } else if beta1 > LOG_MIN_BETA1 {
        GrowthModel::Log
    } else if beta1 <= BOUNDED_MAX_BETA1 {
        GrowthModel::Bounded
    } else if beta2 <= LOGLOG_MAX_BETA2 {
        GrowthModel::LogLog
    } else {
        GrowthModel::Unresolved
    };
    (model, ev)
}

fn divergence_verdict(model: GrowthModel) -> Verdict {
    match model.diverges() {
        Some(true) => Verdict::Satisfied,
        Some(false) => Verdict::Violated,
        None => Verdict::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// Disc quadratures.

struct DiscSample<T> {
    mean: T,
    deviation: T,
    skipped: usize,
}

fn axis_window<T: Real>(origin: T, step: T, n: usize, lo: T, hi: T) -> (usize, usize) {
    let a = ((lo - origin) / step).floor().as_f64();
    let b = ((hi - origin) / step).ceil().as_f64();
    let a = if a <= 0.0 { 0 } else { (a as usize).min(n - 1) };
    let b = if b <= 0.0 { 0 } else { (b as usize).min(n - 1) };
    (a, b)
}

/// Weighted mean and mean absolute deviation of `u` over the disc
/// `B(center, radius)` intersected with the mask. `centering` replaces the
/// disc mean as the reference value when supplied. Returns `None` when the
/// disc covers less than a few cells of masked, finite data.
fn disc_deviation<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    center: Complex<T>,
    radius: T,
    centering: Option<T>,
) -> Option<DiscSample<T>> {
    let spec = u.spec();
    let n = spec.n();
    let step = spec.step();
    let ox = spec.center().re - spec.half_width();
    let oy = spec.center().im - spec.half_width();
    let (ix_lo, ix_hi) = axis_window(ox, step, n, center.re - radius - step, center.re + radius + step);
    let (iy_lo, iy_hi) = axis_window(oy, step, n, center.im - radius - step, center.im + radius + step);
    let mut pairs: Vec<(T, T)> = Vec::new();
    let mut skipped = 0usize;
    let half = T::of(0.5);
    for iy in iy_lo..=iy_hi {
        for ix in ix_lo..=ix_hi {
            if !mask.contains(ix, iy) {
                continue;
            }
            let d = (spec.point(ix, iy) - center).norm();
            let w = ((radius - d) / step + half).min(T::one()).max(T::zero());
            if w <= T::zero() {
                continue;
            }
            let v = u.at(ix, iy);
            if !v.is_finite() {
                skipped += 1;
                continue;
            }
            pairs.push((w, v));
        }
    }
    let wsum: T = pairs.iter().map(|&(w, _)| w).sum();
    if wsum < T::of(3.0) {
        return None;
    }
    let mean = pairs.iter().map(|&(w, v)| w * v).sum::<T>() / wsum;
    let reference = centering.unwrap_or(mean);
    let deviation = pairs.iter().map(|&(w, v)| w * (v - reference).abs()).sum::<T>() / wsum;
    Some(DiscSample { mean, deviation, skipped })
}

fn near_mask<T: Real>(mask: &DomainMask<T>, z0: Complex<T>, within: T) -> bool {
    let spec = mask.spec();
    let n = spec.n();
    let step = spec.step();
    let ox = spec.center().re - spec.half_width();
    let oy = spec.center().im - spec.half_width();
    let (ix_lo, ix_hi) = axis_window(ox, step, n, z0.re - within, z0.re + within);
    let (iy_lo, iy_hi) = axis_window(oy, step, n, z0.im - within, z0.im + within);
    for iy in iy_lo..=iy_hi {
        for ix in ix_lo..=ix_hi {
            if mask.contains(ix, iy) && (spec.point(ix, iy) - z0).norm() <= within {
                return true;
            }
        }
    }
    false
}

/// Distance from `z0` to the nearest unmasked node or grid edge; circles of
/// any smaller radius around `z0` stay inside the masked domain and the grid.
fn mask_clearance<T: Real>(mask: &DomainMask<T>, z0: Complex<T>) -> T {
    let spec = mask.spec();
    let step = spec.step();
    let lo_x = spec.center().re - spec.half_width();
    let lo_y = spec.center().im - spec.half_width();
    let hi_x = lo_x + step * T::of((spec.n() - 1) as f64);
    let hi_y = lo_y + step * T::of((spec.n() - 1) as f64);
    let mut best = (z0.re - lo_x)
        .min(hi_x - z0.re)
        .min(z0.im - lo_y)
        .min(hi_y - z0.im);
    for (ix, iy, p) in spec.iter_points() {
        if !mask.contains(ix, iy) {
            best = best.min((p - z0).norm());
        }
    }
    best
}

/// The dyadic radius sweep the disc tests use around `z0`: from slightly
/// inside the largest in-grid disc down to four grid steps, halving.
pub fn fmo_scales<T: Real>(mask: &DomainMask<T>, z0: Complex<T>) -> Vec<T> {
    let spec = mask.spec();
    let step = spec.step();
    let lo_x = spec.center().re - spec.half_width();
    let lo_y = spec.center().im - spec.half_width();
    let hi_x = lo_x + step * T::of((spec.n() - 1) as f64);
    let hi_y = lo_y + step * T::of((spec.n() - 1) as f64);
    let margin = (z0.re - lo_x)
        .min(hi_x - z0.re)
        .min(z0.im - lo_y)
        .min(hi_y - z0.im);
    let mut eps = margin * T::of(0.95);
    let eps_min = step * T::of(4.0);
    let mut out = Vec::new();
    while eps >= eps_min {
        out.push(eps);
        eps = eps * T::of(0.5);
    }
    out
}

/// Mean-oscillation trend of `u` on shrinking discs around `z0`.
///
/// The verdict is `Satisfied` when the oscillation stays bounded as the disc
/// shrinks (fitted log-slope at most `bounded_slope`), `Violated` when it
/// grows with slope at least `violated_slope`, `Inconclusive` in between.
/// Evidence also carries the sufficient mean-boundedness check (fitted slope
/// of the disc means themselves, flag `means_bounded`), which can certify the
/// finite-mean-oscillation property without deciding it.
pub fn fmo_test<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    z0: Complex<T>,
    cfg: &CriteriaConfig,
) -> Result<CriteriaVerdict, CriteriaError> {
    fmo_test_with_centering(u, mask, z0, None, cfg)
}

/// [`fmo_test`] with a caller-supplied centering sequence: the deviation at
/// scale `ε` is measured against `centering(ε)` instead of the disc mean.
/// Bounded deviations against *any* centering are sufficient for the
/// finite-mean-oscillation property.
pub fn fmo_test_with_centering<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    z0: Complex<T>,
    centering: Option<&dyn Fn(T) -> T>,
    cfg: &CriteriaConfig,
) -> Result<CriteriaVerdict, CriteriaError> {
    let step = u.spec().step();
    if !near_mask(mask, z0, step * T::of(2.5)) {
        return Err(CriteriaError::PointOutsideDomain(z0.re.as_f64(), z0.im.as_f64()));
    }
    let scales = fmo_scales(mask, z0);
    let mut rows: Vec<(f64, f64, f64, usize)> = Vec::new();
    for &eps in &scales {
        let reference = centering.map(|f| f(eps));
        if let Some(s) = disc_deviation(u, mask, z0, eps, reference) {
            rows.push((eps.as_f64(), s.deviation.as_f64(), s.mean.as_f64(), s.skipped));
        }
    }
    let mut out = CriteriaVerdict::new("fmo", Verdict::Inconclusive);
    out.evidence.insert("scales".to_owned(), rows.len() as f64);
    if centering.is_some() {
        out.evidence.insert("centered".to_owned(), 1.0);
    }
    if rows.len() < 3 {
        return Ok(out);
    }
    let (eps_first, osc_first, mean_first, _) = rows[0];
    let (eps_last, osc_last, mean_last, skipped_last) = *rows.last().expect("nonempty");
    out.evidence.insert("eps_first".to_owned(), eps_first);
    out.evidence.insert("eps_last".to_owned(), eps_last);
    out.evidence.insert("osc_first".to_owned(), osc_first);
    out.evidence.insert("osc_last".to_owned(), osc_last);
    out.evidence.insert("mean_first".to_owned(), mean_first);
    out.evidence.insert("mean_last".to_owned(), mean_last);
    out.evidence.insert("skipped_last".to_owned(), skipped_last as f64);

    let mean_scale = rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
    let tiny = 1e-13 * (1.0 + mean_scale);
    let mean_slope = {
        let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.0).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| (1.0 + r.2.abs()).ln()).collect();
        fit_slope(&xs, &ys)
    };
    out.evidence.insert("mean_slope".to_owned(), mean_slope);
    out.evidence.insert(
        "means_bounded".to_owned(),
        if mean_slope <= cfg.bounded_slope { 1.0 } else { 0.0 },
    );

    if rows.iter().all(|r| r.1 <= tiny) {
        out.evidence.insert("slope".to_owned(), 0.0);
        out.verdict = Verdict::Satisfied;
        return Ok(out);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(eps, osc, _, _) in &rows {
        if osc > tiny {
            xs.push((1.0 / eps).ln());
            ys.push(osc.ln());
        }
    }
    if xs.len() < 2 {
        return Ok(out);
    }
    let slope = fit_slope(&xs, &ys);
    out.evidence.insert("slope".to_owned(), slope);
    out.verdict = if slope <= cfg.bounded_slope {
        Verdict::Satisfied
    } else if slope >= cfg.violated_slope {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(out)
}

/// A dyadic family of discs inside the masked domain: centers on a coarse
/// sublattice of masked nodes, radii halving from the in-grid maximum down to
/// four grid steps (at most `per_center` radii each).
pub fn dyadic_disc_family<T: Real>(
    mask: &DomainMask<T>,
    per_center: usize,
) -> Vec<(Complex<T>, T)> {
    let spec = mask.spec();
    let n = spec.n();
    let stride = (n / 8).max(1);
    let mut out = Vec::new();
    for iy in (0..n).step_by(stride) {
        for ix in (0..n).step_by(stride) {
            if !mask.contains(ix, iy) {
                continue;
            }
            let c = spec.point(ix, iy);
            for (k, eps) in fmo_scales(mask, c).into_iter().enumerate() {
                if k >= per_center {
                    break;
                }
                out.push((c, eps));
            }
        }
    }
    out
}

/// Largest mean oscillation of `u` over the given disc family.
pub fn bmo_norm_estimate<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    discs: &[(Complex<T>, T)],
) -> Result<T, CriteriaError> {
    if discs.is_empty() {
        return Err(CriteriaError::EmptyDiscFamily);
    }
    let mut best: Option<T> = None;
    for &(c, r) in discs {
        if let Some(s) = disc_deviation(u, mask, c, r, None) {
            best = Some(match best {
                Some(b) => b.max(s.deviation),
                None => s.deviation,
            });
        }
    }
    best.ok_or(CriteriaError::NoUsableDisc)
}

/// Mean oscillation of `u` over `B(center, r)` for each requested radius.
pub fn bmo_profile<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    center: Complex<T>,
    radii: &[T],
) -> Result<Vec<T>, CriteriaError> {
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let s = disc_deviation(u, mask, center, r, None).ok_or(CriteriaError::NoUsableDisc)?;
        out.push(s.deviation);
    }
    Ok(out)
}

/// One row of the annulus-bound evidence table.
#[derive(Clone, Debug, Serialize)]
pub struct AnnulusBoundRow {
    pub eps: f64,
    /// `∫_{ε<|z−z0|<R} u / (|z−z0|·log(1/|z−z0|))²` over masked finite nodes.
    pub integral: f64,
    /// The integral divided by `log log (1/ε)`.
    pub ratio: f64,
}

/// Evidence table for the weighted-annulus bound on a nonnegative field.
#[derive(Clone, Debug, Serialize)]
pub struct AnnulusBoundCheck {
    pub rows: Vec<AnnulusBoundRow>,
    /// Largest observed ratio; finite stabilization confirms the bound.
    pub constant: f64,
}

/// Sweeps `I(ε) = ∫_{ε<|z−z0|<R} u/(|z−z0| log(1/|z−z0|))²` over a dyadic `ε`
/// grid (outer radius `R` capped at `e⁻¹`) and reports the ratios to
/// `log log(1/ε)`. Expects `u ≥ 0`.
pub fn fmo_annulus_bound_check<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    z0: Complex<T>,
) -> AnnulusBoundCheck {
    let spec = u.spec();
    let step = spec.step().as_f64();
    let scales = fmo_scales(mask, z0);
    let margin = scales.first().map(|&e| e.as_f64()).unwrap_or(0.0);
    let outer = margin.min((-1.0f64).exp());
    if outer <= 4.0 * step {
        return AnnulusBoundCheck { rows: Vec::new(), constant: 0.0 };
    }
    let h2 = step * step;
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for (ix, iy, p) in spec.iter_points() {
        if !mask.contains(ix, iy) {
            continue;
        }
        let v = u.at(ix, iy);
        if !v.is_finite() {
            continue;
        }
        let d = (p - z0).norm().as_f64();
        if d <= 0.0 || d >= outer {
            continue;
        }
        let l = (1.0 / d).ln();
        terms.push((d, v.as_f64() * h2 / (d * d * l * l)));
    }
    terms.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite distances"));
    let mut rows = Vec::new();
    let mut acc = 0.0;
    let mut cursor = 0usize;
    let mut eps = outer / 2.0;
    while eps >= 4.0 * step {
        while cursor < terms.len() && terms[cursor].0 > eps {
            acc += terms[cursor].1;
            cursor += 1;
        }
        let ll = (1.0 / eps).ln().ln();
        rows.push(AnnulusBoundRow { eps, integral: acc, ratio: if ll > 0.0 { acc / ll } else { 0.0 } });
        eps /= 2.0;
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    AnnulusBoundCheck { rows, constant }
}

// ---------------------------------------------------------------------------
// Circle means and the divergence test on radial profiles.

/// Mean of `u` over the circle `|z − z0| = r` for each radius, by uniform
/// angular quadrature with bilinear interpolation. A circle that touches
/// non-finite samples reports an infinite mean.
pub fn circle_mean<T: Real>(
    u: &RealField<T>,
    z0: Complex<T>,
    radii: &[T],
    angular_nodes: usize,
) -> Result<Vec<T>, CriteriaError> {
    let step = u.spec().step();
    let m = angular_nodes.max(8);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if r < step * T::of(2.0) {
            return Err(CriteriaError::RadiusBelowScale(r.as_f64(), (step * T::of(2.0)).as_f64()));
        }
        let mut acc = T::zero();
        let mut finite = true;
        for k in 0..m {
            let theta = T::of(2.0) * T::PI() * T::of(k as f64) / T::of(m as f64);
            let p = z0 + Complex::new(r * theta.cos(), r * theta.sin());
            let v = u.interp(p).ok_or(CriteriaError::CircleExitsGrid {
                x: z0.re.as_f64(),
                y: z0.im.as_f64(),
                radius: r.as_f64(),
            })?;
            if v.is_finite() {
                acc += v;
            } else {
                finite = false;
            }
        }
        out.push(if finite { acc / T::of(m as f64) } else { T::infinity() });
    }
    Ok(out)
}

/// Tests whether `∫ dr/(r·k(r))` diverges as the lower limit shrinks.
///
/// `radii` must be positive and strictly increasing with `profile[i] =
/// k(radii[i]) > 0` (infinite values are allowed and contribute nothing).
/// Partial integrals are accumulated from the outer radius inward and
/// classified per doubling of the cutoff; divergence satisfies the criterion.
/// Evidence also carries the sufficient check that the profile is
/// `O(log 1/r)` (flag `log_bound_ok`).
pub fn lehto_divergence_test<T: Real>(
    radii: &[T],
    profile: &[T],
    cfg: &CriteriaConfig,
) -> Result<CriteriaVerdict, CriteriaError> {
    if radii.len() != profile.len() {
        return Err(CriteriaError::ProfileLengthMismatch(radii.len(), profile.len()));
    }
    if radii.len() < 2 || radii[0] <= T::zero() {
        return Err(CriteriaError::RadiiNotIncreasing);
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(CriteriaError::RadiiNotIncreasing);
        }
    }
    for (i, &p) in profile.iter().enumerate() {
        if !(p > T::zero()) {
            return Err(CriteriaError::NonpositiveProfile(i));
        }
    }
    let s: Vec<f64> = radii.iter().map(|&r| r.as_f64().ln()).collect();
    let q: Vec<f64> = profile.iter().map(|&p| 1.0 / p.as_f64()).collect();
    let len = radii.len();
    // cumulative[m] = ∫ from radii[m] to radii[len-1]
    let mut cumulative = vec![0.0; len];
    for m in (0..len - 1).rev() {
        cumulative[m] = cumulative[m + 1] + 0.5 * (q[m] + q[m + 1]) * (s[m + 1] - s[m]);
    }
    let r_max = radii[len - 1].as_f64();
    let r_min = radii[0].as_f64();
    let octaves = (r_max / r_min).log2().floor() as usize;
    let mut partials = Vec::with_capacity(octaves);
    for j in 1..=octaves {
        let cutoff = r_max / f64::powi(2.0, j as i32);
        let m = radii.partition_point(|&r| r.as_f64() < cutoff);
        partials.push(cumulative[m.min(len - 1)]);
    }
    let (model, ev) = classify_partials(&partials, cfg.min_increments);
    let mut out = CriteriaVerdict::new("lehto", divergence_verdict(model));
    out.model = Some(model.name().to_owned());
    out.evidence = ev;
    out.evidence.insert("octaves".to_owned(), octaves as f64);

    // Sufficient condition: k(r) = O(log 1/r) as r → 0.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut all_finite = true;
    for (i, &r) in radii.iter().enumerate() {
        let rf = r.as_f64();
        if rf >= 1.0 {
            continue;
        }
        let ratio = profile[i].as_f64() / (1.0 + (1.0 / rf).ln());
        if !ratio.is_finite() {
            all_finite = false;
            break;
        }
        xs.push((1.0 + (1.0 / rf).ln()).ln());
        ys.push(ratio.ln());
    }
    let log_bound_slope = if all_finite && xs.len() >= 3 { fit_slope(&xs, &ys) } else { f64::INFINITY };
    out.evidence.insert(
        "log_bound_slope".to_owned(),
        if log_bound_slope.is_finite() { log_bound_slope } else { 1e308 },
    );
    out.evidence.insert(
        "log_bound_ok".to_owned(),
        if all_finite && log_bound_slope <= cfg.bounded_slope { 1.0 } else { 0.0 },
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dominant fields.

/// An extended-real field `Q ≥ max(1, K)` used in place of the dilatation by
/// tests that accept any pointwise dominant.
#[derive(Clone, Debug)]
pub struct DominantField<T> {
    q: RealField<T>,
    mask: DomainMask<T>,
}

impl<T: Real> DominantField<T> {
    /// The default dominant: the dilatation itself.
    pub fn from_dilatation(k: &DilatationField<T>) -> Self {
        DominantField { q: k.values().clone(), mask: k.mask().clone() }
    }

    /// Validates `Q ≥ 1` and `Q ≥ K` on the mask (degenerate nodes require an
    /// infinite dominant).
    pub fn new(q: RealField<T>, k: &DilatationField<T>) -> Result<Self, CriteriaError> {
        for idx in k.mask().indices() {
            let qi = q.values()[idx];
            let ki = k.values().values()[idx];
            if !(qi >= T::one()) || (qi < ki) || (!ki.is_finite() && qi.is_finite()) {
                return Err(CriteriaError::NotDominant(idx));
            }
        }
        Ok(DominantField { q, mask: k.mask().clone() })
    }

    #[inline]
    pub fn field(&self) -> &RealField<T> {
        &self.q
    }

    #[inline]
    pub fn mask(&self) -> &DomainMask<T> {
        &self.mask
    }
}

// ---------------------------------------------------------------------------
// Tabulated Φ and its integral conditions.

fn pl_value_f64(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&t| t <= x);
    let (a, b) = (k - 1, k);
    ys[a] + (ys[b] - ys[a]) * (x - xs[a]) / (xs[b] - xs[a])
}

fn pl_slope_f64(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    let k = if x <= xs[0] {
        1
    } else if x >= xs[last] {
        last
    } else {
        xs.partition_point(|&t| t <= x).max(1)
    };
    (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1])
}

/// `inf{x : f(x) ≥ target}` for a piecewise-linear non-decreasing table;
/// plateaus resolve to their left endpoint, an unreached target to `+∞`.
fn pl_inverse_f64(xs: &[f64], ys: &[f64], target: f64) -> f64 {
    if target <= ys[0] {
        return xs[0];
    }
    let last = ys.len() - 1;
    if target > ys[last] {
        return f64::INFINITY;
    }
    let k = ys.partition_point(|&y| y < target);
    // ys[k-1] < target ≤ ys[k], so the segment has positive slope.
    xs[k - 1] + (target - ys[k - 1]) * (xs[k] - xs[k - 1]) / (ys[k] - ys[k - 1])
}

/// A non-decreasing growth function `Φ` given as a sample table, with the
/// derived quantities the integral conditions need: `H(t) = log Φ(t)` and the
/// left-continuous inverse.
#[derive(Clone, Debug)]
pub struct PhiCondition<T> {
    ts: Vec<T>,
    phis: Vec<T>,
    convex: bool,
}

impl<T: Real> PhiCondition<T> {
    pub fn new(samples: &[(T, T)]) -> Result<Self, CriteriaError> {
        if samples.len() < MIN_PHI_SAMPLES {
            return Err(CriteriaError::TableTooShort(samples.len()));
        }
        let ts: Vec<T> = samples.iter().map(|&(t, _)| t).collect();
        let phis: Vec<T> = samples.iter().map(|&(_, p)| p).collect();
        if !ts[0].is_finite() || ts[0] < T::zero() {
            return Err(CriteriaError::TableNotIncreasing);
        }
        for w in ts.windows(2) {
            if !w[1].is_finite() || !(w[1] > w[0]) {
                return Err(CriteriaError::TableNotIncreasing);
            }
        }
        if phis.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(CriteriaError::TableNotMonotone);
        }
        for w in phis.windows(2) {
            if w[1] < w[0] {
                return Err(CriteriaError::TableNotMonotone);
            }
        }
        let mut convex = true;
        let mut prev_slope: Option<T> = None;
        for i in 0..ts.len() - 1 {
            let s = (phis[i + 1] - phis[i]) / (ts[i + 1] - ts[i]);
            if let Some(p) = prev_slope {
                let tol = T::of(1e-9) * (p.abs() + s.abs() + T::one());
                if s < p - tol {
                    convex = false;
                    break;
                }
            }
            prev_slope = Some(s);
        }
        Ok(PhiCondition { ts, phis, convex })
    }

    /// Samples a closed-form `Φ` at the given abscissae.
    pub fn tabulate(f: impl Fn(T) -> T, ts: &[T]) -> Result<Self, CriteriaError> {
        let samples: Vec<(T, T)> = ts.iter().map(|&t| (t, f(t))).collect();
        Self::new(&samples)
    }

    #[inline]
    pub fn ts(&self) -> &[T] {
        &self.ts
    }

    #[inline]
    pub fn phis(&self) -> &[T] {
        &self.phis
    }

    /// Whether the sampled table is discretely convex.
    #[inline]
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Piecewise-linear evaluation, clamped to the tabulated range: the table
    /// is the whole truth about `Φ`, so no extrapolation happens.
    pub fn value(&self, t: T) -> T {
        if t <= self.ts[0] {
            return self.phis[0];
        }
        let last = self.ts.len() - 1;
        if t >= self.ts[last] {
            return self.phis[last];
        }
        let k = self.ts.partition_point(|&x| x <= t);
        let (a, b) = (k - 1, k);
        self.phis[a] + (self.phis[b] - self.phis[a]) * (t - self.ts[a]) / (self.ts[b] - self.ts[a])
    }

    /// `inf{t : Φ(t) ≥ τ}`; plateaus resolve to their left endpoint and an
    /// unreached `τ` yields `+∞`.
    pub fn inverse(&self, tau: T) -> T {
        if tau <= self.phis[0] {
            return self.ts[0];
        }
        let last = self.phis.len() - 1;
        if tau > self.phis[last] {
            return T::infinity();
        }
        let k = self.phis.partition_point(|&p| p < tau);
        self.ts[k - 1]
            + (tau - self.phis[k - 1]) * (self.ts[k] - self.ts[k - 1])
                / (self.phis[k] - self.phis[k - 1])
    }

    /// The convexified minorant that is zero up to `threshold`, follows the
    /// tangent line from `(threshold, 0)` out to the tangency node, and
    /// coincides with `Φ` beyond it. Preserves the divergence class of the
    /// integral conditions while making the table convex from below.
    pub fn convexify(&self, threshold: T) -> Result<PhiCondition<T>, CriteriaError> {
        let last = self.ts.len() - 1;
        if !(threshold.is_finite()
            && threshold >= self.ts[0]
            && threshold < self.ts[last])
        {
            return Err(CriteriaError::ThresholdBeyondTable(threshold.as_f64()));
        }
        let mut slope: Option<T> = None;
        let mut t_star = self.ts[last];
        for i in 0..=last {
            if self.ts[i] > threshold && self.phis[i] > T::zero() {
                let s = self.phis[i] / (self.ts[i] - threshold);
                if slope.map_or(true, |b| s < b) {
                    slope = Some(s);
                    t_star = self.ts[i];
                }
            }
        }
        let slope = slope.ok_or(CriteriaError::ThresholdBeyondTable(threshold.as_f64()))?;
        let mut pairs: Vec<(T, T)> = Vec::with_capacity(self.ts.len() + 1);
        let mut threshold_present = false;
        for i in 0..=last {
            let t = self.ts[i];
            let v = if t <= threshold {
                T::zero()
            } else if t < t_star {
                slope * (t - threshold)
            } else {
                self.phis[i]
            };
            if t == threshold {
                threshold_present = true;
            }
            pairs.push((t, v));
        }
        if !threshold_present {
            let pos = pairs.partition_point(|&(t, _)| t < threshold);
            pairs.insert(pos, (threshold, T::zero()));
        }
        PhiCondition::new(&pairs)
    }

    /// The table of `H(t) = log Φ(t)` over the nodes where `Φ ≥ 1`, as
    /// `f64`. The integral conditions only concern the tail where `H ≥ 0`;
    /// below that the integrands change sign and say nothing.
    fn h_table(&self) -> (Vec<f64>, Vec<f64>) {
        let mut ts = Vec::new();
        let mut hs = Vec::new();
        for i in 0..self.ts.len() {
            if self.phis[i] >= T::one() {
                ts.push(self.ts[i].as_f64());
                hs.push(self.phis[i].as_f64().ln());
            }
        }
        (ts, hs)
    }
}

/// `inf{t : Φ(t) ≥ τ}` with the table's conventions.
pub fn phi_inverse<T: Real>(cond: &PhiCondition<T>, tau: T) -> T {
    cond.inverse(tau)
}

/// Outcomes of the six equivalent integral conditions on a tabulated `Φ`.
#[derive(Clone, Debug, Serialize)]
pub struct PhiConditionTests {
    pub verdicts: Vec<CriteriaVerdict>,
    /// False when a convex table produced conflicting verdicts — a grid
    /// resolution failure that downgrades everything to inconclusive.
    pub consistent: bool,
    pub overall: Verdict,
}

const SAMPLES_PER_OCTAVE: usize = 16;

/// Partial integrals of `integrand` (a function of the sample and its index)
/// over a geometric sample set, recorded at each full doubling.
fn geometric_partials(
    lo: f64,
    hi: f64,
    mut trapezoid_term: impl FnMut(f64, f64) -> f64,
) -> Vec<f64> {
    if !(hi > lo) || lo <= 0.0 {
        return Vec::new();
    }
    let octaves = (hi / lo).log2().floor() as usize;
    if octaves == 0 {
        return Vec::new();
    }
    let dx = std::f64::consts::LN_2 / SAMPLES_PER_OCTAVE as f64;
    let mut partials = Vec::with_capacity(octaves);
    let mut acc = 0.0;
    let mut prev = lo;
    for i in 1..=octaves * SAMPLES_PER_OCTAVE {
        let x = lo * (dx * i as f64).exp();
        acc += trapezoid_term(prev, x);
        prev = x;
        if i % SAMPLES_PER_OCTAVE == 0 {
            partials.push(acc);
        }
    }
    partials
}

fn condition_verdict(
    name: &str,
    partials: Vec<f64>,
    cfg: &CriteriaConfig,
) -> CriteriaVerdict {
    let (model, ev) = classify_partials(&partials, cfg.min_increments);
    let mut out = CriteriaVerdict::new(name, divergence_verdict(model));
    out.model = Some(model.name().to_owned());
    out.evidence = ev;
    out
}

/// Numerically tests the six equivalent divergence conditions on `Φ` (with
/// `H = log Φ`): `∫H′(t)dt/t`, the Stieltjes `∫dH/t`, `∫H(t)dt/t²`, the
/// substituted `∫H(1/t)dt` near zero, `∫dη/H⁻¹(η)`, and `∫dτ/(τ·Φ⁻¹(τ))`.
/// For a convex table the verdicts must agree; disagreement is flagged as a
/// resolution failure and downgrades all six to inconclusive.
pub fn phi_condition_tests<T: Real>(
    cond: &PhiCondition<T>,
    cfg: &CriteriaConfig,
) -> PhiConditionTests {
    let names = [
        "h-prime-over-t",
        "stieltjes-dh-over-t",
        "h-over-t-squared",
        "h-of-reciprocal",
        "inverse-h-integral",
        "inverse-phi-integral",
    ];
    let (hts, hs) = cond.h_table();
    let usable: Vec<usize> = (0..hts.len()).filter(|&i| hts[i] > 0.0).collect();
    if usable.len() < 6 {
        let verdicts = names
            .iter()
            .map(|n| {
                CriteriaVerdict::new(n, Verdict::Inconclusive)
                    .with("usable_nodes", usable.len() as f64)
            })
            .collect();
        return PhiConditionTests { verdicts, consistent: true, overall: Verdict::Inconclusive };
    }
    let pts: Vec<f64> = usable.iter().map(|&i| hts[i]).collect();
    let phs: Vec<f64> = usable.iter().map(|&i| hs[i]).collect();
    let t_lo = pts[pts.len() / 4];
    let t_hi = *pts.last().expect("nonempty");

    let mut verdicts: Vec<CriteriaVerdict> = Vec::with_capacity(6);

    // ∫ H′(t)/t dt, integrated in x = ln t: trapezoid of H′.
    verdicts.push(condition_verdict(
        names[0],
        geometric_partials(t_lo, t_hi, |a, b| {
            0.5 * (pl_slope_f64(&pts, &phs, a) + pl_slope_f64(&pts, &phs, b)) * (b / a).ln()
        }),
        cfg,
    ));
    // Stieltjes ∫ dH/t: increments of H against the midpoint abscissa.
    verdicts.push(condition_verdict(
        names[1],
        geometric_partials(t_lo, t_hi, |a, b| {
            (pl_value_f64(&pts, &phs, b) - pl_value_f64(&pts, &phs, a)) / (0.5 * (a + b))
        }),
        cfg,
    ));
    // ∫ H(t)/t² dt, integrated in x = ln t: trapezoid of H/t.
    verdicts.push(condition_verdict(
        names[2],
        geometric_partials(t_lo, t_hi, |a, b| {
            0.5 * (pl_value_f64(&pts, &phs, a) / a + pl_value_f64(&pts, &phs, b) / b) * (b / a).ln()
        }),
        cfg,
    ));
    // ∫₀^δ H(1/t) dt with δ = 1/t_lo: trapezoid in the reciprocal variable.
    verdicts.push(condition_verdict(
        names[3],
        geometric_partials(t_lo, t_hi, |a, b| {
            0.5 * (pl_value_f64(&pts, &phs, a) + pl_value_f64(&pts, &phs, b)) * (1.0 / a - 1.0 / b)
        }),
        cfg,
    ));
    // ∫ dη/H⁻¹(η), integrated in y = ln η: trapezoid of η/H⁻¹(η).
    {
        let first_pos = (0..phs.len()).find(|&i| phs[i] > 0.0);
        let (eta_lo, eta_hi) = match first_pos {
            Some(fp) => (phs[fp].max(1e-3), *phs.last().expect("nonempty")),
            None => (1.0, 0.0),
        };
        if eta_hi / eta_lo >= 16.0 {
            verdicts.push(condition_verdict(
                names[4],
                geometric_partials(eta_lo, eta_hi, |a, b| {
                    0.5 * (a / pl_inverse_f64(&pts, &phs, a) + b / pl_inverse_f64(&pts, &phs, b))
                        * (b / a).ln()
                }),
                cfg,
            ));
        } else {
            verdicts.push(
                CriteriaVerdict::new(names[4], Verdict::Inconclusive)
                    .with("eta_range", eta_hi / eta_lo.max(1e-300)),
            );
        }
    }
    // ∫ dτ/(τ·Φ⁻¹(τ)), integrated in y = ln τ: trapezoid of 1/Φ⁻¹(τ).
    {
        let ts_f: Vec<f64> = cond.ts.iter().map(|&t| t.as_f64()).collect();
        let phis_f: Vec<f64> = cond.phis.iter().map(|&p| p.as_f64()).collect();
        let tau_lo = phs[phs.len() / 4].exp();
        let tau_hi = phs.last().expect("nonempty").exp();
        if tau_hi / tau_lo >= 16.0 && tau_lo > 0.0 {
            verdicts.push(condition_verdict(
                names[5],
                geometric_partials(tau_lo, tau_hi, |a, b| {
                    0.5 * (1.0 / pl_inverse_f64(&ts_f, &phis_f, a)
                        + 1.0 / pl_inverse_f64(&ts_f, &phis_f, b))
                        * (b / a).ln()
                }),
                cfg,
            ));
        } else {
            verdicts.push(
                CriteriaVerdict::new(names[5], Verdict::Inconclusive)
                    .with("tau_range", tau_hi / tau_lo.max(1e-300)),
            );
        }
    }

    let any_satisfied = verdicts.iter().any(|v| v.verdict == Verdict::Satisfied);
    let any_violated = verdicts.iter().any(|v| v.verdict == Verdict::Violated);
    let conflict = any_satisfied && any_violated;
    if cond.convex && conflict {
        for v in &mut verdicts {
            let raw = match v.verdict {
                Verdict::Satisfied => 1.0,
                Verdict::Violated => -1.0,
                Verdict::Inconclusive => 0.0,
            };
            v.evidence.insert("raw_verdict".to_owned(), raw);
            v.verdict = Verdict::Inconclusive;
            v.model = Some("resolution-failure".to_owned());
        }
        return PhiConditionTests { verdicts, consistent: false, overall: Verdict::Inconclusive };
    }
    let overall = if cond.convex {
        if any_satisfied {
            Verdict::Satisfied
        } else if any_violated {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    } else {
        // Without convexity the conditions are not interchangeable; commit
        // only when they all agree.
        let first = verdicts[0].verdict;
        if verdicts.iter().all(|v| v.verdict == first) {
            first
        } else {
            Verdict::Inconclusive
        }
    };
    PhiConditionTests { verdicts, consistent: true, overall }
}

/// Grid quadrature of `Φ(K)` over the mask, with degenerate nodes charged at
/// the declared cap. `Satisfied` needs the value stable both under grid
/// decimation and under raising the cap; growth with the cap is the signature
/// of a divergent integral.
pub fn phi_integral_budget<T: Real>(
    k: &DilatationField<T>,
    cond: &PhiCondition<T>,
    cap: T,
    cfg: &CriteriaConfig,
) -> Result<(T, CriteriaVerdict), CriteriaError> {
    if !(cap >= T::one()) {
        return Err(CriteriaError::NonpositiveInput { name: "cap", value: cap.as_f64() });
    }
    let quad = |stride: usize, cap_at: T| -> T {
        let spec = k.values().spec();
        let n = spec.n();
        let w = spec.step() * T::of(stride as f64);
        let mut acc = T::zero();
        for iy in (0..n).step_by(stride) {
            for ix in (0..n).step_by(stride) {
                if !k.mask().contains(ix, iy) {
                    continue;
                }
                let kv = k.values().at(ix, iy);
                let capped = if kv.is_finite() { kv.min(cap_at) } else { cap_at };
                acc += cond.value(capped);
            }
        }
        acc * w * w
    };
    let value = quad(1, cap);
    let coarse = quad(2, cap);
    let grown = quad(1, cap * T::of(4.0));
    let vf = value.as_f64();
    let stability = if vf > 0.0 { (vf - coarse.as_f64()).abs() / vf } else { 0.0 };
    let growth = if vf > 0.0 { grown.as_f64() / vf } else { 1.0 };
    let verdict = if growth >= 1.5 {
        Verdict::Violated
    } else if growth > 1.05 {
        Verdict::Inconclusive
    } else if stability <= cfg.budget_stability {
        Verdict::Satisfied
    } else {
        Verdict::Inconclusive
    };
    let out = CriteriaVerdict::new("phi-budget", verdict)
        .with("budget", vf)
        .with("budget_coarse", coarse.as_f64())
        .with("stability", stability)
        .with("cap", cap.as_f64())
        .with("cap_growth", growth)
        .with("degenerate_nodes", k.degenerate_count() as f64);
    Ok((value, out))
}

/// The exponential special case: integrability of `e^{α·K}` over the mask,
/// via [`phi_integral_budget`] on a sampled exponential table.
pub fn exp_integrability<T: Real>(
    k: &DilatationField<T>,
    alpha: T,
    cfg: &CriteriaConfig,
) -> Result<(T, CriteriaVerdict), CriteriaError> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(CriteriaError::NonpositiveInput { name: "alpha", value: alpha.as_f64() });
    }
    let af = alpha.as_f64();
    let sup = k.sup_finite().as_f64().max(2.0);
    // keep α·t ≤ ~680 across the 4× cap sweep so the table stays finite
    let cap = sup.min(170.0 / af).max(1.0);
    let t_max = 4.0 * cap;
    let t_min = (cap * 1e-4).max(1e-6);
    let mut ts = vec![T::zero()];
    let mut t = t_min;
    while t < t_max {
        ts.push(T::of(t));
        t *= 2f64.powf(0.125);
    }
    ts.push(T::of(t_max));
    let table = PhiCondition::tabulate(|x: T| (alpha * x).exp(), &ts)?;
    let (value, mut verdict) = phi_integral_budget(k, &table, T::of(cap), cfg)?;
    verdict.test = "exp-integrability".to_owned();
    verdict.evidence.insert("alpha".to_owned(), af);
    Ok((value, verdict))
}

// ---------------------------------------------------------------------------
// Annulus scale tests.

/// For each point: sweeps `A(ε) = ∫_{ε<|z−z0|<ε₀} K/|z−z0|²` and its
/// log-weighted counterpart over dyadic `ε`; the criterion wants the ratio to
/// `[log(1/ε)]²` (respectively `[log log(1/ε)]²`) to vanish. Returns the
/// plain and weighted verdicts per point.
pub fn log_scale_tests<T: Real>(
    k: &DilatationField<T>,
    points: &[Complex<T>],
    cfg: &CriteriaConfig,
) -> Vec<(CriteriaVerdict, CriteriaVerdict)> {
    points
        .iter()
        .map(|&z0| {
            (
                log_scale_at(k, z0, false, cfg),
                log_scale_at(k, z0, true, cfg),
            )
        })
        .collect()
}

fn log_scale_at<T: Real>(
    k: &DilatationField<T>,
    z0: Complex<T>,
    weighted: bool,
    cfg: &CriteriaConfig,
) -> CriteriaVerdict {
    let name = if weighted { "log-scale-weighted" } else { "log-scale" };
    let spec = k.values().spec();
    let step = spec.step().as_f64();
    let clearance = mask_clearance(k.mask(), z0).as_f64();
    // stay below 1/e so the logarithmic weights are positive and decreasing
    let eps0 = (clearance * 0.9).min(0.3);
    let mut out = CriteriaVerdict::new(name, Verdict::Inconclusive).with("eps0", eps0);
    if eps0 <= 8.0 * step {
        return out.with("range", eps0 / step);
    }
    let h2 = step * step;
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let mut skipped = 0usize;
    for (ix, iy, p) in spec.iter_points() {
        if !k.mask().contains(ix, iy) {
            continue;
        }
        let d = (p - z0).norm().as_f64();
        if d <= 0.0 || d >= eps0 {
            continue;
        }
        let kv = k.values().at(ix, iy);
        if !kv.is_finite() {
            skipped += 1;
            continue;
        }
        let weight = if weighted {
            let l = (1.0 / d).ln();
            1.0 / (d * d * l * l)
        } else {
            1.0 / (d * d)
        };
        terms.push((d, kv.as_f64() * h2 * weight));
    }
    out.evidence.insert("skipped".to_owned(), skipped as f64);
    if skipped >= 3 {
        // a cluster of degenerate nodes sits inside every smaller annulus,
        // so the integral is infinite for all cutoffs below its radius
        out.verdict = Verdict::Violated;
        return out;
    }
    terms.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite distances"));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut acc = 0.0;
    let mut cursor = 0usize;
    let mut last_ratio = 0.0;
    for quarter in 1.. {
        let eps = eps0 * 2f64.powf(-(quarter as f64) / 4.0);
        if eps < 4.0 * step {
            break;
        }
        while cursor < terms.len() && terms[cursor].0 > eps {
            acc += terms[cursor].1;
            cursor += 1;
        }
        let l = (1.0 / eps).ln();
        let scale = if weighted { l.ln() } else { l };
        if scale > 0.0 && acc > 0.0 {
            let ratio = acc / (scale * scale);
            xs.push(scale.ln());
            ys.push(ratio.ln());
            last_ratio = ratio;
        }
    }
    out.evidence.insert("sweep_len".to_owned(), xs.len() as f64);
    out.evidence.insert("ratio_last".to_owned(), last_ratio);
    if xs.len() < 6 {
        return out;
    }
    // the partial integral starts from zero at ε₀, so the ratio always rises
    // before its limit behavior shows; only the tail half of the sweep speaks
    let tail = xs.len() / 2;
    let slope = fit_slope(&xs[tail..], &ys[tail..]);
    out.evidence.insert("slope".to_owned(), slope);
    out.verdict = if slope <= cfg.vanishing_slope {
        Verdict::Satisfied
    } else if slope >= cfg.stagnant_slope {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    out
}

// ---------------------------------------------------------------------------
// Ring-modulus machinery.

/// Radial weight family for the admissible test functions of the ring bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiFamily {
    /// `ψ(t) = 1/t` — the classical choice, exact for round rings.
    Reciprocal,
    /// `ψ(t) = 1/(t·log(1/t))` — the logarithmic refinement.
    LogReciprocal,
    /// `ψ(t) = 1/(t·k̄(t))` with `k̄` the circle mean of the dilatation.
    ProfileReciprocal,
}

/// Upper bound for the modulus of the curve family crossing the ring
/// `ε < |z−z₀| < ε₀`, transported by a map of dilatation `K`:
/// `∬ K·ρ²` with `ρ = ψ(|z−z₀|)/I` and `I = ∫ψ`. The double integral reduces
/// to a radial one over circle means, evaluated in the log-radius variable
/// (exact for constant dilatation with the reciprocal weight).
pub fn modulus_bound<T: Real>(
    k: &DilatationField<T>,
    z0: Complex<T>,
    eps: T,
    eps0: T,
    psi: PsiFamily,
    cfg: &CriteriaConfig,
) -> Result<T, CriteriaError> {
    if !(eps > T::zero() && eps0 > eps) {
        return Err(CriteriaError::BadSweep { eps: eps.as_f64(), eps0: eps0.as_f64() });
    }
    if psi == PsiFamily::LogReciprocal && eps0 >= T::one() {
        return Err(CriteriaError::PsiDomain(eps0.as_f64()));
    }
    let octaves = (eps0 / eps).as_f64().log2();
    let count = ((octaves * SAMPLES_PER_OCTAVE as f64).ceil() as usize + 1).max(33);
    let ratio = (eps0 / eps).powf(T::one() / T::of((count - 1) as f64));
    let radii: Vec<T> = (0..count)
        .map(|i| eps * ratio.powi(i as i32))
        .collect();
    let means = circle_mean(k.values(), z0, &radii, cfg.circle_nodes)?;
    let psi_at = |i: usize| -> T {
        let r = radii[i];
        match psi {
            PsiFamily::Reciprocal => T::one() / r,
            PsiFamily::LogReciprocal => T::one() / (r * (T::one() / r).ln()),
            PsiFamily::ProfileReciprocal => {
                if means[i].is_finite() {
                    T::one() / (r * means[i])
                } else {
                    T::zero()
                }
            }
        }
    };
    // all integrals in s = ln r: ∫ f(r) dr = ∫ f(r)·r ds
    let mut norm = T::zero();
    let mut num = T::zero();
    for i in 0..count - 1 {
        let ds = (radii[i + 1] / radii[i]).ln();
        let f0 = psi_at(i) * radii[i];
        let f1 = psi_at(i + 1) * radii[i + 1];
        norm += (f0 + f1) * T::of(0.5) * ds;
        let g0 = means[i] * psi_at(i) * psi_at(i) * radii[i] * radii[i];
        let g1 = means[i + 1] * psi_at(i + 1) * psi_at(i + 1) * radii[i + 1] * radii[i + 1];
        num += (g0 + g1) * T::of(0.5) * ds;
    }
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(CriteriaError::ModulusNormalization(norm.as_f64()));
    }
    Ok(T::of(2.0) * T::PI() * num / (norm * norm))
}

/// Spherical-distance bound `(32/Δ)·exp(−2π/M)` for a homeomorphism whose
/// complement has spherical diameter at least `Δ`, in terms of the modulus
/// `M` of the separating ring's curve family.
pub fn equicontinuity_bound<T: Real>(delta: T, modulus: T) -> Result<T, CriteriaError> {
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(CriteriaError::NonpositiveInput { name: "delta", value: delta.as_f64() });
    }
    if !(modulus > T::zero()) {
        return Err(CriteriaError::NonpositiveInput { name: "modulus", value: modulus.as_f64() });
    }
    Ok(T::of(32.0) / delta * (-(T::of(2.0) * T::PI()) / modulus).exp())
}

// ---------------------------------------------------------------------------
// The assembled battery.

/// One verdict attached to the sample point that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct PointVerdict {
    pub z0: [f64; 2],
    pub verdict: CriteriaVerdict,
}

/// Results of the Φ-based tests when a table was supplied.
#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub conditions: PhiConditionTests,
    pub budget_value: f64,
    pub budget: CriteriaVerdict,
}

/// The full battery over a coefficient pair: per-point disc oscillation,
/// the mean test available when only the second characteristic is present,
/// radial divergence, annulus scale ratios, and the Φ tests when supplied.
///
/// `overall` is `Satisfied` exactly when some single criterion family is
/// satisfied at **all** sample points, `Violated` when every family reports a
/// violation somewhere and none is satisfied everywhere, and `Inconclusive`
/// otherwise. Verdicts speak only about the tested points.
#[derive(Clone, Debug, Serialize)]
pub struct CriteriaReport {
    pub fmo: Vec<PointVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_mean: Option<Vec<PointVerdict>>,
    pub lehto: Vec<PointVerdict>,
    pub log_scale: Vec<PointVerdict>,
    pub log_scale_weighted: Vec<PointVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiReport>,
    pub overall: Verdict,
}

/// A deterministic sample lattice: the mask centroid plus two rings of points
/// along eight rays, one mid-domain and one near the boundary.
pub fn default_sample_points<T: Real>(mask: &DomainMask<T>) -> Vec<Complex<T>> {
    let spec = mask.spec();
    let step = spec.step();
    let mut cx = T::zero();
    let mut cy = T::zero();
    let mut count = 0usize;
    for (ix, iy, p) in spec.iter_points() {
        if mask.contains(ix, iy) {
            cx += p.re;
            cy += p.im;
            count += 1;
        }
    }
    if count == 0 {
        return Vec::new();
    }
    let centroid = Complex::new(cx / T::of(count as f64), cy / T::of(count as f64));
    let mut out = vec![centroid];
    let masked_at = |z: Complex<T>| -> bool {
        spec.nearest(z).map_or(false, |(ix, iy)| mask.contains(ix, iy))
    };
    for k in 0..8 {
        let theta = T::of(k as f64) * T::PI() / T::of(4.0);
        let dir = Complex::new(theta.cos(), theta.sin());
        let mut reach = T::zero();
        let mut t = step;
        while masked_at(centroid + dir.scale(t)) {
            reach = t;
            t += step;
        }
        if reach > step * T::of(8.0) {
            out.push(centroid + dir.scale(reach * T::of(0.55)));
            out.push(centroid + dir.scale(reach * T::of(0.85)));
        }
    }
    out
}

fn point_entry<T: Real>(z0: Complex<T>, verdict: CriteriaVerdict) -> PointVerdict {
    PointVerdict { z0: [z0.re.as_f64(), z0.im.as_f64()], verdict }
}

fn inconclusive_from_error(name: &str, err: &CriteriaError) -> CriteriaVerdict {
    let mut v = CriteriaVerdict::new(name, Verdict::Inconclusive);
    v.model = Some(format!("error: {err}"));
    v
}

/// Disc-mean boundedness of the dilatation around one point — the test that
/// covers pairs whose first characteristic vanishes, where the dilatation is
/// exactly `(1+|ν|)/(1−|ν|)`.
fn mean_bound_test<T: Real>(
    u: &RealField<T>,
    mask: &DomainMask<T>,
    z0: Complex<T>,
    cfg: &CriteriaConfig,
) -> Result<CriteriaVerdict, CriteriaError> {
    let step = u.spec().step();
    if !near_mask(mask, z0, step * T::of(2.5)) {
        return Err(CriteriaError::PointOutsideDomain(z0.re.as_f64(), z0.im.as_f64()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut mean_last = 0.0;
    for &eps in &fmo_scales(mask, z0) {
        if let Some(s) = disc_deviation(u, mask, z0, eps, None) {
            xs.push((1.0 / eps.as_f64()).ln());
            ys.push((1.0 + s.mean.as_f64().abs()).ln());
            mean_last = s.mean.as_f64();
        }
    }
    let mut out = CriteriaVerdict::new("nu-mean", Verdict::Inconclusive)
        .with("scales", xs.len() as f64)
        .with("mean_last", mean_last);
    if xs.len() < 3 {
        return Ok(out);
    }
    let slope = fit_slope(&xs, &ys);
    out.evidence.insert("slope".to_owned(), slope);
    out.verdict = if slope <= cfg.bounded_slope {
        Verdict::Satisfied
    } else if slope >= cfg.violated_slope {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(out)
}

fn lehto_at<T: Real>(
    k: &DilatationField<T>,
    z0: Complex<T>,
    cfg: &CriteriaConfig,
) -> CriteriaVerdict {
    let step = k.values().spec().step();
    let r_min = step * T::of(2.1);
    let r_max = mask_clearance(k.mask(), z0) * T::of(0.9);
    if !(r_max > r_min * T::of(8.0)) {
        return CriteriaVerdict::new("lehto", Verdict::Inconclusive)
            .with("range", (r_max / r_min).as_f64());
    }
    let octaves = (r_max / r_min).as_f64().log2();
    let count = ((octaves * SAMPLES_PER_OCTAVE as f64).ceil() as usize + 1).max(17);
    let ratio = (r_max / r_min).powf(T::one() / T::of((count - 1) as f64));
    let radii: Vec<T> = (0..count).map(|i| r_min * ratio.powi(i as i32)).collect();
    let profile = match circle_mean(k.values(), z0, &radii, cfg.circle_nodes) {
        Ok(p) => p,
        Err(e) => return inconclusive_from_error("lehto", &e),
    };
    match lehto_divergence_test(&radii, &profile, cfg) {
        Ok(v) => v,
        Err(e) => inconclusive_from_error("lehto", &e),
    }
}

/// Runs the whole battery on a coefficient pair. Per-test failures (points
/// too close to the boundary, circles leaving the grid) surface as
/// inconclusive verdicts, never as errors.
pub fn criteria_report<T: Real>(
    pair: &CoefficientPair<T>,
    cond: Option<&PhiCondition<T>>,
    samples: &[Complex<T>],
    cfg: &CriteriaConfig,
) -> CriteriaReport {
    let k = pair.dilatation();
    let u = k.values();
    let mask = pair.mask();
    let mu_sup = pair
        .mask()
        .indices()
        .map(|idx| pair.mu().values()[idx].norm())
        .fold(T::zero(), |a, b| a.max(b));
    let nu_only = mu_sup <= T::of(1e-14);

    let mut fmo = Vec::new();
    let mut nu_mean = Vec::new();
    let mut lehto = Vec::new();
    let mut log_plain = Vec::new();
    let mut log_weighted = Vec::new();
    for &z0 in samples {
        let fv = fmo_test(u, mask, z0, cfg)
            .unwrap_or_else(|e| inconclusive_from_error("fmo", &e));
        fmo.push(point_entry(z0, fv));
        if nu_only {
            let nv = mean_bound_test(u, mask, z0, cfg)
                .unwrap_or_else(|e| inconclusive_from_error("nu-mean", &e));
            nu_mean.push(point_entry(z0, nv));
        }
        lehto.push(point_entry(z0, lehto_at(&k, z0, cfg)));
        let (plain, weighted) = {
            let mut pair_v = log_scale_tests(&k, &[z0], cfg);
            pair_v.pop().expect("one point in, one pair out")
        };
        log_plain.push(point_entry(z0, plain));
        log_weighted.push(point_entry(z0, weighted));
    }

    let phi = cond.map(|c| {
        let conditions = phi_condition_tests(c, cfg);
        let t_last = c.ts().last().copied().unwrap_or_else(T::one).as_f64();
        let cap = T::of(k.sup_finite().as_f64().min(t_last / 4.0).max(2.0));
        match phi_integral_budget(&k, c, cap, cfg) {
            Ok((value, budget)) => PhiReport { conditions, budget_value: value.as_f64(), budget },
            Err(e) => PhiReport {
                conditions,
                budget_value: f64::NAN,
                budget: inconclusive_from_error("phi-budget", &e),
            },
        }
    });

    let family = |points: &[PointVerdict]| -> (bool, bool) {
        let all_satisfied =
            !points.is_empty() && points.iter().all(|p| p.verdict.verdict == Verdict::Satisfied);
        let any_violated = points.iter().any(|p| p.verdict.verdict == Verdict::Violated);
        (all_satisfied, any_violated)
    };
    let mut families = vec![
        family(&fmo),
        family(&lehto),
        family(&log_plain),
        family(&log_weighted),
    ];
    if nu_only {
        families.push(family(&nu_mean));
    }
    if let Some(p) = &phi {
        let sat = p.conditions.overall == Verdict::Satisfied
            && p.budget.verdict == Verdict::Satisfied;
        let vio = p.conditions.overall == Verdict::Violated
            || p.budget.verdict == Verdict::Violated;
        families.push((sat, vio));
    }
    let overall = if families.iter().any(|&(s, _)| s) {
        Verdict::Satisfied
    } else if !families.is_empty() && families.iter().all(|&(_, v)| v) {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };

    CriteriaReport {
        fmo,
        nu_mean: if nu_only { Some(nu_mean) } else { None },
        lehto,
        log_scale: log_plain,
        log_scale_weighted: log_weighted,
        phi,
        overall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{builtin_family, BuiltinFamily, CoefficientPair};
    use crate::grid::{ComplexField, DomainMask, GridSpec};
    use proptest::prelude::*;

    fn disk_setup(hw: f64, n: usize, r: f64) -> (GridSpec<f64>, DomainMask<f64>) {
        let spec = GridSpec::centered(hw, n).unwrap();
        let mask = DomainMask::from_predicate(spec, |z| z.norm() < r);
        (spec, mask)
    }

    fn log_singularity(spec: GridSpec<f64>) -> RealField<f64> {
        RealField::from_fn(spec, |z| (1.0 / z.norm()).ln())
    }

    fn cfg() -> CriteriaConfig {
        CriteriaConfig::default()
    }

    /// Pair with a prescribed radial dilatation profile, built through the
    /// first characteristic only.
    fn radial_pair(
        spec: GridSpec<f64>,
        mask: &DomainMask<f64>,
        k_of_r: impl Fn(f64) -> f64,
    ) -> CoefficientPair<f64> {
        let mu = ComplexField::from_fn(spec, |z| {
            let r = z.norm();
            if r == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            let k = k_of_r(r);
            let m = if k.is_finite() { (k - 1.0) / (k + 1.0) } else { 1.0 };
            (z * z / z.norm_sqr()).scale(m)
        });
        let nu = ComplexField::zeros(spec);
        CoefficientPair::new(mu, nu, mask.clone()).unwrap()
    }

    #[test]
    fn bmo_of_constant_is_zero() {
        let (spec, mask) = disk_setup(1.25, 128, 1.0);
        let u = RealField::from_fn(spec, |_| 3.7);
        let discs = dyadic_disc_family(&mask, 4);
        assert!(!discs.is_empty());
        let est = bmo_norm_estimate(&u, &mask, &discs).unwrap();
        assert!(est <= 1e-12, "estimate {est}");
    }

    #[test]
    fn bmo_estimate_rejects_empty_family() {
        let (spec, mask) = disk_setup(1.25, 64, 1.0);
        let u = RealField::from_fn(spec, |_| 1.0);
        assert!(matches!(
            bmo_norm_estimate(&u, &mask, &[]),
            Err(CriteriaError::EmptyDiscFamily)
        ));
    }

    #[test]
    fn bmo_of_log_singularity_stays_bounded() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = log_singularity(spec);
        let discs = dyadic_disc_family(&mask, 6);
        let est = bmo_norm_estimate(&u, &mask, &discs).unwrap();
        assert!(est > 0.0 && est <= 2.0, "estimate {est}");
    }

    #[test]
    fn bmo_of_reciprocal_blows_up() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = RealField::from_fn(spec, |z| 1.0 / z.norm());
        let radii = [0.4, 0.2, 0.1, 0.05];
        let profile = bmo_profile(&u, &mask, Complex::new(0.0, 0.0), &radii).unwrap();
        // mean absolute deviation of 1/|z| over B(0, R) is exactly 1/R
        for (r, osc) in radii.iter().zip(&profile) {
            assert!(
                (osc * r - 1.0).abs() <= 0.45,
                "radius {r}: osc·r = {}",
                osc * r
            );
        }
        for w in profile.windows(2) {
            assert!(w[1] > 1.6 * w[0], "profile not doubling: {w:?}");
        }
    }

    #[test]
    fn fmo_of_constant_satisfied() {
        let (spec, mask) = disk_setup(1.25, 128, 1.0);
        let u = RealField::from_fn(spec, |_| -2.0);
        let v = fmo_test(&u, &mask, Complex::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Satisfied);
        assert_eq!(v.evidence["osc_last"], 0.0);
        assert_eq!(v.evidence["slope"], 0.0);
    }

    #[test]
    fn fmo_of_log_singularity_satisfied_with_unbounded_means() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = log_singularity(spec);
        let v = fmo_test(&u, &mask, Complex::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Satisfied, "evidence {:?}", v.evidence);
        // the disc means diverge like log(1/ε) even though the oscillation
        // stays bounded: the mean-boundedness check is only sufficient
        assert!(v.evidence["mean_last"] > v.evidence["mean_first"] + 0.5);
        assert_eq!(v.evidence["means_bounded"], 0.0);
    }

    #[test]
    fn fmo_of_reciprocal_violated() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = RealField::from_fn(spec, |z| 1.0 / z.norm());
        let v = fmo_test(&u, &mask, Complex::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Violated, "evidence {:?}", v.evidence);
        assert!(v.evidence["slope"] > 0.8, "slope {}", v.evidence["slope"]);
    }

    #[test]
    fn fmo_is_invariant_under_constant_shifts() {
        let (spec, mask) = disk_setup(1.25, 128, 1.0);
        let u = log_singularity(spec);
        let shifted = RealField::from_fn(spec, |z| (1.0 / z.norm()).ln() + 5.0);
        let a = fmo_test(&u, &mask, Complex::new(0.3, -0.1), &cfg()).unwrap();
        let b = fmo_test(&shifted, &mask, Complex::new(0.3, -0.1), &cfg()).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert!((a.evidence["slope"] - b.evidence["slope"]).abs() <= 1e-6);
        assert!((a.evidence["osc_last"] - b.evidence["osc_last"]).abs() <= 1e-9);
    }

    #[test]
    fn fmo_accepts_reference_centering() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = log_singularity(spec);
        let centering = |eps: f64| (1.0 / eps).ln();
        let v = fmo_test_with_centering(&u, &mask, Complex::new(0.0, 0.0), Some(&centering), &cfg())
            .unwrap();
        assert_eq!(v.verdict, Verdict::Satisfied, "evidence {:?}", v.evidence);
        assert_eq!(v.evidence["centered"], 1.0);
    }

    #[test]
    fn fmo_rejects_outside_points() {
        let (spec, mask) = disk_setup(1.25, 128, 0.5);
        let u = RealField::from_fn(spec, |_| 1.0);
        assert!(matches!(
            fmo_test(&u, &mask, Complex::new(1.1, 0.0), &cfg()),
            Err(CriteriaError::PointOutsideDomain(_, _))
        ));
    }

    #[test]
    fn bounded_bmo_implies_fmo_satisfied_everywhere() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = log_singularity(spec);
        let discs = dyadic_disc_family(&mask, 6);
        assert!(bmo_norm_estimate(&u, &mask, &discs).unwrap() <= 2.0);
        for z0 in [
            Complex::new(0.0, 0.0),
            Complex::new(0.3, 0.0),
            Complex::new(-0.2, 0.2),
            Complex::new(0.0, -0.5),
            Complex::new(0.9, 0.0),
        ] {
            let v = fmo_test(&u, &mask, z0, &cfg()).unwrap();
            assert_eq!(v.verdict, Verdict::Satisfied, "at {z0}: {:?}", v.evidence);
        }
    }

    #[test]
    fn annulus_bound_matches_radial_quadrature() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let u = RealField::from_fn(spec, |_| 1.0);
        let check = fmo_annulus_bound_check(&u, &mask, Complex::new(0.0, 0.0));
        assert!(check.rows.len() >= 3);
        for row in &check.rows {
            // ∫_{ε<|z|<1/e} dA/(|z| log 1/|z|)² = 2π(1 − 1/log(1/ε))
            let exact = 2.0 * std::f64::consts::PI * (1.0 - 1.0 / (1.0 / row.eps).ln());
            assert!(
                (row.integral - exact).abs() <= 0.08 * exact,
                "eps {}: integral {} vs {}",
                row.eps,
                row.integral,
                exact
            );
        }
        assert!(check.constant.is_finite() && check.constant < 20.0);
    }

    #[test]
    fn annulus_bound_of_zero_field_is_zero() {
        let (spec, mask) = disk_setup(1.25, 128, 1.0);
        let u = RealField::from_fn(spec, |_| 0.0);
        let check = fmo_annulus_bound_check(&u, &mask, Complex::new(0.0, 0.0));
        assert!(check.rows.iter().all(|r| r.integral == 0.0));
        assert_eq!(check.constant, 0.0);
    }

    #[test]
    fn circle_mean_of_constant_is_exact() {
        let spec = GridSpec::<f64>::centered(1.25, 128).unwrap();
        let u = RealField::from_fn(spec, |_| 5.0);
        let means = circle_mean(&u, Complex::new(0.1, -0.2), &[0.3, 0.6], 256).unwrap();
        for m in means {
            assert!((m - 5.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn circle_mean_matches_radial_profile() {
        let spec = GridSpec::<f64>::centered(1.25, 2048).unwrap();
        let u = RealField::from_fn(spec, |z| 1.0 + (1.0 / z.norm()).ln());
        let radii = [0.4, 0.55, 0.7];
        let means = circle_mean(&u, Complex::new(0.0, 0.0), &radii, 1024).unwrap();
        for (&r, &m) in radii.iter().zip(&means) {
            let exact = 1.0 + (1.0 / r).ln();
            assert!(
                ((m - exact) / exact).abs() <= 1e-6,
                "r {r}: mean {m} vs {exact}"
            );
        }
    }

    #[test]
    fn circle_mean_cancels_odd_harmonics() {
        let spec = GridSpec::<f64>::centered(1.25, 256).unwrap();
        let u = RealField::from_fn(spec, |z| 1.0 + z.re);
        let at_origin = circle_mean(&u, Complex::new(0.0, 0.0), &[0.3, 0.5], 1024).unwrap();
        for m in at_origin {
            assert!((m - 1.0).abs() <= 1e-10, "mean {m}");
        }
        let off = circle_mean(&u, Complex::new(0.2, 0.1), &[0.25], 1024).unwrap();
        assert!((off[0] - 1.2).abs() <= 1e-10);
    }

    #[test]
    fn circle_mean_guards_scale_and_grid() {
        let spec = GridSpec::<f64>::centered(1.0, 64).unwrap();
        let u = RealField::from_fn(spec, |_| 1.0);
        assert!(matches!(
            circle_mean(&u, Complex::new(0.0, 0.0), &[0.01], 64),
            Err(CriteriaError::RadiusBelowScale(_, _))
        ));
        assert!(matches!(
            circle_mean(&u, Complex::new(0.0, 0.0), &[1.5], 64),
            Err(CriteriaError::CircleExitsGrid { .. })
        ));
    }

    fn geometric_radii(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
        let count = ((hi / lo).log2() * per_octave as f64).ceil() as usize + 1;
        let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
        (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
    }

    #[test]
    fn lehto_of_bounded_profile_diverges_log() {
        let radii = geometric_radii(1e-4, 0.5, 16);
        let profile: Vec<f64> = radii.iter().map(|_| 2.5).collect();
        let v = lehto_divergence_test(&radii, &profile, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Satisfied, "{:?}", v.evidence);
        assert_eq!(v.model.as_deref(), Some("log"));
        assert_eq!(v.evidence["log_bound_ok"], 1.0);
    }

    #[test]
    fn lehto_of_radial_log_profile_diverges_slowly() {
        let radii = geometric_radii(1e-7, 0.5, 16);
        let profile: Vec<f64> = radii.iter().map(|&r| 1.0 + (1.0 / r).ln()).collect();
        let v = lehto_divergence_test(&radii, &profile, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Satisfied, "{:?}", v.evidence);
        assert_eq!(v.model.as_deref(), Some("loglog"));
        assert_eq!(v.evidence["log_bound_ok"], 1.0);
    }

    #[test]
    fn lehto_of_reciprocal_profile_converges() {
        let radii = geometric_radii(1e-5, 0.5, 16);
        let profile: Vec<f64> = radii.iter().map(|&r| 1.0 / r).collect();
        let v = lehto_divergence_test(&radii, &profile, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Violated, "{:?}", v.evidence);
        assert_eq!(v.model.as_deref(), Some("bounded"));
        assert_eq!(v.evidence["log_bound_ok"], 0.0);
    }

    #[test]
    fn lehto_rejects_bad_input() {
        let radii = geometric_radii(1e-3, 0.5, 8);
        let mut profile: Vec<f64> = radii.iter().map(|_| 1.0).collect();
        profile[3] = 0.0;
        assert!(matches!(
            lehto_divergence_test(&radii, &profile, &cfg()),
            Err(CriteriaError::NonpositiveProfile(3))
        ));
        let profile: Vec<f64> = radii.iter().map(|_| 1.0).collect();
        assert!(matches!(
            lehto_divergence_test(&radii[..4], &profile, &cfg()),
            Err(CriteriaError::ProfileLengthMismatch(4, _))
        ));
    }

    fn exp_table() -> PhiCondition<f64> {
        let mut ts = vec![0.0];
        let mut t: f64 = 0.5;
        while t < 700.0 {
            ts.push(t);
            t *= 2f64.powf(0.125);
        }
        ts.push(700.0);
        PhiCondition::tabulate(|x: f64| x.exp(), &ts).unwrap()
    }

    #[test]
    fn phi_inverse_of_exponential_table() {
        let ts: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let cond = PhiCondition::tabulate(|x: f64| x.exp(), &ts).unwrap();
        assert!(cond.is_convex());
        for tau in [1.5, 5.0, 20.085536923187668, 100.0] {
            assert!((cond.inverse(tau) - tau.ln()).abs() <= 0.01, "tau {tau}");
        }
        assert_eq!(cond.inverse(0.5), 0.0);
        assert_eq!(cond.inverse(1.0), 0.0);
        assert!(cond.inverse(1e40).is_infinite());
    }

    #[test]
    fn phi_inverse_plateau_resolves_left() {
        let cond = PhiCondition::<f64>::new(&[(0.0, 0.0), (2.0, 0.0), (2.0 + 1e-9, 5.0), (3.0, 5.0)])
            .unwrap();
        assert!((cond.inverse(3.0) - 2.0).abs() <= 1e-8);
        assert!((cond.inverse(5.0) - 2.0).abs() <= 1e-8);
        assert_eq!(cond.inverse(0.0), 0.0);
    }

    #[test]
    fn phi_inverse_composition_stays_below_identity() {
        let cond = exp_table();
        for (&t, &p) in cond.ts().iter().zip(cond.phis()) {
            let back = cond.inverse(p);
            assert!(back <= t + 1e-9 * (1.0 + t), "t {t}: back {back}");
        }
    }

    proptest! {
        #[test]
        fn phi_inverse_is_monotone_and_below_identity(
            t_steps in proptest::collection::vec(0.01f64..1.0, 5..18),
            p_steps in proptest::collection::vec(0.0f64..1.0, 5..18),
            taus in proptest::collection::vec(0.0f64..12.0, 8),
        ) {
            let len = t_steps.len().min(p_steps.len()).max(MIN_PHI_SAMPLES);
            let mut t = 0.0;
            let mut p = 0.1;
            let mut samples = Vec::new();
            for i in 0..len {
                t += t_steps[i % t_steps.len()];
                // plateaus appear whenever the step rounds down to zero
                p += (p_steps[i % p_steps.len()] * 3.0).floor();
                samples.push((t, p));
            }
            let cond = PhiCondition::new(&samples).unwrap();
            let mut sorted = taus.clone();
            sorted.sort_by(f64::total_cmp);
            let mut prev = f64::NEG_INFINITY;
            for &tau in &sorted {
                let v = cond.inverse(tau);
                prop_assert!(v >= prev);
                prev = v;
            }
            for &(t, p) in &samples {
                prop_assert!(cond.inverse(p) <= t + 1e-9 * (1.0 + t.abs()));
            }
        }
    }

    #[test]
    fn exponential_phi_satisfies_all_six_conditions() {
        let tests = phi_condition_tests(&exp_table(), &cfg());
        assert!(tests.consistent);
        assert_eq!(tests.overall, Verdict::Satisfied);
        for v in &tests.verdicts {
            assert_eq!(v.verdict, Verdict::Satisfied, "{}: {:?}", v.test, v.evidence);
        }
    }

    #[test]
    fn quadratic_phi_fails_all_six_conditions() {
        let mut ts = Vec::new();
        let mut t: f64 = 1e-3;
        while t < 1e6 {
            ts.push(t);
            t *= 2f64.powf(0.5);
        }
        let cond = PhiCondition::tabulate(|x: f64| x * x, &ts).unwrap();
        let tests = phi_condition_tests(&cond, &cfg());
        assert!(tests.consistent, "{:#?}", tests.verdicts);
        assert_eq!(tests.overall, Verdict::Violated);
        for v in &tests.verdicts {
            assert_eq!(v.verdict, Verdict::Violated, "{}: {:?}", v.test, v.evidence);
        }
    }

    #[test]
    fn convexified_exponential_keeps_divergence() {
        let cond = exp_table().convexify(5.0).unwrap();
        assert!(cond.is_convex());
        assert_eq!(cond.value(2.0), 0.0);
        assert_eq!(cond.value(5.0), 0.0);
        assert!(cond.value(6.0) > 0.0);
        let tests = phi_condition_tests(&cond, &cfg());
        assert!(tests.consistent);
        assert_eq!(tests.overall, Verdict::Satisfied);
        for v in &tests.verdicts {
            assert_eq!(v.verdict, Verdict::Satisfied, "{}: {:?}", v.test, v.evidence);
        }
    }

    #[test]
    fn borderline_phi_keeps_equivalent_conditions_agreeing() {
        let mut ts = Vec::new();
        let mut t: f64 = 0.5;
        while t < 5000.0 {
            ts.push(t);
            t *= 2f64.powf(0.25);
        }
        let cond =
            PhiCondition::tabulate(|x: f64| (x / (std::f64::consts::E + x).ln()).exp(), &ts)
                .unwrap();
        let tests = phi_condition_tests(&cond, &cfg());
        assert!(tests.consistent);
        let b = tests.verdicts.iter().find(|v| v.test == "h-over-t-squared").unwrap();
        let c = tests.verdicts.iter().find(|v| v.test == "h-of-reciprocal").unwrap();
        assert_eq!(b.verdict, Verdict::Satisfied, "{:?}", b.evidence);
        assert_eq!(c.verdict, b.verdict);
    }

    #[test]
    fn phi_budget_of_unit_dilatation_is_exact() {
        let (spec, mask) = disk_setup(1.25, 256, 0.9);
        let pair = CoefficientPair::zero(spec, mask.clone()).unwrap();
        let k = pair.dilatation();
        let ts: Vec<f64> = (0..=64).map(|i| i as f64 * 0.25).collect();
        let cond = PhiCondition::tabulate(|x: f64| x.exp(), &ts).unwrap();
        let (value, verdict) = phi_integral_budget(&k, &cond, 4.0, &cfg()).unwrap();
        let exact = std::f64::consts::E * mask.area();
        assert!(((value - exact) / exact).abs() <= 1e-12);
        assert_eq!(verdict.verdict, Verdict::Satisfied, "{:?}", verdict.evidence);
    }

    #[test]
    fn phi_budget_of_radial_log_dilatation_matches_closed_form() {
        let (spec, mask) = disk_setup(1.25, 512, 1.0);
        let pair = builtin_family(BuiltinFamily::RadialLogK { amplitude: 1.0 }, spec, &mask)
            .unwrap();
        let k = pair.dilatation();
        let cond = exp_table();
        let cap = k.sup_finite();
        let (value, verdict) = phi_integral_budget(&k, &cond, cap, &cfg()).unwrap();
        // ∬_{|z|<1} exp(1 + log 1/|z|) = e·∬ dA/|z| = 2πe
        let exact = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        assert!(
            ((value - exact) / exact).abs() <= 0.05,
            "budget {value} vs {exact}"
        );
        assert_eq!(verdict.verdict, Verdict::Satisfied, "{:?}", verdict.evidence);
    }

    #[test]
    fn exp_integrability_separates_log_from_strong_singularity() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let mild = builtin_family(BuiltinFamily::RadialLogK { amplitude: 1.0 }, spec, &mask)
            .unwrap();
        let (_, ok) = exp_integrability(&mild.dilatation(), 1.0, &cfg()).unwrap();
        assert_eq!(ok.verdict, Verdict::Satisfied, "{:?}", ok.evidence);

        let harsh = radial_pair(spec, &mask, |r| if 1.0 / r > 27.0 {
            f64::INFINITY
        } else {
            (1.0 / r).exp()
        });
        let (_, bad) = exp_integrability(&harsh.dilatation(), 1.0, &cfg()).unwrap();
        assert_eq!(bad.verdict, Verdict::Violated, "{:?}", bad.evidence);
    }

    #[test]
    fn log_scale_ratios_vanish_for_unit_dilatation() {
        let (spec, mask) = disk_setup(1.25, 512, 1.0);
        let pair = CoefficientPair::zero(spec, mask).unwrap();
        let k = pair.dilatation();
        let verdicts = log_scale_tests(&k, &[Complex::new(0.0, 0.0)], &cfg());
        let (plain, weighted) = &verdicts[0];
        assert_eq!(plain.verdict, Verdict::Satisfied, "{:?}", plain.evidence);
        assert_eq!(weighted.verdict, Verdict::Satisfied, "{:?}", weighted.evidence);
    }

    #[test]
    fn log_scale_ratio_grows_for_cubed_log() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let pair = radial_pair(spec, &mask, |r| {
            let l = (1.0 / r).ln();
            if l <= 0.0 { 1.0 } else { 1.0 + l * l * l }
        });
        let k = pair.dilatation();
        let verdicts = log_scale_tests(&k, &[Complex::new(0.0, 0.0)], &cfg());
        let (plain, _) = &verdicts[0];
        assert_eq!(plain.verdict, Verdict::Violated, "{:?}", plain.evidence);
    }

    #[test]
    fn modulus_bound_of_unit_dilatation_matches_closed_form() {
        let spec = GridSpec::<f64>::centered(1.25, 2048).unwrap();
        let mask = DomainMask::from_predicate(spec, |z| z.norm() < 1.2);
        let pair = CoefficientPair::zero(spec, mask).unwrap();
        let k = pair.dilatation();
        let eps0 = 0.9;
        for ratio in [4.0, 16.0, 256.0] {
            let eps = eps0 / ratio;
            let bound = modulus_bound(
                &k,
                Complex::new(0.0, 0.0),
                eps,
                eps0,
                PsiFamily::Reciprocal,
                &cfg(),
            )
            .unwrap();
            let exact = 2.0 * std::f64::consts::PI / (eps0 / eps).ln();
            assert!(
                ((bound - exact) / exact).abs() <= 1e-8,
                "ratio {ratio}: bound {bound} vs {exact}"
            );
        }
    }

    #[test]
    fn modulus_bound_with_profile_weight_shrinks_with_the_ring() {
        let (spec, mask) = disk_setup(1.25, 512, 1.0);
        let pair = builtin_family(BuiltinFamily::RadialLogK { amplitude: 1.0 }, spec, &mask)
            .unwrap();
        let k = pair.dilatation();
        let mut bounds = Vec::new();
        for eps in [0.2, 0.05, 0.0125] {
            bounds.push(
                modulus_bound(
                    &k,
                    Complex::new(0.0, 0.0),
                    eps,
                    0.5,
                    PsiFamily::ProfileReciprocal,
                    &cfg(),
                )
                .unwrap(),
            );
        }
        assert!(bounds[0] > bounds[1] && bounds[1] > bounds[2], "{bounds:?}");
        assert!(bounds[2] < 0.8 * bounds[0]);
    }

    #[test]
    fn modulus_bound_validates_input() {
        let (spec, mask) = disk_setup(1.25, 128, 1.0);
        let pair = CoefficientPair::zero(spec, mask).unwrap();
        let k = pair.dilatation();
        let z0 = Complex::new(0.0, 0.0);
        assert!(matches!(
            modulus_bound(&k, z0, 0.5, 0.2, PsiFamily::Reciprocal, &cfg()),
            Err(CriteriaError::BadSweep { .. })
        ));
        assert!(matches!(
            modulus_bound(&k, z0, 0.5, 1.1, PsiFamily::LogReciprocal, &cfg()),
            Err(CriteriaError::PsiDomain(_))
        ));
    }

    #[test]
    fn equicontinuity_bound_reference_value_and_monotonicity() {
        let delta = 1.0 / 2f64.sqrt();
        let b = equicontinuity_bound(delta, 2.0 * std::f64::consts::PI).unwrap();
        let exact = 32.0 * 2f64.sqrt() / std::f64::consts::E;
        assert!((b - exact).abs() <= 1e-12, "bound {b} vs {exact}");
        let mut prev = 0.0;
        for m in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = equicontinuity_bound(delta, m).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(equicontinuity_bound(delta, 1e-3).unwrap() <= 1e-20);
        assert!(equicontinuity_bound(0.0, 1.0).is_err());
        assert!(equicontinuity_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn dominant_field_validation() {
        let (spec, mask) = disk_setup(1.25, 64, 1.0);
        let pair = builtin_family(
            BuiltinFamily::Constant { mu: Complex::new(0.5, 0.0), nu: Complex::new(0.0, 0.0) },
            spec,
            &mask,
        )
        .unwrap();
        let k = pair.dilatation();
        assert!(DominantField::new(k.values().clone(), &k).is_ok());
        let lifted = RealField::from_fn(spec, |_| 10.0);
        assert!(DominantField::new(lifted, &k).is_ok());
        let below = RealField::from_fn(spec, |_| 2.0);
        assert!(matches!(
            DominantField::new(below, &k),
            Err(CriteriaError::NotDominant(_))
        ));
        let q = DominantField::from_dilatation(&k);
        assert_eq!(q.field().values(), k.values().values());
    }

    #[test]
    fn default_sample_points_cover_the_domain() {
        let (_, mask) = disk_setup(1.25, 256, 1.0);
        let pts = default_sample_points(&mask);
        assert!(pts.len() >= 9, "got {}", pts.len());
        let again = default_sample_points(&mask);
        assert_eq!(pts.len(), again.len());
        for (a, b) in pts.iter().zip(&again) {
            assert_eq!(a, b);
        }
        for p in &pts {
            assert!(p.norm() < 1.0, "sample {p} outside the disk");
        }
    }

    #[test]
    fn report_of_uniformly_elliptic_pair_satisfies_everything() {
        let (spec, mask) = disk_setup(1.25, 512, 1.0);
        let pair = builtin_family(
            BuiltinFamily::Constant { mu: Complex::new(0.5, 0.0), nu: Complex::new(0.0, 0.0) },
            spec,
            &mask,
        )
        .unwrap();
        let samples = [
            Complex::new(0.0, 0.0),
            Complex::new(0.35, 0.0),
            Complex::new(-0.35, 0.0),
            Complex::new(0.0, 0.35),
            Complex::new(0.25, -0.25),
        ];
        let cond = exp_table();
        let report = criteria_report(&pair, Some(&cond), &samples, &cfg());
        assert_eq!(report.overall, Verdict::Satisfied);
        assert!(report.nu_mean.is_none());
        for group in [&report.fmo, &report.lehto, &report.log_scale, &report.log_scale_weighted] {
            for pv in group {
                assert_eq!(
                    pv.verdict.verdict,
                    Verdict::Satisfied,
                    "{} at {:?}: {:?}",
                    pv.verdict.test,
                    pv.z0,
                    pv.verdict.evidence
                );
            }
        }
        let phi = report.phi.as_ref().unwrap();
        assert_eq!(phi.conditions.overall, Verdict::Satisfied);
        assert_eq!(phi.budget.verdict, Verdict::Satisfied);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"overall\":\"satisfied\""));
    }

    #[test]
    fn report_of_radial_log_family_is_satisfied() {
        let (spec, mask) = disk_setup(1.25, 512, 1.0);
        let pair = builtin_family(BuiltinFamily::RadialLogK { amplitude: 1.0 }, spec, &mask)
            .unwrap();
        let samples = [
            Complex::new(0.0, 0.0),
            Complex::new(0.3, 0.0),
            Complex::new(0.0, -0.2),
        ];
        let mut ts = vec![0.0];
        let mut t: f64 = 0.25;
        while t < 3000.0 {
            ts.push(t);
            t *= 2f64.powf(0.125);
        }
        let cond = PhiCondition::tabulate(|x: f64| (0.2 * x).exp(), &ts).unwrap();
        let report = criteria_report(&pair, Some(&cond), &samples, &cfg());
        assert_eq!(report.overall, Verdict::Satisfied);
        for pv in &report.fmo {
            assert_eq!(pv.verdict.verdict, Verdict::Satisfied, "fmo at {:?}", pv.z0);
        }
        for pv in &report.lehto {
            assert_eq!(pv.verdict.verdict, Verdict::Satisfied, "lehto at {:?}", pv.z0);
        }
        let phi = report.phi.as_ref().unwrap();
        assert_eq!(phi.conditions.overall, Verdict::Satisfied);
        assert_eq!(phi.budget.verdict, Verdict::Satisfied, "{:?}", phi.budget.evidence);
    }

    #[test]
    fn report_flags_exponential_singularity() {
        let (spec, mask) = disk_setup(1.25, 256, 1.0);
        let nu = ComplexField::from_fn(spec, |z| {
            let r = z.norm();
            if r == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            let m = if 1.0 / r > 27.0 {
                1.0
            } else {
                let k = (1.0 / r).exp();
                (k - 1.0) / (k + 1.0)
            };
            (z * z / z.norm_sqr()).scale(m)
        });
        let pair =
            CoefficientPair::new(ComplexField::zeros(spec), nu, mask.clone()).unwrap();
        let samples = [Complex::new(0.0, 0.0)];
        let ts: Vec<f64> = (0..=64).map(|i| i as f64 * 8.0).collect();
        let cond = PhiCondition::tabulate(|x: f64| (0.2 * x).exp(), &ts).unwrap();
        let report = criteria_report(&pair, Some(&cond), &samples, &cfg());
        assert_eq!(report.overall, Verdict::Violated);
        assert_eq!(report.fmo[0].verdict.verdict, Verdict::Violated);
        assert_eq!(report.lehto[0].verdict.verdict, Verdict::Violated);
        let nu_mean = report.nu_mean.as_ref().unwrap();
        assert_eq!(nu_mean[0].verdict.verdict, Verdict::Violated);
    }
}
