//! Exterior regions, crossing-boundary intersections, CC/ACC classification,
//! the encirclement tally, and an independent winding-number oracle.
//!
//! A crossing is a frequency where the phase difference between the numerator
//! and denominator responses passes an odd multiple of 180 degrees while the
//! magnitude ratio exceeds unity. Its sense comes from the sign of the
//! phase-difference derivative: negative is a clockwise crossing (CC),
//! positive anticlockwise (ACC). Counts double for nonzero frequencies by
//! conjugate symmetry; a crossing at the origin counts once.

use num_complex::Complex64;

use crate::freq::{wrap_deg, BodeSeries, FreqError, FrequencyGrid};
use crate::poly::effective_axis_tol;
use crate::rational::RationalFunction;

/// Phase-difference derivative magnitudes below this (deg/Hz) make a crossing
/// tangent: no sense can be assigned and the verdict must stay marginal.
pub const TANGENT_THRESHOLD_DEG_PER_HZ: f64 = 1e-4;
/// A crossing with |mag ratio| within this of 0 dB sits on the unit circle:
/// the trajectory passes through the critical point itself.
pub const BOUNDARY_TOL_DB: f64 = 0.01;
/// Adaptive subdivision target for inter-sample phase-difference steps.
const MAX_PHASE_STEP_DEG: f64 = 60.0;
const MAX_SUBDIVIDE_DEPTH: usize = 42;
/// Winding accumulation refines until arg steps are below this.
const WINDING_STEP_DEG: f64 = 30.0;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EncircleError {
    #[error("the two series are not on identical frequency grids")]
    GridMismatch,
    #[error("tangent crossing at {f_hz} Hz: phase-difference derivative below threshold")]
    TangentCrossing { f_hz: f64 },
    #[error("crossing at {f_hz} Hz lies on the exterior-region boundary (|ratio| = 1)")]
    BoundaryCrossing { f_hz: f64 },
    #[error("ratio passes through the critical point at omega = 0")]
    CriticalAtZero,
    #[error("exterior region reaches the lowest sample at {f_hz} Hz with phase difference near +-180; the omega = 0 crossing cannot be resolved from samples")]
    UnresolvedAtZero { f_hz: f64 },
    #[error("ratio has a pole of order {order} at the origin; only order 1 is supported by the crossing counter")]
    OriginPoleOrder { order: i32 },
    #[error("ratio is improper: numerator degree exceeds denominator degree")]
    NonProperRatio,
    #[error("ratio has an imaginary-axis pole pair near {f_hz} Hz")]
    PoleOnAxis { f_hz: f64 },
    #[error("winding accumulation did not settle on an integer (got {value})")]
    WindingUnresolved { value: f64 },
    #[error("trajectory passes through the winding point near {f_hz} Hz")]
    AxisRoot { f_hz: f64 },
    #[error(transparent)]
    Freq(#[from] FreqError),
}

/// Frequency interval where the numerator response magnitude strictly exceeds
/// the denominator's. `f_lo_hz` may be 0 and `f_hi_hz` the grid maximum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExteriorRegion {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CrossingKind {
    CC,
    ACC,
}

/// One +-180 boundary crossing inside an exterior region.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Crossing {
    pub f_hz: f64,
    pub kind: CrossingKind,
    pub at_zero: bool,
    /// d/df of the phase difference at the crossing, deg/Hz. Absent for the
    /// indentation-arc crossing of an origin pole.
    pub phase_diff_deriv: Option<f64>,
    /// Which wrapped boundary was hit: +180 or -180.
    pub boundary: f64,
    /// Half-step uncertainty for sampled-mode interpolation (0 when exact).
    pub f_uncertainty_hz: f64,
}

/// Encirclement tally. `n` is clockwise-positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct EncirclementCount {
    pub n_cc: usize,
    pub n_cc0: usize,
    pub n_acc: usize,
    pub n_acc0: usize,
    pub n_cc_total: usize,
    pub n_acc_total: usize,
    pub n: i64,
}

/// Two responses prepared for region/crossing work: a common frequency grid,
/// the magnitude difference, the unwrapped phase difference, and optionally
/// the exact models behind them for refinement.
#[derive(Debug)]
pub struct ResponsePair<'a> {
    f: Vec<f64>,
    mag_diff: Vec<f64>,
    d_deg: Vec<f64>,
    exact: Option<(&'a RationalFunction, &'a RationalFunction)>,
}

impl<'a> ResponsePair<'a> {
    /// Builds from two sampled series on identical grids.
    pub fn from_series(b1: &BodeSeries, b2: &BodeSeries) -> Result<ResponsePair<'a>, EncircleError> {
        if b1.len() != b2.len()
            || b1
                .f_hz
                .iter()
                .zip(b2.f_hz.iter())
                .any(|(a, b)| (a - b).abs() > 1e-9 * b.abs())
        {
            return Err(EncircleError::GridMismatch);
        }
        let mag_diff: Vec<f64> = b1
            .mag_db
            .iter()
            .zip(b2.mag_db.iter())
            .map(|(a, b)| a - b)
            .collect();
        let d_deg: Vec<f64> = b1
            .phase_deg
            .iter()
            .zip(b2.phase_deg.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(ResponsePair { f: b1.f_hz.clone(), mag_diff, d_deg, exact: None })
    }

    /// Builds from two exact models on a grid, subdividing adaptively until
    /// inter-sample phase-difference steps are tame.
    pub fn from_models(
        a: &'a RationalFunction,
        b: &'a RationalFunction,
        grid: &FrequencyGrid,
    ) -> Result<ResponsePair<'a>, EncircleError> {
        let base = grid.frequencies();
        let mut f: Vec<f64> = Vec::with_capacity(base.len() * 2);
        let mut raw: Vec<(f64, f64)> = Vec::with_capacity(base.len() * 2); // (mag_diff, raw phase diff)
        let eval = |fq: f64| -> (f64, f64) {
            let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * fq);
            let va = a.eval(s);
            let vb = b.eval(s);
            (
                20.0 * (va.norm() / vb.norm()).log10(),
                wrap_deg(va.arg().to_degrees() - vb.arg().to_degrees()),
            )
        };
        fn subdivide(
            eval: &dyn Fn(f64) -> (f64, f64),
            f_lo: f64,
            v_lo: (f64, f64),
            f_hi: f64,
            v_hi: (f64, f64),
            depth: usize,
            f: &mut Vec<f64>,
            raw: &mut Vec<(f64, f64)>,
        ) {
            let step = wrap_deg(v_hi.1 - v_lo.1).abs();
            if step > MAX_PHASE_STEP_DEG && depth < MAX_SUBDIVIDE_DEPTH {
                let fm = (f_lo * f_hi).sqrt();
                if fm > f_lo && fm < f_hi {
                    let vm = eval(fm);
                    if vm.0.is_finite() && vm.1.is_finite() {
                        subdivide(eval, f_lo, v_lo, fm, vm, depth + 1, f, raw);
                        f.push(fm);
                        raw.push(vm);
                        subdivide(eval, fm, vm, f_hi, v_hi, depth + 1, f, raw);
                        return;
                    }
                }
            }
        }
        let mut prev: Option<(f64, (f64, f64))> = None;
        for fq in base {
            let v = eval(fq);
            if !v.0.is_finite() || !v.1.is_finite() {
                continue;
            }
            if let Some((fp, vp)) = prev {
                subdivide(&eval, fp, vp, fq, v, 0, &mut f, &mut raw);
            }
            f.push(fq);
            raw.push(v);
            prev = Some((fq, v));
        }
        // unwrap the phase-difference sequence
        let mut d_deg = Vec::with_capacity(raw.len());
        let mut acc = raw.first().map(|(_, p)| *p).unwrap_or(0.0);
        d_deg.push(acc);
        for w in raw.windows(2) {
            acc += wrap_deg(w[1].1 - w[0].1);
            d_deg.push(acc);
        }
        let mag_diff = raw.iter().map(|(m, _)| *m).collect();
        Ok(ResponsePair { f, mag_diff, d_deg, exact: Some((a, b)) })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.f
    }

    fn mag_diff_at(&self, fq: f64) -> f64 {
        match self.exact {
            Some((a, b)) => {
                let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * fq);
                20.0 * (a.eval(s).norm() / b.eval(s).norm()).log10()
            }
            None => interp_log(&self.f, &self.mag_diff, fq),
        }
    }

    fn raw_phase_diff_at(&self, fq: f64) -> f64 {
        match self.exact {
            Some((a, b)) => {
                let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * fq);
                wrap_deg(a.eval(s).arg().to_degrees() - b.eval(s).arg().to_degrees())
            }
            None => interp_log(&self.f, &self.d_deg, fq),
        }
    }

    /// Phase-difference derivative in deg/Hz: analytic when models exist,
    /// central finite difference otherwise.
    fn deriv_at(&self, fq: f64) -> Result<f64, EncircleError> {
        match self.exact {
            Some((a, b)) => Ok(crate::freq::phase_derivative_exact(a, fq)?
                - crate::freq::phase_derivative_exact(b, fq)?),
            None => {
                let i = lower_index(&self.f, fq).clamp(1, self.f.len() - 2);
                Ok((self.d_deg[i + 1] - self.d_deg[i - 1]) / (self.f[i + 1] - self.f[i - 1]))
            }
        }
    }
}

fn lower_index(f: &[f64], fq: f64) -> usize {
    match f.binary_search_by(|x| x.partial_cmp(&fq).expect("finite grid")) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1).min(f.len() - 1),
    }
}

fn interp_log(f: &[f64], y: &[f64], fq: f64) -> f64 {
    let i = lower_index(f, fq).min(f.len() - 2);
    let t = (fq.ln() - f[i].ln()) / (f[i + 1].ln() - f[i].ln());
    y[i] + (y[i + 1] - y[i]) * t.clamp(0.0, 1.0)
}

/// Maximal intervals where the numerator magnitude strictly exceeds the
/// denominator's, boundaries refined by bisection (exact) or log-linear
/// interpolation (sampled) to within `refine_tol_hz`.
pub fn exterior_regions(pair: &ResponsePair, refine_tol_hz: f64) -> Vec<ExteriorRegion> {
    let n = pair.f.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if pair.mag_diff[i] > 0.0 {
            let mut j = i;
            while j + 1 < n && pair.mag_diff[j + 1] > 0.0 {
                j += 1;
            }
            let f_lo = if i == 0 {
                low_edge(pair)
            } else {
                refine_boundary(pair, pair.f[i - 1], pair.f[i], refine_tol_hz)
            };
            let f_hi = if j == n - 1 {
                pair.f[j]
            } else {
                refine_boundary(pair, pair.f[j], pair.f[j + 1], refine_tol_hz)
            };
            out.push(ExteriorRegion { f_lo_hz: f_lo, f_hi_hz: f_hi });
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Lower edge of a region touching the bottom of the grid: in exact mode the
/// DC limit decides whether the region truly extends to omega = 0.
fn low_edge(pair: &ResponsePair) -> f64 {
    let f_min = pair.f[0];
    let Some((a, b)) = pair.exact else {
        return f_min;
    };
    let k = ratio_origin_pole_order(a, b);
    if k > 0 {
        return 0.0; // |ratio| -> infinity at DC
    }
    if k < 0 {
        // |ratio| -> 0 at DC: a boundary hides below the grid
        return refine_boundary(pair, f_min * 1e-9, f_min, f_min * 1e-12);
    }
    let r0 = ratio_dc_value(a, b);
    if r0.abs() >= 1.0 {
        0.0
    } else {
        refine_boundary(pair, f_min * 1e-9, f_min, f_min * 1e-12)
    }
}

fn refine_boundary(pair: &ResponsePair, mut lo: f64, mut hi: f64, tol_hz: f64) -> f64 {
    let mut g_lo = pair.mag_diff_at(lo);
    for _ in 0..200 {
        if hi - lo <= tol_hz.max(hi * 1e-14) {
            break;
        }
        let mid = if pair.is_exact() { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = pair.mag_diff_at(mid);
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Order of the ratio a/b's pole at s = 0 (negative for a zero).
fn ratio_origin_pole_order(a: &RationalFunction, b: &RationalFunction) -> i32 {
    a.origin_pole_order() - b.origin_pole_order()
}

/// Real DC value of the ratio a/b with shared origin factors removed.
fn ratio_dc_value(a: &RationalFunction, b: &RationalFunction) -> f64 {
    let lead = |p: &crate::poly::Polynomial| p.coeffs()[p.origin_multiplicity()];
    (lead(a.num()) / lead(a.den())) / (lead(b.num()) / lead(b.den()))
}

/// All +-180 crossings of the phase difference inside the exterior regions,
/// refined and classified. Tangent or boundary-grazing crossings are errors:
/// the caller must report a marginal verdict rather than guess.
pub fn find_crossings(
    pair: &ResponsePair,
    regions: &[ExteriorRegion],
    tol_deg: f64,
) -> Result<Vec<Crossing>, EncircleError> {
    let mut out = Vec::new();

    // omega = 0 crossing
    if let Some(region) = regions.first() {
        if region.f_lo_hz == 0.0 {
            if let Some((a, b)) = pair.exact {
                if let Some(c) = at_zero_crossing(pair, a, b)? {
                    out.push(c);
                }
            }
        } else if pair.exact.is_none() && region.f_lo_hz <= pair.f[0] {
            let wd = wrap_deg(pair.d_deg[0]);
            if (wd.abs() - 180.0).abs() <= tol_deg {
                return Err(EncircleError::UnresolvedAtZero { f_hz: pair.f[0] });
            }
        }
    }

    for region in regions {
        let lo = region.f_lo_hz.max(pair.f[0]);
        let hi = region.f_hi_hz.min(*pair.f.last().expect("nonempty grid"));
        let idx: Vec<usize> = (0..pair.f.len())
            .filter(|&i| pair.f[i] > lo && pair.f[i] < hi && pair.mag_diff[i] > 0.0)
            .collect();
        if idx.is_empty() {
            continue;
        }
        // scan brackets: refined edge -> samples -> refined edge (exact mode
        // can reconstruct the phase branch at the region edges)
        let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(idx.len() + 2);
        if pair.is_exact() {
            let first = idx[0];
            let f_edge = lo * (1.0 + 1e-12);
            if f_edge < pair.f[first] {
                let d_edge = pair.d_deg[first]
                    + wrap_deg(pair.raw_phase_diff_at(f_edge) - wrap_deg(pair.d_deg[first]));
                nodes.push((f_edge, d_edge));
            }
        }
        for &i in &idx {
            nodes.push((pair.f[i], pair.d_deg[i]));
        }
        if pair.is_exact() {
            let last = *idx.last().expect("nonempty region");
            let f_edge = hi * (1.0 - 1e-12);
            if f_edge > pair.f[last] {
                let d_edge = pair.d_deg[last]
                    + wrap_deg(pair.raw_phase_diff_at(f_edge) - wrap_deg(pair.d_deg[last]));
                nodes.push((f_edge, d_edge));
            }
        }
        for w in nodes.windows(2) {
            let ((f_a, d_a), (f_b, d_b)) = (w[0], w[1]);
            let k_lo = ((d_a - 180.0) / 360.0).floor() as i64;
            let k_hi = ((d_b - 180.0) / 360.0).floor() as i64;
            if k_lo == k_hi {
                continue;
            }
            let step = if k_hi > k_lo { 1 } else { -1 };
            let mut k = k_lo;
            while k != k_hi {
                let target = if step > 0 {
                    180.0 + 360.0 * (k + 1) as f64
                } else {
                    180.0 + 360.0 * k as f64
                };
                out.push(locate_crossing(pair, f_a, d_a, f_b, d_b, target)?);
                k += step;
            }
        }
    }
    out.sort_by(|a, b| a.f_hz.partial_cmp(&b.f_hz).expect("finite crossings"));
    Ok(out)
}

/// Bisection (exact) or interpolation (sampled) of one boundary crossing,
/// then sense classification by the phase-difference derivative.
fn locate_crossing(
    pair: &ResponsePair,
    f_lo: f64,
    d_lo: f64,
    f_hi: f64,
    d_hi: f64,
    target: f64,
) -> Result<Crossing, EncircleError> {
    let mut lo = (f_lo, d_lo);
    let mut hi = (f_hi, d_hi);
    let mut uncertainty = 0.0;
    if pair.is_exact() {
        for _ in 0..200 {
            if (hi.0 - lo.0) <= hi.0 * 1e-15 {
                break;
            }
            let fm = (lo.0 * hi.0).sqrt();
            if fm <= lo.0 || fm >= hi.0 {
                break;
            }
            // reconstruct the local branch from the nearer endpoint
            let raw = pair.raw_phase_diff_at(fm);
            let dm = lo.1 + wrap_deg(raw - wrap_deg(lo.1));
            if (dm - target).abs() < 1e-6 {
                lo = (fm, dm);
                hi = (fm, dm);
                break;
            }
            if (dm > target) == (lo.1 > target) {
                lo = (fm, dm);
            } else {
                hi = (fm, dm);
            }
        }
    } else {
        uncertainty = 0.5 * (f_hi - f_lo);
    }
    let f_c = if pair.is_exact() {
        0.5 * (lo.0 + hi.0)
    } else {
        // linear interpolation on the unwrapped difference
        let t = (target - d_lo) / (d_hi - d_lo);
        f_lo + (f_hi - f_lo) * t.clamp(0.0, 1.0)
    };

    let mag = pair.mag_diff_at(f_c);
    if mag.abs() <= BOUNDARY_TOL_DB {
        return Err(EncircleError::BoundaryCrossing { f_hz: f_c });
    }
    let deriv = pair.deriv_at(f_c)?;
    if deriv.abs() < TANGENT_THRESHOLD_DEG_PER_HZ {
        return Err(EncircleError::TangentCrossing { f_hz: f_c });
    }
    Ok(Crossing {
        f_hz: f_c,
        kind: if deriv < 0.0 { CrossingKind::CC } else { CrossingKind::ACC },
        at_zero: false,
        phase_diff_deriv: Some(deriv),
        boundary: if wrap_deg(target) >= 0.0 { 180.0 } else { -180.0 },
        f_uncertainty_hz: uncertainty,
    })
}

/// The omega = 0 crossing of an exact pair: either a finite negative DC ratio
/// beyond -1, or the indentation arc of a simple origin pole sweeping the
/// negative real axis once, clockwise.
fn at_zero_crossing(
    pair: &ResponsePair,
    a: &RationalFunction,
    b: &RationalFunction,
) -> Result<Option<Crossing>, EncircleError> {
    let k = ratio_origin_pole_order(a, b);
    if k > 1 {
        return Err(EncircleError::OriginPoleOrder { order: k });
    }
    if k == 1 {
        // r(s) ~ c/s near 0; right indentation sweeps arg(r) clockwise by 180
        // degrees, crossing the negative real axis exactly when c < 0.
        let c = ratio_dc_value(a, b);
        if c < 0.0 {
            return Ok(Some(Crossing {
                f_hz: 0.0,
                kind: CrossingKind::CC,
                at_zero: true,
                phase_diff_deriv: None,
                boundary: 180.0,
                f_uncertainty_hz: 0.0,
            }));
        }
        return Ok(None);
    }
    if k < 0 {
        return Ok(None); // ratio vanishes at DC
    }
    let r0 = ratio_dc_value(a, b);
    if r0 >= -1.0 - 1e-12 && r0 <= -1.0 + 1e-12 {
        return Err(EncircleError::CriticalAtZero);
    }
    if r0 < -1.0 {
        let deriv = pair.deriv_at(0.0)?;
        if deriv.abs() < TANGENT_THRESHOLD_DEG_PER_HZ {
            return Err(EncircleError::TangentCrossing { f_hz: 0.0 });
        }
        return Ok(Some(Crossing {
            f_hz: 0.0,
            kind: if deriv < 0.0 { CrossingKind::CC } else { CrossingKind::ACC },
            at_zero: true,
            phase_diff_deriv: Some(deriv),
            boundary: 180.0,
            f_uncertainty_hz: 0.0,
        }));
    }
    Ok(None)
}

/// Step-4 bookkeeping: double the nonzero-frequency counts, add the origin
/// ones, and difference them.
pub fn count_encirclements(crossings: &[Crossing]) -> EncirclementCount {
    let n_cc = crossings
        .iter()
        .filter(|c| c.kind == CrossingKind::CC && !c.at_zero)
        .count();
    let n_cc0 = crossings
        .iter()
        .filter(|c| c.kind == CrossingKind::CC && c.at_zero)
        .count();
    let n_acc = crossings
        .iter()
        .filter(|c| c.kind == CrossingKind::ACC && !c.at_zero)
        .count();
    let n_acc0 = crossings
        .iter()
        .filter(|c| c.kind == CrossingKind::ACC && c.at_zero)
        .count();
    let n_cc_total = 2 * n_cc + n_cc0;
    let n_acc_total = 2 * n_acc + n_acc0;
    EncirclementCount {
        n_cc,
        n_cc0,
        n_acc,
        n_acc0,
        n_cc_total,
        n_acc_total,
        n: n_cc_total as i64 - n_acc_total as i64,
    }
}

/// Clockwise-positive winding number of the ratio around (-1, j0), by
/// accumulating the continuous argument of (1 + ratio) along the imaginary
/// axis and doubling by conjugate symmetry. A simple origin pole is handled
/// by the analytic right-indentation arc: half a clockwise turn per order.
pub fn winding_number_oracle(
    ratio: &RationalFunction,
    grid: &FrequencyGrid,
) -> Result<i32, EncircleError> {
    if ratio.relative_degree() < 0 {
        return Err(EncircleError::NonProperRatio);
    }
    // imaginary-axis poles other than the origin are unsupported; skip
    // removable ones that an uncancelled common factor explains
    if ratio.den().degree() > 0 {
        let den_roots = crate::poly::poly_roots(ratio.den())
            .map_err(|_| EncircleError::NonProperRatio)?;
        let tol = effective_axis_tol(crate::poly::DEFAULT_AXIS_TOL, &den_roots.roots);
        let num_roots = if ratio.num().degree() > 0 {
            crate::poly::poly_roots(ratio.num()).map(|r| r.roots).unwrap_or_default()
        } else {
            Vec::new()
        };
        for r in den_roots.roots.iter() {
            if r.re.abs() <= tol && r.im.abs() > tol {
                let removable = num_roots
                    .iter()
                    .any(|z| (z - r).norm() <= tol.max(den_roots.cluster_tol));
                if !removable {
                    return Err(EncircleError::PoleOnAxis {
                        f_hz: r.im.abs() / (2.0 * std::f64::consts::PI),
                    });
                }
            }
        }
    }

    let k = ratio.origin_pole_order().max(0);
    let eval_arg = |f: f64| -> Complex64 {
        let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * f);
        ratio.eval(s) + 1.0
    };

    let mut freqs = grid.frequencies();
    // closure control for strictly proper ratios: push the top until |r| is small
    if ratio.relative_degree() > 0 {
        let mut f_top = *freqs.last().expect("nonempty grid");
        let mut guard = 0;
        while ratio
            .eval(Complex64::new(0.0, 2.0 * std::f64::consts::PI * f_top))
            .norm()
            > 0.3
            && guard < 8
        {
            f_top *= 10.0;
            freqs.push(f_top);
            guard += 1;
        }
    }
    let mut f_start = freqs[0];
    if k > 0 {
        // start deep inside the pole's dominance so the arc approximation holds
        let mut guard = 0;
        while ratio
            .eval(Complex64::new(0.0, 2.0 * std::f64::consts::PI * f_start))
            .norm()
            < 10.0
            && guard < 20
        {
            f_start /= 10.0;
            guard += 1;
        }
        freqs.retain(|f| *f > f_start);
        freqs.insert(0, f_start);
    }

    let mut acc_deg = 0.0;
    let mut prev_f;
    let mut prev_v;
    if k == 0 {
        let v0 = ratio.eval(Complex64::new(0.0, 0.0)) + 1.0;
        if v0.norm() < 1e-12 {
            return Err(EncircleError::CriticalAtZero);
        }
        prev_f = 0.0;
        prev_v = v0;
    } else {
        prev_f = f_start;
        prev_v = eval_arg(f_start);
    }
    for f in freqs.into_iter().skip(if k == 0 { 0 } else { 1 }) {
        acc_deg += arg_delta(&eval_arg, prev_f, prev_v, f, eval_arg(f), 0)?;
        prev_f = f;
        prev_v = eval_arg(f);
    }

    // total over the closed contour: both imaginary-axis legs contribute the
    // same argument change; the origin arc adds k clockwise half-turns
    let total_ccw = 2.0 * acc_deg - 180.0 * k as f64;
    let n_float = -total_ccw / 360.0;
    let n = n_float.round();
    if (n_float - n).abs() > 0.25 {
        return Err(EncircleError::WindingUnresolved { value: n_float });
    }
    Ok(n as i32)
}

/// Clockwise-positive winding of a rational trajectory around the origin
/// over the full closed contour: both imaginary-axis legs, the infinite arc
/// (a half clockwise turn per degree of numerator excess), and the origin
/// indentation (a half clockwise turn per origin pole order). Imaginary-axis
/// zeros or non-origin poles leave the winding undefined.
pub fn winding_around_origin(
    rf: &RationalFunction,
    grid: &FrequencyGrid,
) -> Result<i32, EncircleError> {
    let arc_excess = rf.num().degree() as i64 - rf.den().degree() as i64;
    if arc_excess < 0 {
        // trajectory closes onto the origin itself
        return Err(EncircleError::AxisRoot { f_hz: f64::INFINITY });
    }
    for p in [rf.num(), rf.den()] {
        if p.degree() == 0 {
            continue;
        }
        let rs = crate::poly::poly_roots(p).map_err(|_| EncircleError::NonProperRatio)?;
        let tol = effective_axis_tol(crate::poly::DEFAULT_AXIS_TOL, &rs.roots);
        if let Some(r) = rs.roots.iter().find(|r| r.re.abs() <= tol && r.im.abs() > tol) {
            return Err(EncircleError::AxisRoot {
                f_hz: r.im.abs() / (2.0 * std::f64::consts::PI),
            });
        }
    }
    let k_origin = rf.origin_pole_order();
    if k_origin < 0 {
        return Err(EncircleError::AxisRoot { f_hz: 0.0 }); // zero at s = 0
    }
    let eval = |f: f64| -> Complex64 {
        rf.eval(Complex64::new(0.0, 2.0 * std::f64::consts::PI * f))
    };
    let mut freqs = grid.frequencies();
    let mut f_start = freqs[0];
    if k_origin > 0 {
        let mut guard = 0;
        while eval(f_start).norm() < 10.0 && guard < 20 {
            f_start /= 10.0;
            guard += 1;
        }
        freqs.retain(|f| *f > f_start);
        freqs.insert(0, f_start);
    }
    let mut acc_deg = 0.0;
    let (mut prev_f, mut prev_v) = if k_origin == 0 {
        let v0 = rf.eval(Complex64::new(0.0, 0.0));
        if v0.norm() < 1e-300 {
            return Err(EncircleError::AxisRoot { f_hz: 0.0 });
        }
        (0.0, v0)
    } else {
        (f_start, eval(f_start))
    };
    for f in freqs.into_iter().skip(if k_origin == 0 { 0 } else { 1 }) {
        let v = eval(f);
        acc_deg += arg_delta(&eval, prev_f, prev_v, f, v, 0)?;
        prev_f = f;
        prev_v = v;
    }
    let total_ccw =
        2.0 * acc_deg - 180.0 * arc_excess as f64 - 180.0 * k_origin.max(0) as f64;
    let n_float = -total_ccw / 360.0;
    let n = n_float.round();
    if (n_float - n).abs() > 0.25 {
        return Err(EncircleError::WindingUnresolved { value: n_float });
    }
    Ok(n as i32)
}

fn arg_delta(
    eval: &dyn Fn(f64) -> Complex64,
    f_lo: f64,
    v_lo: Complex64,
    f_hi: f64,
    v_hi: Complex64,
    depth: usize,
) -> Result<f64, EncircleError> {
    let d = wrap_deg(v_hi.arg().to_degrees() - v_lo.arg().to_degrees());
    if d.abs() <= WINDING_STEP_DEG || depth >= MAX_SUBDIVIDE_DEPTH {
        return Ok(d);
    }
    let fm = if f_lo > 0.0 { (f_lo.max(f_hi * 1e-18) * f_hi).sqrt() } else { 0.5 * f_hi };
    if fm <= f_lo || fm >= f_hi {
        return Ok(d);
    }
    let vm = eval(fm);
    if vm.norm() < 1e-300 {
        return Err(EncircleError::WindingUnresolved { value: f64::NAN });
    }
    Ok(arg_delta(eval, f_lo, v_lo, fm, vm, depth + 1)?
        + arg_delta(eval, fm, vm, f_hi, v_hi, depth + 1)?)
}
