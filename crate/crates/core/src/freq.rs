//! Frequency grids, response evaluation, phase unwrapping, and phase
//! derivatives.
//!
//! External frequencies are in Hz and external phase derivatives in deg/Hz;
//! internal math runs in rad/(rad/s). deg/Hz = 360 * rad/(rad/s).

use num_complex::Complex64;

use crate::poly::effective_axis_tol;
use crate::rational::RationalFunction;

/// Inter-sample principal phase steps above this are flagged as unwrap
/// ambiguities rather than guessed through.
pub const UNWRAP_AMBIGUITY_DEG: f64 = 170.0;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum FreqError {
    #[error("invalid grid: need 0 < f_min < f_max and points_per_decade >= 1")]
    InvalidGrid,
    #[error("denominator root within axis tolerance of grid frequency {f_hz} Hz; refine or indent the grid")]
    PoleOnGrid { f_hz: f64 },
    #[error("|F| = {mag:.3e} below 1e-12 at {f_hz} Hz; phase derivative undefined")]
    ValueNearZero { f_hz: f64, mag: f64 },
    #[error("frequency {f_hz} Hz outside the sampled span")]
    OutOfSpan { f_hz: f64 },
    #[error("response points must have strictly increasing finite frequencies")]
    BadResponse,
}

/// Logarithmic frequency grid with optional refinement insertions.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub points_per_decade: usize,
    pub extra_points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(f_min: f64, f_max: f64, points_per_decade: usize) -> Result<Self, FreqError> {
        if !(f_min > 0.0 && f_min < f_max && points_per_decade >= 1)
            || !f_min.is_finite()
            || !f_max.is_finite()
        {
            return Err(FreqError::InvalidGrid);
        }
        Ok(Self { f_min, f_max, points_per_decade, extra_points: Vec::new() })
    }

    /// Default analysis grid: 1 Hz to 100 kHz at 400 points per decade.
    pub fn default_analysis() -> Self {
        Self::new(1.0, 1e5, 400).expect("valid default grid")
    }

    pub fn with_extra_points(mut self, extra: Vec<f64>) -> Self {
        self.extra_points = extra;
        self
    }

    /// Strictly increasing merged grid.
    pub fn frequencies(&self) -> Vec<f64> {
        let decades = (self.f_max / self.f_min).log10();
        let n = (decades * self.points_per_decade as f64).ceil() as usize + 1;
        let mut f: Vec<f64> = (0..n)
            .map(|k| self.f_min * 10.0_f64.powf(decades * k as f64 / (n - 1) as f64))
            .collect();
        f.extend(
            self.extra_points
                .iter()
                .copied()
                .filter(|x| *x > self.f_min && *x < self.f_max),
        );
        f.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
        f.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * b.abs());
        f
    }
}

/// What a sampled response physically represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Impedance,
    Admittance,
    Ratio,
    Generic,
}

/// Frequency-indexed complex values, the "black box" representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledResponse {
    points: Vec<(f64, Complex64)>,
    pub label: String,
    pub kind: ResponseKind,
}

impl SampledResponse {
    pub fn new(
        points: Vec<(f64, Complex64)>,
        label: impl Into<String>,
        kind: ResponseKind,
    ) -> Result<Self, FreqError> {
        if points.is_empty() {
            return Err(FreqError::BadResponse);
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(FreqError::BadResponse);
            }
        }
        if points
            .iter()
            .any(|(f, v)| !f.is_finite() || !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(FreqError::BadResponse);
        }
        Ok(Self { points, label: label.into(), kind })
    }

    pub fn points(&self) -> &[(f64, Complex64)] {
        &self.points
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.points.iter().map(|(f, _)| *f).collect()
    }

    pub fn bode(&self) -> BodeSeries {
        let f_hz: Vec<f64> = self.frequencies();
        let mag_db: Vec<f64> = self
            .points
            .iter()
            .map(|(_, v)| 20.0 * v.norm().log10())
            .collect();
        let raw: Vec<f64> = self
            .points
            .iter()
            .map(|(_, v)| v.arg().to_degrees())
            .collect();
        let (phase_deg, ambiguous) = unwrap_phase(&raw);
        BodeSeries { f_hz, mag_db, phase_deg, ambiguous_steps: ambiguous }
    }
}

/// Magnitude(dB)/unwrapped-phase(deg) view of a response.
#[derive(Debug, Clone, PartialEq)]
pub struct BodeSeries {
    pub f_hz: Vec<f64>,
    pub mag_db: Vec<f64>,
    /// Unwrapped, continuous; anchored at the lowest frequency's principal value.
    pub phase_deg: Vec<f64>,
    /// Indices i where the principal step from i to i+1 exceeded
    /// [`UNWRAP_AMBIGUITY_DEG`]; the unwrap there is a flagged guess.
    pub ambiguous_steps: Vec<usize>,
}

impl BodeSeries {
    pub fn len(&self) -> usize {
        self.f_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_hz.is_empty()
    }

    /// Wrapped view of the phase in (-180, 180].
    pub fn phase_wrapped_deg(&self) -> Vec<f64> {
        self.phase_deg.iter().map(|p| wrap_deg(*p)).collect()
    }

    /// Median points-per-decade of the stored grid.
    pub fn points_per_decade(&self) -> f64 {
        if self.f_hz.len() < 2 {
            return 0.0;
        }
        let mut steps: Vec<f64> = self
            .f_hz
            .windows(2)
            .map(|w| (w[1] / w[0]).log10())
            .collect();
        steps.sort_by(|a, b| a.partial_cmp(b).expect("finite steps"));
        1.0 / steps[steps.len() / 2].max(f64::MIN_POSITIVE)
    }
}

/// Maps a phase in degrees onto (-180, 180].
pub fn wrap_deg(p: f64) -> f64 {
    let mut w = p.rem_euclid(360.0);
    if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// Unwraps principal-value phases (degrees). Successive differences of the
/// output differ from the raw differences by exact multiples of 360. Returns
/// the indices of steps whose raw change exceeded the ambiguity threshold;
/// these are flagged, not resolved.
pub fn unwrap_phase(raw_phase_deg: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut out = Vec::with_capacity(raw_phase_deg.len());
    let mut flags = Vec::new();
    if raw_phase_deg.is_empty() {
        return (out, flags);
    }
    let mut prev = wrap_deg(raw_phase_deg[0]);
    out.push(prev);
    for (i, p) in raw_phase_deg.iter().enumerate().skip(1) {
        let step = wrap_deg(p - raw_phase_deg[i - 1]);
        if step.abs() > UNWRAP_AMBIGUITY_DEG {
            flags.push(i - 1);
        }
        prev += step;
        out.push(prev);
    }
    (out, flags)
}

/// Evaluates a rational function on a grid. Errors if a denominator root sits
/// within the axis tolerance of a sampled j*omega point.
pub fn evaluate_response(
    rf: &RationalFunction,
    grid: &FrequencyGrid,
) -> Result<SampledResponse, FreqError> {
    let freqs = grid.frequencies();
    check_poles_off_grid(rf, &freqs)?;
    let points: Vec<(f64, Complex64)> = freqs
        .iter()
        .map(|f| {
            let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * f);
            (*f, rf.eval(s))
        })
        .collect();
    SampledResponse::new(points, rf.label.clone(), ResponseKind::Generic)
}

fn check_poles_off_grid(rf: &RationalFunction, freqs: &[f64]) -> Result<(), FreqError> {
    let Ok(rs) = crate::poly::poly_roots(rf.den()) else {
        return Ok(()); // constant denominator
    };
    let tol = effective_axis_tol(crate::poly::DEFAULT_AXIS_TOL, &rs.roots);
    for r in rs.roots.iter().filter(|r| r.re.abs() <= tol && r.im >= 0.0) {
        // skip roots shared with the numerator (removable at evaluation)
        if let Ok(nz) = crate::poly::poly_roots(rf.num()) {
            if nz.roots.iter().any(|z| (z - r).norm() <= tol.max(nz.cluster_tol)) {
                continue;
            }
        }
        for f in freqs {
            let w = 2.0 * std::f64::consts::PI * f;
            if (r.im - w).abs() <= tol {
                return Err(FreqError::PoleOnGrid { f_hz: *f });
            }
        }
    }
    Ok(())
}

/// Analytic phase derivative of a rational function at `f_hz`, in deg/Hz.
///
/// d(arg F(jw))/dw = Re(F'(jw)/F(jw)) with F'/F = n'/n - d'/d.
pub fn phase_derivative_exact(rf: &RationalFunction, f_hz: f64) -> Result<f64, FreqError> {
    let w = 2.0 * std::f64::consts::PI * f_hz;
    let s = Complex64::new(0.0, w);
    let shift_n = rf.num().origin_multiplicity();
    let shift_d = rf.den().origin_multiplicity();
    let n = rf.num().eval_shifted(s, shift_n);
    let d = rf.den().eval_shifted(s, shift_d);
    let v = rf.eval(s);
    if v.norm() < 1e-12 || n.norm() == 0.0 || d.norm() == 0.0 {
        return Err(FreqError::ValueNearZero { f_hz, mag: v.norm() });
    }
    let np = rf.num().derivative();
    let dp = rf.den().derivative();
    let full_n = rf.num().eval(s);
    let full_d = rf.den().eval(s);
    let ratio = if full_n.norm() > 0.0 && full_d.norm() > 0.0 {
        np.eval(s) / full_n - dp.eval(s) / full_d
    } else {
        // Underflow or s = 0 with origin factors: use (s^m q)'/(s^m q) =
        // m/s + q'/q; on the axis m/s is purely imaginary and drops out of
        // the real part below.
        shifted_derivative_ratio(rf.num(), s, shift_n)
            - shifted_derivative_ratio(rf.den(), s, shift_d)
    };
    Ok(ratio.re * 360.0)
}

/// p'(s)/p(s) computed on the origin-shifted polynomial q = p/s^m, i.e. q'/q.
fn shifted_derivative_ratio(p: &crate::poly::Polynomial, s: Complex64, shift: usize) -> Complex64 {
    let q = crate::poly::Polynomial::new(p.coeffs()[shift..].to_vec()).expect("finite shift");
    q.derivative().eval(s) / q.eval(s)
}

/// Central finite-difference phase derivative on a sampled series, deg/Hz.
pub fn phase_derivative_sampled(b: &BodeSeries, f_hz: f64) -> Result<f64, FreqError> {
    let n = b.len();
    if n < 3 || f_hz < b.f_hz[0] || f_hz > b.f_hz[n - 1] {
        return Err(FreqError::OutOfSpan { f_hz });
    }
    let i = match b
        .f_hz
        .binary_search_by(|x| x.partial_cmp(&f_hz).expect("finite"))
    {
        Ok(i) => i,
        Err(i) => i.min(n - 1),
    };
    let i = i.clamp(1, n - 2);
    Ok((b.phase_deg[i + 1] - b.phase_deg[i - 1]) / (b.f_hz[i + 1] - b.f_hz[i - 1]))
}
