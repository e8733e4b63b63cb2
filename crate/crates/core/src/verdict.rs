//! The four-stage rule: orient the proper ratio, count open-loop RHP poles,
//! tally encirclements on the Bode data, and decide stability from
//! N = -P. Cross-checked, when exact models exist, against an independent
//! winding-number sweep and the closed-loop characteristic roots.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::encircle::{
    count_encirclements, exterior_regions, find_crossings, winding_number_oracle, Crossing,
    EncircleError, EncirclementCount, ExteriorRegion, ResponsePair,
};
use crate::freq::{
    evaluate_response, BodeSeries, FreqError, FrequencyGrid, ResponseKind, SampledResponse,
};
use crate::poly::{count_rhp_roots, effective_axis_tol, poly_roots, PolyError, RootSet};
use crate::rational::{RationalError, RationalFunction};
use crate::rhp::{census_bode, census_exact, open_loop_rhp_poles, BreakpointConfig, RhpError};

#[derive(Debug, Clone, thiserror::Error)]
pub enum VerdictError {
    #[error("orientation ambiguous: high-frequency slopes and magnitudes tie; force one")]
    Ambiguous,
    #[error("forced orientation names unknown subsystem id {0:?}")]
    UnknownForcedId(String),
    #[error("subsystem {0:?} has neither an exact model nor sampled data")]
    MissingModel(String),
    #[error("subsystem {id:?}: sampled data disagrees with the exact model at {f_hz} Hz ({mag_err_db:.3} dB, {phase_err_deg:.2} deg)")]
    ModelInconsistent { id: String, f_hz: f64, mag_err_db: f64, phase_err_deg: f64 },
    #[error("sampled analysis needs both subsystems sampled on one grid")]
    GridMismatch,
    #[error("hidden-mode risk: the two denominators share an RHP root near {root}")]
    HiddenModeRisk { root: Complex64 },
    #[error("impedance-sum precondition failed: {id:?} has {count} RHP pole(s)")]
    PreconditionRhpPoles { id: String, count: usize },
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Freq(#[from] FreqError),
    #[error(transparent)]
    Rhp(#[from] RhpError),
    #[error(transparent)]
    Encircle(#[from] EncircleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Stable => "STABLE",
            Verdict::Unstable => "UNSTABLE",
            Verdict::Marginal => "MARGINAL",
            Verdict::Indeterminate => "INDETERMINATE",
        };
        f.write_str(s)
    }
}

/// One side of the interconnection: an exact model, sampled data, or both.
#[derive(Debug, Clone)]
pub struct SubsystemModel {
    pub exact: Option<RationalFunction>,
    pub sampled: Option<SampledResponse>,
    pub kind: ResponseKind,
    pub id: String,
}

impl SubsystemModel {
    pub fn from_exact(rf: RationalFunction, kind: ResponseKind, id: impl Into<String>) -> Self {
        Self { exact: Some(rf), sampled: None, kind, id: id.into() }
    }

    pub fn from_sampled(sr: SampledResponse, kind: ResponseKind, id: impl Into<String>) -> Self {
        Self { exact: None, sampled: Some(sr), kind, id: id.into() }
    }

    /// Both representations; the sampled data must track the exact model
    /// within 0.1 dB and 1 degree on its own grid.
    pub fn from_both(
        rf: RationalFunction,
        sr: SampledResponse,
        kind: ResponseKind,
        id: impl Into<String>,
    ) -> Result<Self, VerdictError> {
        let id = id.into();
        for (f, v) in sr.points() {
            let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI * f);
            let m = rf.eval(s);
            let mag_err = 20.0 * (v.norm() / m.norm()).log10();
            let phase_err = crate::freq::wrap_deg(v.arg().to_degrees() - m.arg().to_degrees());
            if mag_err.abs() > 0.1 || phase_err.abs() > 1.0 {
                return Err(VerdictError::ModelInconsistent {
                    id,
                    f_hz: *f,
                    mag_err_db: mag_err,
                    phase_err_deg: phase_err,
                });
            }
        }
        Ok(Self { exact: Some(rf), sampled: Some(sr), kind, id })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationBasis {
    RelativeDegree,
    HfSlope,
    HfMagnitude,
    UserForced,
}

/// Which response sits on top of the ratio, and why.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RatioOrientation {
    pub numerator_id: String,
    pub denominator_id: String,
    pub basis: OrientationBasis,
    pub hf_slope_num_db_dec: f64,
    pub hf_slope_den_db_dec: f64,
}

/// Analysis knobs. Every field has a default good enough for zero-config use.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Evaluation grid for exact models; auto-derived from root magnitudes
    /// when absent. Sampled analyses always use the data's own grid.
    pub grid: Option<FrequencyGrid>,
    pub points_per_decade: usize,
    pub tol_deg: f64,
    pub axis_tol: f64,
    /// Subsystem id forced into the numerator.
    pub force_numerator: Option<String>,
    pub run_cross_checks: bool,
    pub breakpoints: BreakpointConfig,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            grid: None,
            points_per_decade: 400,
            tol_deg: 0.5,
            axis_tol: crate::poly::DEFAULT_AXIS_TOL,
            force_numerator: None,
            run_cross_checks: true,
            breakpoints: BreakpointConfig::default(),
        }
    }
}

/// Full evidence trail of one stability assessment.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub orientation: RatioOrientation,
    pub p_open_loop: usize,
    pub encirclements: EncirclementCount,
    pub crossings: Vec<Crossing>,
    pub exterior_regions: Vec<ExteriorRegion>,
    pub cross_checks: BTreeMap<String, Verdict>,
    pub evidence_notes: Vec<String>,
}

/// Chooses the proper ratio: strictly smaller high-frequency growth goes on
/// top, magnitudes break slope ties, and a full tie is an error the caller
/// resolves by forcing an orientation.
pub fn select_proper_ratio(
    a: &SubsystemModel,
    b: &SubsystemModel,
) -> Result<RatioOrientation, VerdictError> {
    match (&a.exact, &b.exact) {
        (Some(ra), Some(rb)) => {
            let slope = |r: &RationalFunction| {
                20.0 * (r.num().degree() as f64 - r.den().degree() as f64)
            };
            let (sa, sb) = (slope(ra), slope(rb));
            if ra.relative_degree() != rb.relative_degree() {
                let a_on_top = ra.relative_degree() > rb.relative_degree();
                return Ok(orient(a, b, a_on_top, OrientationBasis::RelativeDegree, sa, sb));
            }
            let lead = |p: &crate::poly::Polynomial| p.coeffs()[p.degree()];
            let la = (lead(ra.num()) / lead(ra.den())).abs();
            let lb = (lead(rb.num()) / lead(rb.den())).abs();
            if (la - lb).abs() <= 1e-12 * la.max(lb) {
                return Err(VerdictError::Ambiguous);
            }
            Ok(orient(a, b, la < lb, OrientationBasis::HfMagnitude, sa, sb))
        }
        _ => {
            let ba = top_decade(a)?;
            let bb = top_decade(b)?;
            let (sa, ma) = ba;
            let (sb, mb) = bb;
            if (sa - sb).abs() > 2.0 {
                Ok(orient(a, b, sa < sb, OrientationBasis::HfSlope, sa, sb))
            } else if (ma - mb).abs() > 0.01 {
                Ok(orient(a, b, ma < mb, OrientationBasis::HfMagnitude, sa, sb))
            } else {
                Err(VerdictError::Ambiguous)
            }
        }
    }
}

fn orient(
    a: &SubsystemModel,
    b: &SubsystemModel,
    a_on_top: bool,
    basis: OrientationBasis,
    slope_a: f64,
    slope_b: f64,
) -> RatioOrientation {
    let (num, den, sn, sd) = if a_on_top {
        (&a.id, &b.id, slope_a, slope_b)
    } else {
        (&b.id, &a.id, slope_b, slope_a)
    };
    RatioOrientation {
        numerator_id: num.clone(),
        denominator_id: den.clone(),
        basis,
        hf_slope_num_db_dec: sn,
        hf_slope_den_db_dec: sd,
    }
}

/// Top-decade magnitude slope (dB/dec) and mean magnitude (dB).
fn top_decade(m: &SubsystemModel) -> Result<(f64, f64), VerdictError> {
    let b = match (&m.sampled, &m.exact) {
        (Some(sr), _) => sr.bode(),
        (None, Some(rf)) => {
            let g = auto_grid_for(&[rf], 400)?;
            evaluate_response(rf, &g)?.bode()
        }
        (None, None) => return Err(VerdictError::MissingModel(m.id.clone())),
    };
    let f_top = *b.f_hz.last().expect("nonempty series");
    let lo = f_top / 10.0;
    let idx: Vec<usize> = (0..b.len()).filter(|&i| b.f_hz[i] >= lo).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| b.f_hz[i].log10()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| b.mag_db[i]).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - xm) * (y - ym);
        den += (x - xm) * (x - xm);
    }
    Ok((if den > 0.0 { num / den } else { 0.0 }, ym))
}

/// Grid spanning three decades beyond every finite root of the given models,
/// widened to at least the default 1 Hz - 100 kHz analysis band.
fn auto_grid_for(models: &[&RationalFunction], ppd: usize) -> Result<FrequencyGrid, VerdictError> {
    let mut lo = 1.0_f64;
    let mut hi = 1e5_f64;
    for rf in models {
        for p in [rf.num(), rf.den()] {
            if p.degree() == 0 {
                continue;
            }
            if let Ok(rs) = poly_roots(p) {
                for r in rs.roots.iter().filter(|r| r.norm() > 0.0) {
                    let f = r.norm() / (2.0 * std::f64::consts::PI);
                    lo = lo.min(f / 1000.0);
                    hi = hi.max(f * 1000.0);
                }
            }
        }
    }
    Ok(FrequencyGrid::new(lo.max(1e-7), hi.min(1e10), ppd)?)
}

/// Runs the full pipeline: orientation, RHP census, exterior regions,
/// crossings, the encirclement tally, and the verdict, with optional oracle
/// cross-checks when exact models are on hand.
pub fn assess_stability(
    a: &SubsystemModel,
    b: &SubsystemModel,
    opts: &AnalysisOptions,
) -> Result<StabilityReport, VerdictError> {
    let orientation = match &opts.force_numerator {
        Some(id) => {
            let a_on_top = if *id == a.id {
                true
            } else if *id == b.id {
                false
            } else {
                return Err(VerdictError::UnknownForcedId(id.clone()));
            };
            // keep the measured slopes for the record when obtainable
            let (sa, sb) = match select_proper_ratio(a, b) {
                Ok(o) if o.numerator_id == a.id => (o.hf_slope_num_db_dec, o.hf_slope_den_db_dec),
                Ok(o) => (o.hf_slope_den_db_dec, o.hf_slope_num_db_dec),
                Err(_) => (0.0, 0.0),
            };
            let mut o = orient(a, b, a_on_top, OrientationBasis::UserForced, sa, sb);
            o.basis = OrientationBasis::UserForced;
            o
        }
        None => select_proper_ratio(a, b)?,
    };
    let (num_m, den_m) = if orientation.numerator_id == a.id { (a, b) } else { (b, a) };

    let mut notes: Vec<String> = Vec::new();
    let mut marginal = false;
    let mut indeterminate = false;

    let exact_mode = num_m.exact.is_some() && den_m.exact.is_some();

    // open-loop RHP poles: numerator poles plus denominator zeros
    let (p_open_loop, num_census_poles) = if exact_mode {
        let cn = census_exact(num_m.exact.as_ref().expect("exact"), opts.axis_tol)?;
        let cd = census_exact(den_m.exact.as_ref().expect("exact"), opts.axis_tol)?;
        (open_loop_rhp_poles(&cn, &cd), cn.rhp_poles)
    } else {
        let bn = sampled_bode(num_m)?;
        let bd = sampled_bode(den_m)?;
        match (census_bode(&bn, &opts.breakpoints), census_bode(&bd, &opts.breakpoints)) {
            (Ok(cn), Ok(cd)) => (open_loop_rhp_poles(&cn, &cd), cn.rhp_poles),
            (r1, r2) => {
                for r in [&r1, &r2] {
                    if let Err(e) = r {
                        notes.push(format!("census undetermined: {e}"));
                    }
                }
                indeterminate = true;
                (0, 0)
            }
        }
    };
    if num_census_poles > 0 {
        notes.push(format!(
            "numerator subsystem {:?} itself has {num_census_poles} RHP pole(s)",
            orientation.numerator_id
        ));
    }

    // regions and crossings on the two responses, never the assembled ratio
    let (regions, crossings) = if exact_mode {
        let ra = num_m.exact.as_ref().expect("exact");
        let rb = den_m.exact.as_ref().expect("exact");
        let grid = match &opts.grid {
            Some(g) => g.clone(),
            None => auto_grid_for(&[ra, rb], opts.points_per_decade)?,
        };
        if ra.relative_degree() == rb.relative_degree() {
            let lead = |p: &crate::poly::Polynomial| p.coeffs()[p.degree()];
            let l = (lead(ra.num()) / lead(ra.den())) / (lead(rb.num()) / lead(rb.den()));
            if l <= -1.0 {
                notes.push(format!("ratio tends to {l:.6} at infinite frequency, on the critical ray"));
                marginal = true;
            }
        }
        let pair = ResponsePair::from_models(ra, rb, &grid)?;
        let regions = exterior_regions(&pair, 1e-9);
        match find_crossings(&pair, &regions, opts.tol_deg) {
            Ok(c) => (regions, c),
            Err(e) => {
                notes.push(format!("crossing analysis inconclusive: {e}"));
                marginal = true;
                (regions, Vec::new())
            }
        }
    } else {
        let bn = sampled_bode(num_m)?;
        let bd = sampled_bode(den_m)?;
        let pair = ResponsePair::from_series(&bn, &bd)?;
        let regions = exterior_regions(&pair, 1e-9);
        match find_crossings(&pair, &regions, opts.tol_deg) {
            Ok(c) => (regions, c),
            Err(e) => {
                notes.push(format!("crossing analysis inconclusive: {e}"));
                marginal = true;
                (regions, Vec::new())
            }
        }
    };

    let encirclements = count_encirclements(&crossings);
    let mut verdict = if marginal {
        Verdict::Marginal
    } else if indeterminate {
        Verdict::Indeterminate
    } else if encirclements.n == -(p_open_loop as i64) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };

    // oracle cross-checks on exact models
    let mut cross_checks = BTreeMap::new();
    if exact_mode && opts.run_cross_checks && !marginal && !indeterminate {
        let ra = num_m.exact.as_ref().expect("exact");
        let rb = den_m.exact.as_ref().expect("exact");
        let oracle_grid = match &opts.grid {
            Some(g) => g.clone(),
            None => auto_grid_for(&[ra, rb], 40)?,
        };
        match ra.div(rb) {
            Ok(ratio) => match winding_number_oracle(&ratio, &oracle_grid) {
                Ok(n_oracle) => {
                    let v = if n_oracle as i64 == -(p_open_loop as i64) {
                        Verdict::Stable
                    } else {
                        Verdict::Unstable
                    };
                    if n_oracle as i64 != encirclements.n {
                        notes.push(format!(
                            "winding oracle N = {n_oracle} disagrees with crossing tally N = {}",
                            encirclements.n
                        ));
                        verdict = Verdict::Indeterminate;
                    }
                    cross_checks.insert("winding_number_oracle".to_string(), v);
                }
                Err(e) => notes.push(format!("winding oracle unavailable: {e}")),
            },
            Err(e) => notes.push(format!("ratio not formable: {e}")),
        }
        match characteristic_roots_oracle(ra, rb, opts.axis_tol) {
            Ok(ch) => {
                if ch.verdict != verdict
                    && verdict != Verdict::Indeterminate
                    && ch.verdict != Verdict::Marginal
                {
                    notes.push(format!(
                        "characteristic-roots oracle says {} against rule verdict {}",
                        ch.verdict, verdict
                    ));
                    verdict = Verdict::Indeterminate;
                }
                cross_checks.insert("characteristic_roots_oracle".to_string(), ch.verdict);
            }
            Err(e) => notes.push(format!("characteristic-roots oracle unavailable: {e}")),
        }
    }

    Ok(StabilityReport {
        verdict,
        orientation,
        p_open_loop,
        encirclements,
        crossings,
        exterior_regions: regions,
        cross_checks,
        evidence_notes: notes,
    })
}

fn sampled_bode(m: &SubsystemModel) -> Result<BodeSeries, VerdictError> {
    match (&m.sampled, &m.exact) {
        (Some(sr), _) => Ok(sr.bode()),
        (None, Some(rf)) => {
            let g = auto_grid_for(&[rf], 400)?;
            Ok(evaluate_response(rf, &g)?.bode())
        }
        (None, None) => Err(VerdictError::MissingModel(m.id.clone())),
    }
}

/// Impedance-sum criterion result.
#[derive(Debug, Clone)]
pub struct SumCriterionReport {
    pub verdict: Verdict,
    pub rhp_zero_count: usize,
    /// Winding of the sum's trajectory around the origin, clockwise positive.
    pub origin_winding: Option<i32>,
}

/// Checks stability by counting RHP zeros of the uncancelled sum a + b.
/// Both terms must be individually stable or the criterion does not apply.
pub fn impedance_sum_criterion(
    a: &RationalFunction,
    b: &RationalFunction,
    axis_tol: f64,
) -> Result<SumCriterionReport, VerdictError> {
    for (rf, name) in [(a, "first"), (b, "second")] {
        let c = census_exact(rf, axis_tol)?;
        if c.rhp_poles > 0 {
            return Err(VerdictError::PreconditionRhpPoles {
                id: format!("{name} ({})", rf.label),
                count: c.rhp_poles,
            });
        }
    }
    let sum = a.add(b);
    let split = count_rhp_roots(sum.num(), axis_tol)?;
    let verdict = if split.rhp > 0 {
        Verdict::Unstable
    } else if split.on_axis > 0 {
        Verdict::Marginal
    } else {
        Verdict::Stable
    };
    let grid = auto_grid_for(&[&sum], 80).unwrap_or_else(|_| FrequencyGrid::default_analysis());
    let origin_winding = crate::encircle::winding_around_origin(&sum, &grid).ok();
    Ok(SumCriterionReport { verdict, rhp_zero_count: split.rhp, origin_winding })
}

/// Characteristic-roots result: the ground-truth root set and its verdict.
#[derive(Debug, Clone)]
pub struct CharRootsReport {
    pub roots: RootSet,
    pub verdict: Verdict,
    /// Denominator roots the two subsystems share (uncancelled common modes).
    pub shared_den_roots: Vec<Complex64>,
}

/// Roots of num(a) den(b) + num(b) den(a). Shared RHP denominator roots are
/// a hard error: a hidden unstable mode could cancel out of the terminal
/// responses entirely. Shared LHP or axis modes still appear in the root set
/// and are reported, not refused.
pub fn characteristic_roots_oracle(
    a: &RationalFunction,
    b: &RationalFunction,
    axis_tol: f64,
) -> Result<CharRootsReport, VerdictError> {
    let mut shared = Vec::new();
    if a.den().degree() > 0 && b.den().degree() > 0 {
        let ra = poly_roots(a.den())?;
        let rb = poly_roots(b.den())?;
        for r in &ra.roots {
            let tol = 1e-6 * r.norm().max(1.0);
            if rb.roots.iter().any(|q| (q - r).norm() <= tol) {
                shared.push(*r);
            }
        }
        let tol_axis = effective_axis_tol(axis_tol, &ra.roots);
        if let Some(bad) = shared.iter().find(|r| r.re > tol_axis) {
            return Err(VerdictError::HiddenModeRisk { root: *bad });
        }
    }
    let char_poly = a.num().mul(b.den()).add(&b.num().mul(a.den()));
    let roots = poly_roots(&char_poly)?;
    let tol = effective_axis_tol(axis_tol, &roots.roots);
    let rhp = roots.roots.iter().filter(|r| r.re > tol).count();
    let axis = roots.roots.iter().filter(|r| r.re.abs() <= tol).count();
    let verdict = if rhp > 0 {
        Verdict::Unstable
    } else if axis > 0 {
        Verdict::Marginal
    } else {
        Verdict::Stable
    };
    Ok(CharRootsReport { roots, verdict, shared_den_roots: shared })
}
