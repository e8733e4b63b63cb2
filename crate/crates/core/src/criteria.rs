//! Forbidden-region stability criteria and classical margin extraction.
//!
//! All criteria run pointwise on two Bode series sharing one grid, with
//! violating samples merged into frequency intervals. Boundary equalities
//! count as violations: the forbidden regions are closed sets. Wrapped
//! phases in (-180, 180] throughout. These are sufficient conditions only,
//! and meaningless when the ratio has open-loop RHP poles; callers gate on
//! the census.

use crate::freq::{wrap_deg, BodeSeries};

/// Tolerance for the boundary touch at the low grid edge of the
/// necessary-and-sufficient check.
const NSSC_EDGE_TOL_DEG: f64 = 0.5;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CriteriaError {
    #[error("series are not on identical grids")]
    GridMismatch,
    #[error("classical margins are undefined with {0} open-loop RHP pole(s); use the full rule")]
    OpenLoopRhpPoles(usize),
    #[error("invalid criterion parameters: {0}")]
    InvalidSpec(String),
}

/// Gain/phase margins of the implied ratio.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Margins {
    /// Gain margin in dB; positive means the ratio clears the critical point.
    /// Infinite when the phase difference never touches +-180.
    pub gm_db: f64,
    /// Real-coordinate gain margin, 10^(GM/20).
    pub gm: f64,
    /// Phase margin in degrees; infinite with no unity-gain crossover.
    pub pm_deg: f64,
    pub gain_crossover_hz: Vec<f64>,
    pub phase_crossover_hz: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Middlebrook,
    SmallGain,
    Gmpm,
    Opac,
    Nssc,
    Mpc,
}

/// Parameters of one forbidden-region criterion.
#[derive(Debug, Clone, Copy)]
pub struct ForbiddenRegionSpec {
    pub kind: CriterionKind,
    /// Gain margin in dB (middlebrook, gmpm, opac; converted for mpc).
    pub gm_db: Option<f64>,
    /// Phase margin in degrees (gmpm only).
    pub pm_deg: Option<f64>,
    /// Maximum sensitivity peak (mpc); derivable from gm via Eq-style chain.
    pub ms: Option<f64>,
}

impl ForbiddenRegionSpec {
    pub fn middlebrook(gm_db: f64) -> Self {
        Self { kind: CriterionKind::Middlebrook, gm_db: Some(gm_db), pm_deg: None, ms: None }
    }
    pub fn small_gain() -> Self {
        Self { kind: CriterionKind::SmallGain, gm_db: None, pm_deg: None, ms: None }
    }
    pub fn gmpm(gm_db: f64, pm_deg: f64) -> Self {
        Self { kind: CriterionKind::Gmpm, gm_db: Some(gm_db), pm_deg: Some(pm_deg), ms: None }
    }
    pub fn opac(gm_db: f64) -> Self {
        Self { kind: CriterionKind::Opac, gm_db: Some(gm_db), pm_deg: None, ms: None }
    }
    pub fn nssc() -> Self {
        Self { kind: CriterionKind::Nssc, gm_db: None, pm_deg: None, ms: None }
    }
    pub fn mpc(ms: f64) -> Self {
        Self { kind: CriterionKind::Mpc, gm_db: None, pm_deg: None, ms: Some(ms) }
    }
    pub fn mpc_from_gm_db(gm_db: f64) -> Result<Self, CriteriaError> {
        let gm = 10.0_f64.powf(gm_db / 20.0);
        if gm <= 1.0 {
            return Err(CriteriaError::InvalidSpec(format!("gm = {gm} <= 1")));
        }
        Ok(Self::mpc(1.0 / (1.0 - 1.0 / gm)))
    }
}

/// One violating interval with the condition that tripped there.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Violation {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub which_condition: String,
}

/// Pass/fail of one criterion with the evidence.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub margins: Option<Margins>,
    /// OPAC's frequency-dependent angle arcsin|(1/gm) Z2/Z1|, advisory.
    pub opac_phi_deg: Vec<(f64, f64)>,
}

/// Forbidden-disc radius 1/Ms = 1 - 1/gm for a given real-coordinate gain
/// margin greater than 1.
pub fn mpc_radius(gm: f64) -> Result<f64, CriteriaError> {
    if !(gm > 1.0) {
        return Err(CriteriaError::InvalidSpec(format!("mpc needs gm > 1, got {gm}")));
    }
    Ok(1.0 - 1.0 / gm)
}

/// Flags samples where the ratio touches the critical ray: sample-exact
/// +-180 hits at unity-or-above magnitude, inter-sample crossings of an odd
/// multiple of 180, and the omega = 0 limit showing up as a near-boundary
/// lowest sample.
fn mark_ray_touches(mag: &[f64], ph: &[f64], phw: &[f64], flags: &mut [bool]) {
    let n = mag.len();
    for i in 0..n {
        if mag[i] >= 0.0 && (phw[i].abs() - 180.0).abs() < 1e-9 {
            flags[i] = true;
        }
    }
    for i in 0..n - 1 {
        let k0 = ((ph[i] - 180.0) / 360.0).floor();
        let k1 = ((ph[i + 1] - 180.0) / 360.0).floor();
        if k0 != k1 && mag[i] >= 0.0 && mag[i + 1] >= 0.0 {
            flags[i] = true;
            flags[i + 1] = true;
        }
    }
    if mag[0] >= 0.0 && phw[0].abs() >= 180.0 - NSSC_EDGE_TOL_DEG {
        flags[0] = true;
    }
}

fn check_grids(b1: &BodeSeries, b2: &BodeSeries) -> Result<(), CriteriaError> {
    if b1.len() != b2.len()
        || b1
            .f_hz
            .iter()
            .zip(b2.f_hz.iter())
            .any(|(a, b)| (a - b).abs() > 1e-9 * b.abs())
    {
        return Err(CriteriaError::GridMismatch);
    }
    Ok(())
}

/// Classical margins of the ratio b1/b2 from the two series. The caller must
/// have established that the ratio has no open-loop RHP poles.
pub fn compute_margins(
    b1: &BodeSeries,
    b2: &BodeSeries,
    p_open_loop: usize,
) -> Result<Margins, CriteriaError> {
    check_grids(b1, b2)?;
    if p_open_loop > 0 {
        return Err(CriteriaError::OpenLoopRhpPoles(p_open_loop));
    }
    let n = b1.len();
    let mag: Vec<f64> = (0..n).map(|i| b1.mag_db[i] - b2.mag_db[i]).collect();
    let ph: Vec<f64> = (0..n).map(|i| b1.phase_deg[i] - b2.phase_deg[i]).collect();

    // phase crossovers: the unwrapped difference passes an odd multiple of 180
    let mut phase_crossover_hz = Vec::new();
    let mut gm_db = f64::INFINITY;
    for i in 0..n - 1 {
        let k0 = ((ph[i] - 180.0) / 360.0).floor();
        let k1 = ((ph[i + 1] - 180.0) / 360.0).floor();
        if k0 != k1 {
            let target = 180.0 + 360.0 * k0.max(k1);
            let t = ((target - ph[i]) / (ph[i + 1] - ph[i])).clamp(0.0, 1.0);
            let f_c = b1.f_hz[i] + (b1.f_hz[i + 1] - b1.f_hz[i]) * t;
            let m_c = mag[i] + (mag[i + 1] - mag[i]) * t;
            phase_crossover_hz.push(f_c);
            gm_db = gm_db.min(-m_c);
        }
    }

    // gain crossovers: |ratio| passes 0 dB
    let mut gain_crossover_hz = Vec::new();
    let mut pm_deg = f64::INFINITY;
    for i in 0..n - 1 {
        if (mag[i] > 0.0) != (mag[i + 1] > 0.0) || mag[i] == 0.0 {
            let t = (0.0 - mag[i]) / (mag[i + 1] - mag[i]);
            let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
            let f_c = b1.f_hz[i] + (b1.f_hz[i + 1] - b1.f_hz[i]) * t;
            let p_c = ph[i] + (ph[i + 1] - ph[i]) * t;
            gain_crossover_hz.push(f_c);
            pm_deg = pm_deg.min(180.0 - wrap_deg(p_c).abs());
        }
    }

    let gm = 10.0_f64.powf(gm_db / 20.0);
    Ok(Margins { gm_db, gm, pm_deg, gain_crossover_hz, phase_crossover_hz })
}

/// Evaluates one forbidden-region criterion pointwise over the shared grid.
pub fn check_criterion(
    spec: &ForbiddenRegionSpec,
    b1: &BodeSeries,
    b2: &BodeSeries,
) -> Result<CriterionReport, CriteriaError> {
    check_grids(b1, b2)?;
    let n = b1.len();
    let mag: Vec<f64> = (0..n).map(|i| b1.mag_db[i] - b2.mag_db[i]).collect();
    let ph: Vec<f64> = (0..n).map(|i| b1.phase_deg[i] - b2.phase_deg[i]).collect();
    let phw: Vec<f64> = ph.iter().map(|p| wrap_deg(*p)).collect();

    let need_gm = |spec: &ForbiddenRegionSpec| -> Result<f64, CriteriaError> {
        let gm_db = spec
            .gm_db
            .ok_or_else(|| CriteriaError::InvalidSpec("GM_db required".into()))?;
        if gm_db <= 0.0 {
            return Err(CriteriaError::InvalidSpec(format!("GM_db = {gm_db} must be > 0")));
        }
        Ok(gm_db)
    };

    let mut flags = vec![false; n];
    let which;
    let mut opac_phi_deg = Vec::new();

    match spec.kind {
        CriterionKind::Middlebrook => {
            let gm_db = need_gm(spec)?;
            which = format!("mag ratio >= -{gm_db} dB");
            for i in 0..n {
                flags[i] = mag[i] >= -gm_db;
            }
        }
        CriterionKind::SmallGain => {
            which = String::from("mag ratio >= 0 dB");
            for i in 0..n {
                flags[i] = mag[i] >= 0.0;
            }
        }
        CriterionKind::Gmpm => {
            let gm_db = need_gm(spec)?;
            let pm = spec
                .pm_deg
                .ok_or_else(|| CriteriaError::InvalidSpec("PM_deg required".into()))?;
            if !(0.0..180.0).contains(&pm) {
                return Err(CriteriaError::InvalidSpec(format!("PM_deg = {pm}")));
            }
            which = format!("mag >= -{gm_db} dB and phase within {pm} deg of +-180");
            for i in 0..n {
                flags[i] = mag[i] >= -gm_db && phw[i].abs() >= 180.0 - pm;
            }
        }
        CriterionKind::Opac => {
            let gm_db = need_gm(spec)?;
            let gm = 10.0_f64.powf(gm_db / 20.0);
            which = format!("Re(ratio) <= -1/{gm:.4}");
            for i in 0..n {
                let r = 10.0_f64.powf(mag[i] / 20.0);
                flags[i] = r * phw[i].to_radians().cos() <= -1.0 / gm;
                let arg = (1.0 / gm) / r; // |(1/gm) Z2/Z1|
                if arg <= 1.0 {
                    opac_phi_deg.push((b1.f_hz[i], arg.asin().to_degrees()));
                }
            }
        }
        CriterionKind::Nssc => {
            which = String::from("mag >= 0 dB and phase difference = +-180");
            mark_ray_touches(&mag, &ph, &phw, &mut flags);
        }
        CriterionKind::Mpc => {
            let ms = spec
                .ms
                .ok_or_else(|| CriteriaError::InvalidSpec("Ms required".into()))?;
            if ms <= 1.0 {
                return Err(CriteriaError::InvalidSpec(format!("Ms = {ms} must be > 1")));
            }
            which = format!("|1 + ratio| <= 1/{ms:.4} or real-axis crossing beyond the disc");
            for i in 0..n {
                let r = 10.0_f64.powf(mag[i] / 20.0);
                let (s, c) = phw[i].to_radians().sin_cos();
                let dist = ((1.0 + r * c).powi(2) + (r * s).powi(2)).sqrt();
                flags[i] = dist <= 1.0 / ms;
            }
            // the disc only reaches the critical ray out to -1 - 1/Ms; a
            // trajectory crossing the ray beyond that still encircles, so
            // ray touches complete the sufficient condition
            mark_ray_touches(&mag, &ph, &phw, &mut flags);
        }
    }

    let mut violations = Vec::new();
    let mut i = 0;
    while i < n {
        if flags[i] {
            let mut j = i;
            while j + 1 < n && flags[j + 1] {
                j += 1;
            }
            violations.push(Violation {
                f_lo_hz: b1.f_hz[i],
                f_hi_hz: b1.f_hz[j],
                which_condition: which.clone(),
            });
            i = j + 1;
        } else {
            i += 1;
        }
    }

    Ok(CriterionReport {
        kind: spec.kind,
        pass: violations.is_empty(),
        violations,
        margins: compute_margins(b1, b2, 0).ok(),
        opac_phi_deg,
    })
}
