//! Paralleled grid-tied inverter case study: component admittances, parallel
//! aggregation, and the two operating scenarios.
//!
//! The inverter is an LCL-filtered voltage-source converter under
//! proportional-resonant grid-current control with a computation-plus-PWM
//! delay of 1.5 sampling periods. Its terminal admittance closes the current
//! loop around the filter admittances Y_o (output) and Y_m (control path):
//!
//!   Y_io = Y_o / (1 + G_c G_del Y_m)
//!
//! Y_o and Y_m share the LCL ladder denominator, so the loop closure reduces
//! to Y_io = n_o d_g / (d_o d_g + n_g n_m) with G_c G_del = n_g/d_g; building
//! it that way keeps the composition free of duplicated imaginary-axis
//! factors while remaining plain rational arithmetic.

use crate::freq::ResponseKind;
use crate::rational::{pade_delay, RationalError, RationalFunction};
use crate::verdict::SubsystemModel;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} = {value} out of range ({requirement})")]
    BadParameter { name: &'static str, value: f64, requirement: &'static str },
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// LCL inverter with PR current control.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct InverterParams {
    /// Converter-side filter inductance, H.
    pub l1: f64,
    /// Grid-side filter inductance, H.
    pub l2: f64,
    /// Filter capacitance, F.
    pub cf: f64,
    /// Proportional gain of the current controller.
    pub kp: f64,
    /// Resonant gain of the current controller.
    pub kr: f64,
    /// Fundamental angular frequency, rad/s.
    pub omega1: f64,
    /// Resonance bandwidth term of the controller, rad/s.
    pub omega_c: f64,
    /// Sampling (= switching) frequency, Hz.
    pub fs: f64,
    /// DC-link voltage, V. Recorded only; the small-signal admittance does
    /// not depend on it.
    pub vdc: f64,
}

impl InverterParams {
    /// Computation plus modulation delay, 1.5 sampling periods.
    pub fn delay_s(&self) -> f64 {
        1.5 / self.fs
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("l1", self.l1),
            ("l2", self.l2),
            ("cf", self.cf),
            ("kp", self.kp),
            ("kr", self.kr),
            ("omega1", self.omega1),
            ("omega_c", self.omega_c),
            ("fs", self.fs),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::BadParameter { name, value, requirement: "> 0" });
            }
        }
        Ok(())
    }
}

/// Inductive grid with shunt capacitance at the connection point.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct GridParams {
    pub lg: f64,
    pub cg: f64,
    /// Line-to-line RMS grid voltage, V; recorded only.
    pub vgrms_ll: f64,
}

/// Series R-L load.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct LoadParams {
    pub rd: f64,
    pub ld: f64,
}

/// Which operating scenario: the load switch open (I) or closed (II).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Scenario {
    I,
    II,
}

/// Full case-study parameter set: two inverters (identical by default),
/// grid, and load.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub inverter1: InverterParams,
    pub inverter2: InverterParams,
    pub grid: GridParams,
    pub load: LoadParams,
}

impl ScenarioSpec {
    /// The benchmark parameter set: 730 V DC link, 400 V line-to-line grid,
    /// Lg = 1 mH, Cg = 2 uF, Rd = 10 Ohm, Ld = 1 mH, L1 = 1.8 mH,
    /// L2 = 0.9 mH, Cf = 10 uF, Kp = 8, Kr = 500, fs = 10 kHz,
    /// omega_c = 3.14 rad/s, omega1 = 2 pi 50 rad/s.
    pub fn benchmark(scenario: Scenario) -> Self {
        let inv = InverterParams {
            l1: 1.8e-3,
            l2: 0.9e-3,
            cf: 10e-6,
            kp: 8.0,
            kr: 500.0,
            omega1: 2.0 * std::f64::consts::PI * 50.0,
            omega_c: 3.14,
            fs: 10e3,
            vdc: 730.0,
        };
        Self {
            scenario,
            inverter1: inv,
            inverter2: inv,
            grid: GridParams { lg: 1e-3, cg: 2e-6, vgrms_ll: 400.0 },
            load: LoadParams { rd: 10.0, ld: 1e-3 },
        }
    }
}

/// Closed-loop terminal admittance of one inverter.
pub fn inverter_admittance(p: &InverterParams) -> Result<RationalFunction, ModelError> {
    p.validate()?;
    // LCL ladder with ideal elements, fractions cleared by s Cf:
    //   Y_o = (L1 Cf s^2 + 1) / (L1 L2 Cf s^3 + (L1 + L2) s),  Y_m = 1 / same
    let n_o = RationalFunction::from_coeffs(&[1.0, 0.0, p.l1 * p.cf], &[1.0], "n_o")?;
    let d_o = RationalFunction::from_coeffs(
        &[0.0, p.l1 + p.l2, 0.0, p.l1 * p.l2 * p.cf],
        &[1.0],
        "d_o",
    )?;
    let n_m = RationalFunction::constant(1.0);

    // PR controller Kp + 2 Kr wc s / (s^2 + 2 wc s + w1^2)
    let g_c = RationalFunction::from_coeffs(&[p.kp], &[1.0], "Kp")?.add(
        &RationalFunction::from_coeffs(
            &[0.0, 2.0 * p.kr * p.omega_c],
            &[p.omega1 * p.omega1, 2.0 * p.omega_c, 1.0],
            "resonant",
        )?,
    );
    let g_del = pade_delay(p.delay_s())?;
    let g = g_c.mul(&g_del);

    // loop closure against the shared ladder denominator
    let y_io = n_o.div(&d_o.add(&g.mul(&n_m)))?;
    Ok(y_io.with_label("Y_io"))
}

/// Grid admittance s Cg + 1/(s Lg).
pub fn grid_admittance(p: &GridParams) -> Result<RationalFunction, ModelError> {
    if !(p.lg > 0.0) {
        return Err(ModelError::BadParameter { name: "lg", value: p.lg, requirement: "> 0" });
    }
    if !(p.cg >= 0.0) {
        return Err(ModelError::BadParameter { name: "cg", value: p.cg, requirement: ">= 0" });
    }
    let shunt = RationalFunction::from_coeffs(&[0.0, p.cg], &[1.0], "sCg")?;
    let series = RationalFunction::from_coeffs(&[1.0], &[0.0, p.lg], "1/sLg")?;
    Ok(shunt.add(&series).with_label("Y_g"))
}

/// Load admittance 1/(Rd + s Ld).
pub fn load_admittance(p: &LoadParams) -> Result<RationalFunction, ModelError> {
    if !(p.rd > 0.0) {
        return Err(ModelError::BadParameter { name: "rd", value: p.rd, requirement: "> 0" });
    }
    if !(p.ld >= 0.0) {
        return Err(ModelError::BadParameter { name: "ld", value: p.ld, requirement: ">= 0" });
    }
    Ok(RationalFunction::from_coeffs(&[1.0], &[p.rd, p.ld], "Y_d")?)
}

/// Uncancelled sum of paralleled admittances.
pub fn aggregate_parallel(admittances: &[RationalFunction]) -> Option<RationalFunction> {
    let (first, rest) = admittances.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, y| acc.add(y)))
}

/// Builds the two subsystem admittances of a scenario. One subsystem is
/// inverter 1 aggregated with the grid (Y_to2); the other is inverter 2,
/// plus the load in scenario II (Y_to1).
pub fn build_scenario(spec: &ScenarioSpec) -> Result<(SubsystemModel, SubsystemModel), ModelError> {
    let y_io1 = inverter_admittance(&spec.inverter1)?;
    let y_io2 = inverter_admittance(&spec.inverter2)?;
    let y_g = grid_admittance(&spec.grid)?;
    let y_to2 = y_io1.add(&y_g).with_label("Y_to2");
    let y_to1 = match spec.scenario {
        Scenario::I => y_io2.with_label("Y_to1"),
        Scenario::II => {
            let y_d = load_admittance(&spec.load)?;
            y_io2.add(&y_d).with_label("Y_to1")
        }
    };
    Ok((
        SubsystemModel::from_exact(y_to1, ResponseKind::Admittance, "Y_to1"),
        SubsystemModel::from_exact(y_to2, ResponseKind::Admittance, "Y_to2"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{count_rhp_roots, poly_roots};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn bench(s: Scenario) -> ScenarioSpec {
        ScenarioSpec::benchmark(s)
    }

    #[test]
    fn load_admittance_at_dc() {
        let y = load_admittance(&bench(Scenario::I).load).unwrap();
        let v = y.eval(Complex64::new(0.0, 0.0));
        assert_relative_eq!(v.re, 0.1);
    }

    #[test]
    fn grid_admittance_structure() {
        let y = grid_admittance(&bench(Scenario::I).grid).unwrap();
        // (2e-9 s^2 + 1)/(1e-3 s): pole at 0, zeros at +-j 22360.7 rad/s
        assert_eq!(y.num().degree(), 2);
        assert_eq!(y.den().degree(), 1);
        let zeros = poly_roots(y.num()).unwrap();
        let w = 1.0 / (1e-3_f64 * 2e-6).sqrt();
        for z in &zeros.roots {
            assert_relative_eq!(z.im.abs(), w, max_relative = 1e-9);
            assert!(z.re.abs() < 1e-6 * w);
        }
        assert_relative_eq!(w / (2.0 * PI), 3558.8, epsilon = 0.1);
    }

    #[test]
    fn inverter_admittance_composition_degrees() {
        // symbolic composition with the order-3 delay: degrees 7 over 8
        let y = inverter_admittance(&bench(Scenario::I).inverter1).unwrap();
        assert_eq!(y.num().degree(), 7);
        assert_eq!(y.den().degree(), 8);
    }

    #[test]
    fn inverter_admittance_has_no_rhp_features() {
        let y = inverter_admittance(&bench(Scenario::I).inverter1).unwrap();
        assert_eq!(count_rhp_roots(y.den(), 1e-6).unwrap().rhp, 0);
        assert_eq!(count_rhp_roots(y.num(), 1e-6).unwrap().rhp, 0);
    }

    #[test]
    fn aggregated_grid_side_admittance_has_four_rhp_zeros() {
        // the anti-resonances sit near 1432.9 Hz and 5324.4 Hz
        let spec = bench(Scenario::I);
        let y_io = inverter_admittance(&spec.inverter1).unwrap();
        let y_g = grid_admittance(&spec.grid).unwrap();
        let y_to2 = aggregate_parallel(&[y_io, y_g]).unwrap();
        assert_eq!(y_to2.num().degree(), 10);
        assert_eq!(y_to2.den().degree(), 9);
        let split = count_rhp_roots(y_to2.num(), 1e-6).unwrap();
        assert_eq!(split.rhp, 4);
        assert_eq!(split.on_axis, 0);
        let roots = poly_roots(y_to2.num()).unwrap();
        let mut f_r: Vec<f64> = roots
            .roots
            .iter()
            .filter(|r| r.re > 1.0 && r.im > 0.0)
            .map(|r| r.im / (2.0 * PI))
            .collect();
        f_r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(f_r[0], 1432.9, epsilon = 0.5);
        assert_relative_eq!(f_r[1], 5324.4, epsilon = 0.5);
    }

    #[test]
    fn single_element_aggregation_is_identity() {
        let y = load_admittance(&bench(Scenario::I).load).unwrap();
        let agg = aggregate_parallel(std::slice::from_ref(&y)).unwrap();
        assert_eq!(agg.num(), y.num());
        assert_eq!(agg.den(), y.den());
    }

    #[test]
    fn grid_plus_load_dc_dominated_by_inductor() {
        let spec = bench(Scenario::I);
        let y = aggregate_parallel(&[
            grid_admittance(&spec.grid).unwrap(),
            load_admittance(&spec.load).unwrap(),
        ])
        .unwrap();
        // integrator pole survives at the origin
        assert!(y.den().origin_multiplicity() >= 1);
        let v = y.eval(Complex64::new(0.0, 2.0 * PI * 1e-3));
        assert!(v.norm() > 1e3);
    }

    #[test]
    fn bad_parameters_rejected() {
        let mut p = bench(Scenario::I).inverter1;
        p.l1 = 0.0;
        assert!(matches!(
            inverter_admittance(&p),
            Err(ModelError::BadParameter { name: "l1", .. })
        ));
    }
}
