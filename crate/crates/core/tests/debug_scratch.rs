//! Temporary diagnostics; removed before release.
mod common;

use bodestab::criteria::{check_criterion, ForbiddenRegionSpec};
use bodestab::freq::{evaluate_response, FrequencyGrid};
use bodestab::rhp::{census_bode, census_exact, identify_breakpoints, BreakpointConfig};
use bodestab::verdict::{
    assess_stability, characteristic_roots_oracle, AnalysisOptions, SubsystemModel, Verdict,
};
use bodestab::ResponseKind;
use common::{at, random_break_system, random_stable_subsystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn debug_census_trial() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    for trial in 0..5 {
        let n_breaks = rng.gen_range(1..=4usize);
        let (rf, breaks) = random_break_system(&mut rng, n_breaks, 1.0, 1e5, 1.0);
        if trial != 1 {
            continue;
        }
        println!("trial {trial} true breaks:");
        for b in &breaks {
            println!("  f={:.2} order={} pole={} rhp={} zeta={:.3}", b.f_hz, b.order, b.is_pole, b.is_rhp, b.zeta);
        }
        let grid = FrequencyGrid::new(10.0_f64.powf(-1.5), 10.0_f64.powf(6.5), 240).unwrap();
        let bode = evaluate_response(&rf, &grid).unwrap().bode();
        let det = identify_breakpoints(&bode, &BreakpointConfig::default()).unwrap();
        println!("detected:");
        for d in &det {
            println!(
                "  f={:.2} kind={:?} hp={:?} ds={:.2} dp={:.2} zeta={:?}",
                d.f_b_hz, d.kind, d.half_plane, d.slope_change_db_dec, d.phase_step_deg, d.zeta_est
            );
        }
        let ex = census_exact(&rf, 1e-6).unwrap();
        println!("exact: zeros={} poles={}", ex.rhp_zeros, ex.rhp_poles);
        match census_bode(&bode, &BreakpointConfig::default()) {
            Ok(c) => println!("census: zeros={} poles={}", c.rhp_zeros, c.rhp_poles),
            Err(e) => println!("census error: {e}"),
        }
    }
}

#[test]
#[ignore]
fn debug_nssc_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let opts = AnalysisOptions { run_cross_checks: false, ..AnalysisOptions::default() };
    for trial in 0..500 {
        let a = random_stable_subsystem(&mut rng, "a");
        let b = random_stable_subsystem(&mut rng, "b");
        let ma = SubsystemModel::from_exact(a.clone(), ResponseKind::Impedance, "a");
        let mb = SubsystemModel::from_exact(b.clone(), ResponseKind::Impedance, "b");
        let report = match assess_stability(&ma, &mb, &opts) {
            Ok(r) if !matches!(r.verdict, Verdict::Marginal | Verdict::Indeterminate) => r,
            _ => continue,
        };
        if report.p_open_loop != 0 {
            continue;
        }
        let oracle = characteristic_roots_oracle(&a, &b, 1e-6).unwrap();
        if oracle.verdict == Verdict::Marginal {
            continue;
        }
        let (num, den) = if report.orientation.numerator_id == "a" { (&a, &b) } else { (&b, &a) };
        let grid = FrequencyGrid::new(1e-4, 1e7, 200).unwrap();
        let b1 = evaluate_response(num, &grid).unwrap().bode();
        let b2 = evaluate_response(den, &grid).unwrap().bode();
        let nssc = check_criterion(&ForbiddenRegionSpec::nssc(), &b1, &b2).unwrap();
        if nssc.pass != (oracle.verdict == Verdict::Stable) {
            println!("trial {trial}: nssc pass={} oracle={:?} P={} N={}", nssc.pass, oracle.verdict, report.p_open_loop, report.encirclements.n);
            println!("  num: {:?} / {:?}", num.num().coeffs(), num.den().coeffs());
            println!("  den: {:?} / {:?}", den.num().coeffs(), den.den().coeffs());
            let r0 = at(num, 1e-12) / at(den, 1e-12);
            println!("  ratio at DC-ish: {r0}");
            println!("  crossings: {:?}", report.crossings);
            println!("  regions: {:?}", report.exterior_regions);
            break;
        }
    }
}

#[test]
#[ignore]
fn debug_conj_pole_alone() {
    use bodestab::poly::Polynomial;
    use bodestab::rational::RationalFunction;
    // isolate: RHP conj pole zeta=0.934 at 1525.85 Hz, alone and with the zero
    let w = 2.0 * std::f64::consts::PI * 1525.85;
    let zeta = 0.934;
    let den = Polynomial::new(vec![w * w, -2.0 * zeta * w, 1.0]).unwrap();
    let rf = RationalFunction::new(Polynomial::one(), den.clone(), "p").unwrap();
    for (name, rf) in [
        ("pole alone", rf),
        ("pole + rhp conj zero", {
            let wz = 2.0 * std::f64::consts::PI * 20542.9;
            let num = Polynomial::new(vec![wz * wz, -2.0 * 0.317 * wz, 1.0]).unwrap();
            RationalFunction::new(num, den.clone(), "pz").unwrap()
        }),
        ("pole + rhp real pole", {
            let wp = 2.0 * std::f64::consts::PI * 32.45;
            let d2 = den.mul(&Polynomial::new(vec![-wp, 1.0]).unwrap());
            RationalFunction::new(Polynomial::one(), d2, "pp").unwrap()
        }),
    ] {
        let grid = FrequencyGrid::new(1.0, 1e7, 240).unwrap();
        let bode = evaluate_response(&rf, &grid).unwrap().bode();
        let det = identify_breakpoints(&bode, &BreakpointConfig::default()).unwrap();
        println!("{name}:");
        for d in &det {
            println!(
                "  f={:.1} kind={:?} hp={:?} ds={:.2} dp={:.2} zeta={:?}",
                d.f_b_hz, d.kind, d.half_plane, d.slope_change_db_dec, d.phase_step_deg, d.zeta_est
            );
        }
    }
}

#[test]
#[ignore]
fn debug_raw_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    let mut sys = None;
    for trial in 0..2 {
        let n_breaks = rng.gen_range(1..=4usize);
        let (rf, breaks) = random_break_system(&mut rng, n_breaks, 1.0, 1e5, 1.0);
        if trial == 1 {
            sys = Some((rf, breaks));
        }
    }
    let (rf, _) = sys.unwrap();
    println!("num: {:?}", rf.num().coeffs());
    println!("den: {:?}", rf.den().coeffs());
    let grid = FrequencyGrid::new(10.0_f64.powf(-1.5), 10.0_f64.powf(6.5), 240).unwrap();
    let b = evaluate_response(&rf, &grid).unwrap().bode();
    println!("ambiguous steps: {:?}", b.ambiguous_steps.iter().map(|i| b.f_hz[*i]).collect::<Vec<_>>());
    for target in [100.0, 482.0, 1525.0, 4824.0, 10000.0, 20543.0, 64000.0, 200000.0] {
        let i = b.f_hz.iter().position(|f| *f >= target).unwrap();
        println!("f={:9.1}  mag={:8.2} dB  phase_unwrapped={:9.2}  principal={:8.2}",
            b.f_hz[i], b.mag_db[i], b.phase_deg[i],
            bodestab::freq::wrap_deg(b.phase_deg[i]));
    }
    // analytic phases at two probe points around 1525 Hz
    for f in [482.4, 4824.0] {
        let v = at(&rf, f);
        println!("analytic at {f}: arg = {:.2}", v.arg().to_degrees());
    }
}

#[test]
#[ignore]
fn debug_nssc_two_sided() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let opts = AnalysisOptions { run_cross_checks: false, ..AnalysisOptions::default() };
    for trial in 0..500 {
        let a = random_stable_subsystem(&mut rng, "a");
        let b = random_stable_subsystem(&mut rng, "b");
        let ma = SubsystemModel::from_exact(a.clone(), ResponseKind::Impedance, "a");
        let mb = SubsystemModel::from_exact(b.clone(), ResponseKind::Impedance, "b");
        let report = match assess_stability(&ma, &mb, &opts) {
            Ok(r) if !matches!(r.verdict, Verdict::Marginal | Verdict::Indeterminate) => r,
            _ => continue,
        };
        if report.p_open_loop != 0 {
            continue;
        }
        let oracle = characteristic_roots_oracle(&a, &b, 1e-6).unwrap();
        if oracle.verdict == Verdict::Marginal {
            continue;
        }
        let (num, den) = if report.orientation.numerator_id == "a" { (&a, &b) } else { (&b, &a) };
        let grid = FrequencyGrid::new(1e-4, 1e7, 200).unwrap();
        let b1 = evaluate_response(num, &grid).unwrap().bode();
        let b2 = evaluate_response(den, &grid).unwrap().bode();
        let nssc = check_criterion(&ForbiddenRegionSpec::nssc(), &b1, &b2).unwrap();
        if nssc.pass != (oracle.verdict == Verdict::Stable) {
            println!(
                "trial {trial}: nssc.pass={} oracle={} N={} crossings={}",
                nssc.pass, oracle.verdict, report.encirclements.n, report.crossings.len()
            );
            for c in &report.crossings {
                println!("  crossing at {:.3} Hz kind {:?} at_zero {}", c.f_hz, c.kind, c.at_zero);
            }
            println!("  violations: {:?}", nssc.violations.iter().map(|v| (v.f_lo_hz, v.f_hi_hz)).collect::<Vec<_>>());
        }
    }
    println!("done");
}

#[test]
#[ignore]
fn debug_census_trial28() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    for trial in 0..=28 {
        let n_breaks = rng.gen_range(1..=4usize);
        let (rf, breaks) = random_break_system(&mut rng, n_breaks, 1.0, 1e5, 1.0);
        if trial != 28 {
            continue;
        }
        println!("trial {trial} true breaks:");
        for b in &breaks {
            println!("  f={:.2} order={} pole={} rhp={} zeta={:.3}", b.f_hz, b.order, b.is_pole, b.is_rhp, b.zeta);
        }
        let grid = FrequencyGrid::new(10.0_f64.powf(-1.5), 10.0_f64.powf(6.5), 240).unwrap();
        let bode = evaluate_response(&rf, &grid).unwrap().bode();
        let det = identify_breakpoints(&bode, &BreakpointConfig::default()).unwrap();
        println!("detected:");
        for d in &det {
            println!(
                "  f={:.1} kind={:?} hp={:?} ds={:.2} dp={:.2} zeta={:?}",
                d.f_b_hz, d.kind, d.half_plane, d.slope_change_db_dec, d.phase_step_deg, d.zeta_est
            );
        }
    }
}
