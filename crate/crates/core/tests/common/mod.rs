//! Deterministic random-system generators shared by the test suites.

use bodestab::poly::Polynomial;
use bodestab::rational::RationalFunction;
use num_complex::Complex64;
use rand::Rng;

/// One synthetic break for census-suite systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthBreak {
    pub f_hz: f64,
    pub order: usize,
    pub is_pole: bool,
    pub is_rhp: bool,
    pub zeta: f64,
}

/// Polynomial with the given real or conjugate factor appended.
fn push_factor(p: Polynomial, w: f64, order: usize, rhp: bool, zeta: f64) -> Polynomial {
    let sign = if rhp { 1.0 } else { -1.0 };
    let factor = if order == 1 {
        // (s -+ w)
        Polynomial::new(vec![-sign * w, 1.0]).unwrap()
    } else {
        // s^2 -+ 2 zeta w s + w^2
        Polynomial::new(vec![w * w, -sign * 2.0 * zeta * w, 1.0]).unwrap()
    };
    p.mul(&factor)
}

/// Random rational with well-separated breaks, suitable for the census
/// heuristic: break frequencies at least `min_sep_dec` apart, damping in
/// [0.2, 1], no imaginary-axis features, positive gain.
pub fn random_break_system<R: Rng>(
    rng: &mut R,
    n_breaks: usize,
    f_lo: f64,
    f_hi: f64,
    min_sep_dec: f64,
) -> (RationalFunction, Vec<SynthBreak>) {
    let mut freqs: Vec<f64>;
    loop {
        freqs = (0..n_breaks)
            .map(|_| 10.0_f64.powf(rng.gen_range(f_lo.log10()..f_hi.log10())))
            .collect();
        freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ok = freqs
            .windows(2)
            .all(|w| (w[1] / w[0]).log10() >= min_sep_dec);
        if ok {
            break;
        }
    }
    let mut num = Polynomial::one();
    let mut den = Polynomial::one();
    let mut breaks = Vec::new();
    for f in freqs {
        let order = if rng.gen_bool(0.5) { 1 } else { 2 };
        let is_pole = rng.gen_bool(0.5);
        let is_rhp = rng.gen_bool(0.5);
        let zeta = rng.gen_range(0.2..1.0);
        let w = 2.0 * std::f64::consts::PI * f;
        if is_pole {
            den = push_factor(den, w, order, is_rhp, zeta);
        } else {
            num = push_factor(num, w, order, is_rhp, zeta);
        }
        breaks.push(SynthBreak { f_hz: f, order, is_pole, is_rhp, zeta });
    }
    let k = rng.gen_range(0.2..5.0);
    num = num.scale(k);
    let rf = RationalFunction::new(num, den, "synthetic").unwrap();
    (rf, breaks)
}

/// Random subsystem with no RHP poles and no imaginary-axis features:
/// left-half-plane poles only, zeros on either side. Break magnitudes are
/// log-uniform over [1, 1e4] rad/s.
pub fn random_stable_subsystem<R: Rng>(rng: &mut R, label: &str) -> RationalFunction {
    let deg_den = rng.gen_range(1..=4usize);
    let deg_num = rng.gen_range(0..=deg_den);
    let rand_w = |rng: &mut R| 10.0_f64.powf(rng.gen_range(0.0..4.0));
    let mut den = Polynomial::one();
    let mut left = deg_den;
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.4) {
            den = push_factor(den, rand_w(rng), 2, false, rng.gen_range(0.15..1.2));
            left -= 2;
        } else {
            den = push_factor(den, rand_w(rng), 1, false, 1.0);
            left -= 1;
        }
    }
    let mut num = Polynomial::one();
    left = deg_num;
    while left > 0 {
        let rhp = rng.gen_bool(0.35);
        if left >= 2 && rng.gen_bool(0.4) {
            num = push_factor(num, rand_w(rng), 2, rhp, rng.gen_range(0.15..1.2));
            left -= 2;
        } else {
            num = push_factor(num, rand_w(rng), 1, rhp, 1.0);
            left -= 1;
        }
    }
    let k = if rng.gen_bool(0.12) { -1.0 } else { 1.0 } * rng.gen_range(0.2..5.0);
    RationalFunction::new(num.scale(k), den, label).unwrap()
}

/// Random proper ratio: poles anywhere off the imaginary axis, numerator
/// degree no greater than denominator degree.
pub fn random_proper_ratio<R: Rng>(rng: &mut R) -> RationalFunction {
    let deg_den = rng.gen_range(1..=6usize);
    let deg_num = rng.gen_range(0..=deg_den);
    let rand_w = |rng: &mut R| 10.0_f64.powf(rng.gen_range(0.0..4.0));
    let mut build = |deg: usize, rng: &mut R| {
        let mut p = Polynomial::one();
        let mut left = deg;
        while left > 0 {
            let rhp = rng.gen_bool(0.3);
            if left >= 2 && rng.gen_bool(0.4) {
                p = push_factor(p, rand_w(rng), 2, rhp, rng.gen_range(0.15..1.2));
                left -= 2;
            } else {
                p = push_factor(p, rand_w(rng), 1, rhp, 1.0);
                left -= 1;
            }
        }
        p
    };
    let den = build(deg_den, rng);
    let mut num = build(deg_num, rng);
    let mut k: f64 = if rng.gen_bool(0.3) { -1.0 } else { 1.0 } * rng.gen_range(0.2..5.0);
    if deg_num == deg_den {
        // keep 1 + ratio away from a vanishing closure point
        while (k + 1.0).abs() < 0.2 {
            k = if rng.gen_bool(0.5) { -1.0 } else { 1.0 } * rng.gen_range(0.2..5.0);
        }
    }
    num = num.scale(k);
    RationalFunction::new(num, den, "ratio").unwrap()
}

/// Evaluates a rational at j 2 pi f.
pub fn at(rf: &RationalFunction, f_hz: f64) -> Complex64 {
    rf.eval(Complex64::new(0.0, 2.0 * std::f64::consts::PI * f_hz))
}
