use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: C64) -> C64 {
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    x
}

/// Complex gamma function. Poles return an infinite or NaN value; use
/// [`rgamma`] when the argument may sit on a pole.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// Reciprocal gamma, entire: exactly zero at the non-positive integers.
pub fn rgamma(z: C64) -> C64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return C64::new(0.0, 0.0);
        }
        (PI * z).sin() * gamma(1.0 - z) / PI
    } else {
        1.0 / gamma(z)
    }
}

/// Real gamma function.
pub fn gamma_r(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_r(1.0 - x))
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        let mut s = LANCZOS[0];
        for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
            s += p / (z + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * s
    }
}

/// Natural log of the real gamma function for x > 0.
pub fn ln_gamma_r(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma_r(1.0 - x)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        let mut s = LANCZOS[0];
        for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
            s += p / (z + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + s.ln()
    }
}
