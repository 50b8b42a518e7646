use crate::error::{FsvError, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

// coefficients B_n/(n+1)! of the Bernoulli expansion in u = -ln(1-z)
const BF: [f64; 10] = [
    -1.0 / 4.0,
    1.0 / 36.0,
    -1.0 / 3600.0,
    1.0 / 211_680.0,
    -1.0 / 10_886_400.0,
    1.0 / 526_901_760.0,
    -4.064_761_645_144_225_5e-11,
    8.921_691_020_456_453e-13,
    -1.993_929_586_072_107_6e-14,
    4.518_980_029_619_918e-16,
];

fn bernoulli_series(u: C64) -> C64 {
    let u2 = u * u;
    let mut acc = C64::new(BF[9], 0.0);
    for &b in BF[2..9].iter().rev() {
        acc = b + u2 * acc;
    }
    u + u2 * (BF[0] + u * (BF[1] + u2 * acc))
}

/// Dilogarithm Li₂(z) on the principal branch (cut along (1, ∞)).
pub fn dilog(z: C64) -> Result<C64> {
    if z.im == 0.0 {
        if z.re > 1.0 {
            return Err(FsvError::BranchCut { what: "dilogarithm" });
        }
        if z.re == 1.0 {
            return Ok(C64::new(PI * PI / 6.0, 0.0));
        }
    }
    let nz = z.norm_sqr();
    if nz < 1e-32 {
        return Ok(z);
    }
    let inverted = |z: C64| {
        let lz = (-z).ln();
        -bernoulli_series(-(1.0 - 1.0 / z).ln()) - 0.5 * lz * lz - PI * PI / 6.0
    };
    let v = if z.re <= 0.5 {
        if nz > 1.0 {
            inverted(z)
        } else {
            bernoulli_series(-(1.0 - z).ln())
        }
    } else if nz <= 2.0 * z.re {
        let u = -z.ln();
        -bernoulli_series(u) + u * (1.0 - z).ln() + PI * PI / 6.0
    } else {
        inverted(z)
    };
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(FsvError::NotFinite { what: "dilogarithm" })
    }
}
