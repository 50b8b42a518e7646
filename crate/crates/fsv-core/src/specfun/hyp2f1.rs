use super::gamma::{gamma, rgamma};
use crate::error::{FsvError, Result};
use num_complex::Complex64 as C64;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 20_000;
const SERIES_RADIUS: f64 = 0.75;
// a - b closer than this to an integer makes the 1/z connection formula lose accuracy
const DEGENERATE_GAP: f64 = 1e-2;

fn is_nonpositive_integer(c: C64) -> bool {
    c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round()
}

fn near_integer(x: C64) -> bool {
    x.im.abs() < DEGENERATE_GAP && (x.re - x.re.round()).abs() < DEGENERATE_GAP
}

fn check(v: C64, what: &'static str) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(FsvError::NotFinite { what })
    }
}

/// Plain Gauss series, valid for |z| < 1.
pub fn series(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.norm() <= EPS * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        if term.re == 0.0 && term.im == 0.0 {
            return Ok(sum);
        }
    }
    Err(FsvError::NonConvergence { what: "2F1 series" })
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) on the principal branch
/// (cut along [1, ∞)).
pub fn hyp2f1(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    if is_nonpositive_integer(c) {
        return Err(FsvError::PoleAtC);
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        if z.re == 1.0 && (c - a - b).re > 0.0 {
            // Gauss summation
            let v = gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
            return check(v, "2F1 at z = 1");
        }
        return Err(FsvError::BranchCut { what: "2F1" });
    }
    let r = z.norm();
    if r <= SERIES_RADIUS {
        return check(series(a, b, c, z)?, "2F1 series");
    }
    let w = z / (z - 1.0);
    if w.norm() <= SERIES_RADIUS {
        let v = (1.0 - z).powc(-a) * series(a, c - b, c, w)?;
        return check(v, "2F1 Pfaff");
    }
    if r >= 1.0 / SERIES_RADIUS && !near_integer(a - b) {
        return check(inverse_z(a, b, c, z)?, "2F1 1/z");
    }
    check(continuation(a, b, c, z)?, "2F1 continuation")
}

/// The 1/z connection formula; requires a - b away from the integers.
fn inverse_z(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    let zi = 1.0 / z;
    let mz = -z;
    let t1 = gamma(c) * gamma(b - a) * rgamma(b) * rgamma(c - a)
        * mz.powc(-a)
        * series(a, a - c + 1.0, a - b + 1.0, zi)?;
    let t2 = gamma(c) * gamma(a - b) * rgamma(a) * rgamma(c - b)
        * mz.powc(-b)
        * series(b, b - c + 1.0, b - a + 1.0, zi)?;
    Ok(t1 + t2)
}

/// Analytic continuation by Taylor-stepping the hypergeometric ODE along the
/// ray from 0.5·z/|z| to z.
fn continuation(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    let dir = z / z.norm();
    let mut p = 0.5 * dir;
    let mut f = series(a, b, c, p)?;
    let mut df = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, p)?;
    let ab1 = a + b + 1.0;
    let ab = a * b;
    for _ in 0..10_000 {
        let remaining = z - p;
        let rem = remaining.norm();
        if rem == 0.0 {
            return Ok(f);
        }
        let radius = p.norm().min((1.0 - p).norm());
        let step = (0.5 * radius).min(rem);
        let h = remaining / rem * step;

        let p0 = p * (1.0 - p);
        let p1 = 1.0 - 2.0 * p;
        let q0 = c - ab1 * p;
        let mut ckm = f; // c_k
        let mut ck = df; // c_{k+1}
        let mut sum = f + df * h;
        let mut dsum = df;
        let mut hk = h; // h^{k+1}
        let mut small = 0;
        let mut converged = false;
        for k in 0..400usize {
            let kf = k as f64;
            let next = -((p1 * (kf * (kf + 1.0)) + q0 * (kf + 1.0)) * ck
                + (-(kf * (kf - 1.0)) - ab1 * kf - ab) * ckm)
                / (p0 * ((kf + 1.0) * (kf + 2.0)));
            dsum += next * hk * (kf + 2.0);
            hk *= h;
            let term = next * hk;
            sum += term;
            ckm = ck;
            ck = next;
            if term.norm() <= EPS * sum.norm() {
                small += 1;
                if small >= 3 {
                    converged = true;
                    break;
                }
            } else {
                small = 0;
            }
        }
        if !converged {
            return Err(FsvError::NonConvergence { what: "2F1 continuation" });
        }
        f = sum;
        df = dsum;
        p += h;
        if step == rem {
            return Ok(f);
        }
    }
    Err(FsvError::NonConvergence { what: "2F1 continuation" })
}
