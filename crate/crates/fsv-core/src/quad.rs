//! Adaptive Gauss–Legendre quadrature: finite intervals and semi-infinite
//! Fourier-type integrals with geometric panel growth.

use crate::error::{FsvError, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

const ORDER: usize = 15;
const GROWTH: f64 = 1.5;
const QUIET_PANELS: usize = 3;
const MAX_DEPTH: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub u_max_cap: f64,
    /// Width of the first semi-infinite panel.
    pub first_panel: f64,
    /// Upper bound on panel width; wide panels over many oscillations can
    /// cancel to nothing and end the tail search too early.
    pub max_panel_width: f64,
}

fn default_max_width() -> f64 {
    8.0
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_panels: 2000, u_max_cap: 2000.0, first_panel: 1.0, max_panel_width: default_max_width() }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_panels > 0 && self.u_max_cap > 0.0 && self.first_panel > 0.0 && self.max_panel_width >= self.first_panel {
            Ok(())
        } else {
            Err(FsvError::InvalidParams("quadrature settings must be positive".into()))
        }
    }

    pub fn with_tol(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

/// An integral estimate with an error estimate and, for semi-infinite
/// integrals, the point where the integration was truncated.
#[derive(Clone, Debug)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: f64,
    pub u_truncation: f64,
    pub panels: usize,
}

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

fn panel(f: &mut dyn FnMut(f64, &mut [f64]) -> Result<()>, a: f64, b: f64, buf: &mut [f64], out: &mut [f64]) -> Result<()> {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        f(mid + half * x, buf)?;
        for (o, v) in out.iter_mut().zip(buf.iter()) {
            *o += w * half * v;
        }
    }
    Ok(())
}

/// Adaptive dyadic subdivision of [a, b]. `scale` supplies per-component
/// magnitudes for the relative tolerance.
fn adaptive(
    f: &mut dyn FnMut(f64, &mut [f64]) -> Result<()>,
    a: f64,
    b: f64,
    whole: Vec<f64>,
    cfg: &QuadConfig,
    scale: &[f64],
    budget: &mut usize,
) -> Result<(Vec<f64>, f64)> {
    let dim = whole.len();
    let mut buf = vec![0.0; dim];
    let mut total = vec![0.0; dim];
    let mut err = 0.0;
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    // fixed order: always refine the leftmost pending interval first
    while let Some((lo, hi, est, depth)) = stack.pop() {
        if *budget == 0 {
            return Err(FsvError::PanelBudgetExceeded { max_panels: cfg.max_panels });
        }
        *budget -= 1;
        let mid = 0.5 * (lo + hi);
        panel(f, lo, mid, &mut buf, &mut left)?;
        panel(f, mid, hi, &mut buf, &mut right)?;
        let mut worst: f64 = 0.0;
        let mut diff_max: f64 = 0.0;
        for i in 0..dim {
            let refined = left[i] + right[i];
            let diff = (refined - est[i]).abs();
            let tol = cfg.abs_tol.max(cfg.rel_tol * scale[i].max(refined.abs()));
            worst = worst.max(diff / tol);
            diff_max = diff_max.max(diff);
        }
        if worst <= 1.0 || depth >= MAX_DEPTH || !(worst.is_finite()) {
            if !worst.is_finite() {
                return Err(FsvError::NotFinite { what: "quadrature integrand" });
            }
            for i in 0..dim {
                total[i] += left[i] + right[i];
            }
            err += diff_max;
        } else {
            stack.push((mid, hi, right.clone(), depth + 1));
            stack.push((lo, mid, left.clone(), depth + 1));
        }
    }
    Ok((total, err))
}

/// Adaptive integral of a real vector-valued integrand over [a, b].
pub fn integrate_finite_vec(
    mut f: impl FnMut(f64, &mut [f64]) -> Result<()>,
    a: f64,
    b: f64,
    dim: usize,
    cfg: &QuadConfig,
) -> Result<Integral<Vec<f64>>> {
    if a == b {
        return Ok(Integral { value: vec![0.0; dim], abs_err: 0.0, u_truncation: b, panels: 0 });
    }
    let mut budget = cfg.max_panels;
    let mut buf = vec![0.0; dim];
    let mut coarse = vec![0.0; dim];
    panel(&mut f, a, b, &mut buf, &mut coarse)?;
    let scale: Vec<f64> = coarse.iter().map(|v| v.abs()).collect();
    let (value, abs_err) = adaptive(&mut f, a, b, coarse, cfg, &scale, &mut budget)?;
    Ok(Integral { value, abs_err, u_truncation: b, panels: cfg.max_panels - budget })
}

/// Adaptive integral of a complex integrand over [a, b].
pub fn integrate_finite(f: impl Fn(f64) -> Result<C64>, a: f64, b: f64, cfg: &QuadConfig) -> Result<C64> {
    let r = integrate_finite_vec(
        |x, out| {
            let v = f(x)?;
            out[0] = v.re;
            out[1] = v.im;
            Ok(())
        },
        a,
        b,
        2,
        cfg,
    )?;
    Ok(C64::new(r.value[0], r.value[1]))
}

/// ∫₀^∞ of a real vector-valued integrand. Panels grow geometrically; the
/// integral is truncated once every component's panel contribution has been
/// below max(abs_tol, rel_tol·|running sum|) for three consecutive panels.
pub fn integrate_semi_infinite_vec(
    mut f: impl FnMut(f64, &mut [f64]) -> Result<()>,
    dim: usize,
    cfg: &QuadConfig,
) -> Result<Integral<Vec<f64>>> {
    let mut budget = cfg.max_panels;
    let mut sum = vec![0.0f64; dim];
    let mut err = 0.0;
    let mut a = 0.0;
    let mut width = cfg.first_panel;
    let mut quiet = 0;
    let mut buf = vec![0.0; dim];
    let mut coarse = vec![0.0; dim];
    while a < cfg.u_max_cap {
        let b = a + width;
        panel(&mut f, a, b, &mut buf, &mut coarse)?;
        let scale: Vec<f64> = sum.iter().zip(coarse.iter()).map(|(s, c)| s.abs().max(c.abs())).collect();
        let (part, e) = adaptive(&mut f, a, b, coarse.clone(), cfg, &scale, &mut budget)?;
        let mut small = true;
        for i in 0..dim {
            sum[i] += part[i];
            if part[i].abs() >= cfg.abs_tol.max(cfg.rel_tol * sum[i].abs()) {
                small = false;
            }
        }
        err += e;
        a = b;
        width = (width * GROWTH).min(cfg.max_panel_width);
        if small {
            quiet += 1;
            if quiet >= QUIET_PANELS {
                return Ok(Integral { value: sum, abs_err: err, u_truncation: a, panels: cfg.max_panels - budget });
            }
        } else {
            quiet = 0;
        }
    }
    Err(FsvError::NoDecay { u_max: cfg.u_max_cap })
}

/// ∫₀^∞ f(u) du for a real integrand with a decaying envelope.
pub fn integrate_semi_infinite(mut f: impl FnMut(f64) -> Result<f64>, cfg: &QuadConfig) -> Result<Integral<f64>> {
    let r = integrate_semi_infinite_vec(
        |u, out| {
            out[0] = f(u)?;
            Ok(())
        },
        1,
        cfg,
    )?;
    Ok(Integral { value: r.value[0], abs_err: r.abs_err, u_truncation: r.u_truncation, panels: r.panels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let r = rule();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let x28: f64 = r.nodes.iter().zip(r.weights.iter()).map(|(x, w)| w * x.powi(28)).sum();
        assert!((x28 - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_and_gaussian_tails() {
        let cfg = QuadConfig::default();
        let v = integrate_semi_infinite(|u| Ok((-u).exp()), &cfg).unwrap();
        assert!((v.value - 1.0).abs() < 1e-9);
        let g = integrate_semi_infinite(|u| Ok((-0.5 * u * u).exp()), &cfg).unwrap();
        assert!((g.value - (PI / 2.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_lorentzian() {
        let cfg = QuadConfig { rel_tol: 1e-6, u_max_cap: 1e5, max_panels: 20000, ..QuadConfig::default() };
        let v = integrate_semi_infinite(|u| Ok(u.cos() / (1.0 + u * u)), &cfg).unwrap();
        let exact = PI / 2.0 * (-1.0f64).exp();
        assert!((v.value - exact).abs() < 5e-6, "{} vs {exact}", v.value);
    }

    #[test]
    fn no_decay_is_reported() {
        let cfg = QuadConfig { u_max_cap: 50.0, ..QuadConfig::default() };
        assert!(matches!(integrate_semi_infinite(|_| Ok(1.0), &cfg), Err(FsvError::NoDecay { .. })));
    }

    #[test]
    fn panel_budget_is_enforced() {
        let cfg = QuadConfig { max_panels: 3, ..QuadConfig::default() };
        let r = integrate_finite(|x| Ok(C64::new((1.0 / (x + 1e-9)).sin(), 0.0)), 0.0, 1.0, &cfg);
        assert!(matches!(r, Err(FsvError::PanelBudgetExceeded { .. })));
    }

    #[test]
    fn finite_examples() {
        let cfg = QuadConfig::default();
        assert_eq!(integrate_finite(|_| Ok(C64::new(1.0, 0.0)), 1.0, 1.0, &cfg).unwrap(), C64::new(0.0, 0.0));
        let two = integrate_finite(|_| Ok(C64::new(1.0, 0.0)), 0.0, 2.0, &cfg).unwrap();
        assert!((two.re - 2.0).abs() < 1e-14);
        let v = integrate_finite(|s| Ok(C64::new((1.0 + s * s).ln(), 0.0)), 0.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * 1f64.atan() + 2f64.ln() - 2.0;
        assert!((v.re - exact).abs() < 1e-12);
    }

    #[test]
    fn doubling_budget_is_stable() {
        let f = |u: f64| Ok((-0.3 * u * u).exp() * (2.0 * u).cos() / (1.0 + u));
        let a = integrate_semi_infinite(f, &QuadConfig::default()).unwrap();
        let b = integrate_semi_infinite(f, &QuadConfig { max_panels: 4000, ..QuadConfig::default() }).unwrap();
        assert!((a.value - b.value).abs() <= 1e-9 * a.value.abs());
    }
}
