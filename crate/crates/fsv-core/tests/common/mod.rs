#![allow(dead_code)]
//! Shared models, random generators and independent numerical oracles for
//! the integration suites.

use fsv_core::calib::ParamMap;
use fsv_core::{AljdParams, BaseProcess, FsvModel, GmrtsParams, KernelFamily, KernelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SPOT: f64 = 9232.98;
pub const SPOT_B: f64 = 52108.0;

/// Type-III ALJD reference model (positive inverse moments do not exist).
pub fn reference_type3() -> FsvModel {
    let base = BaseProcess::Aljd(AljdParams {
        sigma_x: 0.73208,
        lambda_x: 0.21292,
        b_x: 0.98634,
        eta: 2.10382,
        lambda_y: 8.52514,
        b_y: 4.14291,
    });
    FsvModel::new(base, KernelSpec::new(KernelFamily::TypeIII, 9.70963, 0.54194).unwrap(), 0.24452, 0.1, 0.00641).unwrap()
}

pub fn reference_type1() -> FsvModel {
    let base = BaseProcess::Aljd(AljdParams {
        sigma_x: 1.63878,
        lambda_x: 1.56946,
        b_x: 8.47621,
        eta: 9.03383,
        lambda_y: 2.24652,
        b_y: 7.05341,
    });
    FsvModel::new(base, KernelSpec::new(KernelFamily::TypeI, 4.67423, 0.65369).unwrap(), 0.06162, 0.1, 0.42878).unwrap()
}

/// Type-III ALJD model with finite inverse moments up to order b_x/η ≈ 4.5.
pub fn inverse_moment_model() -> FsvModel {
    let base = BaseProcess::Aljd(AljdParams {
        sigma_x: 1.0805,
        lambda_x: 3.29407,
        b_x: 7.65726,
        eta: 1.70052,
        lambda_y: 4.1792,
        b_y: 6.91423,
    });
    FsvModel::new(base, KernelSpec::new(KernelFamily::TypeIII, 8.11425, 0.80968).unwrap(), 0.23813, 0.20937, 0.42038).unwrap()
}

pub fn reference_gmrts() -> FsvModel {
    let base = BaseProcess::Gmrts(GmrtsParams {
        a_x: 16.628,
        b_x: 54.5301,
        c_x: 0.5,
        theta: -0.48461,
        n: 2.0,
        a_y: 0.84964,
        b_y: 0.84964,
        c_y: 0.5,
    });
    FsvModel::new(base, KernelSpec::new(KernelFamily::TypeIII, 5.57445, 0.56133).unwrap(), 0.54194, 0.1, 0.0995).unwrap()
}

/// ALJD model whose log-price is Gaussian with total variance σ²·A₀·t.
pub fn lognormal_model(sigma_x: f64, a0: f64, kernel: KernelSpec) -> FsvModel {
    let base = BaseProcess::Aljd(AljdParams { sigma_x, lambda_x: 0.0, b_x: 5.0, eta: 1.0, lambda_y: 0.0, b_y: 3.0 });
    FsvModel::new(base, kernel, a0, a0, 0.0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uni(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

pub fn random_kernel(r: &mut ChaCha8Rng, family: KernelFamily) -> KernelSpec {
    let kappa = uni(r, 1.0, 15.0);
    match family {
        KernelFamily::Exponential => KernelSpec::exponential(kappa).unwrap(),
        f => KernelSpec::new(f, kappa, uni(r, 0.55, 0.95)).unwrap(),
    }
}

pub fn random_aljd(r: &mut ChaCha8Rng) -> BaseProcess {
    let eta = uni(r, 0.5, 2.0);
    BaseProcess::Aljd(AljdParams {
        sigma_x: uni(r, 0.2, 1.5),
        lambda_x: uni(r, 0.0, 5.0),
        b_x: uni(r, 1.5, 10.0) / eta.min(1.0),
        eta,
        lambda_y: uni(r, 0.0, 10.0),
        b_y: uni(r, 1.0, 10.0),
    })
}

pub fn random_gmrts(r: &mut ChaCha8Rng) -> BaseProcess {
    let a_y = uni(r, 0.3, 3.0);
    let c_y = match r.random_range(0..3) {
        0 => 0.0,
        1 => 0.5,
        _ => uni(r, 0.05, 0.95),
    };
    BaseProcess::Gmrts(GmrtsParams {
        a_x: uni(r, 2.0, 20.0),
        b_x: uni(r, 10.0, 60.0),
        c_x: 0.5,
        theta: uni(r, -1.0, 1.0),
        n: 2.0,
        a_y,
        b_y: a_y.max(0.5),
        c_y,
    })
}

pub fn random_model(r: &mut ChaCha8Rng, base: BaseProcess, kernel: KernelSpec) -> FsvModel {
    let rho_cap = base.b_y().min(1.0) * 0.9;
    loop {
        let m = FsvModel::new(base, kernel, uni(r, 0.05, 0.8), uni(r, 0.0, 0.5), uni(r, -rho_cap, rho_cap));
        if let Ok(m) = m {
            return m;
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Golub–Welsch-free Newton.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
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
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite fixed-order Gauss–Legendre on [a, b] with `panels` equal panels.
pub fn composite_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * w;
            rule.iter().map(|(x, wt)| wt * f(mid + 0.5 * w * x)).sum::<f64>() * 0.5 * w
        })
        .sum()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn aljd_map(m: &FsvModel) -> ParamMap {
    fsv_core::calib::fsv_param_map(m)
}
