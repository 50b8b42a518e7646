//! Property tests over randomly drawn models, ladders and quote sets.

mod common;

use common::*;
use fsv_core::calib::arpe_from_prices;
use fsv_core::chain_io::{arbitrage_filter, quote_set, Quote, QuoteSet};
use fsv_core::charfn::CfContext;
use fsv_core::pricer::{black_scholes_call, Pricer};
use fsv_core::quad::QuadConfig;
use fsv_core::specfun::gauss_2f1 as hyp2f1;
use fsv_core::{KernelFamily, OptionContract, C64};
use proptest::prelude::*;

const FAMILIES: [KernelFamily; 4] = [KernelFamily::TypeI, KernelFamily::TypeII, KernelFamily::TypeIII, KernelFamily::Exponential];

fn model_from_seed(seed: u64, family: usize, gmrts: bool) -> fsv_core::FsvModel {
    let mut r = rng(seed);
    let base = if gmrts { random_gmrts(&mut r) } else { random_aljd(&mut r) };
    let kern = random_kernel(&mut r, FAMILIES[family % 4]);
    random_model(&mut r, base, kern)
}

fn ladder_set(prices: &[Vec<f64>]) -> QuoteSet {
    let mut q = Vec::new();
    for (m, row) in prices.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            q.push(Quote::new(7000.0 + 250.0 * j as f64, 10 + 30 * m as u32, p));
        }
    }
    quote_set(SPOT, None, q).unwrap()
}

fn convex_decreasing(ks: &[f64], cs: &[f64], tol: f64) -> bool {
    let mono = cs.windows(2).all(|w| w[1] <= w[0] + tol);
    let convex = (1..cs.len() - 1).all(|i| {
        let (d1, d2) = (ks[i] - ks[i - 1], ks[i + 1] - ks[i]);
        cs[i] <= (d2 * cs[i - 1] + d1 * cs[i + 1]) / (d1 + d2) + tol
    });
    mono && convex
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn cf_normalized_martingale_hermitian(seed in any::<u64>(), fam in 0usize..4, gm in any::<bool>(), t in 0.02f64..1.5, u in 0.05f64..40.0) {
        let model = model_from_seed(seed, fam, gm);
        let ev = model.evaluator().unwrap();
        let ctx = CfContext::spot(SPOT, t);
        let at = |z: C64| ev.cf(&ctx, z).unwrap();
        prop_assert!((at(C64::new(0.0, 0.0)) - 1.0).norm() < 1e-10);
        prop_assert!((at(C64::new(0.0, -1.0)) - SPOT).norm() / SPOT < 1e-10);
        let p = at(C64::new(u, 0.0));
        let m = at(C64::new(-u, 0.0));
        prop_assert!((p - m.conj()).norm() < 1e-10);
        prop_assert!(p.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn direct_calls_respect_static_bounds(seed in any::<u64>(), fam in 0usize..4, days in 5u32..300) {
        let model = model_from_seed(seed, fam, false);
        let pr = Pricer::new(&model, SPOT).unwrap().with_quad(QuadConfig::default().with_tol(1e-10, 1e-12));
        let t = days as f64 / 365.0;
        let ks: Vec<f64> = (0..9).map(|j| SPOT * (0.7 + 0.075 * j as f64)).collect();
        let cs: Vec<f64> = pr.call_ladder(&ks, t).unwrap().into_iter().map(|r| r.value).collect();
        for (&k, &c) in ks.iter().zip(&cs) {
            prop_assert!(c >= (SPOT - k).max(0.0) - 1e-6 * SPOT, "K={k} C={c}");
            prop_assert!(c <= SPOT * (1.0 + 1e-9));
        }
        prop_assert!(convex_decreasing(&ks, &cs, 1e-6 * SPOT));
    }

    #[test]
    fn longer_maturity_is_worth_more(seed in any::<u64>(), m in 0.8f64..1.25) {
        let model = model_from_seed(seed, 2, false);
        let pr = Pricer::new(&model, SPOT).unwrap().with_quad(QuadConfig::default().with_tol(1e-10, 1e-12));
        let k = m * SPOT;
        let short = pr.call_parity(&OptionContract::direct_call(k, 20.0 / 365.0)).unwrap().value;
        let long = pr.call_parity(&OptionContract::direct_call(k, 200.0 / 365.0)).unwrap().value;
        prop_assert!(long >= short - 1e-6 * SPOT, "{short} {long}");
    }

    #[test]
    fn filter_is_idempotent_and_leaves_clean_ladders(rows in prop::collection::vec(prop::collection::vec(1.0f64..3000.0, 3..12), 1..4)) {
        let once = arbitrage_filter(ladder_set(&rows));
        let twice = arbitrage_filter(once.clone());
        prop_assert_eq!(&once, &twice);
        for m in once.maturities() {
            let kept: Vec<&Quote> = once.kept().filter(|q| q.maturity_days == m).collect();
            let ks: Vec<f64> = kept.iter().map(|q| q.strike).collect();
            let cs: Vec<f64> = kept.iter().map(|q| q.price).collect();
            let scale = cs.iter().cloned().fold(0.0, f64::max);
            if cs.len() >= 2 {
                prop_assert!(convex_decreasing(&ks, &cs, 1e-9 * scale));
            }
        }
        let prices: Vec<f64> = once.quotes.iter().map(|q| q.price).collect();
        let input: Vec<f64> = ladder_set(&rows).quotes.iter().map(|q| q.price).collect();
        prop_assert_eq!(prices, input);
    }

    #[test]
    fn filter_keeps_black_scholes_ladders(sigma in 0.1f64..2.0, days in 1u32..400) {
        let w = sigma * sigma * days as f64 / 365.0;
        let row: Vec<f64> = (0..20).map(|j| black_scholes_call(SPOT, 7000.0 + 250.0 * j as f64, w)).collect();
        let qs = arbitrage_filter(ladder_set(&[row]));
        prop_assert_eq!(qs.n_dropped(), 0);
    }

    #[test]
    fn arpe_ignores_quote_order(pairs in prop::collection::vec((1.0f64..5000.0, 1.0f64..5000.0), 1..40), rot in 0usize..40) {
        let (mk, md): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let a = arpe_from_prices(&mk, &md);
        let mut p = pairs.clone();
        p.rotate_left(rot % pairs.len());
        p.reverse();
        let (mk2, md2): (Vec<f64>, Vec<f64>) = p.into_iter().unzip();
        let b = arpe_from_prices(&mk2, &md2);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        prop_assert!(a >= 0.0);
        prop_assert_eq!(arpe_from_prices(&mk, &mk), 0.0);
    }

    #[test]
    fn hyp2f1_power_identity(a_re in -2.0f64..2.0, a_im in -1.0f64..1.0, b in 0.3f64..3.0, zr in -30.0f64..30.0, zi in -30.0f64..30.0) {
        prop_assume!(zi.abs() > 1e-3 || zr < 0.9);
        let a = C64::new(a_re, a_im);
        let bb = C64::new(b, 0.0);
        let z = C64::new(zr, zi);
        let v = hyp2f1(a, bb, bb, z).unwrap();
        let exact = (1.0 - z).powc(-a);
        prop_assert!((v - exact).norm() <= 1e-9 * exact.norm().max(1e-300), "z={z}: {v} vs {exact}");
    }

    #[test]
    fn kernel_integral_is_nondecreasing(fam in 0usize..3, seed in any::<u64>(), t in 0.01f64..3.0) {
        // type II may dip below zero, so it is left out
        let fams = [KernelFamily::TypeI, KernelFamily::TypeIII, KernelFamily::Exponential];
        let mut r = rng(seed);
        let k = random_kernel(&mut r, fams[fam]);
        let h0 = k.eval_h_integral(t);
        let h1 = k.eval_h_integral(t * 1.1);
        prop_assert!(h0 >= 0.0 && h1 >= h0 - 1e-14, "{h0} {h1}");
    }
}
