//! Derivative-free search on the unit cube: a genetic algorithm for the
//! global stage and compass pattern search for refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const LM_DAMPING: [f64; 3] = [1e-6, 1e-2, 1.0];
// forward-difference step for the residual Jacobian, in unit-cube coordinates
const JAC_STEP: f64 = 1e-5;
// longest Gauss–Newton trial step on the unit cube
const MAX_MODEL_STEP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the box width.
    pub mutation_scale: f64,
    pub elite: usize,
    pub top_k: usize,
    /// Minimum RMS distance between returned candidates on the unit cube.
    pub niche_radius: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self { population: 40, generations: 60, tournament: 3, mutation_rate: 0.1, mutation_scale: 0.1, elite: 2, top_k: 5, niche_radius: 0.25, seed: 20230 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsConfig {
    pub initial_step: f64,
    pub expand: f64,
    pub shrink: f64,
    pub tol: f64,
    pub max_evals: usize,
    /// After a failed axis poll, also poll rotated bases before shrinking.
    pub rotated_polls: bool,
    /// Try Gauss–Newton points from the poll Jacobian before each poll
    /// (needs a residual objective).
    pub model_search: bool,
    pub seed: u64,
}

impl Default for PsConfig {
    fn default() -> Self {
        Self { initial_step: 0.1, expand: 2.0, shrink: 0.5, tol: 1e-6, max_evals: 20_000, rotated_polls: true, model_search: true, seed: 20230 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub value: f64,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn evaluate(obj: &(dyn Fn(&[f64]) -> f64 + Sync), xs: Vec<Vec<f64>>) -> Vec<Candidate> {
    xs.into_par_iter()
        .map(|x| {
            let value = sanitize(obj(&x));
            Candidate { x, value }
        })
        .collect()
}

fn sort(pop: &mut [Candidate]) {
    pop.sort_by(|a, b| a.value.total_cmp(&b.value));
}

/// Evolve a population on [0, 1]^dim and return up to `top_k` of the best
/// points seen, best first, no two closer than `niche_radius`. Returns the number of objective evaluations as well.
pub fn genetic_search(obj: &(dyn Fn(&[f64]) -> f64 + Sync), dim: usize, cfg: &GaConfig) -> (Vec<Candidate>, usize) {
    if dim == 0 {
        return (vec![Candidate { x: vec![], value: sanitize(obj(&[])) }], 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.population.max(2);
    let init: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    let mut pop = evaluate(obj, init);
    let mut archive = pop.clone();
    let mut evals = n;
    sort(&mut pop);
    let noise = Normal::new(0.0, cfg.mutation_scale).expect("mutation scale");
    for _ in 0..cfg.generations {
        let pick = |rng: &mut ChaCha8Rng, pop: &[Candidate]| -> usize {
            (0..cfg.tournament.max(1)).map(|_| rng.random_range(0..pop.len())).min().unwrap_or(0)
        };
        let mut children = Vec::with_capacity(n);
        while children.len() + cfg.elite.min(n) < n {
            let a = &pop[pick(&mut rng, &pop)].x;
            let b = &pop[pick(&mut rng, &pop)].x;
            // BLX-0.5 blend crossover
            let child: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(&p, &q)| {
                    let (lo, hi) = (p.min(q), p.max(q));
                    let ext = 0.5 * (hi - lo);
                    let mut g = lo - ext + rng.random::<f64>() * (hi - lo + 2.0 * ext);
                    if rng.random::<f64>() < cfg.mutation_rate {
                        g += noise.sample(&mut rng);
                    }
                    g.clamp(0.0, 1.0)
                })
                .collect();
            children.push(child);
        }
        evals += children.len();
        let mut next: Vec<Candidate> = pop[..cfg.elite.min(n)].to_vec();
        let kids = evaluate(obj, children);
        archive.extend(kids.iter().cloned());
        next.extend(kids);
        sort(&mut next);
        pop = next;
    }
    sort(&mut archive);
    let rms = |a: &[f64], b: &[f64]| (a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let mut top: Vec<Candidate> = Vec::new();
    for c in archive {
        if top.len() == cfg.top_k.max(1) {
            break;
        }
        if top.iter().all(|t| rms(&t.x, &c.x) >= cfg.niche_radius) {
            top.push(c);
        }
    }
    (top, evals)
}

/// An objective value together with the residuals it sums, when available.
#[derive(Clone, Debug)]
struct Point {
    x: Vec<f64>,
    value: f64,
    res: Option<Vec<f64>>,
}

type Evaluator<'a> = dyn Fn(&[f64]) -> (f64, Option<Vec<f64>>) + Sync + 'a;

fn evaluate_points(eval: &Evaluator, xs: Vec<Vec<f64>>) -> Vec<Point> {
    xs.into_par_iter()
        .map(|x| {
            let (v, res) = eval(&x);
            Point { x, value: sanitize(v), res }
        })
        .collect()
}

fn best_below(points: &[Point], fx: f64) -> Option<Point> {
    points.iter().filter(|p| p.value < fx).min_by(|a, b| a.value.total_cmp(&b.value)).cloned()
}

/// Compass search from `start`: poll ±step along every axis, move to the best
/// improving point and expand, otherwise shrink, until step < tol. Before a
/// shrink the poll is retried on a basis aligned with the recent progress and
/// then on a random orthonormal basis; both help in narrow valleys and at
/// kinks of a sum-of-absolute-errors objective.
pub fn pattern_search(obj: &(dyn Fn(&[f64]) -> f64 + Sync), start: &[f64], cfg: &PsConfig) -> (Candidate, usize) {
    pattern_core(&|x: &[f64]| (obj(x), None), start, cfg)
}

/// Pattern search on Σ|rᵢ(x)|. Before polling around a new point, a search
/// step tries damped Gauss–Newton points built from a forward-difference
/// Jacobian of the residuals. `None` residuals score `penalty`.
pub fn pattern_search_residuals(
    res: &(dyn Fn(&[f64]) -> Option<Vec<f64>> + Sync),
    penalty: f64,
    start: &[f64],
    cfg: &PsConfig,
) -> (Candidate, usize) {
    let eval = |x: &[f64]| match res(x) {
        Some(r) => {
            let v: f64 = r.iter().map(|e| e.abs()).sum();
            if v.is_finite() {
                (v, Some(r))
            } else {
                (penalty, None)
            }
        }
        None => (penalty, None),
    };
    pattern_core(&eval, start, cfg)
}

fn pattern_core(eval: &Evaluator, start: &[f64], cfg: &PsConfig) -> (Candidate, usize) {
    let dim = start.len();
    let first = evaluate_points(eval, vec![start.to_vec()]).remove(0);
    let (mut x, mut fx, mut rx) = (first.x, first.value, first.res);
    let mut evals = 1;
    let mut step = cfg.initial_step;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let poll = |x: &[f64], dirs: &[Vec<f64>], step: f64| -> Vec<Vec<f64>> {
        dirs.iter()
            .flat_map(|d| [1.0, -1.0].map(|s| (d, s)))
            .filter_map(|(d, s)| {
                let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| (a + s * step * b).clamp(0.0, 1.0)).collect();
                (y.as_slice() != x).then_some(y)
            })
            .collect()
    };
    let axes: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut basis = axes.clone();
    // signed progress along each basis vector since the basis was last rotated
    let mut progress = vec![0.0; dim];
    let mut tried_random = false;
    // a model search already failed at the current point
    let mut search_here = true;
    let mut radius = cfg.initial_step;
    while step >= cfg.tol && evals < cfg.max_evals {
        if cfg.model_search && search_here {
            if let Some(r) = rx.clone() {
                let probes: Vec<Vec<f64>> = (0..dim)
                    .map(|i| {
                        let mut y = x.clone();
                        y[i] += if y[i] + JAC_STEP <= 1.0 { JAC_STEP } else { -JAC_STEP };
                        y
                    })
                    .collect();
                evals += probes.len();
                let pts = evaluate_points(eval, probes);
                if let Some(j) = forward_jacobian(&x, &r, &pts) {
                    let trials = gauss_newton_trials(&x, &r, &axes, &j, radius);
                    evals += trials.len();
                    let pts = evaluate_points(eval, trials);
                    if let Some(p) = best_below(&pts, fx) {
                        (x, fx, rx) = (p.x, p.value, p.res);
                        radius = (2.0 * radius).min(MAX_MODEL_STEP);
                        continue;
                    }
                    radius = (0.25 * radius).max(cfg.tol);
                }
            }
            search_here = false;
        }

        let polls = poll(&x, &basis, step);
        evals += polls.len();
        let pts = evaluate_points(eval, polls);
        let along = |d: &[f64]| -> Vec<f64> { basis.iter().map(|b| b.iter().zip(d).map(|(p, q)| p * q).sum()).collect() };
        match best_below(&pts, fx) {
            Some(c) => {
                // pattern move: keep stepping along the successful direction while it pays
                let dir: Vec<f64> = c.x.iter().zip(&x).map(|(a, b)| a - b).collect();
                let from = x.clone();
                (x, fx, rx) = (c.x, c.value, c.res);
                while evals < cfg.max_evals {
                    let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| (a + d).clamp(0.0, 1.0)).collect();
                    if y == x {
                        break;
                    }
                    evals += 1;
                    let p = evaluate_points(eval, vec![y]).remove(0);
                    if p.value < fx {
                        (x, fx, rx) = (p.x, p.value, p.res);
                    } else {
                        break;
                    }
                }
                search_here = true;
                let moved: Vec<f64> = x.iter().zip(&from).map(|(a, b)| a - b).collect();
                progress.iter_mut().zip(along(&moved)).for_each(|(p, m)| *p += m);
                tried_random = false;
                step = (step * cfg.expand).min(0.5);
            }
            None if cfg.rotated_polls && dim > 1 && progress.iter().any(|&p| p != 0.0) => {
                basis = rotated_basis(&basis, &progress);
                progress.iter_mut().for_each(|p| *p = 0.0);
            }
            None if cfg.rotated_polls && dim > 1 && !tried_random => {
                basis = random_basis(&mut rng, dim);
                tried_random = true;
            }
            None => {
                basis = axes.clone();
                tried_random = false;
                step *= cfg.shrink;
            }
        }
    }
    (Candidate { x, value: fx }, evals)
}

/// Forward differences of the residuals from probes displaced along each axis.
fn forward_jacobian(x: &[f64], r: &[f64], probes: &[Point]) -> Option<DMatrix<f64>> {
    let mut j = DMatrix::zeros(r.len(), x.len());
    for (col, p) in probes.iter().enumerate() {
        let rp = p.res.as_deref().filter(|rp| rp.len() == r.len())?;
        let h = p.x[col] - x[col];
        for (i, (a, b)) in rp.iter().zip(r).enumerate() {
            j[(i, col)] = (a - b) / h;
        }
    }
    Some(j)
}

/// Levenberg–Marquardt steps at a few damping levels, cut to the trust
/// radius and mapped back to the cube.
fn gauss_newton_trials(x: &[f64], r: &[f64], dirs: &[Vec<f64>], j: &DMatrix<f64>, radius: f64) -> Vec<Vec<f64>> {
    let jt = j.transpose();
    let jtj = &jt * j;
    let g = &jt * DVector::from_column_slice(r);
    let mut out = Vec::new();
    for mu in LM_DAMPING {
        let mut a = jtj.clone();
        for k in 0..a.nrows() {
            a[(k, k)] += mu * jtj[(k, k)].max(1e-12);
        }
        let Some(delta) = a.cholesky().map(|c| c.solve(&(-&g))) else {
            continue;
        };
        let mut dx = vec![0.0; x.len()];
        for (k, d) in dirs.iter().enumerate() {
            dx.iter_mut().zip(d).for_each(|(v, b)| *v += delta[k] * b);
        }
        let len = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !len.is_finite() || len == 0.0 {
            continue;
        }
        let shrink = (radius / len).min(1.0);
        let y: Vec<f64> = x.iter().zip(&dx).map(|(a, v)| (a + shrink * v).clamp(0.0, 1.0)).collect();
        if y.as_slice() != x && !out.contains(&y) {
            out.push(y);
        }
    }
    out
}

/// Rosenbrock rotation: the new first vector is the total progress, the next
/// the progress without the first old direction, and so on, orthonormalized.
fn rotated_basis(basis: &[Vec<f64>], progress: &[f64]) -> Vec<Vec<f64>> {
    let dim = basis.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| progress[j].abs().total_cmp(&progress[i].abs()));
    let mut candidates: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut a = vec![0.0; dim];
            for &i in &order[k..] {
                a.iter_mut().zip(&basis[i]).for_each(|(p, b)| *p += progress[i] * b);
            }
            a
        })
        .collect();
    candidates.extend(order.iter().map(|&i| basis[i].clone()));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for mut w in candidates {
        if out.len() == dim {
            break;
        }
        for q in &out {
            let dot: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-9 {
            w.iter_mut().for_each(|a| *a /= n);
            out.push(w);
        }
    }
    out
}

/// Columns of the Householder reflection I − 2vvᵀ for a random unit v.
fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let g = Normal::new(0.0, 1.0).expect("unit normal");
    let mut v: Vec<f64> = (0..dim).map(|_| g.sample(rng)).collect();
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    (0..dim).map(|i| (0..dim).map(|j| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j]).collect()).collect()
}
