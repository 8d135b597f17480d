//! The inner minimization engine.
//!
//! Computes the generalized proximal mapping `argmin_{x in X} g(x) - Phi(x, y)`,
//! the conjugate `g^Phi(y) = -min`, the biconjugate, and the scaled proximal
//! mapping `prox_M g`. Global phase: uniform grid over the feasible box plus
//! declared kink candidates. Local phase: compass search (robust at kinks)
//! followed by a Newton polish on smooth objectives. Deterministic throughout:
//! fixed grids, ordered starts, lexicographic tie-breaking.

use crate::coupling::Coupling;
use crate::domain::{self, BoxDomain};
use crate::error::{Error, Result};
use crate::testfns::TestFunction;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid_points_per_dim: usize,
    pub local_steps: usize,
    pub tol_grad: f64,
    pub tol_cluster: f64,
    pub multistart_topk: usize,
    /// Restrict the search to the closed ball `B(center, radius)`.
    pub locality_radius: Option<(Vec<f64>, f64)>,
    /// Bounded outer search box for the biconjugate's maximization over Y.
    pub y_search_box: Option<BoxDomain>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_points_per_dim: 33,
            local_steps: 500,
            tol_grad: 1e-10,
            tol_cluster: 1e-6,
            multistart_topk: 8,
            locality_radius: None,
            y_search_box: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 3 {
            return Err(Error::InvalidParams("grid_points_per_dim must be >= 3".into()));
        }
        if !(self.tol_grad > 0.0 && self.tol_cluster > 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct ProxResult {
    /// Cluster representatives, lexicographically ordered.
    pub minimizers: Vec<Vec<f64>>,
    /// inf of the objective `g - Phi(., y)`.
    pub value: f64,
    /// `g^Phi(y) = -value`.
    pub envelope: f64,
    pub status: SolveStatus,
    pub n_starts_agreeing: usize,
    /// A minimizer landed on the search-box boundary; the box may be too small.
    pub boundary_hit: bool,
}

impl ProxResult {
    pub fn single(&self) -> Result<&[f64]> {
        if self.minimizers.len() == 1 {
            Ok(&self.minimizers[0])
        } else {
            Err(Error::MultiValued)
        }
    }
}

#[derive(Debug, Clone)]
pub struct BiconjResult {
    pub value: f64,
    pub maximizer: Vec<f64>,
    /// Outer maximizer landed on the y-box boundary (possible unboundedness).
    pub boundary_hit: bool,
}

/// An objective to be minimized over a finite box. `value` is extended-real;
/// `grad` returns `None` wherever the objective is not smoothly
/// differentiable (kinks, domain boundary).
struct Objective<'a> {
    value: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    grad: Box<dyn Fn(&[f64]) -> Option<Vec<f64>> + 'a>,
    kinks: Vec<Vec<f64>>,
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Deterministic full-factorial grid over `[lo, hi]`.
fn grid_points(lo: &[f64], hi: &[f64], n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lo.iter().zip(hi).map(|(&l, &h)| grid_axis(l, h, n)).collect();
    let mut out = vec![vec![]];
    for ax in &axes {
        let mut next = Vec::with_capacity(out.len() * ax.len());
        for p in &out {
            for &t in ax {
                let mut q = p.clone();
                q.push(t);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Compass (pattern) search: robust local refinement that tolerates kinks and
/// domain boundaries. Returns the refined point and the number of sweeps used.
fn compass_refine(
    obj: &Objective,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_sweeps: usize,
) -> (Vec<f64>, f64, usize) {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut fx = (obj.value)(&x);
    let width = lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0_f64, f64::max).max(1e-6);
    let mut step = width / 8.0;
    let mut sweeps = 0;
    while step > 1e-13 && sweeps < max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for i in 0..dim {
            // evaluate both directions and take the better improving move so
            // a shallow basin on one side cannot capture the iterate
            let old = x[i];
            let mut best_t = old;
            for s in [step, -step] {
                let t = (old + s).clamp(lo[i], hi[i]);
                if t == old {
                    continue;
                }
                x[i] = t;
                let f = (obj.value)(&x);
                if f < fx {
                    fx = f;
                    best_t = t;
                    improved = true;
                }
            }
            x[i] = best_t;
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx, sweeps)
}

/// Newton polish with finite-difference Hessian of the analytic gradient.
/// Falls back to damped gradient steps; only runs strictly inside the box.
fn newton_polish(
    obj: &Objective,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    tol_grad: f64,
    max_iter: usize,
) -> Option<(Vec<f64>, f64)> {
    let dim = start.len();
    let mut x = start.to_vec();
    let interior = |p: &[f64]| {
        p.iter().zip(lo.iter().zip(hi)).all(|(t, (l, h))| *t > *l + 1e-12 && *t < *h - 1e-12)
    };
    if !interior(&x) {
        return None;
    }
    for _ in 0..max_iter {
        let g = (obj.grad)(&x)?;
        let gn = domain::norm(&g);
        if gn <= tol_grad {
            break;
        }
        // FD Jacobian of the gradient
        let mut h = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let dt = 1e-6 * (1.0 + x[j].abs());
            let mut a = x.clone();
            let mut b = x.clone();
            a[j] += dt;
            b[j] -= dt;
            let (ga, gb) = ((obj.grad)(&a)?, (obj.grad)(&b)?);
            for i in 0..dim {
                h[(i, j)] = (ga[i] - gb[i]) / (2.0 * dt);
            }
        }
        let gv = DVector::from_vec(g.clone());
        let step = match h.clone().lu().solve(&gv) {
            Some(s) => s,
            None => gv.clone(),
        };
        let fx = (obj.value)(&x);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = (0..dim).map(|i| x[i] - t * step[i]).collect();
            if interior(&cand) {
                let fc = (obj.value)(&cand);
                // near the optimum the value decrease drops below float
                // resolution; accept the full Newton step whenever it
                // halves the gradient norm instead
                let grad_ok = t >= 0.99
                    && (obj.grad)(&cand).map(|gc| domain::norm(&gc) < 0.5 * gn).unwrap_or(false);
                if fc.is_finite() && (fc < fx || grad_ok) {
                    x = cand;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let fx = (obj.value)(&x);
    if fx.is_finite() {
        Some((x, fx))
    } else {
        None
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (s, t) in a.iter().zip(b) {
        if s < t {
            return true;
        }
        if s > t {
            return false;
        }
    }
    false
}

/// Multistart minimization of `obj` over `[lo, hi]`; returns clustered
/// minimizers, the minimum value, convergence status and agreeing-start count.
fn minimize_over_box(
    obj: &Objective,
    lo: &[f64],
    hi: &[f64],
    cfg: &SolverConfig,
) -> (Vec<Vec<f64>>, f64, SolveStatus, usize) {
    let dim = lo.len();
    // global phase: grid candidates, augmented with kink-snapped variants;
    // 1-D grids are cheap, so densify them for better basin coverage
    let n = match dim {
        1 => cfg.grid_points_per_dim * 8 + 1,
        2 => cfg.grid_points_per_dim,
        _ => cfg.grid_points_per_dim.min(9),
    };
    let mut seeds = grid_points(lo, hi, n);
    let base_count = seeds.len();
    for k in 0..base_count {
        for i in 0..dim {
            for kv in obj.kinks.get(i).map(|v| v.as_slice()).unwrap_or(&[]) {
                if *kv >= lo[i] && *kv <= hi[i] {
                    let mut q = seeds[k].clone();
                    q[i] = *kv;
                    seeds.push(q);
                }
            }
        }
    }
    let mut scored: Vec<(f64, Vec<f64>)> = seeds
        .into_iter()
        .filter_map(|p| {
            let f = (obj.value)(&p);
            if f.is_finite() {
                Some((f, p))
            } else {
                None
            }
        })
        .collect();
    if scored.is_empty() {
        return (vec![], f64::INFINITY, SolveStatus::Infeasible, 0);
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| {
        if lex_less(&a.1, &b.1) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }));
    scored.truncate(cfg.multistart_topk.max(1));

    // local phase
    let mut finals: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut status = SolveStatus::Converged;
    for (_, seed) in &scored {
        let (mut x, mut fx, sweeps) = compass_refine(obj, seed, lo, hi, cfg.local_steps);
        if sweeps >= cfg.local_steps {
            status = SolveStatus::MaxIter;
        }
        // snap to nearby declared kinks when that does not hurt the value
        for i in 0..dim {
            for kv in obj.kinks.get(i).map(|v| v.as_slice()).unwrap_or(&[]) {
                if (x[i] - kv).abs() <= 1e-5 && (x[i] - kv).abs() > 0.0 {
                    let old = x[i];
                    x[i] = *kv;
                    let f = (obj.value)(&x);
                    if f <= fx + 1e-12 {
                        fx = f.min(fx);
                    } else {
                        x[i] = old;
                    }
                }
            }
        }
        if let Some((px, pf)) = newton_polish(obj, &x, lo, hi, cfg.tol_grad, 60) {
            if pf <= fx + 1e-15 && domain::dist(&px, &x) <= 1e-2 {
                x = px;
                fx = pf;
            }
        }
        finals.push((x, fx));
    }

    // clustering: keep near-optimal points, merge within tol_cluster
    let best = finals.iter().map(|(_, f)| *f).fold(f64::INFINITY, f64::min);
    let window = 10.0 * cfg.tol_cluster;
    let mut near: Vec<(Vec<f64>, f64)> =
        finals.iter().filter(|(_, f)| *f <= best + window).cloned().collect();
    let n_agree = near.len();
    near.sort_by(|a, b| {
        if lex_less(&a.0, &b.0) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for (p, _) in &near {
        if !reps.iter().any(|r| domain::dist(r, p) <= cfg.tol_cluster) {
            reps.push(p.clone());
        }
    }
    (reps, best, status, n_agree)
}

fn feasible_bounds(
    g: &TestFunction,
    c: &Coupling,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let feas = g
        .search_box
        .intersect(&c.x_dom)
        .ok_or(Error::Infeasible)?;
    let (mut lo, mut hi) = feas.sampling_bounds(10.0);
    if let Some((center, radius)) = &cfg.locality_radius {
        for i in 0..lo.len() {
            lo[i] = lo[i].max(center[i] - radius);
            hi[i] = hi[i].min(center[i] + radius);
            if lo[i] > hi[i] {
                return Err(Error::Infeasible);
            }
        }
    }
    Ok((lo, hi))
}

/// `(∂_Φ g)^{-1}(y) = argmin_{x in X} g(x) - Phi(x, y)` over the search box.
pub fn prox(g: &TestFunction, c: &Coupling, y: &[f64], cfg: &SolverConfig) -> Result<ProxResult> {
    cfg.validate()?;
    if y.len() != c.dim_y {
        return Err(Error::DimMismatch { expected: c.dim_y, got: y.len() });
    }
    if !c.y_dom.contains(y) {
        return Err(Error::DomainViolation(format!("y = {y:?} not in Y")));
    }
    let (lo, hi) = feasible_bounds(g, c, cfg)?;
    let ball = cfg.locality_radius.clone();
    let obj = Objective {
        value: Box::new(move |x: &[f64]| {
            if let Some((center, radius)) = &ball {
                if domain::dist(x, center) > *radius {
                    return f64::INFINITY;
                }
            }
            let gv = g.value(x);
            if !gv.is_finite() {
                return f64::INFINITY;
            }
            match c.eval(x, y) {
                Ok(p) => gv - p,
                Err(_) => f64::INFINITY,
            }
        }),
        grad: Box::new(move |x: &[f64]| {
            if g.near_kink(x, 1e-9) {
                return None;
            }
            let gg = g.grad(x)?;
            let px = c.grad_x(x, y).ok()?;
            Some(gg.iter().zip(&px).map(|(a, b)| a - b).collect())
        }),
        kinks: g.kink_coords.clone(),
    };
    let (minimizers, value, status, n_agree) = minimize_over_box(&obj, &lo, &hi, cfg);
    if status == SolveStatus::Infeasible {
        return Ok(ProxResult {
            minimizers,
            value: f64::INFINITY,
            envelope: f64::NEG_INFINITY,
            status,
            n_starts_agreeing: 0,
            boundary_hit: false,
        });
    }
    let boundary_hit = minimizers.iter().any(|p| {
        p.iter().zip(lo.iter().zip(&hi)).any(|(t, (l, h))| {
            let w = (h - l).max(1e-6);
            (t - l).abs() <= 1e-9 * w || (t - h).abs() <= 1e-9 * w
        })
    });
    Ok(ProxResult {
        minimizers,
        value,
        envelope: -value,
        status,
        n_starts_agreeing: n_agree,
        boundary_hit,
    })
}

/// `g^Phi(y) = sup_x Phi(x, y) - g(x)`.
pub fn conjugate(g: &TestFunction, c: &Coupling, y: &[f64], cfg: &SolverConfig) -> Result<f64> {
    Ok(prox(g, c, y, cfg)?.envelope)
}

/// `g^{PhiPhi}(x) = sup_y Phi(x, y) - g^Phi(y)` via nested optimization.
/// The outer maximization runs derivative-free over `cfg.y_search_box`
/// (defaulting to the coupling's Y truncated at radius 10).
pub fn biconjugate(
    g: &TestFunction,
    c: &Coupling,
    x: &[f64],
    cfg: &SolverConfig,
) -> Result<BiconjResult> {
    cfg.validate()?;
    if x.len() != c.dim_x || !c.x_dom.contains(x) {
        return Err(Error::DomainViolation(format!("x = {x:?} not in X")));
    }
    let ybox = match &cfg.y_search_box {
        Some(b) => b.intersect(&c.y_dom).ok_or(Error::Infeasible)?,
        None => c.y_dom.clone(),
    };
    let (lo, hi) = ybox.sampling_bounds(10.0);
    // minimize the negated outer objective
    let inner_cfg = SolverConfig { y_search_box: None, ..cfg.clone() };
    let obj = Objective {
        value: Box::new(|y: &[f64]| {
            if !c.y_dom.contains(y) {
                return f64::INFINITY;
            }
            let phi = match c.eval(x, y) {
                Ok(p) => p,
                Err(_) => return f64::INFINITY,
            };
            match conjugate(g, c, y, &inner_cfg) {
                Ok(e) if e.is_finite() => -(phi - e),
                _ => f64::INFINITY,
            }
        }),
        grad: Box::new(|_| None),
        kinks: vec![vec![]; c.dim_y],
    };
    // the outer objective is expensive; use a coarser grid
    let outer_cfg = SolverConfig {
        grid_points_per_dim: if c.dim_y == 1 { 33 } else { 11 },
        multistart_topk: 4,
        local_steps: 200,
        ..cfg.clone()
    };
    let (maximizers, negval, status, _) = minimize_over_box(&obj, &lo, &hi, &outer_cfg);
    if status == SolveStatus::Infeasible || maximizers.is_empty() {
        return Err(Error::Infeasible);
    }
    let maximizer = maximizers[0].clone();
    let boundary_hit = maximizer.iter().zip(lo.iter().zip(&hi)).any(|(t, (l, h))| {
        let w = (h - l).max(1e-6);
        (t - l).abs() <= 1e-6 * w || (t - h).abs() <= 1e-6 * w
    });
    Ok(BiconjResult { value: -negval, maximizer, boundary_hit })
}

/// `prox_M g(z) = argmin_x 1/2 <x - z, M^{-1}(x - z)> + g(x)` for SPD `M`.
pub fn scaled_prox(
    g: &TestFunction,
    m: &DMatrix<f64>,
    z: &[f64],
    cfg: &SolverConfig,
) -> Result<ProxResult> {
    cfg.validate()?;
    if m.nrows() != g.dim || m.ncols() != g.dim {
        return Err(Error::DimMismatch { expected: g.dim, got: m.nrows() });
    }
    if (m - m.transpose()).norm() > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::NotSpd);
    }
    let chol = m.clone().cholesky().ok_or(Error::NotSpd)?;
    let minv = chol.inverse();
    let (lo, hi) = g
        .search_box
        .sampling_bounds(10.0);
    let quad = |x: &[f64]| {
        let d = DVector::from_iterator(x.len(), x.iter().zip(z).map(|(a, b)| a - b));
        0.5 * (&minv * &d).dot(&d)
    };
    let quad_grad = |x: &[f64]| {
        let d = DVector::from_iterator(x.len(), x.iter().zip(z).map(|(a, b)| a - b));
        (&minv * &d).iter().copied().collect::<Vec<f64>>()
    };
    let obj = Objective {
        value: Box::new(move |x: &[f64]| {
            let gv = g.value(x);
            if !gv.is_finite() {
                return f64::INFINITY;
            }
            gv + quad(x)
        }),
        grad: Box::new(move |x: &[f64]| {
            if g.near_kink(x, 1e-9) {
                return None;
            }
            let gg = g.grad(x)?;
            let q = quad_grad(x);
            Some(gg.iter().zip(&q).map(|(a, b)| a + b).collect())
        }),
        kinks: g.kink_coords.clone(),
    };
    let (minimizers, value, status, n_agree) = minimize_over_box(&obj, &lo, &hi, cfg);
    if status == SolveStatus::Infeasible {
        return Err(Error::Infeasible);
    }
    let boundary_hit = minimizers.iter().any(|p| {
        p.iter().zip(lo.iter().zip(&hi)).any(|(t, (l, h))| {
            let w = (h - l).max(1e-6);
            (t - l).abs() <= 1e-9 * w || (t - h).abs() <= 1e-9 * w
        })
    });
    Ok(ProxResult {
        minimizers,
        value,
        envelope: -value,
        status,
        n_starts_agreeing: n_agree,
        boundary_hit,
    })
}
