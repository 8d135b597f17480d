//! Envelope gradient/Hessian and prox-Jacobian formulas, each paired with an
//! independent finite-difference oracle, plus the per-family specialized
//! gradient forms as cross-checks.
//!
//! Matrix orientation note: the source displays for the prox Jacobian and the
//! envelope Hessian are ambiguous up to transposition/ordering for
//! non-square blocks. Both orientations were validated against the
//! finite-difference oracles on closed-form instances and frozen here as
//!   J = grad prox_M g(z) * M * hess_xy      (n x m)
//!   H = hess_xy^T * J + hess_yy             (m x m)
//! with `z = xbar + M * grad_x Phi(xbar, ybar)` and `M = -hess_xx^{-1}`.

use crate::coupling::{Coupling, Family};
use crate::error::{Error, Result};
use crate::solver::{self, SolverConfig};
use crate::testfns::TestFunction;
use nalgebra::{DMatrix, DVector};

/// Comparison of an analytic quantity against its finite-difference oracle.
#[derive(Debug, Clone)]
pub struct DiffReport {
    pub analytic: DMatrix<f64>,
    pub oracle: DMatrix<f64>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub fd_step: f64,
    pub passed: bool,
}

fn report(analytic: DMatrix<f64>, oracle: DMatrix<f64>, step: f64, threshold: f64) -> DiffReport {
    let abs_err = (&analytic - &oracle).norm();
    let rel_err = abs_err / (1.0 + oracle.norm());
    DiffReport { analytic, oracle, abs_err, rel_err, fd_step: step, passed: rel_err <= threshold }
}

fn unique_prox(g: &TestFunction, c: &Coupling, y: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    let r = solver::prox(g, c, y, cfg)?;
    Ok(r.single()?.to_vec())
}

/// `grad g^Phi(y) = grad_y Phi(P(y), y)` with `P(y)` the unique prox point.
pub fn envelope_gradient(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let p = unique_prox(g, c, y, cfg)?;
    c.grad_y(&p, y)
}

/// Family-specific gradient rows (cross-checks of `envelope_gradient`).
pub fn envelope_gradient_table(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let p = unique_prox(g, c, y, cfg)?;
    let gam = c.gamma;
    match c.family {
        Family::Euclidean => Ok(p.iter().zip(y).map(|(a, b)| (a - b) / gam).collect()),
        Family::LeftBregman => {
            let k = c.kernel.as_ref().unwrap();
            let h = k.hess_diag(y);
            Ok(p.iter().zip(y).zip(&h).map(|((a, b), d)| d * (a - b) / gam).collect())
        }
        Family::RightBregman => {
            let k = c.kernel.as_ref().unwrap();
            let (gp, gy) = (k.grad(&p), k.grad(y));
            Ok(gp.iter().zip(&gy).map(|(a, b)| (a - b) / gam).collect())
        }
        Family::Anisotropic => {
            let k = c.kernel.as_ref().unwrap();
            Ok(p.iter().zip(y).map(|(a, b)| k.d1((a - b) / gam)).collect())
        }
        Family::Entropic => {
            let k = c.kernel.as_ref().unwrap();
            Ok(p.iter()
                .zip(y)
                .map(|(&pi, &yi)| gam * k.conj_val1(k.d1(pi / yi)))
                .collect())
        }
        _ => Err(Error::MissingCapability("no tabulated gradient row for this family")),
    }
}

/// Steps per coordinate, shrunk so that `y +- h e_i` stays in `Y`.
fn safe_steps(c: &Coupling, y: &[f64], base: f64) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let mut h = base;
            for _ in 0..40 {
                let mut a = y.to_vec();
                let mut b = y.to_vec();
                a[i] += h;
                b[i] -= h;
                if c.y_dom.contains(&a) && c.y_dom.contains(&b) {
                    return h;
                }
                h *= 0.5;
            }
            h
        })
        .collect()
}

/// Central differences of the conjugate (independent gradient oracle).
pub fn envelope_gradient_fd(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
    step: Option<f64>,
) -> Result<Vec<f64>> {
    let ynorm = y.iter().map(|t| t * t).sum::<f64>().sqrt();
    let base = step.unwrap_or(1e-5 * (1.0 + ynorm));
    let hs = safe_steps(c, y, base);
    let mut out = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        let h = hs[i];
        let mut a = y.to_vec();
        let mut b = y.to_vec();
        a[i] += h;
        b[i] -= h;
        let (fa, fb) =
            (solver::conjugate(g, c, &a, cfg)?, solver::conjugate(g, c, &b, cfg)?);
        out.push((fa - fb) / (2.0 * h));
    }
    Ok(out)
}

/// Column-wise central differences of the prox map `P(.)` at `ybar`.
pub fn prox_jacobian_fd(
    g: &TestFunction,
    c: &Coupling,
    ybar: &[f64],
    cfg: &SolverConfig,
    step: Option<f64>,
) -> Result<DMatrix<f64>> {
    let ynorm = ybar.iter().map(|t| t * t).sum::<f64>().sqrt();
    let base = step.unwrap_or(1e-5 * (1.0 + ynorm));
    let hs = safe_steps(c, ybar, base);
    let n = c.dim_x;
    let m = c.dim_y;
    let mut j = DMatrix::zeros(n, m);
    for col in 0..m {
        let h = hs[col];
        let mut a = ybar.to_vec();
        let mut b = ybar.to_vec();
        a[col] += h;
        b[col] -= h;
        let pa = unique_prox(g, c, &a, cfg)?;
        let pb = unique_prox(g, c, &b, cfg)?;
        for row in 0..n {
            j[(row, col)] = (pa[row] - pb[row]) / (2.0 * h);
        }
    }
    Ok(j)
}

fn neg_hess_xx_inverse(xx: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = 0.5 * (xx + xx.transpose());
    let eig = sym.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|l| *l >= 0.0) {
        return Err(Error::EigenCondition(
            "hess_xx is not negative definite at the prox point".into(),
        ));
    }
    let m = -sym;
    m.clone().try_inverse().ok_or(Error::NotSpd)
}

/// The analytic prox Jacobian
/// `J = grad prox_M g(z) * M * hess_xy(xbar, ybar)` with
/// `M = -hess_xx^{-1}` and `z = xbar + M grad_x Phi(xbar, ybar)`;
/// `grad prox_M g` itself comes from finite differences of the scaled prox.
pub fn prox_jacobian_formula(
    g: &TestFunction,
    c: &Coupling,
    ybar: &[f64],
    cfg: &SolverConfig,
) -> Result<DMatrix<f64>> {
    let xbar = unique_prox(g, c, ybar, cfg)?;
    let blocks = c.hess(&xbar, ybar)?;
    let m = neg_hess_xx_inverse(&blocks.xx)?;
    // eigenvalue precondition lambda_max(M) < 1/r
    let lam_max = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(r) = g.meta.prox_regular_r {
        if r > 0.0 && lam_max >= 1.0 / r {
            return Err(Error::EigenCondition(format!(
                "lambda_max(M) = {lam_max} >= 1/r = {}",
                1.0 / r
            )));
        }
    }
    if let Some(th) = g.meta.prox_bounded_threshold {
        if lam_max >= th {
            return Err(Error::EigenCondition(format!(
                "lambda_max(M) = {lam_max} exceeds the prox-boundedness threshold {th}"
            )));
        }
    }
    let gx = c.grad_x(&xbar, ybar)?;
    let z_vec = DVector::from_vec(xbar.clone()) + &m * DVector::from_vec(gx);
    let z: Vec<f64> = z_vec.iter().copied().collect();
    // FD Jacobian of the scaled prox at z
    let n = c.dim_x;
    let h = 1e-5 * (1.0 + z_vec.norm());
    let mut j_scaled = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut a = z.clone();
        let mut b = z.clone();
        a[col] += h;
        b[col] -= h;
        let ra = solver::scaled_prox(g, &m, &a, cfg)?;
        let rb = solver::scaled_prox(g, &m, &b, cfg)?;
        let (pa, pb) = (ra.single()?, rb.single()?);
        for row in 0..n {
            j_scaled[(row, col)] = (pa[row] - pb[row]) / (2.0 * h);
        }
    }
    Ok(j_scaled * m * blocks.xy)
}

/// Which Jacobian feeds the envelope Hessian composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianSource {
    Formula,
    FiniteDifference,
}

/// `hess g^Phi(ybar) = hess_xy^T * J + hess_yy`, evaluated at the prox point.
/// Returned raw (not symmetrized); callers may inspect the asymmetry.
pub fn envelope_hessian(
    g: &TestFunction,
    c: &Coupling,
    ybar: &[f64],
    cfg: &SolverConfig,
    source: JacobianSource,
) -> Result<DMatrix<f64>> {
    let xbar = unique_prox(g, c, ybar, cfg)?;
    let blocks = c.hess(&xbar, ybar)?;
    let j = match source {
        JacobianSource::Formula => prox_jacobian_formula(g, c, ybar, cfg)?,
        JacobianSource::FiniteDifference => prox_jacobian_fd(g, c, ybar, cfg, None)?,
    };
    Ok(blocks.xy.transpose() * j + blocks.yy)
}

/// Second-order central differences of the conjugate, symmetrized.
pub fn envelope_hessian_fd(
    g: &TestFunction,
    c: &Coupling,
    ybar: &[f64],
    cfg: &SolverConfig,
    step: Option<f64>,
) -> Result<DMatrix<f64>> {
    let m = c.dim_y;
    let ynorm = ybar.iter().map(|t| t * t).sum::<f64>().sqrt();
    let base = step.unwrap_or(1e-3 * (1.0 + ynorm));
    let hs = safe_steps(c, ybar, base);
    let f0 = solver::conjugate(g, c, ybar, cfg)?;
    let mut h = DMatrix::zeros(m, m);
    for i in 0..m {
        let hi = hs[i];
        let mut a = ybar.to_vec();
        let mut b = ybar.to_vec();
        a[i] += hi;
        b[i] -= hi;
        let (fa, fb) = (solver::conjugate(g, c, &a, cfg)?, solver::conjugate(g, c, &b, cfg)?);
        h[(i, i)] = (fa - 2.0 * f0 + fb) / (hi * hi);
        for jdx in (i + 1)..m {
            let hj = hs[jdx];
            let mut pp = ybar.to_vec();
            let mut pm = ybar.to_vec();
            let mut mp = ybar.to_vec();
            let mut mm = ybar.to_vec();
            pp[i] += hi;
            pp[jdx] += hj;
            pm[i] += hi;
            pm[jdx] -= hj;
            mp[i] -= hi;
            mp[jdx] += hj;
            mm[i] -= hi;
            mm[jdx] -= hj;
            let v = (solver::conjugate(g, c, &pp, cfg)?
                - solver::conjugate(g, c, &pm, cfg)?
                - solver::conjugate(g, c, &mp, cfg)?
                + solver::conjugate(g, c, &mm, cfg)?)
                / (4.0 * hi * hj);
            h[(i, jdx)] = v;
            h[(jdx, i)] = v;
        }
    }
    Ok(h)
}

/// Analytic-vs-FD gradient comparison at threshold 1e-5.
pub fn gradient_report(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<DiffReport> {
    let a = envelope_gradient(g, c, y, cfg)?;
    let o = envelope_gradient_fd(g, c, y, cfg, None)?;
    let step = 1e-5 * (1.0 + y.iter().map(|t| t * t).sum::<f64>().sqrt());
    Ok(report(
        DMatrix::from_vec(a.len(), 1, a),
        DMatrix::from_vec(o.len(), 1, o),
        step,
        1e-5,
    ))
}

/// Formula-vs-FD prox-Jacobian comparison at threshold 1e-4.
pub fn jacobian_report(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<DiffReport> {
    let a = prox_jacobian_formula(g, c, y, cfg)?;
    let o = prox_jacobian_fd(g, c, y, cfg, None)?;
    Ok(report(a, o, 1e-5, 1e-4))
}

/// Analytic-vs-FD envelope Hessian comparison at threshold 1e-3.
pub fn hessian_report(
    g: &TestFunction,
    c: &Coupling,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<DiffReport> {
    let a = envelope_hessian(g, c, y, cfg, JacobianSource::Formula)?;
    let o = envelope_hessian_fd(g, c, y, cfg, None)?;
    Ok(report(a, o, 1e-3, 1e-3))
}
