//! Phi-subdifferential calculus: membership certificates, the smooth-case
//! formula `y = G(x, grad g(x))`, Fenchel-Young gaps, and the three-way
//! equivalence between membership, zero gap, and prox attainment.

use crate::coupling::Coupling;
use crate::domain;
use crate::error::{Error, Result};
use crate::solver::{self, SolverConfig};
use crate::testfns::TestFunction;

/// Outcome of a sampled epsilon-subgradient membership test. The defining
/// inequality is `g(x) >= g(xbar) + Phi(x, y) - Phi(xbar, y) - eps` for all
/// `x`; `worst_violation` is the smallest slack found (negative = violated).
#[derive(Debug, Clone)]
pub struct SubgradientCertificate {
    pub holds: bool,
    pub epsilon: f64,
    pub worst_violation: f64,
    pub witness: Vec<f64>,
}

/// Default slack tolerance below which membership is declared violated.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// Tests whether `y` is an eps-Phi-subgradient of `g` at `xbar`.
///
/// The slack `g(x) - g(xbar) - Phi(x,y) + Phi(xbar,y) + eps` differs from the
/// prox objective `g - Phi(., y)` only by constants, so its minimum over the
/// search box is found with the full global solver (grid seeding, kink
/// candidates, local refinement) rather than by bare sampling.
pub fn is_phi_subgradient(
    g: &TestFunction,
    c: &Coupling,
    xbar: &[f64],
    y: &[f64],
    eps: f64,
    cfg: &SolverConfig,
) -> Result<SubgradientCertificate> {
    let gx = g.value(xbar);
    if !gx.is_finite() {
        return Err(Error::DomainViolation(format!("g(xbar) not finite at {xbar:?}")));
    }
    let phi_bar = c.eval(xbar, y)?;
    let r = solver::prox(g, c, y, cfg)?;
    if !r.value.is_finite() {
        return Err(Error::Infeasible);
    }
    let worst = r.value - (gx - phi_bar) + eps;
    let witness = r.minimizers.first().cloned().unwrap_or_else(|| xbar.to_vec());
    Ok(SubgradientCertificate {
        holds: worst >= -MEMBERSHIP_TOL,
        epsilon: eps,
        worst_violation: worst,
        witness,
    })
}

/// The smooth-case Phi-gradient `G(x, grad g(x))` via the twist inverse.
pub fn smooth_phi_gradient(g: &TestFunction, c: &Coupling, x: &[f64]) -> Result<Vec<f64>> {
    if !c.has_twist_inverse() {
        return Err(Error::MissingCapability("coupling has no twist inverse"));
    }
    let grad = g.grad(x).ok_or(Error::MissingCapability("g has no gradient oracle"))?;
    c.twist_inverse(x, &grad)
}

/// `g(x) + g^Phi(y) - Phi(x, y)`; nonnegative up to solver error, zero
/// exactly when `y` is a Phi-subgradient at `x`.
pub fn fenchel_young_gap(
    g: &TestFunction,
    c: &Coupling,
    x: &[f64],
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<f64> {
    let gx = g.value(x);
    if !gx.is_finite() {
        return Err(Error::DomainViolation(format!("g(x) not finite at {x:?}")));
    }
    let e = solver::conjugate(g, c, y, cfg)?;
    let phi = c.eval(x, y)?;
    Ok(gx + e - phi)
}

/// Joint evaluation of the three equivalent characterizations of
/// `y in ∂_Phi g(xbar)`: (a) the subgradient inequality with eps = 0,
/// (b) Fenchel-Young equality, (c) `xbar` attains the prox at `ybar`.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub subgradient_holds: bool,
    pub gap: f64,
    pub gap_holds: bool,
    pub prox_distance: f64,
    pub prox_holds: bool,
    pub agree: bool,
    /// `g^{PhiPhi}(xbar) - g(xbar)` when any condition holds and the
    /// biconjugate was requested; must be ~0 then.
    pub biconj_gap: Option<f64>,
}

pub fn equivalence_check(
    g: &TestFunction,
    c: &Coupling,
    xbar: &[f64],
    ybar: &[f64],
    cfg: &SolverConfig,
    tol_gap: f64,
    tol_dist: f64,
    with_biconjugate: bool,
) -> Result<EquivalenceReport> {
    let gx = g.value(xbar);
    if !gx.is_finite() {
        return Err(Error::DomainViolation(format!("g(xbar) not finite at {xbar:?}")));
    }
    let phi_bar = c.eval(xbar, ybar)?;
    let r = solver::prox(g, c, ybar, cfg)?;
    if !r.value.is_finite() {
        return Err(Error::Infeasible);
    }
    // (a) worst slack of the subgradient inequality with eps = 0
    let worst = r.value - (gx - phi_bar);
    let subgradient_holds = worst >= -tol_gap;
    // (b) Fenchel-Young gap; algebraically -worst, computed independently
    let gap = gx + r.envelope - phi_bar;
    let gap_holds = gap <= tol_gap;
    // (c) distance from xbar to the minimizer set
    let prox_distance = r
        .minimizers
        .iter()
        .map(|p| domain::dist(p, xbar))
        .fold(f64::INFINITY, f64::min);
    let prox_holds = prox_distance <= tol_dist;
    let agree = subgradient_holds == gap_holds && gap_holds == prox_holds;
    let biconj_gap = if with_biconjugate && (subgradient_holds || gap_holds || prox_holds) {
        let b = solver::biconjugate(g, c, xbar, cfg)?;
        Some(b.value - gx)
    } else {
        None
    };
    Ok(EquivalenceReport {
        subgradient_holds,
        gap,
        gap_holds,
        prox_distance,
        prox_holds,
        agree,
        biconj_gap,
    })
}
