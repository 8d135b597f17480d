//! Numerical checkers for the regularity hypotheses: twist injectivity,
//! local strong twist, Phi-prox-regularity, strict Phi-monotonicity, prox
//! single-valuedness, and the eigenvalue condition `lambda_max(M) < 1/r`.
//!
//! Every check samples deterministically and reports the worst margin seen
//! together with the witnessing sample; none of them is a proof.

use crate::coupling::Coupling;
use crate::domain;
use crate::error::{Error, Result};
use crate::sample;
use crate::solver::{self, SolverConfig};
use crate::subdiff;
use crate::testfns::TestFunction;
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    /// The check's hypotheses could not be instantiated (e.g. no gradient
    /// oracle, not enough valid sample pairs).
    PreconditionFailed,
    /// A structural assumption is violated (wrong dimensions, indefinite
    /// curvature block).
    StructureViolation,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub condition: &'static str,
    pub verdict: Verdict,
    pub samples_checked: usize,
    pub worst_margin: f64,
    pub witness: Vec<f64>,
}

/// Injectivity of `y -> grad_x Phi(x, y)` over a finite grid: no two distinct
/// grid points may produce nearly identical partial gradients.
pub fn check_twist(c: &Coupling, x: &[f64], y_grid: &[Vec<f64>], tol: f64) -> Result<RegularityReport> {
    if c.dim_y > c.dim_x {
        // a map from a higher-dimensional Y cannot be injective onto R^n
        // in the smooth twisted sense; reject structurally
        return Ok(RegularityReport {
            condition: "twist",
            verdict: Verdict::StructureViolation,
            samples_checked: 0,
            worst_margin: f64::NAN,
            witness: vec![],
        });
    }
    let grads: Vec<Vec<f64>> =
        y_grid.iter().map(|y| c.grad_x(x, y)).collect::<Result<_>>()?;
    let mut worst = f64::INFINITY;
    let mut witness = vec![];
    let mut verdict = Verdict::Holds;
    for i in 0..y_grid.len() {
        for j in (i + 1)..y_grid.len() {
            let dy = domain::dist(&y_grid[i], &y_grid[j]);
            if dy <= tol {
                continue;
            }
            let dg = domain::dist(&grads[i], &grads[j]);
            let ratio = dg / (1.0 + dy);
            if ratio < worst {
                worst = ratio;
                witness = y_grid[i].iter().chain(&y_grid[j]).copied().collect();
            }
            if dg <= tol * (1.0 + dy) {
                verdict = Verdict::Fails;
            }
        }
    }
    Ok(RegularityReport {
        condition: "twist",
        verdict,
        samples_checked: y_grid.len(),
        worst_margin: worst,
        witness,
    })
}

/// Smallest singular value of a matrix (the local strong twist margin).
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Local strong twist: `hess_xy(x, y)` has full rank, measured by its
/// smallest singular value exceeding `1e-8`.
pub fn check_local_strong_twist(c: &Coupling, x: &[f64], y: &[f64]) -> Result<RegularityReport> {
    let blocks = c.hess(x, y)?;
    let sigma = min_singular_value(&blocks.xy);
    Ok(RegularityReport {
        condition: "local_strong_twist",
        verdict: if sigma > 1e-8 { Verdict::Holds } else { Verdict::Fails },
        samples_checked: 1,
        worst_margin: sigma,
        witness: y.to_vec(),
    })
}

/// Phi-prox-regularity of `g` at `xbar` for `ybar`, sampled on the
/// `eps`-neighborhood: for `x` near `xbar` with `g(x) <= g(xbar) + eps` and
/// `y = G(x, grad g(x))` near `ybar`, the inequality
/// `g(x') >= g(x) + Phi(x', y) - Phi(x, y)` must hold for all `x'` near
/// `xbar`. The reported margin is the worst slack normalized by
/// `||x' - x||^2`, so verdicts are scale-free.
pub fn check_phi_prox_regularity(
    g: &TestFunction,
    c: &Coupling,
    xbar: &[f64],
    ybar: &[f64],
    eps: f64,
    n_samples: usize,
    _cfg: &SolverConfig,
) -> Result<RegularityReport> {
    let precondition_failed = |n| RegularityReport {
        condition: "phi_prox_regularity",
        verdict: Verdict::PreconditionFailed,
        samples_checked: n,
        worst_margin: f64::NAN,
        witness: vec![],
    };
    if !g.has_grad() || !c.has_twist_inverse() || g.near_kink(xbar, 1e-9) {
        return Ok(precondition_failed(0));
    }
    let g_bar = g.value(xbar);
    if !g_bar.is_finite() {
        return Err(Error::DomainViolation(format!("g(xbar) not finite at {xbar:?}")));
    }
    let xs = sample::points_in_ball(xbar, eps, n_samples, 101);
    let xps = sample::points_in_ball(xbar, eps, n_samples, 9001);
    let mut worst = f64::INFINITY;
    let mut witness = vec![];
    let mut checked = 0usize;
    for x in &xs {
        if !c.x_dom.interior_contains(x) || g.near_kink(x, 1e-9) {
            continue;
        }
        let gx = g.value(x);
        if !(gx.is_finite() && gx <= g_bar + eps) {
            continue;
        }
        let y = match subdiff::smooth_phi_gradient(g, c, x) {
            Ok(y) => y,
            Err(_) => continue,
        };
        if domain::dist(&y, ybar) > eps {
            continue;
        }
        let phi_x = c.eval(x, &y)?;
        for xp in &xps {
            let d = domain::dist(xp, x);
            if d <= 1e-6 * eps {
                continue;
            }
            let gxp = g.value(xp);
            if !gxp.is_finite() {
                continue;
            }
            let phi_xp = match c.eval(xp, &y) {
                Ok(p) => p,
                Err(_) => continue,
            };
            checked += 1;
            let slack = (gxp - gx - (phi_xp - phi_x)) / (d * d);
            if slack < worst {
                worst = slack;
                witness = x.iter().chain(xp.iter()).copied().collect();
            }
        }
    }
    if checked < 10 {
        return Ok(precondition_failed(checked));
    }
    Ok(RegularityReport {
        condition: "phi_prox_regularity",
        verdict: if worst >= -1e-6 { Verdict::Holds } else { Verdict::Fails },
        samples_checked: checked,
        worst_margin: worst,
        witness,
    })
}

/// Strict Phi-monotonicity of the localized subgradient graph: for distinct
/// filtered pairs `(x, y)`, `(x', y')`,
/// `Phi(x', y) - Phi(x, y) + Phi(x, y') - Phi(x', y') < 0` strictly.
/// Margin is the worst (largest) cross-term normalized by `||x - x'||^2`.
pub fn check_strict_monotonicity(
    g: &TestFunction,
    c: &Coupling,
    xbar: &[f64],
    ybar: &[f64],
    eps: f64,
    n_samples: usize,
    _cfg: &SolverConfig,
) -> Result<RegularityReport> {
    let precondition_failed = |n| RegularityReport {
        condition: "strict_monotonicity",
        verdict: Verdict::PreconditionFailed,
        samples_checked: n,
        worst_margin: f64::NAN,
        witness: vec![],
    };
    if !g.has_grad() || !c.has_twist_inverse() || g.near_kink(xbar, 1e-9) {
        return Ok(precondition_failed(0));
    }
    // filtered graph points: x near xbar, y = G(x, grad g(x)) near ybar
    let mut graph: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for x in sample::points_in_ball(xbar, eps, 4 * n_samples, 303) {
        if !c.x_dom.interior_contains(&x) || g.near_kink(&x, 1e-9) {
            continue;
        }
        if let Ok(y) = subdiff::smooth_phi_gradient(g, c, &x) {
            if domain::dist(&y, ybar) <= eps {
                graph.push((x, y));
            }
        }
        if graph.len() >= 2 * n_samples {
            break;
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut witness = vec![];
    let mut pairs = 0usize;
    for i in 0..graph.len() {
        for j in (i + 1)..graph.len() {
            let (x, y) = &graph[i];
            let (xp, yp) = &graph[j];
            let d = domain::dist(x, xp);
            if d <= 1e-6 * eps {
                continue;
            }
            let e = c.eval(xp, y)? - c.eval(x, y)? + c.eval(x, yp)? - c.eval(xp, yp)?;
            pairs += 1;
            let m = e / (d * d);
            if m > worst {
                worst = m;
                witness = x.iter().chain(xp.iter()).copied().collect();
            }
        }
    }
    // a degenerate filter must not produce a vacuous pass
    if pairs < 100 {
        return Ok(precondition_failed(pairs));
    }
    Ok(RegularityReport {
        condition: "strict_monotonicity",
        verdict: if worst < -1e-6 { Verdict::Holds } else { Verdict::Fails },
        samples_checked: pairs,
        worst_margin: worst,
        witness,
    })
}

/// Single-valuedness of the generalized prox on a neighborhood of `ybar`:
/// every probe (including the center itself) must yield exactly one cluster.
pub fn check_prox_single_valued(
    g: &TestFunction,
    c: &Coupling,
    ybar: &[f64],
    radius: f64,
    n_probe: usize,
    cfg: &SolverConfig,
) -> Result<RegularityReport> {
    let mut probes = vec![ybar.to_vec()];
    probes.extend(sample::points_in_ball(ybar, radius, n_probe.saturating_sub(1), 707));
    let mut checked = 0usize;
    let mut worst = f64::INFINITY;
    let mut witness = vec![];
    let mut verdict = Verdict::Holds;
    for y in probes {
        if !c.y_dom.contains(&y) {
            continue;
        }
        let r = solver::prox(g, c, &y, cfg)?;
        if !r.value.is_finite() {
            continue;
        }
        checked += 1;
        // margin: negative cluster surplus (0 means exactly single-valued)
        let m = 1.0 - r.minimizers.len() as f64;
        if m < worst {
            worst = m;
            witness = y.clone();
        }
        if r.minimizers.len() != 1 {
            verdict = Verdict::Fails;
        }
    }
    if checked == 0 {
        verdict = Verdict::PreconditionFailed;
    }
    Ok(RegularityReport {
        condition: "prox_single_valued",
        verdict,
        samples_checked: checked,
        worst_margin: worst,
        witness,
    })
}

/// Eigenvalue condition `lambda_max(M) < 1/r` for `M = -hess_xx(xbar, ybar)^{-1}`.
/// `r = None` or `r = 0` means the bound is `+inf` (convex-style regularity).
pub fn check_eigen_condition(
    prox_regular_r: Option<f64>,
    c: &Coupling,
    xbar: &[f64],
    ybar: &[f64],
) -> Result<RegularityReport> {
    let blocks = c.hess(xbar, ybar)?;
    let sym = 0.5 * (&blocks.xx + blocks.xx.transpose());
    let eig = sym.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_eig >= 0.0 {
        // hess_xx must be negative definite for M to be defined
        return Ok(RegularityReport {
            condition: "eigen_condition",
            verdict: Verdict::StructureViolation,
            samples_checked: 1,
            worst_margin: max_eig,
            witness: ybar.to_vec(),
        });
    }
    // M = -hess_xx^{-1} has eigenvalues -1/lambda_i
    let lambda_max_m =
        eig.eigenvalues.iter().map(|l| -1.0 / l).fold(f64::NEG_INFINITY, f64::max);
    let bound = match prox_regular_r {
        Some(r) if r > 0.0 => 1.0 / r,
        _ => f64::INFINITY,
    };
    let margin = bound - lambda_max_m;
    Ok(RegularityReport {
        condition: "eigen_condition",
        verdict: if margin > 1e-12 { Verdict::Holds } else { Verdict::Fails },
        samples_checked: 1,
        worst_margin: margin,
        witness: ybar.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Kernel, KernelId};
    use crate::testfns;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn twist_holds_for_injective_families() {
        let grids = sample::points_in_box(&[-3.0], &[3.0], 40, 3);
        let c = Coupling::euclidean(1, 0.5).unwrap();
        let rep = check_twist(&c, &[0.2], &grids, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        let rep = check_twist(&Coupling::exp_coupling(), &[0.0], &grids, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        // entropic on positive grid
        let kl = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        let c = Coupling::entropic(kl, 1.0).unwrap();
        let grids = sample::points_in_box(&[0.3], &[3.0], 40, 3);
        let rep = check_twist(&c, &[1.0], &grids, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn twist_rejects_quadratic_transform() {
        let c = Coupling::quadratic_transform(1).unwrap();
        let grid = sample::points_in_box(&[-1.0, 0.5], &[1.0, 2.0], 10, 5);
        let rep = check_twist(&c, &[0.0], &grid, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::StructureViolation);
    }

    #[test]
    fn strong_twist_margins() {
        let c = Coupling::euclidean(2, 0.5).unwrap();
        let rep = check_local_strong_twist(&c, &[0.0, 0.0], &[1.0, -1.0]).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!((rep.worst_margin - 2.0).abs() < 1e-12); // sigma_min(I/gamma)
        let bs = Kernel::new(KernelId::BoltzmannShannon, 2, vec![]).unwrap();
        let c = Coupling::left_bregman(bs, 1.0).unwrap();
        let rep = check_local_strong_twist(&c, &[0.5, 0.5], &[2.0, 0.25]).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        // hess_xy = diag(1/y_i): sigma_min = 1/2 at y = (2, 0.25)
        assert!((rep.worst_margin - 0.5).abs() < 1e-12);
        // degenerate test double: a zero row kills the margin
        let mut m = DMatrix::identity(2, 2);
        m[(1, 1)] = 0.0;
        assert!(min_singular_value(&m) <= 1e-12);
    }

    #[test]
    fn prox_regularity_positive_and_negative() {
        let g = testfns::quad(1);
        let c = Coupling::euclidean(1, 1.0).unwrap();
        let xbar = [0.7];
        let ybar = subdiff::smooth_phi_gradient(&g, &c, &xbar).unwrap();
        let rep = check_phi_prox_regularity(&g, &c, &xbar, &ybar, 0.5, 60, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "margin {}", rep.worst_margin);

        // double_well at the basin with small gamma: locally strongly convex
        let dw = testfns::double_well();
        let c005 = Coupling::euclidean(1, 0.05).unwrap();
        let ybar = subdiff::smooth_phi_gradient(&dw, &c005, &[1.0]).unwrap();
        let rep = check_phi_prox_regularity(&dw, &c005, &[1.0], &ybar, 0.1, 60, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "margin {}", rep.worst_margin);

        // double_well at the hilltop with gamma = 1: fails
        let c1 = Coupling::euclidean(1, 1.0).unwrap();
        let rep = check_phi_prox_regularity(&dw, &c1, &[0.0], &[0.0], 0.5, 60, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails, "margin {}", rep.worst_margin);

        // neg_abs at the kink: precondition unsatisfiable
        let na = testfns::neg_abs();
        let rep = check_phi_prox_regularity(&na, &c1, &[0.0], &[0.0], 0.5, 60, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::PreconditionFailed);
    }

    #[test]
    fn strict_monotonicity_positive_and_negative() {
        let g = testfns::quad(1);
        let c = Coupling::euclidean(1, 1.0).unwrap();
        let ybar = subdiff::smooth_phi_gradient(&g, &c, &[0.3]).unwrap();
        let rep = check_strict_monotonicity(&g, &c, &[0.3], &ybar, 0.5, 40, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "margin {}", rep.worst_margin);
        assert!(rep.samples_checked >= 100);

        // neg_quad with a large step: the cross-term flips sign
        let nq = testfns::neg_quad(1);
        let c2 = Coupling::euclidean(1, 2.0).unwrap();
        let ybar = subdiff::smooth_phi_gradient(&nq, &c2, &[0.3]).unwrap();
        let rep = check_strict_monotonicity(&nq, &c2, &[0.3], &ybar, 0.5, 40, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails, "margin {}", rep.worst_margin);
    }

    #[test]
    fn single_valuedness_positive_and_negative() {
        let g = testfns::quad(1);
        let c = Coupling::euclidean(1, 1.0).unwrap();
        let rep = check_prox_single_valued(&g, &c, &[0.5], 0.3, 8, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);

        let dw = testfns::double_well();
        // the center ybar = 0 itself is the multi-valued point; it must be
        // probed even if the random ball misses it
        let rep = check_prox_single_valued(&dw, &c, &[0.0], 0.01, 8, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);

        let c005 = Coupling::euclidean(1, 0.05).unwrap();
        let rep = check_prox_single_valued(&dw, &c005, &[1.0], 0.05, 8, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn eigen_condition_cases() {
        // euclidean: M = gamma I, condition gamma < 1/r
        let c = Coupling::euclidean(1, 0.2).unwrap();
        let rep = check_eigen_condition(Some(4.0), &c, &[0.0], &[0.0]).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds); // 0.2 < 0.25
        let c = Coupling::euclidean(1, 0.3).unwrap();
        let rep = check_eigen_condition(Some(4.0), &c, &[0.0], &[0.0]).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails); // 0.3 > 0.25
        // r = 0 (convex): bound infinite
        let rep = check_eigen_condition(Some(0.0), &c, &[0.0], &[0.0]).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        // quadratic_transform with nonpositive r-component: hess_xx psd
        let qt = Coupling::quadratic_transform(1).unwrap();
        let rep = check_eigen_condition(Some(1.0), &qt, &[0.0], &[0.5, -1.0]).unwrap();
        assert_eq!(rep.verdict, Verdict::StructureViolation);
    }
}
