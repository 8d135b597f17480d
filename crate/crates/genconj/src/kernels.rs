//! Legendre kernel functions.
//!
//! Every kernel here is separable, `h(x) = sum_i k(x_i)`, built from a scalar
//! Legendre function `k` with a closed-form convex conjugate. The gradient of
//! a Legendre function is a bijection between the interiors of the primal and
//! dual domains, which the coupling module relies on for twist inverses.

use crate::domain::{BoxDomain, Interval};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelId {
    /// `a/2 * t^2` (self-conjugate for `a = 1`)
    Quadratic,
    /// `t log t - t` on `[0, inf)`, with `0 log 0 = 0`
    BoltzmannShannon,
    /// `t log t - t + 1` on `[0, inf)`; the KL divergence generator
    KlGenerator,
    /// `cosh t`; strongly convex with modulus 1, full domain
    Cosh,
    /// `a/4 t^4 + b/2 t^2`; conjugate gradient via Cardano's formula
    QuarticQuadratic,
}

impl KernelId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(KernelId::Quadratic),
            "boltzmann_shannon" => Ok(KernelId::BoltzmannShannon),
            "kl_generator" => Ok(KernelId::KlGenerator),
            "cosh" => Ok(KernelId::Cosh),
            "quartic_quadratic" => Ok(KernelId::QuarticQuadratic),
            other => Err(Error::UnknownKernel(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelId::Quadratic => "quadratic",
            KernelId::BoltzmannShannon => "boltzmann_shannon",
            KernelId::KlGenerator => "kl_generator",
            KernelId::Cosh => "cosh",
            KernelId::QuarticQuadratic => "quartic_quadratic",
        }
    }
}

/// A separable Legendre kernel on `R^dim`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub id: KernelId,
    pub dim: usize,
    pub params: Vec<f64>,
    pub dom: BoxDomain,
}

/// Unique real root of `a t^3 + b t = v` for `a >= 0`, `b > 0` (Cardano).
fn cubic_root(a: f64, b: f64, v: f64) -> f64 {
    if a == 0.0 {
        return v / b;
    }
    // t^3 + p t = q with p > 0 has exactly one real root
    let p = b / a;
    let q = v / a;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let t = (q / 2.0 + disc).cbrt() + (q / 2.0 - disc).cbrt();
    // one Newton step to clean up rounding from the cube roots
    let f = a * t * t * t + b * t - v;
    let df = 3.0 * a * t * t + b;
    t - f / df
}

pub fn make_kernel(id: &str, dim: usize, params: &[f64]) -> Result<Kernel> {
    let id = KernelId::parse(id)?;
    Kernel::new(id, dim, params.to_vec())
}

impl Kernel {
    pub fn new(id: KernelId, dim: usize, params: Vec<f64>) -> Result<Self> {
        match id {
            KernelId::Quadratic => {
                let a = params.first().copied().unwrap_or(1.0);
                if a <= 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "quadratic kernel needs positive curvature, got {a}"
                    )));
                }
                Ok(Kernel { id, dim, params: vec![a], dom: BoxDomain::reals(dim) })
            }
            KernelId::BoltzmannShannon | KernelId::KlGenerator => {
                if !params.is_empty() {
                    return Err(Error::InvalidParams(format!("{} takes no parameters", id.name())));
                }
                Ok(Kernel {
                    id,
                    dim,
                    params: vec![],
                    dom: BoxDomain::new(vec![Interval::nonneg(); dim]),
                })
            }
            KernelId::Cosh => {
                if !params.is_empty() {
                    return Err(Error::InvalidParams("cosh takes no parameters".into()));
                }
                Ok(Kernel { id, dim, params: vec![], dom: BoxDomain::reals(dim) })
            }
            KernelId::QuarticQuadratic => {
                let a = params.first().copied().unwrap_or(1.0);
                let b = params.get(1).copied().unwrap_or(1.0);
                if a < 0.0 || b <= 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "quartic_quadratic needs a >= 0, b > 0, got a={a}, b={b}"
                    )));
                }
                Ok(Kernel { id, dim, params: vec![a, b], dom: BoxDomain::reals(dim) })
            }
        }
    }

    // scalar pieces ---------------------------------------------------------

    pub fn val1(&self, t: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => 0.5 * self.params[0] * t * t,
            KernelId::BoltzmannShannon => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln() - t
                }
            }
            KernelId::KlGenerator => {
                if t == 0.0 {
                    1.0
                } else {
                    t * t.ln() - t + 1.0
                }
            }
            KernelId::Cosh => t.cosh(),
            KernelId::QuarticQuadratic => {
                0.25 * self.params[0] * t.powi(4) + 0.5 * self.params[1] * t * t
            }
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => self.params[0] * t,
            KernelId::BoltzmannShannon | KernelId::KlGenerator => t.ln(),
            KernelId::Cosh => t.sinh(),
            KernelId::QuarticQuadratic => self.params[0] * t.powi(3) + self.params[1] * t,
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => self.params[0],
            KernelId::BoltzmannShannon | KernelId::KlGenerator => 1.0 / t,
            KernelId::Cosh => t.cosh(),
            KernelId::QuarticQuadratic => 3.0 * self.params[0] * t * t + self.params[1],
        }
    }

    pub fn d3(&self, t: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => 0.0,
            KernelId::BoltzmannShannon | KernelId::KlGenerator => -1.0 / (t * t),
            KernelId::Cosh => t.sinh(),
            KernelId::QuarticQuadratic => 6.0 * self.params[0] * t,
        }
    }

    pub fn conj_val1(&self, s: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => 0.5 * s * s / self.params[0],
            KernelId::BoltzmannShannon => s.exp(),
            KernelId::KlGenerator => s.exp() - 1.0,
            KernelId::Cosh => s * s.asinh() - (1.0 + s * s).sqrt(),
            KernelId::QuarticQuadratic => {
                let t = cubic_root(self.params[0], self.params[1], s);
                s * t - self.val1(t)
            }
        }
    }

    pub fn conj_d1(&self, s: f64) -> f64 {
        match self.id {
            KernelId::Quadratic => s / self.params[0],
            KernelId::BoltzmannShannon | KernelId::KlGenerator => s.exp(),
            KernelId::Cosh => s.asinh(),
            KernelId::QuarticQuadratic => cubic_root(self.params[0], self.params[1], s),
        }
    }

    // vector wrappers -------------------------------------------------------

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|&t| self.val1(t)).sum()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| self.d1(t)).collect()
    }

    pub fn hess_diag(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| self.d2(t)).collect()
    }

    pub fn third_diag(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| self.d3(t)).collect()
    }

    pub fn hess(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.hess_diag(x)))
    }

    pub fn conj_value(&self, v: &[f64]) -> f64 {
        v.iter().map(|&s| self.conj_val1(s)).sum()
    }

    pub fn conj_grad(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&s| self.conj_d1(s)).collect()
    }

    /// Whether the kernel's effective domain is all of `R^n`.
    pub fn full_domain(&self) -> bool {
        self.dom.axes.iter().all(|a| !a.lo.is_finite() && !a.hi.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;

    fn all_kernels(dim: usize) -> Vec<Kernel> {
        vec![
            Kernel::new(KernelId::Quadratic, dim, vec![]).unwrap(),
            Kernel::new(KernelId::BoltzmannShannon, dim, vec![]).unwrap(),
            Kernel::new(KernelId::KlGenerator, dim, vec![]).unwrap(),
            Kernel::new(KernelId::Cosh, dim, vec![]).unwrap(),
            Kernel::new(KernelId::QuarticQuadratic, dim, vec![]).unwrap(),
        ]
    }

    fn interior_samples(k: &Kernel, count: usize) -> Vec<Vec<f64>> {
        // stay well inside [0.05, 3] for log-type kernels, [-3, 3] otherwise
        let (lo, hi) = if k.full_domain() { (-3.0, 3.0) } else { (0.05, 3.0) };
        sample::points_in_box(&vec![lo; k.dim], &vec![hi; k.dim], count, 0)
    }

    #[test]
    fn quadratic_self_conjugate() {
        let k = Kernel::new(KernelId::Quadratic, 2, vec![]).unwrap();
        assert_eq!(k.grad(&[1.0, 2.0]), vec![1.0, 2.0]);
        assert_relative_eq!(k.conj_value(&[1.0, 2.0]), 2.5);
    }

    #[test]
    fn kl_generator_normalization() {
        // phi(1) = phi'(1) = 0, phi*(s) = e^s - 1, (phi*)'(s) = e^s
        let k = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        assert_eq!(k.val1(1.0), 0.0);
        assert_eq!(k.d1(1.0), 0.0);
        assert_relative_eq!(k.conj_val1(1.0), 1.0_f64.exp() - 1.0);
        assert_relative_eq!(k.conj_d1(0.5), 0.5_f64.exp());
        // continuous extension at 0
        assert_eq!(k.val1(0.0), 1.0);
    }

    #[test]
    fn boltzmann_shannon_round_trip() {
        let k = Kernel::new(KernelId::BoltzmannShannon, 2, vec![]).unwrap();
        let x = [0.5, 2.0];
        let back = k.conj_grad(&k.grad(&x));
        assert_relative_eq!(back[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(back[1], 2.0, max_relative = 1e-12);
        assert_eq!(k.val1(0.0), 0.0);
    }

    #[test]
    fn young_equality_on_sampled_points() {
        for k in all_kernels(2) {
            for x in interior_samples(&k, 100) {
                let g = k.grad(&x);
                let lhs = k.value(&x) + k.conj_value(&g);
                let rhs: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * (1.0 + k.value(&x).abs()),
                    "Young equality failed for {} at {:?}: {} vs {}",
                    k.id.name(),
                    x,
                    lhs,
                    rhs
                );
            }
        }
    }

    #[test]
    fn gradient_bijection_round_trips() {
        for k in all_kernels(2) {
            for x in interior_samples(&k, 100) {
                let back = k.conj_grad(&k.grad(&x));
                for (a, b) in x.iter().zip(&back) {
                    assert!((a - b).abs() <= 1e-8, "{}: {a} vs {b}", k.id.name());
                }
                let v: Vec<f64> = x.iter().map(|t| 0.3 * t).collect();
                let fwd = k.grad(&k.conj_grad(&v));
                for (a, b) in v.iter().zip(&fwd) {
                    assert!((a - b).abs() <= 1e-8, "{}: {a} vs {b}", k.id.name());
                }
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        for k in all_kernels(1) {
            for x in interior_samples(&k, 30) {
                let t = x[0];
                let h = 1e-6 * (1.0 + t.abs());
                let fd = (k.d1(t + h) - k.d1(t - h)) / (2.0 * h);
                let an = k.d2(t);
                assert!(
                    (fd - an).abs() <= 1e-5 * (1.0 + an.abs()),
                    "{}: fd {fd} vs analytic {an} at {t}",
                    k.id.name()
                );
            }
        }
    }

    #[test]
    fn hessian_positive_definite_on_interior() {
        for k in all_kernels(3) {
            for x in interior_samples(&k, 20) {
                for d in k.hess_diag(&x) {
                    assert!(d > 0.0, "{} hessian not PD at {:?}", k.id.name(), x);
                }
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(Kernel::new(KernelId::Quadratic, 1, vec![-1.0]).is_err());
        assert!(Kernel::new(KernelId::QuarticQuadratic, 1, vec![1.0, 0.0]).is_err());
        assert!(make_kernel("no_such_kernel", 1, &[]).is_err());
    }

    #[test]
    fn cardano_solves_cubic() {
        for v in [-10.0, -0.3, 0.0, 0.7, 25.0] {
            let t = cubic_root(1.0, 1.0, v);
            assert!((t * t * t + t - v).abs() < 1e-12, "root residual at v={v}");
        }
    }
}
