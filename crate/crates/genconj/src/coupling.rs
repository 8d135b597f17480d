//! Coupling functions `Phi: X x Y -> R` and their derivative blocks.
//!
//! Six families are supported, plus a 1-D exponential coupling used by the
//! counterexample suite. Each family exposes `eval`, the partial gradients,
//! the three second-derivative blocks, and (where it exists) the closed-form
//! twist inverse `G(x, v)` solving `grad_x Phi(x, y) = v` for `y`.

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Euclidean,
    LeftBregman,
    RightBregman,
    Anisotropic,
    Entropic,
    QuadraticTransform,
    Exp,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Family::Euclidean),
            "left_bregman" => Ok(Family::LeftBregman),
            "right_bregman" => Ok(Family::RightBregman),
            "anisotropic" => Ok(Family::Anisotropic),
            "entropic" => Ok(Family::Entropic),
            "quadratic_transform" => Ok(Family::QuadraticTransform),
            "exp_coupling" => Ok(Family::Exp),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Euclidean => "euclidean",
            Family::LeftBregman => "left_bregman",
            Family::RightBregman => "right_bregman",
            Family::Anisotropic => "anisotropic",
            Family::Entropic => "entropic",
            Family::QuadraticTransform => "quadratic_transform",
            Family::Exp => "exp_coupling",
        }
    }
}

/// Second-derivative blocks of `Phi` at a point; `xy` has shape `n x m`.
#[derive(Debug, Clone)]
pub struct HessBlocks {
    pub xx: DMatrix<f64>,
    pub xy: DMatrix<f64>,
    pub yy: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct Coupling {
    pub family: Family,
    pub gamma: f64,
    pub kernel: Option<Kernel>,
    pub dim_x: usize,
    pub dim_y: usize,
    pub x_dom: BoxDomain,
    pub y_dom: BoxDomain,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("step parameter gamma must be positive, got {gamma}")))
    }
}

impl Coupling {
    pub fn euclidean(dim: usize, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Coupling {
            family: Family::Euclidean,
            gamma,
            kernel: None,
            dim_x: dim,
            dim_y: dim,
            x_dom: BoxDomain::reals(dim),
            y_dom: BoxDomain::reals(dim),
        })
    }

    /// `Phi(x, y) = -D_h(x, y) / gamma` on `X = dom h`, `Y = int dom h`.
    pub fn left_bregman(kernel: Kernel, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let dim = kernel.dim;
        let x_dom = kernel.dom.clone();
        let mut y_axes = kernel.dom.axes.clone();
        for a in &mut y_axes {
            if a.lo.is_finite() {
                a.lo_open = true;
            }
            if a.hi.is_finite() {
                a.hi_open = true;
            }
        }
        Ok(Coupling {
            family: Family::LeftBregman,
            gamma,
            kernel: Some(kernel),
            dim_x: dim,
            dim_y: dim,
            x_dom,
            y_dom: BoxDomain::new(y_axes),
        })
    }

    /// `Phi(x, y) = -D_h(y, x) / gamma`; requires `dom h = R^n` and PD hessian.
    pub fn right_bregman(kernel: Kernel, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !kernel.full_domain() {
            return Err(Error::InvalidParams(
                "right_bregman requires a kernel with full domain".into(),
            ));
        }
        let dim = kernel.dim;
        Ok(Coupling {
            family: Family::RightBregman,
            gamma,
            kernel: Some(kernel),
            dim_x: dim,
            dim_y: dim,
            x_dom: BoxDomain::reals(dim),
            y_dom: BoxDomain::reals(dim),
        })
    }

    /// `Phi(x, y) = -gamma * phi((x - y) / gamma)` (epi-scaled reference).
    pub fn anisotropic(kernel: Kernel, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !kernel.full_domain() {
            return Err(Error::InvalidParams(
                "anisotropic requires a reference with full domain".into(),
            ));
        }
        let dim = kernel.dim;
        Ok(Coupling {
            family: Family::Anisotropic,
            gamma,
            kernel: Some(kernel),
            dim_x: dim,
            dim_y: dim,
            x_dom: BoxDomain::reals(dim),
            y_dom: BoxDomain::reals(dim),
        })
    }

    /// `Phi(x, y) = -gamma * sum_i y_i phi(x_i / y_i)` on `R^n_+ x R^n_++`.
    pub fn entropic(generator: Kernel, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let dim = generator.dim;
        Ok(Coupling {
            family: Family::Entropic,
            gamma,
            kernel: Some(generator),
            dim_x: dim,
            dim_y: dim,
            x_dom: BoxDomain::nonneg(dim),
            y_dom: BoxDomain::positive(dim),
        })
    }

    /// `Phi(x, (v, r)) = <x, v> - r/2 ||x||^2` with `Y = R^n x R`.
    pub fn quadratic_transform(dim: usize) -> Result<Self> {
        Ok(Coupling {
            family: Family::QuadraticTransform,
            gamma: 1.0,
            kernel: None,
            dim_x: dim,
            dim_y: dim + 1,
            x_dom: BoxDomain::reals(dim),
            y_dom: BoxDomain::reals(dim + 1),
        })
    }

    /// 1-D `Phi(x, y) = exp(x - y)`, used only by the counterexample suite.
    pub fn exp_coupling() -> Self {
        Coupling {
            family: Family::Exp,
            gamma: 1.0,
            kernel: None,
            dim_x: 1,
            dim_y: 1,
            x_dom: BoxDomain::reals(1),
            y_dom: BoxDomain::reals(1),
        }
    }

    fn check_dims(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.dim_x {
            return Err(Error::DimMismatch { expected: self.dim_x, got: x.len() });
        }
        if y.len() != self.dim_y {
            return Err(Error::DimMismatch { expected: self.dim_y, got: y.len() });
        }
        Ok(())
    }

    fn check_domains(&self, x: &[f64], y: &[f64]) -> Result<()> {
        self.check_dims(x, y)?;
        if !self.x_dom.contains(x) {
            return Err(Error::DomainViolation(format!("x = {x:?} not in X")));
        }
        if !self.y_dom.contains(y) {
            return Err(Error::DomainViolation(format!("y = {y:?} not in Y")));
        }
        Ok(())
    }

    fn kern(&self) -> &Kernel {
        self.kernel.as_ref().expect("family requires a kernel")
    }

    /// Bregman divergence `D_h(a, b) = h(a) - h(b) - <grad h(b), a - b>`.
    fn bregman(&self, a: &[f64], b: &[f64]) -> f64 {
        let k = self.kern();
        let gb = k.grad(b);
        k.value(a) - k.value(b) - a.iter().zip(b).zip(&gb).map(|((ai, bi), g)| g * (ai - bi)).sum::<f64>()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_domains(x, y)?;
        let g = self.gamma;
        Ok(match self.family {
            Family::Euclidean => {
                -x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (2.0 * g)
            }
            Family::LeftBregman => -self.bregman(x, y) / g,
            Family::RightBregman => -self.bregman(y, x) / g,
            Family::Anisotropic => {
                let k = self.kern();
                let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - b) / g).collect();
                -g * k.value(&u)
            }
            Family::Entropic => {
                let k = self.kern();
                -g * x.iter().zip(y).map(|(&xi, &yi)| yi * k.val1(xi / yi)).sum::<f64>()
            }
            Family::QuadraticTransform => {
                let (v, r) = (&y[..self.dim_x], y[self.dim_x]);
                let ip: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
                let sq: f64 = x.iter().map(|a| a * a).sum();
                ip - 0.5 * r * sq
            }
            Family::Exp => (x[0] - y[0]).exp(),
        })
    }

    pub fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_domains(x, y)?;
        if !self.x_dom.interior_contains(x) {
            return Err(Error::DomainViolation(format!("x = {x:?} not in int X")));
        }
        let g = self.gamma;
        Ok(match self.family {
            Family::Euclidean => x.iter().zip(y).map(|(a, b)| -(a - b) / g).collect(),
            Family::LeftBregman => {
                let k = self.kern();
                let gx = k.grad(x);
                let gy = k.grad(y);
                gx.iter().zip(&gy).map(|(a, b)| -(a - b) / g).collect()
            }
            Family::RightBregman => {
                let k = self.kern();
                let h = k.hess_diag(x);
                x.iter().zip(y).zip(&h).map(|((a, b), d)| d * (b - a) / g).collect()
            }
            Family::Anisotropic => {
                let k = self.kern();
                x.iter().zip(y).map(|(a, b)| -k.d1((a - b) / g)).collect()
            }
            Family::Entropic => {
                let k = self.kern();
                x.iter().zip(y).map(|(&xi, &yi)| -g * k.d1(xi / yi)).collect()
            }
            Family::QuadraticTransform => {
                let (v, r) = (&y[..self.dim_x], y[self.dim_x]);
                x.iter().zip(v).map(|(a, b)| b - r * a).collect()
            }
            Family::Exp => vec![(x[0] - y[0]).exp()],
        })
    }

    pub fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_domains(x, y)?;
        let g = self.gamma;
        Ok(match self.family {
            Family::Euclidean => x.iter().zip(y).map(|(a, b)| (a - b) / g).collect(),
            Family::LeftBregman => {
                let k = self.kern();
                let h = k.hess_diag(y);
                x.iter().zip(y).zip(&h).map(|((a, b), d)| d * (a - b) / g).collect()
            }
            Family::RightBregman => {
                let k = self.kern();
                let gx = k.grad(x);
                let gy = k.grad(y);
                gy.iter().zip(&gx).map(|(a, b)| -(a - b) / g).collect()
            }
            Family::Anisotropic => {
                let k = self.kern();
                x.iter().zip(y).map(|(a, b)| k.d1((a - b) / g)).collect()
            }
            Family::Entropic => {
                let k = self.kern();
                x.iter()
                    .zip(y)
                    .map(|(&xi, &yi)| {
                        let t = xi / yi;
                        -g * (k.val1(t) - t * k.d1(t))
                    })
                    .collect()
            }
            Family::QuadraticTransform => {
                let mut out = x.to_vec();
                out.push(-0.5 * x.iter().map(|a| a * a).sum::<f64>());
                out
            }
            Family::Exp => vec![-(x[0] - y[0]).exp()],
        })
    }

    pub fn hess(&self, x: &[f64], y: &[f64]) -> Result<HessBlocks> {
        self.check_domains(x, y)?;
        let (n, m) = (self.dim_x, self.dim_y);
        let g = self.gamma;
        let diag = |v: Vec<f64>| DMatrix::from_diagonal(&DVector::from_vec(v));
        Ok(match self.family {
            Family::Euclidean => HessBlocks {
                xx: DMatrix::from_diagonal_element(n, n, -1.0 / g),
                xy: DMatrix::from_diagonal_element(n, m, 1.0 / g),
                yy: DMatrix::from_diagonal_element(m, m, -1.0 / g),
            },
            Family::LeftBregman => {
                let k = self.kern();
                let hx = k.hess_diag(x);
                let hy = k.hess_diag(y);
                let ty = k.third_diag(y);
                HessBlocks {
                    xx: diag(hx.iter().map(|d| -d / g).collect()),
                    xy: diag(hy.iter().map(|d| d / g).collect()),
                    yy: diag(
                        ty.iter()
                            .zip(x.iter().zip(y))
                            .zip(&hy)
                            .map(|((t3, (a, b)), h2)| (t3 * (a - b) - h2) / g)
                            .collect(),
                    ),
                }
            }
            Family::RightBregman => {
                let k = self.kern();
                let hx = k.hess_diag(x);
                let hy = k.hess_diag(y);
                let tx = k.third_diag(x);
                HessBlocks {
                    xx: diag(
                        tx.iter()
                            .zip(x.iter().zip(y))
                            .zip(&hx)
                            .map(|((t3, (a, b)), h2)| (t3 * (b - a) - h2) / g)
                            .collect(),
                    ),
                    xy: diag(hx.iter().map(|d| d / g).collect()),
                    yy: diag(hy.iter().map(|d| -d / g).collect()),
                }
            }
            Family::Anisotropic => {
                let k = self.kern();
                let h: Vec<f64> = x.iter().zip(y).map(|(a, b)| k.d2((a - b) / g)).collect();
                HessBlocks {
                    xx: diag(h.iter().map(|d| -d / g).collect()),
                    xy: diag(h.iter().map(|d| d / g).collect()),
                    yy: diag(h.iter().map(|d| -d / g).collect()),
                }
            }
            Family::Entropic => {
                let k = self.kern();
                let t: Vec<f64> = x.iter().zip(y).map(|(a, b)| a / b).collect();
                let phi2: Vec<f64> = t.iter().map(|&ti| k.d2(ti)).collect();
                HessBlocks {
                    xx: diag(phi2.iter().zip(y).map(|(p, yi)| -g * p / yi).collect()),
                    xy: diag(
                        phi2.iter().zip(&t).zip(y).map(|((p, ti), yi)| g * p * ti / yi).collect(),
                    ),
                    yy: diag(
                        phi2.iter()
                            .zip(&t)
                            .zip(y)
                            .map(|((p, ti), yi)| -g * p * ti * ti / yi)
                            .collect(),
                    ),
                }
            }
            Family::QuadraticTransform => {
                let r = y[n];
                let mut xy = DMatrix::zeros(n, m);
                for i in 0..n {
                    xy[(i, i)] = 1.0;
                    xy[(i, n)] = -x[i];
                }
                HessBlocks {
                    xx: DMatrix::from_diagonal_element(n, n, -r),
                    xy,
                    yy: DMatrix::zeros(m, m),
                }
            }
            Family::Exp => {
                let e = (x[0] - y[0]).exp();
                HessBlocks {
                    xx: DMatrix::from_element(1, 1, e),
                    xy: DMatrix::from_element(1, 1, -e),
                    yy: DMatrix::from_element(1, 1, e),
                }
            }
        })
    }

    pub fn has_twist_inverse(&self) -> bool {
        !matches!(self.family, Family::QuadraticTransform)
    }

    /// The unique `y` with `grad_x Phi(x, y) = v`.
    pub fn twist_inverse(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim_x || v.len() != self.dim_x {
            return Err(Error::DimMismatch { expected: self.dim_x, got: x.len().max(v.len()) });
        }
        if !self.x_dom.interior_contains(x) {
            return Err(Error::DomainViolation(format!("x = {x:?} not in int X")));
        }
        let g = self.gamma;
        let y = match self.family {
            Family::Euclidean => x.iter().zip(v).map(|(a, b)| a + g * b).collect::<Vec<f64>>(),
            Family::LeftBregman => {
                let k = self.kern();
                let gx = k.grad(x);
                let s: Vec<f64> = gx.iter().zip(v).map(|(a, b)| a + g * b).collect();
                k.conj_grad(&s)
            }
            Family::RightBregman => {
                let k = self.kern();
                let h = k.hess_diag(x);
                x.iter().zip(v).zip(&h).map(|((a, b), d)| a + g * b / d).collect()
            }
            Family::Anisotropic => {
                let k = self.kern();
                x.iter().zip(v).map(|(a, b)| a - g * k.conj_d1(-b)).collect()
            }
            Family::Entropic => {
                let k = self.kern();
                let mut y = Vec::with_capacity(self.dim_x);
                for (&xi, &vi) in x.iter().zip(v) {
                    let denom = k.conj_d1(-vi / g);
                    if !(denom > 0.0) || !denom.is_finite() {
                        return Err(Error::OutOfRange(format!(
                            "entropic twist inverse undefined for v-component {vi}"
                        )));
                    }
                    y.push(xi / denom);
                }
                y
            }
            Family::QuadraticTransform => {
                return Err(Error::NoTwistInverse("quadratic_transform"))
            }
            Family::Exp => {
                if v[0] <= 0.0 {
                    return Err(Error::OutOfRange(format!(
                        "exp coupling gradient range is (0, inf), got {}",
                        v[0]
                    )));
                }
                vec![x[0] - v[0].ln()]
            }
        };
        if !self.y_dom.contains(&y) {
            return Err(Error::OutOfRange(format!("twist inverse left Y: {y:?}")));
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Kernel, KernelId};
    use crate::sample;
    use approx::assert_relative_eq;

    fn fd_grad(f: impl Fn(&[f64]) -> f64, p: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(p.len());
        for i in 0..p.len() {
            let h = 1e-6 * (1.0 + p[i].abs());
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[i] += h;
            b[i] -= h;
            out.push((f(&a) - f(&b)) / (2.0 * h));
        }
        out
    }

    fn families_for_test() -> Vec<(Coupling, f64, f64, f64, f64)> {
        // (coupling, x_lo, x_hi, y_lo, y_hi) for interior sampling
        let bs = Kernel::new(KernelId::BoltzmannShannon, 2, vec![]).unwrap();
        let cosh = Kernel::new(KernelId::Cosh, 2, vec![]).unwrap();
        let quartic = Kernel::new(KernelId::QuarticQuadratic, 2, vec![]).unwrap();
        let kl = Kernel::new(KernelId::KlGenerator, 2, vec![]).unwrap();
        vec![
            (Coupling::euclidean(2, 0.7).unwrap(), -2.0, 2.0, -2.0, 2.0),
            (Coupling::left_bregman(bs, 1.3).unwrap(), 0.2, 3.0, 0.2, 3.0),
            (Coupling::right_bregman(cosh, 0.9).unwrap(), -2.0, 2.0, -2.0, 2.0),
            (Coupling::anisotropic(quartic, 0.8).unwrap(), -2.0, 2.0, -2.0, 2.0),
            (Coupling::entropic(kl, 1.5).unwrap(), 0.2, 3.0, 0.2, 3.0),
        ]
    }

    #[test]
    fn euclidean_basics() {
        let c = Coupling::euclidean(2, 1.0).unwrap();
        assert_eq!(c.eval(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        let c = Coupling::euclidean(1, 0.5).unwrap();
        assert_eq!(c.grad_x(&[2.0], &[1.0]).unwrap(), vec![-2.0]);
        let c = Coupling::euclidean(1, 2.0).unwrap();
        assert_eq!(c.twist_inverse(&[1.0], &[3.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn entropic_kl_values() {
        let kl = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        let c = Coupling::entropic(kl, 1.0).unwrap();
        let v = c.eval(&[2.0], &[1.0]).unwrap();
        assert_relative_eq!(v, -(2.0 * 2.0_f64.ln() - 1.0), max_relative = 1e-12);
        // phi'(1) = 0
        let kl = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        let c2 = Coupling::entropic(kl, 2.0).unwrap();
        assert_eq!(c2.grad_x(&[1.0], &[1.0]).unwrap(), vec![0.0]);
        // invert -gamma log(x/y) = v  =>  y = x e^{v/gamma}
        let y = c2.twist_inverse(&[2.0], &[2.0 * 2.0_f64.ln()]).unwrap();
        assert_relative_eq!(y[0], 4.0, max_relative = 1e-10);
        let kl1 = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        let c3 = Coupling::entropic(kl1, 1.0).unwrap();
        let y = c3.twist_inverse(&[2.0], &[2.0_f64.ln()]).unwrap();
        assert_relative_eq!(y[0], 4.0, max_relative = 1e-12);
    }

    #[test]
    fn left_bregman_quadratic_reduces_to_euclidean() {
        let q = Kernel::new(KernelId::Quadratic, 2, vec![]).unwrap();
        let lb = Coupling::left_bregman(q, 0.6).unwrap();
        let eu = Coupling::euclidean(2, 0.6).unwrap();
        let pts = sample::points_in_box(&[-2.0, -2.0], &[2.0, 2.0], 100, 3);
        for w in pts.chunks(2) {
            if w.len() < 2 {
                break;
            }
            let (x, y) = (&w[0], &w[1]);
            assert_relative_eq!(
                lb.eval(x, y).unwrap(),
                eu.eval(x, y).unwrap(),
                epsilon = 1e-12
            );
            let (ga, gb) = (lb.grad_x(x, y).unwrap(), eu.grad_x(x, y).unwrap());
            for (a, b) in ga.iter().zip(&gb) {
                assert!((a - b).abs() < 1e-10);
            }
            let (ha, hb) = (lb.hess(x, y).unwrap(), eu.hess(x, y).unwrap());
            assert!((ha.xx.clone() - hb.xx.clone()).norm() < 1e-10);
            assert!((ha.yy.clone() - hb.yy.clone()).norm() < 1e-10);
        }
    }

    #[test]
    fn anisotropic_quadratic_reduces_to_euclidean() {
        let q = Kernel::new(KernelId::Quadratic, 2, vec![]).unwrap();
        let an = Coupling::anisotropic(q, 0.4).unwrap();
        let eu = Coupling::euclidean(2, 0.4).unwrap();
        let pts = sample::points_in_box(&[-2.0, -2.0], &[2.0, 2.0], 60, 11);
        for w in pts.chunks(2) {
            if w.len() < 2 {
                break;
            }
            let (x, y) = (&w[0], &w[1]);
            assert_relative_eq!(an.eval(x, y).unwrap(), eu.eval(x, y).unwrap(), epsilon = 1e-10);
            let (ga, gb) = (an.grad_y(x, y).unwrap(), eu.grad_y(x, y).unwrap());
            for (a, b) in ga.iter().zip(&gb) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (c, xl, xh, yl, yh) in families_for_test() {
            let xs = sample::points_in_box(&vec![xl; 2], &vec![xh; 2], 50, 1);
            let ys = sample::points_in_box(&vec![yl; 2], &vec![yh; 2], 50, 101);
            for (x, y) in xs.iter().zip(&ys) {
                let gx = c.grad_x(x, y).unwrap();
                let fx = fd_grad(|p| c.eval(p, y).unwrap(), x);
                for (a, b) in gx.iter().zip(&fx) {
                    assert!(
                        (a - b).abs() <= 1e-5 * (1.0 + a.abs()),
                        "{} grad_x {a} vs fd {b}",
                        c.family.name()
                    );
                }
                let gy = c.grad_y(x, y).unwrap();
                let fy = fd_grad(|p| c.eval(x, p).unwrap(), y);
                for (a, b) in gy.iter().zip(&fy) {
                    assert!(
                        (a - b).abs() <= 1e-5 * (1.0 + a.abs()),
                        "{} grad_y {a} vs fd {b}",
                        c.family.name()
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_blocks_match_finite_differences() {
        for (c, xl, xh, yl, yh) in families_for_test() {
            let xs = sample::points_in_box(&vec![xl + 0.1; 2], &vec![xh - 0.1; 2], 25, 7);
            let ys = sample::points_in_box(&vec![yl + 0.1; 2], &vec![yh - 0.1; 2], 25, 207);
            for (x, y) in xs.iter().zip(&ys) {
                let hb = c.hess(x, y).unwrap();
                for i in 0..2 {
                    let h = 1e-5 * (1.0 + x[i].abs());
                    let mut a = x.clone();
                    let mut b = x.clone();
                    a[i] += h;
                    b[i] -= h;
                    let ga = c.grad_x(&a, y).unwrap();
                    let gb = c.grad_x(&b, y).unwrap();
                    for j in 0..2 {
                        let fd = (ga[j] - gb[j]) / (2.0 * h);
                        let an = hb.xx[(j, i)];
                        assert!(
                            (fd - an).abs() <= 1e-4 * (1.0 + an.abs()),
                            "{} hess_xx[{j}][{i}] fd {fd} vs {an}",
                            c.family.name()
                        );
                    }
                }
                for i in 0..2 {
                    let h = 1e-5 * (1.0 + y[i].abs());
                    let mut a = y.clone();
                    let mut b = y.clone();
                    a[i] += h;
                    b[i] -= h;
                    let ga = c.grad_x(x, &a).unwrap();
                    let gb = c.grad_x(x, &b).unwrap();
                    for j in 0..2 {
                        let fd = (ga[j] - gb[j]) / (2.0 * h);
                        let an = hb.xy[(j, i)];
                        assert!(
                            (fd - an).abs() <= 1e-4 * (1.0 + an.abs()),
                            "{} hess_xy[{j}][{i}] fd {fd} vs {an}",
                            c.family.name()
                        );
                    }
                    let gya = c.grad_y(x, &a).unwrap();
                    let gyb = c.grad_y(x, &b).unwrap();
                    for j in 0..2 {
                        let fd = (gya[j] - gyb[j]) / (2.0 * h);
                        let an = hb.yy[(j, i)];
                        assert!(
                            (fd - an).abs() <= 1e-4 * (1.0 + an.abs()),
                            "{} hess_yy[{j}][{i}] fd {fd} vs {an}",
                            c.family.name()
                        );
                    }
                }
                // symmetry of the square blocks
                assert!((hb.xx.clone() - hb.xx.transpose()).norm() < 1e-12);
                assert!((hb.yy.clone() - hb.yy.transpose()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twist_round_trip_all_families() {
        for (c, xl, xh, yl, yh) in families_for_test() {
            let xs = sample::points_in_box(&vec![xl; 2], &vec![xh; 2], 100, 13);
            let ys = sample::points_in_box(&vec![yl; 2], &vec![yh; 2], 100, 313);
            let mut sup = 0.0_f64;
            for (x, y) in xs.iter().zip(&ys) {
                let v = c.grad_x(x, y).unwrap();
                let back = c.twist_inverse(x, &v).unwrap();
                let err = crate::domain::dist(&back, y);
                sup = sup.max(err);
            }
            assert!(sup <= 1e-8, "{} twist round trip sup error {sup}", c.family.name());
        }
    }

    #[test]
    fn quadratic_transform_blocks() {
        let c = Coupling::quadratic_transform(1).unwrap();
        let hb = c.hess(&[0.7], &[0.3, 2.5]).unwrap();
        assert_eq!(hb.xx[(0, 0)], -2.5);
        assert_eq!(hb.xy[(0, 0)], 1.0);
        assert_eq!(hb.xy[(0, 1)], -0.7);
        assert!(c.twist_inverse(&[0.7], &[0.1]).is_err());
        assert!(!c.has_twist_inverse());
    }

    #[test]
    fn right_bregman_rejects_restricted_domain() {
        let bs = Kernel::new(KernelId::BoltzmannShannon, 1, vec![]).unwrap();
        assert!(Coupling::right_bregman(bs, 1.0).is_err());
    }

    #[test]
    fn domain_and_dim_errors() {
        let kl = Kernel::new(KernelId::KlGenerator, 1, vec![]).unwrap();
        let c = Coupling::entropic(kl, 1.0).unwrap();
        assert!(c.eval(&[-0.5], &[1.0]).is_err());
        assert!(c.eval(&[1.0], &[0.0]).is_err());
        assert!(c.eval(&[1.0, 2.0], &[1.0]).is_err());
        // boundary x = 0 is in X but not int X
        assert!(c.eval(&[0.0], &[1.0]).is_ok());
        assert!(c.grad_x(&[0.0], &[1.0]).is_err());
    }
}
