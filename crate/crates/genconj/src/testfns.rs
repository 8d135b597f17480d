//! Catalog of target functions `g` with value oracles, optional gradients,
//! and declared analytic metadata.
//!
//! Values are extended-real: `+inf` outside the effective domain. Each entry
//! carries a bounded `search_box` that contains every minimizer of
//! `g - Phi(., y)` for `y` in the test range, plus the per-coordinate kink
//! locations the solver should probe explicitly.

use crate::domain::{BoxDomain, Interval};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Declared analytic properties. `None` means "not applicable / unbounded":
/// e.g. `prox_bounded_threshold = None` reads as prox-bounded for every
/// positive step.
#[derive(Debug, Clone, Default)]
pub struct FnMeta {
    pub convex: bool,
    /// Smallest rho (validated by sampling) with `g + rho/2 ||.||^2` convex.
    pub hypoconvex_rho: Option<f64>,
    /// Conservative prox-regularity constant at the listed reference points.
    pub prox_regular_r: Option<f64>,
    /// Largest lambda below which `g + ||.||^2 / (2 lambda)` is bounded below.
    pub prox_bounded_threshold: Option<f64>,
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction {
    pub id: String,
    pub dim: usize,
    value: ValueFn,
    grad: Option<GradFn>,
    pub dom: BoxDomain,
    pub search_box: BoxDomain,
    /// Kink locations per coordinate (points where `g` is not differentiable).
    pub kink_coords: Vec<Vec<f64>>,
    pub meta: FnMeta,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("meta", &self.meta)
            .finish()
    }
}

impl TestFunction {
    /// Extended-real value; `+inf` outside the effective domain.
    pub fn value(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim || !self.dom.contains(x) {
            return f64::INFINITY;
        }
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        if x.len() != self.dim || !self.dom.interior_contains(x) {
            return None;
        }
        self.grad.as_ref().map(|g| g(x))
    }

    pub fn has_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// True when any coordinate of `x` sits within `tol` of a declared kink.
    pub fn near_kink(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(&self.kink_coords)
            .any(|(xi, ks)| ks.iter().any(|k| (xi - k).abs() <= tol))
    }
}

fn smooth(
    id: &str,
    dim: usize,
    value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    search: f64,
    meta: FnMeta,
) -> TestFunction {
    TestFunction {
        id: id.to_string(),
        dim,
        value: Arc::new(value),
        grad: Some(Arc::new(grad)),
        dom: BoxDomain::reals(dim),
        search_box: BoxDomain::cube(dim, -search, search),
        kink_coords: vec![vec![]; dim],
        meta,
    }
}

/// `1/2 ||x||^2`
pub fn quad(dim: usize) -> TestFunction {
    smooth(
        "quad",
        dim,
        |x| 0.5 * x.iter().map(|t| t * t).sum::<f64>(),
        |x| x.to_vec(),
        10.0,
        FnMeta { convex: true, hypoconvex_rho: Some(0.0), prox_regular_r: Some(0.0), ..Default::default() },
    )
}

/// `1/2 ||x - b||^2` with `b = (1, ..., 1)`
pub fn shifted_quad(dim: usize) -> TestFunction {
    smooth(
        "shifted_quad",
        dim,
        |x| 0.5 * x.iter().map(|t| (t - 1.0) * (t - 1.0)).sum::<f64>(),
        |x| x.iter().map(|t| t - 1.0).collect(),
        10.0,
        FnMeta { convex: true, hypoconvex_rho: Some(0.0), prox_regular_r: Some(0.0), ..Default::default() },
    )
}

/// `||x||_1`, kinks on every coordinate hyperplane.
pub fn abs(dim: usize) -> TestFunction {
    TestFunction {
        id: "abs".to_string(),
        dim,
        value: Arc::new(|x: &[f64]| x.iter().map(|t| t.abs()).sum()),
        grad: None,
        dom: BoxDomain::reals(dim),
        search_box: BoxDomain::cube(dim, -10.0, 10.0),
        kink_coords: vec![vec![0.0]; dim],
        meta: FnMeta {
            convex: true,
            hypoconvex_rho: Some(0.0),
            prox_regular_r: Some(0.0),
            ..Default::default()
        },
    }
}

/// `-|x|` in one dimension; no quadratic minorant tangent at the origin.
pub fn neg_abs() -> TestFunction {
    TestFunction {
        id: "neg_abs".to_string(),
        dim: 1,
        value: Arc::new(|x: &[f64]| -x[0].abs()),
        grad: None,
        dom: BoxDomain::reals(1),
        search_box: BoxDomain::cube(1, -20.0, 20.0),
        kink_coords: vec![vec![0.0]],
        meta: FnMeta::default(),
    }
}

/// `(x^2 - 1)^2` in one dimension; minimizers at -1 and +1.
pub fn double_well() -> TestFunction {
    smooth(
        "double_well",
        1,
        |x| {
            let s = x[0] * x[0] - 1.0;
            s * s
        },
        |x| vec![4.0 * x[0] * (x[0] * x[0] - 1.0)],
        3.0,
        FnMeta {
            convex: false,
            // inf g'' = -4 at the origin, so 4 is the tight modulus on any
            // box containing 0 (sampling-validated)
            hypoconvex_rho: Some(4.0),
            prox_regular_r: Some(4.0),
            ..Default::default()
        },
    )
}

/// The constant function `g ≡ 5`.
pub fn const_rho(dim: usize) -> TestFunction {
    smooth(
        "const_rho",
        dim,
        |_| 5.0,
        |x| vec![0.0; x.len()],
        10.0,
        FnMeta { convex: true, hypoconvex_rho: Some(0.0), prox_regular_r: Some(0.0), ..Default::default() },
    )
}

/// `<c, x>` with `c = (1, ..., 1)`.
pub fn linear(dim: usize) -> TestFunction {
    smooth(
        "linear",
        dim,
        |x| x.iter().sum(),
        |x| vec![1.0; x.len()],
        10.0,
        FnMeta { convex: true, hypoconvex_rho: Some(0.0), prox_regular_r: Some(0.0), ..Default::default() },
    )
}

/// Indicator of `[-1, 1]^n`: 0 inside, `+inf` outside.
pub fn indicator_box(dim: usize) -> TestFunction {
    TestFunction {
        id: "indicator_box".to_string(),
        dim,
        value: Arc::new(|_: &[f64]| 0.0),
        grad: None,
        dom: BoxDomain::new(vec![Interval::closed(-1.0, 1.0); dim]),
        search_box: BoxDomain::cube(dim, -1.0, 1.0),
        kink_coords: vec![vec![-1.0, 1.0]; dim],
        meta: FnMeta {
            convex: true,
            hypoconvex_rho: Some(0.0),
            prox_regular_r: Some(0.0),
            ..Default::default()
        },
    }
}

/// Separable Huber with transition at 1: `1/2 t^2` for `|t| <= 1`, else
/// `|t| - 1/2`. Convex and C^1.
pub fn huber(dim: usize) -> TestFunction {
    fn h(t: f64) -> f64 {
        if t.abs() <= 1.0 {
            0.5 * t * t
        } else {
            t.abs() - 0.5
        }
    }
    fn dh(t: f64) -> f64 {
        t.clamp(-1.0, 1.0)
    }
    smooth(
        "huber",
        dim,
        |x| x.iter().map(|&t| h(t)).sum(),
        |x| x.iter().map(|&t| dh(t)).collect(),
        10.0,
        FnMeta { convex: true, hypoconvex_rho: Some(0.0), prox_regular_r: Some(0.0), ..Default::default() },
    )
}

/// `-1/2 ||x||^2`; prox-bounded exactly for steps below 1.
pub fn neg_quad(dim: usize) -> TestFunction {
    smooth(
        "neg_quad",
        dim,
        |x| -0.5 * x.iter().map(|t| t * t).sum::<f64>(),
        |x| x.iter().map(|t| -t).collect(),
        10.0,
        FnMeta {
            convex: false,
            hypoconvex_rho: Some(1.0),
            prox_regular_r: Some(1.0),
            prox_bounded_threshold: Some(1.0),
        },
    )
}

/// Full catalog at dimension `dim`; the 1-D-only entries appear when `dim = 1`.
pub fn catalog(dim: usize) -> Vec<TestFunction> {
    let mut out = vec![
        quad(dim),
        shifted_quad(dim),
        abs(dim),
        const_rho(dim),
        linear(dim),
        indicator_box(dim),
        huber(dim),
        neg_quad(dim),
    ];
    if dim == 1 {
        out.push(neg_abs());
        out.push(double_well());
    }
    out
}

pub fn by_id(id: &str, dim: usize) -> Result<TestFunction> {
    match id {
        "quad" => Ok(quad(dim)),
        "shifted_quad" => Ok(shifted_quad(dim)),
        "abs" => Ok(abs(dim)),
        "const_rho" => Ok(const_rho(dim)),
        "linear" => Ok(linear(dim)),
        "indicator_box" => Ok(indicator_box(dim)),
        "huber" => Ok(huber(dim)),
        "neg_quad" => Ok(neg_quad(dim)),
        "neg_abs" if dim == 1 => Ok(neg_abs()),
        "double_well" if dim == 1 => Ok(double_well()),
        "neg_abs" | "double_well" => {
            Err(Error::InvalidParams(format!("{id} is one-dimensional, got dim {dim}")))
        }
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}
