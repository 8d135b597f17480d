//! Flat INI-style scan configuration.
//!
//! Each `[scenario]` section describes one envelope scan:
//!
//! ```ini
//! [scenario]
//! name = quad_euclid
//! function = quad
//! dim = 1
//! family = euclidean
//! gamma = 1.0
//! y_min = -2.0
//! y_max = 2.0
//! y_points = 41
//! checks = gradient,hessian
//! ```
//!
//! `kernel` / `kernel_params` are required by the Bregman, anisotropic and
//! entropic families and rejected elsewhere.

use crate::coupling::{Coupling, Family};
use crate::kernels::{self, Kernel};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub function: String,
    pub dim: usize,
    pub family: Family,
    pub gamma: f64,
    pub kernel: Option<String>,
    pub kernel_params: Vec<f64>,
    pub y_min: f64,
    pub y_max: f64,
    pub y_points: usize,
    pub checks: Vec<String>,
}

impl Scenario {
    pub fn coupling(&self) -> Result<Coupling> {
        let kern = |dim| -> Result<Kernel> {
            let id = self.kernel.as_deref().ok_or_else(|| {
                Error::Config(format!("scenario '{}': family requires a kernel", self.name))
            })?;
            kernels::make_kernel(id, dim, &self.kernel_params)
        };
        match self.family {
            Family::Euclidean => Coupling::euclidean(self.dim, self.gamma),
            Family::LeftBregman => Coupling::left_bregman(kern(self.dim)?, self.gamma),
            Family::RightBregman => Coupling::right_bregman(kern(self.dim)?, self.gamma),
            Family::Anisotropic => Coupling::anisotropic(kern(self.dim)?, self.gamma),
            Family::Entropic => Coupling::entropic(kern(self.dim)?, self.gamma),
            Family::QuadraticTransform => Coupling::quadratic_transform(self.dim),
            Family::Exp => Ok(Coupling::exp_coupling()),
        }
    }

    /// The scan grid: `y_points` values per axis, same range on every axis.
    pub fn y_grid(&self, dim_y: usize) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = (0..self.y_points)
            .map(|i| {
                if self.y_points == 1 {
                    self.y_min
                } else {
                    self.y_min
                        + (self.y_max - self.y_min) * i as f64 / (self.y_points - 1) as f64
                }
            })
            .collect();
        let mut grid = vec![vec![]];
        for _ in 0..dim_y {
            let mut next = Vec::with_capacity(grid.len() * axis.len());
            for p in &grid {
                for a in &axis {
                    let mut q = p.clone();
                    q.push(*a);
                    next.push(q);
                }
            }
            grid = next;
        }
        grid
    }
}

const KNOWN_CHECKS: [&str; 4] = ["envelope", "gradient", "hessian", "jacobian"];

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

/// Parses the flat INI text. Unknown keys, values that fail to parse, keys
/// outside a section, and incomplete scenarios are all hard errors.
pub fn parse(text: &str) -> Result<Vec<Scenario>> {
    #[derive(Default)]
    struct Partial {
        start_line: usize,
        name: Option<String>,
        function: Option<String>,
        dim: Option<usize>,
        family: Option<Family>,
        gamma: Option<f64>,
        kernel: Option<String>,
        kernel_params: Vec<f64>,
        y_min: Option<f64>,
        y_max: Option<f64>,
        y_points: Option<usize>,
        checks: Vec<String>,
    }

    fn finish(p: Partial) -> Result<Scenario> {
        let line = p.start_line;
        let need = |field: &str| err(line, format!("scenario is missing '{field}'"));
        let s = Scenario {
            name: p.name.ok_or_else(|| need("name"))?,
            function: p.function.ok_or_else(|| need("function"))?,
            dim: p.dim.ok_or_else(|| need("dim"))?,
            family: p.family.ok_or_else(|| need("family"))?,
            gamma: p.gamma.unwrap_or(1.0),
            kernel: p.kernel,
            kernel_params: p.kernel_params,
            y_min: p.y_min.ok_or_else(|| need("y_min"))?,
            y_max: p.y_max.ok_or_else(|| need("y_max"))?,
            y_points: p.y_points.ok_or_else(|| need("y_points"))?,
            checks: if p.checks.is_empty() {
                vec!["envelope".to_string()]
            } else {
                p.checks
            },
        };
        if s.y_min >= s.y_max {
            return Err(err(line, "y_min must be strictly below y_max"));
        }
        if s.y_points == 0 {
            return Err(err(line, "y_points must be positive"));
        }
        if s.gamma <= 0.0 {
            return Err(err(line, "gamma must be positive"));
        }
        Ok(s)
    }

    let mut out = Vec::new();
    let mut current: Option<Partial> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find(['#', ';']) {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(err(lineno, format!("malformed section header '{line}'")));
            }
            let section = line[1..line.len() - 1].trim();
            if section != "scenario" {
                return Err(err(lineno, format!("unknown section '{section}'")));
            }
            if let Some(p) = current.take() {
                out.push(finish(p)?);
            }
            current = Some(Partial { start_line: lineno, ..Partial::default() });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let p = current
            .as_mut()
            .ok_or_else(|| err(lineno, "key outside of a [scenario] section"))?;
        let bad = |what: &str| err(lineno, format!("invalid {what} '{value}'"));
        match key {
            "name" => p.name = Some(value.to_string()),
            "function" => p.function = Some(value.to_string()),
            "dim" => p.dim = Some(value.parse().map_err(|_| bad("dim"))?),
            "family" => p.family = Some(Family::parse(value)?),
            "gamma" => p.gamma = Some(value.parse().map_err(|_| bad("gamma"))?),
            "kernel" => p.kernel = Some(value.to_string()),
            "kernel_params" => {
                p.kernel_params = value
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| bad("kernel_params")))
                    .collect::<Result<Vec<f64>>>()?;
            }
            "y_min" => p.y_min = Some(value.parse().map_err(|_| bad("y_min"))?),
            "y_max" => p.y_max = Some(value.parse().map_err(|_| bad("y_max"))?),
            "y_points" => p.y_points = Some(value.parse().map_err(|_| bad("y_points"))?),
            "checks" => {
                for c in value.split(',') {
                    let c = c.trim();
                    if !KNOWN_CHECKS.contains(&c) {
                        return Err(err(lineno, format!("unknown check '{c}'")));
                    }
                    p.checks.push(c.to_string());
                }
            }
            other => return Err(err(lineno, format!("unknown key '{other}'"))),
        }
    }
    if let Some(p) = current.take() {
        out.push(finish(p)?);
    }
    if out.is_empty() {
        return Err(Error::Config("no [scenario] sections found".to_string()));
    }
    let mut names: Vec<&str> = out.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != out.len() {
        return Err(Error::Config("duplicate scenario names".to_string()));
    }
    Ok(out)
}
