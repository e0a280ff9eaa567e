//! Compact domain manifolds (round spheres S^2, S^3 and flat tori) given by
//! a single global chart with closed-form metric, plus a quadrature rule
//! realizing integration against the Riemannian volume measure.
//!
//! Spherical domains use hyperspherical coordinates u = (theta_1, ..., phi):
//! Gauss-Legendre nodes in the polar angles keep every node strictly away
//! from the coordinate poles, and the uniform azimuthal grid is offset by a
//! half step so nothing sits on the seam.

use crate::error::{Error, Result};
use crate::la;
use nalgebra::DMatrix;

/// What kind of domain a manifold is.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// Round unit sphere S^m.
    Sphere(usize),
    /// Flat torus R^m / (L_1 Z x ... x L_m Z).
    FlatTorus(Vec<f64>),
}

/// Closed-form chart geometry. All built-in charts have diagonal metrics.
#[derive(Debug, Clone)]
enum ChartKind {
    /// Hyperspherical coordinates on S^m: polar angles in (0, pi), one
    /// azimuthal angle in [0, 2*pi).
    Polar { dim: usize },
    /// Cartesian coordinates on a flat torus with the given periods.
    Flat { periods: Vec<f64> },
}

/// A coordinate chart: a parameter box with per-axis periodicity and a
/// metric evaluator.
#[derive(Debug, Clone)]
pub struct Chart {
    extents: Vec<(f64, f64)>,
    periodic: Vec<bool>,
    kind: ChartKind,
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[(f64, f64)] {
        &self.extents
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.periodic[axis]
    }

    /// Diagonal of the metric at u. Built-in charts are diagonal, which the
    /// rest of the crate relies on for its closed forms.
    pub fn metric_diag_into(&self, u: &[f64], out: &mut [f64]) {
        match &self.kind {
            ChartKind::Polar { dim } => {
                let mut prod = 1.0;
                for k in 0..*dim {
                    out[k] = prod;
                    let s = u[k].sin();
                    prod *= s * s;
                }
            }
            ChartKind::Flat { periods } => {
                for k in 0..periods.len() {
                    out[k] = 1.0;
                }
            }
        }
    }

    /// Full metric matrix at u (row-major m x m).
    pub fn metric(&self, u: &[f64]) -> DMatrix<f64> {
        let m = self.dim();
        let mut diag = [0.0; la::MAX_DOM];
        self.metric_diag_into(u, &mut diag[..m]);
        DMatrix::from_fn(m, m, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Volume density sqrt(det g) at u.
    pub fn sqrt_det_g(&self, u: &[f64]) -> f64 {
        match &self.kind {
            ChartKind::Polar { dim } => {
                let mut prod = 1.0;
                for k in 0..dim - 1 {
                    prod *= u[k].sin().powi((dim - 1 - k) as i32);
                }
                prod
            }
            ChartKind::Flat { .. } => 1.0,
        }
    }

    /// Whether u (with a per-axis margin) stays inside the parameter box on
    /// every non-periodic axis.
    pub fn interior_with_margin(&self, u: &[f64], margin: &[f64]) -> bool {
        for k in 0..self.dim() {
            if self.periodic[k] {
                continue;
            }
            let (lo, hi) = self.extents[k];
            if u[k] - margin[k] <= lo || u[k] + margin[k] >= hi {
                return false;
            }
        }
        true
    }
}

/// One quadrature node: chart index, chart coordinates, raw coordinate
/// weight, and the cached volume factor weight * sqrt(det g).
#[derive(Debug, Clone)]
pub struct QuadNode {
    pub chart: usize,
    pub u: Vec<f64>,
    pub weight: f64,
    pub volume: f64,
}

/// A compact Riemannian domain with its quadrature rule.
#[derive(Debug, Clone)]
pub struct DomainManifold {
    dim: usize,
    kind: DomainKind,
    charts: Vec<Chart>,
    nodes: Vec<QuadNode>,
    resolution: usize,
}

/// Round S^m domain with Gauss-Legendre x uniform product quadrature.
/// Supported dimensions: m = 2 and m = 3.
pub fn build_sphere_domain(m: usize, resolution: usize) -> Result<DomainManifold> {
    if m != 2 && m != 3 {
        return Err(Error::Config(format!(
            "sphere domains support m in {{2, 3}}, got m = {m}"
        )));
    }
    if resolution < 8 {
        return Err(Error::Config(format!(
            "sphere resolution must be >= 8, got {resolution}"
        )));
    }
    let pi = std::f64::consts::PI;
    let two_pi = 2.0 * pi;
    let chart = Chart {
        extents: {
            let mut e = vec![(0.0, pi); m - 1];
            e.push((0.0, two_pi));
            e
        },
        periodic: {
            let mut p = vec![false; m - 1];
            p.push(true);
            p
        },
        kind: ChartKind::Polar { dim: m },
    };

    // Gauss-Legendre nodes per polar angle, mapped from [-1,1] to [0,pi].
    let (gl_x, gl_w) = la::gauss_legendre(resolution);
    let polar_nodes: Vec<f64> = gl_x.iter().map(|x| (x + 1.0) * pi / 2.0).collect();
    let polar_weights: Vec<f64> = gl_w.iter().map(|w| w * pi / 2.0).collect();
    let n_azim = 2 * resolution;
    let azim_w = two_pi / n_azim as f64;

    let mut nodes = Vec::new();
    match m {
        2 => {
            for (t, wt) in polar_nodes.iter().zip(&polar_weights) {
                for k in 0..n_azim {
                    let phi = (k as f64 + 0.5) * azim_w;
                    let u = vec![*t, phi];
                    let volume = wt * azim_w * chart.sqrt_det_g(&u);
                    nodes.push(QuadNode {
                        chart: 0,
                        u,
                        weight: wt * azim_w,
                        volume,
                    });
                }
            }
        }
        3 => {
            for (t1, w1) in polar_nodes.iter().zip(&polar_weights) {
                for (t2, w2) in polar_nodes.iter().zip(&polar_weights) {
                    for k in 0..n_azim {
                        let phi = (k as f64 + 0.5) * azim_w;
                        let u = vec![*t1, *t2, phi];
                        let w = w1 * w2 * azim_w;
                        let volume = w * chart.sqrt_det_g(&u);
                        nodes.push(QuadNode {
                            chart: 0,
                            u,
                            weight: w,
                            volume,
                        });
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    let domain = DomainManifold {
        dim: m,
        kind: DomainKind::Sphere(m),
        charts: vec![chart],
        nodes,
        resolution,
    };
    domain.check_volume()?;
    Ok(domain)
}

/// Flat torus domain with a uniform product grid (midpoint rule, which is
/// the trapezoid rule on a periodic axis).
pub fn build_torus_domain(m: usize, periods: &[f64], resolution: usize) -> Result<DomainManifold> {
    if m < 2 {
        return Err(Error::Config(format!(
            "domain dimension must be >= 2, got m = {m}"
        )));
    }
    if m > la::MAX_DOM {
        return Err(Error::Config(format!(
            "torus dimension {m} exceeds the supported maximum {}",
            la::MAX_DOM
        )));
    }
    if periods.len() != m {
        return Err(Error::Config(format!(
            "expected {m} periods, got {}",
            periods.len()
        )));
    }
    if periods.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Config("torus periods must be positive".into()));
    }
    if resolution < 2 {
        return Err(Error::Config("torus resolution must be >= 2".into()));
    }
    let chart = Chart {
        extents: periods.iter().map(|&p| (0.0, p)).collect(),
        periodic: vec![true; m],
        kind: ChartKind::Flat {
            periods: periods.to_vec(),
        },
    };
    let steps: Vec<f64> = periods.iter().map(|&p| p / resolution as f64).collect();
    let cell_w: f64 = steps.iter().product();

    let mut nodes = Vec::new();
    let total = resolution.pow(m as u32);
    for flat in 0..total {
        let mut rest = flat;
        let mut u = vec![0.0; m];
        for k in (0..m).rev() {
            let idx = rest % resolution;
            rest /= resolution;
            u[k] = (idx as f64 + 0.5) * steps[k];
        }
        nodes.push(QuadNode {
            chart: 0,
            u,
            weight: cell_w,
            volume: cell_w,
        });
    }

    let domain = DomainManifold {
        dim: m,
        kind: DomainKind::FlatTorus(periods.to_vec()),
        charts: vec![chart],
        nodes,
        resolution,
    };
    domain.check_volume()?;
    Ok(domain)
}

impl DomainManifold {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, idx: usize) -> &Chart {
        &self.charts[idx]
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Integral of a node-indexed field against the volume measure, using
    /// the fixed pairwise reduction tree.
    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        if field.len() != self.nodes.len() {
            return Err(Error::Contract(format!(
                "field has {} values but the quadrature rule has {} nodes",
                field.len(),
                self.nodes.len()
            )));
        }
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(field)
            .map(|(n, f)| n.volume * f)
            .collect();
        Ok(la::pairwise_sum(&terms))
    }

    /// Total volume of the domain, integrated by the rule itself.
    pub fn volume(&self) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().map(|n| n.volume).collect();
        la::pairwise_sum(&terms)
    }

    /// Analytic volume of the built-in domains.
    pub fn analytic_volume(&self) -> f64 {
        match &self.kind {
            DomainKind::Sphere(2) => 4.0 * std::f64::consts::PI,
            DomainKind::Sphere(3) => 2.0 * std::f64::consts::PI * std::f64::consts::PI,
            DomainKind::Sphere(_) => unreachable!("unsupported sphere dimension"),
            DomainKind::FlatTorus(periods) => periods.iter().product(),
        }
    }

    /// Documented volume tolerance of the rule at its resolution.
    pub fn volume_tolerance(&self) -> f64 {
        match &self.kind {
            DomainKind::Sphere(_) => {
                if self.resolution >= 32 {
                    1e-11
                } else if self.resolution >= 16 {
                    1e-9
                } else {
                    1e-6
                }
            }
            DomainKind::FlatTorus(_) => 1e-12,
        }
    }

    fn check_volume(&self) -> Result<()> {
        let vol = self.volume();
        let exact = self.analytic_volume();
        let rel = ((vol - exact) / exact).abs();
        if rel > self.volume_tolerance() {
            return Err(Error::Numeric(format!(
                "quadrature volume {vol} deviates from {exact} by relative {rel:e}"
            )));
        }
        Ok(())
    }

    /// Diagonal orthonormal frame at a quadrature node (built-in charts have
    /// diagonal metrics). `out[k]` scales the k-th coordinate direction.
    pub fn frame_diag_at(&self, node: &QuadNode, out: &mut [f64]) {
        let chart = &self.charts[node.chart];
        chart.metric_diag_into(&node.u, out);
        for v in out.iter_mut().take(self.dim) {
            *v = 1.0 / v.sqrt();
        }
    }
}

/// Orthonormal frame columns E at u, with E^T g E = I, built from the
/// Cholesky factor of the metric (deterministic and smooth in u).
pub fn orthonormal_frame(chart: &Chart, u: &[f64]) -> Result<DMatrix<f64>> {
    let g = chart.metric(u);
    let chol = nalgebra::Cholesky::new(g)
        .ok_or_else(|| Error::Numeric(format!("metric is not positive definite at u = {u:?}")))?;
    let m = chart.dim();
    let linv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(m, m))
        .ok_or_else(|| Error::Numeric(format!("singular Cholesky factor at u = {u:?}")))?;
    Ok(linv.transpose())
}

/// Embedding of hyperspherical coordinates into R^{m+1}.
///
/// x_0 = cos u_0, x_i = sin u_0 ... sin u_{i-1} cos u_i, x_m = sin u_0 ... sin u_{m-1}.
pub fn sphere_embed_into(u: &[f64], out: &mut [f64]) {
    let m = u.len();
    let mut prod = 1.0;
    for i in 0..m {
        out[i] = prod * u[i].cos();
        prod *= u[i].sin();
    }
    out[m] = prod;
}

/// Analytic Jacobian of `sphere_embed_into`, written column-major:
/// `out[k*(m+1) + i] = d x_i / d u_k`.
pub fn sphere_embed_jacobian_into(u: &[f64], out: &mut [f64]) {
    let m = u.len();
    let amb = m + 1;
    for k in 0..m {
        for i in 0..amb {
            // x_i is a product of sin u_j (j < i) and cos u_i (absent for i = m).
            let col = &mut out[k * amb..(k + 1) * amb];
            if i < k {
                col[i] = 0.0;
                continue;
            }
            let mut d = 1.0;
            for j in 0..i.min(m) {
                if j == k {
                    d *= u[j].cos();
                } else if j < i {
                    d *= u[j].sin();
                }
            }
            if i < m {
                if i == k {
                    d *= -u[i].sin();
                } else {
                    d *= u[i].cos();
                }
            }
            col[i] = d;
        }
    }
}
