//! Maps from a domain manifold into a target sphere S^n: pointwise and
//! differential evaluation, per-node field assembly (energy density,
//! pullback metric, directional data), and composition with conformal flows.
//!
//! Differentials are taken in an orthonormal frame of the domain. Catalog
//! maps carry analytic chart Jacobians; composed maps never do, so every
//! conformal identity checked against them is a genuine finite-difference
//! cross-check rather than a chain-rule tautology.

use crate::error::{Error, Result};
use crate::la::{self, MAX_AMB, MAX_DOM};
use crate::manifold::{sphere_embed_into, sphere_embed_jacobian_into, DomainKind, DomainManifold};
use crate::sphere::{flow_slice, flow_slice_hyper, ConformalFlow, SpherePoint};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

/// Relative finite-difference step for first derivatives, scaled by the
/// chart extent of each axis.
pub const FD_STEP_FACTOR: f64 = 1e-5;

type PointEval = dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync;
type JacEval = dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync;

/// A C^1 map from a domain manifold into S^n (sitting in R^{n+1}).
#[derive(Clone)]
pub struct SmoothMap {
    domain: Arc<DomainManifold>,
    target_dim: usize,
    eval: Arc<PointEval>,
    jacobian: Option<Arc<JacEval>>,
    name: String,
}

/// Per-node differential data for a map, assembled over the whole
/// quadrature rule.
#[derive(Debug, Clone)]
pub struct MapFields {
    /// phi(x) per node.
    pub points: Vec<DVector<f64>>,
    /// Differential in the orthonormal frame, (n+1) x m.
    pub differentials: Vec<DMatrix<f64>>,
    /// Energy density e = |d phi|^2 / 2.
    pub density: Vec<f64>,
    /// Pullback metric P = D^T D in the frame, m x m.
    pub pullback: Vec<DMatrix<f64>>,
    /// <v, phi(x)> per node.
    pub phi_v: Vec<f64>,
    /// |d phi_v|^2 = |D^T (vbar o phi)|^2 per node.
    pub dphi_v_sq: Vec<f64>,
}

impl MapFields {
    pub fn max_density(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }
}

/// Borrowed per-node evaluation handed to streaming visitors.
pub struct NodeEval<'a> {
    /// Ambient coordinates of phi(x).
    pub point: &'a [f64],
    /// Frame differential, column-major (n+1) x m.
    pub diff: &'a [f64],
    /// Energy density at the node.
    pub density: f64,
    /// Pullback metric, row-major m x m.
    pub pullback: &'a [f64],
}

impl SmoothMap {
    fn new(
        domain: Arc<DomainManifold>,
        target_dim: usize,
        name: impl Into<String>,
        eval: Arc<PointEval>,
        jacobian: Option<Arc<JacEval>>,
    ) -> Result<Self> {
        if target_dim < 2 {
            return Err(Error::Config(format!(
                "target sphere dimension must be >= 2, got {target_dim}"
            )));
        }
        if target_dim + 1 > MAX_AMB {
            return Err(Error::Config(format!(
                "ambient dimension {} exceeds the supported maximum {MAX_AMB}",
                target_dim + 1
            )));
        }
        Ok(SmoothMap {
            domain,
            target_dim,
            eval,
            jacobian,
            name: name.into(),
        })
    }

    pub fn domain(&self) -> &Arc<DomainManifold> {
        &self.domain
    }

    /// Dimension n of the target sphere.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// Ambient dimension n + 1.
    pub fn ambient_dim(&self) -> usize {
        self.target_dim + 1
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Evaluate phi at chart coordinates.
    pub fn point_into(&self, chart: usize, u: &[f64], out: &mut [f64]) {
        (self.eval)(chart, u, out);
    }

    pub fn point(&self, chart: usize, u: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        self.point_into(chart, u, out.as_mut_slice());
        out
    }

    /// Chart-coordinate Jacobian, column-major (n+1) x m: analytic when the
    /// map carries one, otherwise central finite differences with step
    /// 1e-5 x chart extent per axis.
    pub fn chart_jacobian_into(&self, chart: usize, u: &[f64], out: &mut [f64]) -> Result<()> {
        let amb = self.ambient_dim();
        let m = self.domain.dim();
        if let Some(jac) = &self.jacobian {
            jac(chart, u, out);
            return Ok(());
        }
        let ch = self.domain.chart(chart);
        let mut steps = [0.0; MAX_DOM];
        for k in 0..m {
            let (lo, hi) = ch.extents()[k];
            steps[k] = FD_STEP_FACTOR * (hi - lo);
        }
        if !ch.interior_with_margin(u, &steps[..m]) {
            return Err(Error::Contract(format!(
                "finite-difference stencil leaves the chart at u = {u:?}"
            )));
        }
        let mut up = [0.0; MAX_DOM];
        let mut um = [0.0; MAX_DOM];
        let mut fp = [0.0; MAX_AMB];
        let mut fm = [0.0; MAX_AMB];
        for k in 0..m {
            up[..m].copy_from_slice(u);
            um[..m].copy_from_slice(u);
            up[k] += steps[k];
            um[k] -= steps[k];
            (self.eval)(chart, &up[..m], &mut fp[..amb]);
            (self.eval)(chart, &um[..m], &mut fm[..amb]);
            let inv = 1.0 / (2.0 * steps[k]);
            for i in 0..amb {
                out[k * amb + i] = (fp[i] - fm[i]) * inv;
            }
        }
        Ok(())
    }

    /// Frame differential at a quadrature node: the chart Jacobian with
    /// columns rescaled by the diagonal orthonormal frame.
    pub fn differential(&self, node_idx: usize) -> Result<DMatrix<f64>> {
        let nodes = self.domain.nodes();
        if node_idx >= nodes.len() {
            return Err(Error::Contract(format!(
                "node {node_idx} outside the quadrature set of {} nodes",
                nodes.len()
            )));
        }
        let node = &nodes[node_idx];
        let amb = self.ambient_dim();
        let m = self.domain.dim();
        let mut jac = [0.0; MAX_AMB * MAX_DOM];
        self.chart_jacobian_into(node.chart, &node.u, &mut jac[..amb * m])?;
        let mut frame = [0.0; MAX_DOM];
        self.domain.frame_diag_at(node, &mut frame);
        Ok(DMatrix::from_fn(amb, m, |i, k| jac[k * amb + i] * frame[k]))
    }

    /// Visit every quadrature node in parallel with its point, frame
    /// differential, density, and pullback metric; results come back in
    /// node order regardless of scheduling.
    pub fn par_node_map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &NodeEval) -> Result<T> + Sync,
    {
        let nodes = self.domain.nodes();
        let amb = self.ambient_dim();
        let m = self.domain.dim();
        nodes
            .par_iter()
            .enumerate()
            .map(|(idx, node)| {
                let mut point = [0.0; MAX_AMB];
                (self.eval)(node.chart, &node.u, &mut point[..amb]);
                let r = la::norm(&point[..amb]);
                if (r - 1.0).abs() > 1e-10 {
                    return Err(Error::Numeric(format!(
                        "map value leaves the sphere (|phi| = {r}) at node {idx}"
                    )));
                }
                let mut jac = [0.0; MAX_AMB * MAX_DOM];
                self.chart_jacobian_into(node.chart, &node.u, &mut jac[..amb * m])?;
                if self.jacobian.is_some() {
                    for k in 0..m {
                        let tang = la::dot(&jac[k * amb..k * amb + amb], &point[..amb]);
                        if tang.abs() > 1e-8 {
                            return Err(Error::Numeric(format!(
                                "analytic Jacobian column {k} is not tangent \
                                 (defect {tang:e}) at node {idx}"
                            )));
                        }
                    }
                }
                let mut frame = [0.0; MAX_DOM];
                self.domain.frame_diag_at(node, &mut frame);
                let mut diff = [0.0; MAX_AMB * MAX_DOM];
                for k in 0..m {
                    for i in 0..amb {
                        diff[k * amb + i] = jac[k * amb + i] * frame[k];
                    }
                }
                let mut pullback = [0.0; MAX_DOM * MAX_DOM];
                let mut density = 0.0;
                for a in 0..m {
                    for b in a..m {
                        let d =
                            la::dot(&diff[a * amb..a * amb + amb], &diff[b * amb..b * amb + amb]);
                        pullback[a * m + b] = d;
                        pullback[b * m + a] = d;
                        if a == b {
                            density += d;
                        }
                    }
                }
                density *= 0.5;
                let eval = NodeEval {
                    point: &point[..amb],
                    diff: &diff[..amb * m],
                    density,
                    pullback: &pullback[..m * m],
                };
                f(idx, &eval)
            })
            .collect()
    }

    /// Assemble the full per-node fields for a direction v.
    pub fn compute_fields(&self, v: &DVector<f64>) -> Result<MapFields> {
        if v.len() != self.ambient_dim() {
            return Err(Error::Config(format!(
                "direction lives in R^{} but the target sphere sits in R^{}",
                v.len(),
                self.ambient_dim()
            )));
        }
        let amb = self.ambient_dim();
        let m = self.domain.dim();
        let vs = v.as_slice();
        let rows = self.par_node_map(|_, ne| {
            let phi_v = la::dot(vs, ne.point);
            // tangency of d phi makes <v, dphi(e_k)> = <vbar o phi, dphi(e_k)>
            let mut dphi_v_sq = 0.0;
            for k in 0..m {
                let c = la::dot(vs, &ne.diff[k * amb..k * amb + amb]);
                dphi_v_sq += c * c;
            }
            Ok((
                DVector::from_column_slice(ne.point),
                DMatrix::from_column_slice(amb, m, ne.diff),
                ne.density,
                DMatrix::from_row_slice(m, m, ne.pullback),
                phi_v,
                dphi_v_sq,
            ))
        })?;
        let mut fields = MapFields {
            points: Vec::with_capacity(rows.len()),
            differentials: Vec::with_capacity(rows.len()),
            density: Vec::with_capacity(rows.len()),
            pullback: Vec::with_capacity(rows.len()),
            phi_v: Vec::with_capacity(rows.len()),
            dphi_v_sq: Vec::with_capacity(rows.len()),
        };
        for (pt, d, e, p, pv, dv) in rows {
            fields.points.push(pt);
            fields.differentials.push(d);
            fields.density.push(e);
            fields.pullback.push(p);
            fields.phi_v.push(pv);
            fields.dphi_v_sq.push(dv);
        }
        Ok(fields)
    }

    /// Precomputes the base-map values at every node's finite-difference
    /// stencil. The stencil geometry does not depend on the flow, so energy
    /// sweeps reuse it across every (direction, t) cell, paying only flow
    /// applications per cell.
    pub(crate) fn stencil_cache(&self) -> Result<StencilCache> {
        let nodes = self.domain.nodes();
        let amb = self.ambient_dim();
        let m = self.domain.dim();
        let mut points = vec![0.0; nodes.len() * (2 * m + 1) * amb];
        let mut inv_steps = vec![0.0; nodes.len() * m];
        let mut frames = vec![0.0; nodes.len() * m];
        let chunk = (2 * m + 1) * amb;
        for (idx, node) in nodes.iter().enumerate() {
            let ch = self.domain.chart(node.chart);
            let mut steps = [0.0; MAX_DOM];
            for k in 0..m {
                let (lo, hi) = ch.extents()[k];
                steps[k] = FD_STEP_FACTOR * (hi - lo);
            }
            if !ch.interior_with_margin(&node.u, &steps[..m]) {
                return Err(Error::Contract(format!(
                    "finite-difference stencil leaves the chart at u = {:?}",
                    node.u
                )));
            }
            let base = idx * chunk;
            (self.eval)(node.chart, &node.u, &mut points[base..base + amb]);
            let mut up = [0.0; MAX_DOM];
            let mut um = [0.0; MAX_DOM];
            for k in 0..m {
                up[..m].copy_from_slice(&node.u);
                um[..m].copy_from_slice(&node.u);
                up[k] += steps[k];
                um[k] -= steps[k];
                let off_p = base + (1 + 2 * k) * amb;
                let off_m = base + (2 + 2 * k) * amb;
                (self.eval)(node.chart, &up[..m], &mut points[off_p..off_p + amb]);
                (self.eval)(node.chart, &um[..m], &mut points[off_m..off_m + amb]);
                inv_steps[idx * m + k] = 1.0 / (2.0 * steps[k]);
            }
            let mut frame = [0.0; MAX_DOM];
            self.domain.frame_diag_at(node, &mut frame);
            frames[idx * m..idx * m + m].copy_from_slice(&frame[..m]);
        }
        Ok(StencilCache {
            amb,
            m,
            node_count: nodes.len(),
            points,
            inv_steps,
            frames,
        })
    }

    /// The composed map gamma_t o phi. At effective time zero the flow is
    /// the identity and the map is returned unchanged (analytic Jacobian
    /// included); otherwise the composition carries no Jacobian, forcing
    /// finite differences.
    pub fn compose_with_flow(&self, flow: &ConformalFlow) -> Result<SmoothMap> {
        if flow.unit().len() != self.ambient_dim() {
            return Err(Error::Config(format!(
                "flow direction lives in R^{} but the map target sits in R^{}",
                flow.unit().len(),
                self.ambient_dim()
            )));
        }
        let s = flow.effective_time();
        if s == 0.0 {
            let mut composed = self.clone();
            composed.name = format!("{}∘id", self.name);
            return Ok(composed);
        }
        let base = self.eval.clone();
        let amb = self.ambient_dim();
        let unit: Vec<f64> = flow.unit().as_slice().to_vec();
        let eval: Arc<PointEval> = Arc::new(move |chart, u, out| {
            let mut tmp = [0.0; MAX_AMB];
            base(chart, u, &mut tmp[..amb]);
            flow_slice(&unit, s, &tmp[..amb], out);
        });
        SmoothMap::new(
            self.domain.clone(),
            self.target_dim,
            format!("{}@t={}", self.name, flow.time()),
            eval,
            None,
        )
    }
}

/// Base-map stencil values reused across the cells of an energy sweep.
pub(crate) struct StencilCache {
    amb: usize,
    m: usize,
    node_count: usize,
    /// Per node: center, then (plus, minus) per axis, each `amb` long.
    points: Vec<f64>,
    inv_steps: Vec<f64>,
    frames: Vec<f64>,
}

impl StencilCache {
    /// Streams the fields of gamma_s o phi (for the unit direction `unit`
    /// at effective time `s`) through `f`, mirroring the arithmetic of the
    /// uncached finite-difference route.
    pub(crate) fn par_composed_map<T, F>(&self, unit: &[f64], s: f64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &NodeEval) -> T + Sync,
    {
        let amb = self.amb;
        let m = self.m;
        let chunk = (2 * m + 1) * amb;
        let (sh, ch) = (s.sinh(), s.cosh());
        (0..self.node_count)
            .into_par_iter()
            .map(|idx| {
                let base = idx * chunk;
                let mut point = [0.0; MAX_AMB];
                flow_slice_hyper(
                    unit,
                    sh,
                    ch,
                    &self.points[base..base + amb],
                    &mut point[..amb],
                );
                let mut diff = [0.0; MAX_AMB * MAX_DOM];
                let mut fp = [0.0; MAX_AMB];
                let mut fm = [0.0; MAX_AMB];
                for k in 0..m {
                    let off_p = base + (1 + 2 * k) * amb;
                    let off_m = base + (2 + 2 * k) * amb;
                    flow_slice_hyper(
                        unit,
                        sh,
                        ch,
                        &self.points[off_p..off_p + amb],
                        &mut fp[..amb],
                    );
                    flow_slice_hyper(
                        unit,
                        sh,
                        ch,
                        &self.points[off_m..off_m + amb],
                        &mut fm[..amb],
                    );
                    let inv = self.inv_steps[idx * m + k];
                    let frame = self.frames[idx * m + k];
                    for i in 0..amb {
                        diff[k * amb + i] = (fp[i] - fm[i]) * inv * frame;
                    }
                }
                let mut pullback = [0.0; MAX_DOM * MAX_DOM];
                let mut density = 0.0;
                for a in 0..m {
                    for b in a..m {
                        let d =
                            la::dot(&diff[a * amb..a * amb + amb], &diff[b * amb..b * amb + amb]);
                        pullback[a * m + b] = d;
                        pullback[b * m + a] = d;
                        if a == b {
                            density += d;
                        }
                    }
                }
                density *= 0.5;
                let eval = NodeEval {
                    point: &point[..amb],
                    diff: &diff[..amb * m],
                    density,
                    pullback: &pullback[..m * m],
                };
                f(idx, &eval)
            })
            .collect()
    }
}

/// Identity map of a sphere domain, phi(u) = embedding(u).
pub fn identity_sphere(domain: Arc<DomainManifold>) -> Result<SmoothMap> {
    let m = match domain.kind() {
        DomainKind::Sphere(m) => *m,
        _ => return Err(Error::Config("identity map needs a sphere domain".into())),
    };
    let eval: Arc<PointEval> = Arc::new(move |_, u, out| sphere_embed_into(u, out));
    let jac: Arc<JacEval> = Arc::new(move |_, u, out| sphere_embed_jacobian_into(u, out));
    SmoothMap::new(domain, m, format!("identity-s{m}"), eval, Some(jac))
}

/// Totally geodesic equator inclusion S^m -> S^n (m < n): the embedding
/// padded with zeros.
pub fn equator_inclusion(domain: Arc<DomainManifold>, n: usize) -> Result<SmoothMap> {
    let m = match domain.kind() {
        DomainKind::Sphere(m) => *m,
        _ => {
            return Err(Error::Config(
                "equator inclusion needs a sphere domain".into(),
            ))
        }
    };
    if n <= m {
        return Err(Error::Config(format!(
            "equator inclusion needs target dimension n > m, got n = {n}, m = {m}"
        )));
    }
    let amb = n + 1;
    let eval: Arc<PointEval> = Arc::new(move |_, u, out| {
        out[..amb].fill(0.0);
        sphere_embed_into(u, &mut out[..m + 1]);
    });
    let jac: Arc<JacEval> = Arc::new(move |_, u, out| {
        out[..amb * m].fill(0.0);
        let mut small = [0.0; (MAX_DOM + 1) * MAX_DOM];
        sphere_embed_jacobian_into(u, &mut small[..(m + 1) * m]);
        for k in 0..m {
            out[k * amb..k * amb + m + 1].copy_from_slice(&small[k * (m + 1)..(k + 1) * (m + 1)]);
        }
    });
    SmoothMap::new(domain, n, format!("equator-s{m}-s{n}"), eval, Some(jac))
}

/// Constant map onto a fixed target point.
pub fn constant_map(domain: Arc<DomainManifold>, point: SpherePoint) -> Result<SmoothMap> {
    let n = point.ambient_dim() - 1;
    let m = domain.dim();
    let coords: Vec<f64> = point.coords().as_slice().to_vec();
    let amb = coords.len();
    let eval: Arc<PointEval> = Arc::new(move |_, _, out| out[..amb].copy_from_slice(&coords));
    let jac: Arc<JacEval> = Arc::new(move |_, _, out| out[..amb * m].fill(0.0));
    SmoothMap::new(domain, n, "constant", eval, Some(jac))
}

/// Clifford-type harmonic map of the square torus with periods 2*pi into
/// S^3: (u1, u2) -> (cos u1, sin u1, cos u2, sin u2) / sqrt(2).
pub fn clifford_torus(domain: Arc<DomainManifold>) -> Result<SmoothMap> {
    match domain.kind() {
        DomainKind::FlatTorus(periods) if periods.len() == 2 => {
            let two_pi = 2.0 * std::f64::consts::PI;
            if periods.iter().any(|&p| (p - two_pi).abs() > 1e-9) {
                return Err(Error::Config(
                    "the Clifford map needs a torus with periods 2*pi".into(),
                ));
            }
        }
        _ => {
            return Err(Error::Config(
                "the Clifford map needs a 2-dimensional flat torus domain".into(),
            ))
        }
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let eval: Arc<PointEval> = Arc::new(move |_, u, out| {
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        out[0] = c1 * inv_sqrt2;
        out[1] = s1 * inv_sqrt2;
        out[2] = c2 * inv_sqrt2;
        out[3] = s2 * inv_sqrt2;
    });
    let jac: Arc<JacEval> = Arc::new(move |_, u, out| {
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        out[..8].fill(0.0);
        out[0] = -s1 * inv_sqrt2;
        out[1] = c1 * inv_sqrt2;
        out[6] = -s2 * inv_sqrt2;
        out[7] = c2 * inv_sqrt2;
    });
    SmoothMap::new(domain, 3, "clifford-t2-s3", eval, Some(jac))
}

/// Latitude map of S^2 onto a small sphere inside S^3:
/// x -> (sin(rho) x, cos(rho)). For rho < pi/2 the image stays in the open
/// half-sphere {y_4 > 0}, so <e_4, phi> = cos(rho) > 0 everywhere. Not
/// harmonic (small spheres are not minimal); used by admissibility checks.
pub fn spherical_cap(domain: Arc<DomainManifold>, latitude: f64) -> Result<SmoothMap> {
    match domain.kind() {
        DomainKind::Sphere(2) => {}
        _ => return Err(Error::Config("the cap map needs an S^2 domain".into())),
    }
    if !(latitude > 0.0 && latitude < std::f64::consts::PI) {
        return Err(Error::Config(format!(
            "cap latitude must lie in (0, pi), got {latitude}"
        )));
    }
    let (sr, cr) = latitude.sin_cos();
    let eval: Arc<PointEval> = Arc::new(move |_, u, out| {
        let mut base = [0.0; 3];
        sphere_embed_into(u, &mut base);
        for i in 0..3 {
            out[i] = sr * base[i];
        }
        out[3] = cr;
    });
    let jac: Arc<JacEval> = Arc::new(move |_, u, out| {
        let mut small = [0.0; 6];
        sphere_embed_jacobian_into(u, &mut small);
        out[..8].fill(0.0);
        for k in 0..2 {
            for i in 0..3 {
                out[k * 4 + i] = sr * small[k * 3 + i];
            }
        }
    });
    SmoothMap::new(
        domain,
        3,
        format!("cap-s2-s3@{latitude:.3}"),
        eval,
        Some(jac),
    )
}
