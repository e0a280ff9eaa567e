//! The core functionals: F-energy, its conformally composed evaluation with
//! a built-in cross-check, the F-tension field for sphere targets, the first
//! variation along conformal directions, and the F stress-energy tensor.
//!
//! The tension is assembled in divergence form,
//!
//!   tau_F = Pi_phi [ (1/sqrt g) d_i ( sqrt g g^{ij} F'(e) d_j phi ) ],
//!
//! with the outer derivative taken by central differences of the whole flux;
//! the tangential projection Pi supplies the + F'(e) |d phi|^2 phi term of
//! the sphere target. The sqrt(g) weight vanishes together with the flux at
//! the polar chart edges, which keeps the quotient accurate at the
//! near-pole quadrature nodes.

use crate::error::{Error, Result};
use crate::la::{self, MAX_AMB, MAX_DOM};
use crate::map::SmoothMap;
use crate::profile::FProfile;
use crate::sphere::ConformalFlow;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Finite-difference step factor for the outer tension derivative, scaled
/// by extent/pi per axis. Smaller than the first-derivative step because
/// the 1/sqrt(g) quotient amplifies truncation near the polar chart edges.
pub const TENSION_STEP_FACTOR: f64 = 5e-6;

/// Sup-norm threshold under which a catalog map is certified F-harmonic at
/// the default resolutions.
pub const TENSION_CERT_THRESHOLD: f64 = 1e-4;

/// Relative tolerance of the composed-energy cross-check.
pub const ENERGY_CROSS_CHECK_TOL: f64 = 1e-5;

/// S^F = F'(e) e I - [F'(e) + e F''(e)] P in an orthonormal frame, written
/// into `out` (row-major m x m).
pub fn stress_matrix_into(profile: &FProfile, e: f64, pullback: &[f64], m: usize, out: &mut [f64]) {
    let fp = profile.f_prime(e);
    let fpp = profile.f_double_prime(e);
    let diag = fp * e;
    let coeff = fp + e * fpp;
    for a in 0..m {
        for b in 0..m {
            let id = if a == b { diag } else { 0.0 };
            out[a * m + b] = id - coeff * pullback[a * m + b];
        }
    }
}

/// Per-node F stress-energy tensor with its eigenvalue floor.
#[derive(Debug, Clone)]
pub struct StressField {
    /// Symmetric m x m stress in the orthonormal frame, per node.
    pub matrices: Vec<DMatrix<f64>>,
    /// Minimum eigenvalue per node.
    pub min_eigenvalues: Vec<f64>,
    /// Global floor S^{o,F} = min over nodes.
    pub global_min: f64,
}

/// F stress-energy tensor of a map, node by node.
pub fn stress_field(map: &SmoothMap, profile: &FProfile) -> Result<StressField> {
    let m = map.domain().dim();
    let rows = map.par_node_map(|_, ne| {
        let mut s = [0.0; MAX_DOM * MAX_DOM];
        stress_matrix_into(profile, ne.density, ne.pullback, m, &mut s);
        let min_eig = la::sym_min_eig(&s[..m * m], m);
        Ok((DMatrix::from_row_slice(m, m, &s[..m * m]), min_eig))
    })?;
    let mut matrices = Vec::with_capacity(rows.len());
    let mut min_eigenvalues = Vec::with_capacity(rows.len());
    for (mat, eig) in rows {
        matrices.push(mat);
        min_eigenvalues.push(eig);
    }
    let global_min = min_eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(StressField {
        matrices,
        min_eigenvalues,
        global_min,
    })
}

/// E_F(phi) = integral of F(e) over the domain.
pub fn f_energy(map: &SmoothMap, profile: &FProfile) -> Result<f64> {
    let values = map.par_node_map(|_, ne| Ok(profile.f(ne.density)))?;
    map.domain().integrate(&values)
}

/// The two routes to E_F(gamma_t o phi).
#[derive(Debug, Clone, Copy)]
pub struct ComposedEnergy {
    /// Composed-map evaluation with finite-difference differentials.
    pub value: f64,
    /// Fast path: integral of F(alpha_t^2 o phi * e) over the base fields.
    pub fast_path: f64,
}

impl ComposedEnergy {
    pub fn deviation(&self) -> f64 {
        (self.value - self.fast_path).abs()
    }

    pub fn consistent(&self) -> bool {
        self.deviation() <= ENERGY_CROSS_CHECK_TOL * (1.0 + self.fast_path.abs())
    }
}

/// Both routes without the consistency verdict. At effective time zero the
/// flow is the identity and both routes reduce to `f_energy`.
pub fn f_energy_composed_both(
    map: &SmoothMap,
    profile: &FProfile,
    flow: &ConformalFlow,
) -> Result<ComposedEnergy> {
    if flow.unit().len() != map.ambient_dim() {
        return Err(Error::Config(format!(
            "flow direction lives in R^{} but the map target sits in R^{}",
            flow.unit().len(),
            map.ambient_dim()
        )));
    }
    if flow.effective_time() == 0.0 {
        let value = f_energy(map, profile)?;
        return Ok(ComposedEnergy {
            value,
            fast_path: value,
        });
    }
    let fast_values = map.par_node_map(|_, ne| {
        let alpha = flow.conformal_factor_slice(ne.point);
        Ok(profile.f(alpha * alpha * ne.density))
    })?;
    let fast_path = map.domain().integrate(&fast_values)?;
    let composed = map.compose_with_flow(flow)?;
    let slow_values = composed.par_node_map(|_, ne| Ok(profile.f(ne.density)))?;
    let value = map.domain().integrate(&slow_values)?;
    Ok(ComposedEnergy { value, fast_path })
}

/// E_F(gamma_t o phi) by the composed-map route, cross-checked against the
/// conformal fast path within 1e-5 relative.
pub fn f_energy_composed(map: &SmoothMap, profile: &FProfile, flow: &ConformalFlow) -> Result<f64> {
    let both = f_energy_composed_both(map, profile, flow)?;
    if !both.consistent() {
        return Err(Error::Numeric(format!(
            "composed-energy cross-check failed: {} vs {} (deviation {:e})",
            both.value,
            both.fast_path,
            both.deviation()
        )));
    }
    Ok(both.value)
}

/// Per-node F-tension vectors with the sup norm over nodes.
#[derive(Debug, Clone)]
pub struct TensionField {
    pub vectors: Vec<DVector<f64>>,
    pub sup_norm: f64,
}

impl TensionField {
    /// Whether the field certifies F-harmonicity at the default threshold.
    pub fn certifies_f_harmonic(&self) -> bool {
        self.sup_norm < TENSION_CERT_THRESHOLD
    }
}

/// F-tension tau_F = trace_g grad(F'(e) d phi) for sphere targets, in
/// ambient divergence form with tangential projection.
pub fn f_tension(map: &SmoothMap, profile: &FProfile) -> Result<TensionField> {
    let domain = map.domain().clone();
    let m = domain.dim();
    let amb = map.ambient_dim();
    let nodes = domain.nodes();

    // flux W_k(u) = sqrt(g) g^{kk} F'(e) d_k phi at arbitrary chart points
    let flux = |chart: usize, u: &[f64], k: usize, out: &mut [f64]| -> Result<()> {
        let ch = domain.chart(chart);
        let mut jac = [0.0; MAX_AMB * MAX_DOM];
        map.chart_jacobian_into(chart, u, &mut jac[..amb * m])?;
        let mut g = [0.0; MAX_DOM];
        ch.metric_diag_into(u, &mut g);
        let sqrt_g = ch.sqrt_det_g(u);
        let mut e = 0.0;
        for j in 0..m {
            e += la::dot(&jac[j * amb..j * amb + amb], &jac[j * amb..j * amb + amb]) / g[j];
        }
        e *= 0.5;
        let scale = sqrt_g / g[k] * profile.f_prime(e);
        for i in 0..amb {
            out[i] = scale * jac[k * amb + i];
        }
        Ok(())
    };

    let rows: Vec<(DVector<f64>, f64)> = nodes
        .par_iter()
        .map(|node| {
            let ch = domain.chart(node.chart);
            let mut steps = [0.0; MAX_DOM];
            for k in 0..m {
                let (lo, hi) = ch.extents()[k];
                steps[k] = TENSION_STEP_FACTOR * (hi - lo) / std::f64::consts::PI;
            }
            if !ch.interior_with_margin(&node.u, &steps[..m]) {
                return Err(Error::Contract(format!(
                    "tension stencil leaves the chart at u = {:?}",
                    node.u
                )));
            }
            let mut acc = [0.0; MAX_AMB];
            let mut up = [0.0; MAX_DOM];
            let mut um = [0.0; MAX_DOM];
            let mut wp = [0.0; MAX_AMB];
            let mut wm = [0.0; MAX_AMB];
            for k in 0..m {
                up[..m].copy_from_slice(&node.u);
                um[..m].copy_from_slice(&node.u);
                up[k] += steps[k];
                um[k] -= steps[k];
                flux(node.chart, &up[..m], k, &mut wp)?;
                flux(node.chart, &um[..m], k, &mut wm)?;
                let inv = 1.0 / (2.0 * steps[k]);
                for i in 0..amb {
                    acc[i] += (wp[i] - wm[i]) * inv;
                }
            }
            let sqrt_g = ch.sqrt_det_g(&node.u);
            for a in acc.iter_mut().take(amb) {
                *a /= sqrt_g;
            }
            // tangential projection onto T_{phi(x)} S^n
            let mut point = [0.0; MAX_AMB];
            map.point_into(node.chart, &node.u, &mut point[..amb]);
            let radial = la::dot(&acc[..amb], &point[..amb]);
            let mut tau = DVector::zeros(amb);
            for i in 0..amb {
                tau[i] = acc[i] - radial * point[i];
            }
            let norm = tau.norm();
            Ok((tau, norm))
        })
        .collect::<Result<_>>()?;

    let mut vectors = Vec::with_capacity(rows.len());
    let mut sup_norm: f64 = 0.0;
    for (tau, norm) in rows {
        sup_norm = sup_norm.max(norm);
        vectors.push(tau);
    }
    Ok(TensionField { vectors, sup_norm })
}

/// First variation of E_F along the conformal field of v:
/// - integral of <vbar o phi, tau_F(phi)>.
pub fn first_variation(map: &SmoothMap, profile: &FProfile, v: &DVector<f64>) -> Result<f64> {
    if v.len() != map.ambient_dim() {
        return Err(Error::Config(format!(
            "direction lives in R^{} but the map target sits in R^{}",
            v.len(),
            map.ambient_dim()
        )));
    }
    let tension = f_tension(map, profile)?;
    let amb = map.ambient_dim();
    let vs = v.as_slice();
    let points = map.par_node_map(|_, ne| {
        let mut p = [0.0; MAX_AMB];
        p[..amb].copy_from_slice(ne.point);
        Ok(p)
    })?;
    let values: Vec<f64> = points
        .iter()
        .zip(&tension.vectors)
        .map(|(p, tau)| {
            let phi_v = la::dot(vs, &p[..amb]);
            let mut pairing = 0.0;
            for i in 0..amb {
                pairing += (vs[i] - phi_v * p[i]) * tau[i];
            }
            -pairing
        })
        .collect();
    map.domain().integrate(&values)
}
