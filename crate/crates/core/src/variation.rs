//! Energy sweeps over the conformal group and the derivative identities
//! behind them: the closed-form right-hand side of dE/dt (in two competing
//! normalizations), the gradient coupling term, the Phi + Chi split of the
//! derivative, finite-difference oracles, and the full theorem-verification
//! pipeline.
//!
//! All formulas are evaluated at unit flow directions; sweeps normalize the
//! requested direction up front. The two right-hand-side normalizations
//! differ by e |vbar o phi|^2 versus 2e |vbar o phi|^2 in the first
//! integral; a finite-difference oracle adjudicates which one matches.

use crate::error::{Error, Result};
use crate::functionals::{
    f_energy, f_tension, stress_field, stress_matrix_into, ENERGY_CROSS_CHECK_TOL,
    TENSION_CERT_THRESHOLD,
};
use crate::la::{self, MAX_DOM};
use crate::map::{MapFields, SmoothMap};
use crate::profile::admissibility_b;
use crate::profile::{FProfile, B_TOLERANCE, COMPARISON_EIG_TOLERANCE};
#[cfg(test)]
use crate::sphere::ConformalFlow;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

/// Negative eigenvalue tolerance for certifying stress positivity; values
/// above +1e-10 count as strictly positive.
pub const STRESS_EIG_TOLERANCE: f64 = 1e-10;

/// Relative energy tolerance of the sweep verdict E(t) <= E(0) + tol.
pub const SWEEP_ENERGY_TOL_FACTOR: f64 = 1e-7;

/// Default finite-difference step of the derivative oracle.
pub const FD_ORACLE_STEP: f64 = 1e-4;

/// The two normalizations of the derivative right-hand side: the first
/// integrand carries either |d phi|^2 |vbar o phi|^2 (full density) or
/// (|d phi|^2 / 2) |vbar o phi|^2 (half density).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsVariant {
    FullDensity,
    HalfDensity,
}

/// The standard sweep grid {0, 0.1, ..., 2.0}.
pub fn default_t_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.1).collect()
}

/// Reproducible pseudo-random unit directions in R^{ambient_dim}.
pub fn seeded_directions(ambient_dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    (0..count)
        .map(|_| loop {
            let mut v: DVector<f64> = DVector::zeros(ambient_dim);
            for i in 0..ambient_dim {
                v[i] = normal.sample(&mut rng);
            }
            let n = v.norm();
            if n > 1e-6 {
                break v / n;
            }
        })
        .collect()
}

/// Precomputed base data reused by every pointwise formula of a sweep.
struct SweepEngine<'a> {
    profile: &'a FProfile,
    fields: MapFields,
    base_energy: f64,
    domain: &'a std::sync::Arc<crate::manifold::DomainManifold>,
    m: usize,
    /// Base pullback metrics, packed row-major m*m per node.
    pullback_packed: Vec<f64>,
    /// Base stress matrices, packed row-major m*m per node.
    stress_packed: Vec<f64>,
}

impl<'a> SweepEngine<'a> {
    fn new(map: &'a SmoothMap, profile: &'a FProfile, unit_v: &DVector<f64>) -> Result<Self> {
        let fields = map.compute_fields(unit_v)?;
        let base_energy = f_energy(map, profile)?;
        let m = map.domain().dim();
        let n = fields.density.len();
        let mut pullback_packed = vec![0.0; n * m * m];
        let mut stress_packed = vec![0.0; n * m * m];
        for i in 0..n {
            let p = &fields.pullback[i];
            for a in 0..m {
                for b in 0..m {
                    pullback_packed[i * m * m + a * m + b] = p[(a, b)];
                }
            }
            stress_matrix_into(
                profile,
                fields.density[i],
                &pullback_packed[i * m * m..(i + 1) * m * m],
                m,
                &mut stress_packed[i * m * m..(i + 1) * m * m],
            );
        }
        Ok(SweepEngine {
            profile,
            fields,
            base_energy,
            domain: map.domain(),
            m,
            pullback_packed,
            stress_packed,
        })
    }

    /// Everything a sweep cell needs from the base fields at one node:
    /// fast-path energy integrand, B, transform-route comparison
    /// eigenvalue, and the four derivative integrands.
    fn cell_row(&self, i: usize, sh: f64, ch: f64) -> Result<(f64, f64, f64, [f64; 4])> {
        let m = self.m;
        let e = self.fields.density[i];
        let pv = self.fields.phi_v[i];
        let dvsq = self.fields.dphi_v_sq[i];
        let a = self.alpha(i, sh, ch);
        let a2 = a * a;
        let fast = self.profile.f(a2 * e);
        let b = admissibility_b(self.profile, e, a2, pv)?;

        let pb = &self.pullback_packed[i * m * m..(i + 1) * m * m];
        let sb = &self.stress_packed[i * m * m..(i + 1) * m * m];
        let mut p_scaled = [0.0; MAX_DOM * MAX_DOM];
        for j in 0..m * m {
            p_scaled[j] = a2 * pb[j];
        }
        let mut s_comp = [0.0; MAX_DOM * MAX_DOM];
        stress_matrix_into(self.profile, a2 * e, &p_scaled, m, &mut s_comp);
        let th = self.profile.theta(a2);
        for j in 0..m * m {
            s_comp[j] -= th * sb[j];
        }
        let cmp = la::sym_min_eig(&s_comp[..m * m], m);

        // derivative integrands: rhs (both normalizations), Phi, Chi
        let fp_scaled = self.profile.f_prime(a2 * e);
        let fpp_scaled = self.profile.f_double_prime(a2 * e);
        let vbar_sq = 1.0 - pv * pv;
        let a3 = a * a2;
        let gradient = if e == 0.0 {
            0.0
        } else {
            let bracket = fpp_scaled * a2 - self.ratio(e, a2) * self.profile.f_double_prime(e);
            -sh * a3 * a2 * fpp_scaled * 2.0 * e * dvsq + a2 * bracket * pv * 2.0 * e
        };
        let rhs_full = -2.0 * sh * a3 * fp_scaled * (2.0 * e * vbar_sq - dvsq) - gradient;
        let rhs_half = -2.0 * sh * a3 * fp_scaled * (e * vbar_sq - dvsq) - gradient;
        let phi =
            2.0 * sh * a3 * ((fp_scaled + a2 * e * fpp_scaled) * dvsq - fp_scaled * e * vbar_sq);
        let chi = if e == 0.0 {
            0.0
        } else {
            let bracket = fpp_scaled * a2 - self.ratio(e, a2) * self.profile.f_double_prime(e);
            -a2 * bracket * pv * 2.0 * e
        };
        Ok((fast, b, cmp, [rhs_full, rhs_half, phi, chi]))
    }

    fn node_count(&self) -> usize {
        self.fields.density.len()
    }

    fn alpha(&self, idx: usize, sh: f64, ch: f64) -> f64 {
        1.0 / (ch + self.fields.phi_v[idx] * sh)
    }

    /// F'(a2 e) / F'(e), with the e -> 0 limit 1.
    fn ratio(&self, e: f64, a2: f64) -> f64 {
        if e == 0.0 {
            1.0
        } else {
            self.profile.f_prime(a2 * e) / self.profile.f_prime(e)
        }
    }

    /// Fast-path energy E(t) = integral of F(alpha_t^2 e) over base fields.
    fn fast_energy(&self, t: f64) -> Result<f64> {
        let (sh, ch) = (t.sinh(), t.cosh());
        let values: Vec<f64> = (0..self.node_count())
            .map(|i| {
                let a = self.alpha(i, sh, ch);
                self.profile.f(a * a * self.fields.density[i])
            })
            .collect();
        self.domain.integrate(&values)
    }

    fn fd_derivative(&self, t0: f64, step: f64) -> Result<f64> {
        Ok((self.fast_energy(t0 + step)? - self.fast_energy(t0 - step)?) / (2.0 * step))
    }

    /// Phi(t): the stress-coupled part of dE/dt,
    /// 2 sinh(t) int alpha^3 [ (F'(a2 e) + a2 e F''(a2 e)) |d phi_v|^2
    ///                         - F'(a2 e) e |vbar o phi|^2 ] dv.
    fn phi_term(&self, t0: f64) -> Result<f64> {
        let (sh, ch) = (t0.sinh(), t0.cosh());
        let values: Vec<f64> = (0..self.node_count())
            .map(|i| {
                let e = self.fields.density[i];
                let pv = self.fields.phi_v[i];
                let dvsq = self.fields.dphi_v_sq[i];
                let a = self.alpha(i, sh, ch);
                let a2 = a * a;
                let fp = self.profile.f_prime(a2 * e);
                let fpp = self.profile.f_double_prime(a2 * e);
                let vbar_sq = 1.0 - pv * pv;
                2.0 * sh * a.powi(3) * ((fp + a2 * e * fpp) * dvsq - fp * e * vbar_sq)
            })
            .collect();
        self.domain.integrate(&values)
    }

    /// Chi(t): the admissibility-coupled part of dE/dt,
    /// - int alpha^2 (F''(a2 e) a2 - [F'(a2 e)/F'(e)] F''(e)) phi_v |d phi|^2 dv.
    fn chi_term(&self, t0: f64) -> Result<f64> {
        let (sh, ch) = (t0.sinh(), t0.cosh());
        let values: Vec<f64> = (0..self.node_count())
            .map(|i| {
                let e = self.fields.density[i];
                if e == 0.0 {
                    return 0.0;
                }
                let pv = self.fields.phi_v[i];
                let a = self.alpha(i, sh, ch);
                let a2 = a * a;
                let bracket = self.profile.f_double_prime(a2 * e) * a2
                    - self.ratio(e, a2) * self.profile.f_double_prime(e);
                -a2 * bracket * pv * 2.0 * e
            })
            .collect();
        self.domain.integrate(&values)
    }

    /// The gradient coupling term
    /// g(t) = int alpha^2 F'(e) <d phi(grad f_t), vbar o phi> dv
    /// in its expanded two-integral form, with <d phi(grad(alpha o phi)),
    /// vbar o phi> = -sinh(t) alpha^2 |d phi_v|^2 substituted.
    fn gradient_term(&self, t0: f64) -> Result<f64> {
        let (sh, ch) = (t0.sinh(), t0.cosh());
        let values: Vec<f64> = (0..self.node_count())
            .map(|i| {
                let e = self.fields.density[i];
                if e == 0.0 {
                    return 0.0;
                }
                let pv = self.fields.phi_v[i];
                let dvsq = self.fields.dphi_v_sq[i];
                let a = self.alpha(i, sh, ch);
                let a2 = a * a;
                let first = -sh * a.powi(5) * self.profile.f_double_prime(a2 * e) * 2.0 * e * dvsq;
                let bracket = self.profile.f_double_prime(a2 * e) * a2
                    - self.ratio(e, a2) * self.profile.f_double_prime(e);
                let second = a2 * bracket * pv * 2.0 * e;
                first + second
            })
            .collect();
        self.domain.integrate(&values)
    }

    /// First integral of the derivative right-hand side.
    fn rhs_first_term(&self, t0: f64, variant: RhsVariant) -> Result<f64> {
        let (sh, ch) = (t0.sinh(), t0.cosh());
        let density_factor = match variant {
            RhsVariant::FullDensity => 2.0,
            RhsVariant::HalfDensity => 1.0,
        };
        let values: Vec<f64> = (0..self.node_count())
            .map(|i| {
                let e = self.fields.density[i];
                let pv = self.fields.phi_v[i];
                let dvsq = self.fields.dphi_v_sq[i];
                let a = self.alpha(i, sh, ch);
                let a2 = a * a;
                let vbar_sq = 1.0 - pv * pv;
                -2.0 * sh
                    * a.powi(3)
                    * self.profile.f_prime(a2 * e)
                    * (density_factor * e * vbar_sq - dvsq)
            })
            .collect();
        self.domain.integrate(&values)
    }

    fn rhs(&self, t0: f64, variant: RhsVariant) -> Result<f64> {
        Ok(self.rhs_first_term(t0, variant)? - self.gradient_term(t0)?)
    }
}

fn unit_direction(map: &SmoothMap, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != map.ambient_dim() {
        return Err(Error::Config(format!(
            "direction lives in R^{} but the map target sits in R^{}",
            v.len(),
            map.ambient_dim()
        )));
    }
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::Config("direction must be nonzero".into()));
    }
    Ok(v / n)
}

fn certify_f_harmonic(map: &SmoothMap, profile: &FProfile) -> Result<f64> {
    let tension = f_tension(map, profile)?;
    if !tension.certifies_f_harmonic() {
        return Err(Error::Precondition(format!(
            "map '{}' is not certified F-harmonic: sup|tau_F| = {:e} >= {:e}",
            map.name(),
            tension.sup_norm,
            TENSION_CERT_THRESHOLD
        )));
    }
    Ok(tension.sup_norm)
}

/// Central finite difference of the fast-path energy at t0.
pub fn fd_derivative_oracle(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t0: f64,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Contract(format!(
            "step must be positive, got {step}"
        )));
    }
    let unit = unit_direction(map, v)?;
    let engine = SweepEngine::new(map, profile, &unit)?;
    engine.fd_derivative(t0, step)
}

/// Closed-form right-hand side of dE/dt at t0 for a certified F-harmonic
/// map, in the requested normalization.
pub fn energy_derivative_rhs(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t0: f64,
    variant: RhsVariant,
) -> Result<f64> {
    certify_f_harmonic(map, profile)?;
    let unit = unit_direction(map, v)?;
    let engine = SweepEngine::new(map, profile, &unit)?;
    engine.rhs(t0, variant)
}

/// The gradient coupling term g(t0) in expanded form.
pub fn gradient_term(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t0: f64,
) -> Result<f64> {
    certify_f_harmonic(map, profile)?;
    let unit = unit_direction(map, v)?;
    let engine = SweepEngine::new(map, profile, &unit)?;
    engine.gradient_term(t0)
}

/// The split dE/dt = Phi(t0) + Chi(t0), cross-checked against the
/// finite-difference oracle within 1e-4 relative.
pub fn derivative_decomposition(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t0: f64,
) -> Result<(f64, f64)> {
    certify_f_harmonic(map, profile)?;
    let unit = unit_direction(map, v)?;
    let engine = SweepEngine::new(map, profile, &unit)?;
    let phi = engine.phi_term(t0)?;
    let chi = engine.chi_term(t0)?;
    let fd = engine.fd_derivative(t0, FD_ORACLE_STEP)?;
    if (phi + chi - fd).abs() > 1e-4 * (1.0 + fd.abs()) {
        return Err(Error::Numeric(format!(
            "Phi + Chi = {} disagrees with the derivative oracle {} at t0 = {t0}",
            phi + chi,
            fd
        )));
    }
    Ok((phi, chi))
}

/// Admissibility aggregates at one sweep time.
#[derive(Debug, Clone, Copy)]
pub struct AdmissibilitySample {
    pub t: f64,
    pub min_b: f64,
    pub min_comparison_eig: f64,
}

/// Minimum of B and of the transform-route comparison eigenvalue over the
/// nodes, for every grid time. Much cheaper than the full tensor
/// comparison: no composed-map differentials are taken.
pub fn admissibility_scan(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t_grid: &[f64],
) -> Result<Vec<AdmissibilitySample>> {
    let unit = unit_direction(map, v)?;
    let engine = SweepEngine::new(map, profile, &unit)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (sh, ch) = (t.sinh(), t.cosh());
        let mut min_b = f64::INFINITY;
        let mut min_cmp = f64::INFINITY;
        for i in 0..engine.node_count() {
            let (_, b, cmp, _) = engine.cell_row(i, sh, ch)?;
            min_b = min_b.min(b);
            min_cmp = min_cmp.min(cmp);
        }
        out.push(AdmissibilitySample { t, min_b, min_comparison_eig: min_cmp });
    }
    Ok(out)
}

/// One grid point of an energy sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub t: f64,
    /// Composed-map energy (finite-difference route).
    pub energy: f64,
    /// Conformal fast-path energy.
    pub energy_fast: f64,
    pub fd_derivative: f64,
    /// Derivative right-hand side, full-density normalization.
    pub rhs_full: f64,
    /// Derivative right-hand side, half-density normalization.
    pub rhs_half: f64,
    pub phi: f64,
    pub chi: f64,
    pub min_b: f64,
    /// Minimum eigenvalue of the composed stress (finite-difference route).
    pub min_stress_eig: f64,
    /// Minimum eigenvalue of S^F(gamma o phi) - theta(alpha^2) S^F(phi)
    /// (transform-law route).
    pub min_comparison_eig: f64,
    pub energy_ok: bool,
    pub cross_check_ok: bool,
}

/// Full record of an energy sweep along one direction.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub direction: DVector<f64>,
    pub t_grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub base_energy: f64,
    /// E(t) <= E(0) + tol at every grid point.
    pub pass: bool,
    pub min_b: f64,
    pub min_comparison_eig: f64,
    pub max_cross_deviation: f64,
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Contract("sweep grid is empty".into()));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::Contract(
            "sweep grid must start at t >= 0 (negative times are handled by reversing the direction)".into(),
        ));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Contract(
                "sweep grid must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

fn energy_sweep_inner(
    map: &SmoothMap,
    profile: &FProfile,
    unit_v: &DVector<f64>,
    t_grid: &[f64],
    cache: &crate::map::StencilCache,
) -> Result<SweepResult> {
    let engine = SweepEngine::new(map, profile, unit_v)?;
    let m = map.domain().dim();
    let e0 = engine.base_energy;
    let tol_e = SWEEP_ENERGY_TOL_FACTOR * (1.0 + e0);
    let n = engine.node_count();

    let mut points = Vec::with_capacity(t_grid.len());
    let mut fast_values = vec![0.0; n];
    let mut rhs_full_values = vec![0.0; n];
    let mut rhs_half_values = vec![0.0; n];
    let mut phi_values = vec![0.0; n];
    let mut chi_values = vec![0.0; n];
    for &t in t_grid {
        let (sh, ch) = (t.sinh(), t.cosh());

        // one pass over the base fields for everything pointwise
        let mut min_b = f64::INFINITY;
        let mut min_cmp = f64::INFINITY;
        for i in 0..n {
            let (fast, b, cmp, derivs) = engine.cell_row(i, sh, ch)?;
            fast_values[i] = fast;
            min_b = min_b.min(b);
            min_cmp = min_cmp.min(cmp);
            rhs_full_values[i] = derivs[0];
            rhs_half_values[i] = derivs[1];
            phi_values[i] = derivs[2];
            chi_values[i] = derivs[3];
        }
        let energy_fast = engine.domain.integrate(&fast_values)?;
        let rhs_full = engine.domain.integrate(&rhs_full_values)?;
        let rhs_half = engine.domain.integrate(&rhs_half_values)?;
        let phi = engine.domain.integrate(&phi_values)?;
        let chi = engine.domain.integrate(&chi_values)?;

        // composed-map route; the flow at t = 0 is the identity, where the
        // composed energy is the base energy itself
        let (energy, min_stress_eig) = if t == 0.0 {
            let mut min_eig = f64::INFINITY;
            for i in 0..n {
                min_eig = min_eig.min(la::sym_min_eig(
                    &engine.stress_packed[i * m * m..(i + 1) * m * m],
                    m,
                ));
            }
            (e0, min_eig)
        } else {
            let rows = cache.par_composed_map(unit_v.as_slice(), t, |_, ne| {
                let mut s = [0.0; MAX_DOM * MAX_DOM];
                stress_matrix_into(profile, ne.density, ne.pullback, m, &mut s);
                (profile.f(ne.density), la::sym_min_eig(&s[..m * m], m))
            });
            let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let min_eig = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            (engine.domain.integrate(&values)?, min_eig)
        };

        let fd_derivative = engine.fd_derivative(t, FD_ORACLE_STEP)?;

        let energy_ok = energy <= e0 + tol_e;
        let cross_check_ok =
            (energy - energy_fast).abs() <= ENERGY_CROSS_CHECK_TOL * (1.0 + energy_fast.abs());
        points.push(SweepPoint {
            t,
            energy,
            energy_fast,
            fd_derivative,
            rhs_full,
            rhs_half,
            phi,
            chi,
            min_b,
            min_stress_eig,
            min_comparison_eig: min_cmp,
            energy_ok,
            cross_check_ok,
        });
    }

    let pass = points.iter().all(|p| p.energy_ok);
    let min_b = points.iter().map(|p| p.min_b).fold(f64::INFINITY, f64::min);
    let min_comparison_eig = points
        .iter()
        .map(|p| p.min_comparison_eig)
        .fold(f64::INFINITY, f64::min);
    let max_cross_deviation = points
        .iter()
        .map(|p| (p.energy - p.energy_fast).abs())
        .fold(0.0, f64::max);
    Ok(SweepResult {
        direction: unit_v.clone(),
        t_grid: t_grid.to_vec(),
        points,
        base_energy: e0,
        pass,
        min_b,
        min_comparison_eig,
        max_cross_deviation,
    })
}

/// Energy sweep E(t) = E_F(gamma_t o phi) over a t >= 0 grid. With
/// `theorem_verdict` the map must first certify as F-harmonic; exploratory
/// sweeps accept arbitrary maps.
pub fn energy_sweep(
    map: &SmoothMap,
    profile: &FProfile,
    v: &DVector<f64>,
    t_grid: &[f64],
    theorem_verdict: bool,
) -> Result<SweepResult> {
    validate_grid(t_grid)?;
    if theorem_verdict {
        certify_f_harmonic(map, profile)?;
    }
    let unit = unit_direction(map, v)?;
    let cache = map.stencil_cache()?;
    energy_sweep_inner(map, profile, &unit, t_grid, &cache)
}

/// Outcome of the theorem pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoremVerdict {
    /// All hypotheses certified and E(t) <= E(0) on every sweep.
    Verified { strict: bool },
    /// One or more hypotheses failed; the listed reasons tell which.
    HypothesesFail(Vec<String>),
    /// Hypotheses certified but the energy inequality failed somewhere;
    /// this state indicates an implementation bug.
    CounterexampleFlag,
}

/// Full report of the theorem pipeline over a set of directions.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub tension_sup: f64,
    /// S^{o,F} over all nodes.
    pub stress_min: f64,
    pub min_b: f64,
    pub min_comparison_eig: f64,
    /// Sweeps in direction order: +d_0, -d_0, +d_1, -d_1, ...
    pub sweeps: Vec<SweepResult>,
    /// Which right-hand-side normalization matched the derivative oracle at
    /// t0 = 0.5 on the first direction (None if neither or both matched).
    pub matched_variant: Option<RhsVariant>,
    pub verdict: TheoremVerdict,
}

/// Runs the pipeline: certify F-harmonicity, certify stress positivity,
/// certify admissibility over the sweeps, and check E(t) <= E(0) for both
/// signs of every direction. Hypotheses are checked, never assumed.
pub fn verify_theorem(
    map: &SmoothMap,
    profile: &FProfile,
    directions: &[DVector<f64>],
    t_grid: &[f64],
) -> Result<TheoremReport> {
    validate_grid(t_grid)?;
    if directions.is_empty() {
        return Err(Error::Config("no sweep directions given".into()));
    }

    let tension = f_tension(map, profile)?;
    let stress = stress_field(map, profile)?;
    let cache = map.stencil_cache()?;

    let mut sweeps = Vec::with_capacity(2 * directions.len());
    for v in directions {
        let unit = unit_direction(map, v)?;
        sweeps.push(energy_sweep_inner(map, profile, &unit, t_grid, &cache)?);
        sweeps.push(energy_sweep_inner(map, profile, &(-&unit), t_grid, &cache)?);
    }

    let min_b = sweeps.iter().map(|s| s.min_b).fold(f64::INFINITY, f64::min);
    let min_comparison_eig = sweeps
        .iter()
        .map(|s| s.min_comparison_eig)
        .fold(f64::INFINITY, f64::min);

    // adjudicate the right-hand-side normalization at t0 = 0.5
    let matched_variant = {
        let unit = unit_direction(map, &directions[0])?;
        let engine = SweepEngine::new(map, profile, &unit)?;
        let t0 = 0.5;
        let fd = engine.fd_derivative(t0, FD_ORACLE_STEP)?;
        let tol = 1e-4 * (1.0 + fd.abs());
        let full_ok = (engine.rhs(t0, RhsVariant::FullDensity)? - fd).abs() <= tol;
        let half_ok = (engine.rhs(t0, RhsVariant::HalfDensity)? - fd).abs() <= tol;
        match (full_ok, half_ok) {
            (true, false) => Some(RhsVariant::FullDensity),
            (false, true) => Some(RhsVariant::HalfDensity),
            _ => None,
        }
    };

    let mut failures = Vec::new();
    if tension.sup_norm >= TENSION_CERT_THRESHOLD {
        failures.push(format!(
            "f-harmonicity: sup|tau_F| = {:e} >= {:e}",
            tension.sup_norm, TENSION_CERT_THRESHOLD
        ));
    }
    if stress.global_min < -STRESS_EIG_TOLERANCE {
        failures.push(format!(
            "stress positivity: S^(o,F) = {} < -{:e}",
            stress.global_min, STRESS_EIG_TOLERANCE
        ));
    }
    if min_b < -B_TOLERANCE {
        failures.push(format!("admissibility: min B = {min_b} < -{B_TOLERANCE:e}"));
    }
    if min_comparison_eig < -COMPARISON_EIG_TOLERANCE {
        failures.push(format!(
            "admissibility: tensor comparison min eigenvalue = {min_comparison_eig} < -{COMPARISON_EIG_TOLERANCE:e}"
        ));
    }

    let verdict = if !failures.is_empty() {
        TheoremVerdict::HypothesesFail(failures)
    } else if sweeps.iter().any(|s| !s.pass) {
        TheoremVerdict::CounterexampleFlag
    } else {
        TheoremVerdict::Verified {
            strict: stress.global_min > STRESS_EIG_TOLERANCE,
        }
    };

    Ok(TheoremReport {
        tension_sup: tension.sup_norm,
        stress_min: stress.global_min,
        min_b,
        min_comparison_eig,
        sweeps,
        matched_variant,
        verdict,
    })
}
