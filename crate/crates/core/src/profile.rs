//! Profile functions F with their derivatives and admissibility data: the
//! scalar quantity B and the tensor comparison S^F(gamma_t o phi) >=
//! theta(alpha_t^2 o phi) * S^F(phi).
//!
//! Built-in families:
//!   power:  F(t) = (2t)^(p/2) / p, p = 2 or p >= 4; theta(u) = u^(p/2)
//!   exp:    F(t) = 1 + a t - exp(-t), a > 0;        theta(u) = u^2
//!   sacks-uhlenbeck: F(t) = (1 + 2t)^alpha, 0 < alpha < 1; theta(u) = u^2
//!
//! For the exp family the composed stress decomposes as
//! alpha^2 (a + e^{-alpha^2 e}) S_g(phi) + alpha^4 e e^{-alpha^2 e} P, and
//! comparing eigenvalue-wise against theta(u) = u^2 leaves a nonnegative
//! remainder whenever phi_v >= 0 (so alpha <= 1 for t >= 0) and the
//! classical stress e g - P is positive; theta(u) = u fails because the
//! pullback coefficient carries alpha^4, not alpha^2.

use crate::error::{Error, Result};
use crate::functionals::stress_matrix_into;
use crate::la::{self, MAX_DOM};
use crate::map::SmoothMap;
use crate::sphere::ConformalFlow;
use std::sync::Arc;

/// Negative tolerance absorbed by the B >= 0 verdict.
pub const B_TOLERANCE: f64 = 1e-12;
/// Negative tolerance absorbed by the tensor-comparison verdict.
pub const COMPARISON_EIG_TOLERANCE: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A profile function F with derivatives and its comparison function theta.
#[derive(Clone)]
pub enum FProfile {
    Power {
        p: f64,
    },
    ExpType {
        a: f64,
    },
    SacksUhlenbeck {
        alpha: f64,
    },
    Custom {
        label: String,
        f: ScalarFn,
        f1: ScalarFn,
        f2: ScalarFn,
        theta: ScalarFn,
    },
}

impl std::fmt::Debug for FProfile {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "FProfile({})", self.label())
    }
}

impl FProfile {
    /// F(t) = (2t)^(p/2) / p for p = 2 or p >= 4.
    pub fn power(p: f64) -> Result<Self> {
        if !(p == 2.0 || p >= 4.0) {
            return Err(Error::Config(format!(
                "power profile needs p = 2 or p >= 4, got p = {p}"
            )));
        }
        let profile = FProfile::Power { p };
        profile.validate()?;
        Ok(profile)
    }

    /// F(t) = 1 + a t - exp(-t) for a > 0 (a is normally the maximum energy
    /// density of the scenario map).
    pub fn exp_type(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Config(format!(
                "exp profile needs a > 0, got a = {a}"
            )));
        }
        let profile = FProfile::ExpType { a };
        profile.validate()?;
        Ok(profile)
    }

    /// F(t) = (1 + 2t)^alpha for 0 < alpha < 1.
    pub fn sacks_uhlenbeck(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!(
                "sacks-uhlenbeck profile needs 0 < alpha < 1, got {alpha}"
            )));
        }
        let profile = FProfile::SacksUhlenbeck { alpha };
        profile.validate()?;
        Ok(profile)
    }

    /// User-supplied profile, spot-checked for F >= 0, F' > 0, and
    /// derivative consistency on a log grid.
    pub fn custom(
        label: impl Into<String>,
        f: ScalarFn,
        f1: ScalarFn,
        f2: ScalarFn,
        theta: ScalarFn,
    ) -> Result<Self> {
        let profile = FProfile::Custom {
            label: label.into(),
            f,
            f1,
            f2,
            theta,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn label(&self) -> String {
        match self {
            FProfile::Power { p } => format!("power(p={p})"),
            FProfile::ExpType { a } => format!("exp(a={a})"),
            FProfile::SacksUhlenbeck { alpha } => format!("sacks-uhlenbeck(alpha={alpha})"),
            FProfile::Custom { label, .. } => label.clone(),
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        match self {
            // integer exponents skip powf; glibc pow agrees bit-for-bit there
            FProfile::Power { p } if *p == 2.0 => t,
            FProfile::Power { p } if *p == 4.0 => t * t,
            FProfile::Power { p } => (2.0 * t).powf(p / 2.0) / p,
            FProfile::ExpType { a } => 1.0 + a * t - (-t).exp(),
            FProfile::SacksUhlenbeck { alpha } => (1.0 + 2.0 * t).powf(*alpha),
            FProfile::Custom { f, .. } => f(t),
        }
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        match self {
            FProfile::Power { p } if *p == 2.0 => 1.0,
            FProfile::Power { p } if *p == 4.0 => 2.0 * t,
            FProfile::Power { p } => (2.0 * t).powf(p / 2.0 - 1.0),
            FProfile::ExpType { a } => a + (-t).exp(),
            FProfile::SacksUhlenbeck { alpha } => 2.0 * alpha * (1.0 + 2.0 * t).powf(alpha - 1.0),
            FProfile::Custom { f1, .. } => f1(t),
        }
    }

    pub fn f_double_prime(&self, t: f64) -> f64 {
        match self {
            FProfile::Power { p } if *p == 2.0 => 0.0,
            FProfile::Power { p } if *p == 4.0 => 2.0,
            FProfile::Power { p } => (p - 2.0) * (2.0 * t).powf(p / 2.0 - 2.0),
            FProfile::ExpType { .. } => -(-t).exp(),
            FProfile::SacksUhlenbeck { alpha } => {
                4.0 * alpha * (alpha - 1.0) * (1.0 + 2.0 * t).powf(alpha - 2.0)
            }
            FProfile::Custom { f2, .. } => f2(t),
        }
    }

    /// Comparison function theta for the stress tensor inequality.
    pub fn theta(&self, u: f64) -> f64 {
        match self {
            FProfile::Power { p } => u.powf(p / 2.0),
            FProfile::ExpType { .. } => u * u,
            FProfile::SacksUhlenbeck { .. } => u * u,
            FProfile::Custom { theta, .. } => theta(u),
        }
    }

    /// Spot-checks the standing assumptions and derivative consistency on a
    /// log-spaced grid over [1e-3, 10].
    fn validate(&self) -> Result<()> {
        let grid: Vec<f64> = (0..40)
            .map(|i| 1e-3 * (10.0f64 / 1e-3).powf(i as f64 / 39.0))
            .collect();
        for &t in &grid {
            let f = self.f(t);
            let f1 = self.f_prime(t);
            if !(f >= 0.0) {
                return Err(Error::Config(format!(
                    "profile {} is negative at t = {t}",
                    self.label()
                )));
            }
            if !(f1 > 0.0) {
                return Err(Error::Config(format!(
                    "profile {} has F'({t}) = {f1}, expected > 0",
                    self.label()
                )));
            }
            let h = 1e-6 * t.max(1.0);
            let fd1 = (self.f(t + h) - self.f(t - h)) / (2.0 * h);
            if (f1 - fd1).abs() > 1e-6 * (1.0 + f1.abs()) {
                return Err(Error::Config(format!(
                    "profile {}: F' disagrees with finite differences at t = {t}",
                    self.label()
                )));
            }
            let f2 = self.f_double_prime(t);
            let fd2 = (self.f_prime(t + h) - self.f_prime(t - h)) / (2.0 * h);
            if (f2 - fd2).abs() > 1e-6 * (1.0 + f2.abs()) {
                return Err(Error::Config(format!(
                    "profile {}: F'' disagrees with finite differences at t = {t}",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

/// The admissibility quantity
///
///   B = ( F''(a^2 e) / F'(a^2 e) * a^2 - F''(e) / F'(e) ) * phi_v
///
/// with a^2 the squared conformal factor. Returns exactly 0 at a^2 = 1.
pub fn admissibility_b(profile: &FProfile, e: f64, alpha_sq: f64, phi_v: f64) -> Result<f64> {
    if !(e >= 0.0) {
        return Err(Error::Contract(format!(
            "energy density must be >= 0, got {e}"
        )));
    }
    if alpha_sq == 1.0 {
        return Ok(0.0);
    }
    // F'(0) = 0 happens for the power family with p > 2; there the bracket
    // cancels identically, so the e -> 0 limit of B is 0.
    if e == 0.0 && profile.f_prime(0.0) == 0.0 {
        return Ok(0.0);
    }
    let scaled = alpha_sq * e;
    let fp_scaled = profile.f_prime(scaled);
    let fp = profile.f_prime(e);
    if fp_scaled == 0.0 && scaled > 0.0 {
        return Err(Error::Contract(format!(
            "profile {} has F' = 0 at t = {scaled} > 0",
            profile.label()
        )));
    }
    if fp == 0.0 && e > 0.0 {
        return Err(Error::Contract(format!(
            "profile {} has F' = 0 at t = {e} > 0",
            profile.label()
        )));
    }
    let ratio_scaled = if fp_scaled == 0.0 {
        0.0
    } else {
        profile.f_double_prime(scaled) / fp_scaled
    };
    let ratio = if fp == 0.0 {
        0.0
    } else {
        profile.f_double_prime(e) / fp
    };
    Ok((ratio_scaled * alpha_sq - ratio) * phi_v)
}

/// Outcome of the per-node admissibility checks for one flow.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// B per node.
    pub b_values: Vec<f64>,
    pub min_b: f64,
    /// Minimum eigenvalue per node of S^F(gamma o phi) - theta * S^F(phi),
    /// with the composed stress obtained from the conformal transformation
    /// law (densities scale by alpha^2).
    pub comparison_min_eigs: Vec<f64>,
    pub min_comparison_eig: f64,
    /// Largest entrywise deviation between the finite-difference composed
    /// stress and theta * S^F(phi) + (transform-law difference); this is the
    /// genuine numerical cross-check of the transform route.
    pub fd_max_entry_dev: f64,
    pub admissible: bool,
}

/// Per-node tensor comparison for one profile and one flow.
///
/// The verdict eigenvalues come from the transform-law composed stress
/// (exact up to rounding); the finite-difference composed stress is also
/// assembled and its entrywise deviation reported.
pub fn check_tensor_comparison(
    map: &SmoothMap,
    profile: &FProfile,
    flow: &ConformalFlow,
) -> Result<AdmissibilityReport> {
    let m = map.domain().dim();
    let unit = flow.unit().as_slice().to_vec();

    // per-node: (B, comparison min eig, transform-route composed stress)
    let rows = map.par_node_map(|_, ne| {
        let alpha = flow.conformal_factor_slice(ne.point);
        let u = alpha * alpha;
        let phi_v = la::dot(&unit, ne.point);
        let b = admissibility_b(profile, ne.density, u, phi_v)?;

        let mut s_base = [0.0; MAX_DOM * MAX_DOM];
        stress_matrix_into(profile, ne.density, ne.pullback, m, &mut s_base);

        let mut p_scaled = [0.0; MAX_DOM * MAX_DOM];
        for i in 0..m * m {
            p_scaled[i] = u * ne.pullback[i];
        }
        let mut s_comp = [0.0; MAX_DOM * MAX_DOM];
        stress_matrix_into(profile, u * ne.density, &p_scaled, m, &mut s_comp);

        let th = profile.theta(u);
        let mut diff = [0.0; MAX_DOM * MAX_DOM];
        for i in 0..m * m {
            diff[i] = s_comp[i] - th * s_base[i];
        }
        let min_eig = la::sym_min_eig(&diff[..m * m], m);
        let mut s_comp_v = [0.0; MAX_DOM * MAX_DOM];
        s_comp_v[..m * m].copy_from_slice(&s_comp[..m * m]);
        Ok((b, min_eig, s_comp_v))
    })?;

    // finite-difference route for the composed stress
    let composed = map.compose_with_flow(flow)?;
    let fd_devs = composed.par_node_map(|idx, ne| {
        let mut s_fd = [0.0; MAX_DOM * MAX_DOM];
        stress_matrix_into(profile, ne.density, ne.pullback, m, &mut s_fd);
        let mut dev: f64 = 0.0;
        for i in 0..m * m {
            dev = dev.max((s_fd[i] - rows[idx].2[i]).abs());
        }
        Ok(dev)
    })?;

    let b_values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let comparison_min_eigs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let min_b = b_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_comparison_eig = comparison_min_eigs
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let fd_max_entry_dev = fd_devs.iter().cloned().fold(0.0, f64::max);
    let admissible = min_b >= -B_TOLERANCE && min_comparison_eig >= -COMPARISON_EIG_TOLERANCE;
    Ok(AdmissibilityReport {
        b_values,
        min_b,
        comparison_min_eigs,
        min_comparison_eig,
        fd_max_entry_dev,
        admissible,
    })
}
