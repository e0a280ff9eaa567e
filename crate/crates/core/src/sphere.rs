//! The target sphere S^n and its conformal group: the tangent field
//! v - <v,y> y, its one-parameter flow in closed form, the conformal factor,
//! and composition with ambient rotations.
//!
//! Directions are stored as a unit vector plus a magnitude, and the flow of
//! v at time t is realized as the unit-direction flow at time |v| * t. With
//! |v| = 1 the formulas coincide with the usual normalization
//! alpha_t(y) = 1 / (cosh t + <u, y> sinh t).

use crate::error::{Error, Result};
use crate::la;
use nalgebra::{DMatrix, DVector};

/// A point on S^n, kept unit to machine accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(DVector<f64>);

impl SpherePoint {
    /// Wraps a vector after normalizing it. Zero vectors are rejected.
    pub fn new(y: DVector<f64>) -> Result<Self> {
        let n = y.norm();
        if n == 0.0 {
            return Err(Error::Config("cannot normalize the zero vector".into()));
        }
        Ok(SpherePoint(y / n))
    }

    /// Standard basis point e_k in R^{dim}.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        SpherePoint(v)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }
}

/// Conformal field y -> v - <v,y> y on S^n.
pub fn vbar(v: &DVector<f64>, y: &SpherePoint) -> DVector<f64> {
    let c = v.dot(y.coords());
    v - y.coords() * c
}

/// One-parameter conformal flow with direction v and time t.
#[derive(Debug, Clone)]
pub struct ConformalFlow {
    unit: DVector<f64>,
    magnitude: f64,
    t: f64,
}

impl ConformalFlow {
    pub fn new(v: DVector<f64>, t: f64) -> Result<Self> {
        let magnitude = v.norm();
        if magnitude == 0.0 {
            return Err(Error::Config("flow direction must be nonzero".into()));
        }
        Ok(ConformalFlow {
            unit: v / magnitude,
            magnitude,
            t,
        })
    }

    /// Unit flow direction.
    pub fn unit(&self) -> &DVector<f64> {
        &self.unit
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Time parameter of the equivalent unit-direction flow, |v| * t.
    pub fn effective_time(&self) -> f64 {
        self.magnitude * self.t
    }

    pub fn with_time(&self, t: f64) -> Self {
        ConformalFlow {
            unit: self.unit.clone(),
            magnitude: self.magnitude,
            t,
        }
    }

    /// Closed-form flow map. Splitting y = c u + y_perp with c = <u, y>:
    ///
    ///   gamma_s(y) = [ (c cosh s + sinh s) u + y_perp ] / (cosh s + c sinh s)
    ///
    /// which integrates y' = u - <u,y> y and is renormalized on output.
    pub fn apply(&self, y: &SpherePoint) -> SpherePoint {
        let mut out = DVector::zeros(y.ambient_dim());
        self.apply_slice(y.coords().as_slice(), out.as_mut_slice());
        SpherePoint(out)
    }

    /// Allocation-free flow application on raw coordinates.
    pub fn apply_slice(&self, y: &[f64], out: &mut [f64]) {
        let s = self.effective_time();
        flow_slice(self.unit.as_slice(), s, y, out);
    }

    /// Conformal factor alpha at y: 1 / (cosh s + <u,y> sinh s) at the
    /// effective time s. Always positive since |<u,y>| <= 1.
    pub fn conformal_factor(&self, y: &SpherePoint) -> f64 {
        self.conformal_factor_slice(y.coords().as_slice())
    }

    pub fn conformal_factor_slice(&self, y: &[f64]) -> f64 {
        let s = self.effective_time();
        let c = la::dot(self.unit.as_slice(), y);
        1.0 / (s.cosh() + c * s.sinh())
    }

    /// Independent oracle: RK4 integration of y' = u - <u,y> y over the
    /// effective time, renormalizing each step.
    pub fn ode_oracle(&self, y: &SpherePoint, steps: usize) -> Result<SpherePoint> {
        if steps < 100 {
            return Err(Error::Contract(format!(
                "oracle needs at least 100 steps, got {steps}"
            )));
        }
        let s = self.effective_time();
        let h = s / steps as f64;
        let u = &self.unit;
        let field = |p: &DVector<f64>| -> DVector<f64> { u - p * u.dot(p) };
        let mut p = y.coords().clone();
        for _ in 0..steps {
            let k1 = field(&p);
            let k2 = field(&(&p + &k1 * (h / 2.0)));
            let k3 = field(&(&p + &k2 * (h / 2.0)));
            let k4 = field(&(&p + &k3 * h));
            p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let n = p.norm();
            p /= n;
        }
        Ok(SpherePoint(p))
    }
}

/// Raw closed-form flow at unit direction `u` and time `s`.
pub fn flow_slice(u: &[f64], s: f64, y: &[f64], out: &mut [f64]) {
    flow_slice_hyper(u, s.sinh(), s.cosh(), y, out);
}

/// Flow with the hyperbolic functions precomputed; hot loops hoist them.
pub fn flow_slice_hyper(u: &[f64], sh: f64, ch: f64, y: &[f64], out: &mut [f64]) {
    let c = la::dot(u, y);
    let denom = ch + c * sh;
    let coeff = (c * ch + sh) / denom - c / denom;
    // out = (coeff_u * u + y_perp) / denom with y_perp = y - c u, folded:
    for i in 0..y.len() {
        out[i] = y[i] / denom + coeff * u[i];
    }
    la::normalize(out);
}

/// A general conformal diffeomorphism r o gamma_t^v with r in O(n+1).
#[derive(Debug, Clone)]
pub struct ConformalDiffeo {
    rotation: DMatrix<f64>,
    flow: ConformalFlow,
}

impl ConformalDiffeo {
    pub fn new(rotation: DMatrix<f64>, flow: ConformalFlow) -> Result<Self> {
        let dim = flow.unit.len();
        if rotation.nrows() != dim || rotation.ncols() != dim {
            return Err(Error::Config(format!(
                "rotation is {}x{} but the flow lives in R^{dim}",
                rotation.nrows(),
                rotation.ncols()
            )));
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(dim, dim)).amax();
        if defect > 1e-12 {
            return Err(Error::Config(format!(
                "matrix is not orthogonal (defect {defect:e})"
            )));
        }
        Ok(ConformalDiffeo { rotation, flow })
    }

    pub fn apply(&self, y: &SpherePoint) -> SpherePoint {
        let flowed = self.flow.apply(y);
        let mut out = &self.rotation * flowed.coords();
        let n = out.norm();
        out /= n;
        SpherePoint(out)
    }

    /// The rotation part is an isometry, so the conformal factor of the
    /// composite equals that of the flow part.
    pub fn conformal_factor(&self, y: &SpherePoint) -> f64 {
        self.flow.conformal_factor(y)
    }

    pub fn flow(&self) -> &ConformalFlow {
        &self.flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(dim: usize, k: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        v
    }

    #[test]
    fn vbar_examples() {
        let y1 = SpherePoint::basis(3, 0);
        assert!(vbar(&e(3, 0), &y1).norm() < 1e-15);

        let y2 = SpherePoint::basis(3, 1);
        let w = vbar(&e(3, 0), &y2);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        assert!(w[1].abs() < 1e-15 && w[2].abs() < 1e-15);

        let diag = SpherePoint::new(DVector::from_vec(vec![1.0, 1.0, 0.0])).unwrap();
        let w = vbar(&e(3, 0), &diag);
        assert_relative_eq!(w[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(w[1], -0.5, epsilon = 1e-14);
        // result orthogonal to the base point
        assert!(w.dot(diag.coords()).abs() < 1e-14);
    }

    #[test]
    fn flow_identity_and_fixed_point() {
        let flow0 = ConformalFlow::new(e(3, 0), 0.0).unwrap();
        let y = SpherePoint::new(DVector::from_vec(vec![0.3, -0.8, 0.52])).unwrap();
        let moved = flow0.apply(&y);
        assert!((moved.coords() - y.coords()).norm() < 1e-14);

        let flow = ConformalFlow::new(e(3, 0), 1.7).unwrap();
        let fixed = flow.apply(&SpherePoint::basis(3, 0));
        assert_relative_eq!(fixed.coords()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn flow_orthogonal_case_closed_form() {
        let flow = ConformalFlow::new(e(3, 0), 1.0).unwrap();
        let moved = flow.apply(&SpherePoint::basis(3, 1));
        assert_relative_eq!(moved.coords()[0], 1.0f64.tanh(), epsilon = 1e-14);
        assert_relative_eq!(moved.coords()[1], 1.0 / 1.0f64.cosh(), epsilon = 1e-14);
    }

    #[test]
    fn flow_rejects_zero_direction() {
        assert!(matches!(
            ConformalFlow::new(DVector::zeros(3), 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn conformal_factor_examples() {
        let y_orth = SpherePoint::basis(3, 1);
        let flow0 = ConformalFlow::new(e(3, 0), 0.0).unwrap();
        assert_relative_eq!(flow0.conformal_factor(&y_orth), 1.0, epsilon = 1e-15);

        let flow1 = ConformalFlow::new(e(3, 0), 1.0).unwrap();
        assert_relative_eq!(
            flow1.conformal_factor(&y_orth),
            1.0 / 1.0f64.cosh(),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            flow1.conformal_factor(&SpherePoint::basis(3, 0)),
            (-1.0f64).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn magnitude_scaling_matches_unit_flow() {
        // flow of v at time t equals flow of v/|v| at time |v| t
        let v = DVector::from_vec(vec![2.0, 0.0, 0.0]);
        let y = SpherePoint::new(DVector::from_vec(vec![0.1, 0.7, -0.7])).unwrap();
        let scaled = ConformalFlow::new(v, 0.5).unwrap();
        let unit = ConformalFlow::new(e(3, 0), 1.0).unwrap();
        assert!((scaled.apply(&y).coords() - unit.apply(&y).coords()).norm() < 1e-14);
        assert_relative_eq!(
            scaled.conformal_factor(&y),
            unit.conformal_factor(&y),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ode_oracle_matches_closed_form() {
        let y = SpherePoint::basis(3, 1);
        for (t, steps) in [(1.0, 1000), (2.0, 2000)] {
            let flow = ConformalFlow::new(e(3, 0), t).unwrap();
            let exact = flow.apply(&y);
            let ode = flow.ode_oracle(&y, steps).unwrap();
            assert!(
                (exact.coords() - ode.coords()).norm() < 1e-8,
                "oracle deviates at t = {t}"
            );
        }
        let flow0 = ConformalFlow::new(e(3, 0), 0.0).unwrap();
        let ode = flow0.ode_oracle(&y, 100).unwrap();
        assert!((ode.coords() - y.coords()).norm() < 1e-14);
    }

    #[test]
    fn ode_oracle_requires_enough_steps() {
        let flow = ConformalFlow::new(e(3, 0), 1.0).unwrap();
        assert!(matches!(
            flow.ode_oracle(&SpherePoint::basis(3, 1), 10),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn diffeo_composition() {
        // identity rotation reduces to the flow
        let flow = ConformalFlow::new(e(3, 0), 0.8).unwrap();
        let d = ConformalDiffeo::new(DMatrix::identity(3, 3), flow.clone()).unwrap();
        let y = SpherePoint::new(DVector::from_vec(vec![0.2, 0.5, -0.9])).unwrap();
        assert!((d.apply(&y).coords() - flow.apply(&y).coords()).norm() < 1e-14);

        // quarter turn in the (0,1) plane at t = 0 sends e_0 to e_1
        let mut r = DMatrix::zeros(3, 3);
        r[(0, 1)] = -1.0;
        r[(1, 0)] = 1.0;
        r[(2, 2)] = 1.0;
        let still = ConformalFlow::new(e(3, 2), 0.0).unwrap();
        let d = ConformalDiffeo::new(r, still).unwrap();
        let moved = d.apply(&SpherePoint::basis(3, 0));
        assert_relative_eq!(moved.coords()[1], 1.0, epsilon = 1e-14);

        // outputs stay unit
        let flow = ConformalFlow::new(e(3, 1), 1.3).unwrap();
        let mut r = DMatrix::identity(3, 3);
        r[(0, 0)] = -1.0;
        let d = ConformalDiffeo::new(r, flow).unwrap();
        assert_relative_eq!(d.apply(&y).coords().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diffeo_rejects_non_orthogonal() {
        let flow = ConformalFlow::new(e(3, 0), 0.5).unwrap();
        let mut r = DMatrix::identity(3, 3);
        r[(0, 1)] = 0.5;
        assert!(matches!(
            ConformalDiffeo::new(r, flow),
            Err(Error::Config(_))
        ));
    }
}
