//! Property tests for the conformal-group machinery: group law, cocycle,
//! pointwise conformality, inversion, and the ODE oracle.

use fharmonic::sphere::{vbar, ConformalFlow, SpherePoint};
use nalgebra::DVector;
use proptest::prelude::*;

fn unit_vector(dim: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter_map("norm too small", |coords| {
        let v = DVector::from_vec(coords);
        let n = v.norm();
        if n > 0.2 {
            Some(v / n)
        } else {
            None
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_law(u in unit_vector(4), y in unit_vector(4), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let y = SpherePoint::new(y).unwrap();
        let first = ConformalFlow::new(u.clone(), t).unwrap().apply(&y);
        let chained = ConformalFlow::new(u.clone(), s).unwrap().apply(&first);
        let direct = ConformalFlow::new(u, s + t).unwrap().apply(&y);
        prop_assert!((chained.coords() - direct.coords()).norm() < 1e-10);
    }

    #[test]
    fn cocycle(u in unit_vector(4), y in unit_vector(4), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let y = SpherePoint::new(y).unwrap();
        let flow_t = ConformalFlow::new(u.clone(), t).unwrap();
        let flow_s = ConformalFlow::new(u.clone(), s).unwrap();
        let flow_st = ConformalFlow::new(u, s + t).unwrap();
        let lhs = flow_st.conformal_factor(&y);
        let rhs = flow_s.conformal_factor(&flow_t.apply(&y)) * flow_t.conformal_factor(&y);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn inversion(u in unit_vector(3), y in unit_vector(3), t in -2.0f64..2.0) {
        let y = SpherePoint::new(y).unwrap();
        let back = ConformalFlow::new(u.clone(), -t).unwrap().apply(&y);
        let flipped = ConformalFlow::new(-u, t).unwrap().apply(&y);
        prop_assert!((back.coords() - flipped.coords()).norm() < 1e-12);
    }

    #[test]
    fn conformality_by_finite_differences(
        u in unit_vector(3),
        y in unit_vector(3),
        w in unit_vector(3),
        t in -1.5f64..1.5,
    ) {
        // tangentialize and normalize the test vector at y
        let y = SpherePoint::new(y).unwrap();
        let mut w = &w - y.coords() * y.coords().dot(&w);
        let n = w.norm();
        prop_assume!(n > 1e-3);
        w /= n;

        let flow = ConformalFlow::new(u, t).unwrap();
        // central difference along the great circle through y with speed w
        let eps: f64 = 1e-5;
        let plus = SpherePoint::new(y.coords() * eps.cos() + &w * eps.sin()).unwrap();
        let minus = SpherePoint::new(y.coords() * eps.cos() - &w * eps.sin()).unwrap();
        let dgamma = (flow.apply(&plus).coords() - flow.apply(&minus).coords()) / (2.0 * eps);
        let alpha = flow.conformal_factor(&y);
        prop_assert!(
            (dgamma.norm() - alpha).abs() < 1e-6 * (1.0 + alpha),
            "stretch {} vs factor {alpha}",
            dgamma.norm()
        );
    }

    #[test]
    fn vbar_is_tangent(v in unit_vector(5), y in unit_vector(5)) {
        let y = SpherePoint::new(y).unwrap();
        let field = vbar(&v, &y);
        prop_assert!(field.dot(y.coords()).abs() < 1e-13);
    }

    #[test]
    fn flow_matches_ode_oracle(u in unit_vector(4), y in unit_vector(4), t in -2.0f64..2.0) {
        let y = SpherePoint::new(y).unwrap();
        let flow = ConformalFlow::new(u, t).unwrap();
        let closed = flow.apply(&y);
        let ode = flow.ode_oracle(&y, 2000).unwrap();
        prop_assert!((closed.coords() - ode.coords()).norm() < 1e-8);
    }
}
