//! Small allocation-free linear algebra on slices, deterministic summation,
//! and Gauss-Legendre nodes. Everything here is hot-path code shared by the
//! geometry and functional modules.

/// Maximum domain (chart) dimension supported by the stack buffers.
pub const MAX_DOM: usize = 6;
/// Maximum ambient dimension of the target sphere (S^n sits in R^{n+1}).
pub const MAX_AMB: usize = 8;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

/// Pairwise (tree) summation with a fixed split, independent of any
/// evaluation schedule. Bit-identical for a given input slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Nodes are strictly interior and returned in
/// increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev-based initial guess for the k-th root (descending).
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' at x via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Minimum eigenvalue of a symmetric matrix given as a row-major `dim x dim`
/// slice. Closed-form for dim <= 3, Jacobi sweep fallback above.
pub fn sym_min_eig(a: &[f64], dim: usize) -> f64 {
    match dim {
        1 => a[0],
        2 => {
            let (p, q, r) = (a[0], a[1], a[3]);
            let mean = 0.5 * (p + r);
            let disc = (0.5 * (p - r)).hypot(q);
            mean - disc
        }
        3 => sym_min_eig_3(a),
        _ => sym_min_eig_jacobi(a, dim),
    }
}

/// Trigonometric closed form for the smallest eigenvalue of a symmetric 3x3.
fn sym_min_eig_3(a: &[f64]) -> f64 {
    let (a11, a12, a13) = (a[0], a[1], a[2]);
    let (a22, a23, a33) = (a[4], a[5], a[8]);
    let p1 = a12 * a12 + a13 * a13 + a23 * a23;
    let q = (a11 + a22 + a33) / 3.0;
    if p1 == 0.0 {
        return a11.min(a22).min(a33);
    }
    let p2 = (a11 - q).powi(2) + (a22 - q).powi(2) + (a33 - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    // r = det((A - qI)/p) / 2, clamped to [-1, 1] against rounding.
    let b11 = (a11 - q) / p;
    let b22 = (a22 - q) / p;
    let b33 = (a33 - q) / p;
    let b12 = a12 / p;
    let b13 = a13 / p;
    let b23 = a23 / p;
    let det = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13)
        + b13 * (b12 * b23 - b22 * b13);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    // Eigenvalues are q + 2p*cos(phi + 2*pi*k/3); k = 1 gives the smallest.
    q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos()
}

/// Cyclic Jacobi sweeps; only used for dim > 3 (flat tori of higher rank).
fn sym_min_eig_jacobi(a: &[f64], dim: usize) -> f64 {
    let mut m = a.to_vec();
    let idx = |i: usize, j: usize| i * dim + j;
    for _ in 0..60 {
        let mut off = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                off += m[idx(i, j)] * m[idx(i, j)];
            }
        }
        if off < 1e-30 {
            break;
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let apq = m[idx(i, j)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[idx(i, i)];
                let aqq = m[idx(j, j)];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let aik = m[idx(i, k)];
                    let ajk = m[idx(j, k)];
                    m[idx(i, k)] = c * aik - s * ajk;
                    m[idx(j, k)] = s * aik + c * ajk;
                }
                for k in 0..dim {
                    let aki = m[idx(k, i)];
                    let akj = m[idx(k, j)];
                    m[idx(k, i)] = c * aki - s * akj;
                    m[idx(k, j)] = s * aki + c * akj;
                }
            }
        }
    }
    let mut min = f64::INFINITY;
    for i in 0..dim {
        min = min.min(m[idx(i, i)]);
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is the highest exactly integrable with 8 nodes
        let exact = 2.0 / 15.0; // integral of t^14 over [-1,1]
        let got: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(14)).sum();
        assert_relative_eq!(got, exact, epsilon = 1e-13);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_nodes_interior_sorted() {
        for n in [3, 16, 64] {
            let (x, w) = gauss_legendre(n);
            for i in 0..n {
                assert!(x[i] > -1.0 && x[i] < 1.0);
                assert!(w[i] > 0.0);
                if i > 0 {
                    assert!(x[i] > x[i - 1]);
                }
            }
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_smooth_data() {
        let xs: Vec<f64> = (0..100_000).map(|i| ((i as f64) * 0.1).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert_relative_eq!(pairwise_sum(&xs), naive, epsilon = 1e-9);
        // determinism: identical across calls
        assert_eq!(pairwise_sum(&xs).to_bits(), pairwise_sum(&xs).to_bits());
    }

    #[test]
    fn sym_min_eig_small_matrices() {
        let a2 = [2.0, 1.0, 1.0, 2.0];
        assert_relative_eq!(sym_min_eig(&a2, 2), 1.0, epsilon = 1e-14);
        // eigenvalues 1, 2, 4 for this 3x3
        let a3 = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let ev = sym_min_eig(&a3, 3);
        assert_relative_eq!(ev, 1.0, epsilon = 1e-12);
        let d3 = [-2.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 1.0];
        assert_relative_eq!(sym_min_eig(&d3, 3), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn sym_min_eig_jacobi_matches_closed_form() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0];
        let closed = sym_min_eig(&a, 3);
        let jacobi = sym_min_eig_jacobi(&a, 3);
        assert_relative_eq!(closed, jacobi, epsilon = 1e-12);
    }
}
