//! Rigid body modes of a floating subdomain.

use nalgebra::DMatrix;

/// Orthonormal `n x 6` basis: three translations, then the linearized
/// rotations `omega x (x - centroid)`.
pub fn rigid_body_modes(coords: &[[f64; 3]]) -> DMatrix<f64> {
    let n = coords.len();
    assert!(n > 0, "rigid body modes of an empty subdomain");
    let mut c = [0.0; 3];
    for p in coords {
        for k in 0..3 {
            c[k] += p[k] / n as f64;
        }
    }
    let mut r = DMatrix::zeros(3 * n, 6);
    for (a, p) in coords.iter().enumerate() {
        let x = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        for k in 0..3 {
            r[(3 * a + k, k)] = 1.0;
        }
        // columns of [omega]_x^T applied to x, for omega = e1, e2, e3
        r[(3 * a + 1, 3)] = -x[2];
        r[(3 * a + 2, 3)] = x[1];
        r[(3 * a, 4)] = x[2];
        r[(3 * a + 2, 4)] = -x[0];
        r[(3 * a, 5)] = -x[1];
        r[(3 * a + 1, 5)] = x[0];
    }
    for j in 0..6 {
        for _ in 0..2 {
            for i in 0..j {
                let dot = r.column(i).dot(&r.column(j));
                let qi = r.column(i).clone_owned();
                r.column_mut(j).axpy(-dot, &qi, 1.0);
            }
        }
        let norm = r.column(j).norm();
        assert!(norm > 0.0, "subdomain nodes are collinear");
        r.column_mut(j).scale_mut(1.0 / norm);
    }
    r
}
