//! Finite-difference weight generation on arbitrary nodes (Fornberg's
//! recurrence). Used for the one-sided boundary stencils; the interior
//! first-derivative stencils are hardcoded where they are applied.

/// Weights w_i such that Σ w_i f(nodes[i]) approximates the m-th derivative
/// of f at x0, exact for polynomials of degree ≤ nodes.len() − 1. Requires
/// pairwise distinct nodes and m < nodes.len().
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(m < n, "need more nodes than the derivative order");
    // c[k][j]: weight of node j for the k-th derivative, filled node by node.
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for j in 1..n {
        let mut c2 = 1.0;
        let dx_j = nodes[j] - x0;
        for k in 0..j {
            let dx_jk = nodes[j] - nodes[k];
            c2 *= dx_jk;
            if k == j - 1 {
                for d in (1..=m.min(j)).rev() {
                    c[d][j] =
                        c1 * (d as f64 * c[d - 1][j - 1] - (nodes[j - 1] - x0) * c[d][j - 1]) / c2;
                }
                c[0][j] = -c1 * (nodes[j - 1] - x0) * c[0][j - 1] / c2;
            }
            for d in (1..=m.min(j)).rev() {
                c[d][k] = (dx_j * c[d][k] - d as f64 * c[d - 1][k]) / dx_jk;
            }
            c[0][k] = dx_j * c[0][k] / dx_jk;
        }
        c1 = c2;
    }
    c[m].clone()
}
