//! Node-centred finite volumes for `div (G u / W) = 2H` on median dual cells.
//!
//! Inside a cell the graph function is linear. Each of the three dual
//! segments (edge midpoint to centroid) carries two Gauss points, where the
//! flux `(grad u + lambda (a, b)) / W` is evaluated with the exact metric
//! coefficients. The flux of the zero section is subtracted and replaced by
//! its exact divergence `2 H_ref lambda^2`, so the zero section solves the
//! discrete problem whenever it solves the continuous one.

use crate::killing::{KillingModelSpec, MetricCoeffs};

use super::mesh::{lambda_sq, Mesh};

#[derive(Debug, Clone, Copy)]
pub(crate) struct FluxPoint {
    /// Outer node -> inner node direction is `from -> to` (local indices).
    pub from: usize,
    pub to: usize,
    /// Euclidean normal from `from` towards `to`, scaled by the quadrature weight.
    pub normal: [f64; 2],
    pub coeffs: MetricCoeffs,
    pub ref_flux: [f64; 2],
}

#[derive(Debug, Clone)]
pub(crate) struct CellData {
    pub nodes: [usize; 3],
    pub grads: [[f64; 2]; 3],
    pub points: [FluxPoint; 6],
}

pub struct FvOperator {
    pub(crate) cells: Vec<CellData>,
    /// Hyperbolic area of each dual cell.
    pub dual_area: Vec<f64>,
    pub(crate) reference_h: f64,
}

fn flux(c: &MetricCoeffs, grad: [f64; 2]) -> [f64; 2] {
    let qx = grad[0] + c.lambda * c.a;
    let qy = grad[1] + c.lambda * c.b;
    let w = (1.0 + (qx * qx + qy * qy) / (c.lambda * c.lambda)).sqrt();
    [qx / w, qy / w]
}

/// Flux and its Jacobian with respect to the gradient.
fn flux_jacobian(c: &MetricCoeffs, grad: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let l2 = c.lambda * c.lambda;
    let q = [grad[0] + c.lambda * c.a, grad[1] + c.lambda * c.b];
    let w2 = 1.0 + (q[0] * q[0] + q[1] * q[1]) / l2;
    let w = w2.sqrt();
    let mut j = [[0.0; 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            let delta = if r == s { 1.0 } else { 0.0 };
            j[r][s] = (delta - q[r] * q[s] / (l2 * w2)) / w;
        }
    }
    ([q[0] / w, q[1] / w], j)
}

fn midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn tri_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

/// Integral of `lambda^2` over a straight triangle, edge-midpoint rule.
fn metric_integral(mesh: &Mesh, a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let ch = mesh.chart;
    tri_area(a, b, c)
        * (lambda_sq(ch, midpoint(a, b))
            + lambda_sq(ch, midpoint(b, c))
            + lambda_sq(ch, midpoint(c, a)))
        / 3.0
}

/// Gradients of the three barycentric basis functions of a cell.
pub(crate) fn basis_gradients(p: [[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let (b, c) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        g[k] = [(b[1] - c[1]) / det, (c[0] - b[0]) / det];
    }
    g
}

impl FvOperator {
    pub fn new(mesh: &Mesh, spec: &KillingModelSpec) -> FvOperator {
        let gauss = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
        let mut dual_area = vec![0.0; mesh.nodes.len()];
        let mut cells = Vec::with_capacity(mesh.cells.len());
        for c in &mesh.cells {
            let p = [mesh.nodes[c[0]], mesh.nodes[c[1]], mesh.nodes[c[2]]];
            let centroid = [
                (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                (p[0][1] + p[1][1] + p[2][1]) / 3.0,
            ];
            let mut points = Vec::with_capacity(6);
            for e in 0..3 {
                let (i, j) = (e, (e + 1) % 3);
                let m = midpoint(p[i], p[j]);
                let t = [centroid[0] - m[0], centroid[1] - m[1]];
                let mut n = [t[1], -t[0]];
                let dir = [p[j][0] - p[i][0], p[j][1] - p[i][1]];
                if n[0] * dir[0] + n[1] * dir[1] < 0.0 {
                    n = [-n[0], -n[1]];
                }
                for &g in &gauss {
                    let x = [m[0] + g * t[0], m[1] + g * t[1]];
                    let coeffs = spec.coeffs_xy(x[0], x[1]);
                    points.push(FluxPoint {
                        from: i,
                        to: j,
                        normal: [0.5 * n[0], 0.5 * n[1]],
                        coeffs,
                        ref_flux: flux(&coeffs, [0.0, 0.0]),
                    });
                }
            }
            for k in 0..3 {
                let prev = (k + 2) % 3;
                let next = (k + 1) % 3;
                let m_next = midpoint(p[k], p[next]);
                let m_prev = midpoint(p[k], p[prev]);
                dual_area[c[k]] += metric_integral(mesh, p[k], m_next, centroid)
                    + metric_integral(mesh, p[k], centroid, m_prev);
            }
            cells.push(CellData {
                nodes: *c,
                grads: basis_gradients(p),
                points: points.try_into().expect("six flux points"),
            });
        }
        FvOperator {
            cells,
            dual_area,
            reference_h: spec.reference_h,
        }
    }

    fn cell_gradient(cell: &CellData, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += u[cell.nodes[k]] * cell.grads[k][0];
            g[1] += u[cell.nodes[k]] * cell.grads[k][1];
        }
        g
    }

    /// Net outward flux of every dual cell minus `2 H` times its area.
    /// Rows of boundary nodes are meaningless and left to the caller.
    pub fn residual(&self, u: &[f64], target_h: f64) -> Vec<f64> {
        let mut r = vec![0.0; u.len()];
        for cell in &self.cells {
            let g = Self::cell_gradient(cell, u);
            for fp in &cell.points {
                let f = flux(&fp.coeffs, g);
                let v =
                    (f[0] - fp.ref_flux[0]) * fp.normal[0] + (f[1] - fp.ref_flux[1]) * fp.normal[1];
                r[cell.nodes[fp.from]] += v;
                r[cell.nodes[fp.to]] -= v;
            }
        }
        let dh = 2.0 * (target_h - self.reference_h);
        for (ri, a) in r.iter_mut().zip(&self.dual_area) {
            *ri -= dh * a;
        }
        r
    }

    /// Residual and Jacobian triplets `(row, col, value)` over all nodes.
    pub fn residual_and_jacobian(
        &self,
        u: &[f64],
        target_h: f64,
    ) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
        let mut r = vec![0.0; u.len()];
        let mut trip = Vec::with_capacity(self.cells.len() * 18);
        for cell in &self.cells {
            let g = Self::cell_gradient(cell, u);
            let mut local = [[0.0; 3]; 3];
            for fp in &cell.points {
                let (f, j) = flux_jacobian(&fp.coeffs, g);
                let v =
                    (f[0] - fp.ref_flux[0]) * fp.normal[0] + (f[1] - fp.ref_flux[1]) * fp.normal[1];
                r[cell.nodes[fp.from]] += v;
                r[cell.nodes[fp.to]] -= v;
                // d v / d u_k = n . J grad(phi_k)
                let jn = [
                    j[0][0] * fp.normal[0] + j[1][0] * fp.normal[1],
                    j[0][1] * fp.normal[0] + j[1][1] * fp.normal[1],
                ];
                for k in 0..3 {
                    let d = jn[0] * cell.grads[k][0] + jn[1] * cell.grads[k][1];
                    local[fp.from][k] += d;
                    local[fp.to][k] -= d;
                }
            }
            for a in 0..3 {
                for k in 0..3 {
                    trip.push((cell.nodes[a], cell.nodes[k], local[a][k]));
                }
            }
        }
        let dh = 2.0 * (target_h - self.reference_h);
        for (ri, a) in r.iter_mut().zip(&self.dual_area) {
            *ri -= dh * a;
        }
        (r, trip)
    }

    /// Matrix of the operator linearized with unit flux Jacobian (a conformal
    /// Laplacian), used to build initial guesses.
    pub fn laplacian(&self) -> Vec<(usize, usize, f64)> {
        let mut trip = Vec::with_capacity(self.cells.len() * 9);
        for cell in &self.cells {
            let mut local = [[0.0; 3]; 3];
            for fp in &cell.points {
                for k in 0..3 {
                    let d = fp.normal[0] * cell.grads[k][0] + fp.normal[1] * cell.grads[k][1];
                    local[fp.from][k] += d;
                    local[fp.to][k] -= d;
                }
            }
            for a in 0..3 {
                for k in 0..3 {
                    trip.push((cell.nodes[a], cell.nodes[k], local[a][k]));
                }
            }
        }
        trip
    }
}
