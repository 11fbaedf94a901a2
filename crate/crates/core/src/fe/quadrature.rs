//! Gauss rules on the unit interval and on the reference triangle.

use crate::error::{invalid, Result};
use crate::mesh::Point;

pub const MAX_DEGREE: usize = 30;

/// Points and weights on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Points in `[0, 1]` and weights summing to 1.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

pub fn edge_rule(degree: usize) -> Result<EdgeRule> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(invalid(format!("unsupported edge quadrature degree {degree}")));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(EdgeRule {
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&v| 0.5 * v).collect(),
        degree,
    })
}

/// Collapsed tensor Gauss rule exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(invalid(format!(
            "unsupported triangle quadrature degree {degree}"
        )));
    }
    let nu = degree / 2 + 1;
    let nv = (degree + 1) / 2 + 1;
    let (xu, wu) = gauss_legendre(nu);
    let (xv, wv) = gauss_legendre(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (v, wvv) in xv.iter().zip(&wv) {
        let s = 0.5 * (v + 1.0);
        for (u, wuu) in xu.iter().zip(&wu) {
            let r = 0.5 * (u + 1.0);
            points.push([r * (1.0 - s), s]);
            weights.push(0.25 * wuu * wvv * (1.0 - s));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}
