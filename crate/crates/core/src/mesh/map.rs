use super::{signed_area, Mesh2D, Point};
use crate::error::{Error, Result};

/// Smooth map from a reference domain to a physical domain.
pub trait DomainMap: Sync {
    fn map(&self, p: Point) -> Point;

    /// Row-major Jacobian `[[dx/dxh, dx/dyh], [dy/dxh, dy/dyh]]`.
    fn jacobian(&self, p: Point) -> [[f64; 2]; 2];
}

/// Curved reservoir geometry used by the fracture scenarios:
/// `x = xh`, `y = 5 cos((xh+yh)/100) cos^2((pi xh+yh)/100) + yh/2 - xh/10`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FractureMap;

impl DomainMap for FractureMap {
    fn map(&self, p: Point) -> Point {
        let [x, y] = p;
        let a = (x + y) / 100.0;
        let b = (std::f64::consts::PI * x + y) / 100.0;
        [x, 5.0 * a.cos() * b.cos().powi(2) + y / 2.0 - x / 10.0]
    }

    fn jacobian(&self, p: Point) -> [[f64; 2]; 2] {
        let [x, y] = p;
        let pi = std::f64::consts::PI;
        let a = (x + y) / 100.0;
        let b = (pi * x + y) / 100.0;
        let (sa, ca, sb, cb) = (a.sin(), a.cos(), b.sin(), b.cos());
        let dy_dx = 5.0 * (-sa / 100.0 * cb * cb - ca * 2.0 * cb * sb * pi / 100.0) - 0.1;
        let dy_dy = 5.0 * (-sa / 100.0 * cb * cb - ca * 2.0 * cb * sb / 100.0) + 0.5;
        [[1.0, 0.0], [dy_dx, dy_dy]]
    }
}

/// Moves every node through `map`; fails if any cell loses orientation.
pub fn apply_domain_map(mesh: &Mesh2D, map: &dyn DomainMap) -> Result<Mesh2D> {
    let nodes: Vec<Point> = mesh.nodes().iter().map(|&p| map.map(p)).collect();
    for (c, t) in mesh.triangles().iter().enumerate() {
        let a = signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
        if !(a > 0.0) {
            return Err(Error::DegenerateGeometry(format!(
                "domain map inverts cell {c} (signed area {a:e})"
            )));
        }
    }
    Mesh2D::new(
        nodes,
        mesh.triangles().to_vec(),
        mesh.subdomains().to_vec(),
        mesh.boundary().to_vec(),
    )
}
