//! Cell-centred raster data and its projection onto triangular meshes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::mesh::{Mesh2D, Point};

/// Values on an `nx x ny` grid of cells, row-major with `x` fastest,
/// starting at the cell touching `(x0, y0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterField {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<f64>,
}

impl RasterField {
    pub fn new(nx: usize, ny: usize, origin: Point, cell: [f64; 2], values: Vec<f64>) -> Result<Self> {
        let r = RasterField {
            nx,
            ny,
            x0: origin[0],
            y0: origin[1],
            dx: cell[0],
            dy: cell[1],
            values,
        };
        r.validate()?;
        Ok(r)
    }

    /// Raster covering `[x0, x1] x [y0, y1]` filled from `f` at cell centres.
    pub fn from_fn(nx: usize, ny: usize, extent: [f64; 4], f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let [x0, x1, y0, y1] = extent;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(i, j));
            }
        }
        Self::new(nx, ny, [x0, y0], [(x1 - x0) / nx as f64, (y1 - y0) / ny as f64], values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(invalid("raster needs at least one cell in each direction"));
        }
        if !(self.dx > 0.0 && self.dy > 0.0) || !self.x0.is_finite() || !self.y0.is_finite() {
            return Err(invalid("raster cell size must be positive and origin finite"));
        }
        if self.values.len() != self.nx * self.ny {
            return Err(invalid(format!(
                "raster has {} values, expected {}",
                self.values.len(),
                self.nx * self.ny
            )));
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("raster value {k} is not finite")));
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Value of the cell containing `p`; points on the outer edges belong
    /// to the adjacent cell.
    pub fn value_at(&self, p: Point) -> Option<f64> {
        let fx = (p[0] - self.x0) / self.dx;
        let fy = (p[1] - self.y0) / self.dy;
        let tol = 1e-9;
        if fx < -tol || fy < -tol || fx > self.nx as f64 + tol || fy > self.ny as f64 + tol {
            return None;
        }
        let i = (fx.max(0.0) as usize).min(self.nx - 1);
        let j = (fy.max(0.0) as usize).min(self.ny - 1);
        Some(self.get(i, j))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("raster 1\n");
        let _ = writeln!(
            s,
            "{} {} {:e} {:e} {:e} {:e}",
            self.nx, self.ny, self.x0, self.y0, self.dx, self.dy
        );
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (l0, header) = lines.next().ok_or_else(|| Error::parse(name, 1, "empty raster file"))?;
        if header.split_whitespace().collect::<Vec<_>>() != ["raster", "1"] {
            return Err(Error::parse(name, l0 + 1, "expected header 'raster 1'"));
        }
        let (l1, dims) = lines
            .next()
            .ok_or_else(|| Error::parse(name, l0 + 2, "missing raster dimensions"))?;
        let f: Vec<&str> = dims.split_whitespace().collect();
        if f.len() != 6 {
            return Err(Error::parse(name, l1 + 1, "expected 'nx ny x0 y0 dx dy'"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| Error::parse(name, l1 + 1, e.to_string()));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(name, l1 + 1, e.to_string()));
        let (nx, ny) = (int(f[0])?, int(f[1])?);
        let (x0, y0, dx, dy) = (num(f[2])?, num(f[3])?, num(f[4])?, num(f[5])?);
        let mut values = Vec::with_capacity(nx * ny);
        for (ln, line) in lines {
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(name, ln + 1, format!("invalid number '{tok}'")))?;
                if !v.is_finite() {
                    return Err(Error::parse(name, ln + 1, format!("non-finite value '{tok}'")));
                }
                values.push(v);
            }
        }
        if values.len() != nx * ny {
            return Err(Error::parse(
                name,
                0,
                format!("found {} values, expected {}", values.len(), nx * ny),
            ));
        }
        RasterField::new(nx, ny, [x0, y0], [dx, dy], values).map_err(|e| Error::parse(name, l1 + 1, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Raster value at every cell centroid of `mesh`.
pub fn project_raster(field: &RasterField, mesh: &Mesh2D) -> Result<Vec<f64>> {
    (0..mesh.num_cells())
        .map(|c| {
            let p = mesh.centroid(c);
            field.value_at(p).ok_or_else(|| Error::OutOfBounds {
                context: format!("cell {c}"),
                x: p[0],
                y: p[1],
            })
        })
        .collect()
}

/// Layered stand-in for a 60 x 220 reservoir cross-section on
/// `[0,1] x [-1,1]`: porosity and isotropic permeability (m^2) varying in
/// thin, gently undulating layers with a few high-permeability channels.
pub fn synthetic_reservoir() -> (RasterField, RasterField) {
    let (nx, ny) = (60, 220);
    let extent = [0.0, 1.0, -1.0, 1.0];
    let layer = |i: usize, j: usize| {
        let x = (i as f64 + 0.5) / nx as f64;
        let y = -1.0 + 2.0 * (j as f64 + 0.5) / ny as f64;
        let s = 0.08 * (std::f64::consts::PI * 3.0 * x).sin() + 0.03 * (11.0 * x + 2.0 * y).cos();
        let band = ((y + s) * 9.0).sin();
        let channel = (-((y - 0.35 + 0.15 * x).powi(2)) / 0.004).exp() + (-((y + 0.55 - 0.1 * x).powi(2)) / 0.002).exp();
        (band, channel)
    };
    let porosity = RasterField::from_fn(nx, ny, extent, |i, j| {
        let (band, channel) = layer(i, j);
        (0.18 + 0.08 * band + 0.12 * channel).clamp(0.02, 0.4)
    })
    .expect("valid raster");
    let permeability = RasterField::from_fn(nx, ny, extent, |i, j| {
        let (band, channel) = layer(i, j);
        10f64.powf(-11.0 + 1.2 * band + 2.0 * channel)
    })
    .expect("valid raster");
    (porosity, permeability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured, Rect, SideTags, Subdomain};

    #[test]
    fn quadrant_lookup() {
        let r = RasterField::new(2, 2, [0.0, 0.0], [0.5, 0.5], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.value_at([0.25, 0.25]), Some(1.0));
        assert_eq!(r.value_at([0.75, 0.25]), Some(2.0));
        assert_eq!(r.value_at([0.25, 0.75]), Some(3.0));
        assert_eq!(r.value_at([0.75, 0.75]), Some(4.0));
        assert_eq!(r.value_at([1.0, 1.0]), Some(4.0));
        assert_eq!(r.value_at([1.1, 0.5]), None);
    }

    #[test]
    fn text_round_trip() {
        let (phi, _) = synthetic_reservoir();
        let back = RasterField::parse(&phi.to_text(), "mem").unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(RasterField::parse("", "x"), Err(Error::Parse { .. })));
        assert!(matches!(RasterField::parse("raster 2\n1 1 0 0 1 1\n3\n", "x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RasterField::parse("raster 1\n2 1 0 0 1 1\n3\n", "x"), Err(Error::Parse { .. })));
        assert!(matches!(RasterField::parse("raster 1\n1 1 0 0 1 1\nabc\n", "x"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn projection_of_quadrants() {
        let r = RasterField::new(2, 2, [0.0, 0.0], [0.5, 0.5], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = build_structured(Rect::new(0.0, 1.0, 0.0, 1.0), 4, 4, Subdomain::Poro, SideTags::plain()).unwrap();
        let v = project_raster(&r, &m).unwrap();
        for (c, val) in v.iter().enumerate() {
            let p = m.centroid(c);
            let q = (p[0] > 0.5) as usize + 2 * (p[1] > 0.5) as usize;
            assert_eq!(*val, [1.0, 2.0, 3.0, 4.0][q]);
        }
    }

    #[test]
    fn small_raster_is_out_of_bounds() {
        let r = RasterField::new(1, 1, [0.0, 0.0], [0.5, 0.5], vec![1.0]).unwrap();
        let m = build_structured(Rect::new(0.0, 1.0, 0.0, 1.0), 2, 2, Subdomain::Poro, SideTags::plain()).unwrap();
        let e = project_raster(&r, &m).unwrap_err();
        assert!(matches!(e, Error::OutOfBounds { .. }));
        assert!(e.to_string().contains("cell"));
    }

    #[test]
    fn synthetic_reservoir_ranges() {
        let (phi, k) = synthetic_reservoir();
        assert_eq!((phi.nx, phi.ny), (60, 220));
        assert!(phi.min() >= 0.0 && phi.max() < 0.5);
        assert!(k.min() > 0.0);
    }
}
