//! Legacy ASCII VTK output on triangular meshes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::mesh::Mesh2D;

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Scalar(Vec<f64>),
    Vector(Vec<[f64; 2]>),
}

impl Values {
    fn len(&self) -> usize {
        match self {
            Values::Scalar(v) => v.len(),
            Values::Vector(v) => v.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Point,
    Cell,
}

/// A named field attached to mesh vertices or cells.
#[derive(Clone, Debug, PartialEq)]
pub struct VtkField {
    pub name: String,
    pub location: Location,
    pub values: Values,
}

impl VtkField {
    pub fn point_scalar(name: &str, v: Vec<f64>) -> Self {
        VtkField {
            name: name.into(),
            location: Location::Point,
            values: Values::Scalar(v),
        }
    }

    pub fn point_vector(name: &str, v: Vec<[f64; 2]>) -> Self {
        VtkField {
            name: name.into(),
            location: Location::Point,
            values: Values::Vector(v),
        }
    }

    pub fn cell_scalar(name: &str, v: Vec<f64>) -> Self {
        VtkField {
            name: name.into(),
            location: Location::Cell,
            values: Values::Scalar(v),
        }
    }

    pub fn cell_vector(name: &str, v: Vec<[f64; 2]>) -> Self {
        VtkField {
            name: name.into(),
            location: Location::Cell,
            values: Values::Vector(v),
        }
    }
}

fn write_section(s: &mut String, fields: &[&VtkField]) {
    for f in fields {
        let name = f.name.replace(char::is_whitespace, "_");
        match &f.values {
            Values::Scalar(v) => {
                let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for x in v {
                    let _ = writeln!(s, "{x:e}");
                }
            }
            Values::Vector(v) => {
                let _ = writeln!(s, "VECTORS {name} double");
                for x in v {
                    let _ = writeln!(s, "{:e} {:e} 0", x[0], x[1]);
                }
            }
        }
    }
}

/// Renders the mesh and fields as a legacy unstructured grid.
pub fn vtk_string(mesh: &Mesh2D, fields: &[VtkField], title: &str) -> Result<String> {
    for f in fields {
        let expected = match f.location {
            Location::Point => mesh.num_nodes(),
            Location::Cell => mesh.num_cells(),
        };
        if f.values.len() != expected {
            return Err(invalid(format!(
                "field '{}' has {} values, expected {expected}",
                f.name,
                f.values.len()
            )));
        }
    }
    let mut s = String::new();
    let title = title.lines().next().unwrap_or("");
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.num_nodes());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let nc = mesh.num_cells();
    let _ = writeln!(s, "CELLS {nc} {}", 4 * nc);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nc}");
    for _ in 0..nc {
        s.push_str("5\n");
    }
    let point: Vec<&VtkField> = fields.iter().filter(|f| f.location == Location::Point).collect();
    let cell: Vec<&VtkField> = fields.iter().filter(|f| f.location == Location::Cell).collect();
    if !point.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.num_nodes());
        write_section(&mut s, &point);
    }
    if !cell.is_empty() {
        let _ = writeln!(s, "CELL_DATA {nc}");
        write_section(&mut s, &cell);
    }
    Ok(s)
}

pub fn write_vtk(mesh: &Mesh2D, fields: &[VtkField], path: &Path) -> Result<()> {
    let title = path.file_stem().and_then(|s| s.to_str()).unwrap_or("stokes-biot");
    let s = vtk_string(mesh, fields, title)?;
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
