//! Plain-text mesh files.
//!
//! ```text
//! mesh2d 1
//! <#nodes> <#tris> <#bedges>
//! x y                    (per node)
//! i j k subdomain        (per triangle)
//! i j boundary_tag       (per boundary edge)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryEdge, Mesh2D, Point};
use crate::error::{Error, Result};

pub fn mesh_to_string(mesh: &Mesh2D) -> String {
    let mut s = String::from("mesh2d 1\n");
    let _ = writeln!(s, "{} {} {}", mesh.num_nodes(), mesh.num_cells(), mesh.boundary().len());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e}", p[0], p[1]);
    }
    for (t, sub) in mesh.triangles().iter().zip(mesh.subdomains()) {
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], sub);
    }
    for b in mesh.boundary() {
        let _ = writeln!(s, "{} {} {}", b.nodes[0], b.nodes[1], b.tag);
    }
    s
}

pub fn parse_mesh(text: &str, name: &str) -> Result<Mesh2D> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, msg: String| Error::parse(name, line, msg);
    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty mesh file".into()))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["mesh2d", "1"] {
        return Err(err(ln, format!("expected header 'mesh2d 1', found '{header}'")));
    }
    let (ln, counts) = lines.next().ok_or_else(|| err(ln + 1, "missing entity counts".into()))?;
    let c: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(ln, format!("invalid count: {e}")))?;
    let [nn, nt, nb] = c[..] else {
        return Err(err(ln, "expected '<#nodes> <#tris> <#bedges>'".into()));
    };
    let mut last = ln;
    let mut next = |what: &str, n: usize| {
        lines.next().map(|(l, s)| {
            last = l;
            (l, s.split_whitespace().map(str::to_owned).collect::<Vec<_>>())
        })
        .ok_or_else(|| err(last + 1, format!("file ends before {what} {n}")))
    };
    let index = |l: usize, t: &str| -> Result<usize> {
        let i: usize = t.parse().map_err(|_| err(l, format!("invalid node index '{t}'")))?;
        if i >= nn {
            return Err(err(l, format!("node index {i} out of range (mesh has {nn} nodes)")));
        }
        Ok(i)
    };

    let mut nodes: Vec<Point> = Vec::with_capacity(nn);
    for k in 0..nn {
        let (l, f) = next("node", k)?;
        if f.len() != 2 {
            return Err(err(l, "expected 'x y'".into()));
        }
        let mut p = [0.0; 2];
        for d in 0..2 {
            p[d] = f[d]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(l, format!("invalid coordinate '{}'", f[d])))?;
        }
        nodes.push(p);
    }
    let mut tris = Vec::with_capacity(nt);
    let mut subs = Vec::with_capacity(nt);
    for k in 0..nt {
        let (l, f) = next("triangle", k)?;
        if f.len() != 4 {
            return Err(err(l, "expected 'i j k subdomain'".into()));
        }
        tris.push([index(l, &f[0])?, index(l, &f[1])?, index(l, &f[2])?]);
        subs.push(f[3].parse().map_err(|e: String| err(l, e))?);
    }
    let mut boundary = Vec::with_capacity(nb);
    for k in 0..nb {
        let (l, f) = next("boundary edge", k)?;
        if f.len() != 3 {
            return Err(err(l, "expected 'i j boundary_tag'".into()));
        }
        boundary.push(BoundaryEdge {
            nodes: [index(l, &f[0])?, index(l, &f[1])?],
            tag: f[2].parse().map_err(|e: String| err(l, e))?,
        });
    }
    if let Some((l, _)) = lines.next() {
        return Err(err(l, "unexpected content after the last boundary edge".into()));
    }
    Mesh2D::new(nodes, tris, subs, boundary)
}

pub fn read_mesh(path: &Path) -> Result<Mesh2D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, &path.display().to_string())
}

pub fn write_mesh(mesh: &Mesh2D, path: &Path) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh)).map_err(|e| Error::io(path, e))
}
