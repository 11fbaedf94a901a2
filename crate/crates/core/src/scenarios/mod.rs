//! Fractured reservoir scenarios: injection into a fracture embedded in a
//! poroelastic medium, with uniform or raster-based coefficients.

pub mod raster;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::assembly::{lame_from_youngs, CellField, PhysicalParams, Tensor};
use crate::error::{invalid, Error, Result};
use crate::fe::sample;
use crate::io::vtk::{write_vtk, VtkField};
use crate::mesh::{apply_domain_map, build_fracture_domain, BoundaryTag, FractureGeometry, FractureMap, Mesh2D, Point};
use crate::solver::{BoundaryConditions, Discretization, Field, ProblemData, Simulation, Spaces, TimeGrid, TransientState};
use crate::verify::{constraint_residual, energy_identity};

pub use raster::{project_raster, synthetic_reservoir, RasterField};

/// Porosity at which the effective Young's modulus of the raster law vanishes.
pub const CRITICAL_POROSITY: f64 = 0.5;

/// Cells within this physical distance of the interface enter the
/// near-fracture pressure statistic.
pub const NEAR_FRACTURE_DISTANCE: f64 = 0.1;

/// `E = 1e7 (1 - phi/c)^2.1`
pub fn youngs_from_porosity(phi: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("critical porosity must be positive, got {c}")));
    }
    if !(phi >= 0.0) || phi > c {
        return Err(invalid(format!("porosity {phi} outside [0, {c}]")));
    }
    Ok(1e7 * (1.0 - phi / c).powf(2.1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// The rectangle `[0,1] x [-1,1]`.
    Reference,
    /// The rectangle deformed by [`FractureMap`].
    Mapped,
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Reference => "reference",
            Geometry::Mapped => "mapped",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(Geometry::Reference),
            "mapped" => Ok(Geometry::Mapped),
            _ => Err(invalid(format!("unknown geometry '{s}' (expected reference or mapped)"))),
        }
    }
}

/// Element sets selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementSet {
    Low,
    High,
    /// Taylor-Hood, RT1-P1dc, P1 displacement, P1dc multiplier.
    Reservoir,
}

impl ElementSet {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementSet::Low => "low",
            ElementSet::High => "high",
            ElementSet::Reservoir => "reservoir",
        }
    }

    pub fn discretization(self) -> Discretization {
        match self {
            ElementSet::Low => Discretization::low_order(),
            ElementSet::High => Discretization::high_order(),
            ElementSet::Reservoir => Discretization {
                displacement: crate::fe::ElementFamily::VecP1,
                ..Discretization::high_order()
            },
        }
    }
}

impl std::str::FromStr for ElementSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(ElementSet::Low),
            "high" => Ok(ElementSet::High),
            "reservoir" => Ok(ElementSet::Reservoir),
            _ => Err(invalid(format!("unknown element set '{s}' (expected low, high or reservoir)"))),
        }
    }
}

/// Where heterogeneous coefficients come from.
#[derive(Clone, Debug, PartialEq)]
pub enum RasterSource {
    Synthetic,
    Files { porosity: PathBuf, permeability: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Material {
    Uniform {
        youngs: f64,
        poisson: f64,
        permeability: Tensor,
    },
    /// Porosity and isotropic permeability rasters on the reference domain;
    /// Young's modulus follows [`youngs_from_porosity`].
    Raster {
        source: RasterSource,
        critical_porosity: f64,
        poisson: f64,
    },
}

/// Everything needed to run one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub geometry: Geometry,
    pub fracture: FractureGeometry,
    /// Target edge length of the reference mesh.
    pub resolution: f64,
    pub elements: ElementSet,
    pub mu: f64,
    pub s0: f64,
    pub alpha: f64,
    pub alpha_bjs: f64,
    pub material: Material,
    /// Inflow speed through the fracture mouth.
    pub injection: f64,
    pub boundary_pressure: f64,
    pub initial_pressure: f64,
    pub t_end: f64,
    pub tau: f64,
    /// Write fields every this many steps; 0 writes the final state only.
    pub output_every: usize,
}

pub const DEFAULT_RESOLUTION: f64 = 0.05;

pub fn example2_config() -> ScenarioConfig {
    ScenarioConfig {
        name: "example2".into(),
        geometry: Geometry::Mapped,
        fracture: FractureGeometry::default(),
        resolution: DEFAULT_RESOLUTION,
        elements: ElementSet::Reservoir,
        mu: 1e-6,
        s0: 6.89e-2,
        alpha: 1.0,
        alpha_bjs: 1.0,
        material: Material::Uniform {
            youngs: 1e7,
            poisson: 0.2,
            permeability: [[200e-12, 0.0], [0.0, 50e-12]],
        },
        injection: 10.0,
        boundary_pressure: 1000.0,
        initial_pressure: 1000.0,
        t_end: 300.0,
        tau: 1.0,
        output_every: 0,
    }
}

pub fn example3_config() -> ScenarioConfig {
    ScenarioConfig {
        name: "example3".into(),
        geometry: Geometry::Reference,
        material: Material::Raster {
            source: RasterSource::Synthetic,
            critical_porosity: CRITICAL_POROSITY,
            poisson: 0.2,
        },
        ..example2_config()
    }
}

pub const SENSITIVITY_CASES: [char; 4] = ['A', 'B', 'C', 'D'];

/// Example 2 with permeability, storativity and Young's modulus replaced
/// by sensitivity case `A`..`D`.
pub fn sensitivity_config(case: char) -> Result<ScenarioConfig> {
    let diag = [[200e-12, 0.0], [0.0, 50e-12]];
    let (k, s0, e) = match case.to_ascii_uppercase() {
        'A' => ([[1e-6, 0.0], [0.0, 1e-6]], 1.0, 1e3),
        'B' => (diag, 1.0, 1e3),
        'C' => (diag, 1e-2, 1e3),
        'D' => (diag, 1e-2, 1e10),
        _ => return Err(invalid(format!("unknown sensitivity case '{case}' (expected A-D)"))),
    };
    let base = example2_config();
    Ok(ScenarioConfig {
        name: format!("sensitivity_{}", case.to_ascii_uppercase()),
        s0,
        material: Material::Uniform {
            youngs: e,
            poisson: 0.2,
            permeability: k,
        },
        ..base
    })
}

pub fn sensitivity_configs() -> [ScenarioConfig; 4] {
    SENSITIVITY_CASES.map(|c| sensitivity_config(c).expect("known case"))
}

/// Looks up a scenario by its command-line name.
pub fn scenario_by_name(name: &str) -> Result<ScenarioConfig> {
    match name {
        "example2" => Ok(example2_config()),
        "example3" => Ok(example3_config()),
        _ => match name.strip_prefix("sensitivity:").or_else(|| name.strip_prefix("sensitivity_")) {
            Some(c) if c.chars().count() == 1 => sensitivity_config(c.chars().next().unwrap_or(' ')),
            _ => Err(invalid(format!(
                "unknown scenario '{name}' (expected example2, example3 or sensitivity:A..D)"
            ))),
        },
    }
}

/// Boundary conditions shared by all scenarios: velocity on the mouth,
/// no flow and pressure on the reservoir sides, rollers all round.
pub fn scenario_boundary_conditions() -> BoundaryConditions {
    use BoundaryTag::*;
    BoundaryConditions {
        fluid_dirichlet: vec![Inflow],
        darcy_noflow: vec![Left],
        darcy_pressure: vec![Right, Top, Bottom],
        solid_clamped: vec![],
        solid_roller: vec![Left, Right, Top, Bottom],
    }
}

/// Constant injection through the mouth and constant pressures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioData {
    pub inflow: [f64; 2],
    pub boundary_pressure: f64,
    pub initial_pressure: f64,
}

impl ProblemData for ScenarioData {
    fn fluid_velocity(&self, _x: Point, _t: f64) -> [f64; 2] {
        self.inflow
    }
    fn boundary_pressure(&self, _x: Point, _t: f64) -> f64 {
        self.boundary_pressure
    }
    fn initial_pressure(&self, _x: Point) -> f64 {
        self.initial_pressure
    }
}

/// Unit vector pointing into the fluid region across the inflow edges.
fn inflow_direction(fluid: &Mesh2D) -> Result<[f64; 2]> {
    let mut n = [0.0; 2];
    for e in fluid.tagged_edges(BoundaryTag::Inflow) {
        let o = fluid.outward_normal(e);
        let l = fluid.edge_length(e);
        n[0] -= o[0] * l;
        n[1] -= o[1] * l;
    }
    let len = n[0].hypot(n[1]);
    if len == 0.0 {
        return Err(invalid("fluid mesh has no inflow edges"));
    }
    Ok([n[0] / len, n[1] / len])
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(|c: char| c == '/' || c.is_whitespace()) {
            return Err(invalid(format!("invalid scenario name '{}'", self.name)));
        }
        for (what, v) in [("mu", self.mu), ("t_end", self.t_end), ("tau", self.tau)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{what} must be positive, got {v}")));
            }
        }
        for (what, v) in [
            ("injection", self.injection),
            ("boundary_pressure", self.boundary_pressure),
            ("initial_pressure", self.initial_pressure),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{what} must be finite")));
            }
        }
        TimeGrid::new(self.t_end, self.tau)?;
        match &self.material {
            Material::Uniform { youngs, poisson, .. } => {
                lame_from_youngs(*youngs, *poisson)?;
            }
            Material::Raster { critical_porosity, poisson, .. } => {
                youngs_from_porosity(0.0, *critical_porosity)?;
                lame_from_youngs(1e7, *poisson)?;
            }
        }
        Ok(())
    }

    /// Reference meshes, mapped to the physical domain if requested.
    pub fn meshes(&self) -> Result<(Mesh2D, Mesh2D, Mesh2D)> {
        let (fluid, poro) = build_fracture_domain(self.fracture, self.resolution)?;
        match self.geometry {
            Geometry::Reference => Ok((fluid, poro.clone(), poro)),
            Geometry::Mapped => Ok((
                apply_domain_map(&fluid, &FractureMap)?,
                apply_domain_map(&poro, &FractureMap)?,
                poro,
            )),
        }
    }

    /// Physical coefficients on the poroelastic mesh. Rasters are sampled
    /// at the centroids of the reference mesh.
    pub fn params(&self, reference_poro: &Mesh2D) -> Result<PhysicalParams> {
        let (permeability, lame) = match &self.material {
            Material::Uniform {
                youngs,
                poisson,
                permeability,
            } => (
                CellField::Uniform(*permeability),
                CellField::Uniform(lame_from_youngs(*youngs, *poisson)?),
            ),
            Material::Raster {
                source,
                critical_porosity,
                poisson,
            } => {
                let (phi, k) = match source {
                    RasterSource::Synthetic => synthetic_reservoir(),
                    RasterSource::Files {
                        porosity,
                        permeability,
                    } => (RasterField::read(porosity)?, RasterField::read(permeability)?),
                };
                let phi = project_raster(&phi, reference_poro)?;
                let k = project_raster(&k, reference_poro)?;
                if let Some(c) = k.iter().position(|v| !(*v > 0.0)) {
                    return Err(invalid(format!("permeability in cell {c} is not positive")));
                }
                let lame = phi
                    .iter()
                    .map(|&p| lame_from_youngs(youngs_from_porosity(p, *critical_porosity)?, *poisson))
                    .collect::<Result<Vec<_>>>()?;
                (
                    CellField::PerCell(k.iter().map(|&v| [[v, 0.0], [0.0, v]]).collect()),
                    CellField::PerCell(lame),
                )
            }
        };
        let p = PhysicalParams {
            mu: self.mu,
            alpha: self.alpha,
            s0: self.s0,
            alpha_bjs: self.alpha_bjs,
            permeability,
            lame,
        };
        p.validate(reference_poro.num_cells())?;
        Ok(p)
    }

    pub fn simulation(&self) -> Result<Simulation> {
        self.validate()?;
        let (fluid, poro, reference) = self.meshes()?;
        let params = self.params(&reference)?;
        let data = ScenarioData {
            inflow: inflow_direction(&fluid)?.map(|c| c * self.injection),
            boundary_pressure: self.boundary_pressure,
            initial_pressure: self.initial_pressure,
        };
        let spaces = Spaces::new(Arc::new(fluid), Arc::new(poro), self.elements.discretization())?;
        Simulation::new(
            spaces,
            params,
            scenario_boundary_conditions(),
            Arc::new(data),
            TimeGrid::new(self.t_end, self.tau)?,
        )
    }

    /// `(key, value)` pairs of every setting, in the configuration file
    /// vocabulary.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("scenario", self.name.clone()),
            ("geometry", self.geometry.as_str().into()),
            ("resolution", fmt(self.resolution)),
            ("elements", self.elements.as_str().into()),
            ("mu", fmt(self.mu)),
            ("s0", fmt(self.s0)),
            ("alpha", fmt(self.alpha)),
            ("alpha_bjs", fmt(self.alpha_bjs)),
        ];
        match &self.material {
            Material::Uniform {
                youngs,
                poisson,
                permeability,
            } => {
                v.push(("youngs", fmt(*youngs)));
                v.push(("poisson", fmt(*poisson)));
                v.push(("k_xx", fmt(permeability[0][0])));
                v.push(("k_xy", fmt(permeability[0][1])));
                v.push(("k_yy", fmt(permeability[1][1])));
            }
            Material::Raster {
                source,
                critical_porosity,
                poisson,
            } => {
                v.push(("poisson", fmt(*poisson)));
                v.push(("critical_porosity", fmt(*critical_porosity)));
                match source {
                    RasterSource::Synthetic => v.push(("raster", "synthetic".into())),
                    RasterSource::Files {
                        porosity,
                        permeability,
                    } => {
                        v.push(("porosity_file", porosity.display().to_string()));
                        v.push(("permeability_file", permeability.display().to_string()));
                    }
                }
            }
        }
        v.extend([
            ("injection", fmt(self.injection)),
            ("boundary_pressure", fmt(self.boundary_pressure)),
            ("initial_pressure", fmt(self.initial_pressure)),
            ("t_end", fmt(self.t_end)),
            ("tau", fmt(self.tau)),
            ("every", self.output_every.to_string()),
        ]);
        v
    }

    /// Sets one key of the configuration vocabulary from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(format!("'{key}' expects a number, got '{value}'")))
        };
        match key {
            "scenario" => self.name = value.replace(':', "_"),
            "geometry" => self.geometry = value.parse()?,
            "resolution" => self.resolution = num()?,
            "elements" => self.elements = value.parse()?,
            "mu" => self.mu = num()?,
            "s0" => self.s0 = num()?,
            "alpha" => {
                let a = num()?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(invalid(format!("alpha must lie in [0, 1], got {a}")));
                }
                self.alpha = a;
            }
            "alpha_bjs" => self.alpha_bjs = num()?,
            "injection" => self.injection = num()?,
            "boundary_pressure" => self.boundary_pressure = num()?,
            "initial_pressure" => self.initial_pressure = num()?,
            "t_end" => self.t_end = num()?,
            "tau" => self.tau = num()?,
            "every" => {
                self.output_every = value
                    .parse()
                    .map_err(|_| invalid(format!("'every' expects a step count, got '{value}'")))?
            }
            "youngs" | "k_xx" | "k_xy" | "k_yy" => {
                let x = num()?;
                match &mut self.material {
                    Material::Uniform {
                        youngs, permeability, ..
                    } => match key {
                        "youngs" => *youngs = x,
                        "k_xx" => permeability[0][0] = x,
                        "k_yy" => permeability[1][1] = x,
                        _ => {
                            permeability[0][1] = x;
                            permeability[1][0] = x;
                        }
                    },
                    Material::Raster { .. } => {
                        return Err(invalid(format!("'{key}' does not apply to raster coefficients")))
                    }
                }
            }
            "poisson" => {
                let x = num()?;
                match &mut self.material {
                    Material::Uniform { poisson, .. } | Material::Raster { poisson, .. } => *poisson = x,
                }
            }
            "critical_porosity" | "raster" | "porosity_file" | "permeability_file" => {
                let Material::Raster {
                    source,
                    critical_porosity,
                    ..
                } = &mut self.material
                else {
                    return Err(invalid(format!("'{key}' applies only to raster coefficients")));
                };
                match key {
                    "critical_porosity" => *critical_porosity = num()?,
                    "raster" if value == "synthetic" => *source = RasterSource::Synthetic,
                    "raster" => return Err(invalid(format!("unknown raster source '{value}'"))),
                    _ => {
                        let (mut phi, mut k) = match source {
                            RasterSource::Files {
                                porosity,
                                permeability,
                            } => (porosity.clone(), permeability.clone()),
                            RasterSource::Synthetic => (PathBuf::new(), PathBuf::new()),
                        };
                        if key == "porosity_file" {
                            phi = value.into();
                        } else {
                            k = value.into();
                        }
                        *source = RasterSource::Files {
                            porosity: phi,
                            permeability: k,
                        };
                    }
                }
            }
            _ => return Err(invalid(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Metrics of a finished scenario run.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSummary {
    pub name: String,
    pub steps: usize,
    pub dofs: usize,
    pub max_darcy_velocity: f64,
    pub max_displacement: f64,
    /// Area-weighted mean pore pressure near the interface.
    pub near_fracture_pressure: f64,
    pub min_pore_pressure: f64,
    pub max_pore_pressure: f64,
    pub mean_fracture_pressure: f64,
    pub max_constraint_residual: f64,
    pub max_energy_residual: f64,
    pub outputs: Vec<PathBuf>,
}

impl ScenarioSummary {
    /// Spread of cell-averaged pore pressure over the reservoir.
    pub fn pressure_drop(&self) -> f64 {
        self.max_pore_pressure - self.min_pore_pressure
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("steps", self.steps.to_string()),
            ("dofs", self.dofs.to_string()),
            ("max_darcy_velocity", fmt(self.max_darcy_velocity)),
            ("max_displacement", fmt(self.max_displacement)),
            ("near_fracture_pressure", fmt(self.near_fracture_pressure)),
            ("min_pore_pressure", fmt(self.min_pore_pressure)),
            ("max_pore_pressure", fmt(self.max_pore_pressure)),
            ("pressure_drop", fmt(self.pressure_drop())),
            ("mean_fracture_pressure", fmt(self.mean_fracture_pressure)),
            ("max_constraint_residual", fmt(self.max_constraint_residual)),
            ("max_energy_residual", fmt(self.max_energy_residual)),
        ]
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Area-weighted mean of `cell_values` over cells whose centroid lies
/// within `radius` of the interface edges of `mesh`.
pub fn near_interface_mean(mesh: &Mesh2D, cell_values: &[f64], radius: f64) -> Result<f64> {
    let segs: Vec<[Point; 2]> = mesh
        .tagged_edges(BoundaryTag::Interface)
        .into_iter()
        .map(|e| {
            let [a, b] = mesh.edges()[e];
            [mesh.nodes()[a], mesh.nodes()[b]]
        })
        .collect();
    let (mut sum, mut area) = (0.0, 0.0);
    for (c, v) in cell_values.iter().enumerate() {
        let p = mesh.centroid(c);
        if segs.iter().any(|s| segment_distance(p, s[0], s[1]) <= radius) {
            let a = mesh.cell_area(c);
            sum += a * v;
            area += a;
        }
    }
    if area == 0.0 {
        return Err(invalid("no cells lie near the interface"));
    }
    Ok(sum / area)
}

fn area_mean(mesh: &Mesh2D, v: &[f64]) -> f64 {
    let s: f64 = v.iter().enumerate().map(|(c, x)| x * mesh.cell_area(c)).sum();
    s / mesh.total_area()
}

fn write_fields(sim: &Simulation, state: &TransientState, dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
    let lay = sim.layout();
    let s = &sim.spaces;
    let f = |fld| lay.field(&state.x, fld);
    let poro = dir.join(format!("{name}_poro_{:05}.vtk", state.n));
    let perm: Vec<f64> = (0..s.poro_mesh.num_cells()).map(|c| sim.params.perm(c)[0][0]).collect();
    let youngs_mu: Vec<f64> = (0..s.poro_mesh.num_cells()).map(|c| sim.params.lame(c)[1]).collect();
    write_vtk(
        &s.poro_mesh,
        &[
            VtkField::point_vector("displacement", sample::vertex_vector(&s.eta, f(Field::Displacement))),
            VtkField::cell_scalar("pore_pressure", sample::cell_average(&s.pp, f(Field::PorePressure))),
            VtkField::cell_vector("darcy_velocity", sample::centroid_vector(&s.up, f(Field::DarcyVelocity))),
            VtkField::cell_scalar("permeability_xx", perm),
            VtkField::cell_scalar("shear_modulus", youngs_mu),
        ],
        &poro,
    )?;
    let fluid = dir.join(format!("{name}_fluid_{:05}.vtk", state.n));
    write_vtk(
        &s.fluid_mesh,
        &[
            VtkField::point_vector("velocity", sample::vertex_vector(&s.uf, f(Field::FluidVelocity))),
            VtkField::point_scalar("pressure", sample::vertex_scalar(&s.pf, f(Field::FluidPressure))),
        ],
        &fluid,
    )?;
    Ok(vec![poro, fluid])
}

/// Runs a scenario to its final time. With `output` set, fields are
/// written there as VTK files following `output_every`.
pub fn run_scenario(config: &ScenarioConfig, output: Option<&Path>) -> Result<ScenarioSummary> {
    let sim = config.simulation()?;
    run_simulation(config, &sim, output)
}

/// Like [`run_scenario`] with a prebuilt simulation of `config`.
pub fn run_simulation(config: &ScenarioConfig, sim: &Simulation, output: Option<&Path>) -> Result<ScenarioSummary> {
    if let Some(dir) = output {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let steps = sim.grid.steps;
    let mut outputs = Vec::new();
    let (mut cres, mut eres) = (0.0f64, 0.0f64);
    let last = sim.run(|v| {
        if let Some(prev) = v.prev {
            cres = cres.max(constraint_residual(sim, v.state, prev));
            eres = eres.max(energy_identity(sim, v.state, prev).residual());
        }
        let n = v.state.n;
        let due = (config.output_every > 0 && n % config.output_every == 0) || n == steps;
        if let (Some(dir), true) = (output, due) {
            outputs.extend(write_fields(sim, v.state, dir, &config.name)?);
        }
        Ok(())
    })?;
    let lay = sim.layout();
    let s = &sim.spaces;
    let p_cells = sample::cell_average(&s.pp, lay.field(&last.x, Field::PorePressure));
    let pf_cells = sample::cell_average(&s.pf, lay.field(&last.x, Field::FluidPressure));
    Ok(ScenarioSummary {
        name: config.name.clone(),
        steps,
        dofs: lay.total(),
        max_darcy_velocity: sample::max_sampled_magnitude(&s.up, lay.field(&last.x, Field::DarcyVelocity)),
        max_displacement: sample::max_sampled_magnitude(&s.eta, lay.field(&last.x, Field::Displacement)),
        near_fracture_pressure: near_interface_mean(&s.poro_mesh, &p_cells, NEAR_FRACTURE_DISTANCE)?,
        min_pore_pressure: p_cells.iter().copied().fold(f64::INFINITY, f64::min),
        max_pore_pressure: p_cells.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_fracture_pressure: area_mean(&s.fluid_mesh, &pf_cells),
        max_constraint_residual: cres,
        max_energy_residual: eres,
        outputs,
    })
}

/// Runs the four sensitivity cases concurrently, in case order. Each case
/// writes into its own subdirectory of `output`.
pub fn run_sensitivity(configs: &[ScenarioConfig], output: Option<&Path>) -> Vec<Result<ScenarioSummary>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                let dir = output.map(|d| d.join(&c.name));
                scope.spawn(move || run_scenario(c, dir.as_deref()))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(invalid("scenario thread panicked"))))
            .collect()
    })
}
