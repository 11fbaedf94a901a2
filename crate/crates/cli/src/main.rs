use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use stokes_biot::fe::ElementFamily;
use stokes_biot::io::config::{read_config, RunConfig};
use stokes_biot::io::manifest::Manifest;
use stokes_biot::io::vtk::write_vtk;
use stokes_biot::mesh::{
    apply_domain_map, build_fracture_domain, build_structured, write_mesh, FractureGeometry, FractureMap, Mesh2D, Rect,
    SideTags, Subdomain,
};
use stokes_biot::scenarios::{run_scenario, run_sensitivity, sensitivity_configs, ScenarioSummary};
use stokes_biot::solver::{Discretization, Spaces, TimeGrid};
use stokes_biot::verify::{
    self, constraint_residual, convergence_study, energy_identity, example1, inf_sup_estimate, ManufacturedSolution,
};
use stokes_biot::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "stokes-biot", version, about = "Coupled Stokes-Biot finite element solver")]
struct Cli {
    /// Directory for results and the run manifest [default: output].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Elements {
    Low,
    High,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiagElements {
    Low,
    High,
    /// Unstable equal-order Stokes pair, for comparison.
    P1p1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeshKind {
    Rect,
    Fracture,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence study on the manufactured solution.
    Converge {
        #[arg(long, value_enum)]
        elements: Elements,
        /// Number of refinement levels, starting from 8 cells per side.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
        levels: u32,
        #[arg(long, value_enum, default_value = "yes")]
        matching: YesNo,
        #[arg(long, default_value_t = 0.01)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
    },
    /// Fractured reservoir scenario.
    Run {
        /// example2, example3, sensitivity:A..D, or sensitivity for all four cases.
        #[arg(long, required_unless_present = "config")]
        scenario: Option<String>,
        /// Configuration file; --scenario and --set are applied on top.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a setting, e.g. --set s0=1e-2 or --set time.tau=0.5.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Generate a mesh file.
    Mesh {
        #[arg(long, value_enum)]
        make: MeshKind,
        /// Cells per side for rect meshes.
        #[arg(long, default_value_t = 8)]
        nx: usize,
        #[arg(long, default_value_t = 8)]
        ny: usize,
        /// Rectangle extent x0 x1 y0 y1.
        #[arg(long, num_args = 4, allow_negative_numbers = true, default_values_t = [0.0, 1.0, 0.0, 1.0])]
        extent: Vec<f64>,
        /// Target edge length for fracture meshes.
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
        /// Deform the fracture domain to the physical geometry.
        #[arg(long)]
        mapped: bool,
        /// Also write VTK files of the meshes.
        #[arg(long)]
        vtk: bool,
    },
    /// Diagnostics: discrete inf-sup constants or per-step residuals.
    #[command(group(ArgGroup::new("kind").required(true).args(["infsup", "energy"])))]
    Diag {
        #[arg(long)]
        infsup: bool,
        #[arg(long)]
        energy: bool,
        #[arg(long, value_enum, default_value = "low")]
        elements: DiagElements,
        /// Levels for --infsup, starting from 4 cells per side.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=5))]
        levels: u32,
        /// Cells per side for --energy on the manufactured solution.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Run --energy on a scenario instead.
        #[arg(long)]
        scenario: Option<String>,
    },
}

const DEFAULT_OUT: &str = "output";

/// Usage failures exit with 1, runtime failures with 2.
enum Failure {
    Usage(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn discretization(e: DiagElements) -> Discretization {
    match e {
        DiagElements::Low => Discretization::low_order(),
        DiagElements::High => Discretization::high_order(),
        DiagElements::P1p1 => Discretization {
            fluid_velocity: ElementFamily::VecP1,
            ..Discretization::low_order()
        },
    }
}

fn name_of<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn converge(out: &Path, elements: Elements, levels: u32, matching: YesNo, t_end: f64, tau: f64) -> Outcome {
    let disc = match elements {
        Elements::Low => Discretization::low_order(),
        Elements::High => Discretization::high_order(),
    };
    let ns: Vec<usize> = (0..levels).map(|k| 8 << k).collect();
    let grid = usage(TimeGrid::new(t_end, tau))?;
    let table = convergence_study(disc, &ns, matching == YesNo::Yes, grid)?;
    let csv = table.to_csv();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let file = out.join(format!("convergence_{}_{}.csv", name_of(&elements), name_of(&matching)));
    write_file(&file, &csv)?;
    print!("{csv}");
    let mut m = Manifest::new(&command_line());
    m.add(
        "config",
        [
            ("elements", name_of(&elements)),
            ("levels", format!("{ns:?}")),
            ("matching", name_of(&matching)),
            ("t_end", format!("{t_end:e}")),
            ("tau", format!("{tau:e}")),
        ],
    );
    let worst = |f: fn(&verify::LevelResult) -> f64| table.levels.iter().map(f).fold(0.0, f64::max);
    m.add(
        "summary",
        [
            ("table", file.display().to_string()),
            ("max_constraint_residual", format!("{:e}", worst(|l| l.constraint_residual))),
            ("max_energy_residual", format!("{:e}", worst(|l| l.energy_residual))),
        ],
    );
    m.write(out)?;
    Ok(())
}

fn print_summary(s: &ScenarioSummary) {
    println!("[{}]", s.name);
    for (k, v) in s.entries() {
        println!("{k} = {v}");
    }
}

fn run(out: Option<&Path>, scenario: Option<&str>, config: Option<&Path>, set: &[String]) -> Outcome {
    let default_out = PathBuf::from(DEFAULT_OUT);
    if scenario == Some("sensitivity") {
        let out = out.unwrap_or(&default_out);
        let mut cfgs = sensitivity_configs().to_vec();
        for c in &mut cfgs {
            let mut rc = RunConfig {
                scenario: c.clone(),
                output_dir: out.to_path_buf(),
            };
            usage(rc.apply_overrides(set))?;
            *c = rc.scenario;
        }
        let results = run_sensitivity(&cfgs, Some(out));
        let mut m = Manifest::new(&command_line());
        let mut first_err = None;
        for (c, r) in cfgs.iter().zip(results) {
            let rc = RunConfig {
                scenario: c.clone(),
                output_dir: out.join(&c.name),
            };
            for (sec, entries) in rc.sections() {
                let sec = if sec.is_empty() { c.name.clone() } else { format!("{}.{sec}", c.name) };
                m.add(&sec, entries);
            }
            match r {
                Ok(s) => {
                    print_summary(&s);
                    m.add(&format!("{}.summary", c.name), s.entries());
                }
                Err(e) => {
                    m.add(&format!("{}.summary", c.name), [("error", e.to_string())]);
                    first_err.get_or_insert(e);
                }
            }
        }
        m.write(out)?;
        return first_err.map_or(Ok(()), |e| Err(e.into()));
    }

    let mut rc = match config {
        Some(p) => usage(read_config(p))?,
        None => RunConfig::default(),
    };
    if let Some(o) = out {
        rc.output_dir = o.to_path_buf();
    } else if config.is_none() {
        rc.output_dir = default_out;
    }
    if let Some(s) = scenario {
        usage(rc.set("scenario", s))?;
    }
    usage(rc.apply_overrides(set))?;
    let summary = run_scenario(&rc.scenario, Some(&rc.output_dir))?;
    print_summary(&summary);
    let mut m = Manifest::new(&command_line());
    for (sec, entries) in rc.sections() {
        m.add(if sec.is_empty() { "config" } else { sec }, entries);
    }
    m.add("summary", summary.entries());
    m.add(
        "files",
        summary
            .outputs
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("output{i}"), p.display().to_string())),
    );
    m.write(&rc.output_dir)?;
    Ok(())
}

fn mesh(out: &Path, make: MeshKind, nx: usize, ny: usize, extent: &[f64], resolution: f64, mapped: bool, vtk: bool) -> Outcome {
    let meshes: Vec<(&str, Mesh2D)> = match make {
        MeshKind::Rect => {
            let r = Rect::new(extent[0], extent[1], extent[2], extent[3]);
            vec![("rect", build_structured(r, nx, ny, Subdomain::Poro, SideTags::plain())?)]
        }
        MeshKind::Fracture => {
            let (f, p) = build_fracture_domain(FractureGeometry::default(), resolution)?;
            if mapped {
                vec![
                    ("fluid", apply_domain_map(&f, &FractureMap)?),
                    ("poro", apply_domain_map(&p, &FractureMap)?),
                ]
            } else {
                vec![("fluid", f), ("poro", p)]
            }
        }
    };
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut m = Manifest::new(&command_line());
    m.add(
        "config",
        [
            ("make", name_of(&make)),
            ("nx", nx.to_string()),
            ("ny", ny.to_string()),
            ("extent", format!("{extent:?}")),
            ("resolution", format!("{resolution:e}")),
            ("mapped", mapped.to_string()),
        ],
    );
    for (name, mesh) in &meshes {
        let path = out.join(format!("{name}.mesh"));
        write_mesh(mesh, &path)?;
        println!(
            "{}: {} nodes, {} triangles, {} boundary edges",
            path.display(),
            mesh.num_nodes(),
            mesh.num_cells(),
            mesh.boundary().len()
        );
        m.add("files", [(name.to_string(), path.display().to_string())]);
        if vtk {
            let v = out.join(format!("{name}.vtk"));
            write_vtk(mesh, &[], &v)?;
            m.add("files", [(format!("{name}_vtk"), v.display().to_string())]);
        }
    }
    m.write(out)?;
    Ok(())
}

fn diag(out: &Path, infsup: bool, elements: DiagElements, levels: u32, n: usize, scenario: Option<&str>) -> Outcome {
    let mut m = Manifest::new(&command_line());
    let disc = discretization(elements);
    if infsup {
        m.add("config", [("diagnostic", "infsup".to_string()), ("elements", name_of(&elements))]);
        println!("h, beta");
        let ms = ManufacturedSolution::default();
        for k in 0..levels {
            let cells = 4usize << k;
            let (f, p) = example1::meshes(cells, true)?;
            let spaces = Spaces::new(Arc::new(f), Arc::new(p), disc)?;
            let beta = inf_sup_estimate(&spaces, &ms.params(), &example1::boundary_conditions())?;
            println!("1/{cells}, {beta:.6e}");
            m.add("summary", [(format!("beta_1/{cells}"), format!("{beta:e}"))]);
        }
    } else if let Some(name) = scenario {
        let mut rc = usage(RunConfig::for_scenario(name))?;
        rc.output_dir = out.to_path_buf();
        let s = run_scenario(&rc.scenario, None)?;
        println!("max_constraint_residual = {:e}", s.max_constraint_residual);
        println!("max_energy_residual = {:e}", s.max_energy_residual);
        for (sec, entries) in rc.sections() {
            m.add(if sec.is_empty() { "config" } else { sec }, entries);
        }
        m.add("summary", s.entries());
    } else {
        m.add(
            "config",
            [
                ("diagnostic", "energy".to_string()),
                ("elements", name_of(&elements)),
                ("n", n.to_string()),
            ],
        );
        let sim = example1::simulation(n, true, disc, example1::default_grid())?;
        let (mut c, mut e) = (0.0f64, 0.0f64);
        println!("step, constraint_residual, energy_residual");
        sim.run(|v| {
            if let Some(prev) = v.prev {
                let cr = constraint_residual(&sim, v.state, prev);
                let er = energy_identity(&sim, v.state, prev).residual();
                println!("{}, {cr:.3e}, {er:.3e}", v.state.n);
                c = c.max(cr);
                e = e.max(er);
            }
            Ok(())
        })?;
        m.add(
            "summary",
            [
                ("max_constraint_residual", format!("{c:e}")),
                ("max_energy_residual", format!("{e:e}")),
            ],
        );
    }
    m.write(out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let default_out = PathBuf::from(DEFAULT_OUT);
    let out = cli.out.as_deref().unwrap_or(&default_out);
    let result = match &cli.command {
        Command::Converge {
            elements,
            levels,
            matching,
            t_end,
            tau,
        } => converge(out, *elements, *levels, *matching, *t_end, *tau),
        Command::Run { scenario, config, set } => run(cli.out.as_deref(), scenario.as_deref(), config.as_deref(), set),
        Command::Mesh {
            make,
            nx,
            ny,
            extent,
            resolution,
            mapped,
            vtk,
        } => mesh(out, *make, *nx, *ny, extent, *resolution, *mapped, *vtk),
        Command::Diag {
            infsup,
            energy: _,
            elements,
            levels,
            n,
            scenario,
        } => diag(out, *infsup, *elements, *levels, *n, scenario.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
