//! The closed-form sources are checked against the governing equations
//! evaluated by central differences of the closed-form fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_biot::mesh::Point;
use stokes_biot::verify::example1::ManufacturedSolution;

const H: f64 = 1e-4;

type Vf<'a> = dyn Fn(Point) -> [f64; 2] + 'a;

fn d(f: &dyn Fn(Point) -> f64, x: Point, c: usize) -> f64 {
    let (mut a, mut b) = (x, x);
    a[c] += H;
    b[c] -= H;
    (f(a) - f(b)) / (2.0 * H)
}

/// `[r][c] = d u_r / d x_c`
fn jac(u: &Vf<'_>, x: Point) -> [[f64; 2]; 2] {
    let mut g = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            g[r][c] = d(&|y| u(y)[r], x, c);
        }
    }
    g
}

/// Row-wise divergence of a tensor field.
fn div_tensor(s: &dyn Fn(Point) -> [[f64; 2]; 2], x: Point) -> [f64; 2] {
    let mut out = [0.0; 2];
    for r in 0..2 {
        out[r] = (0..2).map(|c| d(&|y| s(y)[r][c], x, c)).sum();
    }
    out
}

fn stokes_stress(ms: &ManufacturedSolution, x: Point, t: f64) -> [[f64; 2]; 2] {
    let g = jac(&|y| ms.fluid_velocity(y, t), x);
    let p = ms.fluid_pressure(x, t);
    let mut s = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            s[r][c] = ms.mu * (g[r][c] + g[c][r]);
        }
        s[r][r] -= p;
    }
    s
}

fn poro_stress(ms: &ManufacturedSolution, x: Point, t: f64) -> [[f64; 2]; 2] {
    let g = jac(&|y| ms.displacement(y, t), x);
    let div = g[0][0] + g[1][1];
    let p = ms.pore_pressure(x, t);
    let mut s = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            s[r][c] = ms.mu_p * (g[r][c] + g[c][r]);
        }
        s[r][r] += ms.lambda_p * div - ms.alpha * p;
    }
    s
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-6 * scale.max(1.0)
}

#[test]
fn sources_satisfy_the_equations() {
    let ms = ManufacturedSolution::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let t: f64 = rng.gen_range(0.0..0.01);
        let xf = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
        let xp = [rng.gen_range(0.05..0.95), rng.gen_range(-0.95..-0.05)];

        let ds = div_tensor(&|y| stokes_stress(&ms, y, t), xf);
        let f = ms.fluid_force(xf, t);
        for c in 0..2 {
            assert!(close(-ds[c], f[c], f[c].abs()), "fluid force {c} at {xf:?}: {} vs {}", -ds[c], f[c]);
        }
        let g = jac(&|y| ms.fluid_velocity(y, t), xf);
        assert!(close(g[0][0] + g[1][1], ms.fluid_source(xf, t), 1.0));

        let dp = div_tensor(&|y| poro_stress(&ms, y, t), xp);
        let f = ms.solid_force(xp, t);
        for c in 0..2 {
            assert!(close(-dp[c], f[c], f[c].abs()), "solid force {c} at {xp:?}");
        }

        let u = ms.darcy_velocity(xp, t);
        for c in 0..2 {
            let gp = d(&|y| ms.pore_pressure(y, t), xp, c);
            assert!(close(ms.mu / ms.k * u[c] + gp, 0.0, gp.abs()));
        }

        let storage = |s: f64| {
            let gd = jac(&|y| ms.displacement(y, s), xp);
            ms.s0 * ms.pore_pressure(xp, s) + ms.alpha * (gd[0][0] + gd[1][1])
        };
        let dt = (storage(t + H) - storage(t - H)) / (2.0 * H);
        let div_u = d(&|y| ms.darcy_velocity(y, t)[0], xp, 0) + d(&|y| ms.darcy_velocity(y, t)[1], xp, 1);
        let q = ms.pore_source(xp, t);
        assert!(close(dt + div_u, q, q.abs()), "pore source at {xp:?}: {} vs {q}", dt + div_u);
    }
}

#[test]
fn interface_conditions_hold() {
    let ms = ManufacturedSolution::default();
    let (nf, np) = ([0.0, -1.0], [0.0, 1.0]);
    let tan = [1.0, 0.0];
    let gamma = ms.mu / ms.k.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let t: f64 = rng.gen_range(0.0..0.01);
        let x = [rng.gen_range(0.0..1.0), 0.0];
        let uf = ms.fluid_velocity(x, t);
        let up = ms.darcy_velocity(x, t);
        let deta = {
            let (a, b) = (ms.displacement(x, t + H), ms.displacement(x, t - H));
            [(a[0] - b[0]) / (2.0 * H), (a[1] - b[1]) / (2.0 * H)]
        };
        let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        let mv = |s: [[f64; 2]; 2], n: [f64; 2]| [s[0][0] * n[0] + s[0][1] * n[1], s[1][0] * n[0] + s[1][1] * n[1]];

        // mass conservation
        assert!(close(dot(uf, nf) + dot([deta[0] + up[0], deta[1] + up[1]], np), 0.0, 10.0));

        let sf = mv(stokes_stress(&ms, x, t), nf);
        let sp = mv(poro_stress(&ms, x, t), np);
        let lam = ms.multiplier(x, t);
        // normal stress equals the pore pressure trace
        assert!(close(-dot(sf, nf), lam, lam.abs()));
        // slip law
        let slip = dot([uf[0] - deta[0], uf[1] - deta[1]], tan);
        assert!(close(-dot(sf, tan), gamma * slip, 10.0));
        // traction balance
        for c in 0..2 {
            assert!(close(sf[c] + sp[c], 0.0, 10.0));
        }
    }
}
