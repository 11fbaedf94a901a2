//! Per-step diagnostics: interface constraint residual, discrete energy
//! balance and stored energy.

use crate::solver::{Field, Simulation, TransientState};
use crate::sparse::{dot, Csr};

fn displacement_rate(sim: &Simulation, state: &TransientState, prev: &TransientState) -> Vec<f64> {
    let lay = sim.layout();
    let tau = state.t - prev.t;
    lay.field(&state.x, Field::Displacement)
        .iter()
        .zip(lay.field(&prev.x, Field::Displacement))
        .map(|(a, b)| (a - b) / tau)
        .collect()
}

fn abs_matvec(m: &Csr, x: &[f64], acc: &mut [f64]) {
    for (i, a) in acc.iter_mut().enumerate() {
        *a += m.row(i).map(|(j, v)| (v * x[j]).abs()).sum::<f64>();
    }
}

/// `max_i |b_G(u_f, u_p, d_tau eta; mu_i)|` relative to the largest
/// magnitude of the individual contributions.
pub fn constraint_residual(sim: &Simulation, state: &TransientState, prev: &TransientState) -> f64 {
    let lay = sim.layout();
    let ib = &sim.blocks.iface;
    let uf = lay.field(&state.x, Field::FluidVelocity);
    let up = lay.field(&state.x, Field::DarcyVelocity);
    let de = displacement_rate(sim, state, prev);
    let mut r = ib.b_f.matvec(uf);
    for (a, b) in r.iter_mut().zip(ib.b_p.matvec(up)) {
        *a += b;
    }
    for (a, b) in r.iter_mut().zip(ib.b_e.matvec(&de)) {
        *a += b;
    }
    let mut scale = vec![0.0; r.len()];
    abs_matvec(&ib.b_f, uf, &mut scale);
    abs_matvec(&ib.b_p, up, &mut scale);
    abs_matvec(&ib.b_e, &de, &mut scale);
    let num = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let den = scale.iter().fold(0.0f64, |m, v| m.max(*v));
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Both sides of the discrete energy equation for one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBalance {
    pub lhs: f64,
    pub rhs: f64,
}

impl EnergyBalance {
    /// `|lhs - rhs| / (|lhs| + |rhs|)`, zero when both vanish.
    pub fn residual(&self) -> f64 {
        let d = self.lhs.abs() + self.rhs.abs();
        if d == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / d
        }
    }
}

/// Discrete energy equation of step `prev -> state`. The forcing side is the
/// load functional applied to `(u_f, u_p, d_tau eta, p_f, p_p, lambda)` plus
/// the work of the reactions at constrained degrees of freedom.
pub fn energy_identity(sim: &Simulation, state: &TransientState, prev: &TransientState) -> EnergyBalance {
    let lay = sim.layout();
    let b = &sim.blocks;
    let ib = &b.iface;
    let s0 = sim.params.s0;
    let tau = state.t - prev.t;
    let f = |x: &TransientState, fld| lay.field(&x.x, fld).to_vec();
    let (p, p0) = (f(state, Field::PorePressure), f(prev, Field::PorePressure));
    let (eta, eta0) = (f(state, Field::Displacement), f(prev, Field::Displacement));
    let uf = f(state, Field::FluidVelocity);
    let up = f(state, Field::DarcyVelocity);
    let de = displacement_rate(sim, state, prev);
    let dp: Vec<f64> = p.iter().zip(&p0).map(|(a, b)| (a - b) / tau).collect();

    // |a|^2 - |b|^2 as (a - b, a + b) to avoid cancellation near steady state
    let diff_sq = |m: &Csr, a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let s: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        m.bilinear(&d, &s)
    };
    let stored = s0 * diff_sq(&b.m_p, &p, &p0) + diff_sq(&b.a_e, &eta, &eta0);
    let increments = s0 * b.m_p.bilinear(&dp, &dp) + b.a_e.bilinear(&de, &de);
    let bjs = ib.bjs_ff.bilinear(&uf, &uf) - 2.0 * ib.bjs_fe.bilinear(&uf, &de) + ib.bjs_ee.bilinear(&de, &de);
    let lhs = stored / (2.0 * tau)
        + 0.5 * tau * increments
        + b.a_f.bilinear(&uf, &uf)
        + b.a_p.bilinear(&up, &up)
        + bjs;

    let mut y = state.x.clone();
    lay.field_mut(&mut y, Field::Displacement).copy_from_slice(&de);
    let loads = sim.loads(state.t);
    let rhs_full = sim.step_rhs(&prev.x, state.t);
    let mx = sim.step_matrix.matvec(&state.x);
    let residual: Vec<f64> = mx.iter().zip(&rhs_full).map(|(a, b)| a - b).collect();
    let rhs = dot(&y, &loads) + sim.constraints.reaction_work(&y, &residual);
    EnergyBalance { lhs, rhs }
}

/// `1/2 (s0 ||p_p||^2 + a_e(eta, eta))`
pub fn stored_energy(sim: &Simulation, x: &[f64]) -> f64 {
    let lay = sim.layout();
    let p = lay.field(x, Field::PorePressure);
    let eta = lay.field(x, Field::Displacement);
    0.5 * (sim.params.s0 * sim.blocks.m_p.bilinear(p, p) + sim.blocks.a_e.bilinear(eta, eta))
}
