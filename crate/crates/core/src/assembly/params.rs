use crate::error::{invalid, Result};

/// A coefficient that is either constant or given per cell.
#[derive(Clone, Debug, PartialEq)]
pub enum CellField<T> {
    Uniform(T),
    PerCell(Vec<T>),
}

impl<T: Copy> CellField<T> {
    pub fn get(&self, cell: usize) -> T {
        match self {
            CellField::Uniform(v) => *v,
            CellField::PerCell(v) => v[cell],
        }
    }

    pub fn len_ok(&self, n: usize) -> bool {
        match self {
            CellField::Uniform(_) => true,
            CellField::PerCell(v) => v.len() == n,
        }
    }

    pub fn values(&self) -> Vec<T> {
        match self {
            CellField::Uniform(v) => vec![*v],
            CellField::PerCell(v) => v.clone(),
        }
    }
}

pub type Tensor = [[f64; 2]; 2];

/// Physical coefficients. Cell-wise fields are indexed by poroelastic cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Fluid viscosity.
    pub mu: f64,
    /// Biot-Willis coefficient.
    pub alpha: f64,
    /// Storativity.
    pub s0: f64,
    /// Beavers-Joseph-Saffman slip coefficient.
    pub alpha_bjs: f64,
    pub permeability: CellField<Tensor>,
    /// Lame parameters `[lambda_p, mu_p]`.
    pub lame: CellField<[f64; 2]>,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            mu: 1.0,
            alpha: 1.0,
            s0: 1.0,
            alpha_bjs: 1.0,
            permeability: CellField::Uniform([[1.0, 0.0], [0.0, 1.0]]),
            lame: CellField::Uniform([1.0, 1.0]),
        }
    }
}

pub fn inverse(k: Tensor) -> Tensor {
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    [[k[1][1] / det, -k[0][1] / det], [-k[1][0] / det, k[0][0] / det]]
}

pub fn is_spd(k: Tensor) -> bool {
    let sym = (k[0][1] - k[1][0]).abs() <= 1e-12 * (k[0][0].abs() + k[1][1].abs());
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    sym && k[0][0] > 0.0 && det > 0.0 && det.is_finite()
}

/// Lame parameters from Young's modulus and Poisson ratio.
pub fn lame_from_youngs(e: f64, nu: f64) -> Result<[f64; 2]> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(invalid(format!("Young's modulus must be positive, got {e}")));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(invalid(format!("Poisson ratio must lie in (-1, 0.5), got {nu}")));
    }
    Ok([e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu))])
}

impl PhysicalParams {
    pub fn perm(&self, cell: usize) -> Tensor {
        self.permeability.get(cell)
    }

    pub fn lame(&self, cell: usize) -> [f64; 2] {
        self.lame.get(cell)
    }

    pub fn validate(&self, poro_cells: usize) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(invalid(format!("viscosity must be positive, got {}", self.mu)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.s0 >= 0.0) || !self.s0.is_finite() {
            return Err(invalid(format!("storativity must be non-negative, got {}", self.s0)));
        }
        if !(self.alpha_bjs >= 0.0) || !self.alpha_bjs.is_finite() {
            return Err(invalid(format!(
                "slip coefficient must be non-negative, got {}",
                self.alpha_bjs
            )));
        }
        if !self.permeability.len_ok(poro_cells) || !self.lame.len_ok(poro_cells) {
            return Err(invalid("cell-wise coefficients must have one value per poroelastic cell"));
        }
        for (c, k) in self.permeability.values().iter().enumerate() {
            if !is_spd(*k) {
                return Err(invalid(format!("permeability of cell {c} is not symmetric positive definite")));
            }
        }
        for (c, [l, m]) in self.lame.values().iter().enumerate() {
            if !(*m > 0.0) || !(l + m > 0.0) || !l.is_finite() || !m.is_finite() {
                return Err(invalid(format!("Lame parameters of cell {c} are not admissible")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_values() {
        let [l, m] = lame_from_youngs(1e7, 0.2).unwrap();
        assert!((l - 5.0 / 18.0 * 1e7).abs() < 1e-6);
        assert!((m - 5.0 / 12.0 * 1e7).abs() < 1e-6);
        assert!(lame_from_youngs(1.0, 0.5).is_err());
    }

    #[test]
    fn rejects_indefinite_permeability() {
        let p = PhysicalParams {
            permeability: CellField::Uniform([[1.0, 2.0], [2.0, 1.0]]),
            ..Default::default()
        };
        assert!(p.validate(1).is_err());
        assert!(PhysicalParams::default().validate(1).is_ok());
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        let p = PhysicalParams { alpha: 1.5, ..Default::default() };
        assert!(p.validate(1).is_err());
    }
}
