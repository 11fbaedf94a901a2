//! Assembly of the bilinear forms and loads of the coupled problem.

pub mod forms;
pub mod params;

pub use forms::{
    darcy, div_div, divergence, elasticity, interface_blocks, l2_project, mass, normal_flux_load,
    scalar_load, trace_mass, vector_gradient, vector_load, vector_mass, viscous, InterfaceBlocks,
    ScalarFn, VectorFn,
};
pub use params::{inverse, is_spd, lame_from_youngs, CellField, PhysicalParams, Tensor};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fe::{ElementFamily, FESpace};
    use crate::interface::InterfacePairing;
    use crate::mesh::{build_structured, BoundaryTag, Mesh2D, Rect, SideTags, Subdomain};

    fn square(n: usize) -> Arc<Mesh2D> {
        Arc::new(
            build_structured(Rect::new(0.0, 2.0, 0.0, 1.0), n, n, Subdomain::Poro, SideTags::plain())
                .unwrap(),
        )
    }

    fn interpolate(space: &FESpace, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        space.interpolate_vector(f).unwrap()
    }

    #[test]
    fn mass_sums_to_area() {
        let m = square(3);
        for fam in [ElementFamily::P0, ElementFamily::P1, ElementFamily::P1Dc, ElementFamily::P2] {
            let s = FESpace::new(m.clone(), fam).unwrap();
            let a = mass(&s, 1.0);
            let one = vec![1.0; s.ndofs()];
            assert!((a.bilinear(&one, &one) - 2.0).abs() < 1e-12, "{fam}");
        }
    }

    #[test]
    fn rigid_motions_are_in_the_kernel() {
        let m = square(3);
        for fam in [ElementFamily::VecP1, ElementFamily::VecP2, ElementFamily::VecP1Bubble] {
            let s = FESpace::new(m.clone(), fam).unwrap();
            let v = viscous(&s, 1.3);
            let e = elasticity(&s, &PhysicalParams::default());
            for u in [
                interpolate(&s, |_| [1.0, -2.0]),
                interpolate(&s, |p| [-p[1], p[0]]),
            ] {
                assert!(crate::sparse::norm2(&v.matvec(&u)) < 1e-12, "{fam}");
                assert!(crate::sparse::norm2(&e.matvec(&u)) < 1e-12, "{fam}");
            }
        }
    }

    #[test]
    fn viscous_energy_of_linear_field() {
        // u = (x, -y): D(u) = diag(1, -1), 2 mu |D|^2 = 4 mu
        let m = square(2);
        let s = FESpace::new(m.clone(), ElementFamily::VecP2).unwrap();
        let u = interpolate(&s, |p| [p[0], -p[1]]);
        let e = viscous(&s, 0.5).bilinear(&u, &u);
        assert!((e - 4.0 * 0.5 * 2.0).abs() < 1e-12);
        assert!(crate::sparse::norm2(&div_div(&s).matvec(&u)) < 1e-12);
    }

    #[test]
    fn divergence_of_interior_fluxes_cancels() {
        let m = square(3);
        for fam in [ElementFamily::Rt0, ElementFamily::Rt1] {
            let v = FESpace::new(m.clone(), fam).unwrap();
            let w = FESpace::new(m.clone(), ElementFamily::P0).unwrap();
            let b = divergence(&v, &w);
            let colsum = b.matvec_t(&vec![1.0; w.ndofs()]);
            for e in 0..m.num_edges() {
                let interior = m.edge_cells(e)[1].is_some();
                let c = colsum[if fam == ElementFamily::Rt0 { e } else { 2 * e }];
                if interior {
                    assert!(c.abs() < 1e-12);
                } else {
                    assert!((c.abs() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_load_integrates_area() {
        let m = square(2);
        let s = FESpace::new(m.clone(), ElementFamily::VecP2).unwrap();
        let l = vector_load(&s, &|_| [3.0, 0.0]);
        let ones = interpolate(&s, |_| [1.0, 0.0]);
        assert!((crate::sparse::dot(&l, &ones) - 6.0).abs() < 1e-12);
        let p = FESpace::new(m.clone(), ElementFamily::P1).unwrap();
        let q: f64 = scalar_load(&p, &|x| x[0]).iter().sum();
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_flux_load() {
        let m = square(2);
        let s = FESpace::new(m.clone(), ElementFamily::VecP1).unwrap();
        let edges = m.tagged_edges(BoundaryTag::Right);
        let l = normal_flux_load(&s, &edges, &|p| p[1]);
        let u = interpolate(&s, |_| [1.0, 0.0]);
        // -int_0^1 y dy
        assert!((crate::sparse::dot(&l, &u) + 0.5).abs() < 1e-12);
    }

    fn coupled(nf: usize, np: usize) -> (Arc<Mesh2D>, Arc<Mesh2D>, InterfacePairing) {
        let f = build_structured(
            Rect::new(0.0, 1.0, 0.0, 1.0),
            nf,
            nf,
            Subdomain::Fluid,
            SideTags { bottom: BoundaryTag::Interface, ..SideTags::plain() },
        )
        .unwrap();
        let p = build_structured(
            Rect::new(0.0, 1.0, -1.0, 0.0),
            np,
            np,
            Subdomain::Poro,
            SideTags { top: BoundaryTag::Interface, ..SideTags::plain() },
        )
        .unwrap();
        let ip = InterfacePairing::new(&f, &p, None).unwrap();
        (Arc::new(f), Arc::new(p), ip)
    }

    #[test]
    fn multiplier_blocks_on_matching_grid() {
        let (f, p, ip) = coupled(3, 3);
        let vf = FESpace::new(f, ElementFamily::VecP2).unwrap();
        let vp = FESpace::new(p.clone(), ElementFamily::Rt0).unwrap();
        let xp = FESpace::new(p.clone(), ElementFamily::VecP1).unwrap();
        let lam = FESpace::trace(p.clone(), ip.poro_edges.clone(), 0).unwrap();
        let ib = interface_blocks(&ip, &vf, &vp, &xp, &lam, &PhysicalParams::default()).unwrap();
        for (k, &e) in ip.poro_edges.iter().enumerate() {
            let v = ib.b_p.get(k, e).abs();
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        // constant vertical velocity (0, 1): fluid outward normal is -y
        let uf = interpolate(&vf, |_| [0.0, 1.0]);
        let xe = interpolate(&xp, |_| [0.0, 1.0]);
        let bf = ib.b_f.matvec(&uf);
        let be = ib.b_e.matvec(&xe);
        for k in 0..lam.ndofs() {
            let len = p.edge_length(ip.poro_edges[k]);
            assert!((bf[k] + len).abs() < 1e-12);
            assert!((be[k] - len).abs() < 1e-12);
        }
    }

    #[test]
    fn bjs_blocks_on_non_matching_grid() {
        let (f, p, ip) = coupled(5, 3);
        let vf = FESpace::new(f, ElementFamily::VecP1Bubble).unwrap();
        let vp = FESpace::new(p.clone(), ElementFamily::Rt1).unwrap();
        let xp = FESpace::new(p.clone(), ElementFamily::VecP2).unwrap();
        let lam = FESpace::trace(p.clone(), ip.poro_edges.clone(), 1).unwrap();
        let params = PhysicalParams {
            permeability: CellField::Uniform([[4.0, 0.0], [0.0, 1.0]]),
            ..Default::default()
        };
        let ib = interface_blocks(&ip, &vf, &vp, &xp, &lam, &params).unwrap();
        // tangential slip of unit magnitude: gamma = 1 / sqrt(4) over unit length
        let uf = interpolate(&vf, |_| [1.0, 0.0]);
        let xe = interpolate(&xp, |_| [1.0, 0.0]);
        assert!((ib.bjs_ff.bilinear(&uf, &uf) - 0.5).abs() < 1e-12);
        assert!((ib.bjs_ee.bilinear(&xe, &xe) - 0.5).abs() < 1e-12);
        assert!((ib.bjs_fe.bilinear(&uf, &xe) - 0.5).abs() < 1e-12);
        let lm = trace_mass(&lam);
        let one: Vec<f64> = (0..lam.ndofs()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        assert!((lm.bilinear(&one, &one) - 1.0).abs() < 1e-12);
    }
}
