use std::sync::Arc;

use proptest::prelude::*;
use stokes_biot::fe::{BasisValues, ElementFamily, FESpace};
use stokes_biot::io::config::{parse_config, RunConfig};
use stokes_biot::mesh::*;

fn rect_mesh(nx: usize, ny: usize, x0: f64, w: f64, y0: f64, h: f64) -> Mesh2D {
    build_structured(Rect::new(x0, x0 + w, y0, y0 + h), nx, ny, Subdomain::Poro, SideTags::plain()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mesh_text_round_trip(nx in 1usize..7, ny in 1usize..7, x0 in -5.0f64..5.0, w in 0.1f64..3.0,
                            y0 in -5.0f64..5.0, h in 0.1f64..3.0) {
        let m = rect_mesh(nx, ny, x0, w, y0, h);
        let back = parse_mesh(&mesh_to_string(&m), "prop").unwrap();
        prop_assert_eq!(m.nodes(), back.nodes());
        prop_assert_eq!(m.triangles(), back.triangles());
        prop_assert_eq!(m.boundary(), back.boundary());
        prop_assert!((m.total_area() - w * h).abs() < 1e-12 * w * h);
    }

    #[test]
    fn config_text_round_trip(s0 in 1e-4f64..1.0, mu in 1e-8f64..1e-2, alpha in 0.0f64..=1.0,
                              tau in 0.01f64..1.0, steps in 1usize..50, every in 0usize..10) {
        let mut c = RunConfig::default();
        c.scenario.s0 = s0;
        c.scenario.mu = mu;
        c.scenario.alpha = alpha;
        c.scenario.tau = tau;
        c.scenario.t_end = tau * steps as f64;
        c.scenario.output_every = every;
        let back = parse_config(&c.to_text(), "prop.cfg", None).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn lagrange_bases_sum_to_one(x in 0.0f64..1.0, y in 0.0f64..1.0, skew in -0.4f64..0.4) {
        let r = if x + y <= 1.0 { [x, y] } else { [1.0 - x, 1.0 - y] };
        let mesh = Arc::new(Mesh2D::new(
            vec![[0.0, 0.0], [1.0, 0.1], [skew, 0.8]],
            vec![[0, 1, 2]],
            vec![Subdomain::Poro],
            vec![
                BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Bottom },
                BoundaryEdge { nodes: [1, 2], tag: BoundaryTag::Right },
                BoundaryEdge { nodes: [0, 2], tag: BoundaryTag::Left },
            ],
        ).unwrap());
        for fam in [ElementFamily::P1, ElementFamily::P2, ElementFamily::P1Dc] {
            let s = FESpace::new(mesh.clone(), fam).unwrap();
            let mut b = BasisValues::new(fam);
            s.eval(0, &s.geom(0), r, &mut b);
            let sum: f64 = b.val.iter().sum();
            let gsum = b.grad.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            prop_assert!((sum - 1.0).abs() < 1e-13);
            prop_assert!(gsum[0].abs() < 1e-12 && gsum[1].abs() < 1e-12);
        }
    }
}
