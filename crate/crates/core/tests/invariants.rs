//! Property tests for the discrete operators and state invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use lcflow::diagnostics::{blowup_integrand, controlled_norms};
use lcflow::dynamics::{step, Integrator};
use lcflow::scenarios::{random_smooth, winding_director};
use lcflow::spectral::{
    curl, divergence, gradient, laplacian, leray_project, transform_forward, transform_inverse,
};
use lcflow::state::constraint_residual;
use lcflow::{Field, FluidState, Grid, PhysicsParams};

fn torus(dim: usize, res: usize) -> Arc<Grid> {
    Grid::shared(dim, res, 2.0 * PI).unwrap()
}

/// A grid plus `ncomp` components of white noise on it.
fn noise(dim: usize, res: usize, ncomp: usize) -> impl Strategy<Value = Field> {
    let n = res.pow(dim as u32);
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), ncomp)
        .prop_map(move |v| Field::from_physical(torus(dim, res), v).unwrap())
}

fn dim_and_noise(ncomp_is_dim: bool) -> impl Strategy<Value = Field> {
    prop_oneof![
        noise(2, 16, if ncomp_is_dim { 2 } else { 1 }),
        noise(3, 8, if ncomp_is_dim { 3 } else { 1 }),
    ]
}

fn stack(parts: &[Field]) -> Field {
    let grid = parts[0].grid().clone();
    let comps = parts.iter().flat_map(|f| f.coefficients()).collect();
    Field::from_spectral(grid, comps).unwrap()
}

fn roll(f: &Field, shift: usize) -> Field {
    let g = f.grid().clone();
    let values = f
        .values()
        .into_iter()
        .map(|c| (0..c.len()).map(|i| c[(i + shift) % c.len()]).collect())
        .collect();
    Field::from_physical(g, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_round_trip(f in dim_and_noise(false)) {
        let back = transform_inverse(&transform_forward(&f));
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn parseval(f in dim_and_noise(true)) {
        let physical = f.l2_norm().powi(2);
        let spectral = f.spectral_energy();
        prop_assert!((physical - spectral).abs() <= 1e-10 * physical.max(1.0));
    }

    #[test]
    fn projection_is_solenoidal_and_idempotent(v in dim_and_noise(true)) {
        let p = leray_project(&v).unwrap();
        prop_assert!(divergence(&p).unwrap().max_norm() < 1e-12);
        prop_assert!(leray_project(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn curl_of_gradient_vanishes(f in dim_and_noise(false)) {
        let dim = f.grid().dim();
        let grads: Vec<Field> = (0..dim).map(|a| gradient(&f, a).unwrap()).collect();
        prop_assert!(curl(&stack(&grads)).unwrap().max_norm() < 1e-11);
    }

    #[test]
    fn divergence_of_curl_vanishes_3d(v in noise(3, 8, 3)) {
        prop_assert!(divergence(&curl(&v).unwrap()).unwrap().max_norm() < 1e-11);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian(f in dim_and_noise(false)) {
        let dim = f.grid().dim();
        let grads: Vec<Field> = (0..dim).map(|a| gradient(&f, a).unwrap()).collect();
        let div = divergence(&stack(&grads)).unwrap();
        prop_assert!(div.max_abs_diff(&laplacian(&f)) < 1e-10);
    }

    #[test]
    fn norms_are_shift_invariant(f in noise(2, 16, 2), shift in 0usize..256) {
        let g = roll(&f, shift);
        prop_assert!((f.max_norm() - g.max_norm()).abs() < 1e-15);
        prop_assert!((f.l2_norm() - g.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_integrand_ignores_velocity(v in noise(2, 16, 2), k in 1i64..4) {
        let wind = winding_director(&torus(2, 16), k).unwrap();
        let moving = FluidState::new(leray_project(&v).unwrap(), wind.d().clone(), 0.0).unwrap();
        prop_assert_eq!(blowup_integrand(&moving), blowup_integrand(&wind));
        prop_assert_eq!(controlled_norms(&moving).1, controlled_norms(&wind).1);
    }

    #[test]
    fn random_data_is_admissible(seed in any::<u64>(), slope in 3.0..6.0f64, amp in 0.01..2.0f64) {
        let s = random_smooth(&torus(2, 16), seed, slope, amp).unwrap();
        prop_assert!(divergence(s.u()).unwrap().max_norm() < 1e-10);
        prop_assert!(constraint_residual(&s).0 < 1e-14);
        prop_assert!((s.u().max_norm() - amp).abs() < 1e-12 * amp.max(1.0));
    }

    #[test]
    fn steps_keep_unit_director(seed in 0u64..1000, rk4 in any::<bool>()) {
        let s = random_smooth(&torus(2, 16), seed, 4.0, 0.5).unwrap();
        let integrator = if rk4 { Integrator::IfRk4 } else { Integrator::IfRk2 };
        let next = step(&s, &PhysicsParams::default(), 1e-3, integrator).unwrap();
        prop_assert!(constraint_residual(&next).0 < 1e-14);
        prop_assert!(divergence(next.u()).unwrap().max_norm() < 1e-10);
        prop_assert!((next.t() - 1e-3).abs() < 1e-18);
    }
}
