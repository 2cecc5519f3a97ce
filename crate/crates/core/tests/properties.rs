use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use nls_rotation::eigen;
use nls_rotation::free::propagate_u0;
use nls_rotation::harmonic::propagate_shear;
use nls_rotation::lens::{self, LensTime};
use nls_rotation::propagator::{self, NlsConfig, Potential, Sign};
use nls_rotation::spectral::{fourier, io, Field, Grid};

/// A sum of up to three modulated Gaussians, all well inside `[-10, 10]`.
fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -2.0..2.0f64, 0.5..2.0f64, -2.0..2.0f64, 0.0..TAU), 1..4)
}

fn synthesize(g: Grid, shape: &[(f64, f64, f64, f64, f64)]) -> Field {
    Field::from_fn(g, |x| {
        shape
            .iter()
            .map(|&(a, c, w, k, p)| {
                Complex64::from_polar(a * (-(x[0] - c).powi(2) / (2.0 * w * w)).exp(), k * x[0] + p)
            })
            .sum()
    })
}

fn grid() -> Grid {
    Grid::line(10.0, 256)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fourier_is_unitary_and_squares_to_reflection(shape in bumps()) {
        let f = synthesize(grid(), &shape);
        let fh = fourier::fourier(&f).unwrap();
        prop_assert!((fh.l2() - f.l2()).abs() <= 1e-12 * (1.0 + f.l2()));
        prop_assert!(fourier::inverse_fourier(&fh).unwrap().distance(&f).unwrap() <= 1e-12 * (1.0 + f.l2()));
        let ff = fourier::fourier(&fh).unwrap();
        prop_assert!(ff.distance(&f.reflect()).unwrap() <= 1e-12 * (1.0 + f.l2()));
    }

    #[test]
    fn inner_product_is_hermitian(a in bumps(), b in bumps()) {
        let (f, g) = (synthesize(grid(), &a), synthesize(grid(), &b));
        let fg = f.inner(&g).unwrap();
        let gf = g.inner(&f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-12);
        prop_assert!((f.inner(&f).unwrap().re - f.l2_squared()).abs() <= 1e-12);
    }

    #[test]
    fn free_flow_is_a_unitary_group(shape in bumps(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let f = synthesize(grid(), &shape);
        let composed = propagate_u0(&propagate_u0(&f, s), t);
        prop_assert!(composed.distance(&propagate_u0(&f, s + t)).unwrap() <= 1e-11 * (1.0 + f.l2()));
        prop_assert!((propagate_u0(&f, t).l2() - f.l2()).abs() <= 1e-12 * (1.0 + f.l2()));
    }

    #[test]
    fn harmonic_flow_is_unitary_and_composes(shape in bumps(), s in -1.2..1.2f64, t in -1.2..1.2f64) {
        // Intermediate shear states are wider than the data.
        let f = synthesize(Grid::line(20.0, 512), &shape);
        let composed = propagate_shear(&propagate_shear(&f, s), t);
        prop_assert!(composed.distance(&propagate_shear(&f, s + t)).unwrap() <= 1e-10 * (1.0 + f.l2()));
        prop_assert!((propagate_shear(&f, t).l2() - f.l2()).abs() <= 1e-12 * (1.0 + f.l2()));
    }

    #[test]
    fn gagliardo_nirenberg_holds(shape in bumps()) {
        let f = synthesize(grid(), &shape);
        prop_assume!(f.l2() > 1e-3);
        let q_l2 = (3f64.sqrt() * PI / (2.0 * 2f64.sqrt())).sqrt();
        prop_assert!(eigen::gn_check(&f, q_l2) >= 1.0 - 1e-8);
    }

    #[test]
    fn projection_is_idempotent_and_scale_free(shape in bumps(), c in 0.1..10.0f64) {
        let f = synthesize(grid(), &shape);
        prop_assume!(f.add(&f.reflect()).unwrap().l2() > 1e-3);
        let p = eigen::project_to_m(&f).unwrap();
        prop_assert!((p.lp_integral(6.0) / 3.0 - 1.0).abs() <= 1e-12);
        prop_assert!(eigen::project_to_m(&p).unwrap().distance(&p).unwrap() <= 1e-12 * p.l2());
        prop_assert!(eigen::project_to_m(&f.scale_real(c)).unwrap().distance(&p).unwrap() <= 1e-12 * p.l2());
    }

    #[test]
    fn strang_step_conserves_mass_and_commutes_with_gauge(shape in bumps(), eta in 0.0..TAU, focusing in any::<bool>()) {
        let f = synthesize(grid(), &shape);
        let sign = if focusing { Sign::Focusing } else { Sign::Defocusing };
        let cfg = NlsConfig::critical(1, sign, Potential::Harmonic);
        let stepped = propagator::step_strang(&f, 0.1, 1e-2, &cfg).unwrap();
        prop_assert!((stepped.l2_squared() - f.l2_squared()).abs() <= 1e-12 * (1.0 + f.l2_squared()));
        let rotated = propagator::step_strang(&f.rotate(eta), 0.1, 1e-2, &cfg).unwrap();
        prop_assert!(rotated.distance(&stepped.rotate(eta)).unwrap() <= 1e-12 * (1.0 + f.l2()));
    }

    #[test]
    fn lens_round_trip(shape in bumps(), s in -0.8..0.8f64) {
        let g = Grid::line(24.0, 512);
        let f = synthesize(g, &shape);
        let v = lens::lens_forward(&f, LensTime::new(s).unwrap()).unwrap();
        prop_assert!((v.l2() - f.l2()).abs() <= 1e-10 * (1.0 + f.l2()));
        prop_assert!(lens::lens_inverse(&v, s.tan()).unwrap().distance(&f).unwrap() <= 1e-9 * (1.0 + f.l2()));
    }

    #[test]
    fn field_files_round_trip_exactly(shape in bumps()) {
        let f = synthesize(grid(), &shape);
        let mut buf = Vec::new();
        io::write_field(&mut buf, &f, "property").unwrap();
        let (header, back) = io::read_field(buf.as_slice()).unwrap();
        prop_assert_eq!(header.points, 256);
        prop_assert_eq!(back, f);
    }
}
