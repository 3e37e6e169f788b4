mod common;

use common::{random_matrix, random_unitary, rng};
use pointform_core::fermion::CouplingMatrix;
use pointform_core::vertex::form_factor::{cutoff_scan, form_factor, QuadratureSpec};
use pointform_core::vertex::spinor::{dirac_spinor, pseudoscalar_bilinear, Spin, SpinorKind};
use pointform_core::vertex::{pseudoscalar_vertex_set, verify_vertex_matrices, GridMode, VertexSet};
use pointform_core::Complex64;

/// `F^0(5,0,0,0) = 2π (−d/dp)[K1(p)/p]` at `p = −5i`, evaluated with mpmath.
const F0_AT_FIVE: (f64, f64) = (0.0919158553104281998563136930136, 0.725737440856136995418801376363);

fn velocity(rapidity: f64, dir: [f64; 3]) -> [f64; 4] {
    let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let s = rapidity.sinh() / n;
    [rapidity.cosh(), dir[0] * s, dir[1] * s, dir[2] * s]
}

#[test]
fn rest_frame_argument_has_no_spatial_part() {
    let q = QuadratureSpec::default();
    for u0 in [2.0, 5.0, -3.0] {
        let f = form_factor(&[u0, 0.0, 0.0, 0.0], &q).unwrap();
        for i in 1..4 {
            assert!(f.value[i].norm() <= 1e-10);
        }
    }
}

#[test]
fn matches_bessel_closed_form() {
    let f = form_factor(&[5.0, 0.0, 0.0, 0.0], &QuadratureSpec::default()).unwrap();
    let expected = Complex64::new(F0_AT_FIVE.0, F0_AT_FIVE.1);
    let rel = (f.value[0] - expected).norm() / expected.norm();
    assert!(rel < 1e-3, "relative error {rel}");
    assert!(!f.flagged);
}

#[test]
fn dual_schedules_agree() {
    let u = [5.0, 0.0, 0.0, 0.0];
    let a = form_factor(&u, &QuadratureSpec::default()).unwrap();
    let b = form_factor(
        &u,
        &QuadratureSpec {
            schedule: vec![0.35, 0.25, 0.18, 0.12, 0.08],
            nodes_per_panel: 20,
            max_panel_width: 0.2,
            ..QuadratureSpec::default()
        },
    )
    .unwrap();
    let rel = (a.value[0] - b.value[0]).norm() / a.value[0].norm();
    assert!(rel <= 1e-3, "relative difference {rel}");
}

#[test]
fn reflection_conjugates() {
    let q = QuadratureSpec::default();
    for u in [[5.0, 0.0, 0.0, 0.0], [3.0, 0.5, -0.2, 0.4], [0.5, 2.0, 0.0, 0.0]] {
        let f = form_factor(&u, &q).unwrap();
        let g = form_factor(&u.map(|x| -x), &q).unwrap();
        for mu in 0..4 {
            assert!((g.value[mu] - f.value[mu].conj()).norm() <= 1e-10);
        }
    }
}

#[test]
fn zero_argument_diverges_and_is_flagged() {
    let q = QuadratureSpec::default();
    let f = form_factor(&[0.0; 4], &q).unwrap();
    assert!(f.flagged);
    let scan = cutoff_scan(&[0.0; 4], &[5.0, 10.0, 20.0], &q).unwrap();
    let truncated: Vec<f64> = scan.iter().map(|r| r.truncated.unwrap()[0].norm()).collect();
    assert!(truncated[1] > 100.0 * truncated[0]);
    assert!(truncated[2] > 100.0 * truncated[1]);
    assert!(scan.iter().all(|r| r.extrapolated.flagged));
}

#[test]
fn boosted_argument_transforms_as_a_vector() {
    // Λ along x with rapidity η
    let eta: f64 = 0.3;
    let (ch, sh) = (eta.cosh(), eta.sinh());
    let boost = |v: [f64; 4]| [ch * v[0] + sh * v[1], sh * v[0] + ch * v[1], v[2], v[3]];
    let q = QuadratureSpec::default();
    let rest = form_factor(&[5.0, 0.0, 0.0, 0.0], &q).unwrap();
    let moved = form_factor(&boost([5.0, 0.0, 0.0, 0.0]), &q).unwrap();
    let expected = [rest.value[0] * ch, rest.value[0] * sh];
    for mu in 0..2 {
        let rel = (moved.value[mu] - expected[mu]).norm() / rest.value[0].norm();
        assert!(rel < 1e-3, "component {mu}: {rel}");
    }
}

fn grid() -> Vec<GridMode> {
    vec![
        GridMode {
            velocity: velocity(0.3, [1.0, 0.0, 0.0]),
            spin: Spin::Up,
        },
        GridMode {
            velocity: velocity(0.2, [0.0, 1.0, 1.0]),
            spin: Spin::Down,
        },
    ]
}

#[test]
fn pseudoscalar_entries_and_determinism() {
    let q = QuadratureSpec::default();
    let bosons = [velocity(0.1, [0.0, 0.0, 1.0])];
    let g = grid();
    let a = pseudoscalar_vertex_set(&g, &bosons, &q).unwrap();
    let b = pseudoscalar_vertex_set(&g, &bosons, &q).unwrap();
    assert_eq!(a, b);
    let (i, j) = (0, 1);
    let u: [f64; 4] = core::array::from_fn(|m| g[i].velocity[m] - g[j].velocity[m] - bosons[0][m]);
    let ff = form_factor(&u, &q).unwrap();
    let ui = dirac_spinor(&g[i].velocity, g[i].spin, SpinorKind::Particle).unwrap();
    let uj = dirac_spinor(&g[j].velocity, g[j].spin, SpinorKind::Particle).unwrap();
    let gamma = pseudoscalar_bilinear(&ui, &uj);
    for mu in 0..4 {
        assert_eq!(a.matrix(1, mu).entries()[(i, j)], ff.value[mu] * gamma);
    }
    let vi = dirac_spinor(&g[i].velocity, g[i].spin, SpinorKind::Antiparticle).unwrap();
    let u2: [f64; 4] = core::array::from_fn(|m| -g[i].velocity[m] - g[j].velocity[m] - bosons[0][m]);
    let ff2 = form_factor(&u2, &q).unwrap();
    assert_eq!(a.matrix(1, 0).entries()[(2 + i, j)], ff2.value[0] * pseudoscalar_bilinear(&vi, &uj));
}

#[test]
fn rest_grid_has_empty_diagonal_blocks() {
    let g = vec![GridMode {
        velocity: [1.0, 0.0, 0.0, 0.0],
        spin: Spin::Up,
    }];
    let vs = pseudoscalar_vertex_set(&g, &[[1.0, 0.0, 0.0, 0.0]], &QuadratureSpec::default()).unwrap();
    for mu in 0..4 {
        let x = vs.matrix(1, mu).entries();
        assert_eq!(x[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(x[(1, 1)], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn invalid_grid_velocity_rejected() {
    let g = vec![GridMode {
        velocity: [1.0, 0.5, 0.0, 0.0],
        spin: Spin::Up,
    }];
    assert!(pseudoscalar_vertex_set(&g, &[], &QuadratureSpec::default()).is_err());
}

#[test]
fn defects_invariant_under_unitary_conjugation() {
    let mut r = rng(29);
    for n in 1..=3 {
        let dim = 2 * n;
        let mats: Vec<[CouplingMatrix; 4]> = (0..2)
            .map(|_| core::array::from_fn(|_| CouplingMatrix::new(random_matrix(&mut r, dim)).unwrap()))
            .collect();
        let u = random_unitary(&mut r, dim);
        let rotated: Vec<[CouplingMatrix; 4]> = mats
            .iter()
            .map(|xs| core::array::from_fn(|mu| CouplingMatrix::new(&u * xs[mu].entries() * u.adjoint()).unwrap()))
            .collect();
        let a = verify_vertex_matrices(&VertexSet::explicit(n, mats).unwrap());
        let b = verify_vertex_matrices(&VertexSet::explicit(n, rotated).unwrap());
        assert!(a.normality_defect > 0.1);
        assert!((a.normality_defect - b.normality_defect).abs() <= 1e-10);
        assert!((a.commutativity_defect - b.commutativity_defect).abs() <= 1e-10);
    }
}
