mod common;

use common::{aligned_vertices, c, commuting_vertices, norm, random_matrix, rng};
use pointform_core::boson::{build_boson_basis, DEFAULT_MAX_BOSON_STATES};
use pointform_core::fermion::{build_basis, CouplingMatrix, ModeKind, DEFAULT_MAX_FERMION_STATES};
use pointform_core::solver::ExactModel;
use pointform_core::{
    assemble_free, assemble_interaction, assemble_total, diagonalize, shifted_modes, transformed_hamiltonian,
    verify_momentum_commutators, Complex64, Error, Kinematics, Method, ModelConfig, OperatorMatrix, ProductSpace,
    VertexSet,
};

fn space(n: usize, k: usize, n_max: usize, sector: Option<i32>) -> ProductSpace {
    ProductSpace::new(
        build_basis(n, DEFAULT_MAX_FERMION_STATES).unwrap(),
        build_boson_basis(k, n_max, DEFAULT_MAX_BOSON_STATES).unwrap(),
        sector,
    )
    .unwrap()
}

fn boosted(rapidity: f64, axis: usize) -> Kinematics {
    let mut v = [rapidity.cosh(), 0.0, 0.0, 0.0];
    v[axis] = rapidity.sinh();
    Kinematics::Velocity(v)
}

fn moving_model(alpha: f64, n_max: usize) -> ModelConfig {
    ModelConfig {
        fermion_modes: vec![boosted(0.3, 1), boosted(-0.2, 3)],
        boson_modes: vec![boosted(0.5, 2), boosted(0.1, 1)],
        kappa: 0.8,
        alpha,
        mass_scale: 1.0,
        n_max,
    }
}

fn exact_configs() -> Vec<ExactModel> {
    vec![
        ExactModel::paired(vec![1.0], vec![c(1.0)]).unwrap(),
        ExactModel::paired(vec![1.0, 2.0], vec![c(1.0), c(1.0)]).unwrap(),
    ]
}

#[test]
fn free_momentum_on_simple_states() {
    let model = moving_model(0.0, 3);
    let sp = space(2, 2, 3, None);
    let free = assemble_free(&model, &sp).unwrap();
    let fb = sp.fermion();
    let bb = sp.boson();
    let vac = sp.tensor(&fb.fock_vacuum(), &bb.vacuum());
    for mu in 0..4 {
        assert_eq!(norm(&free.operator.components[mu].apply(&vac)), 0.0);
    }
    let one = fb.mode_operator(ModeKind::FermionCreate, 2).unwrap().apply(&fb.fock_vacuum());
    let psi = sp.tensor(&one, &bb.vacuum());
    let v2 = model.fermion_modes[1].four_vector();
    for mu in 0..4 {
        let out = free.operator.components[mu].apply(&psi);
        let diff: Vec<Complex64> = out.iter().zip(&psi).map(|(a, b)| a - b * v2[mu]).collect();
        assert!(norm(&diff) < 1e-15);
    }
    let mut occ = vec![0; 2];
    occ[0] = 1;
    let mut boson = vec![c(0.0); bb.dim()];
    boson[bb.index_of(&occ)] = c(1.0);
    let psi = sp.tensor(&fb.fock_vacuum(), &boson);
    let vk = model.boson_modes[0].four_vector();
    for mu in 0..4 {
        let out = free.operator.components[mu].apply(&psi);
        let diff: Vec<Complex64> = out.iter().zip(&psi).map(|(a, b)| a - b * (model.kappa * vk[mu])).collect();
        assert!(norm(&diff) < 1e-15);
    }
}

#[test]
fn free_fermion_part_is_a_shifted_bilinear() {
    let model = moving_model(0.0, 1);
    let sp = space(2, 0, 1, None);
    let mut fermion_only = model.clone();
    fermion_only.boson_modes.clear();
    let free = assemble_free(&fermion_only, &sp).unwrap();
    let fb = sp.fermion();
    for mu in 0..4 {
        let e = pointform_core::momentum::free_coupling_matrix(&fermion_only, mu);
        let v: Vec<f64> = model.fermion_modes.iter().map(|m| m.four_vector()[mu]).collect();
        assert!((e.entries()[(0, 0)].re - v[0]).abs() < 1e-15);
        assert!((e.entries()[(2, 2)].re + v[0]).abs() < 1e-15);
        let shifted = fb
            .bilinear(&e)
            .unwrap()
            .add(&OperatorMatrix::identity(fb.dim()).scale_real(free.bilinear_constant[mu]));
        assert!(shifted.max_abs_diff(&free.operator.components[mu]) < 1e-13);
    }
}

#[test]
fn interaction_vanishes_at_zero_coupling_and_is_hermitian() {
    let mut r = rng(11);
    let vs = VertexSet::explicit(2, commuting_vertices(&mut r, 2, 2)).unwrap();
    let sp = space(2, 2, 3, None);
    let zero = assemble_interaction(&moving_model(0.0, 3), &vs, &sp).unwrap();
    assert!(zero.components.iter().all(|m| m.max_abs() == 0.0));
    let parts = assemble_total(&moving_model(0.7, 3), &vs, &sp).unwrap();
    for m in &parts.interaction.components {
        assert_eq!(m.hermiticity_defect(), 0.0);
    }
    assert!(parts.total.is_hermitian());
}

#[test]
fn interaction_matrix_element() {
    let mut r = rng(5);
    let (n, k) = (2, 2);
    let x0: Vec<CouplingMatrix> = (0..k).map(|_| CouplingMatrix::new(random_matrix(&mut r, 2 * n)).unwrap()).collect();
    let mats: Vec<[CouplingMatrix; 4]> = x0
        .iter()
        .map(|x| [x.clone(), CouplingMatrix::zeros(2 * n), CouplingMatrix::zeros(2 * n), CouplingMatrix::zeros(2 * n)])
        .collect();
    let vs = VertexSet::explicit(n, mats).unwrap();
    let alpha = 0.37;
    let sp = space(n, k, 2, None);
    let p0 = &assemble_interaction(&moving_model(alpha, 2), &vs, &sp).unwrap().components[0];
    let fb = sp.fermion();
    let bb = sp.boson();
    for kk in 1..=k {
        let mut occ = vec![0; k];
        occ[kk - 1] = 1;
        let mut one_boson = vec![c(0.0); bb.dim()];
        one_boson[bb.index_of(&occ)] = c(1.0);
        let ket = sp.tensor(&fb.fock_vacuum(), &one_boson);
        let out = p0.apply(&ket);
        for i in 1..=n {
            for j in 1..=n {
                // a†_i b†_j |0_F⟩ ⊗ |0⟩
                let pair = fb
                    .mode_operator(ModeKind::FermionCreate, i)
                    .unwrap()
                    .apply(&fb.mode_operator(ModeKind::AntifermionCreate, j).unwrap().apply(&fb.fock_vacuum()));
                let bra = sp.tensor(&pair, &bb.vacuum());
                let amp: Complex64 = bra.iter().zip(&out).map(|(b, o)| b.conj() * o).sum();
                let expected = x0[kk - 1].entries()[(i - 1, n + j - 1)] * alpha;
                assert!((amp - expected).norm() < 1e-14, "k={kk} i={i} j={j}");
            }
        }
    }
}

#[test]
fn momentum_conserves_baryon_number() {
    let mut r = rng(21);
    let vs = VertexSet::explicit(2, commuting_vertices(&mut r, 2, 2)).unwrap();
    let sp = space(2, 2, 3, None);
    let parts = assemble_total(&moving_model(0.5, 3), &vs, &sp).unwrap();
    let b = sp.lift_fermion(&sp.fermion().baryon_operator());
    for m in &parts.total.components {
        assert!(m.commutator(&b).max_abs() < 1e-14);
    }
}

#[test]
fn vacuum_is_not_an_eigenvector() {
    for alpha in [0.1, -0.4] {
        let m = &exact_configs()[1];
        let sp = space(2, 2, 4, None);
        let model = m.model_config(alpha, 4);
        let parts = assemble_total(&model, &m.vertices().unwrap(), &sp).unwrap();
        let vac = sp.tensor(&sp.fermion().fock_vacuum(), &sp.boson().vacuum());
        assert!(norm(&parts.total.components[0].apply(&vac)) > 1e-3);
    }
}

#[test]
fn commutators_of_aligned_vertices() {
    let mut r = rng(3);
    let vs = VertexSet::explicit(2, aligned_vertices(&mut r, 2, 2)).unwrap();
    assert!(vs.report().passes(1e-12));
    let sp = space(2, 2, 4, None);
    let parts = assemble_total(&moving_model(0.4, 4), &vs, &sp).unwrap();
    let report = verify_momentum_commutators(&parts, &sp, 2);
    assert_eq!(report.max_free_free(), 0.0);
    assert!(report.max_int_int() <= 1e-12, "{}", report.max_int_int());
    assert_eq!(report.entries.len(), 6);
}

#[test]
fn normal_commuting_vertices_are_not_enough() {
    // the same-mode term A(X^mu_k) A(X^nu_k)† - A(X^nu_k) A(X^mu_k)† survives
    // unless the components share their phases
    let mut r = rng(3);
    let vs = VertexSet::explicit(2, commuting_vertices(&mut r, 2, 2)).unwrap();
    assert!(vs.report().passes(1e-12));
    let sp = space(2, 2, 4, None);
    let parts = assemble_total(&moving_model(0.4, 4), &vs, &sp).unwrap();
    assert!(verify_momentum_commutators(&parts, &sp, 2).max_int_int() > 1e-3);
}

#[test]
fn scalar_vertices_mixed_term_is_reported() {
    let model = moving_model(0.4, 4);
    let y = [c(1.0), Complex64::new(0.3, -0.5)];
    let vs = VertexSet::scalar_y(2, &y, &model.boson_vectors()).unwrap();
    let sp = space(2, 2, 4, Some(0));
    let parts = assemble_total(&model, &vs, &sp).unwrap();
    let report = verify_momentum_commutators(&parts, &sp, 2);
    assert_eq!(report.max_free_free(), 0.0);
    assert!(report.max_int_int() <= 1e-12);
    assert!(report.max_mixed().is_finite());
}

#[test]
fn transformed_form_matches_assembled_form() {
    for m in exact_configs() {
        let alpha = 0.3;
        let sp = m.sector_space(16).unwrap();
        let model = m.model_config(alpha, 16);
        let vs = m.vertices().unwrap();
        let p0 = &assemble_total(&model, &vs, &sp).unwrap().total.components[0];
        let t = transformed_hamiltonian(&model, &vs, &sp).unwrap();
        let safe = sp.safe_indices(2);
        assert!(t.operator.sub(p0).max_abs_on(&safe) <= 1e-12);
        let shift = diagonalize(&t.shift_term, t.shift_term.dim(), Method::Dense).unwrap();
        assert!(shift.eigenvalues.iter().all(|&l| l <= 1e-12));
    }
    // generic commuting vertices in the full space
    let mut r = rng(8);
    let vs = VertexSet::explicit(2, commuting_vertices(&mut r, 2, 2)).unwrap();
    let sp = space(2, 2, 4, None);
    let model = moving_model(0.6, 4);
    let p0 = &assemble_total(&model, &vs, &sp).unwrap().total.components[0];
    let t = transformed_hamiltonian(&model, &vs, &sp).unwrap();
    assert!(t.operator.sub(p0).max_abs_on(&sp.safe_indices(2)) <= 1e-12);
}

#[test]
fn shifted_modes_are_canonical() {
    let mut r = rng(13);
    let vs = VertexSet::explicit(2, commuting_vertices(&mut r, 2, 2)).unwrap();
    let sp = space(2, 2, 4, None);
    let model = moving_model(0.6, 4);
    let modes = shifted_modes(&model, &vs, &sp).unwrap();
    let safe = sp.safe_indices(1);
    let id = OperatorMatrix::identity(sp.dim());
    for (k, ck) in modes.iter().enumerate() {
        for (l, cl) in modes.iter().enumerate() {
            let comm = ck.annihilate.commutator(&cl.create);
            let expected = if k == l { id.clone() } else { id.scale_real(0.0) };
            assert!(comm.sub(&expected).max_abs_on(&safe) <= 1e-12);
            assert!(ck.create.commutator(&cl.create).max_abs_on(&safe) <= 1e-12);
        }
    }
    let free = shifted_modes(&moving_model(0.0, 4), &vs, &sp).unwrap();
    let c1 = sp.lift_boson(&sp.boson().ladder(pointform_core::Ladder::Annihilate, 1).unwrap());
    assert_eq!(free[0].annihilate.max_abs_diff(&c1), 0.0);
}

#[test]
fn massless_boson_is_refused() {
    let m = &exact_configs()[0];
    let sp = m.sector_space(3).unwrap();
    let mut model = m.model_config(0.3, 3);
    model.kappa = 0.0;
    assert!(matches!(
        transformed_hamiltonian(&model, &m.vertices().unwrap(), &sp),
        Err(Error::MasslessMode { mode: 1, .. })
    ));
}

#[test]
fn parity_symmetric_ground_state_is_at_rest() {
    let eta: f64 = 0.4;
    let model = ModelConfig {
        fermion_modes: vec![Kinematics::Velocity([1.0, 0.0, 0.0, 0.0])],
        boson_modes: vec![
            Kinematics::Velocity([eta.cosh(), eta.sinh() * 0.6, 0.0, eta.sinh() * 0.8]),
            Kinematics::Velocity([eta.cosh(), -eta.sinh() * 0.6, 0.0, -eta.sinh() * 0.8]),
        ],
        kappa: 1.0,
        alpha: 0.5,
        mass_scale: 1.0,
        n_max: 12,
    };
    let vs = VertexSet::scalar_y(1, &[c(0.8), c(0.8)], &model.boson_vectors()).unwrap();
    let sp = space(1, 2, 12, None);
    let parts = assemble_total(&model, &vs, &sp).unwrap();
    let s = diagonalize(&parts.total.components[0], 2, Method::Dense).unwrap();
    assert!(s.eigenvalues[1] - s.eigenvalues[0] > 1e-6);
    let psi = &s.eigenvectors.as_ref().unwrap()[0];
    for i in 1..4 {
        assert!(parts.total.components[i].expectation(psi).norm() <= 1e-10);
    }
}
