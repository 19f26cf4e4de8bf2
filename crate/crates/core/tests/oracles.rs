use approx::assert_relative_eq;
use nalgebra::DMatrix;

use graphfilt_core::adapt::{
    build_combination_matrix, compute_preconditioner, d_matrix, local_covariances,
};
use graphfilt_core::graph::{build_shift, Graph, ShiftKind};
use graphfilt_core::signal::{solve_lyapunov, SignalStatistics};
use graphfilt_core::theory::{
    build_theory_model, mean_stability, steady_state_msd, time_constants, to_db, Stability,
    SteadyStateForm, TheoryInputs, TheoryPreconditioner,
};
use graphfilt_core::signal::NoiseModel;

fn path3() -> Graph {
    Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

#[test]
fn path_preconditioner_by_hand() {
    let s = build_shift(&path3(), ShiftKind::Adjacency).unwrap();
    let p = compute_preconditioner(s.matrix(), 3);
    // S² = [[1,0,1],[0,2,0],[1,0,1]]
    assert_eq!(p.diagonal(0), &[1.0, 1.0, 2.0]);
    assert_eq!(p.diagonal(1), &[1.0, 2.0, 4.0]);
    assert_eq!(p.diagonal(2), &[1.0, 1.0, 2.0]);
    let d = d_matrix(p.as_slice(), 0.0).unwrap();
    assert_eq!(&d[3..6], &[1.0, 0.5, 0.25]);
}

#[test]
fn laplacian_of_a_path() {
    let s = build_shift(&path3(), ShiftKind::Laplacian).unwrap();
    let expect = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
    assert_eq!(s.matrix(), &expect);
    assert_relative_eq!(s.spectral_radius().unwrap(), 3.0, max_relative = 1e-10);
}

#[test]
fn scalar_lyapunov_closed_forms() {
    let r = solve_lyapunov(&DMatrix::from_element(1, 1, 0.9)).unwrap();
    assert_relative_eq!(r[(0, 0)], 1.0 / 0.19, max_relative = 1e-10);
    let r = solve_lyapunov(&DMatrix::from_element(1, 1, 0.5)).unwrap();
    assert_relative_eq!(r[(0, 0)], 4.0 / 3.0, max_relative = 1e-10);
    let r = solve_lyapunov(&DMatrix::zeros(4, 4)).unwrap();
    assert_eq!(r, DMatrix::identity(4, 4));
}

#[test]
fn iid_local_covariance_is_scaled_preconditioner() {
    let s = build_shift(&path3(), ShiftKind::Adjacency).unwrap();
    let rz = local_covariances(s.matrix(), &SignalStatistics::iid(&[2.0; 3]), 3).unwrap();
    assert_eq!(rz[1], DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0, 8.0])));
}

#[test]
fn scalar_steady_state_and_time_constants() {
    let s = DMatrix::zeros(1, 1);
    let tm = build_theory_model(&TheoryInputs {
        shift: &s,
        combination: &DMatrix::identity(1, 1),
        step_sizes: &[0.1],
        preconditioner: TheoryPreconditioner::Identity,
        statistics: &SignalStatistics::iid(&[1.0]),
        noise: &NoiseModel::new(vec![0.1]).unwrap(),
        h_tilde0: &[1.0],
    })
    .unwrap();
    for form in [SteadyStateForm::F, SteadyStateForm::Series, SteadyStateForm::Doubling] {
        assert_relative_eq!(steady_state_msd(&tm, form).unwrap(), 1e-3 / 0.19, max_relative = 1e-10);
    }
    assert_eq!(mean_stability(&tm).unwrap().status, Stability::Stable);
    let tc = time_constants(0.01, &[1.0, 4.0], &[1.0, 0.25]).unwrap();
    assert_relative_eq!(tc[0].0, 50.0);
    assert_relative_eq!(tc[1].0, 12.5);
    assert_relative_eq!(tc[1].1, 50.0);
    assert_relative_eq!(to_db(0.01), -20.0);
}

#[test]
fn uniform_weights_on_a_path() {
    let a = build_combination_matrix(&path3().neighborhoods()).to_matrix();
    assert_relative_eq!(a[(0, 0)], 0.5);
    assert_relative_eq!(a[(1, 0)], 0.5);
    assert_relative_eq!(a[(0, 1)], 1.0 / 3.0);
    assert_eq!(a[(2, 0)], 0.0);
}
