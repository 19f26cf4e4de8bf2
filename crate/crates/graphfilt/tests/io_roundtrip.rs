use nalgebra::DMatrix;

use graphfilt::io;
use graphfilt::HarnessError;
use graphfilt_core::graph::gen_knn_sensor;

#[test]
fn edge_list_and_coordinates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_knn_sensor(12, 3, 4).unwrap();
    let edges = dir.path().join("edges.csv");
    io::write_edge_list(&edges, &g).unwrap();
    let back = io::read_edge_list(&edges).unwrap();
    assert_eq!(back.n_nodes(), 12);
    assert!((back.adjacency() - g.adjacency()).amax() < 1e-12);

    let coords = dir.path().join("coords.csv");
    let pts = g.coordinates().unwrap().to_vec();
    io::write_coordinates(&coords, &pts).unwrap();
    assert_eq!(io::read_coordinates(&coords).unwrap(), pts);
}

#[test]
fn cluster_matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clusters_10.csv");
    let e = DMatrix::from_row_slice(3, 3, &[1, 1, 0, 1, 1, 0, 0, 0, 1]);
    io::write_cluster_csv(&path, &e).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "1,1,0\n1,1,0\n0,0,1\n");
    assert_eq!(io::read_cluster_csv(&path).unwrap(), e);
    std::fs::write(&path, "1,2\n0,1\n").unwrap();
    assert!(io::read_cluster_csv(&path).is_err());
}

#[test]
fn matrix_csv_round_trip_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let rows = vec![vec![1.5, -2.0, 1e-9], vec![0.0, 3.25, 7.0]];
    io::write_matrix_csv(&path, &rows).unwrap();
    assert_eq!(io::read_matrix_csv(&path).unwrap(), rows);
    std::fs::write(&path, "a,b\n1,2\n3,4\n").unwrap();
    assert_eq!(io::read_matrix_csv(&path).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
}

#[test]
fn missing_value_names_its_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.csv");
    std::fs::write(&path, "1,2,3\n4,,6\n").unwrap();
    match io::read_matrix_csv(&path) {
        Err(HarnessError::Format { reason, .. }) => {
            assert!(reason.contains("row 2") && reason.contains("column 2"), "{reason}");
        }
        other => panic!("expected a format error, got {other:?}"),
    }
    std::fs::write(&path, "1,2\nNaN,3\n").unwrap();
    assert!(io::read_matrix_csv(&path).is_err());
}

#[test]
fn msd_and_theory_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("msd.csv");
    io::write_msd_csv(&path, &[1.0, 0.1], Some(&[1.0, 0.01])).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,msd,msd_db,theory,theory_db"));
    assert_eq!(lines.next(), Some("0,1,0,1,0"));
    assert_eq!(lines.next(), Some("1,0.1,-10,0.01,-20"));

    let path = dir.path().join("theory.csv");
    io::write_theory_csv(&path, &[0.01]).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "i,zeta,zeta_db\n0,0.01,-20\n");
}

#[test]
fn trace_rows_are_one_based() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace_node3.csv");
    io::write_trace_csv(&path, 2, 2, &[0.0, 0.0, 0.5, 0.25]).unwrap();
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "i,k,h1,h2\n0,3,0,0\n1,3,0.5,0.25\n"
    );
}
