use multipartite_concurrence::bounds::Providers;
use multipartite_concurrence::example::{sweep_to_file, CSV_HEADER};
use multipartite_concurrence::io::{read_state, state_to_json, State};
use multipartite_concurrence::random::{random_mixed, random_pure};
use multipartite_concurrence::{Error, SystemShape};

#[test]
fn states_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let shape = SystemShape::new(vec![2, 3]).unwrap();
    let states = [
        State::Pure(random_pure(&shape, 5)),
        State::Mixed(random_mixed(&shape, 2, 6)),
    ];
    for (i, s) in states.iter().enumerate() {
        let path = dir.path().join(format!("s{i}.json"));
        std::fs::write(&path, state_to_json(s)).unwrap();
        let back = read_state(&path).unwrap();
        assert_eq!(back.density().matrix(), s.density().matrix());
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = read_state(&dir.path().join("absent.json")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.is_input_error());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let points = sweep_to_file(0.0, 1.0, 21, &Providers::best(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 22);
    let cols: Vec<f64> = lines[21].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(cols[0], 1.0);
    assert_eq!(cols[6], points[20].bound_sq_paper);
    assert!((cols[7] - 1.75).abs() < 1e-9);
}
