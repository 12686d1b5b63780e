mod common;

use std::fs;

use armwing::io::{
    mechanism_to_string, parse_mechanism_file, parse_mechanism_str, parse_trajectory_csv, read_trajectory_csv,
    rows_csv_string, targets_csv_string, targets_from_rows, trajectory_csv_string, write_mechanism_file,
    write_trajectory_csv, IoError,
};
use armwing::{sample_targets, validate_mechanism, Branch, FourBar, LinkageSpec, SweepMode};
use common::{data, reference};

#[test]
fn bundled_files_parse() {
    assert_eq!(parse_mechanism_file(data("fourbar_demo.json")).unwrap().links.len(), 4);
    assert!(validate_mechanism(parse_mechanism_file(data("reference_armwing.json")).unwrap()).is_ok());
}

#[test]
fn mechanism_round_trip_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fourbar_demo.json", "reference_armwing.json"] {
        let spec = parse_mechanism_file(data(name)).unwrap();
        let first = dir.path().join("first.json");
        write_mechanism_file(&spec, &first).unwrap();
        let again = parse_mechanism_file(&first).unwrap();
        assert_eq!(again, spec);
        assert_eq!(mechanism_to_string(&again), fs::read_to_string(&first).unwrap());
    }
}

#[test]
fn schema_errors_name_the_field() {
    let text = fs::read_to_string(data("fourbar_demo.json")).unwrap();
    let negative = text.replacen("\"length\": 10.0", "\"length\": -10.0", 1);
    match parse_mechanism_str(&negative) {
        Err(IoError::Schema { path, .. }) => assert_eq!(path, "links[1].length"),
        other => panic!("{other:?}"),
    }
    let typo = text.replacen("\"length\": 10.0", "\"lenght\": 10.0", 1);
    match parse_mechanism_str(&typo) {
        Err(IoError::Schema { path, .. }) => assert!(path.starts_with("links[1]"), "{path}"),
        other => panic!("{other:?}"),
    }
    let version = text.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
    assert!(matches!(parse_mechanism_str(&version), Err(IoError::Version { .. })));
    match parse_mechanism_str("{\n  \"name\": \"x\",,\n}") {
        Err(IoError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn small_parallelogram_csv() {
    // Offset by 45 deg so none of the four samples sits on a dead centre, where
    // the parallelogram and its crossed twin meet.
    let fb = FourBar::new(10.0, 4.0, 10.0, 4.0);
    let mut spec = LinkageSpec::four_bar(&fb.with_branch(Branch::Crossed));
    spec.driver.as_mut().unwrap().offset_deg = 45.0;
    let mech = validate_mechanism(spec).unwrap();
    let traj = mech.sweep(4, SweepMode::Continuation).unwrap();
    let csv = trajectory_csv_string(&traj).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn reference_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let traj = reference().sweep(360, SweepMode::Continuation).unwrap();
    let path = dir.path().join("traj.csv");
    write_trajectory_csv(&traj, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 361);
    let rows = read_trajectory_csv(&path).unwrap();
    for (k, row) in rows.iter().enumerate() {
        assert!((row[0] - k as f64).abs() < 1e-9);
    }
    let shoulder = traj.shoulder().unwrap();
    for (row, s) in rows.iter().zip(&shoulder) {
        assert!((row[1] - s.to_degrees()).abs() <= 1e-9);
    }
    assert_eq!(rows_csv_string(&rows), text);
}

#[test]
fn target_csv_round_trip() {
    let targets = sample_targets(72).unwrap();
    let text = targets_csv_string(&targets).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with("NaN,NaN,NaN,NaN"));
    let back = targets_from_rows(&parse_trajectory_csv(&text).unwrap()).unwrap();
    assert_eq!(back.phases, targets.phases);
    for (a, b) in back.shoulder_deg.iter().zip(&targets.shoulder_deg) {
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn csv_errors() {
    let header = "phi_deg,theta_s_deg,theta_e_deg,elbow_x_mm,elbow_y_mm,tip_x_mm,tip_y_mm\n";
    assert!(matches!(parse_trajectory_csv("a,b\n"), Err(IoError::Csv { line: 1, .. })));
    assert!(matches!(parse_trajectory_csv(header), Err(IoError::EmptyTrajectory)));
    let short = format!("{header}0,1,2\n");
    assert!(matches!(parse_trajectory_csv(&short), Err(IoError::Csv { line: 2, .. })));
    let backwards = format!("{header}1,0,0,0,0,0,0\n0,0,0,0,0,0,0\n");
    assert!(matches!(parse_trajectory_csv(&backwards), Err(IoError::Csv { line: 3, .. })));
    let uneven = format!("{header}0,0,0,0,0,0,0\n100,0,0,0,0,0,0\n");
    assert!(targets_from_rows(&parse_trajectory_csv(&uneven).unwrap()).is_err());
}
