use std::fs;

use fraudbench::csvio::{read_header, schema_from_header};
use fraudbench::{load_csv, write_csv, Error, Schema};
use fraudbench_core::data::{kaggle_feature_names, synth_generate};
use tempfile::tempdir;

fn kaggle_header() -> String {
    let mut h = kaggle_feature_names().join(",");
    h.push_str(",Class");
    h
}

fn kaggle_row(seed: f64, label: &str) -> String {
    let mut cells: Vec<String> = (0..30).map(|j| format!("{}", seed * 0.1 + j as f64 * 1.25e-3)).collect();
    cells.push(label.into());
    cells.join(",")
}

#[test]
fn two_row_file_is_read_bit_exactly() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let first: Vec<String> = (0..30).map(|j| format!("{}", 0.1 * j as f64 - 1.0 / 3.0)).collect();
    let second: Vec<String> = (0..30).map(|j| format!("{:e}", 1e-300 * (j + 1) as f64)).collect();
    fs::write(
        &path,
        format!("{}\n{},0\n{},1\n", kaggle_header(), first.join(","), second.join(",")),
    )
    .unwrap();
    let data = load_csv(&path, &Schema::kaggle()).unwrap();
    assert_eq!(data.n_rows(), 2);
    assert_eq!(data.n_cols(), 30);
    assert_eq!(data.labels(), &[0, 1]);
    for j in 0..30 {
        assert_eq!(data.row(0)[j].to_bits(), first[j].parse::<f64>().unwrap().to_bits());
        assert_eq!(data.row(1)[j].to_bits(), second[j].parse::<f64>().unwrap().to_bits());
    }
}

#[test]
fn bad_label_names_its_row() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let mut text = kaggle_header() + "\n";
    for i in 1..=9 {
        text += &kaggle_row(i as f64, if i == 7 { "2" } else { "0" });
        text += "\n";
    }
    fs::write(&path, text).unwrap();
    match load_csv(&path, &Schema::kaggle()) {
        Err(Error::Cell { row, column, .. }) => {
            assert_eq!(row, 7);
            assert_eq!(column, "Class");
        }
        other => panic!("expected a cell error, got {other:?}"),
    }
    let msg = load_csv(&path, &Schema::kaggle()).unwrap_err().to_string();
    assert!(msg.contains("row 7"), "{msg}");
}

#[test]
fn non_numeric_cell_names_row_and_column() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("nan.csv");
    let mut bad = kaggle_row(2.0, "1");
    bad = bad.replacen("0.2", "abc", 1);
    fs::write(&path, format!("{}\n{}\n{}\n", kaggle_header(), kaggle_row(1.0, "0"), bad)).unwrap();
    match load_csv(&path, &Schema::kaggle()).unwrap_err() {
        Error::Cell { row, column, .. } => {
            assert_eq!(row, 2);
            assert_eq!(column, "Time");
        }
        e => panic!("{e:?}"),
    }
}

#[test]
fn header_mismatch_and_missing_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("h.csv");
    fs::write(&path, "a,b,Class\n1,2,0\n").unwrap();
    assert!(matches!(load_csv(&path, &Schema::kaggle()), Err(Error::Header { .. })));
    let missing = dir.path().join("nope.csv");
    let err = load_csv(&missing, &Schema::kaggle()).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("nope.csv"));
}

#[test]
fn write_then_load_round_trips() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("synth.csv");
    let data = synth_generate(50, 7, 2.0, 30, 4).unwrap();
    write_csv(&path, &data).unwrap();
    assert_eq!(load_csv(&path, &Schema::kaggle()).unwrap(), data);

    let small = synth_generate(20, 5, 1.0, 3, 4).unwrap();
    let path = dir.path().join("small.csv");
    write_csv(&path, &small).unwrap();
    let schema = schema_from_header(read_header(&path).unwrap());
    assert_eq!(schema, Schema::labelled(vec!["V1".into(), "V2".into(), "V3".into()]));
    assert_eq!(load_csv(&path, &schema).unwrap(), small);

    let unlabelled = Schema::unlabelled(vec!["V1".into(), "V2".into(), "V3".into()]);
    assert!(matches!(load_csv(&path, &unlabelled), Err(Error::Header { .. })));
}
