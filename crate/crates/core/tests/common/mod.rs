#![allow(dead_code)]

use std::path::PathBuf;

use xfer::io::matrix::{load_matrix_csv, PerformanceMatrix};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn reference_matrix() -> PerformanceMatrix {
    load_matrix_csv(data("reference_matrix.csv")).unwrap()
}
