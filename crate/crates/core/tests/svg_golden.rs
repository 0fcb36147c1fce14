mod common;

use std::path::PathBuf;

use xfer::report::{render_gain_table, render_heatmap, render_kde, render_scree, ColorScale, LabeledMatrix};
use xfer::stats::kde::kde;
use xfer::transfer::gain_matrix;

/// Compares against `tests/golden/<name>`; set `XFER_BLESS=1` to rewrite.
fn check_golden(name: &str, svg: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("XFER_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, svg).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(svg, want, "{name} differs from its golden file");
}

#[test]
fn single_cell_mid_scale() {
    let l = vec!["x".to_string()];
    let v = vec![vec![0.5]];
    let scale = ColorScale { min: 0.0, max: 1.0, low: (0, 0, 0), high: (255, 255, 255), mid: None };
    let svg = render_heatmap(&LabeledMatrix { row_labels: &l, col_labels: &l, values: &v }, &scale, false).unwrap();
    assert!(svg.contains("fill=\"#808080\""));
    check_golden("single_cell.svg", &svg);
}

#[test]
fn symmetric_similarity() {
    let l: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let v = vec![vec![1.0, 0.3, -0.2], vec![0.3, 1.0, 0.6], vec![-0.2, 0.6, 1.0]];
    let svg = render_heatmap(&LabeledMatrix { row_labels: &l, col_labels: &l, values: &v }, &ColorScale::diverging(1.0), false).unwrap();
    // cell (i, j) and (j, i) share a color
    let fills: Vec<&str> = svg.lines().filter(|l| l.starts_with("<rect x=")).map(|l| l.rsplit("fill=").next().unwrap()).collect();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(fills[i * 3 + j], fills[j * 3 + i]);
        }
    }
    check_golden("symmetric.svg", &svg);
}

#[test]
fn reference_gain_table() {
    let g = gain_matrix(&common::reference_matrix()).unwrap();
    let rows: Vec<Vec<f64>> = g.values.chunks(g.col_labels.len()).map(<[f64]>::to_vec).collect();
    let svg = render_gain_table(&LabeledMatrix { row_labels: &g.row_labels, col_labels: &g.col_labels, values: &rows }).unwrap();
    assert!(svg.contains(">9.40<"));
    assert_eq!(svg, render_gain_table(&LabeledMatrix { row_labels: &g.row_labels, col_labels: &g.col_labels, values: &rows }).unwrap());
    check_golden("reference_gains.svg", &svg);
}

#[test]
fn scree_and_kde_are_stable() {
    let a = render_scree(&[0.4, 0.2, 0.1]).unwrap();
    assert_eq!(a, render_scree(&[0.4, 0.2, 0.1]).unwrap());
    let c = kde(&[1.0, 2.0, 2.0, 5.0], None).unwrap();
    let k = render_kde(&[("toy".into(), c.clone())], "tokens").unwrap();
    assert_eq!(k, render_kde(&[("toy".into(), c)], "tokens").unwrap());
    assert!(render_scree(&[]).is_err());
}
