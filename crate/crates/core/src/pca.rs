//! Latent-trait discovery on the performance matrix.
//!
//! Columns are z-scored with the population standard deviation so every task
//! weighs the same regardless of its accuracy range. The normalized matrix is
//! then factorized into task loadings (`components`) and per-variant weights
//! (`projections`).
//!
//! Sign convention: each component is flipped so that its largest-magnitude
//! loading is positive, ties going to the lowest column index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::matrix::PerformanceMatrix;
use crate::linalg::{right_svd, DEFAULT_MAX_SWEEPS, DEFAULT_TOLERANCE};

pub const DEFAULT_COMPONENTS: usize = 4;
pub const DEFAULT_GROUP_THRESHOLD: f64 = 0.25;

/// Column std at or below this fraction of the column's magnitude counts as zero.
const ZERO_VARIANCE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major `rows × cols`.
    pub values: Vec<f64>,
    pub col_means: Vec<f64>,
    pub col_stds: Vec<f64>,
    pub zero_variance: Vec<bool>,
}

impl NormalizedMatrix {
    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }
}

pub fn zscore_columns(matrix: &PerformanceMatrix) -> Result<NormalizedMatrix> {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    if rows < 2 {
        return Err(Error::InsufficientRows { rows });
    }
    let n = rows as f64;
    let mut values = vec![0.0; rows * cols];
    let mut col_means = Vec::with_capacity(cols);
    let mut col_stds = Vec::with_capacity(cols);
    let mut zero_variance = Vec::with_capacity(cols);

    for j in 0..cols {
        let col = matrix.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        let scale = col.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let degenerate = std <= ZERO_VARIANCE_RTOL * scale;
        if !degenerate {
            for (i, x) in col.iter().enumerate() {
                values[i * cols + j] = (x - mean) / std;
            }
        }
        col_means.push(mean);
        col_stds.push(std);
        zero_variance.push(degenerate);
    }

    Ok(NormalizedMatrix {
        row_labels: matrix.row_labels().to_vec(),
        col_labels: matrix.col_labels().to_vec(),
        values,
        col_means,
        col_stds,
        zero_variance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `k × cols` orthonormal loading vectors.
    pub components: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// `rows × k` coordinates of each model variant.
    pub projections: Vec<Vec<f64>>,
    pub zero_variance: Vec<bool>,
}

impl PcaResult {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn cumulative_explained_variance(&self) -> f64 {
        self.explained_variance_ratio.iter().sum()
    }

    /// Flips component `component` (and its projections) so that `task` loads
    /// non-negatively. Use this to align a component with a reading where a
    /// named task defines the positive pole.
    pub fn orient_toward(&mut self, component: usize, task: &str) -> Result<()> {
        let col = self
            .col_labels
            .iter()
            .position(|c| c == task)
            .ok_or_else(|| Error::Lookup(format!("unknown task {task:?}")))?;
        let comp = self
            .components
            .get_mut(component)
            .ok_or_else(|| Error::Argument(format!("component {component} out of range")))?;
        if comp[col] < 0.0 {
            comp.iter_mut().for_each(|x| *x = -*x);
            self.projections.iter_mut().for_each(|row| row[component] = -row[component]);
        }
        Ok(())
    }

    /// Rebuilds the normalized matrix from the retained components.
    pub fn reconstruct(&self) -> Vec<f64> {
        let cols = self.col_labels.len();
        let mut out = vec![0.0; self.row_labels.len() * cols];
        for (i, proj) in self.projections.iter().enumerate() {
            for (w, comp) in proj.iter().zip(&self.components) {
                for (j, c) in comp.iter().enumerate() {
                    out[i * cols + j] += w * c;
                }
            }
        }
        out
    }
}

/// Largest rank a `rows × cols` centered matrix can have.
pub fn max_components(rows: usize, cols: usize) -> usize {
    rows.saturating_sub(1).min(cols)
}

pub fn pca(norm: &NormalizedMatrix, k: usize) -> Result<PcaResult> {
    let (rows, cols) = (norm.rows(), norm.cols());
    if rows < 2 {
        return Err(Error::InsufficientRows { rows });
    }
    let bound = max_components(rows, cols);
    if k == 0 || k > bound {
        return Err(Error::Argument(format!(
            "components must be in 1..={bound} for a {rows}x{cols} matrix, got {k}"
        )));
    }

    let svd = right_svd(&norm.values, rows, cols, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS)?;
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    if total <= 0.0 {
        return Err(Error::Numeric(
            "normalized matrix has no variance (every column is constant)".into(),
        ));
    }

    let mut components: Vec<Vec<f64>> = svd.vectors.into_iter().take(k).collect();
    for c in &mut components {
        apply_sign_convention(c);
    }
    let singular_values: Vec<f64> = svd.singular_values[..k].to_vec();
    let explained_variance_ratio = singular_values.iter().map(|s| s * s / total).collect();

    let projections = (0..rows)
        .map(|i| {
            components
                .iter()
                .map(|c| (0..cols).map(|j| norm.get(i, j) * c[j]).sum())
                .collect()
        })
        .collect();

    Ok(PcaResult {
        row_labels: norm.row_labels.clone(),
        col_labels: norm.col_labels.clone(),
        components,
        singular_values,
        explained_variance_ratio,
        projections,
        zero_variance: norm.zero_variance.clone(),
    })
}

/// Flips `v` so its largest-magnitude entry is positive. Returns whether it flipped.
pub fn apply_sign_convention(v: &mut [f64]) -> bool {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskLoading {
    pub task: String,
    pub loading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelWeight {
    pub model: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trait {
    pub component: usize,
    /// User-assigned interpretation; never inferred.
    pub name: Option<String>,
    pub explained_variance_ratio: f64,
    /// Sorted by loading, descending; ties keep column order.
    pub loadings: Vec<TaskLoading>,
    /// Tasks at or above `threshold × max positive loading`, in column order.
    pub group: Vec<String>,
    pub weights: Vec<ModelWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitReport {
    pub threshold: f64,
    pub traits: Vec<Trait>,
}

impl TraitReport {
    /// Attaches names to traits in component order.
    pub fn with_names<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        for (t, n) in self.traits.iter_mut().zip(names) {
            t.name = Some(n.as_ref().to_string());
        }
        self
    }
}

pub fn label_components(res: &PcaResult, threshold: f64) -> Result<TraitReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Argument(format!("threshold {threshold} must lie in (0, 1)")));
    }
    let traits = res
        .components
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let mut loadings: Vec<TaskLoading> = res
                .col_labels
                .iter()
                .zip(comp)
                .map(|(task, &loading)| TaskLoading {
                    task: task.clone(),
                    loading,
                })
                .collect();
            loadings.sort_by(|a, b| b.loading.total_cmp(&a.loading));

            let max_pos = comp
                .iter()
                .zip(&res.zero_variance)
                .filter(|(_, zv)| !**zv)
                .map(|(x, _)| *x)
                .fold(0.0_f64, f64::max);
            let group = if max_pos > 0.0 {
                res.col_labels
                    .iter()
                    .zip(comp)
                    .zip(&res.zero_variance)
                    .filter(|((_, &x), zv)| !**zv && x > 0.0 && x >= threshold * max_pos)
                    .map(|((t, _), _)| t.clone())
                    .collect()
            } else {
                Vec::new()
            };

            let weights = res
                .row_labels
                .iter()
                .zip(&res.projections)
                .map(|(model, p)| ModelWeight {
                    model: model.clone(),
                    weight: p[c],
                })
                .collect();

            Trait {
                component: c,
                name: None,
                explained_variance_ratio: res.explained_variance_ratio[c],
                loadings,
                group,
                weights,
            }
        })
        .collect();
    Ok(TraitReport { threshold, traits })
}
