use crate::error::{Error, Result};

/// Two-sample Kolmogorov–Smirnov statistic: the largest gap between the
/// empirical CDFs of `a` and `b`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("ks_distance needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Numeric("ks_distance samples contain NaN".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());

    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i].min(ys[j]);
        while i < n && xs[i] <= x {
            i += 1;
        }
        while j < m && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical() {
        assert_eq!(ks_distance(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn disjoint() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[10.0, 11.0]).unwrap(), 1.0);
        assert_eq!(ks_distance(&[10.0, 11.0], &[1.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn shifted_by_one() {
        // F_a - F_b at 1, 2, 3 is 1/3 each
        assert!((ks_distance(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_side() {
        assert!(ks_distance(&[], &[1.0]).is_err());
        assert!(ks_distance(&[1.0], &[]).is_err());
    }
}
