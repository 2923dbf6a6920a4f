//! Regression quality measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r2: f64,
    pub spearman: f64,
    pub rmse: f64,
}

fn check(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::Contract(format!(
            "{} predictions for {} targets",
            pred.len(),
            truth.len()
        )));
    }
    if pred.len() < 2 {
        return Err(Error::UndefinedMetric("need at least two points".into()));
    }
    if pred.iter().chain(truth).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric input".into()));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let mse = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Coefficient of determination, `1 - SS_res / SS_tot`.
pub fn r2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let m = mean(truth);
    let ss_tot: f64 = truth.iter().map(|t| (t - m).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric("R² of a constant target".into()));
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|a, b| xs[*a].total_cmp(&xs[*b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in &order[i..=j] {
            ranks[*k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    pearson(&average_ranks(pred), &average_ranks(truth))
        .ok_or_else(|| Error::UndefinedMetric("rank correlation with a constant series".into()))
}

pub fn metrics(pred: &[f64], truth: &[f64]) -> Result<Metrics> {
    Ok(Metrics {
        r2: r2(pred, truth)?,
        spearman: spearman(pred, truth)?,
        rmse: rmse(pred, truth)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        let t = [1.0, 3.0, 2.0, 5.0];
        let m = metrics(&t, &t).unwrap();
        assert_eq!((m.r2, m.spearman, m.rmse), (1.0, 1.0, 0.0));
    }

    #[test]
    fn shifted_prediction_keeps_ranks() {
        let t = [1.0, 3.0, 2.0, 5.0];
        let p: Vec<f64> = t.iter().map(|v| v + 0.5).collect();
        let m = metrics(&p, &t).unwrap();
        assert!(m.r2 < 1.0);
        assert_eq!(m.spearman, 1.0);
        assert!((m.rmse - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reversed_order_is_perfect_anti_ranking() {
        let t = [1.0, 2.0, 4.0, 8.0, 9.0];
        let p = [9.0, 8.0, 4.0, 2.0, 1.0];
        assert!((spearman(&p, &t).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ties_use_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
        // Hand-computed: ranks (1.5, 1.5, 3, 4) vs (1, 2, 3, 4) → ρ = 0.9486832980505138.
        let rho = spearman(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((rho - 0.948_683_298_050_513_8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_undefined() {
        assert!(matches!(r2(&[1.0, 2.0], &[3.0, 3.0]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(spearman(&[1.0, 1.0], &[3.0, 4.0]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(rmse(&[1.0], &[1.0]), Err(Error::UndefinedMetric(_))));
        assert!(rmse(&[1.0, 2.0], &[1.0]).is_err());
    }
}
