//! Graph-filter coefficient models and the direct filtering oracle.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Filter coefficients, either shared by every node or one vector per node.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterModel {
    /// `h°` with `h°[m]` weighting `S^m x(i−m)`.
    NodeInvariant(Vec<f64>),
    /// Row-major `N×M` bank; row `k` is `h°_k`.
    NodeVarying { order: usize, bank: Vec<f64> },
}

impl FilterModel {
    pub fn node_varying(order: usize, bank: Vec<f64>) -> Result<Self> {
        if order == 0 || bank.len() % order != 0 {
            return Err(Error::Dimension {
                what: "node-varying bank length must be a multiple of the order",
                expected: order,
                got: bank.len(),
            });
        }
        Ok(FilterModel::NodeVarying { order, bank })
    }

    /// Node-varying bank built from per-node cluster labels.
    pub fn from_clusters(labels: &[usize], cluster_coefficients: &[Vec<f64>]) -> Result<Self> {
        let order = cluster_coefficients.first().map_or(0, Vec::len);
        let mut bank = Vec::with_capacity(labels.len() * order);
        for &q in labels {
            let h = cluster_coefficients.get(q).ok_or(Error::Dimension {
                what: "cluster label out of range",
                expected: cluster_coefficients.len(),
                got: q,
            })?;
            if h.len() != order {
                return Err(Error::Dimension {
                    what: "cluster coefficient length",
                    expected: order,
                    got: h.len(),
                });
            }
            bank.extend_from_slice(h);
        }
        Self::node_varying(order, bank)
    }

    pub fn order(&self) -> usize {
        match self {
            FilterModel::NodeInvariant(h) => h.len(),
            FilterModel::NodeVarying { order, .. } => *order,
        }
    }

    /// Coefficients used at node `k`.
    pub fn coefficients(&self, k: usize) -> &[f64] {
        match self {
            FilterModel::NodeInvariant(h) => h,
            FilterModel::NodeVarying { order, bank } => &bank[k * order..(k + 1) * order],
        }
    }

    /// Flat `N×M` bank; node-invariant models are broadcast.
    pub fn bank(&self, n: usize) -> Vec<f64> {
        match self {
            FilterModel::NodeInvariant(h) => {
                let mut out = Vec::with_capacity(n * h.len());
                for _ in 0..n {
                    out.extend_from_slice(h);
                }
                out
            }
            FilterModel::NodeVarying { bank, .. } => bank.clone(),
        }
    }

    pub fn check_nodes(&self, n: usize) -> Result<()> {
        if let FilterModel::NodeVarying { order, bank } = self {
            if bank.len() != n * order {
                return Err(Error::Dimension {
                    what: "node-varying bank rows",
                    expected: n,
                    got: bank.len() / order,
                });
            }
        }
        Ok(())
    }

    /// Noise-free output `Σ_m diag(h^{(m)}) S^m x(i−m)`, where `history[m]`
    /// holds `x(i−m)`.
    ///
    /// `S^m x(i−m)` is computed by `m` successive products, independently
    /// of the regressor machinery; this is the reference the streaming code
    /// is checked against.
    pub fn apply(&self, s: &DMatrix<f64>, history: &[DVector<f64>]) -> Result<DVector<f64>> {
        let order = self.order();
        if history.len() < order {
            return Err(Error::Dimension {
                what: "history shorter than filter order",
                expected: order,
                got: history.len(),
            });
        }
        let n = s.nrows();
        self.check_nodes(n)?;
        let mut y = DVector::zeros(n);
        for (m, x) in history.iter().take(order).enumerate() {
            let mut shifted = x.clone();
            for _ in 0..m {
                shifted = s * shifted;
            }
            for k in 0..n {
                y[k] += self.coefficients(k)[m] * shifted[k];
            }
        }
        Ok(y)
    }
}

/// Node-invariant oracle, `Σ_m h_m S^m x(i−m)`.
pub fn apply_node_invariant(
    h: &[f64],
    s: &DMatrix<f64>,
    history: &[DVector<f64>],
) -> Result<DVector<f64>> {
    FilterModel::NodeInvariant(h.to_vec()).apply(s, history)
}

/// Node-varying oracle with an `N×M` row-major bank.
pub fn apply_node_varying(
    bank: &[f64],
    order: usize,
    s: &DMatrix<f64>,
    history: &[DVector<f64>],
) -> Result<DVector<f64>> {
    FilterModel::node_varying(order, bank.to_vec())?.apply(s, history)
}

/// Shifted-history helper: `history` of `order` zero vectors.
pub fn zero_history(n: usize, order: usize) -> Vec<DVector<f64>> {
    vec![DVector::zeros(n); order]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    }

    #[test]
    fn order_one_unit_filter_is_identity() {
        let x = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let y = apply_node_invariant(&[1.0], &path3(), &[x.clone()]).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn one_shift_of_delayed_impulse() {
        let history = [DVector::zeros(3), DVector::from_vec(vec![1.0, 0.0, 0.0])];
        let y = apply_node_invariant(&[0.0, 1.0], &path3(), &history).unwrap();
        assert_eq!(y, DVector::from_vec(vec![0.0, 1.0, 0.0]));
    }

    #[test]
    fn equal_rows_match_node_invariant() {
        let h = [0.3, -0.2, 0.7];
        let bank: Vec<f64> = (0..3).flat_map(|_| h).collect();
        let history: Vec<DVector<f64>> = (0..3)
            .map(|m| DVector::from_fn(3, |k, _| (k as f64 + 1.0) * (m as f64 - 0.5)))
            .collect();
        let a = apply_node_invariant(&h, &path3(), &history).unwrap();
        let b = apply_node_varying(&bank, 3, &path3(), &history).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_history_is_an_error() {
        assert!(apply_node_invariant(&[1.0, 1.0], &path3(), &[DVector::zeros(3)]).is_err());
    }

    #[test]
    fn cluster_bank_layout() {
        let f = FilterModel::from_clusters(&[0, 1, 0], &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(f.coefficients(1), &[3.0, 4.0]);
        assert_eq!(f.bank(3), vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.0]);
        assert!(FilterModel::from_clusters(&[2], &[vec![1.0]]).is_err());
    }
}
