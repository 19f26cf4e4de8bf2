//! Shifted-signal regressors.
//!
//! Node `k` needs `z_k(i) = col{[x(i)]_k, [S x(i−1)]_k, …, [S^{M−1} x(i−M+1)]_k}`.
//! Each node keeps its previous regressor; one exchange with its one-hop
//! neighbors per step is enough to advance every entry by one shift.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Centralized `Z(i) = [x(i), S x(i−1), …, S^{M−1} x(i−M+1)]`, with
/// `history[m] = x(i−m)`.
pub fn centralized_regressor(
    s: &DMatrix<f64>,
    history: &[DVector<f64>],
    order: usize,
) -> Result<DMatrix<f64>> {
    if history.len() < order {
        return Err(Error::Dimension {
            what: "history shorter than filter order",
            expected: order,
            got: history.len(),
        });
    }
    let n = s.nrows();
    let mut z = DMatrix::zeros(n, order);
    for (m, x) in history.iter().take(order).enumerate() {
        let mut col = x.clone();
        for _ in 0..m {
            col = s * col;
        }
        z.set_column(m, &col);
    }
    Ok(z)
}

/// Per-node regressor state advanced by one-hop exchanges.
#[derive(Debug, Clone)]
pub struct DistributedRegressor {
    order: usize,
    /// Row-major `N×M`; row `k` is `z_k`.
    z: Vec<f64>,
    snapshot: Vec<f64>,
    /// Nonzero `(ℓ, s_{kℓ})` per row of `S`, self included when nonzero.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl DistributedRegressor {
    /// Zero-primed state: `z_k(−1) = 0`.
    pub fn new(s: &DMatrix<f64>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: "filter order must be at least 1".into(),
            });
        }
        let n = s.nrows();
        let neighbors = (0..n)
            .map(|k| {
                (0..n)
                    .filter_map(|l| {
                        let w = s[(k, l)];
                        (w != 0.0).then_some((l, w))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            order,
            z: vec![0.0; n * order],
            snapshot: vec![0.0; n * order],
            neighbors,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.neighbors.len()
    }

    /// Nodes whose retained entries node `k` reads.
    pub fn neighbors_of(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[k].iter().map(|&(l, _)| l)
    }

    /// Advances every node from `z_ℓ(i−1)` to `z_k(i)` with the new sample.
    ///
    /// Reads target a snapshot of the previous step, so the update order
    /// across nodes does not matter.
    pub fn step(&mut self, x_new: &[f64]) {
        let m = self.order;
        debug_assert_eq!(x_new.len(), self.neighbors.len());
        self.snapshot.copy_from_slice(&self.z);
        for (k, nbrs) in self.neighbors.iter().enumerate() {
            let row = &mut self.z[k * m..(k + 1) * m];
            row[0] = x_new[k];
            for entry in 1..m {
                row[entry] = nbrs
                    .iter()
                    .map(|&(l, w)| w * self.snapshot[l * m + entry - 1])
                    .sum();
            }
        }
    }

    /// `z_k(i)`.
    pub fn regressor(&self, k: usize) -> &[f64] {
        &self.z[k * self.order..(k + 1) * self.order]
    }

    /// All regressors, row-major `N×M`.
    pub fn regressors(&self) -> &[f64] {
        &self.z
    }

    pub fn reset(&mut self) {
        self.z.iter_mut().for_each(|v| *v = 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    }

    fn e1() -> DVector<f64> {
        DVector::from_vec(vec![1.0, 0.0, 0.0])
    }

    #[test]
    fn centralized_order_one_and_identity_shift() {
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let z = centralized_regressor(&path3(), &[x.clone()], 1).unwrap();
        assert_eq!(z.column(0), x.column(0));
        let hist = [x.clone(), x.clone() * 2.0, x.clone() * 3.0];
        let z = centralized_regressor(&DMatrix::identity(3, 3), &hist, 3).unwrap();
        for m in 0..3 {
            assert_eq!(z.column(m), hist[m].column(0));
        }
    }

    #[test]
    fn centralized_path3_two_shifts() {
        let hist = [e1(), e1(), e1()];
        let z = centralized_regressor(&path3(), &hist, 3).unwrap();
        let expected =
            DMatrix::from_column_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(z, expected);
        assert!(centralized_regressor(&path3(), &hist[..2], 3).is_err());
    }

    #[test]
    fn distributed_matches_centralized_after_priming() {
        let s = path3() * 0.4;
        let mut reg = DistributedRegressor::new(&s, 3).unwrap();
        let samples: Vec<DVector<f64>> = (0..10)
            .map(|i| DVector::from_fn(3, |k, _| ((i * 3 + k) as f64 * 0.37).sin()))
            .collect();
        for (i, x) in samples.iter().enumerate() {
            reg.step(x.as_slice());
            let mut hist: Vec<DVector<f64>> = (0..3)
                .map(|m| if i >= m { samples[i - m].clone() } else { DVector::zeros(3) })
                .collect();
            hist.truncate(3);
            let z = centralized_regressor(&s, &hist, 3).unwrap();
            for k in 0..3 {
                for m in 0..3 {
                    assert!((reg.regressor(k)[m] - z[(k, m)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn order_one_has_no_communication() {
        let mut reg = DistributedRegressor::new(&path3(), 1).unwrap();
        reg.step(&[4.0, 5.0, 6.0]);
        assert_eq!(reg.regressors(), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn identity_shift_is_a_local_delay_line() {
        let mut reg = DistributedRegressor::new(&DMatrix::identity(2, 2), 3).unwrap();
        reg.step(&[1.0, 10.0]);
        reg.step(&[2.0, 20.0]);
        reg.step(&[3.0, 30.0]);
        assert_eq!(reg.regressor(0), &[3.0, 2.0, 1.0]);
        assert_eq!(reg.regressor(1), &[30.0, 20.0, 10.0]);
        assert_eq!(reg.neighbors_of(0).collect::<Vec<_>>(), vec![0]);
    }
}
