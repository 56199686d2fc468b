//! Step-counted parallel GF(2) matrix-vector multiplication.
//!
//! The circuit is simulated round by round: one AND layer gathers
//! `c_j · h_ij` for every 1-entry of the matrix, then each row folds its
//! products by pairwise XOR until one value remains. An unpaired last element
//! passes unchanged to the next round, so a row of weight `w` needs
//! `⌈log2 w⌉` XOR rounds and the whole product `1 + max_i ⌈log2 w_i⌉` steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// `⌈log2 w⌉` for `w >= 1`.
pub fn ceil_log2(w: usize) -> u32 {
    assert!(w > 0, "log of zero weight");
    usize::BITS - (w - 1).leading_zeros()
}

/// Column indices of the 1-entries of every row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowIndexSets {
    sets: Vec<Vec<usize>>,
    cols: usize,
}

impl RowIndexSets {
    /// Rejects matrices with an all-zero row.
    pub fn new(h: &BitMatrix) -> Result<Self> {
        let sets: Vec<Vec<usize>> = (0..h.rows()).map(|i| h.row_support(i)).collect();
        if let Some(i) = sets.iter().position(Vec::is_empty) {
            return Err(Error::ZeroRow(i));
        }
        if sets.is_empty() {
            return Err(Error::Empty("parity-check matrix has no rows"));
        }
        Ok(Self { sets, cols: h.cols() })
    }

    pub fn rows(&self) -> usize {
        self.sets.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.iter().map(Vec::len)
    }

    /// Total Hamming weight `W_H`.
    pub fn total_weight(&self) -> usize {
        self.weights().sum()
    }

    pub fn max_row_weight(&self) -> usize {
        self.weights().max().unwrap_or(0)
    }

    /// Closed-form circuit cost of [`pmult`] on this matrix.
    pub fn cost_report(&self) -> GateCostReport {
        let depths: Vec<u32> = self.weights().map(ceil_log2).collect();
        GateCostReport {
            and_gates: self.total_weight(),
            xor_gates: depths.iter().map(|&d| d as usize).sum(),
            two_input_xors: self.weights().map(|w| w - 1).sum(),
            parallel_steps: 1 + depths.iter().copied().max().unwrap_or(0) as usize,
            max_row_weight: self.max_row_weight(),
            sparsity: self.total_weight() as f64 / (self.rows() * self.cols) as f64,
        }
    }
}

/// Circuit cost of one parallel multiplication.
///
/// `xor_gates` is the per-row XOR depth summed over rows, `Σ_i ⌈log2 w_i⌉`.
/// A fan-in tree on a row of weight `w` is built from `w − 1` two-input XORs;
/// that total is reported separately as `two_input_xors`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateCostReport {
    pub and_gates: usize,
    pub xor_gates: usize,
    pub two_input_xors: usize,
    pub parallel_steps: usize,
    pub max_row_weight: usize,
    pub sparsity: f64,
}

/// Result of a simulated run, with counters measured while executing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmultOutput {
    pub syndrome: BitVector,
    pub steps: usize,
    pub and_gates: usize,
    /// Number of (row, round) pairs in which the row performed XORs.
    pub xor_gates: usize,
    pub two_input_xors: usize,
}

/// Computes `H · c^T` round by round.
pub fn pmult(rows: &RowIndexSets, c: &BitVector) -> Result<PmultOutput> {
    if c.len() != rows.cols {
        return Err(Error::Dimension(format!(
            "vector of length {} for a matrix with {} columns",
            c.len(),
            rows.cols
        )));
    }

    // Step 1: one AND per 1-entry, all in parallel.
    let mut partial: Vec<Vec<bool>> = rows.sets.iter().map(|set| set.iter().map(|&j| c.get(j)).collect()).collect();
    let mut out = PmultOutput {
        syndrome: BitVector::zeros(rows.rows()),
        steps: 1,
        and_gates: rows.total_weight(),
        xor_gates: 0,
        two_input_xors: 0,
    };

    // Halving rounds until every row holds a single value.
    while partial.iter().any(|r| r.len() > 1) {
        out.steps += 1;
        for r in partial.iter_mut().filter(|r| r.len() > 1) {
            let pairs = r.len() / 2;
            for k in 0..pairs {
                r[k] = r[2 * k] ^ r[2 * k + 1];
            }
            if r.len() % 2 == 1 {
                r[pairs] = r[r.len() - 1];
                r.truncate(pairs + 1);
            } else {
                r.truncate(pairs);
            }
            out.xor_gates += 1;
            out.two_input_xors += pairs;
        }
    }

    for (i, r) in partial.iter().enumerate() {
        out.syndrome.set(i, r[0]);
    }
    Ok(out)
}
