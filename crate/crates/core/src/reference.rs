//! Published reference values for the rate-1/2 NR polar parity-check
//! matrices and the decoder latency bound, kept here so reports can show
//! deltas against them.

use crate::pmult::GateCostReport;

/// Published gate-cost summary for one block length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateCostReference {
    pub n: u32,
    pub and_gates: usize,
    /// Percent, two decimals as published.
    pub sparsity_percent: f64,
    pub max_row_weight: usize,
    pub xor_gates: usize,
    pub steps: usize,
}

/// Summary for `H_N`, N = 32 … 1024.
pub const GATE_COSTS: [GateCostReference; 6] = [
    GateCostReference { n: 5, and_gates: 136, sparsity_percent: 26.56, max_row_weight: 16, xor_gates: 49, steps: 5 },
    GateCostReference { n: 6, and_gates: 322, sparsity_percent: 15.72, max_row_weight: 22, xor_gates: 106, steps: 6 },
    GateCostReference { n: 7, and_gates: 984, sparsity_percent: 12.01, max_row_weight: 44, xor_gates: 247, steps: 7 },
    GateCostReference { n: 8, and_gates: 2890, sparsity_percent: 8.82, max_row_weight: 78, xor_gates: 562, steps: 8 },
    GateCostReference { n: 9, and_gates: 8322, sparsity_percent: 6.35, max_row_weight: 158, xor_gates: 1247, steps: 9 },
    GateCostReference { n: 10, and_gates: 24828, sparsity_percent: 4.74, max_row_weight: 304, xor_gates: 2758, steps: 10 },
];

/// Published decode latency `2n + 2S + 4` at S = 8, n = 5 … 10.
pub const LATENCY_S8: [u64; 6] = [30, 32, 34, 36, 38, 40];

pub fn gate_cost_reference(n: u32) -> Option<&'static GateCostReference> {
    GATE_COSTS.iter().find(|r| r.n == n)
}

/// Per-cell difference `ours − published`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateCostDelta {
    pub and_gates: i64,
    pub sparsity_percent: f64,
    pub max_row_weight: i64,
    pub xor_gates: i64,
    pub steps: i64,
}

impl GateCostDelta {
    /// Zero in every cell, sparsity compared at the published two decimals.
    pub fn is_zero(&self) -> bool {
        self.and_gates == 0
            && self.max_row_weight == 0
            && self.xor_gates == 0
            && self.steps == 0
            && self.sparsity_percent.abs() < 0.005
    }
}

pub fn gate_cost_delta(ours: &GateCostReport, reference: &GateCostReference) -> GateCostDelta {
    let diff = |a: usize, b: usize| a as i64 - b as i64;
    GateCostDelta {
        and_gates: diff(ours.and_gates, reference.and_gates),
        sparsity_percent: 100.0 * ours.sparsity - reference.sparsity_percent,
        max_row_weight: diff(ours.max_row_weight, reference.max_row_weight),
        xor_gates: diff(ours.xor_gates, reference.xor_gates),
        steps: diff(ours.parallel_steps, reference.steps),
    }
}
