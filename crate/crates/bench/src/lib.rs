//! Fixed inputs shared by the benchmarks.

use discord_bounds::qstate::traceless_unitary;
use discord_bounds::{random_state, DensityMatrix, UnitaryMatrix};

/// Seeded two-qubit states of ranks 1 to 4.
pub fn two_qubit_states() -> Vec<DensityMatrix> {
    (1..=4).map(|rank| random_state(2, rank, 0xbe7c_0000 + rank as u64).expect("valid rank")).collect()
}

/// Full-rank qubit-qudit state with `B` of dimension `d`.
pub fn qudit_state(d: usize) -> DensityMatrix {
    random_state(d, 2 * d, 0xbe7c_1000 + d as u64).expect("valid rank")
}

/// Traceless unitary on `n` qubits.
pub fn dqc1_unitary(n: u32) -> UnitaryMatrix {
    traceless_unitary(1 << n, 0xbe7c_2000 + n as u64).expect("even dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(two_qubit_states().len(), 4);
        assert_eq!(qudit_state(3).dim_b(), 3);
        assert!(dqc1_unitary(3).trace().norm() < 1e-12);
    }
}
