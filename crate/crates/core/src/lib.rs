//! Computable lower and upper bounds on the quantum discord of qubit-qudit
//! states, together with brute-force measurement oracles to check them against.
//!
//! ```
//! use discord_bounds::{compute_bounds, make_bell_diagonal};
//!
//! let rho = make_bell_diagonal(0.6, -0.4, 0.2).unwrap();
//! let b = compute_bounds(&rho).unwrap();
//! assert!(b.coincide);
//! assert!((b.upper - b.lower).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod correlation;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod qstate;

pub use bounds::{
    accessible_info_bounds, co, compute_bounds, conditional_discord, discord_lower, discord_upper,
    discord_upper_weak, dqc1_bounds, h, x_state_discord, ChannelBounds, DiscordBounds, DqcParams,
    Measurement,
};
pub use correlation::{
    filtered_state, lorentz_spectrum, q_matrix, t1_direction, LorentzSpectrum, MeasurementDirection,
    QMatrix,
};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use oracle::{
    accessible_info_oracle, ensemble_oracle, minimize_povm, minimize_projective, wootters_concurrence,
    Argmin, Objective, OracleResult, Povm,
};
pub use qstate::{
    make_bell_diagonal, make_binary_channel, make_dqc1, make_x_state, random_state, BlochVector,
    DensityMatrix, Subsystem, UnitaryMatrix, XStateParams,
};
