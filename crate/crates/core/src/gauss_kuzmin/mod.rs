//! Cylinder-set measures with rigorous truncation brackets, brackets on the
//! law of `P_l`, and a numerical iteration of the density recursion for
//! `(T^n alpha, P_n)`.

mod bracket;
mod cylinder;
mod transfer;

pub use bracket::{
    default_positivity_b_max, lambda_positivity_check, pl_distribution_bracket,
    pl_distribution_bracket_with, ElementBracket, Measure, PlBracket, PositivityEntry,
    PositivityReport, PositivityStatus, DEFAULT_BUDGET,
};
pub use cylinder::{cylinder_gauss, cylinder_lambda, Continuants, Cylinder, CylinderBound};
pub use transfer::{
    mixing_constants, mixing_decay_report, transfer_iterate, DecayReport, DecayRow, DensityGrid,
    TransferConfig, TransferOperator, DEFAULT_B_CUT, DEFAULT_GRID_SIZE, MIN_GRID_SIZE,
};
