//! The exactly solvable string class and its fundamental solutions.

mod fundamental;
mod model;
mod transfer;

pub use fundamental::{
    closed_form_jets, fundamental_jet, fundamental_system, rescale_weyl, unscale_weyl,
    ClosedFormJets, FundamentalSystem,
};
pub use model::{
    validate_model, DiscreteMeasure, ScalingParams, Segment, StateVector, StepFunction,
    StringModel, TailModel,
};
pub use transfer::{
    det, interval_transfer, mass_jump, matmul, propagate_backward, propagate_backward_scaled,
    propagate_forward, Matrix2, Scalar, ScaledState,
};
