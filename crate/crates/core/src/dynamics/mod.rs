//! Time-domain side: propagation of Cauchy data by matrix exponential
//! or adaptive stepping, energy, modal and cluster expansions of the
//! propagator, and decay-rate fits.

mod decay;
mod expansion;
mod propagate;

pub use decay::{fit_decay_rate, DecayFit};
pub use expansion::{
    cluster_expansion, modal_expansion, zero_mode, ClusterExpansion, ExpansionResult,
};
pub use propagate::{energy, propagate, FieldState, PropagationMethod};
