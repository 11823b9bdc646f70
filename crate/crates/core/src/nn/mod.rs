//! Dense feed-forward networks with exact reverse-mode gradients and Adam.

mod activation;
mod adam;
mod network;

pub use activation::{ActivationKind, DEFAULT_LEAKY_SLOPE, RICKER_SCALE};
pub use adam::{AdamState, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON};
pub use network::{DenseNetwork, Gradients, NetworkDocument, Tape, NETWORK_FORMAT_VERSION};
