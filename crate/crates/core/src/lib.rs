//! Multi-fidelity data fusion with a generative adversarial surrogate.
//!
//! A generator made of two dense blocks learns the high-fidelity response of
//! a system: the LF block is fitted to plentiful low-fidelity samples and then
//! frozen, and the HF block maps the input concatenated with the LF features to
//! the high-fidelity output. The HF block is trained against a discriminator
//! with supervised refinement steps interleaved into every adversarial
//! iteration.
//!
//! * [`nn`] dense networks, activations, reverse-mode gradients and Adam.
//! * [`model`] the generator/discriminator model and its training schedule.
//! * [`data`] Latin hypercube sampling, normalizers, CSV ingestion and datasets.
//! * [`bench`] benchmark pairs, NRMSE and the experiment runners.
//! * [`cli`] the `gan-mdf` command-line front end.

pub mod bench;
pub mod cli;
pub mod data;
mod error;
pub mod model;
pub mod nn;
pub mod rng;

pub use error::{Error, Result};
