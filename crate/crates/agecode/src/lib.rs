//! Lossless fixed-to-variable block codes for streaming status updates.
//!
//! A source emits one symbol per unit time; the encoder groups every `B`
//! symbols into a block and maps it to a variable-length prefix codeword,
//! which drains through a FIFO buffer at `R` bits per symbol-time. The
//! figure of merit is the average status age at the decoder: how far the
//! reconstructed stream lags the source.
//!
//! The crate provides
//!
//! - source models: block extensions of i.i.d. sources and their type
//!   classes ([`source`]);
//! - code design: Huffman, penalty-optimal codes for
//!   `alpha E[L] + beta E[L^2]` via package-merge, the boundary of the
//!   achievable moment region, age-optimal codes, and type-based codes
//!   ([`code`]);
//! - closed forms: stability, waiting and age bounds from queue moments,
//!   error-exponent age bounds, and the worked two-length example with its
//!   geometric buffer law ([`queue`]);
//! - a discrete-event simulator of the encoder -> FIFO -> decoder pipeline
//!   with fluid and slotted channel timing ([`sim`]);
//! - reproducible experiment grids and their CSV schemas ([`experiments`]).
//!
//! Grid sweeps run in parallel by default; disable the `parallel` feature
//! for a fully sequential build.

pub mod code;
mod error;
pub mod experiments;
mod par;
pub mod queue;
pub mod sim;
pub mod source;

pub use code::{
    age_optimal_code, age_penalty, code_stats, default_l_max, huffman, hull_codebooks,
    package_merge_linear, type_code, CodeLengths, CodeStats, HullPoint, PenaltyWeights,
};
pub use error::{Error, Result};
pub use queue::{
    age_bound_partial_sum, age_upper_bound, error_exponent_age_bound, is_stable,
    kingman_wait_bound, ChannelConfig, ErrorExponentModel, ExampleModel,
};
pub use sim::{
    buffer_chain_sim, deliveries, derive_seed, run_age_sim, run_error_sim, ChainOccupancy,
    Delivery, ErrorEstimate, SimResult, TimingModel,
};
pub use source::{
    entropy_bits, enumerate_types, BlockDistribution, SourceDistribution, TypeClass,
};
