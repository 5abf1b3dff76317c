//! Self-supervised representation learning for online handwriting.
//!
//! The toolkit covers the full pipeline:
//!
//! - [`ink`]: canonical stroke data model, JSON-lines interchange, IAM-style
//!   XML import, and a seeded synthetic handwriting generator.
//! - [`featurize`]: feature derivation, shift-windowing, per-window
//!   normalization/scaling, multi-view block masking, and the window/chain
//!   builders used by fine-tuning.
//! - [`nn`]: a minimal deterministic neural toolkit (bidirectional LSTM,
//!   dense, batch norm, dropout, losses, Adam, gradient checking).
//! - [`pretrain`]: masked-window pretraining of aggregate-state and
//!   full-state recurrent encoders, with reusable checkpoints.
//! - [`finetune`]: exclusive and inclusive fine-tuning pipelines, layer
//!   freezing, and soft-voting inference.
//! - [`report`]: reconstruction evaluation with SVG rendering, metric
//!   reports, and pretrained-vs-scratch comparisons.
//!
//! All operations are deterministic given their inputs and seeds; parallel
//! and serial runs produce identical results.

pub mod error;
pub mod featurize;
pub mod finetune;
pub mod ink;
pub mod nn;
pub mod oracles;
pub mod pretrain;
pub mod report;
pub mod rng;
pub mod tensor;

pub use error::Error;
pub use tensor::Tensor;
