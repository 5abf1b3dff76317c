//! Crate-wide error type.

use thiserror::Error;

/// Unified error for all pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ink data error: {0}")]
    Ink(#[from] crate::ink::InkError),

    #[error("featurize error: {0}")]
    Featurize(#[from] crate::featurize::FeaturizeError),

    #[error("nn error: {0}")]
    Nn(#[from] crate::nn::NnError),

    #[error("training error: {0}")]
    Train(#[from] crate::pretrain::TrainError),

    #[error("fine-tuning error: {0}")]
    Finetune(#[from] crate::finetune::FinetuneError),

    #[error("report error: {0}")]
    Report(#[from] crate::report::ReportError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
