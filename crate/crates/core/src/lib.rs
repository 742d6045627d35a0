//! Extraction of metadata, document structure and bibliography from
//! token-level rich XML renderings of scholarly articles, with TEI export,
//! a linear-chain CRF labeler and a token-level evaluation harness.

pub mod bibliography;
pub mod chunker;
pub mod crf;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod lexicon;
pub mod metadata;
pub mod model;
pub mod pipeline;
pub mod scalar;
pub mod structure;
pub mod synth;
pub mod tei;
pub mod usecases;

pub use eval::TokenMetrics;
pub use scalar::Scalar;

/// Double-precision sequence labeler used by the extraction pipeline.
pub type CrfModel = crf::Crf<f64>;
/// Single-precision sequence labeler.
pub type CrfModel32 = crf::Crf<f32>;
