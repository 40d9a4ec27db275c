//! Label-preserving text augmentation for emotion-labeled developer
//! comments: corpus loading and masking, emotion and polarity lexicons, edit
//! operators, the unconstrained/lexicon/polarity strategies, and an n-gram
//! baseline with micro-averaged evaluation.

pub mod config;
pub mod corpus;
pub mod eval;
pub mod lexicon;
pub mod operators;
pub mod strategies;
pub mod synth;
pub mod taxonomy;
