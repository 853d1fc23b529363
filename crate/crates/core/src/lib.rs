//! Text-classification benchmark: corpus loading, Turkish preprocessing,
//! document embeddings, seven classifiers and a grid harness that scores every
//! (preprocessing code, embedding, classifier) combination.

pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod harness;
pub mod models;
pub mod preprocess;
pub mod vectorize;

pub use error::{Error, Result};
