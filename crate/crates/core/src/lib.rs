//! Activity regression from SMILES: parsing, circular fingerprints, token
//! embeddings, autoencoder compression and a probabilistic conditional GAN.

pub mod chem;
pub mod codec;
pub mod nn;
pub mod featurize;
pub mod autoencoder;
pub mod probcgan;

mod error;
pub use error::TrainError;
pub mod eval;
pub mod baselines;
pub mod dataio;
