//! MQuinE: knowledge graph embeddings built from matrix quintuples.
//!
//! A fact (h, r, t) is scored by five d×d matrices — symmetric entity
//! embeddings `H`, `T` and a relation triple `⟨Rʰ, Rᵗ, Rᶜ⟩` — as
//! `‖H·Rʰ − Rᵗ·T + H·Rᶜ·T‖²_F`. The cross term `H·Rᶜ·T` is what lets the
//! model assign a *nonzero* score to the closing edge of a Z-pattern
//! (e₁→e₂, e₃→e₂, e₃→e₄) whose three observed edges all score zero;
//! purely translational models are forced to score that edge zero as well.
//!
//! The crate provides:
//! - [`kg`]: triple datasets with head/tail adjacency indexes,
//! - [`models`]: MQuinE plus TransE/RotatE/DistMult/ComplEx/MQuadE baselines,
//!   with analytic gradients and a binary checkpoint format,
//! - [`sampling`]: negative sampling and Z-sampling,
//! - [`training`]: the self-adversarial margin objective, Adam/SGD, epoch loop,
//! - [`evaluation`]: filtered link-prediction ranking and triple classification,
//! - [`zanalysis`]: Z-values, rank_Z, easy/neutral/hard case splits, and a
//!   Z-paradox probe for trained models,
//! - [`patterns`]: numerical checks of the relation-algebra constructions
//!   (symmetry, inversion, composition, 1-N/N-1/N-N capacity).

pub mod diagnostics;
pub mod error;
pub mod evaluation;
pub mod kg;
pub mod linalg;
pub mod models;
pub mod patterns;
pub mod sampling;
pub mod synth;
pub mod training;
pub mod zanalysis;

pub use error::{Error, Result};
pub use kg::{EntityId, KnowledgeGraph, RelationId, Split, Triple, Vocab};
pub use linalg::Mat;
pub use models::{Hyperparams, LowerTriangular, ModelKind, ModelState, RelationEmbedding};
