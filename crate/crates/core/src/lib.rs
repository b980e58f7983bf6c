//! Constructive structural Ramsey theory at desk scale.
//!
//! * [`paramwords`]: Graham-Rothschild parameter words and substitution.
//! * [`ordstruct`]: ordered relational structures, hypergraphs, embeddings.
//! * [`fincat`]: finite categories and the Ramsey-arrow verifier.
//! * [`transfer`]: constructions that move Ramsey witnesses between
//!   categories, and the end-to-end pipeline for ordered structures.
//! * [`cert`]: JSON certificates and their independent replay.

pub mod canon;
pub mod cert;
pub mod fincat;
pub mod ordstruct;
pub mod paramwords;
pub mod transfer;
