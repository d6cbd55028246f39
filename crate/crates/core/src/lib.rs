pub mod apportion;
pub mod campaign;
pub mod catalog;
pub mod certificate;
pub mod decomposition;
pub mod error;
pub mod export;
pub mod group;
pub mod labeling;
pub mod perm;
pub mod poly;
pub mod tree;

pub use catalog::{catalog, enumerate_free_trees, TreeCatalogEntry};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use tree::{CanonicalCode, FunctionalTree};
