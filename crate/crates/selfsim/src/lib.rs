//! Exact computation in self-similar groups acting on the binary rooted tree,
//! permutation wreath products over their level actions, and diagonal
//! products of marked groups.
//!
//! The crate is organised bottom up:
//!
//! - [`tree`]: portraits, the generators of `G_ω`, sections, Schreier distances.
//! - [`word`], [`norm`], [`identities`]: the formal recursion and the word identities it satisfies.
//! - [`marked`], [`finite`]: marked groups, parallel ball enumeration, finite lamp groups.
//! - [`wreath`]: permutation wreath products and the factor groups built from them.
//! - [`traverse`]: traverse fields of words on a level.
//! - [`central`]: the class-two central extension over `𝖫_n × G₃`.
//! - [`synthesis`]: growth bounds, schedules and lamp plans for a prescribed growth function.
//!
//! Actions are on the right throughout.

pub mod central;
pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod finite;
pub mod identities;
pub mod marked;
pub mod norm;
pub mod synthesis;
pub mod traverse;
pub mod tree;
pub mod verify;
pub mod word;
pub mod wreath;

pub use error::{Error, Result};
pub use tree::{OmegaString, TreeAut, Vertex};
pub use word::{Letter, Word};
