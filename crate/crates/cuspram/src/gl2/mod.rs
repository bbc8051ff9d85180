//! Finite quotients of `GL_2(Z_p)` carrying cuspidal inducing data, their
//! exact character tables and the classification of irreducibles.

pub mod classify;
pub mod group;
pub mod oracle;
pub mod serial;
pub mod table;

pub use group::{ConjClass, Elem, FiniteGroupModel, GroupCase, DEFAULT_BUDGET};
pub use table::{character_table, CharacterRow, CharacterTable};
pub use classify::{classify_irreps, CharacterField, Classifier, IrrepData};
