//! Unit-modulus completely multiplicative functions: exact and floating
//! values, Dirichlet characters, modified characters and their algebra.

mod character;
mod function;
mod unit;

pub use character::{cyclic_character, index_ranges, DirichletCharacter, CHARACTER_MODULUS_BUDGET};
pub use function::{eval_with_factorization, nearest_root, ModifiedFunction, MultFunction, NearestRoot};
pub use unit::{Chord, Turn, UnitValue};

/// Builds the character mod `q` with the given per-component index.
pub fn dirichlet_character(q: u64, index: &[u64]) -> crate::Result<DirichletCharacter> {
    DirichletCharacter::new(q, index)
}
