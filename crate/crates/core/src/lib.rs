//! Reference interpreter for Rascal Light.

pub mod ast;
pub mod cli;
pub mod eval;
pub mod fuel;
pub mod harness;
pub mod ops;
pub mod parser;
pub mod pattern;
pub mod traversal;
pub mod typing;
pub mod validate;
pub mod value;

/// Runs `f` with at least a red zone of native stack left, allocating a new
/// segment when the current one is nearly used up. Recursive walks over
/// syntax trees go through this so deeply nested input cannot overflow.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, f)
}
