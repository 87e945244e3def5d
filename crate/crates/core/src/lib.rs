//! A typed parallel lambda calculus for intuitionistic logic with the linearity axiom.
//!
//! Terms are proofs in natural deduction extended with a communication rule; the
//! parallel operator `u ||[a : B ~ C] v` binds a channel `a` used at `B -> C` on the left
//! and `C -> B` on the right.

pub mod analyze;
pub mod frontend;
pub mod kernel;
pub mod rewrite;
pub mod strategy;
pub mod typing;
