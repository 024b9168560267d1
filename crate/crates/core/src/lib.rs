//! Primitive pairs `(α, f(α))` in finite fields.

pub mod ffcore;
pub mod polyrat;
pub mod charsums;
pub mod bounds;
pub mod search;
