//! Computations with linearly closed clonoids: sets of finitary functions
//! from a finite product of finite fields K to another such product F of
//! coprime order, closed under linear composition on both sides.

pub mod absorbing;
pub mod clonoid;
pub mod error;
pub mod modlattice;
pub mod ffield;
pub mod funcspace;
pub mod linalg;

pub use error::{Error, Result};
