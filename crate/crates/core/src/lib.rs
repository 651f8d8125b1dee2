pub mod action;
pub mod bits;
pub mod caps;
pub mod error;
pub mod export;
pub mod group;
pub mod linear;
pub mod rational;
pub mod sampling;
pub mod scenario;
pub mod search;
pub mod submodular;
pub mod theorems;

pub use caps::Caps;
pub use error::{Error, Result};
pub use rational::Rational;
