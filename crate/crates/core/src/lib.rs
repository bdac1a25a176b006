//! Quantum-logic conditional probability on finite orthomodular posets.
#![no_std]

extern crate alloc;

pub mod builders;
pub mod cloning;
pub mod compat;
pub mod composite;
mod error;
pub mod hilbert;
pub mod logic;
pub mod lp;
pub mod morphisms;
pub mod polytope;
pub mod rational;
pub mod state;

pub use error::{Axiom, Error, LemmaDetail, Result};
pub use logic::{validate_logic, Element, FiniteLogic, LogicDescription, ValidateConfig};
pub use rational::Rational;
