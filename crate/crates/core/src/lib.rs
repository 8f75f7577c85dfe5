//! Exact intersection numbers of Witten's r-spin class.
//!
//! * [`genus0`]: genus-0 primary correlators from closed forms and WDVV.
//! * [`dr1`]: genus-1 double ramification brackets, by closed formula and by
//!   solving the linear relations among them.
//! * [`verify`]: exact property suites cross-checking the two.
//! * [`store`]: the persistent value cache.

pub mod bracket;
pub mod cli;
pub mod dr1;
pub mod engine;
pub mod enumerate;
pub mod error;
pub mod genus0;
pub mod linsolve;
pub mod rational;
pub mod store;
pub mod verify;

pub use bracket::{
    dr1_selection, genus0_selection, genus_of, parse_canonical_key, parse_key, spin_divisibility,
    vanishing_by_axiom, BracketKey, Dr1Bracket, EvalResult, Genus0Bracket, SpinContext, Status,
};
pub use engine::Engine;
pub use error::{Error, Result};
pub use rational::Rational;
pub use store::CacheStore;
