//! Asynchronous dynamics of xor Boolean automata networks: the static model
//! and its sign-relocating transforms, named family generators, exhaustive
//! asynchronous transition graphs, constructive update-sequence planning, and
//! behavioural-isomorphism analysis.

pub mod atg;
pub mod equiv;
pub mod families;
pub mod net;
pub mod planner;
pub mod report;
pub mod scc;
pub mod textio;

pub use net::{AutomatonId, Configuration, LocalRule, NetError, Network, NudePath, SignedLiteral};
