//! Orbit classification for the highest-root layer of exceptional Chevalley
//! algebras in characteristic 2.
//!
//! Given one of the root systems E6/E7/E8 and a finite field GF(2^k), the
//! crate builds the Chevalley module, realizes the action of elementary root
//! elements `x_alpha(a)`, and classifies orbits of the subsystem group acting
//! on the span of the layer-one root vectors. Classification is by exact
//! invariants (a Cartan coefficient, an additive equivalence class, and a
//! rank profile), and can be cross-checked by exhaustive breadth-first orbit
//! enumeration over GF(2).

pub mod census;
pub mod error;
pub mod gf2k;
pub mod invariants;
pub mod liealg;
pub mod reduce;
pub mod rootsys;
pub mod wire;

pub use error::{Error, Result};
pub use gf2k::{make_field, Fel, Field};
pub use invariants::{Classifier, OrbitLabel, Signature};
pub use liealg::{ChevVec, GroupWord};
pub use reduce::QuintupleVec;
pub use rootsys::{build_root_system, Quadruple, Root, RootSystem, RootSystemId};
