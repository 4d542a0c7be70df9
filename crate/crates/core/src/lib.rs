//! Exact affine modifications of polynomial rings, lifting of flows and
//! automorphisms to modifications, an m-transitivity solver for the
//! hypersurfaces `u*v = p(x)`, rectification of surfaces `p(x)*z = g(x, y)`,
//! and finite-field point counting.

pub mod error;
pub mod ffcount;
pub mod flows;
pub mod linalg;
pub mod modification;
pub mod parse;
pub mod poly;
pub mod rectify;
pub mod scalar;
pub mod transitivity;

pub use error::{Error, Result};
pub use parse::{parse, parse_in};
pub use poly::{compose_all, Poly, PolyMap, VarContext};
pub use scalar::{Capprox, Field, Fp, Rational, Q};
