//! Exact combinatorics of ice quivers: mutation of quivers and seeds over
//! rational Laurent polynomials, hive quivers glued along disk
//! triangulations, flip and twist mutation sequences, vertex optimization,
//! balanced extensions, and Schofield semi-invariants of flag quivers.

pub mod error;
pub mod hive;
pub mod label;
pub mod laurent;
pub mod linalg;
pub mod optimizer;
pub mod quiver;
pub mod seed;
pub mod semiinv;
pub mod surface;
pub mod weight;

pub use error::{Error, Result};
pub use hive::{build_hive, HiveQuiver};
pub use label::Label;
pub use laurent::LaurentPoly;
pub use quiver::IceQuiver;
pub use seed::Seed;
pub use surface::{glue, DiskTriangulation, GluedQuiver};
