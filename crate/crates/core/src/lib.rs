//! Minimal blocking sets of PG(m,p) and the dual covers of `(C_p)^{m+1}`
//! by maximal subgroups.
//!
//! - [`gflin`]: exact linear algebra over GF(p).
//! - [`projgeom`]: points, hyperplanes and global indices of PG(m,p).
//! - [`blocking`]: blocking and minimality tests, normal and canonical forms,
//!   the GF(2) classification and the projective triangle.
//! - [`covers`]: the dual covers, their verification and structural audits.
//! - [`search`]: exhaustive symmetry-reduced search and the size table.
//! - [`format`]: text formats for point sets and covers.

pub mod blocking;
pub mod covers;
pub mod error;
pub mod format;
pub mod gflin;
pub mod par;
pub mod projgeom;
pub mod search;

mod bitset;

pub use error::{Error, Result};
