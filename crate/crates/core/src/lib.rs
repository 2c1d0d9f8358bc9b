//! Verification toolkit for an interval calculus on the rank-2 free group
//! and the orthogonal decompositions it induces.
//!
//! The crate is organized around three layers:
//!
//! * exact combinatorics: reduced words ([`freegroup`]) and the interval
//!   system they generate ([`intervals`]), with exhaustive verifiers for
//!   the interval laws (factor closure, first letters, scheduled
//!   intersections, subinterval splitting, meet closure);
//! * finite-dimensional Hilbert geometry: subspaces as orthonormal frames
//!   ([`hilbert`]), the relative-orthogonality relation and its
//!   independence axioms, concrete interval-indexed subspace systems
//!   ([`cairn`]) and their level decompositions ([`splitting`]);
//! * spectral certificates: adjacency operators on Cayley balls of the
//!   free group, top-eigenvalue estimation against the 2*sqrt(3) norm
//!   bound, and the displacement constant eta = sqrt(2 - sqrt(3))
//!   ([`spectral`]).
//!
//! Heavy sweeps (pairwise interval checks, subspace verification,
//! matrix-vector products) run on rayon when the `parallel` feature is
//! enabled (default) and fall back to plain iterators otherwise. Results
//! are identical either way: parallel maps preserve order and no
//! floating-point reduction depends on thread scheduling.
//!
//! ```
//! use cairncheck::intervals::Chain;
//!
//! let chain = Chain::new(6);
//! assert_eq!(chain.sizes()[..6], [1, 2, 3, 6, 9, 16]);
//!
//! // the meet of two intervals is again an interval
//! let i4 = chain.base(4)?;
//! let shifted = chain.translate(&cairncheck::freegroup::Word::parse("a")?, &i4);
//! assert_eq!(chain.intersect(&i4, &shifted)?, chain.base(1)?);
//!
//! // and the whole law suite is one call away
//! assert!(chain.verify(5)?.pass);
//! # Ok::<(), cairncheck::Error>(())
//! ```

pub mod cairn;
pub mod config;
pub mod error;
pub mod exec;
pub mod freegroup;
pub mod hilbert;
pub mod intervals;
pub mod report;
pub mod spectral;
pub mod splitting;

pub use config::{Caps, Config, Tolerances};
pub use error::{Error, Result};
