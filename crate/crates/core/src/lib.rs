//! Stabilizer Rényi entropy (SRE) of 3-uniform hypergraph states.
//!
//! For a state `∏ CCZ |+>^N` the Pauli-Liouville moment depends only on the
//! GF(2) ranks of the alternating matrices `C(x) + C(x)ᵀ`, one per bit-string
//! `x`. This crate provides
//!
//! - [`gf2`]: bit-packed GF(2) matrices and rank,
//! - [`quadform`]: canonical forms of GF(2) quadratic forms,
//! - [`hypergraph`]: hypergraph descriptions, `C(x)`, and lattice generators,
//! - [`sre`]: exact enumeration, Monte Carlo estimation and upper bounds,
//! - [`recursion`]: the exact transfer recursion for the 1D triangle chain,
//! - [`oracle`]: brute-force statevector / Pauli-sum reference values.
//!
//! ```
//! use hypersre::{chain, sre, Alpha, EnumOptions};
//!
//! let h = chain(3).unwrap();
//! let r = sre(&h, Alpha::Finite(2.0), &EnumOptions::default()).unwrap();
//! assert_eq!(r.pl_moment.unwrap().to_string(), "11/32");
//! ```

pub mod error;
pub mod gf2;
pub mod hypergraph;
pub mod oracle;
pub mod quadform;
pub mod recursion;
pub mod sre;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec};
pub use hypergraph::{chain, triangular, union_jack, Hypergraph3, LatticeKind, VertexStats};
pub use oracle::{brute_pl_moment, eq9_expectation, pauli_expectation, statevector, PauliLabel, StateVector};
pub use quadform::{rank_relation, standardize, StandardForm};
pub use recursion::{asymptotic_fit, chain_pl_moment, fixed_moment, AsymptoticFit, ChainOptions, ChainState};
pub use sre::{
    exact_pl_moment, mc_sre, prev_upper_bound, rank_histogram, sre, upper_bound, Alpha, BoundVariant, EnumOptions,
    McEstimate, Method, Moment, RankHistogram, SreResult,
};
