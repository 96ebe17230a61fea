//! Exact combinatorics of the cactus operad and the chain-level structure
//! it induces on the dual of Hochschild homology of a commutative Frobenius
//! algebra.
//!
//! Everything is computed over an exact field (the rationals or a prime
//! field); there is no floating point and no tolerance anywhere. The crate
//! splits into:
//!
//! - [`cacti`]: cactus configurations as canonical traversal words, spiny
//!   refinements, operadic composition, generator decomposition, and the
//!   rational simplex realization map;
//! - [`cyclic`]: cyclic modules, the cyclic identities, chain complexes, the
//!   Connes boundary, duals, and an exact homology engine;
//! - [`frobenius`]: structure-constant Frobenius algebras with the
//!   duality-derived coproduct;
//! - [`hochschild`]: the cyclic bar construction, pinch/split structure maps
//!   indexed by spiny cacti, the dual cochain complex, and the induced
//!   product, Δ operator, and bracket on cohomology;
//! - [`suite`]: the keyed verification suite run by the CLI and the tests.

pub mod cacti;
pub mod cyclic;
pub mod field;
pub mod fixtures;
pub mod frobenius;
pub mod hochschild;
pub mod linalg;
pub mod report;
pub mod suite;
