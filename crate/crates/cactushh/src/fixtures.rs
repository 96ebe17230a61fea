//! Bundled test algebras: the smallest Poincaré algebras covering nilpotent,
//! semisimple, and multiplicity-three behavior.

/// `k[x]/(x^2)` with trace `aug(x) = 1`.
pub const KX2: &str = include_str!("../fixtures/kx2.json");
/// `k[t]/(t^2 - 1)` with trace `aug(t) = 1` (semisimple away from char 2).
pub const KT2: &str = include_str!("../fixtures/kt2.json");
/// `k[x]/(x^3)` with trace `aug(x^2) = 1`.
pub const KX3: &str = include_str!("../fixtures/kx3.json");

/// Names and sources of all bundled fixtures, in report order.
pub const ALL: [(&str, &str); 3] = [("kx2", KX2), ("kt2", KT2), ("kx3", KX3)];
