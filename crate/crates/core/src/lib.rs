//! Exact model counting (plain and weighted) for CNF formulas.
//!
//! The pipeline is: parse ([`formula`]), simplify ([`preprocess`]), compute a
//! tree decomposition of the primal graph ([`td`]) and run the
//! component-caching search ([`counter`]) whose branching heuristic prefers
//! variables close to the root of the decomposition. [`driver`] strings the
//! stages together; [`oracle`] holds brute-force reference implementations.

pub mod bigfloat;
pub mod counter;
pub mod driver;
pub mod formula;
pub mod oracle;
pub mod preprocess;
pub mod sat;
pub mod semiring;
pub mod td;
