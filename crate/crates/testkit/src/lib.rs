//! Brute-force oracles and generators used by the test suites. Everything
//! here is deliberately naive and independent of the algorithms in
//! `oruga-core`; agreement between the two is what the tests check.

pub mod corpus;
pub mod enumerator;
pub mod gen;
pub mod oracles;

pub use corpus::{corpus_dir, load_corpus, read_corpus_files};
pub use enumerator::{enumerate_transfers, EnumeratedResult};
pub use gen::{generate_construction, generate_pattern_for, Tape};
pub use oracles::{
    brute_force_match_exists, check_matching_invariants, reachability_closure, scan_arities,
};
