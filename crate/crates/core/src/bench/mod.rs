//! Benchmark inputs: RevLib ingestion, Toffoli decomposition, ICM skeleton
//! generation, the published results table, and Monte Carlo runs.

pub mod corpus;
pub mod mct;
pub mod montecarlo;
pub mod real;
pub mod skeleton;
pub mod table1;

pub use mct::{decompose_mct, simulate_bits, simulate_permutation, MctCircuit, MctError, MctGate};
pub use montecarlo::{monte_carlo, run_seed, Distribution, MonteCarloStats};
pub use real::{parse_real, parse_real_document, RealError, RealHeader};
pub use skeleton::{expand_to_icm_skeleton, SkeletonError, SkeletonParams};
pub use table1::{check_table1, load_table1, table1_fixture, CheckStatus, Table1Check, Table1Report, Table1Row};
