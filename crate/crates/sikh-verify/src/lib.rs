//! Verification harness for the homology construction: randomized d-squared
//! checks, exhaustive band-commutativity enumeration, Reidemeister fixtures,
//! specialization comparisons against an independent brute-force
//! implementation, and the detection-rank suite.

pub mod checks;
pub mod fixtures;
pub mod generate;
pub mod maps;
pub mod oracle;
pub mod report;
