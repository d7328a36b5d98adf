pub mod cli;
pub mod equation;
pub mod fixtures;
pub mod freq_poly;
pub mod hopf;
pub mod nls;
pub mod oracle;
pub mod phase;
pub mod scheme;
pub mod suite;
pub mod tree;
