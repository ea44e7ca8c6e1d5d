pub mod analyzer;
pub mod classical_ss;
pub mod config;
pub mod fqmat;
pub mod funcfield;
pub mod gf;
pub mod qsim;
pub mod scheme;
