pub mod config;
pub mod error;
pub mod golden;
pub mod grouplat;
pub mod jumpseq;
pub mod laurent;
pub mod outputs;
pub mod report;
pub mod valmodel;
pub mod values;
