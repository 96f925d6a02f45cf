//! Irreducibility of log arc and jet schemes of monoid log schemes.

pub mod cone;
pub mod corpus;
pub mod format;
pub mod jets;
pub mod lattice;
pub mod logmodel;
pub mod monoid;
pub mod oracle;
pub mod poly;
pub mod report;
