//! Exact semilattices of linear subspaces, blow-up charts, and the
//! comparison between iterated blow-ups and the Georgescu compactification.

pub mod charts;
pub mod cli;
pub mod compactify;
pub mod exact_linalg;
pub mod georgescu;
pub mod nbody;
pub mod report;
pub mod semilattice;
