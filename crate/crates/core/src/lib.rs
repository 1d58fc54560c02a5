pub mod coefficients;
pub mod counterexamples;
pub mod error;
pub mod functionals;
pub mod gamma;
pub mod hankel;
pub mod linalg;
pub mod multipliers;
pub mod quadrature;
pub mod report;
pub mod spaces;
