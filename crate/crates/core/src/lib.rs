//! Quasistatic small-strain elastoplasticity (von Mises, linear isotropic
//! hardening) on tetrahedral meshes, solved by a semismooth Newton method
//! whose linear systems go through a total FETI domain decomposition.

pub mod config;
pub mod direct;
pub mod driver;
pub mod fem;
pub mod load;
pub mod material;
pub mod mesh;
pub mod output;
pub mod run;
pub mod sparse;
pub mod tfeti;
