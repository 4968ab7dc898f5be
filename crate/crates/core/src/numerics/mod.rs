//! Shared numerical infrastructure.

pub mod grid;
pub mod ode;
pub mod quad;
pub mod special;

pub use grid::{cumulative_tail_integral, Grid, GridFunction, Tail};
pub use ode::{integrate_ode, OdeOptions, Trajectory};
pub use quad::{gauss_legendre, quad_adaptive, GaussLegendre};
pub use special::{erf, erfc};
