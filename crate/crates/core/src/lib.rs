//! Exact computations with super-geometric thickenings of CP¹ and CP².
//!
//! The crate is layered bottom-up:
//!
//! - [`laurent`]: multivariate Laurent polynomials over ℚ, chart maps and
//!   nilpotent Taylor substitution.
//! - [`exterior`]: the Grassmann algebra on `q` odd generators with Laurent
//!   coefficients.
//! - [`linalg`]: dense Gaussian elimination over ℚ.
//! - [`cech`]: standard covers, alternating Čech cochains, coboundaries,
//!   the monomial cohomology oracle and the weight-block solver.
//! - [`bott`]: closed-form cohomology dimensions (Bott formula, Serre duality).
//! - [`supermap`]: super coordinate changes, trivialisations, the obstruction
//!   2-cocycle and the connecting map of a first-order extension.
//! - [`obstruct`]: the rank-3 existence conditions on CP² and the derived searches.
//! - [`io`] and [`cli`]: stable JSON formats and the command-line surface.

pub mod bott;
pub mod cech;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod io;
pub mod laurent;
pub mod linalg;
pub mod obstruct;
pub mod sample;
pub mod supermap;

pub use error::{Error, Result};
pub use exterior::{GrassmannElement, MultiIndex};
pub use laurent::{ChartMap, ExponentVector, LaurentPoly, Rational};
