//! Numerical building blocks shared by the pricing modules.

pub mod normal;
pub mod quadrature;
pub mod roots;

pub use normal::{norm_cdf, norm_pdf};
pub use quadrature::{adaptive_gauss_kronrod, GaussLegendre, QuadratureError};
pub use roots::{brent, RootError};
