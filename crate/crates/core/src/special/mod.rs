//! Special functions used by the closed-form tomograms.
//!
//! Every routine is pure and reentrant. The parabolic cylinder function is
//! the only one with a non-trivial evaluation strategy; see [`parabolic`].

mod gamma;
mod hypergeometric;
mod orthopoly;
pub mod parabolic;

pub use gamma::{gamma_real, ln_gamma, pochhammer, rgamma};
pub use hypergeometric::{kummer_1f1, SeriesControl};
pub use orthopoly::{assoc_laguerre, hermite, laguerre};
pub use parabolic::{gaussian_power_integral, pcf_d, pcf_d_scaled, pcf_d_single_term};
