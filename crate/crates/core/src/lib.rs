//! Symplectic and optical tomograms, their characteristic functions, and the
//! checks and reconstructions built on them.

pub mod charfun;
pub mod error;
pub mod estimation;
pub mod quadrature;
pub mod reconstruction;
pub mod special;
pub mod state;
pub mod tomogram;
pub mod validator;

pub use charfun::CharFnProvider;
pub use error::{Error, Result};
pub use state::StateModel;
pub use tomogram::FrameParams;
